"""Bicomplex numbers: the commutative algebra spanned by 1, i, k, ik.

A bicomplex number is written ``w = u + k v`` with ``u`` and ``v`` ordinary
complex numbers in the unit ``i``.  Both units square to -1 and commute.

Two representations are used throughout:

* the *Cartesian* view ``(u, v)`` (``Sc w = u``, ``Vec w = v``), and
* the *idempotent* view ``(w+, w-) = (u - i v, u + i v)``, in which the
  product is componentwise.  ``w = P+ w+ + P- w-`` with
  ``P± = (1 ± i k) / 2``.

:class:`Bicomplex` is an immutable scalar stored as four doubles;
:class:`BicomplexArray` holds numpy arrays of ``u`` and ``v`` and is the
carrier of every gridded field in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import ZeroDivisor

__all__ = [
    "Bicomplex",
    "BicomplexArray",
    "bc_mul",
    "bc_inverse",
    "idempotent_split",
    "idempotent_combine",
    "ONE",
    "I",
    "K",
    "IK",
    "IDEM_PLUS",
    "IDEM_MINUS",
    "k_power",
]


@dataclass(frozen=True)
class Bicomplex:
    """``re + i*im_i + k*im_k + ik*im_ik``."""

    re: float = 0.0
    im_i: float = 0.0
    im_k: float = 0.0
    im_ik: float = 0.0

    @classmethod
    def from_uv(cls, u, v=0.0) -> "Bicomplex":
        u = complex(u)
        v = complex(v)
        return cls(u.real, u.imag, v.real, v.imag)

    @classmethod
    def coerce(cls, value) -> "Bicomplex":
        if isinstance(value, Bicomplex):
            return value
        if isinstance(value, (Number, np.number)):
            return cls.from_uv(value, 0.0)
        raise TypeError(f"cannot interpret {value!r} as a bicomplex number")

    @property
    def u(self) -> complex:
        return complex(self.re, self.im_i)

    @property
    def v(self) -> complex:
        return complex(self.im_k, self.im_ik)

    def sc(self) -> complex:
        return self.u

    def vec(self) -> complex:
        return self.v

    def conj(self) -> "Bicomplex":
        """Conjugation with respect to ``k``: ``u - k v``."""
        return Bicomplex(self.re, self.im_i, -self.im_k, -self.im_ik)

    def split(self) -> tuple[complex, complex]:
        return idempotent_split(self)

    def is_invertible(self) -> bool:
        wp, wm = self.split()
        return wp != 0 and wm != 0

    def __add__(self, other):
        try:
            o = Bicomplex.coerce(other)
        except TypeError:
            return NotImplemented
        return Bicomplex(self.re + o.re, self.im_i + o.im_i,
                         self.im_k + o.im_k, self.im_ik + o.im_ik)

    __radd__ = __add__

    def __neg__(self):
        return Bicomplex(-self.re, -self.im_i, -self.im_k, -self.im_ik)

    def __sub__(self, other):
        try:
            o = Bicomplex.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BicomplexArray):
            return NotImplemented
        try:
            o = Bicomplex.coerce(other)
        except TypeError:
            return NotImplemented
        return bc_mul(self, o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = Bicomplex.coerce(other)
        except TypeError:
            return NotImplemented
        return bc_mul(self, bc_inverse(o))

    def __rtruediv__(self, other):
        return bc_mul(Bicomplex.coerce(other), bc_inverse(self))

    def __abs__(self) -> float:
        # norm used by the T-operator bounds: |u| + |v|
        return abs(self.u) + abs(self.v)

    def isclose(self, other, rtol=1e-12, atol=1e-14) -> bool:
        o = Bicomplex.coerce(other)
        return bool(np.isclose(self.u, o.u, rtol=rtol, atol=atol)
                    and np.isclose(self.v, o.v, rtol=rtol, atol=atol))

    def __repr__(self) -> str:
        return (f"Bicomplex({self.re!r}, {self.im_i!r}, "
                f"{self.im_k!r}, {self.im_ik!r})")


def bc_mul(a: Bicomplex, b: Bicomplex) -> Bicomplex:
    u1, v1, u2, v2 = a.u, a.v, b.u, b.v
    return Bicomplex.from_uv(u1 * u2 - v1 * v2, u1 * v2 + v1 * u2)


def idempotent_split(w: Bicomplex) -> tuple[complex, complex]:
    """Return ``(w+, w-) = (u - i v, u + i v)``."""
    u, v = w.u, w.v
    return u - 1j * v, u + 1j * v


def idempotent_combine(w_plus, w_minus) -> Bicomplex:
    """Inverse of :func:`idempotent_split`."""
    u = 0.5 * (w_plus + w_minus)
    v = 0.5j * (w_plus - w_minus)
    return Bicomplex.from_uv(u, v)


def bc_inverse(w: Bicomplex) -> Bicomplex:
    wp, wm = idempotent_split(w)
    if wp == 0 or wm == 0:
        raise ZeroDivisor(f"{w!r} is a zero divisor (w+={wp}, w-={wm})")
    return idempotent_combine(1.0 / wp, 1.0 / wm)


ONE = Bicomplex(1.0)
I = Bicomplex(0.0, 1.0)
K = Bicomplex(0.0, 0.0, 1.0)
IK = Bicomplex(0.0, 0.0, 0.0, 1.0)
IDEM_PLUS = Bicomplex(0.5, 0.0, 0.0, 0.5)
IDEM_MINUS = Bicomplex(0.5, 0.0, 0.0, -0.5)


def k_power(m: int) -> tuple[int, int]:
    """``k**m`` as an exact pair ``(sc, vec)`` of integers."""
    return ((1, 0), (0, 1), (-1, 0), (0, -1))[m % 4]


def _as_uv(value):
    """Split an operand into ``(u, v)`` parts (arrays or scalars)."""
    if isinstance(value, BicomplexArray):
        return value.u, value.v
    if isinstance(value, Bicomplex):
        return value.u, value.v
    # plain numbers and numpy arrays are scalars (complex in i)
    return value, 0.0


class BicomplexArray:
    """Array of bicomplex numbers stored as two complex arrays ``u``, ``v``.

    Arithmetic broadcasts like numpy.  Plain numbers and ndarrays act as
    scalar (``C_i``-valued) operands.
    """

    __array_priority__ = 100
    __slots__ = ("u", "v")

    def __init__(self, u, v=None):
        u = np.asarray(u, dtype=complex)
        v = np.zeros_like(u) if v is None else np.asarray(v, dtype=complex)
        if u.shape != v.shape:
            u, v = np.broadcast_arrays(u, v)
            u, v = u.copy(), v.copy()
        self.u = u
        self.v = v

    @classmethod
    def full(cls, shape, value) -> "BicomplexArray":
        b = Bicomplex.coerce(value)
        return cls(np.full(shape, b.u, dtype=complex),
                   np.full(shape, b.v, dtype=complex))

    @classmethod
    def from_split(cls, w_plus, w_minus) -> "BicomplexArray":
        w_plus = np.asarray(w_plus, dtype=complex)
        w_minus = np.asarray(w_minus, dtype=complex)
        return cls(0.5 * (w_plus + w_minus), 0.5j * (w_plus - w_minus))

    @property
    def shape(self):
        return self.u.shape

    def copy(self) -> "BicomplexArray":
        return BicomplexArray(self.u.copy(), self.v.copy())

    def sc(self) -> np.ndarray:
        return self.u

    def vec(self) -> np.ndarray:
        return self.v

    def conj(self) -> "BicomplexArray":
        return BicomplexArray(self.u, -self.v)

    def split(self) -> tuple[np.ndarray, np.ndarray]:
        return self.u - 1j * self.v, self.u + 1j * self.v

    def components(self) -> np.ndarray:
        """Stack of ``re, im_i, im_k, im_ik`` along a new last axis."""
        return np.stack([self.u.real, self.u.imag, self.v.real, self.v.imag],
                        axis=-1)

    def norm(self) -> float:
        """``max(|u| + |v|)``."""
        return float(np.max(np.abs(self.u) + np.abs(self.v)))

    def __getitem__(self, idx):
        u, v = self.u[idx], self.v[idx]
        if np.ndim(u) == 0:
            return Bicomplex.from_uv(u, v)
        return BicomplexArray(u, v)

    def __add__(self, other):
        u2, v2 = _as_uv(other)
        return BicomplexArray(self.u + u2, self.v + v2)

    __radd__ = __add__

    def __neg__(self):
        return BicomplexArray(-self.u, -self.v)

    def __sub__(self, other):
        u2, v2 = _as_uv(other)
        return BicomplexArray(self.u - u2, self.v - v2)

    def __rsub__(self, other):
        u2, v2 = _as_uv(other)
        return BicomplexArray(u2 - self.u, v2 - self.v)

    def __mul__(self, other):
        if isinstance(other, (BicomplexArray, Bicomplex)):
            u2, v2 = _as_uv(other)
            return BicomplexArray(self.u * u2 - self.v * v2,
                                  self.u * v2 + self.v * u2)
        return BicomplexArray(self.u * other, self.v * other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BicomplexArray":
        """Integer powers, computed on the idempotent components."""
        if int(n) != n:
            return NotImplemented
        wp, wm = self.split()
        if n < 0:
            if np.any(wp == 0) or np.any(wm == 0):
                raise ZeroDivisor("array contains zero divisors")
        return BicomplexArray.from_split(wp ** int(n), wm ** int(n))

    def inverse(self) -> "BicomplexArray":
        wp, wm = self.split()
        if np.any(wp == 0) or np.any(wm == 0):
            raise ZeroDivisor("array contains zero divisors")
        return BicomplexArray.from_split(1.0 / wp, 1.0 / wm)

    def __truediv__(self, other):
        if isinstance(other, BicomplexArray):
            return self * other.inverse()
        if isinstance(other, Bicomplex):
            return self * bc_inverse(other)
        return BicomplexArray(self.u / other, self.v / other)

    def __rtruediv__(self, other):
        u2, v2 = _as_uv(other)
        return BicomplexArray(u2, v2) * self.inverse()

    def __repr__(self) -> str:
        return f"BicomplexArray(shape={self.shape})"
