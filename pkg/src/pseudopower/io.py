"""CSV field files and JSON reports.

Field CSVs have the header ``x,y,re,im_i,im_k,im_ik`` with one row per
node, x-major (all ``y`` for the first ``x``, then the next ``x``).  Kernel
CSVs have ``x,t,re,im`` over the same node ordering.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bicomplex import BicomplexArray
from .errors import ConfigParseError
from .grids import BicomplexField2D, Grid2D, SymmetricGrid1D

FIELD_COLUMNS = ("x", "y", "re", "im_i", "im_k", "im_ik")
KERNEL_COLUMNS = ("x", "t", "re", "im")
_FMT = "%.17g"


def write_field_csv(path, W: BicomplexField2D) -> Path:
    path = Path(path)
    X, Y = W.grid.mesh()
    u, v = W.u, W.v
    table = np.column_stack([X.ravel(), Y.ravel(), u.real.ravel(), u.imag.ravel(),
                             v.real.ravel(), v.imag.ravel()])
    np.savetxt(path, table, delimiter=",", fmt=_FMT,
               header=",".join(FIELD_COLUMNS), comments="")
    return path


def read_field_csv(path) -> BicomplexField2D:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    if tuple(header) != FIELD_COLUMNS:
        raise ConfigParseError(f"{path}: header must be {','.join(FIELD_COLUMNS)}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs, ys = np.unique(data[:, 0]), np.unique(data[:, 1])
    nx, ny = xs.size, ys.size
    if nx * ny != data.shape[0]:
        raise ConfigParseError(f"{path}: rows do not form a full grid")
    grid = Grid2D(SymmetricGrid1D(float(xs[-1]), nx), SymmetricGrid1D(float(ys[-1]), ny))
    order = np.lexsort((data[:, 1], data[:, 0]))
    data = data[order]
    u = (data[:, 2] + 1j * data[:, 3]).reshape(nx, ny)
    v = (data[:, 4] + 1j * data[:, 5]).reshape(nx, ny)
    return BicomplexField2D(grid, BicomplexArray(u, v))


def write_kernel_csv(path, grid: SymmetricGrid1D, values: np.ndarray) -> Path:
    path = Path(path)
    x = grid.nodes
    X, T = np.meshgrid(x, x, indexing="ij")
    values = np.asarray(values, dtype=complex)
    table = np.column_stack([X.ravel(), T.ravel(), values.real.ravel(), values.imag.ravel()])
    np.savetxt(path, table, delimiter=",", fmt=_FMT,
               header=",".join(KERNEL_COLUMNS), comments="")
    return path


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _finite(obj):
    # JSON has no inf/nan
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_finite(json.loads(json.dumps(obj, default=_default))),
                      indent=2, sort_keys=True, allow_nan=False)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj) + "\n")
    return path
