"""Formal powers for the bicomplex Vekua equations of the 2-D Dirac system
with a scalar potential, built through transmutation operators."""

from .approximation import (RungeFit, TaylorExpansion, derivative_coefficients,
                            evaluate_formal_series, runge_fit, taylor_coefficients)
from .bicomplex import (I, IK, K, ONE, Bicomplex, BicomplexArray, bc_inverse, bc_mul,
                        idempotent_combine, idempotent_split)
from .config import RunConfig, load_config
from .dirac import PotentialData, PotentialSpec, abar, derive_potential_data
from .errors import PseudopowerError
from .formal_powers import (FormalPowerSet, GeneratingPair, GeneratingSequence,
                            characteristic_coefficients, fg_derivative, fg_integral,
                            formal_power_closed, formal_power_recursive)
from .grids import BicomplexField2D, ComplexField1D, Grid2D, SymmetricGrid1D
from .systems import XSystems, build_function_system, build_x_systems
from .transmutation import OperatorSet, Transmutation, dress_kernel, goursat_kernel

__version__ = "0.1.0"
