"""Exception hierarchy shared by all modules."""


class PseudopowerError(Exception):
    """Base class for every error raised by the library."""

    code = "error"


class ZeroDivisor(PseudopowerError, ZeroDivisionError):
    code = "zero_divisor"


class GridTooSmall(PseudopowerError, ValueError):
    code = "grid_too_small"


class GridMismatch(PseudopowerError, ValueError):
    code = "grid_mismatch"


class VanishingGenerator(PseudopowerError, ValueError):
    code = "vanishing_generator"


class Unnormalized(PseudopowerError, ValueError):
    code = "unnormalized"


class DegeneratePair(PseudopowerError, ValueError):
    code = "degenerate_pair"


class PathOffGrid(PseudopowerError, ValueError):
    code = "path_off_grid"


class DegreeOutOfRange(PseudopowerError, ValueError):
    code = "degree_out_of_range"


class NoConvergence(PseudopowerError, RuntimeError):
    code = "no_convergence"


class SingularStep(PseudopowerError, RuntimeError):
    code = "singular_step"


class NonRealPotential(PseudopowerError, ValueError):
    code = "non_real_potential"


class DerivativeMissing(PseudopowerError, ValueError):
    code = "derivative_missing"


class NotCompatible(PseudopowerError, ValueError):
    """The field is not a gradient: the compatibility condition fails."""

    code = "not_compatible"


class RadiusTooLarge(PseudopowerError, ValueError):
    code = "radius_too_large"


class NotASolution(PseudopowerError, ValueError):
    code = "not_a_solution"


class IllConditioned(PseudopowerError, RuntimeError):
    """Least-squares system too ill-conditioned.

    ``result`` carries the regularized fallback fit.
    """

    code = "ill_conditioned"

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ConfigParseError(PseudopowerError, ValueError):
    code = "parse_error"


class ConfigValidationError(PseudopowerError, ValueError):
    code = "validation_error"
