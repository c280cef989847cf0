# bath_modes/exceptions.py


class BathModesError(Exception):
    """Base class for every failure raised by the bath_modes library"""


class DomainError(BathModesError, ValueError):
    """Argument outside the domain of an operation (negative ω, bad grid, bad table)"""


class ConfigError(BathModesError):
    """Run configuration rejected; ``errors`` maps key names to messages"""

    def __init__(self, errors):
        self.errors = dict(errors)
        lines = [f"{key}: {'; '.join(str(m) for m in messages)}"
                 for key, messages in sorted(self.errors.items())]
        super().__init__("Invalid run configuration:\n  " + "\n  ".join(lines))


class QuadratureError(BathModesError):
    def __init__(self, message, worst_time_fs):
        self.worst_time_fs = worst_time_fs
        super().__init__(f"{message} (worst time point t={worst_time_fs:g} fs)")


class RationalFitError(BathModesError):
    """AAA did not reach the requested tolerance within ``max_degree``"""

    def __init__(self, best, achieved_error, tol):
        self.best = best
        self.achieved_error = achieved_error
        super().__init__(
            f"AAA reached relative error {achieved_error:.3e} > tol {tol:.3e} "
            f"with {len(best.support_points)} support points"
        )


class NnlsIterationError(BathModesError):
    def __init__(self, best, kkt_residual, max_iter):
        self.best = best
        self.kkt_residual = kkt_residual
        super().__init__(
            f"NNLS exceeded {max_iter} iterations (KKT residual {kkt_residual:.3e})"
        )


class JacobiBreakdownError(BathModesError):
    """Nonpositive recurrence coefficient: the weight is effectively rank-deficient"""

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"Recurrence coefficient eta_{index} = {value:.3e} is not positive")


class SingularWeightError(BathModesError):
    def __init__(self, omega_min, omega_max):
        self.omega_min = omega_min
        self.omega_max = omega_max
        super().__init__(
            f"Gauss weight is unbounded at omega=0 inside [{omega_min:g}, {omega_max:g}] cm^-1; "
            "choose an interval with omega_min > 0 (or omega_max < 0), "
            "or use a tabulated SD with a positive sd_floor_cm1"
        )


class DegenerateFitError(BathModesError):
    """NNLS returned only zero weights"""


class GridMismatchError(BathModesError):
    """Two BCF series were compared on different time grids"""


class EigenSolverError(BathModesError):
    """Tridiagonal eigensolver failed"""
