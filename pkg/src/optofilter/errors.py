"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so sweeps can record
per-cell failures and the CLI can map them to exit statuses.
"""


class OptoFilterError(Exception):
    code = "error"
    status = "undefined"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class ConfigError(OptoFilterError):
    code = "config"

    def __init__(self, message, line=None, **details):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, line=line, **details)
        self.line = line


class PhysicsError(OptoFilterError):
    """Raised when a parameter point has no valid physical answer."""


class OpticalSpringInstability(PhysicsError):
    code = "optical_spring_instability"
    status = "unstable"


class NoStableConditionalState(PhysicsError):
    code = "no_stable_state"
    status = "unstable"


class DifferentialModeUnstable(PhysicsError):
    code = "differential_mode_unstable"
    status = "unstable"


class ZeroMeasurementRate(PhysicsError):
    code = "zero_measurement_rate"


class UnconditionalLimit(PhysicsError):
    code = "unconditional_limit"


class UnphysicalState(PhysicsError):
    code = "unphysical_state"


class NumericalDegeneracy(PhysicsError):
    code = "numerical_degeneracy"


class QuadratureError(PhysicsError):
    code = "quadrature_nonconvergent"


class ApproximationUndefined(PhysicsError):
    code = "approximation_undefined"


class UnreachableTarget(PhysicsError):
    code = "unreachable_target"
