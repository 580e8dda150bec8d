"""
Error and warning types shared by every module.

Each error carries a short machine-readable ``reason`` slug; the command
layer prints it on one line and exits with ``exit_code``.
"""

CONFIG_EXIT = 2
NUMERICAL_EXIT = 3


class BilatticeError(Exception):
    reason = "error"
    exit_code = 1

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def one_line(self):
        return f"error reason={self.reason} exit={self.exit_code}"


class ConfigError(BilatticeError):
    reason = "config"
    exit_code = CONFIG_EXIT


class NumericalError(BilatticeError):
    reason = "numerical"
    exit_code = NUMERICAL_EXIT


class DegenerateHybridizationError(NumericalError):
    """Mixing angles are undefined when the layers are not coupled (G = 0)."""
    reason = "degenerate_hybridization"


class PrincipalValueError(NumericalError):
    """Self-energy requested at an energy inside a band."""
    reason = "principal_value"


class NoBoundStateError(NumericalError):
    reason = "no_inner_gap_bound_state"


class HybridizationFailureError(NumericalError):
    reason = "hybridization_failure"


class ParityViolationError(NumericalError):
    reason = "parity_violation"


class DecompositionError(NumericalError):
    reason = "decomposition"


class ResolutionError(NumericalError):
    reason = "resolution"


class GeometryMismatchError(NumericalError):
    reason = "geometry_mismatch"


class GaplessError(NumericalError):
    reason = "gapless"


class IntegrationError(NumericalError):
    reason = "integration"


class ProtocolFailureError(NumericalError):
    reason = "protocol_failure"


class BilatticeWarning(UserWarning):
    pass


class ResolutionWarning(BilatticeWarning):
    pass


class GaplessWarning(BilatticeWarning):
    pass


class SymmetryBreakingWarning(BilatticeWarning):
    pass


class MarkovianWarning(BilatticeWarning):
    pass
