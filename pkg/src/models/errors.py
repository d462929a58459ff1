"""
Exception hierarchy for the simulator.
"""


class OwsimError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(OwsimError, ValueError):
    """Raised when a parameter set or transform length is not supported."""


class DomainError(OwsimError, ValueError):
    """Raised when an input violates a mathematical precondition."""


class SingularChannelError(OwsimError, ArithmeticError):
    """Raised when zero-forcing would divide by a (near) null of the channel."""


class TargetUnreachableError(OwsimError, RuntimeError):
    """Raised when a BER target is not met anywhere on the Eb/N0 search grid."""

    def __init__(self, target_ber: float, ebn0_max_db: float, ber_at_max: float):
        self.target_ber = target_ber
        self.ebn0_max_db = ebn0_max_db
        self.ber_at_max = ber_at_max
        super().__init__(
            f"BER target {target_ber:g} not reached up to {ebn0_max_db:g} dB "
            f"(BER there: {ber_at_max:.3g})"
        )
