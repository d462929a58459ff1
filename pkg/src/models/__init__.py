"""
Data models for the optical wireless link simulator.
"""

from .errors import ConfigurationError, DomainError, OwsimError, SingularChannelError, TargetUnreachableError
from .schemas import (
    BerResult,
    BitBudget,
    ChannelModel,
    ConstellationPair,
    ImConfig,
    ModemConfig,
    NoiseModel,
    Sap,
    ScenarioConfig,
    Scheme,
    SweepRecord,
)
from .signals import DemodResult, FrequencyFrame, TimeSymbol

__all__ = [
    "BerResult",
    "BitBudget",
    "ChannelModel",
    "ConfigurationError",
    "ConstellationPair",
    "DemodResult",
    "DomainError",
    "FrequencyFrame",
    "ImConfig",
    "ModemConfig",
    "NoiseModel",
    "OwsimError",
    "Sap",
    "ScenarioConfig",
    "Scheme",
    "SingularChannelError",
    "SweepRecord",
    "TargetUnreachableError",
    "TimeSymbol",
]
