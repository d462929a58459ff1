"""
Services for the transmit/receive chains, channel, metrics and scenario runs.
"""

from .channel import OpticalChannel
from .metrics import LinkSimulator, ber_monte_carlo, required_ebn0, spectral_efficiency
from .receiver import Receiver
from .simulation_service import ScenarioResult, SimulationService
from .transmitter import Transmitter

__all__ = [
    "LinkSimulator",
    "OpticalChannel",
    "Receiver",
    "ScenarioResult",
    "SimulationService",
    "Transmitter",
    "ber_monte_carlo",
    "required_ebn0",
    "spectral_efficiency",
]
