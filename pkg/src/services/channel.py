"""
Optical wireless channel: LOS and ceiling-bounce impulse responses, cyclic
prefix handling and AWGN calibrated to Eb/N0.
"""

import logging
import math
from typing import Optional, Union

import numpy as np
from scipy import signal

from models.errors import DomainError
from models.schemas import CeilingBounceParams, ChannelModel, NoiseModel

from .dsp_core import forward_dft

logger = logging.getLogger(__name__)

TRUNCATION_FRACTION = 0.9999


def ceiling_bounce_taps(params: CeilingBounceParams, sample_period: float) -> np.ndarray:
    """Sampled (t + rho)^-7 kernel, truncated at 99.99 % of its integral, unit sum.

    Taps are renormalized to the unit path loss, so the constant in front of
    the kernel does not matter; only rho does.
    """
    if sample_period <= 0:
        raise DomainError(f"sample period must be positive, got {sample_period}")
    rho = params.rho
    # integral of 6 rho^6 (t + rho)^-7 from 0 to t is 1 - (rho / (t + rho))^6
    horizon = rho * ((1.0 - TRUNCATION_FRACTION) ** (-1.0 / 6.0) - 1.0)
    count = max(int(math.ceil(horizon / sample_period)), 1)
    t = np.arange(count) * sample_period
    taps = 6.0 * rho ** 6 / (t + rho) ** 7 * sample_period
    return params.path_loss * taps / np.sum(taps)


def rms_delay_spread(taps: np.ndarray, sample_period: float) -> float:
    """Power-weighted (|h|^2) RMS delay of a tap vector.

    This is the moment for which delta_tau = rho / 12 * sqrt(13 / 11) holds.
    """
    power = np.abs(np.asarray(taps, dtype=float)) ** 2
    t = np.arange(power.size) * sample_period
    mean = np.sum(power * t) / np.sum(power)
    return float(math.sqrt(max(np.sum(power * t ** 2) / np.sum(power) - mean ** 2, 0.0)))


def cp_length_for(taps: np.ndarray, energy_fraction: float = 0.999) -> int:
    """Shortest prefix whose span of taps holds `energy_fraction` of sum |h|^2."""
    power = np.abs(np.asarray(taps, dtype=float)) ** 2
    covered = np.cumsum(power) / np.sum(power)
    return int(np.searchsorted(covered, energy_fraction - 1e-12))


def apply_channel(unipolar: np.ndarray, taps: np.ndarray, cp_length: int) -> np.ndarray:
    """Send symbols back to back with a cyclic prefix and strip it after the channel.

    A batch (B, LN) is one stream, so a prefix shorter than the channel
    memory leaks each symbol into the next. A prefix longer than the symbol
    wraps around it as many times as needed.
    """
    if cp_length < 0:
        raise DomainError(f"cyclic prefix length must be non-negative, got {cp_length}")
    unipolar = np.asarray(unipolar, dtype=float)
    taps = np.asarray(taps, dtype=float)
    if taps.size == 1:
        return unipolar * taps[0]
    if cp_length < taps.size - 1:
        logger.debug(f"CP of {cp_length} samples is shorter than the {taps.size}-tap channel")

    ln = unipolar.shape[-1]
    blocks = unipolar.reshape(-1, ln)
    prefix = np.arange(-cp_length, 0) % ln
    extended = np.concatenate([blocks[:, prefix], blocks], axis=1)
    stream = extended.ravel()
    received = signal.oaconvolve(stream, taps)[: stream.size]
    received = received.reshape(-1, ln + cp_length)[:, cp_length:]
    return received.reshape(unipolar.shape)


def add_awgn(
    received: np.ndarray,
    noise: NoiseModel,
    rng: Union[np.random.Generator, int, np.random.SeedSequence, None],
) -> np.ndarray:
    """Add white Gaussian noise of variance N0 / (2 T_c) per sample."""
    variance = noise.per_sample_variance
    received = np.asarray(received, dtype=float)
    if variance == 0:
        return received.copy()
    generator = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    return received + generator.normal(0.0, math.sqrt(variance), size=received.shape)


def channel_frequency_response(taps: np.ndarray, ln: int) -> np.ndarray:
    """LN-point DFT of the taps, zero padded (or folded when longer than LN)."""
    taps = np.asarray(taps, dtype=float)
    if taps.size == 0:
        raise DomainError("channel needs at least one tap")
    folded = np.bincount(np.arange(taps.size) % ln, weights=taps, minlength=ln)
    return forward_dft(folded)


class OpticalChannel:
    """Channel bound to one sample period and symbol length."""

    def __init__(self, model: ChannelModel, sample_period: float, ln: int):
        self.model = model
        self.sample_period = sample_period
        self.ln = ln
        if model.kind == "los":
            self.taps = np.ones(1)
        else:
            self.taps = ceiling_bounce_taps(model.ceiling_bounce, sample_period)
        if model.cp_length is not None:
            self.cp_length = model.cp_length
        else:
            self.cp_length = cp_length_for(self.taps, model.cp_energy_fraction)
        if model.cp_length is not None and self.cp_length < self.taps.size - 1:
            logger.warning(
                f"CP of {self.cp_length} samples leaves {self.taps.size - 1 - self.cp_length} channel taps uncovered"
            )
        self.frequency_response = channel_frequency_response(self.taps, ln)
        logger.debug(
            f"Channel {model.label()}: {self.taps.size} taps, CP {self.cp_length} samples, T_c={sample_period:.3g} s"
        )

    def propagate(self, unipolar: np.ndarray, noise: Optional[NoiseModel], rng=None) -> np.ndarray:
        received = apply_channel(unipolar, self.taps, self.cp_length)
        if noise is None:
            return received
        return add_awgn(received, noise, rng)
