"""
Transmitter chain: frame assembly, Hermitian zero padding, oversampled IFFT,
normalization, unipolar conversion, clipping-harmonic filtering and biasing.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from models.errors import DomainError
from models.schemas import ModemConfig
from models.signals import FrequencyFrame, TimeSymbol

from .constellation import psk_ring
from .dsp_core import forward_dft, frequency_distance, inverse_dft
from .mapping import bits_to_int, bits_to_symbols, encode_patterns, modem_bit_budget

logger = logging.getLogger(__name__)


def split_bits(bits: np.ndarray, cfg: ModemConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Parse a payload into its (lambda1, lambda2, lambda3) parts."""
    budget = modem_bit_budget(cfg)
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[-1] != budget.lambda_total:
        raise DomainError(f"expected {budget.lambda_total} bits per symbol, got {bits.shape[-1]}")
    first = budget.lambda1
    second = first + budget.lambda2
    return bits[..., :first], bits[..., first:second], bits[..., second:]


def assemble_frame(bits: np.ndarray, cfg: ModemConfig) -> FrequencyFrame:
    """Place IM and O-OFDM symbols on the gamma grid and superpose them."""
    lambda1_bits, lambda2_bits, lambda3_bits = split_bits(bits, cfg)
    batch_shape = lambda1_bits.shape[:-1]
    pair = cfg.pair
    omega = cfg.omega

    x1_zeta = np.zeros(batch_shape + (omega,), dtype=complex)
    x2_zeta = np.zeros(batch_shape + (omega,), dtype=complex)
    theta = None

    if cfg.scheme.has_im:
        ranks = bits_to_int(lambda1_bits)
        theta = encode_patterns(ranks.ravel(), omega, cfg.kappa).reshape(batch_shape + (cfg.kappa,))
        im_symbols = bits_to_symbols(lambda2_bits, cfg.m1)
        np.put_along_axis(x1_zeta, theta, psk_ring(cfg.m1, pair.r1)[im_symbols], axis=-1)

    if cfg.scheme.has_ofdm:
        ofdm_symbols = bits_to_symbols(lambda3_bits, cfg.m2)
        x2_zeta = psk_ring(cfg.m2, pair.r2)[ofdm_symbols]

    gamma_index = np.asarray(cfg.gamma) - 1
    width = cfg.n // 2 - 1
    x1_branch = np.zeros(batch_shape + (width,), dtype=complex)
    x2_branch = np.zeros(batch_shape + (width,), dtype=complex)
    x1_branch[..., gamma_index] = x1_zeta
    x2_branch[..., gamma_index] = x2_zeta

    return FrequencyFrame(
        x1_branch=x1_branch,
        x2_branch=x2_branch,
        combined=x1_branch + x2_branch,
        theta=theta,
    )


def hermitian_zero_pad(frame: FrequencyFrame, cfg: ModemConfig) -> np.ndarray:
    """LN-bin spectrum with data on the positive bins and conjugates mirrored."""
    combined = frame.combined
    spectrum = np.zeros(combined.shape[:-1] + (cfg.ln,), dtype=complex)
    half = cfg.n // 2
    spectrum[..., 1:half] = combined
    spectrum[..., cfg.ln - half + 1:] = np.conj(combined[..., ::-1])
    return spectrum


def ensemble_scale(cfg: ModemConfig) -> float:
    """Gain giving unit time-domain energy on average over the alphabet."""
    pair = cfg.pair
    mean_energy = 0.0
    if cfg.scheme.has_ofdm:
        mean_energy += cfg.omega * pair.r2 ** 2
    if cfg.scheme.has_im:
        mean_energy += cfg.kappa * pair.r1 ** 2
    # sum |x|^2 = (1/LN) sum |X|^2 and both spectral halves carry the frame
    return math.sqrt(cfg.ln / (2.0 * mean_energy))


def modulate(frame: FrequencyFrame, cfg: ModemConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Bipolar time signal x_BP and the normalization gain that produced it."""
    spectrum = frame.padded_spectrum
    if spectrum is None:
        spectrum = hermitian_zero_pad(frame, cfg)
    energy = np.sum(np.abs(spectrum) ** 2, axis=-1) / cfg.ln
    if np.any(energy <= 0):
        raise DomainError("cannot normalize an all-zero frame")
    if cfg.normalization == "symbol":
        scale = 1.0 / np.sqrt(energy)
    else:
        scale = np.full(energy.shape, ensemble_scale(cfg))
    bipolar = inverse_dft(spectrum * scale[..., None]).real
    return bipolar, scale


def unipolar_aco(bipolar: np.ndarray) -> np.ndarray:
    """Zero-level clipping of an anti-symmetric signal."""
    return np.maximum(bipolar, 0.0)


def unipolar_dco(bipolar: np.ndarray, bias_factor: float) -> Tuple[np.ndarray, np.ndarray]:
    """DC bias of bias_factor standard deviations, then clipping of what stays negative."""
    bias = bias_factor * np.std(bipolar, axis=-1)
    return np.maximum(bipolar + bias[..., None], 0.0), bias


def lowpass_mask(cfg: ModemConfig, alpha: int) -> np.ndarray:
    """Brick-wall mask keeping DC and |sigma| <= N/2 + alpha - 1 (N + 2 alpha - 1 bins)."""
    if not 0 <= alpha <= cfg.n // 2:
        raise DomainError(f"alpha must lie in [0, {cfg.n // 2}], got {alpha}")
    return frequency_distance(cfg.ln) <= cfg.n // 2 + alpha - 1


def lowpass_filter(clipped: np.ndarray, alpha: int, cfg: ModemConfig) -> np.ndarray:
    """Remove clipping harmonics above the filter band."""
    mask = lowpass_mask(cfg, alpha)
    return inverse_dft(forward_dft(clipped) * mask).real


def add_bias(filtered: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Lift the signal by |min x_F| so that it is non-negative."""
    bias = np.maximum(-np.min(filtered, axis=-1), 0.0)
    return filtered + bias[..., None], bias


class Transmitter:
    """Per-configuration transmitter, processing one symbol or a batch."""

    def __init__(self, cfg: ModemConfig):
        """
        Initialize the transmitter.

        Args:
            cfg: Modem configuration; its bit budget is fixed here
        """
        self.cfg = cfg
        self.budget = modem_bit_budget(cfg)
        logger.debug(f"Transmitter for {cfg.label()} carries {self.budget.lambda_total} bits/symbol")

    @property
    def bits_per_symbol(self) -> int:
        return self.budget.lambda_total

    @property
    def symbol_period(self) -> float:
        """T_s = lambda / R_b."""
        return self.bits_per_symbol / self.cfg.data_rate_bps

    @property
    def sample_period(self) -> float:
        return self.symbol_period / self.cfg.ln

    def random_bits(self, rng: np.random.Generator, symbols: Optional[int] = None) -> np.ndarray:
        """
        Draw a uniform payload.

        Args:
            rng: Payload generator
            symbols: Batch size, or None for a single symbol

        Returns:
            uint8 bits of shape (lambda,) or (symbols, lambda)
        """
        shape = (self.bits_per_symbol,) if symbols is None else (symbols, self.bits_per_symbol)
        return rng.integers(0, 2, size=shape, dtype=np.uint8)

    def transmit_symbol(self, bits: np.ndarray) -> TimeSymbol:
        """
        Map bits to a non-negative waveform.

        Args:
            bits: Payload of shape (lambda,) or (symbols, lambda)

        Returns:
            TimeSymbol with every stage of the chain; clipped and filtered
            are None where the scheme skips them
        """
        cfg = self.cfg
        frame = assemble_frame(bits, cfg)
        bipolar, scale = modulate(frame, cfg)
        clipped = filtered = None
        zeros = np.zeros(bipolar.shape[:-1])

        if cfg.scheme.is_filtered:
            clipped = unipolar_aco(bipolar)
            filtered = lowpass_filter(clipped, cfg.alpha, cfg)
            unipolar, bias = add_bias(filtered)
        elif cfg.scheme.is_aco:
            clipped = unipolar_aco(bipolar)
            unipolar, bias = clipped, zeros
        else:
            unipolar, bias = unipolar_dco(bipolar, cfg.dco_bias_factor)

        return TimeSymbol(
            bipolar=bipolar,
            clipped=clipped,
            filtered=filtered,
            unipolar=unipolar,
            bias=np.asarray(bias),
            scale=np.asarray(scale),
        )


def transmit_symbol(bits: np.ndarray, cfg: ModemConfig) -> TimeSymbol:
    """Run the whole transmit chain for `cfg`."""
    return Transmitter(cfg).transmit_symbol(bits)
