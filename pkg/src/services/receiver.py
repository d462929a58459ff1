"""
Receiver chain: FFT, zero-forcing equalization, extraction, energy-based
activation pattern detection and per-bin LUT / PSK demodulation.
"""

import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from models.errors import SingularChannelError
from models.schemas import ModemConfig
from models.signals import DemodResult

from .constellation import build_lut, detect_lut, detect_psk
from .dsp_core import forward_dft
from .mapping import decode_patterns, int_to_bits, modem_bit_budget, symbols_to_bits

logger = logging.getLogger(__name__)

SINGULAR_THRESHOLD = 1e-12


class ExtractionMap(BaseModel):
    """Extraction gain g and the zeta -> gamma subcarrier map of a scheme."""

    model_config = ConfigDict(frozen=True)

    gain: float
    gamma: List[int]

    @classmethod
    def for_config(cls, cfg: ModemConfig) -> "ExtractionMap":
        return cls(gain=cfg.gain, gamma=cfg.gamma)


def equalize_zf(
    spectrum: np.ndarray,
    response: np.ndarray,
    data_bins: Optional[List[int]] = None,
) -> np.ndarray:
    """Divide the data bins by the channel response; other bins pass through."""
    spectrum = np.asarray(spectrum, dtype=complex)
    response = np.broadcast_to(np.asarray(response, dtype=complex), spectrum.shape)
    bins = np.arange(spectrum.shape[-1]) if data_bins is None else np.asarray(data_bins)
    on_data = response[..., bins]
    if np.any(np.abs(on_data) < SINGULAR_THRESHOLD):
        raise SingularChannelError("channel response vanishes on a data bin")
    equalized = spectrum.copy()
    equalized[..., bins] = spectrum[..., bins] / on_data
    return equalized


def extract(equalized: np.ndarray, extraction_map: ExtractionMap) -> np.ndarray:
    """Useful information per zeta: g * Y_hat[gamma(zeta)]."""
    return extraction_map.gain * equalized[..., extraction_map.gamma]


def detect_sap_energy(extracted: np.ndarray, kappa: int) -> np.ndarray:
    """0-based indices of the kappa most energetic subcarriers, ascending.

    Equal energies keep the lower index (stable sort).
    """
    energies = np.abs(extracted) ** 2
    strongest = np.argsort(-energies, axis=-1, kind="stable")[..., :kappa]
    return np.sort(strongest, axis=-1)


def demodulate(extracted: np.ndarray, theta_hat: np.ndarray, cfg: ModemConfig) -> DemodResult:
    """Per-bin decisions and bit reassembly in (lambda1 | lambda2 | lambda3) order."""
    pair = cfg.pair
    budget = modem_bit_budget(cfg)
    batch_shape = extracted.shape[:-1]
    x1_hat = np.zeros(batch_shape + (0,), dtype=np.int64)
    x2_hat = np.zeros(batch_shape + (0,), dtype=np.int64)

    if cfg.scheme.has_im:
        active = np.take_along_axis(extracted, theta_hat, axis=-1)
        if cfg.scheme.has_ofdm:
            x1_hat, x2_active = detect_lut(active, build_lut(pair))
            x2_hat = detect_psk(extracted, cfg.m2, pair.r2)
            np.put_along_axis(x2_hat, theta_hat, x2_active, axis=-1)
        else:
            x1_hat = detect_psk(active, cfg.m1, pair.r1)
        ranks = decode_patterns(theta_hat, cfg.omega, budget.lambda1)
        pattern_bits = int_to_bits(ranks, budget.lambda1)
        im_bits = symbols_to_bits(x1_hat, cfg.m1)
    else:
        x2_hat = detect_psk(extracted, cfg.m2, pair.r2)
        pattern_bits = np.zeros(batch_shape + (0,), dtype=np.uint8)
        im_bits = np.zeros(batch_shape + (0,), dtype=np.uint8)

    if cfg.scheme.has_ofdm:
        ofdm_bits = symbols_to_bits(x2_hat, cfg.m2)
    else:
        ofdm_bits = np.zeros(batch_shape + (0,), dtype=np.uint8)

    return DemodResult(
        theta_hat=theta_hat,
        bits_hat=np.concatenate([pattern_bits, im_bits, ofdm_bits], axis=-1),
        x1_hat=x1_hat,
        x2_hat=x2_hat,
    )


class Receiver:
    """Receiver for one configuration with a known channel response."""

    def __init__(self, cfg: ModemConfig, frequency_response: Optional[np.ndarray] = None):
        """
        Initialize the receiver.

        Args:
            cfg: Modem configuration
            frequency_response: LN-bin channel response, None for a flat channel
        """
        self.cfg = cfg
        self.extraction_map = ExtractionMap.for_config(cfg)
        if frequency_response is None:
            frequency_response = np.ones(cfg.ln, dtype=complex)
        self.frequency_response = np.asarray(frequency_response, dtype=complex)

    def receive_symbol(self, received: np.ndarray, scale=1.0) -> DemodResult:
        """
        Demodulate time samples.

        Args:
            received: Samples of shape (LN,) or (symbols, LN), CP removed
            scale: Transmit normalization gain, scalar or one per symbol

        Returns:
            DemodResult with the detected pattern, bin decisions and bits
        """
        cfg = self.cfg
        spectrum = forward_dft(np.asarray(received, dtype=float))
        # the known normalization gain folds into the channel seen by ZF
        response = self.frequency_response * np.asarray(scale, dtype=float)[..., None]
        equalized = equalize_zf(spectrum, response, self.extraction_map.gamma)
        extracted = extract(equalized, self.extraction_map)
        if cfg.scheme.has_im:
            theta_hat = detect_sap_energy(extracted, cfg.kappa)
        else:
            theta_hat = np.zeros(extracted.shape[:-1] + (0,), dtype=np.int64)
        return demodulate(extracted, theta_hat, cfg)


def receive_symbol(
    received: np.ndarray,
    cfg: ModemConfig,
    frequency_response: Optional[np.ndarray] = None,
    scale=1.0,
) -> DemodResult:
    """forward_dft -> equalize_zf -> extract -> detect_sap_energy -> demodulate."""
    return Receiver(cfg, frequency_response).receive_symbol(received, scale)
