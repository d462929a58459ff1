"""
Spectral efficiency, energy accounting and Monte-Carlo BER estimation.
"""

import logging
import math
from functools import partial
from typing import Callable, Iterable, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from models.errors import TargetUnreachableError
from models.schemas import BerResult, ChannelModel, ModemConfig, NoiseModel, Scheme, SweepRecord

from .channel import OpticalChannel
from .receiver import Receiver
from .transmitter import Transmitter

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence]

DEFAULT_MIN_ERRORS = 200
DEFAULT_MAX_BITS = 10_000_000
CALIBRATION_SYMBOLS = 2000
FIRST_BATCH_SYMBOLS = 8
BATCH_SYMBOLS = 1000
WALK_DOWN_DB = 30.0


class BandwidthModel(BaseModel):
    """Baseband bandwidth a scheme occupies."""

    model_config = ConfigDict(frozen=True)

    scheme: Scheme
    n: int
    alpha: int = 0
    symbol_period: float
    convention: str = "occupied"

    @classmethod
    def for_config(cls, cfg: ModemConfig, symbol_period: Optional[float] = None) -> "BandwidthModel":
        if symbol_period is None:
            symbol_period = Transmitter(cfg).symbol_period
        return cls(
            scheme=cfg.scheme,
            n=cfg.n,
            alpha=cfg.alpha,
            symbol_period=symbol_period,
            convention=cfg.bandwidth_convention,
        )

    @property
    def subcarrier_spacing(self) -> float:
        return 1.0 / self.symbol_period

    @property
    def unfiltered(self) -> float:
        """Clipped-signal bandwidth N / T_s."""
        return self.n / self.symbol_period

    @property
    def optimum(self) -> float:
        return self.n / (2.0 * self.symbol_period)

    @property
    def filter_bandwidth(self) -> float:
        """Two-sided pass band (N + 2 alpha - 1) / T_s of the harmonic filter."""
        return (self.n + 2 * self.alpha - 1) / self.symbol_period

    @property
    def bandwidth(self) -> float:
        if self.scheme.is_filtered:
            if self.convention == "nominal":
                return (self.n / 2 + self.alpha) / self.symbol_period
            return self.filter_bandwidth / 2.0
        if self.scheme.is_aco:
            return self.optimum if self.convention == "nominal" else self.unfiltered
        return self.optimum


def spectral_efficiency(cfg: ModemConfig) -> float:
    """
    Spectral efficiency lambda / (B T_s) in bits/s/Hz.

    Args:
        cfg: Modem configuration; its bandwidth_convention selects B

    Returns:
        Bits per second per hertz of baseband bandwidth
    """
    transmitter = Transmitter(cfg)
    model = BandwidthModel.for_config(cfg, transmitter.symbol_period)
    return transmitter.bits_per_symbol / (model.bandwidth * transmitter.symbol_period)


def _seed_sequence(seed: Seed) -> np.random.SeedSequence:
    # fresh copy so that spawning does not advance the caller's sequence
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(entropy=seed.entropy, spawn_key=seed.spawn_key, pool_size=seed.pool_size)
    return np.random.SeedSequence(seed)


def mean_symbol_energy(cfg: ModemConfig, symbols: int = CALIBRATION_SYMBOLS, seed: Seed = 0) -> float:
    """
    Mean electrical symbol energy E_s = T_c * sum |x_plus|^2.

    Args:
        cfg: Modem configuration
        symbols: Random symbols to average over
        seed: Seed or SeedSequence of the payload generator

    Returns:
        E_s, with the sample period T_c = T_s / LN
    """
    transmitter = Transmitter(cfg)
    rng = np.random.default_rng(_seed_sequence(seed))
    waveform = transmitter.transmit_symbol(transmitter.random_bits(rng, symbols))
    return float(transmitter.sample_period * np.mean(waveform.electrical_symbol_energy))


def mean_bias(cfg: ModemConfig, symbols: int = 1000, seed: Seed = 0) -> float:
    """Mean DC bias over random symbols."""
    transmitter = Transmitter(cfg)
    rng = np.random.default_rng(_seed_sequence(seed))
    waveform = transmitter.transmit_symbol(transmitter.random_bits(rng, symbols))
    return float(np.mean(waveform.bias))


class LinkSimulator:
    """Transmitter, channel and receiver of one configuration."""

    def __init__(self, cfg: ModemConfig, channel_model: ChannelModel):
        """
        Bind the three stages to one sample period.

        Args:
            cfg: Modem configuration; its bit rate fixes T_c
            channel_model: LOS or ceiling-bounce channel
        """
        self.cfg = cfg
        self.transmitter = Transmitter(cfg)
        self.channel = OpticalChannel(channel_model, self.transmitter.sample_period, cfg.ln)
        self.receiver = Receiver(cfg, self.channel.frequency_response)

    @property
    def bits_per_symbol(self) -> int:
        return self.transmitter.bits_per_symbol

    def noise_for(self, ebn0_db: float, symbol_energy: float) -> Optional[NoiseModel]:
        """Noise model giving `ebn0_db` for a measured E_s; None means noiseless."""
        if math.isinf(ebn0_db) and ebn0_db > 0:
            return None
        n0 = symbol_energy / (self.bits_per_symbol * 10.0 ** (ebn0_db / 10.0))
        return NoiseModel(n0=n0, sample_period=self.transmitter.sample_period)

    def count_errors(self, bits: np.ndarray, noise: Optional[NoiseModel], rng: np.random.Generator) -> int:
        """
        Send a batch through the link and count wrong bits.

        Args:
            bits: Payload of shape (symbols, lambda)
            noise: Receiver noise, or None for a noiseless run
            rng: Generator drawing the noise samples

        Returns:
            Number of bit errors in the batch
        """
        waveform = self.transmitter.transmit_symbol(bits)
        received = self.channel.propagate(waveform.unipolar, noise, rng)
        result = self.receiver.receive_symbol(received, waveform.scale)
        return int(np.count_nonzero(result.bits_hat != bits))


def ber_monte_carlo(
    cfg: ModemConfig,
    channel: ChannelModel,
    ebn0_db: float,
    min_errors: int = DEFAULT_MIN_ERRORS,
    max_bits: int = DEFAULT_MAX_BITS,
    seed: Seed = 0,
    batch_symbols: int = BATCH_SYMBOLS,
    link: Optional[LinkSimulator] = None,
) -> BerResult:
    """
    Estimate the BER at one Eb/N0 by counting errors.

    Batches start at FIRST_BATCH_SYMBOLS and double up to `batch_symbols`,
    so the error count at low SNR stays close to `min_errors`.

    Args:
        cfg: Modem configuration
        channel: Channel model
        ebn0_db: Electrical Eb/N0 in dB; +inf runs noiseless
        min_errors: Stop once this many bit errors are counted
        max_bits: Stop once this many bits are sent
        seed: Root seed; the noise calibration and payload get their own children
        batch_symbols: Largest batch sent at once
        link: Prebuilt link to reuse across calls

    Returns:
        BerResult with the error and bit counters
    """
    if min_errors < 1 or max_bits < 1:
        raise ValueError("stop criteria must be positive")
    link = link or LinkSimulator(cfg, channel)
    calibration, payload = _seed_sequence(seed).spawn(2)
    symbol_energy = mean_symbol_energy(cfg, CALIBRATION_SYMBOLS, calibration)
    noise = link.noise_for(ebn0_db, symbol_energy)
    rng = np.random.default_rng(payload)

    bits_sent = 0
    bit_errors = 0
    lam = link.bits_per_symbol
    batch = min(FIRST_BATCH_SYMBOLS, batch_symbols)
    while bit_errors < min_errors and bits_sent < max_bits:
        symbols = min(batch, math.ceil((max_bits - bits_sent) / lam))
        bits = link.transmitter.random_bits(rng, symbols)
        bit_errors += link.count_errors(bits, noise, rng)
        bits_sent += bits.size
        batch = min(2 * batch, batch_symbols)
        logger.debug(f"{cfg.label()} @ {ebn0_db:.2f} dB: {bit_errors} errors in {bits_sent} bits")

    return BerResult(bits_sent=bits_sent, bit_errors=bit_errors, ebn0_db=ebn0_db)


def required_ebn0(
    cfg: ModemConfig,
    channel: ChannelModel,
    target_ber: float = 1e-3,
    seed: Seed = 0,
    search_min: float = 0.0,
    search_max: float = 50.0,
    resolution: float = 0.1,
    min_errors: int = DEFAULT_MIN_ERRORS,
    max_bits: int = DEFAULT_MAX_BITS,
) -> float:
    """
    Eb/N0 in dB at which the BER falls to `target_ber`.

    The target is bracketed on a 1 dB grid and the bracket is bisected to
    `resolution`. Every evaluation reuses the same seed.

    Args:
        cfg: Modem configuration
        channel: Channel model
        target_ber: BER to reach, in (0, 0.5)
        seed: Seed shared by every Monte-Carlo evaluation
        search_min: Bottom of the 1 dB grid; the search walks below it if needed
        search_max: Top of the grid
        resolution: Width of the final bracket in dB
        min_errors: Per-point error target
        max_bits: Per-point bit budget

    Returns:
        Midpoint of the final bracket in dB

    Raises:
        TargetUnreachableError: If the grid top still misses the target
    """
    if not 0 < target_ber < 0.5:
        raise ValueError(f"target BER must lie in (0, 0.5), got {target_ber}")
    link = LinkSimulator(cfg, channel)

    def ber_at(ebn0: float) -> float:
        result = ber_monte_carlo(cfg, channel, ebn0, min_errors, max_bits, seed, link=link)
        logger.debug(f"{cfg.label()}: BER {result.ber:.3g} at {ebn0:.2f} dB")
        return result.ber

    grid = np.arange(search_min, search_max + 0.5, 1.0)
    upper = None
    ber = 0.5
    for point in grid:
        ber = ber_at(float(point))
        if ber <= target_ber:
            upper = float(point)
            break
    if upper is None:
        logger.warning(f"{cfg.label()}: BER {target_ber:g} not reached by {grid[-1]:g} dB")
        raise TargetUnreachableError(target_ber, float(grid[-1]), ber)

    lower = upper - 1.0
    if upper == grid[0]:
        # already met at the bottom of the grid: walk down until it is not
        floor = search_min - WALK_DOWN_DB
        while lower > floor and ber_at(lower) <= target_ber:
            upper, lower = lower, lower - 1.0

    while upper - lower > resolution:
        middle = 0.5 * (lower + upper)
        if ber_at(middle) <= target_ber:
            upper = middle
        else:
            lower = middle

    found = 0.5 * (lower + upper)
    logger.info(f"{cfg.label()}: BER {target_ber:g} at {found:.2f} dB")
    return found


def make_record(cfg: ModemConfig, scenario: str, channel: str, seed: int, **values) -> SweepRecord:
    return SweepRecord(
        scenario=scenario,
        scheme=cfg.scheme.value,
        N=cfg.n,
        L=cfg.l,
        M1=cfg.m1,
        M2=cfg.m2,
        kappa=cfg.kappa,
        alpha=cfg.alpha,
        channel=channel,
        seed=seed,
        **values,
    )


def _with(cfg: ModemConfig, **changes) -> ModemConfig:
    return ModemConfig(**{**cfg.model_dump(), **changes})


def se_sweep(
    template: ModemConfig,
    kappas: Optional[Iterable[int]] = None,
    alphas: Optional[Iterable[int]] = None,
    scenario: str = "se-sweep",
    seed: int = 0,
) -> List[SweepRecord]:
    """
    Spectral efficiency over kappa (and alpha for the filtered scheme).

    Args:
        template: Configuration whose kappa and alpha are swept
        kappas: Active-subcarrier counts, default 1..omega
        alphas: Filter excess bins, default the template's alpha
        scenario: Scenario label written to each record
        seed: Root seed written to each record

    Returns:
        Records ordered by alpha, then kappa
    """
    records = []
    for alpha in (list(alphas) if alphas is not None else [template.alpha]):
        if template.scheme.has_im:
            kappa_values = list(kappas) if kappas is not None else range(1, template.omega + 1)
        else:
            kappa_values = [0]
        for kappa in sorted(kappa_values):
            cfg = _with(template, kappa=kappa, alpha=alpha)
            records.append(make_record(cfg, scenario, "none", seed, se_bits_per_s_per_hz=spectral_efficiency(cfg)))
    return records


def tradeoff_point(
    cfg: ModemConfig,
    channel: ChannelModel,
    target_ber: float,
    seed: Seed,
    root_seed: int = 0,
    bias_symbols: int = 1000,
    scenario: str = "se-ee",
    **search,
) -> SweepRecord:
    """
    (SE, required Eb/N0) of one configuration; unreachable targets give inf.

    Args:
        cfg: Modem configuration
        channel: Channel model
        target_ber: BER defining the energy efficiency
        seed: Seed for the BER search and the bias average
        root_seed: Root seed written to the record
        bias_symbols: Symbols averaged for the mean bias
        scenario: Scenario label written to the record
        **search: Passed to required_ebn0

    Returns:
        One record with ebn0_db, se_bits_per_s_per_hz and mean_bias set
    """
    try:
        ebn0 = required_ebn0(cfg, channel, target_ber, seed, **search)
    except TargetUnreachableError as e:
        logger.warning(str(e))
        ebn0 = math.inf
    beta = mean_bias(cfg, bias_symbols, seed)
    logger.info(f"{cfg.label()}: SE {spectral_efficiency(cfg):.4f}, mean bias {beta:.4g}")
    return make_record(
        cfg,
        scenario,
        channel.label(),
        root_seed,
        ebn0_db=ebn0,
        ber=target_ber,
        se_bits_per_s_per_hz=spectral_efficiency(cfg),
        mean_bias=beta,
    )


def _tradeoff_at(cfg: ModemConfig, seed: np.random.SeedSequence, **kwargs) -> SweepRecord:
    return tradeoff_point(cfg, seed=seed, **kwargs)


def se_ee_tradeoff(
    configs: List[ModemConfig],
    channel: ChannelModel,
    target_ber: float = 1e-3,
    seed: int = 0,
    bias_symbols: int = 1000,
    map_fn: Callable = map,
    **search,
) -> List[SweepRecord]:
    """
    Pair spectral efficiency with required Eb/N0 for each configuration.

    Args:
        configs: Filtered-scheme alphas and baselines, one record each
        channel: Channel model
        target_ber: BER defining the energy efficiency
        seed: Root seed; every configuration gets its own SeedSequence child
        bias_symbols: Symbols averaged for the mean bias
        map_fn: map-like callable; a process pool's map runs points in parallel
        **search: Passed to required_ebn0

    Returns:
        Records in configuration order
    """
    children = np.random.SeedSequence(seed).spawn(len(configs))
    point = partial(
        _tradeoff_at,
        channel=channel,
        target_ber=target_ber,
        root_seed=seed,
        bias_symbols=bias_symbols,
        **search,
    )
    return list(map_fn(point, configs, children))


def ber_point(
    cfg: ModemConfig,
    channel: ChannelModel,
    ebn0_db: float,
    seed: Seed,
    root_seed: int = 0,
    scenario: str = "ber-curve",
    **stop,
) -> SweepRecord:
    """BER record of one configuration at one Eb/N0."""
    result = ber_monte_carlo(cfg, channel, ebn0_db, seed=seed, **stop)
    logger.info(f"{cfg.label()} @ {ebn0_db:g} dB: BER {result.ber:.3g} ({result.bit_errors}/{result.bits_sent})")
    return make_record(
        cfg,
        scenario,
        channel.label(),
        root_seed,
        ebn0_db=ebn0_db,
        ber=result.ber,
        se_bits_per_s_per_hz=spectral_efficiency(cfg),
    )
