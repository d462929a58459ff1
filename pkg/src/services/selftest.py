"""
Invariant suite: noiseless loopback over the parameter grid plus numeric
checks of the transmitter, mapping, constellation and channel properties.
"""

import logging
import math
import time
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from models.schemas import CeilingBounceParams, ChannelModel, ConstellationPair, ImConfig, ModemConfig, NoiseModel, Scheme

from .channel import add_awgn, ceiling_bounce_taps, rms_delay_spread
from .constellation import PRINTED_TYPO_CELL, REFERENCE_QPSK_TABLE, build_lut, psk_ring
from .dsp_core import forward_dft
from .mapping import bit_budget, rank_combination, unrank_combination
from .metrics import LinkSimulator
from .transmitter import Transmitter, assemble_frame, lowpass_filter, modulate, unipolar_aco

logger = logging.getLogger(__name__)

GRID_N = (16, 32, 64)
GRID_L = (1, 2, 4)
LOOPBACK_SYMBOLS = 32
PROPERTY_SYMBOLS = 16
MAX_SAP_OMEGA = 16


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class SelftestReport(BaseModel):
    checks: List[CheckResult] = Field(default_factory=list)
    loopback: List[dict] = Field(default_factory=list, description="(config, bit errors) per grid point")
    processing_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]


def grid_configs(ns=GRID_N, ls=GRID_L) -> List[ModemConfig]:
    """Every scheme at every (N, L), the filtered one at alpha = 0, N/4, N/2."""
    configs = []
    for n in ns:
        for l in ls:
            for scheme in Scheme:
                alphas = (0, n // 4, n // 2) if scheme.is_filtered else (0,)
                for alpha in alphas:
                    # sqrt(LN) standard deviations cover any unit-energy excursion
                    configs.append(
                        ModemConfig(scheme=scheme, n=n, l=l, alpha=alpha, dco_bias_factor=math.sqrt(n * l))
                    )
    return configs


def _loopback(cfg: ModemConfig, rng: np.random.Generator) -> Tuple[int, int]:
    link = LinkSimulator(cfg, ChannelModel(kind="los"))
    bits = link.transmitter.random_bits(rng, LOOPBACK_SYMBOLS)
    return link.count_errors(bits, None, rng), bits.size


def _aco_configs() -> List[ModemConfig]:
    return [ModemConfig(scheme=s, n=32, l=4) for s in Scheme if s.is_aco]


def _random_bipolar(cfg: ModemConfig, rng: np.random.Generator):
    transmitter = Transmitter(cfg)
    frame = assemble_frame(transmitter.random_bits(rng, PROPERTY_SYMBOLS), cfg)
    bipolar, _ = modulate(frame, cfg)
    return frame, bipolar


def check_antisymmetry(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for cfg in _aco_configs():
        _, bipolar = _random_bipolar(cfg, rng)
        half = cfg.ln // 2
        worst = max(worst, float(np.max(np.abs(bipolar[:, :half] + bipolar[:, half:]))))
    return CheckResult(name="anti-symmetry", passed=worst < 1e-12, detail=f"max |x(l) + x(l+LN/2)| = {worst:.2e}")


def check_normalization(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for scheme in Scheme:
        _, bipolar = _random_bipolar(ModemConfig(scheme=scheme, n=32, l=4), rng)
        worst = max(worst, float(np.max(np.abs(np.sum(bipolar ** 2, axis=-1) - 1.0))))
    return CheckResult(name="unit energy", passed=worst < 1e-9, detail=f"max |sum x^2 - 1| = {worst:.2e}")


def check_clipping_halving(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for cfg in _aco_configs():
        _, bipolar = _random_bipolar(cfg, rng)
        bins = np.asarray(cfg.gamma)
        before = forward_dft(bipolar)[:, bins]
        after = forward_dft(unipolar_aco(bipolar))[:, bins]
        worst = max(worst, float(np.max(np.abs(after - 0.5 * before))))
    return CheckResult(name="clipping halving", passed=worst < 1e-9, detail=f"max |X_c - X/2| = {worst:.2e}")


def check_filter_idempotence(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for alpha in (0, 8, 16):
        cfg = ModemConfig(scheme=Scheme.HYBRID_ACO, n=32, l=4, alpha=alpha)
        _, bipolar = _random_bipolar(cfg, rng)
        once = lowpass_filter(unipolar_aco(bipolar), alpha, cfg)
        twice = lowpass_filter(once, alpha, cfg)
        worst = max(worst, float(np.max(np.abs(twice - once))))
    return CheckResult(name="filter idempotence", passed=worst < 1e-12, detail=f"max |F(F(x)) - F(x)| = {worst:.2e}")


def check_sap_bijection(max_omega: int = MAX_SAP_OMEGA) -> CheckResult:
    for omega in range(1, max_omega + 1):
        for kappa in range(1, omega + 1):
            lambda1 = bit_budget(ImConfig(omega=omega, kappa=kappa)).lambda1
            seen = set()
            for rank in range(1 << lambda1):
                subset = unrank_combination(rank, omega, kappa)
                if rank_combination(subset, omega) != rank or subset in seen:
                    return CheckResult(name="SAP bijection", passed=False, detail=f"omega={omega} kappa={kappa} rank={rank}")
                seen.add(subset)
    return CheckResult(name="SAP bijection", passed=True, detail=f"omega <= {max_omega}")


def check_reference_table() -> CheckResult:
    pair = ConstellationPair(m1=4, m2=4)
    outer = psk_ring(pair.m1, pair.r1)
    inner = psk_ring(pair.m2, pair.r2)
    computed = {(complex(inner[x2]), complex(outer[x1])): point for x1, x2, point in build_lut(pair).entries}

    printed = dict(REFERENCE_QPSK_TABLE)
    typo_key, typo_value = PRINTED_TYPO_CELL
    printed[typo_key] = typo_value
    matches = sum(computed[(complex(k[0]), complex(k[1]))] == v for k, v in printed.items())
    typo_sum = computed[(complex(typo_key[0]), complex(typo_key[1]))]
    passed = matches == 15 and typo_sum == sum(typo_key) and typo_sum != typo_value
    return CheckResult(name="QPSK superposition table", passed=passed, detail=f"{matches}/16 printed cells match")


def check_awgn_variance(seed: int, draws: int = 1_000_000) -> CheckResult:
    noise = NoiseModel(n0=2e-9, sample_period=1e-9)
    samples = add_awgn(np.zeros(draws), noise, seed)
    error = abs(float(np.var(samples)) / noise.per_sample_variance - 1.0)
    return CheckResult(name="AWGN variance", passed=error < 0.01, detail=f"relative error {error:.2%}")


def check_delay_spread(delay_spread: float = 10e-9) -> CheckResult:
    params = CeilingBounceParams(rms_delay_spread=delay_spread)
    sample_period = delay_spread / 20
    measured = rms_delay_spread(ceiling_bounce_taps(params, sample_period), sample_period)
    error = abs(measured / delay_spread - 1.0)
    return CheckResult(name="ceiling-bounce delay spread", passed=error < 0.01, detail=f"relative error {error:.2%}")


def run_selftest(seed: int = 0, configs: Optional[List[ModemConfig]] = None) -> SelftestReport:
    """Run the loopback grid and every invariant check."""
    start_time = time.time()
    rng = np.random.default_rng(seed)
    report = SelftestReport()

    failed = []
    for cfg in configs if configs is not None else grid_configs():
        errors, bits_sent = _loopback(cfg, rng)
        report.loopback.append({"config": cfg, "bit_errors": errors, "bits_sent": bits_sent})
        if errors:
            failed.append(cfg.label())
    report.checks.append(
        CheckResult(
            name="noiseless loopback",
            passed=not failed,
            detail=f"{len(report.loopback)} configurations" + (f", failing: {failed}" if failed else ""),
        )
    )

    checks: List[Callable[[], CheckResult]] = [
        lambda: check_antisymmetry(rng),
        lambda: check_normalization(rng),
        lambda: check_clipping_halving(rng),
        lambda: check_filter_idempotence(rng),
        check_sap_bijection,
        check_reference_table,
        lambda: check_awgn_variance(seed),
        check_delay_spread,
    ]
    for check in checks:
        result = check()
        report.checks.append(result)
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, f"{result.name}: {'ok' if result.passed else 'FAILED'} ({result.detail})")

    report.processing_time = time.time() - start_time
    return report
