"""
Bit budget, bit-stream splitting and subcarrier activation pattern coding.

The activation code book is the first 2^lambda1 kappa-subsets of {1..omega}
in lexicographic order, addressed through the combinatorial number system.
"""

import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np

from models.errors import DomainError
from models.schemas import BitBudget, ImConfig, ModemConfig, Sap

logger = logging.getLogger(__name__)

# Wider values overflow int64 weights and go through Python ints instead.
MAX_INT64_WIDTH = 62


def bit_budget(cfg: ImConfig) -> BitBudget:
    """Bits per symbol of the amalgamated scheme."""
    if cfg.kappa > cfg.omega:
        raise DomainError(f"kappa ({cfg.kappa}) exceeds omega ({cfg.omega})")
    # int.bit_length gives floor(log2) exactly for big integers
    patterns = math.comb(cfg.omega, cfg.kappa)
    return BitBudget(
        lambda1=patterns.bit_length() - 1,
        lambda2=cfg.kappa * int(math.log2(cfg.m1)),
        lambda3=cfg.omega * int(math.log2(cfg.m2)),
    )


def modem_bit_budget(cfg: ModemConfig) -> BitBudget:
    """Bit budget with the branches a scheme does not use set to zero."""
    bits_m2 = int(math.log2(cfg.m2))
    if not cfg.scheme.has_im:
        return BitBudget(lambda1=0, lambda2=0, lambda3=cfg.omega * bits_m2)
    budget = bit_budget(cfg.im_config)
    if not cfg.scheme.has_ofdm:
        return budget.model_copy(update={"lambda3": 0})
    return budget


def kappa_approx(m1: int, omega: int) -> int:
    """Closed-form approximation of the lambda-maximizing kappa."""
    if m1 < 2 or omega < 1:
        raise DomainError(f"need m1 >= 2 and omega >= 1, got m1={m1}, omega={omega}")
    return min(max((m1 * omega) // (m1 + 1), 1), omega)


def _index_bits(kappa: int, omega: int, m1: int) -> int:
    return (math.comb(omega, kappa).bit_length() - 1) + kappa * int(math.log2(m1))


def kappa_exhaustive(m1: int, omega: int) -> int:
    """Exact argmax of lambda1 + lambda2 over kappa; ties go to the smaller kappa."""
    if m1 < 2 or omega < 1:
        raise DomainError(f"need m1 >= 2 and omega >= 1, got m1={m1}, omega={omega}")
    return max(range(1, omega + 1), key=lambda k: (_index_bits(k, omega, m1), -k))


def bits_to_int(bits: np.ndarray) -> np.ndarray:
    """MSB-first integer value of the last axis of a 0/1 array.

    Rows wider than MAX_INT64_WIDTH bits come back as an object array of
    Python ints.
    """
    bits = np.asarray(bits, dtype=np.int64)
    width = bits.shape[-1]
    if width == 0:
        return np.zeros(bits.shape[:-1], dtype=np.int64)
    if width > MAX_INT64_WIDTH:
        rows = bits.reshape(-1, width).tolist()
        values = np.empty(len(rows), dtype=object)
        values[:] = [int("".join(map(str, row)), 2) for row in rows]
        return values.reshape(bits.shape[:-1])
    weights = 1 << np.arange(bits.shape[-1] - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def int_to_bits(values: np.ndarray, width: int) -> np.ndarray:
    """MSB-first 0/1 expansion of integers into `width` bits on a new last axis."""
    if width > MAX_INT64_WIDTH:
        shape = np.shape(values)
        flat = np.asarray(values, dtype=object).reshape(-1)
        rows = [[(int(v) >> shift) & 1 for shift in range(width - 1, -1, -1)] for v in flat]
        return np.asarray(rows, dtype=np.uint8).reshape(shape + (width,))
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((values[..., None] >> shifts) & 1).astype(np.uint8)


def bits_to_symbols(bits: np.ndarray, m: int) -> np.ndarray:
    """Group the last axis into log2(m)-bit symbol indices."""
    width = int(math.log2(m))
    bits = np.asarray(bits)
    grouped = bits.reshape(bits.shape[:-1] + (bits.shape[-1] // width, width))
    return bits_to_int(grouped)


def symbols_to_bits(symbols: np.ndarray, m: int) -> np.ndarray:
    width = int(math.log2(m))
    expanded = int_to_bits(symbols, width)
    return expanded.reshape(expanded.shape[:-2] + (-1,))


@lru_cache(maxsize=1 << 16)
def unrank_combination(rank: int, omega: int, kappa: int) -> Tuple[int, ...]:
    """The rank-th kappa-subset of {0..omega-1} in lexicographic order (0-based)."""
    chosen = []
    candidate = 0
    for slot in range(kappa):
        remaining = kappa - slot - 1
        while True:
            block = math.comb(omega - candidate - 1, remaining)
            if rank < block:
                break
            rank -= block
            candidate += 1
        chosen.append(candidate)
        candidate += 1
    return tuple(chosen)


@lru_cache(maxsize=1 << 16)
def rank_combination(subset: Tuple[int, ...], omega: int) -> int:
    """Lexicographic rank of a sorted 0-based kappa-subset of {0..omega-1}."""
    kappa = len(subset)
    rank = 0
    previous = -1
    for slot, element in enumerate(subset):
        remaining = kappa - slot - 1
        for skipped in range(previous + 1, element):
            rank += math.comb(omega - skipped - 1, remaining)
        previous = element
    return rank


def sap_encode(bits: np.ndarray, cfg: ImConfig) -> Sap:
    """Map lambda1 bits to an activation pattern."""
    budget = bit_budget(cfg)
    bits = np.asarray(bits)
    if bits.shape != (budget.lambda1,):
        raise DomainError(f"expected {budget.lambda1} SAP bits, got shape {bits.shape}")
    rank = int(bits_to_int(bits[None, :])[0])
    subset = unrank_combination(rank, cfg.omega, cfg.kappa)
    return Sap(indices=tuple(i + 1 for i in subset))


def sap_decode(sap: Sap, cfg: ImConfig) -> np.ndarray:
    """Map an activation pattern back to lambda1 bits, clamping outside the code book."""
    if sap.kappa != cfg.kappa or sap.indices[-1] > cfg.omega:
        raise DomainError(f"pattern {sap.indices} is not a {cfg.kappa}-subset of 1..{cfg.omega}")
    lambda1 = bit_budget(cfg).lambda1
    rank = rank_combination(tuple(i - 1 for i in sap.indices), cfg.omega)
    return int_to_bits(min(rank, (1 << lambda1) - 1), lambda1)


def encode_patterns(ranks: np.ndarray, omega: int, kappa: int) -> np.ndarray:
    """Batch unranking: (B,) ranks -> (B, kappa) 0-based zeta indices."""
    ranks = np.atleast_1d(np.asarray(ranks))
    table = [unrank_combination(int(r), omega, kappa) for r in ranks]
    return np.asarray(table, dtype=np.int64).reshape(ranks.shape + (kappa,))


def decode_patterns(theta: np.ndarray, omega: int, lambda1: int) -> np.ndarray:
    """Batch ranking with clamping: (B, kappa) 0-based indices -> (B,) ranks."""
    theta = np.asarray(theta, dtype=np.int64)
    flat = theta.reshape(-1, theta.shape[-1])
    ceiling = (1 << lambda1) - 1
    ranks = [min(rank_combination(tuple(int(i) for i in row), omega), ceiling) for row in flat]
    dtype = object if lambda1 > MAX_INT64_WIDTH else np.int64
    return np.asarray(ranks, dtype=dtype).reshape(theta.shape[:-1])
