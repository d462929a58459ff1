"""
Gray-coded PSK rings and the superposition look-up table.
"""

import logging
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from models.errors import DomainError
from models.schemas import ConstellationPair

logger = logging.getLogger(__name__)

# Components smaller than this are rounding residue of exp() on the axes.
_SNAP = 1e-12

# Published QPSK superposition table: rows X2, columns X1, cells X1 + X2.
# The (X2=+1, X1=+3j) cell is printed as "+1+j"; the sum is +1+3j.
REFERENCE_QPSK_TABLE = {
    (1, 3): 4, (1, 3j): 1 + 3j, (1, -3j): 1 - 3j, (1, -3): -2,
    (1j, 3): 3 + 1j, (1j, 3j): 4j, (1j, -3j): -2j, (1j, -3): -3 + 1j,
    (-1j, 3): 3 - 1j, (-1j, 3j): 2j, (-1j, -3j): -4j, (-1j, -3): -3 - 1j,
    (-1, 3): 2, (-1, 3j): -1 + 3j, (-1, -3j): -1 - 3j, (-1, -3): -4,
}
PRINTED_TYPO_CELL = ((1, 3j), 1 + 1j)


def gray(value: int) -> int:
    return value ^ (value >> 1)


def inverse_gray(value: int) -> int:
    result = value
    shift = value >> 1
    while shift:
        result ^= shift
        shift >>= 1
    return result


def _snap(points: np.ndarray) -> np.ndarray:
    real = np.where(np.abs(points.real) < _SNAP, 0.0, points.real)
    imag = np.where(np.abs(points.imag) < _SNAP, 0.0, points.imag)
    return real + 1j * imag


@lru_cache(maxsize=64)
def _ring(m: int, radius: float) -> np.ndarray:
    positions = np.array([inverse_gray(i) for i in range(m)])
    ring = _snap(radius * np.exp(2j * np.pi * positions / m))
    ring.setflags(write=False)
    return ring


def psk_ring(m: int, radius: float) -> np.ndarray:
    """All m points of a Gray-labelled PSK ring, indexed by symbol label."""
    return _ring(int(m), float(radius))


def psk_point(symbol_index: int, m: int, radius: float) -> complex:
    """Point of label `symbol_index`; for m=4 the labels give +r, +rj, -rj, -r."""
    if not 0 <= symbol_index < m:
        raise DomainError(f"symbol index {symbol_index} outside [0, {m})")
    return complex(psk_ring(m, radius)[symbol_index])


def detect_psk(y, m: int, radius: float) -> np.ndarray:
    """Nearest ring point per sample; exact ties resolve to the lowest label."""
    y = np.asarray(y, dtype=complex)
    distances = np.abs(y[..., None] - psk_ring(m, radius)) ** 2
    return np.argmin(distances, axis=-1)


class SuperpositionLut(BaseModel):
    """All M1*M2 sums P1[x1] + P2[x2], row-major over (x2, x1)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    m1: int
    m2: int
    points: np.ndarray

    @property
    def entries(self) -> List[Tuple[int, int, complex]]:
        """(x1_index, x2_index, combined point) in table order."""
        return [(t % self.m1, t // self.m1, complex(p)) for t, p in enumerate(self.points)]

    def __len__(self) -> int:
        return self.points.size

    def minimum_distance(self) -> float:
        gaps = np.abs(self.points[:, None] - self.points[None, :])
        return float(np.min(gaps[~np.eye(len(self), dtype=bool)]))


@lru_cache(maxsize=16)
def build_lut(pair: ConstellationPair) -> SuperpositionLut:
    """Superposition table of the outer (IM) and inner (O-OFDM) rings."""
    p1 = psk_ring(pair.m1, pair.r1)
    p2 = psk_ring(pair.m2, pair.r2)
    points = (p2[:, None] + p1[None, :]).ravel()
    points.setflags(write=False)
    logger.debug(f"Built {points.size}-entry LUT (r1={pair.r1:g}, r2={pair.r2:g})")
    return SuperpositionLut(m1=pair.m1, m2=pair.m2, points=points)


def detect_lut(y, lut: SuperpositionLut) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest LUT entry per sample, returned as (x1_index, x2_index)."""
    y = np.asarray(y, dtype=complex)
    distances = np.abs(y[..., None] - lut.points) ** 2
    entry = np.argmin(distances, axis=-1)
    return entry % lut.m1, entry // lut.m1
