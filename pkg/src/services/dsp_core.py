"""
Spectral kernels shared by every stage of the modem.

Convention: the forward transform is unscaled and the inverse carries 1/LN,
X[s] = sum_n x(n) exp(-2j pi s n / LN). The clipping-halving and
anti-symmetry properties used elsewhere are stated under this convention.
Transforms act on the last axis so batches of symbols pass through unchanged.
"""

import numpy as np
from scipy import fft

from models.errors import ConfigurationError
from models.schemas import BinIndexSet


def _check_length(values: np.ndarray) -> None:
    length = values.shape[-1] if values.ndim else 0
    if length == 0:
        raise ConfigurationError("transform length must be positive")
    if fft.next_fast_len(length) != length:
        raise ConfigurationError(f"unsupported transform length {length}: use 2^a 3^b 5^c")


def forward_dft(x: np.ndarray) -> np.ndarray:
    """Unscaled forward DFT along the last axis."""
    x = np.asarray(x)
    _check_length(x)
    return fft.fft(x, axis=-1)


def inverse_dft(spectrum: np.ndarray) -> np.ndarray:
    """Inverse DFT along the last axis with the 1/LN factor."""
    spectrum = np.asarray(spectrum)
    _check_length(spectrum)
    return fft.ifft(spectrum, axis=-1)


def bin_index_set(n: int, l: int) -> BinIndexSet:
    """Positive and mirrored negative data bins of an LN-point spectrum."""
    ln = n * l
    return BinIndexSet(
        positive_bins=tuple(range(1, n // 2)),
        negative_bins=tuple(range(ln - n // 2 + 1, ln)),
        total_bins=ln,
    )


def frequency_distance(ln: int) -> np.ndarray:
    """|sigma| measured as distance from DC on the circular bin axis."""
    sigma = np.arange(ln)
    return np.minimum(sigma, ln - sigma)
