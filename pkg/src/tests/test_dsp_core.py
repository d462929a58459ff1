"""
Tests for the spectral kernels.
"""

import numpy as np
import pytest

from models.errors import ConfigurationError
from services.dsp_core import bin_index_set, forward_dft, frequency_distance, inverse_dft


class TestTransforms:
    """Test cases for forward_dft / inverse_dft."""

    def setup_method(self):
        """Set up test fixtures."""
        self.rng = np.random.default_rng(1)

    def test_forward_is_unscaled(self):
        """A unit impulse has an all-ones spectrum."""
        impulse = np.zeros(16)
        impulse[0] = 1.0
        assert np.allclose(forward_dft(impulse), np.ones(16))

    def test_inverse_carries_one_over_length(self):
        """The inverse of an all-ones spectrum is a unit impulse."""
        x = inverse_dft(np.ones(32))
        assert x[0] == pytest.approx(1.0)
        assert np.allclose(x[1:], 0.0)

    def test_round_trip_on_batches(self):
        """Transforms act on the last axis of a batch."""
        x = self.rng.normal(size=(5, 64))
        assert np.allclose(inverse_dft(forward_dft(x)).real, x)
        assert np.allclose(forward_dft(x)[2], forward_dft(x[2]))

    def test_parseval(self):
        """sum |x|^2 = (1 / LN) sum |X|^2."""
        x = self.rng.normal(size=256) + 1j * self.rng.normal(size=256)
        spectrum = forward_dft(x)
        assert np.sum(np.abs(x) ** 2) == pytest.approx(np.sum(np.abs(spectrum) ** 2) / 256, rel=1e-12)

    def test_linearity(self):
        """dft(a x + b y) = a dft(x) + b dft(y)."""
        x, y = self.rng.normal(size=(2, 128))
        a, b = 0.7 - 2j, -1.5
        assert np.allclose(forward_dft(a * x + b * y), a * forward_dft(x) + b * forward_dft(y), atol=1e-10)
        assert np.allclose(inverse_dft(a * x + b * y), a * inverse_dft(x) + b * inverse_dft(y), atol=1e-12)

    def test_round_trip_up_to_4096(self):
        """inverse_dft(forward_dft(x)) = x for power-of-two lengths up to 4096."""
        for length in (8, 64, 512, 4096):
            x = self.rng.normal(size=length)
            restored = inverse_dft(forward_dft(x))
            assert np.linalg.norm(restored - x) <= 1e-12 * np.linalg.norm(x)

    def test_five_smooth_lengths_accepted(self):
        """Lengths 2^a 3^b 5^c are supported."""
        for length in (6, 12, 30, 128):
            assert forward_dft(np.ones(length)).shape == (length,)

    def test_unsupported_lengths_rejected(self):
        """Zero and non-5-smooth lengths raise ConfigurationError."""
        with pytest.raises(ConfigurationError):
            forward_dft(np.ones(7))
        with pytest.raises(ConfigurationError):
            inverse_dft(np.ones(0))


class TestBinLayout:
    """Test cases for bin helpers."""

    def test_bin_index_set(self):
        """Positive data bins and their mirrors for N=32, L=4."""
        bins = bin_index_set(32, 4)
        assert bins.positive_bins == tuple(range(1, 16))
        assert bins.negative_bins == tuple(range(113, 128))
        assert bins.total_bins == 128
        assert bins.dc_bin == 0

    def test_frequency_distance(self):
        """Distance from DC wraps around the circular axis."""
        assert frequency_distance(8).tolist() == [0, 1, 2, 3, 4, 3, 2, 1]
