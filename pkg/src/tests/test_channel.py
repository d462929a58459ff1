"""
Tests for the optical channel.
"""

import math

import numpy as np
import pytest

from models.errors import DomainError
from models.schemas import SPEED_OF_LIGHT, CeilingBounceParams, ChannelModel, ModemConfig, NoiseModel, Scheme
from services.channel import (
    OpticalChannel,
    add_awgn,
    apply_channel,
    ceiling_bounce_taps,
    channel_frequency_response,
    cp_length_for,
    rms_delay_spread,
)
from services.dsp_core import forward_dft, inverse_dft
from services.receiver import Receiver
from services.transmitter import Transmitter


def circular(blocks: np.ndarray, taps: np.ndarray) -> np.ndarray:
    response = channel_frequency_response(taps, blocks.shape[-1])
    return inverse_dft(forward_dft(blocks) * response).real


class TestCeilingBounce:
    """Test cases for the diffuse impulse response."""

    def setup_method(self):
        """Set up test fixtures."""
        self.params = CeilingBounceParams(rms_delay_spread=10e-9)

    def test_rho_from_delay_spread(self):
        """rho = 12 delta_tau / sqrt(13/11)."""
        assert self.params.rho == pytest.approx(110.38e-9, rel=1e-3)
        assert self.params.delay_spread == pytest.approx(10e-9)

    def test_rho_from_ceiling_height(self):
        """rho = 2H / c."""
        params = CeilingBounceParams(rms_delay_spread=None, ceiling_height=2.5)
        assert params.rho == pytest.approx(5.0 / SPEED_OF_LIGHT)

    def test_missing_parameters(self):
        """Neither delay spread nor height is a validation error."""
        with pytest.raises(ValueError):
            CeilingBounceParams(rms_delay_spread=None)

    def test_unit_sum(self):
        """Taps carry the unit path loss."""
        taps = ceiling_bounce_taps(self.params, 0.5e-9)
        assert np.sum(taps) == pytest.approx(1.0)
        assert np.all(np.diff(taps) < 0)

    def test_delay_spread_of_sampled_taps(self):
        """The sampled response reproduces delta_tau within 1 %."""
        sample_period = 10e-9 / 20
        taps = ceiling_bounce_taps(self.params, sample_period)
        assert rms_delay_spread(taps, sample_period) == pytest.approx(10e-9, rel=0.01)

    def test_bad_sample_period(self):
        """Non-positive T_c raises DomainError."""
        with pytest.raises(DomainError):
            ceiling_bounce_taps(self.params, 0.0)


class TestApplyChannel:
    """Test cases for cyclic-prefix transmission through the taps."""

    def setup_method(self):
        """Set up test fixtures."""
        self.blocks = np.random.default_rng(4).random((3, 16))

    def test_single_tap(self):
        """A one-tap channel is a pure gain."""
        assert np.allclose(apply_channel(self.blocks, np.array([0.5]), 0), 0.5 * self.blocks)

    def test_full_prefix_is_circular(self):
        """With CP >= taps - 1 every block sees circular convolution."""
        taps = np.array([0.5, 0.3, 0.2])
        assert np.allclose(apply_channel(self.blocks, taps, 2), circular(self.blocks, taps))

    def test_prefix_longer_than_symbol(self):
        """A prefix wrapping the symbol several times still gives circular convolution."""
        taps = np.linspace(1.0, 0.1, 40)
        taps /= taps.sum()
        assert np.allclose(apply_channel(self.blocks, taps, 39), circular(self.blocks, taps))

    def test_short_prefix_leaks(self):
        """Without a prefix the previous symbol leaks into the next."""
        received = apply_channel(self.blocks, np.array([0.5, 0.5]), 0)
        expected = 0.5 * self.blocks[1, 0] + 0.5 * self.blocks[0, -1]
        assert received[1, 0] == pytest.approx(expected)

    def test_single_symbol_shape(self):
        """A 1-D symbol comes back 1-D."""
        received = apply_channel(self.blocks[0], np.array([0.5, 0.5]), 1)
        assert received.shape == (16,)

    def test_negative_prefix(self):
        """A negative CP raises DomainError."""
        with pytest.raises(DomainError):
            apply_channel(self.blocks, np.array([0.5, 0.5]), -1)


class TestNoise:
    """Test cases for AWGN."""

    def test_zero_variance_is_identity(self):
        """N0 = 0 returns the input unchanged."""
        signal = np.arange(5.0)
        noisy = add_awgn(signal, NoiseModel(n0=0.0, sample_period=1e-9), 0)
        assert np.array_equal(noisy, signal)
        assert noisy is not signal

    def test_deterministic(self):
        """Equal seeds give equal noise."""
        noise = NoiseModel(n0=1e-9, sample_period=1e-9)
        first = add_awgn(np.zeros(100), noise, 42)
        second = add_awgn(np.zeros(100), noise, np.random.default_rng(42))
        assert np.array_equal(first, second)

    def test_variance(self):
        """Per-sample variance is N0 / (2 T_c)."""
        noise = NoiseModel(n0=2e-9, sample_period=1e-9)
        samples = add_awgn(np.zeros(200_000), noise, 7)
        assert noise.per_sample_variance == pytest.approx(1.0)
        assert np.var(samples) == pytest.approx(1.0, rel=0.02)


class TestFrequencyResponse:
    """Test cases for H[sigma] and the prefix length."""

    def test_single_tap_is_flat(self):
        """h = [1] gives H = 1."""
        assert np.allclose(channel_frequency_response(np.array([1.0]), 8), np.ones(8))

    def test_delay_is_phase_ramp(self):
        """h = [0, 1] gives exp(-2j pi sigma / LN)."""
        response = channel_frequency_response(np.array([0.0, 1.0]), 8)
        assert np.allclose(response, np.exp(-2j * np.pi * np.arange(8) / 8))

    def test_empty_taps(self):
        """No taps raises DomainError."""
        with pytest.raises(DomainError):
            channel_frequency_response(np.array([]), 8)

    def test_cp_length_for(self):
        """The prefix covers the requested share of sum |h|^2."""
        assert cp_length_for(np.array([1.0, 0.0, 0.0])) == 0
        assert cp_length_for(np.array([1.0, 1.0])) == 1
        assert cp_length_for(np.array([1.0, 1.0]), 0.5) == 0


class TestOpticalChannel:
    """Test cases for the bound channel."""

    def test_los_passthrough(self):
        """LOS without noise leaves the waveform unchanged."""
        channel = OpticalChannel(ChannelModel(kind="los"), 1e-9, 128)
        waveform = np.random.default_rng(0).random((2, 128))
        assert np.allclose(channel.propagate(waveform, None), waveform)
        assert channel.cp_length == 0

    def test_dispersive_noiseless_round_trip(self):
        """A prefix spanning every tap lets ZF undo the ceiling-bounce channel."""
        cfg = ModemConfig(scheme=Scheme.HYBRID_ACO, n=32, l=4)
        transmitter = Transmitter(cfg)
        reference = OpticalChannel(ChannelModel(kind="ceiling-bounce"), transmitter.sample_period, cfg.ln)
        model = ChannelModel(kind="ceiling-bounce", cp_length=reference.taps.size - 1)
        channel = OpticalChannel(model, transmitter.sample_period, cfg.ln)
        assert channel.cp_length > cfg.ln

        bits = transmitter.random_bits(np.random.default_rng(5), 20)
        waveform = transmitter.transmit_symbol(bits)
        received = channel.propagate(waveform.unipolar, None)
        result = Receiver(cfg, channel.frequency_response).receive_symbol(received, waveform.scale)
        assert np.array_equal(result.bits_hat, bits)

    def test_default_prefix_covers_energy(self):
        """The default CP holds 99.9 % of the tap energy."""
        channel = OpticalChannel(ChannelModel(kind="ceiling-bounce"), 0.5e-9, 128)
        power = channel.taps ** 2
        assert np.sum(power[: channel.cp_length + 1]) / np.sum(power) >= 0.999 - 1e-12
        assert math.isclose(np.sum(channel.taps), 1.0)
