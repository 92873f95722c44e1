import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from qpmcmc.exceptions import InvalidArgumentError
from qpmcmc.gumbel import exact_discrete_sample, gumbel_from_uniform, gumbel_max_select, sample_gumbel

EULER_GAMMA = 0.5772156649015329


def freq_within(counts, p, sigmas=4.0):
    n = counts.sum()
    p = np.asarray(p, dtype=float)
    band = sigmas * np.sqrt(p * (1 - p) / n)
    return np.all(np.abs(counts / n - p) <= band + 1e-12)


def test_inverse_cdf_fixed_point():
    assert gumbel_from_uniform(1 / math.e) == pytest.approx(0.0, abs=1e-15)


def test_uniform_endpoints_are_finite():
    assert np.all(np.isfinite(gumbel_from_uniform(np.array([0.0, 1.0]))))


def test_sample_mean_and_ks(rng):
    z = sample_gumbel(rng, 1_000_000)
    assert abs(z.mean() - EULER_GAMMA) < 0.01
    ks = stats.kstest(z, lambda t: np.exp(-np.exp(-t))).statistic
    assert ks < 1.95 / math.sqrt(1_000_000)


def test_scalar_and_vector_streams_agree():
    a = np.random.default_rng(1)
    b = np.random.default_rng(1)
    scalars = [sample_gumbel(a) for _ in range(5)]
    assert isinstance(scalars[0], float)
    np.testing.assert_allclose(scalars, sample_gumbel(b, 5), rtol=1e-15)


def test_single_feasible_entry(rng):
    lp = np.array([0.0, -np.inf, -np.inf])
    assert all(gumbel_max_select(lp, rng) == 0 for _ in range(500))


@pytest.mark.parametrize("c", [1.0, 1e6])
def test_scale_invariance(rng, c):
    p = np.array([0.2, 0.3, 0.5])
    lp = np.log(c * p)
    counts = np.bincount([gumbel_max_select(lp, rng) for _ in range(100_000)], minlength=3)
    assert freq_within(counts, p, 3.5)


def test_uniform_eight(rng):
    counts = np.bincount([gumbel_max_select(np.zeros(8), rng) for _ in range(100_000)], minlength=8)
    assert freq_within(counts, np.full(8, 0.125), 3.5)


def test_fixed_noise_is_deterministic():
    lp = np.array([0.0, 1.0, 2.0])
    assert gumbel_max_select(lp, noise=np.array([5.0, 0.0, 0.0])) == 0
    assert gumbel_max_select(lp, noise=np.zeros(3)) == 2


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=20), st.floats(-1e3, 1e3))
def test_shift_invariance_with_shared_noise(values, shift):
    lp = np.array(values)
    noise = sample_gumbel(np.random.default_rng(len(values)), lp.size)
    a = gumbel_max_select(lp, noise=noise)
    b = gumbel_max_select(lp + shift, noise=noise)
    assert a == b or abs((lp[a] + noise[a]) - (lp[b] + noise[b])) < 1e-9 * max(1.0, abs(shift))


def test_rejects_bad_inputs(rng):
    for bad in ([], [-np.inf, -np.inf], [np.nan, 0.0], [np.inf, 0.0]):
        with pytest.raises(InvalidArgumentError):
            gumbel_max_select(np.array(bad, dtype=float), rng)
    with pytest.raises(InvalidArgumentError):
        gumbel_max_select(np.zeros(3))


class TestExactDiscrete:
    def test_point_mass(self, rng):
        assert all(exact_discrete_sample([1, 0, 0], rng) == 0 for _ in range(500))

    def test_uniform(self, rng):
        counts = np.bincount([exact_discrete_sample([1, 1, 1, 1], rng) for _ in range(100_000)], minlength=4)
        assert freq_within(counts, np.full(4, 0.25), 3.5)

    def test_weights(self, rng):
        counts = np.bincount([exact_discrete_sample([2, 3, 5], rng) for _ in range(100_000)], minlength=3)
        assert freq_within(counts, [0.2, 0.3, 0.5], 3.5)

    def test_zero_weight_never_drawn(self, rng):
        assert all(exact_discrete_sample([0, 1, 0], rng) == 1 for _ in range(500))

    def test_rejects_bad_weights(self, rng):
        for bad in ([], [-1, 2], [0, 0], [np.inf, 1]):
            with pytest.raises(InvalidArgumentError):
                exact_discrete_sample(np.array(bad, dtype=float), rng)


def test_batched_draws(rng):
    lp = np.array([np.log(0.1), -np.inf, np.log(0.6), np.log(0.3)])
    draws = gumbel_max_select(lp, rng, size=100_000)
    assert draws.shape == (100_000,) and not np.any(draws == 1)
    assert freq_within(np.bincount(draws, minlength=4), [0.1, 0.0, 0.6, 0.3], 3.5)
    exact = exact_discrete_sample([1, 0, 6, 3], rng, size=100_000)
    assert not np.any(exact == 1)
    assert freq_within(np.bincount(exact, minlength=4), [0.1, 0.0, 0.6, 0.3], 3.5)
    with pytest.raises(InvalidArgumentError):
        gumbel_max_select(lp, size=3)
