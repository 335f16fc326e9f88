import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

import oracles
from cvtypical.measures import (
    CanonicalConfig,
    MicrocanonicalConfig,
    config_from_dict,
    mc_cdf,
    mc_marginal_density,
    mc_normalization,
    sample_can_energies,
    sample_mc_energies,
)


def draws(fn, cfg, k, seed):
    rng = np.random.default_rng(seed)
    return np.array([fn(cfg, rng) for _ in range(k)])


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 30), excess=st.floats(0.0, 1e4))
def test_mc_draws_respect_constraints(seed, n, excess):
    cfg = MicrocanonicalConfig(n, 2 * n + excess)
    e = sample_mc_energies(cfg, seed)
    assert e.shape == (n,)
    assert np.all(e >= 2.0)
    assert np.sum(e - 2.0) <= excess * (1 + 1e-12)


def test_degenerate_simplex_gives_vacuum():
    assert np.array_equal(sample_mc_energies(MicrocanonicalConfig(4, 8.0), 0), [2.0] * 4)


def test_config_rejects_energy_below_vacuum():
    with pytest.raises(ValueError):
        MicrocanonicalConfig(3, 5.9)
    with pytest.raises(ValueError):
        CanonicalConfig(3, 0.0)


def test_single_mode_is_uniform():
    cfg = MicrocanonicalConfig(1, 12.0)
    e = draws(sample_mc_energies, cfg, 10_000, 1)[:, 0]
    assert stats.kstest(e, stats.uniform(2.0, 10.0).cdf).pvalue > 1e-3


def test_three_mode_marginal_matches_density():
    cfg = MicrocanonicalConfig(3, 18.0)
    e = draws(sample_mc_energies, cfg, 10_000, 2)[:, 0]
    assert stats.kstest(e, lambda v: mc_cdf(v, cfg)).pvalue > 1e-3


def test_marginals_are_exchangeable():
    cfg = MicrocanonicalConfig(4, 30.0)
    e = draws(sample_mc_energies, cfg, 10_000, 3)
    assert stats.ks_2samp(e[:, 0], e[:, -1]).pvalue > 1e-3


def test_density_examples():
    cfg = MicrocanonicalConfig(1, 7.0)
    assert mc_marginal_density(3.3, cfg) == pytest.approx(1 / 5.0)
    cfg = MicrocanonicalConfig(3, 18.0)
    assert mc_marginal_density(2.0 + cfg.excess, cfg) == 0.0
    with pytest.raises(ValueError):
        mc_marginal_density(1.5, cfg)


@pytest.mark.parametrize("n,energy", [(1, 5.0), (3, 18.0), (7, 40.0)])
def test_density_integrates_to_one(n, energy):
    cfg = MicrocanonicalConfig(n, energy)
    val, _ = integrate.quad(lambda v: mc_marginal_density(v, cfg), 2.0, 2.0 + cfg.excess)
    assert val == pytest.approx(1.0, abs=1e-6)


def test_cdf_derivative_is_density():
    cfg = MicrocanonicalConfig(5, 30.0)
    v, h = 4.3, 1e-6
    d = (mc_cdf(v + h, cfg) - mc_cdf(v - h, cfg)) / (2 * h)
    assert d == pytest.approx(mc_marginal_density(v, cfg), rel=1e-6)


def test_large_n_density_is_exponential():
    t, n = 3.0, 10_000
    cfg = MicrocanonicalConfig(n, n * (t + 2))
    for v in [2.0, 4.0, 8.0]:
        assert mc_marginal_density(v, cfg) == pytest.approx(math.exp(-(v - 2) / t) / t, rel=1e-2)


def test_normalization_examples():
    assert mc_normalization(MicrocanonicalConfig(1, 4.0)) == pytest.approx(0.5)
    assert mc_normalization(MicrocanonicalConfig(2, 5.0)) == pytest.approx(2.0)
    with pytest.raises(ZeroDivisionError):
        mc_normalization(MicrocanonicalConfig(2, 4.0))


@pytest.mark.parametrize("n,excess", [(1, 3.0), (2, 1.0), (2, 5.5), (3, 4.0)])
def test_normalization_times_volume(n, excess):
    cfg = MicrocanonicalConfig(n, 2 * n + excess)
    vol = oracles.simplex_volume_quadrature(n, excess)
    assert mc_normalization(cfg) * vol == pytest.approx(1.0, abs=1e-6)


def test_canonical_mean_and_law():
    cfg = CanonicalConfig(1, 4.0)
    e = draws(sample_can_energies, cfg, 100_000, 4)[:, 0]
    se = e.std(ddof=1) / math.sqrt(e.size)
    assert abs(e.mean() - 6.0) < 3 * se
    assert stats.kstest(e[:10_000], stats.expon(loc=2.0, scale=4.0).cdf).pvalue > 1e-3


def test_canonical_vacuum_limit():
    e = sample_can_energies(CanonicalConfig(5, 1e-12), 0)
    assert np.allclose(e, 2.0, atol=1e-10)


def test_microcanonical_approaches_canonical():
    t, n = 3.0, 1000
    mc = draws(sample_mc_energies, MicrocanonicalConfig(n, n * (t + 2)), 5000, 5)[:, 0]
    can = draws(sample_can_energies, CanonicalConfig(n, t), 5000, 6)[:, 0]
    assert stats.ks_2samp(mc, can).statistic < 0.05


def test_config_json_round_trip():
    for cfg in (MicrocanonicalConfig(4, 30.0), CanonicalConfig(7, 2.5)):
        assert config_from_dict(cfg.to_dict()) == cfg
    assert config_from_dict('{"measure": "canonical", "n": 3, "T": 1, "seed": 9}') == CanonicalConfig(3, 1.0)
    with pytest.raises(ValueError):
        config_from_dict({"measure": "grand", "n": 3})
