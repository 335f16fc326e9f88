import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

import oracles
from cvtypical.analytics import (
    entropy_from_inv_purity,
    max_inv_purity,
    max_subsystem_entropy,
    microcanonical_invpurity_moments,
)
from cvtypical.ensemble import EnsembleConfig, run_ensemble
from cvtypical.lp import (
    Discretization,
    MomentConstraints,
    exact_mc_moments,
    simplex_standard_form,
    solve_bounds_from_moments,
    solve_entropy_bounds,
)
from cvtypical.measures import MicrocanonicalConfig
from cvtypical.validation import InfeasibleProgram


# --- simplex ---------------------------------------------------------------


@given(seed=st.integers(0, 2**32 - 1), rows=st.integers(1, 5), cols=st.integers(1, 12))
def test_simplex_matches_highs_on_random_programs(seed, rows, cols):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(rows, cols))
    x0 = rng.exponential(size=cols)
    b = a @ x0                       # feasible by construction
    c = rng.normal(size=cols)
    ref = linprog(-c, A_eq=a, b_eq=b, bounds=[(0, None)] * cols, method="highs")
    res = simplex_standard_form(c, a, b)
    if ref.status == 3:
        assert res.status == "unbounded"
        return
    assert ref.status == 0
    assert res.status == "optimal"
    assert res.objective == pytest.approx(-ref.fun, rel=1e-7, abs=1e-7)
    assert np.allclose(a @ res.x, b, atol=1e-8)
    assert np.all(res.x >= -1e-12)
    assert res.duality_gap < 1e-7 * max(1.0, abs(res.objective))


def test_simplex_detects_infeasible():
    res = simplex_standard_form([1.0, 1.0], [[1.0, 1.0]], [-1.0])
    assert res.status == "infeasible"


def test_simplex_detects_unbounded():
    res = simplex_standard_form([1.0, 0.0], [[1.0, -1.0]], [1.0])
    assert res.status == "unbounded"


def test_simplex_handles_redundant_rows():
    a = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
    res = simplex_standard_form([1.0, 2.0, 0.5], a, [1.0, 2.0, 1.0])
    assert res.status == "optimal"
    assert res.objective == pytest.approx(2.0)


# --- moments and rounding --------------------------------------------------


@pytest.mark.parametrize("n,energy", [(3, 10.0), (7, 50.5), (20, 200.0)])
def test_exact_moments_match_float_formula(n, energy):
    cfg = MicrocanonicalConfig(n, energy)
    a, a2 = exact_mc_moments(cfg)
    mp = microcanonical_invpurity_moments(cfg)
    assert float(a) == pytest.approx(mp.mean_a, rel=1e-14)
    assert float(a2) == pytest.approx(mp.mean_a2, rel=1e-14)


def test_constraints_are_rounded_outward():
    a, a2 = Fraction(1, 3), Fraction(10, 7)
    mc = MomentConstraints.from_values(a, a2)
    assert Fraction(mc.a_lo) <= a <= Fraction(mc.a_hi)
    assert Fraction(mc.a2_lo) <= a2 <= Fraction(mc.a2_hi)
    assert mc.a_lo < mc.a_hi
    exact = MomentConstraints.from_values(Fraction(1, 2), Fraction(3, 4))
    assert exact.a_lo == exact.a_hi == 0.5


# --- bounds ----------------------------------------------------------------


@pytest.mark.parametrize("n,energy", [(3, 12.0), (4, 16.0), (6, 60.0), (10, 40.0)])
def test_bounds_match_highs(n, energy):
    cfg = MicrocanonicalConfig(n, energy)
    res = solve_entropy_bounds(cfg, n_bins=1000)
    a, a2 = exact_mc_moments(cfg)
    lo, hi = oracles.lp_bounds_highs(float(a), float(a2), max_inv_purity(cfg.excess), 1000,
                                     entropy_from_inv_purity)
    assert res.feasible
    assert res.lower == pytest.approx(lo, abs=1e-9)
    assert res.upper == pytest.approx(hi, abs=1e-9)


@pytest.mark.parametrize("n,energy", [(4, 16.0), (8, 80.0)])
def test_vertex_solutions_and_certificate(n, energy):
    res = solve_entropy_bounds(MicrocanonicalConfig(n, energy), n_bins=2000)
    assert 0.0 <= res.lower <= res.upper <= max_subsystem_entropy(1, n, energy)
    assert len(res.active_bins["upper"]) <= 5
    assert len(res.active_bins["lower"]) <= 5
    assert res.duality_gap < 1e-9


def test_refinement_never_loosens():
    cfg = MicrocanonicalConfig(5, 30.0)
    results = [solve_entropy_bounds(cfg, n_bins=m) for m in (100, 1000, 10_000)]
    for coarse, fine in zip(results, results[1:]):
        assert fine.upper <= coarse.upper + 1e-12
        assert fine.lower >= coarse.lower - 1e-12


def test_point_mass_at_minimum():
    disc = Discretization(1000, 5.0)
    res = solve_bounds_from_moments(1.0, 1.0, disc)
    assert res.feasible
    assert res.lower == 0.0
    # the only feasible weight sits on the first bin, whose right edge is l(1)
    assert res.upper == pytest.approx(float(entropy_from_inv_purity(disc.edges[1])), rel=1e-12)
    finer = solve_bounds_from_moments(1.0, 1.0, Discretization(100_000, 5.0))
    assert finer.upper < res.upper


def test_vacuum_energy_gives_zero_bounds():
    res = solve_entropy_bounds(MicrocanonicalConfig(4, 8.0))
    assert (res.lower, res.upper) == (0.0, 0.0)


def test_inconsistent_moments_are_flagged():
    res = solve_bounds_from_moments(2.0, 3.0, Discretization(100, 5.0))   # variance < 0
    assert not res.feasible
    assert math.isnan(res.lower)


def test_small_n_rejected():
    with pytest.raises(ValueError):
        solve_entropy_bounds(MicrocanonicalConfig(2, 10.0))


def test_raise_infeasible_flag(monkeypatch):
    import cvtypical.lp as lp

    monkeypatch.setattr(lp, "exact_mc_moments", lambda cfg: (Fraction(2), Fraction(3)))
    with pytest.raises(InfeasibleProgram):
        solve_entropy_bounds(MicrocanonicalConfig(4, 16.0), n_bins=100, raise_infeasible=True)


def test_natural_log_base():
    cfg = MicrocanonicalConfig(4, 16.0)
    r2 = solve_entropy_bounds(cfg, n_bins=500)
    re = solve_entropy_bounds(cfg, n_bins=500, base="e")
    assert re.upper == pytest.approx(r2.upper * math.log(2), rel=1e-12)
    assert re.to_dict()["log_base"] == "e"


def test_bounds_bracket_sampled_mean():
    cfg = MicrocanonicalConfig(5, 20.0)
    res = solve_entropy_bounds(cfg, n_bins=2000)
    s = run_ensemble(EnsembleConfig(cfg, samples=10_000, seed=21)).entropy
    se = s.std(ddof=1) / math.sqrt(s.size)
    assert res.lower - 3 * se <= s.mean() <= res.upper + 3 * se
