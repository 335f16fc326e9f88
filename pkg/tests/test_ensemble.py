import math

import numpy as np
import pytest

from cvtypical.analytics import canonical_invpurity_moments, max_subsystem_entropy
from cvtypical.ensemble import (
    EnsembleConfig,
    concentration_scan,
    draw_sample,
    histogram,
    jackknife_distance,
    mdep_scan,
    point_seed,
    run_ensemble,
)
from cvtypical.haar import assemble_pure_cm, unitary_to_ortho_symplectic
from cvtypical.measures import CanonicalConfig, MicrocanonicalConfig
from cvtypical.symplectic import (
    reduce,
    symplectic_invariants,
    von_neumann_entropy,
)
from cvtypical.validation import InvariantViolation


def mc(n, energy, **kw):
    return EnsembleConfig(MicrocanonicalConfig(n, energy), **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        mc(3, 30.0, m=4)
    with pytest.raises(ValueError):
        mc(3, 30.0, samples=0)
    with pytest.raises(ValueError):
        mc(3, 30.0, check="sometimes")
    assert mc(3, 30.0, base="e").to_dict()["log_base"] == "e"


def test_reproducible_and_independent_of_workers():
    cfg = mc(6, 60.0, m=2, samples=300, seed=4)
    a = run_ensemble(cfg)
    b = run_ensemble(cfg)
    c = run_ensemble(cfg, workers=2)
    for field in ("entropy", "inv_purity", "nu", "invariants", "total_energy"):
        assert np.array_equal(getattr(a, field), getattr(b, field))
        assert np.array_equal(getattr(a, field), getattr(c, field))
    d = run_ensemble(mc(6, 60.0, m=2, samples=300, seed=5))
    assert not np.array_equal(a.entropy, d.entropy)


def test_prefix_of_larger_run_is_identical():
    small = run_ensemble(mc(5, 40.0, samples=50, seed=1))
    big = run_ensemble(mc(5, 40.0, samples=5000, seed=1))
    assert np.array_equal(small.entropy, big.entropy[:50])


@pytest.mark.parametrize("m", [1, 3])
def test_records_agree_with_full_state_route(m):
    cfg = mc(5, 45.0, m=m, samples=40, seed=2, check="all")
    res = run_ensemble(cfg)
    for i in (0, 17, 39):
        sample, energies, u = draw_sample(cfg, i, check=True, return_state=True)
        sigma = assemble_pure_cm(energies, unitary_to_ortho_symplectic(u))
        gamma = reduce(sigma, list(range(m)))
        assert res.entropy[i] == pytest.approx(von_neumann_entropy(gamma), abs=1e-9)
        assert res.inv_purity[i] == pytest.approx(np.linalg.det(gamma), rel=1e-9)
        assert np.allclose(res.invariants[i], symplectic_invariants(gamma), rtol=1e-9)
        assert res.total_energy[i] == pytest.approx(np.trace(sigma), rel=1e-12)
        assert sample.entropy == res.entropy[i]


def test_single_mode_system_has_no_entanglement():
    for measure in (MicrocanonicalConfig(1, 20.0), CanonicalConfig(1, 3.0)):
        res = run_ensemble(EnsembleConfig(measure, samples=200))
        assert np.all(res.entropy == 0.0)


def test_whole_system_reduction_is_pure():
    res = run_ensemble(mc(4, 40.0, m=4, samples=200))
    assert np.all(res.entropy == 0.0)
    assert np.all(res.inv_purity == 1.0)


def test_summary_contents():
    res = run_ensemble(mc(5, 50.0, samples=2000, seed=3), bins=30)
    s = res.summary
    assert sum(s.hist_counts) == 2000
    assert len(s.hist_edges) == 31
    assert s.s_max == pytest.approx(max_subsystem_entropy(1, 5, 50.0))
    assert 0.0 <= s.mean_entropy <= s.s_max
    assert s.se_entropy == pytest.approx(s.std_entropy / math.sqrt(2000))
    assert s.distance_to_max == pytest.approx((s.s_max - s.mean_entropy) / s.std_entropy)
    assert s.se_distance_to_max > 0


def test_canonical_summary_has_no_maximum():
    s = run_ensemble(EnsembleConfig(CanonicalConfig(3, 2.0), samples=100)).summary
    assert s.s_max is None and s.distance_to_max is None


def test_pipeline_mean_matches_closed_form():
    cfg = EnsembleConfig(CanonicalConfig(5, 10.0), samples=100_000, seed=9, check="none")
    a = run_ensemble(cfg).inv_purity
    mp = canonical_invpurity_moments(cfg.measure)
    k = math.sqrt(a.size)
    assert abs(a.mean() - mp.mean_a) < 3 * a.std() / k
    assert abs((a**2).mean() - mp.mean_a2) < 3 * (a**2).std() / k


def test_invariant_violation_reports_sample(monkeypatch):
    import cvtypical.ensemble as ens

    real = ens.squeezing_diagonals

    def broken(excess):
        w = real(excess)
        w[:, :] = 0.5                    # below the uncertainty bound
        return w

    monkeypatch.setattr(ens, "squeezing_diagonals", broken)
    with pytest.raises(InvariantViolation, match="sample 0"):
        run_ensemble(mc(3, 30.0, samples=10, check="none"))


def test_spot_check_catches_bad_unitary(monkeypatch):
    import cvtypical.ensemble as ens

    monkeypatch.setattr(ens, "haar_from_ginibre", lambda g: g)   # not unitary
    with pytest.raises(InvariantViolation):
        run_ensemble(mc(3, 30.0, samples=5, check="all"))


# --- statistics helpers ----------------------------------------------------


def test_jackknife_matches_brute_force(rng):
    x = rng.gamma(2.0, size=200)
    stat, se = jackknife_distance(x, 10.0)
    loo = np.array([(10.0 - np.delete(x, i).mean()) / np.delete(x, i).std(ddof=1) for i in range(x.size)])
    ref = math.sqrt((x.size - 1) / x.size * np.sum((loo - loo.mean()) ** 2))
    assert stat == pytest.approx((10.0 - x.mean()) / x.std(ddof=1))
    assert se == pytest.approx(ref, rel=1e-9)


def test_histogram_examples():
    edges, counts, density = histogram([0.7] * 10, bins=5, s_max=1.0)
    assert np.count_nonzero(counts) == 1 and counts.sum() == 10
    assert np.sum(density * np.diff(edges)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        histogram([])


def test_histograms_narrow_with_n():
    stds = [run_ensemble(mc(n, 10.0 * n, samples=5000, seed=n)).summary.std_entropy for n in (4, 8, 16)]
    assert stds[0] > stds[1] > stds[2]


# --- scans -----------------------------------------------------------------


def test_point_seeds_differ():
    seeds = {point_seed(0, n, m) for n in range(10) for m in range(3)}
    assert len(seeds) == 30


def test_concentration_scan_shape():
    out = concentration_scan([4, 8, 16], energy_per_mode=10.0, samples=300, seed=1)
    assert [r["n"] for r in out["rows"]] == [4, 8, 16]
    assert out["fit"]["slope"] < 0
    for r in out["rows"]:
        assert r["var_over_mean"] == pytest.approx(r["var"] / r["mean"])
        assert r["se_var_over_mean"] > 0


def test_weak_concentration_at_fixed_ratio():
    out = concentration_scan([8, 16, 32], energy_per_mode=10.0, m_ratio=0.25, samples=400, seed=2)
    ratios = [r["var_over_mean2"] for r in out["rows"]]
    assert [r["m"] for r in out["rows"]] == [2, 4, 8]
    assert ratios[0] > ratios[1] > ratios[2]


def test_canonical_scan_runs():
    out = concentration_scan([4, 6], temperature=2.0, samples=200)
    assert len(out["rows"]) == 2
    with pytest.raises(ValueError):
        concentration_scan([4], samples=10)


def test_mdep_scan():
    rows = mdep_scan([12], range(1, 13), energy_per_mode=10.0, samples=1500, seed=3)
    means = np.array([r["mean"] for r in rows])
    stds = np.array([r["std"] for r in rows])
    assert rows[-1]["mean"] == 0.0          # m = n is the pure global state
    # near-linear growth at small m, bending over as m approaches n/2
    assert means[1] == pytest.approx(2 * means[0], rel=0.15)
    assert means[6] - means[5] < 0.5 * (means[1] - means[0])
    assert stds[2] > stds[0]
