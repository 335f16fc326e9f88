"""Ensemble sampling of reduced-state entanglement and the scans built on it."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import rng as rngmod
from .analytics import max_subsystem_entropy
from .haar import (
    assemble_pure_cm,
    ginibre,
    haar_from_ginibre,
    squeezing_diagonals,
    unitary_to_ortho_symplectic,
)
from .measures import CanonicalConfig, MicrocanonicalConfig, sample_excess
from .symplectic import entropic_h, symplectic_eigenvalues, symplectic_form, symplectic_spectra
from .validation import InvariantViolation, TOL_UNC, check_log_base, check_positive_int

__all__ = [
    "EnsembleConfig",
    "EnsembleSample",
    "EnsembleSummary",
    "EnsembleResult",
    "draw_sample",
    "run_ensemble",
    "summarize",
    "jackknife_distance",
    "concentration_scan",
    "mdep_scan",
    "histogram",
    "point_seed",
]

logger = logging.getLogger(__name__)

SPOT_CHECK_EVERY = 100
DEFAULT_BINS = 50


@dataclass(frozen=True)
class EnsembleConfig:
    measure: MicrocanonicalConfig | CanonicalConfig
    m: int = 1
    samples: int = 5000
    seed: int = 0
    base: object = 2
    check: str = "spot"  # "spot", "all" or "none"

    def __post_init__(self):
        check_positive_int(self.m, "m")
        check_positive_int(self.samples, "samples")
        if self.m > self.measure.n:
            raise ValueError(f"m={self.m} exceeds the number of modes {self.measure.n}")
        if self.check not in ("spot", "all", "none"):
            raise ValueError(f"unknown check mode {self.check!r}")
        object.__setattr__(self, "base", check_log_base(self.base))

    @property
    def n(self):
        return self.measure.n

    def s_max(self):
        """Largest attainable entropy (micro-canonical only)."""
        if isinstance(self.measure, MicrocanonicalConfig):
            return max_subsystem_entropy(self.m, self.n, self.measure.energy, base=self.base)
        return None

    def to_dict(self):
        return {
            **self.measure.to_dict(),
            "m": self.m,
            "samples": self.samples,
            "seed": self.seed,
            "log_base": str(self.base),
        }


@dataclass
class EnsembleSample:
    index: int
    total_energy: float
    inv_purity: float
    entropy: float
    nu: np.ndarray
    invariants: np.ndarray


@dataclass
class EnsembleSummary:
    samples: int
    mean_entropy: float
    std_entropy: float
    se_entropy: float
    mean_inv_purity: float
    std_inv_purity: float
    se_inv_purity: float
    mean_inv_purity2: float
    se_inv_purity2: float
    s_max: float | None
    distance_to_max: float | None
    se_distance_to_max: float | None
    hist_edges: list = field(default_factory=list)
    hist_counts: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


@dataclass
class EnsembleResult:
    config: EnsembleConfig
    summary: EnsembleSummary
    index: np.ndarray
    total_energy: np.ndarray
    inv_purity: np.ndarray
    entropy: np.ndarray
    nu: np.ndarray
    invariants: np.ndarray

    def records(self):
        for i in range(self.index.size):
            yield EnsembleSample(
                int(self.index[i]),
                float(self.total_energy[i]),
                float(self.inv_purity[i]),
                float(self.entropy[i]),
                self.nu[i],
                self.invariants[i],
            )


def _check_state(index, energies, ortho, tol_purity=1e-6):
    n = energies.size
    eye = np.eye(2 * n)
    omega = symplectic_form(n)
    if np.max(np.abs(ortho.T @ ortho - eye)) > 1e-9:
        raise InvariantViolation(f"sample {index}: O is not orthogonal")
    if np.max(np.abs(ortho.T @ omega @ ortho - omega)) > 1e-9:
        raise InvariantViolation(f"sample {index}: O is not symplectic")
    sigma = assemble_pure_cm(energies, ortho)
    try:
        nu = symplectic_eigenvalues(sigma)
    except InvariantViolation as exc:
        raise InvariantViolation(f"sample {index}: {exc}") from exc
    if np.max(np.abs(nu - 1.0)) > max(TOL_UNC, tol_purity):
        raise InvariantViolation(f"sample {index}: global state is not pure (nu={nu})")
    total = float(np.sum(energies))
    if abs(np.trace(sigma) - total) > 1e-10 * max(1.0, total):
        raise InvariantViolation(f"sample {index}: trace differs from the total energy")
    return sigma


def _raw_draw(cfg, index):
    # energies first, then the Ginibre matrix, from the sample's own stream
    rng = rngmod.stream(cfg.seed, index)
    x = sample_excess(cfg.measure, rng)
    g = ginibre(cfg.n, cfg.n, rng)
    return x, g


def _process(cfg, indices, excess, ginibres):
    """Reduced-state statistics for a batch of drawn states.

    Column ``j`` of the phase-fixed QR factor depends only on the first ``j``
    columns of the Ginibre matrix, so only ``m`` columns are orthonormalised.
    Checked samples are also completed to a full unitary and verified.
    """
    n, m = cfg.n, cfg.m
    unitaries = haar_from_ginibre(ginibres[:, :, :m])
    for j, i in enumerate(indices):
        if _should_check(cfg, i):
            full = haar_from_ginibre(ginibres[j])
            if np.max(np.abs(full[:, :m] - unitaries[j])) > 1e-9:
                raise InvariantViolation(f"sample {i}: truncated QR disagrees with the full one")
            _check_state(i, 2.0 + excess[j], unitary_to_ortho_symplectic(full))
    xu = unitaries.real[:, :, :m]
    yu = unitaries.imag[:, :, :m]
    # columns i and i + n of [[X, Y], [-Y, X]] for the kept modes
    cols = np.concatenate(
        [np.concatenate([xu, -yu], axis=1), np.concatenate([yu, xu], axis=1)], axis=2
    )
    w = squeezing_diagonals(excess)
    gamma = np.swapaxes(cols, 1, 2) @ (w[:, :, None] * cols)
    gamma = 0.5 * (gamma + np.swapaxes(gamma, 1, 2))
    try:
        nu = symplectic_spectra(gamma)
    except InvariantViolation:
        for j, i in enumerate(indices):
            try:
                symplectic_spectra(gamma[j : j + 1])
            except InvariantViolation as exc:
                raise InvariantViolation(f"sample {i}: {exc}") from exc
        raise
    if m == n:
        # the reduction is the global pure state
        bad = np.flatnonzero(np.max(nu, axis=1) - 1.0 > 1e-6)
        if bad.size:
            raise InvariantViolation(f"sample {indices[bad[0]]}: global state is not pure")
        nu = np.ones_like(nu)
    nu2 = nu**2
    inv_sym = np.ones((nu.shape[0], 1))
    for k in range(m):
        # running elementary symmetric polynomials of nu^2
        shifted = np.concatenate([inv_sym, np.zeros((nu.shape[0], 1))], axis=1)
        shifted[:, 1:] += inv_sym * nu2[:, k : k + 1]
        inv_sym = shifted
    return {
        "total_energy": np.sum(2.0 + excess, axis=1),
        "inv_purity": np.prod(nu2, axis=1),
        "entropy": np.sum(entropic_h(nu, base=cfg.base), axis=1),
        "nu": nu,
        "invariants": inv_sym[:, 1:],
    }


def draw_sample(cfg, index, *, check=False, return_state=False):
    """Draw sample ``index`` of the ensemble and reduce it to the first ``m`` modes.

    With ``return_state`` the per-mode energies and the full unitary are
    returned as well.
    """
    x, g = _raw_draw(cfg, index)
    mode = "all" if check else "none"
    out = _process(replace(cfg, check=mode), [index], x[None], g[None])
    sample = EnsembleSample(
        index=index,
        total_energy=float(out["total_energy"][0]),
        inv_purity=float(out["inv_purity"][0]),
        entropy=float(out["entropy"][0]),
        nu=out["nu"][0],
        invariants=out["invariants"][0],
    )
    if return_state:
        return sample, 2.0 + x, haar_from_ginibre(g)
    return sample


def _should_check(cfg, index):
    if cfg.check == "all":
        return True
    if cfg.check == "spot":
        return index % SPOT_CHECK_EVERY == 0
    return False


def _draw_chunk(cfg, indices):
    indices = list(indices)
    draws = [_raw_draw(cfg, i) for i in indices]
    excess = np.array([d[0] for d in draws]).reshape(len(indices), cfg.n)
    return _process(cfg, indices, excess, np.array([d[1] for d in draws]))


def _batches(indices, n):
    size = max(1, min(2048, 1_000_000 // (n * n)))
    return [indices[i : i + size] for i in range(0, len(indices), size)]


def jackknife_distance(values, target):
    """``(target - mean) / std`` with its leave-one-out jackknife standard error."""
    x = np.asarray(values, dtype=float)
    n = x.size
    mean = x.mean()
    std = x.std(ddof=1)
    stat = (target - mean) / std if std > 0 else math.inf
    if n < 3 or std == 0:
        return stat, math.nan
    s1, s2 = x.sum(), np.sum(x * x)
    loo_mean = (s1 - x) / (n - 1)
    loo_var = (s2 - x * x - (n - 1) * loo_mean**2) / (n - 2)
    loo = (target - loo_mean) / np.sqrt(loo_var)
    se = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return stat, se


def histogram(entropies, bins=DEFAULT_BINS, s_max=None):
    """Equal-width histogram of entropies over ``[0, s_max]``.

    Returns ``(edges, counts, density)``. Without ``s_max`` the largest sample
    sets the range.
    """
    x = np.asarray(entropies, dtype=float)
    if x.size == 0:
        raise ValueError("no entropies to histogram")
    top = float(s_max) if s_max is not None else float(x.max())
    if top <= 0:
        top = 1.0
    edges = np.linspace(0.0, top, int(bins) + 1)
    counts, _ = np.histogram(np.clip(x, 0.0, top), bins=edges)
    width = edges[1] - edges[0]
    density = counts / (x.size * width)
    return edges, counts, density


def summarize(cfg, entropy, inv_purity, bins=DEFAULT_BINS):
    n = entropy.size
    root = math.sqrt(n)
    s_max = cfg.s_max()
    distance = se_distance = None
    if s_max is not None:
        distance, se_distance = jackknife_distance(entropy, s_max)
    edges, counts, _ = histogram(entropy, bins=bins, s_max=s_max)
    a2 = inv_purity**2
    sd = lambda v: float(v.std(ddof=1)) if v.size > 1 else 0.0  # noqa: E731
    return EnsembleSummary(
        samples=n,
        mean_entropy=float(entropy.mean()),
        std_entropy=sd(entropy),
        se_entropy=sd(entropy) / root,
        mean_inv_purity=float(inv_purity.mean()),
        std_inv_purity=sd(inv_purity),
        se_inv_purity=sd(inv_purity) / root,
        mean_inv_purity2=float(a2.mean()),
        se_inv_purity2=sd(a2) / root,
        s_max=s_max,
        distance_to_max=distance,
        se_distance_to_max=se_distance,
        hist_edges=edges.tolist(),
        hist_counts=counts.astype(int).tolist(),
    )


def run_ensemble(cfg, *, workers=1, bins=DEFAULT_BINS):
    """Sample ``cfg.samples`` states and summarise the reduced-state statistics.

    Sample ``i`` depends only on ``(cfg.seed, i)``, so the result does not
    depend on ``workers`` or on the batching.
    """
    indices = list(range(cfg.samples))
    batches = _batches(indices, cfg.n)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_draw_chunk, [cfg] * len(batches), batches))
    else:
        parts = [_draw_chunk(cfg, b) for b in batches]
    merged = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}
    logger.debug("ensemble %s: %d samples", cfg.to_dict(), cfg.samples)
    return EnsembleResult(
        config=cfg,
        summary=summarize(cfg, merged["entropy"], merged["inv_purity"], bins=bins),
        index=np.arange(cfg.samples),
        **merged,
    )


def point_seed(seed, *key):
    """Independent seed for one grid point of a scan."""
    return int(np.random.SeedSequence([int(seed), *map(int, key)]).generate_state(1)[0])


def _measure_for(n, energy_per_mode=None, temperature=None):
    if (energy_per_mode is None) == (temperature is None):
        raise ValueError("give exactly one of energy_per_mode or temperature")
    if energy_per_mode is not None:
        return MicrocanonicalConfig(n, energy_per_mode * n)
    return CanonicalConfig(n, temperature)


def _parameter_tag(energy_per_mode, temperature):
    if (energy_per_mode is None) == (temperature is None):
        raise ValueError("give exactly one of energy_per_mode or temperature")
    if energy_per_mode is not None:
        return (0, int(round(1e6 * energy_per_mode)))
    return (1, int(round(1e6 * temperature)))


def _var_over_mean_se(x):
    # jackknife standard error of var/mean
    n = x.size
    s1, s2 = x.sum(), np.sum(x * x)
    loo_mean = (s1 - x) / (n - 1)
    loo_var = (s2 - x * x - (n - 1) * loo_mean**2) / (n - 2)
    loo = loo_var / loo_mean
    return math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))


def concentration_scan(
    ns,
    *,
    energy_per_mode=None,
    temperature=None,
    m=1,
    m_ratio=None,
    samples=1500,
    seed=0,
    base=2,
    workers=1,
):
    """Variance-to-mean ratio of the entropy against ``n`` and its log-log fit.

    With ``m_ratio`` the subsystem grows as ``max(1, round(m_ratio n))`` and
    ``var / mean^2`` is reported as well.

    Returns
    -------
    dict
        ``rows`` (one per ``n``) and ``fit`` with slope, intercept and their
        standard errors from a least-squares fit of ``log(var/mean)`` on ``log n``.
    """
    rows = []
    # scans at different energies or temperatures use independent streams
    tag = _parameter_tag(energy_per_mode, temperature)
    for n in ns:
        mm = max(1, int(round(m_ratio * n))) if m_ratio is not None else m
        cfg = EnsembleConfig(
            _measure_for(int(n), energy_per_mode, temperature),
            m=mm,
            samples=samples,
            seed=point_seed(seed, *tag, n, mm),
            base=base,
        )
        s = run_ensemble(cfg, workers=workers).entropy
        mean, var = float(s.mean()), float(s.var(ddof=1))
        rows.append(
            {
                "n": int(n),
                "m": mm,
                "mean": mean,
                "var": var,
                "var_over_mean": var / mean,
                "se_var_over_mean": _var_over_mean_se(s),
                "var_over_mean2": var / mean**2,
            }
        )
    log_n = np.log([r["n"] for r in rows])
    log_r = np.log([r["var_over_mean"] for r in rows])
    if len(rows) >= 3:
        coef, cov = np.polyfit(log_n, log_r, 1, cov=True)
        errs = np.sqrt(np.diag(cov))
    else:
        coef = np.polyfit(log_n, log_r, 1)
        errs = (math.nan, math.nan)
    fit = {
        "slope": float(coef[0]),
        "intercept": float(coef[1]),
        "se_slope": float(errs[0]),
        "se_intercept": float(errs[1]),
    }
    return {"rows": rows, "fit": fit}


def mdep_scan(ns, ms, *, energy_per_mode, samples=5000, seed=0, base=2, workers=1):
    """Mean and spread of the entropy against the subsystem size ``m``."""
    rows = []
    for n in ns:
        for m in ms:
            if m > n:
                continue
            cfg = EnsembleConfig(
                MicrocanonicalConfig(int(n), energy_per_mode * n),
                m=int(m),
                samples=samples,
                seed=point_seed(seed, *_parameter_tag(energy_per_mode, None), n, m),
                base=base,
            )
            summ = run_ensemble(cfg, workers=workers).summary
            rows.append(
                {
                    "n": int(n),
                    "m": int(m),
                    "mean": summ.mean_entropy,
                    "std": summ.std_entropy,
                    "se": summ.se_entropy,
                    "s_max": summ.s_max,
                }
            )
    return rows
