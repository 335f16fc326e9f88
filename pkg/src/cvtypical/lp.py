"""Rigorous bounds on the mean single-mode entropy from two moments of ``mu^-2``.

The interval ``[a_min, a_max]`` of possible inverse squared purities is cut into
``M`` equal bins. Any distribution with the known first and second moments
induces bin weights that satisfy four linear inequalities built from the bin
endpoints; maximising (minimising) the entropy of the right (left) endpoints
over all such weights bounds the true mean entropy from above (below).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analytics import entropy_from_inv_purity, max_inv_purity
from .measures import MicrocanonicalConfig
from .validation import InfeasibleProgram, check_log_base, check_positive_int

__all__ = [
    "Discretization",
    "MomentConstraints",
    "BoundResult",
    "LinearProgramResult",
    "simplex_standard_form",
    "exact_mc_moments",
    "solve_bounds_from_moments",
    "solve_entropy_bounds",
]

FEAS_TOL = 1e-9
BLAND_AFTER = 50


@dataclass(frozen=True)
class Discretization:
    """``M`` equal bins over ``[a_min, a_max]``; ``edges[k]`` is ``l(k)``."""

    n_bins: int
    a_max: float
    a_min: float = 1.0

    def __post_init__(self):
        check_positive_int(self.n_bins, "n_bins", minimum=2)
        if not self.a_max > self.a_min:
            raise ValueError(f"need a_max > a_min, got [{self.a_min}, {self.a_max}]")

    @property
    def edges(self):
        k = np.arange(self.n_bins + 1)
        return self.a_min + k * (self.a_max - self.a_min) / self.n_bins


@dataclass(frozen=True)
class MomentConstraints:
    """Outward-rounded brackets ``[lo, hi]`` on ``E[a]`` and ``E[a^2]``."""

    a_lo: float
    a_hi: float
    a2_lo: float
    a2_hi: float

    @classmethod
    def from_values(cls, a, a2):
        a, a2 = _as_fraction(a), _as_fraction(a2)
        return cls(_round_down(a), _round_up(a), _round_down(a2), _round_up(a2))


@dataclass
class LinearProgramResult:
    status: str
    x: np.ndarray | None = None
    objective: float = math.nan
    dual: np.ndarray | None = None
    duality_gap: float = math.nan
    dual_infeasibility: float = math.nan
    iterations: int = 0


@dataclass
class BoundResult:
    """Lower and upper bound on the mean entropy, in ``base`` units."""

    lower: float
    upper: float
    feasible: bool
    n_bins: int
    base: object = 2
    active_bins: dict = field(default_factory=dict)
    duality_gap: float = math.nan

    def to_dict(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "feasible": self.feasible,
            "M": self.n_bins,
            "log_base": str(self.base),
            "active_bins": {k: [int(i) for i in v] for k, v in self.active_bins.items()},
            "duality_gap": self.duality_gap,
        }


def _as_fraction(v):
    return v if isinstance(v, Fraction) else Fraction(v)


def _round_down(fr):
    v = float(fr)
    return float(np.nextafter(v, -np.inf)) if Fraction(v) > fr else v


def _round_up(fr):
    v = float(fr)
    return float(np.nextafter(v, np.inf)) if Fraction(v) < fr else v


def exact_mc_moments(cfg):
    """Micro-canonical ``E[a]`` and ``E[a^2]`` of one mode as exact fractions."""
    n = cfg.n
    x = Fraction(cfg.energy) - 2 * n
    a = Fraction(n - 1, 4 * (n + 2) * (n + 1) ** 2) * (x * x + 4 * (n + 2) * x) + 1
    poly = (
        (n * n + 11 * n + 22) * x**4
        + 8 * (n + 6) * (n + 4) * (n + 1) * x**3
        + 8 * (n + 4) * (n + 3) * (3 * n * n + 15 * n + 10) * x**2
        + 32 * (n + 4) * (n + 3) ** 2 * (n + 2) ** 2 * x
    )
    r3 = (n + 1) * (n + 2) * (n + 3)
    a2 = Fraction(n - 1, 16 * r3 * r3 * (n + 4)) * poly + 1
    return a, a2


def simplex_standard_form(c, a_eq, b_eq, *, tol=FEAS_TOL, max_iter=None):
    """Maximise ``c x`` subject to ``A x = b``, ``x >= 0`` with a revised simplex.

    Meant for programs with few rows and many columns: the basis is a small
    dense matrix and each iteration prices every column once. The entering
    column has the largest reduced cost; after ``BLAND_AFTER`` consecutive
    degenerate pivots Bland's rule (lowest eligible index enters, lowest index
    leaves on ties) takes over until progress resumes, which rules out
    cycling. Phase one uses one artificial variable per row.
    """
    c = np.asarray(c, dtype=float)
    a = np.asarray(a_eq, dtype=float).copy()
    b = np.asarray(b_eq, dtype=float).copy()
    rows, cols = a.shape
    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0
    if max_iter is None:
        max_iter = 50 * (rows + cols)

    # phase one: artificials occupy columns cols..cols+rows-1
    full = np.hstack([a, np.eye(rows)])
    basis = list(range(cols, cols + rows))
    cost1 = np.concatenate([np.zeros(cols), -np.ones(rows)])
    status, basis, x_b, it1 = _simplex_loop(
        full, b, cost1, basis, allowed=cols + rows, tol=tol, max_iter=max_iter
    )
    if status != "optimal":
        return LinearProgramResult(status, iterations=it1)
    infeas = sum(x_b[i] for i, j in enumerate(basis) if j >= cols)
    if infeas > tol * max(1.0, float(np.max(np.abs(b)))):
        return LinearProgramResult("infeasible", iterations=it1)

    # drive zero-level artificials out of the basis; drop redundant rows
    keep_rows = list(range(rows))
    for r in range(rows):
        if basis[r] < cols:
            continue
        bmat = full[:, basis]
        row = np.linalg.solve(bmat.T, np.eye(rows)[r])
        candidates = [j for j in range(cols) if j not in basis and abs(row @ full[:, j]) > tol]
        if candidates:
            basis[r] = candidates[0]
        else:
            keep_rows.remove(r)
    if len(keep_rows) < rows:
        full = full[keep_rows]
        b = b[keep_rows]
        basis = [basis[r] for r in keep_rows]
        rows = len(keep_rows)
    a2 = full[:, :cols]
    status, basis, x_b, it2 = _simplex_loop(a2, b, c, basis, allowed=cols, tol=tol, max_iter=max_iter)
    if status != "optimal":
        return LinearProgramResult(status, iterations=it1 + it2)
    x = np.zeros(cols)
    x[basis] = x_b
    bmat = a2[:, basis]
    y = np.linalg.solve(bmat.T, c[basis])
    primal = float(c @ x)
    dual = float(b @ y)
    reduced = c - a2.T @ y
    return LinearProgramResult(
        "optimal",
        x=x,
        objective=primal,
        dual=y,
        duality_gap=abs(primal - dual),
        dual_infeasibility=max(float(np.max(reduced)), 0.0),
        iterations=it1 + it2,
    )


def _simplex_loop(a, b, cost, basis, *, allowed, tol, max_iter):
    rows = a.shape[0]
    basis = list(basis)
    stalled = 0
    for it in range(max_iter):
        bmat = a[:, basis]
        x_b = np.linalg.solve(bmat, b)
        y = np.linalg.solve(bmat.T, cost[basis])
        reduced = cost[:allowed] - a[:, :allowed].T @ y
        reduced[basis] = 0.0
        eligible = np.flatnonzero(reduced > tol)
        if eligible.size == 0:
            return "optimal", basis, x_b, it
        if stalled < BLAND_AFTER:
            enter = int(eligible[np.argmax(reduced[eligible])])
        else:
            enter = int(eligible[0])
        d = np.linalg.solve(bmat, a[:, enter])
        pos = d > tol
        if not np.any(pos):
            return "unbounded", basis, x_b, it
        ratios = np.full(rows, np.inf)
        ratios[pos] = np.maximum(x_b[pos], 0.0) / d[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, best))
        leave = min(ties, key=lambda r: basis[r])
        stalled = stalled + 1 if best <= tol else 0
        basis[leave] = enter
    return "iteration_limit", basis, None, max_iter


def _bin_program(disc, moments):
    l = disc.edges
    lo, hi = l[:-1], l[1:]
    m = disc.n_bins
    # columns: M bin weights, then slacks for the four inequalities
    a = np.zeros((5, m + 4))
    a[0, :m], a[0, m] = hi, -1.0          # sum l(k+1) w >= a_lo
    a[1, :m], a[1, m + 1] = lo, 1.0       # sum l(k) w <= a_hi
    a[2, :m], a[2, m + 2] = hi**2, -1.0   # sum l(k+1)^2 w >= a2_lo
    a[3, :m], a[3, m + 3] = lo**2, 1.0    # sum l(k)^2 w <= a2_hi
    a[4, :m] = 1.0
    b = np.array([moments.a_lo, moments.a_hi, moments.a2_lo, moments.a2_hi, 1.0])
    return a, b, lo, hi


def solve_bounds_from_moments(a_mean, a2_mean, disc, base=2, *, tol=FEAS_TOL):
    """Entropy bounds for any distribution on ``[a_min, a_max]`` with given moments."""
    base = check_log_base(base)
    moments = (
        a_mean if isinstance(a_mean, MomentConstraints)
        else MomentConstraints.from_values(a_mean, a2_mean)
    )
    a, b, lo, hi = _bin_program(disc, moments)
    m = disc.n_bins
    pad = np.zeros(4)
    c_up = np.concatenate([entropy_from_inv_purity(hi, base=base), pad])
    c_lo = np.concatenate([entropy_from_inv_purity(lo, base=base), pad])
    upper = simplex_standard_form(c_up, a, b, tol=tol)
    lower = simplex_standard_form(-c_lo, a, b, tol=tol)
    if upper.status == "infeasible" or lower.status == "infeasible":
        return BoundResult(math.nan, math.nan, False, m, base)
    for res in (upper, lower):
        if res.status != "optimal":
            raise RuntimeError(f"bounding program failed: {res.status}")
    active = {
        "upper": np.flatnonzero(upper.x[:m] > tol),
        "lower": np.flatnonzero(lower.x[:m] > tol),
    }
    return BoundResult(
        lower=-lower.objective + 0.0,
        upper=upper.objective,
        feasible=True,
        n_bins=m,
        base=base,
        active_bins=active,
        duality_gap=max(upper.duality_gap, lower.duality_gap),
    )


def solve_entropy_bounds(cfg, n_bins=10_000, base=2, *, raise_infeasible=False):
    """Bounds on the micro-canonical mean entropy of one mode of ``cfg.n > 2`` modes."""
    if not isinstance(cfg, MicrocanonicalConfig):
        raise TypeError("expected a MicrocanonicalConfig")
    if cfg.n <= 2:
        raise ValueError("bounds need n > 2 so that the smallest mu^-2 is 1")
    base = check_log_base(base)
    if cfg.excess == 0:
        return BoundResult(0.0, 0.0, True, int(n_bins), base, {"upper": [0], "lower": [0]}, 0.0)
    a_max_exact = (Fraction(cfg.energy) - 2 * cfg.n + 4) ** 2 / 16
    a_max = _round_up(a_max_exact)
    assert a_max >= max_inv_purity(cfg.excess) * (1 - 1e-15)
    a, a2 = exact_mc_moments(cfg)
    result = solve_bounds_from_moments(
        MomentConstraints.from_values(a, a2), None, Discretization(int(n_bins), a_max), base
    )
    if not result.feasible and raise_infeasible:
        raise InfeasibleProgram(f"moment constraints infeasible for {cfg}")
    return result
