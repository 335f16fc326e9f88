"""Closed-form statistics of single-mode entanglement and extremal values.

``a`` denotes the inverse squared purity ``mu^-2 = det(gamma)`` of a one-mode
reduction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .measures import CanonicalConfig, MicrocanonicalConfig
from .symplectic import entropic_h
from .validation import check_energies

__all__ = [
    "MomentPair",
    "page_entropy",
    "haar_invpurity_moments",
    "canonical_invpurity_moments",
    "microcanonical_invpurity_moments",
    "max_inv_purity",
    "max_entropy",
    "max_subsystem_entropy",
    "asymptotic_entropy",
    "asymptotic_invariant",
    "entropy_from_purity",
    "entropy_from_inv_purity",
]


@dataclass(frozen=True)
class MomentPair:
    """First and second moment of ``a = mu^-2``."""

    mean_a: float
    mean_a2: float

    @property
    def variance(self):
        return max(self.mean_a2 - self.mean_a**2, 0.0)

    @property
    def std(self):
        return math.sqrt(self.variance)

    def distance_to(self, value):
        """How many standard deviations ``value`` lies above the mean."""
        return (value - self.mean_a) / self.std


def page_entropy(m, n):
    """Mean entanglement entropy (nats) of an ``m x n`` random pure state, ``m <= n``."""
    m, n = int(m), int(n)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return math.fsum(1.0 / k for k in range(n + 1, m * n + 1)) - (m - 1) / (2.0 * n)


def _distinct_sums(e):
    """Sums over distinct ordered index tuples, via power sums."""
    p1, p2, p3, p4 = (float(np.sum(e**k)) for k in (1, 2, 3, 4))
    s11 = p1 * p1 - p2
    s22 = p2 * p2 - p4
    s211 = p2 * p1 * p1 - p2 * p2 - 2.0 * p3 * p1 + 2.0 * p4
    s1111 = p1**4 - 6.0 * p1 * p1 * p2 + 3.0 * p2 * p2 + 8.0 * p1 * p3 - 6.0 * p4
    return p2, s11, s22, s211, s1111


def haar_invpurity_moments(energies):
    """Haar averages of ``a`` and ``a^2`` for fixed per-mode energies.

    Sums over distinct indices are reduced to power sums, so evaluation is
    ``O(n)``.
    """
    e = check_energies(energies)
    n = e.size
    if n == 1:
        return MomentPair(1.0, 1.0)
    p2, s11, s22, s211, s1111 = _distinct_sums(e)
    mean_a = s11 / (4.0 * (n + 1) * n) + 2.0 / (n + 1)
    bracket = (
        s1111
        + 8.0 * s211
        + 12.0 * s22
        + (96.0 + 16.0 * (n - 2)) * s11
        - 32.0 * (n - 1) * p2
        + 128.0 * n * (n - 1)
        + 384.0 * n
    )
    # (n-1)!/(n+3)! as an explicit product
    mean_a2 = bracket / (16.0 * n * (n + 1) * (n + 2) * (n + 3))
    return MomentPair(mean_a, mean_a2)


def canonical_invpurity_moments(cfg):
    """Canonical averages of ``a`` and ``a^2`` at ``n`` modes and temperature ``T``.

    The quartic for ``a^2`` is the exact exponential-law average of the Haar
    moments; its cubic coefficient is ``8 (n + 1)(n + 6)``.
    """
    if not isinstance(cfg, CanonicalConfig):
        raise TypeError("expected a CanonicalConfig")
    n, t = cfg.n, float(cfg.temperature)
    mean_a = 0.25 * (n - 1) / (n + 1) * (t * t + 4.0 * t) + 1.0
    poly = (
        (n * n + 11 * n + 22) * t**4
        + 8.0 * (n + 1) * (n + 6) * t**3
        + 8.0 * (3 * n * n + 15 * n + 10) * t**2
        + 32.0 * (n + 3) * (n + 2) * t
    )
    # n!(n-1)/(n+3)!
    pref = (n - 1) / (16.0 * (n + 1) * (n + 2) * (n + 3))
    return MomentPair(mean_a, pref * poly + 1.0)


def microcanonical_invpurity_moments(cfg):
    """Micro-canonical averages of ``a`` and ``a^2`` for ``n`` modes and energy ``E``."""
    if not isinstance(cfg, MicrocanonicalConfig):
        raise TypeError("expected a MicrocanonicalConfig")
    n, x = cfg.n, cfg.excess
    mean_a = (n - 1) / (4.0 * (n + 2) * (n + 1) ** 2) * (x * x + 4.0 * (n + 2) * x) + 1.0
    poly = (
        (n * n + 11 * n + 22) * x**4
        + 8.0 * (n + 6) * (n + 4) * (n + 1) * x**3
        + 8.0 * (n + 4) * (n + 3) * (3 * n * n + 15 * n + 10) * x**2
        + 32.0 * (n + 4) * (n + 3) ** 2 * (n + 2) ** 2 * x
    )
    # (n!)^2 (n-1) / ((n+4)! (n+3)!)
    rising3 = (n + 1) * (n + 2) * (n + 3)
    pref = (n - 1) / (16.0 * rising3 * rising3 * (n + 4))
    return MomentPair(mean_a, pref * poly + 1.0)


def max_inv_purity(excess):
    """Largest ``a`` of one mode when the energy above the vacuum is ``excess``."""
    if excess < 0:
        raise ValueError(f"excess energy must be >= 0, got {excess}")
    return (excess + 4.0) ** 2 / 16.0


def max_entropy(m, n, energy, base=2):
    """Largest entropy of ``m`` modes entangled with ``n >= m`` others at total energy ``E``.

    The optimum is ``m`` equal two-mode squeezed pairs with the remaining
    ``n - m`` modes in the vacuum; the system has ``m + n`` modes in total.
    """
    m, n = int(m), int(n)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    nu = (energy - 2.0 * (n - m)) / (4.0 * m)
    if nu < 1.0:
        raise ValueError(f"energy {energy} is below the vacuum energy {2 * (n + m)}")
    return m * entropic_h(nu, base=base)


def max_subsystem_entropy(m, n_total, energy, base=2):
    """Largest entropy of an ``m``-mode part of an ``n_total``-mode pure state.

    The smaller side of the bipartition fixes the optimum.
    """
    k = min(int(m), int(n_total) - int(m))
    if k == 0:
        return 0.0
    return max_entropy(k, int(n_total) - k, energy, base=base)


def asymptotic_entropy(m, temperature, base=2):
    """Thermodynamic-limit mean entropy of ``m`` modes, ``m h(1 + T/2)``."""
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    return m * entropic_h(1.0 + temperature / 2.0, base=base)


def asymptotic_invariant(d, m, temperature):
    """Thermodynamic-limit mean of the ``d``-th invariant of ``m`` modes."""
    d, m = int(d), int(m)
    if not 1 <= d <= m:
        raise ValueError(f"need 1 <= d <= m, got d={d}, m={m}")
    return float(comb(m, d, exact=True)) * (1.0 + temperature / 2.0) ** (2 * d)


def entropy_from_purity(mu, base=2):
    """Entropy ``h(1/mu)`` of a single-mode Gaussian state of purity ``mu``."""
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0) or np.any(mu > 1):
        raise ValueError("purity must lie in (0, 1]")
    return entropic_h(1.0 / mu, base=base)


def entropy_from_inv_purity(a, base=2):
    """Entropy ``h(sqrt(a))`` of a single mode with ``a = mu^-2 >= 1``."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 1.0):
        raise ValueError("inverse squared purity must be >= 1")
    return entropic_h(np.sqrt(a), base=base)
