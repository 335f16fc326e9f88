"""Micro-canonical and canonical measures on the decoupled mode energies.

Energies are in units of ``hbar omega / 4``; a vacuum mode has energy 2.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .rng import as_generator
from .validation import check_positive_int

__all__ = [
    "MicrocanonicalConfig",
    "CanonicalConfig",
    "config_from_dict",
    "sample_mc_energies",
    "sample_can_energies",
    "mc_marginal_density",
    "mc_normalization",
]


@dataclass(frozen=True)
class MicrocanonicalConfig:
    """Flat measure on per-mode energies with total energy at most ``energy``."""

    n: int
    energy: float

    def __post_init__(self):
        check_positive_int(self.n, "n")
        if not math.isfinite(self.energy) or self.energy < 2 * self.n:
            raise ValueError(
                f"total energy {self.energy} below the vacuum energy {2 * self.n}"
            )

    @property
    def excess(self):
        """Energy above the vacuum, ``E - 2n``."""
        return float(self.energy) - 2.0 * self.n

    def to_dict(self):
        return {"measure": "microcanonical", "n": self.n, "E": float(self.energy)}


@dataclass(frozen=True)
class CanonicalConfig:
    """I.i.d. Boltzmann per-mode energies at temperature ``temperature``."""

    n: int
    temperature: float

    def __post_init__(self):
        check_positive_int(self.n, "n")
        if not (self.temperature > 0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be > 0, got {self.temperature}")

    def to_dict(self):
        return {"measure": "canonical", "n": self.n, "T": float(self.temperature)}


def config_from_dict(data):
    """Build a measure config from ``{measure, n, E | T}``; extra keys are ignored."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    measure = data.get("measure")
    if measure == "microcanonical":
        return MicrocanonicalConfig(int(data["n"]), float(data["E"]))
    if measure == "canonical":
        return CanonicalConfig(int(data["n"]), float(data["T"]))
    raise ValueError(f"unknown measure {measure!r}")


def _excess_mc(cfg, rng):
    g = rng.standard_exponential(cfg.n + 1)
    return cfg.excess * g[:-1] / g.sum()


def _excess_can(cfg, rng):
    return cfg.temperature * rng.standard_exponential(cfg.n)


def sample_excess(cfg, rng=None):
    """Per-mode energies above the vacuum, ``E_j - 2``."""
    rng = as_generator(rng)
    if isinstance(cfg, MicrocanonicalConfig):
        return _excess_mc(cfg, rng)
    if isinstance(cfg, CanonicalConfig):
        return _excess_can(cfg, rng)
    raise TypeError(f"unsupported measure config {cfg!r}")


def sample_mc_energies(cfg, rng=None):
    """Per-mode energies uniform on ``{E_j >= 2, sum_j E_j <= E}``.

    Uses ``n + 1`` unit exponentials normalised by their sum; dropping the last
    coordinate projects the uniform boundary simplex onto the solid one.
    """
    return 2.0 + _excess_mc(cfg, as_generator(rng))


def sample_can_energies(cfg, rng=None):
    """Per-mode energies ``2 + T * Exp(1)``, independent across modes."""
    return 2.0 + _excess_can(cfg, as_generator(rng))


def mc_marginal_density(e_j, cfg):
    """Marginal density of one mode energy under the micro-canonical measure."""
    e_j = np.asarray(e_j, dtype=float)
    if np.any(e_j < 2.0):
        raise ValueError("mode energy must be >= 2")
    n, excess = cfg.n, cfg.excess
    if excess <= 0:
        raise ValueError("degenerate measure (E = 2n) has no density")
    u = (e_j - 2.0) / excess
    dens = np.where(u <= 1.0, (n / excess) * np.clip(1.0 - u, 0.0, None) ** (n - 1), 0.0)
    return float(dens) if dens.ndim == 0 else dens


def mc_cdf(e_j, cfg):
    """Marginal CDF of one mode energy, ``1 - (1 - (E_j - 2)/(E - 2n))^n``."""
    u = np.clip((np.asarray(e_j, dtype=float) - 2.0) / cfg.excess, 0.0, 1.0)
    return 1.0 - (1.0 - u) ** cfg.n


def mc_normalization(cfg):
    """Inverse volume ``n! / (E - 2n)^n`` of the allowed energy region."""
    if cfg.excess <= 0:
        raise ZeroDivisionError("energy region has zero volume (E = 2n)")
    return math.exp(math.lgamma(cfg.n + 1) - cfg.n * math.log(cfg.excess))
