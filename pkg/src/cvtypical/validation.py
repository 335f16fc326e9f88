"""Input validation helpers and shared tolerances."""
from __future__ import annotations

import math
import numbers

import numpy as np

TOL_SYM = 1e-9
TOL_UNC = 1e-7


class InvariantViolation(ValueError):
    """A matrix or sample violates a physical or structural invariant."""


class InfeasibleProgram(RuntimeError):
    """The moment constraints of a bounding program admit no distribution."""


def check_log_base(base):
    """Normalise a log base: ``2``, ``"2"``, ``"e"`` or ``math.e``."""
    if isinstance(base, str):
        base = base.strip().lower()
        if base == "e":
            return "e"
        if base == "2":
            return 2
    elif isinstance(base, numbers.Real):
        if base == 2:
            return 2
        if base == math.e:
            return "e"
    raise ValueError(f"log base must be 2 or 'e', got {base!r}")


def log_factor(base):
    """Factor converting natural logs to ``base``."""
    return 1.0 / math.log(2.0) if check_log_base(base) == 2 else 1.0


def check_covariance(sigma, *, physical=True, tol_sym=TOL_SYM):
    """Validate a covariance matrix and return it as a float array.

    Parameters
    ----------
    sigma : array_like
        Candidate ``2n x 2n`` matrix.
    physical : bool, default True
        Also require positive definiteness and symplectic eigenvalues
        no smaller than ``1 - TOL_UNC``.
    tol_sym : float
        Maximum allowed ``|sigma_ij - sigma_ji|``.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise InvariantViolation(f"covariance matrix must be square, got shape {sigma.shape}")
    if sigma.shape[0] == 0 or sigma.shape[0] % 2:
        raise InvariantViolation(f"covariance matrix must be 2n x 2n, got {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise InvariantViolation("covariance matrix has non-finite entries")
    asym = float(np.max(np.abs(sigma - sigma.T)))
    if asym > tol_sym:
        raise InvariantViolation(f"covariance matrix not symmetric (defect {asym:.3g})")
    sigma = 0.5 * (sigma + sigma.T)
    if physical:
        from .symplectic import symplectic_eigenvalues

        symplectic_eigenvalues(sigma, check=True)
    return sigma


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_energies(energies):
    """Per-mode energies as a 1-d float array, each at least the vacuum value 2."""
    e = np.atleast_1d(np.asarray(energies, dtype=float))
    if e.ndim != 1 or e.size == 0:
        raise ValueError("energy vector must be a non-empty 1-d array")
    if np.any(e < 2.0) or not np.all(np.isfinite(e)):
        raise ValueError("per-mode energies must be finite and >= 2 (vacuum)")
    return e
