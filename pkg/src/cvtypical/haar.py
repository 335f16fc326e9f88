"""Haar-random compact symplectics and pure-state covariance matrices."""
from __future__ import annotations

import numpy as np

from .rng import as_generator
from .validation import InvariantViolation, check_energies, check_positive_int

__all__ = [
    "ginibre",
    "haar_from_ginibre",
    "sample_haar_unitary",
    "unitary_to_ortho_symplectic",
    "squeezing_from_energy",
    "assemble_pure_cm",
    "assemble_reduced_cm",
]

TOL_UNITARY = 1e-9


def ginibre(n, k, rng):
    """``n x k`` matrix of i.i.d. standard complex normals."""
    return (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / np.sqrt(2.0)


def haar_from_ginibre(g):
    """QR of (a stack of) Ginibre matrices with the R-diagonal phases removed.

    Each column of ``Q`` is multiplied by the phase of the matching diagonal
    entry of ``R``; plain QR output is not Haar distributed.
    """
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    absd = np.abs(d)
    phases = np.where(absd > 0, d / np.where(absd > 0, absd, 1.0), 1.0)
    return q * phases[..., None, :]


def sample_haar_unitary(n, rng=None, *, columns=None):
    """Draw a Haar-distributed ``n x n`` unitary via Ginibre + phase-fixed QR.

    Parameters
    ----------
    n : int
    rng : Generator, int or None
    columns : int, optional
        Return only the first ``columns`` columns. They are distributed as the
        leading columns of a Haar unitary and cost ``O(n columns^2)``.
    """
    n = check_positive_int(n, "n")
    k = n if columns is None else check_positive_int(columns, "columns")
    if k > n:
        raise ValueError(f"columns={k} exceeds n={n}")
    return haar_from_ginibre(ginibre(n, k, as_generator(rng)))


def _check_unitary(u):
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvariantViolation(f"unitary must be square, got shape {u.shape}")
    x, y = u.real, u.imag
    n = u.shape[0]
    d1 = np.max(np.abs(x.T @ x + y.T @ y - np.eye(n)))
    d2 = np.max(np.abs(x.T @ y - y.T @ x))
    if d1 > TOL_UNITARY or d2 > TOL_UNITARY:
        raise InvariantViolation(f"matrix is not unitary (defects {d1:.3g}, {d2:.3g})")
    return x, y


def unitary_to_ortho_symplectic(u, *, check=True):
    """Map ``U = X + iY`` in ``U(n)`` to ``[[X, Y], [-Y, X]]`` in ``K(n)``."""
    if check:
        x, y = _check_unitary(u)
    else:
        u = np.asarray(u)
        x, y = u.real, u.imag
    return np.block([[x, y], [-y, x]])


def squeezing_from_energy(e):
    """Squeezing ``z >= 1`` with ``z^2 + z^-2 = e``; vectorised."""
    e = np.asarray(e, dtype=float)
    if np.any(e < 2.0):
        raise ValueError("mode energy must be >= 2 (vacuum)")
    z = np.sqrt((e + np.sqrt(e * e - 4.0)) / 2.0)
    return float(z) if z.ndim == 0 else z


def _squeezing_diagonal(energies):
    e = check_energies(energies)
    x = e - 2.0
    # z^2 = (e + sqrt(e^2 - 4)) / 2 with e^2 - 4 = x (x + 4), stable near vacuum
    z2 = 1.0 + 0.5 * (x + np.sqrt(x * (x + 4.0)))
    return np.concatenate([z2, 1.0 / z2])


def assemble_pure_cm(energies, ortho):
    """Pure-state covariance matrix ``O^T Z^2 O`` for per-mode energies ``E``."""
    w = _squeezing_diagonal(energies)
    ortho = np.asarray(ortho, dtype=float)
    if ortho.shape != (w.size, w.size):
        raise ValueError(
            f"orthosymplectic shape {ortho.shape} does not match {w.size // 2} modes"
        )
    sigma = ortho.T @ (w[:, None] * ortho)
    return 0.5 * (sigma + sigma.T)


def assemble_reduced_cm(energies, ortho_columns):
    """Reduced covariance matrix from the selected columns of ``O`` only.

    ``ortho_columns`` holds the columns ``{i} + {i + n}`` of ``O`` for the kept
    modes, so the result equals ``reduce(assemble_pure_cm(E, O), modes)``.
    """
    w = _squeezing_diagonal(energies)
    cols = np.asarray(ortho_columns, dtype=float)
    if cols.shape[0] != w.size:
        raise ValueError("column block does not match the energy vector")
    gamma = cols.T @ (w[:, None] * cols)
    return 0.5 * (gamma + gamma.T)


def squeezing_diagonals(excess):
    """Rows ``(z_1^2..z_n^2, z_1^-2..z_n^-2)`` from energies above the vacuum, shape ``(k, n)``."""
    x = np.asarray(excess, dtype=float)
    z2 = 1.0 + 0.5 * (x + np.sqrt(x * (x + 4.0)))
    return np.concatenate([z2, 1.0 / z2], axis=-1)
