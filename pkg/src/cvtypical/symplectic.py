"""Symplectic linear algebra and entropic functionals on covariance matrices.

All covariance matrices use the xxpp ordering ``(x_1..x_n, p_1..p_n)`` and the
convention in which the single-mode vacuum has covariance matrix ``I_2``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm
from scipy.special import comb, xlogy

from .validation import (
    TOL_UNC,
    InvariantViolation,
    check_covariance,
    check_log_base,
    log_factor,
)

__all__ = [
    "symplectic_form",
    "symplectic_eigenvalues",
    "symplectic_spectra",
    "purity",
    "entropic_h",
    "von_neumann_entropy",
    "reduce",
    "energy",
    "symplectic_invariants",
    "charpoly_invariants",
    "entropy_from_invariants",
    "bch_displacement_matrix",
    "bch_displacement_quadrature",
]

# below this distance from 1 the entropic function switches to its series form
_H_SERIES_CUTOFF = 1e-8


def symplectic_form(n):
    """Return the ``2n x 2n`` symplectic form ``[[0, I], [-I, 0]]``."""
    n = int(n)
    if n < 1:
        raise ValueError(f"mode count must be >= 1, got {n}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_eigenvalues(sigma, *, check=True):
    """Symplectic spectrum of a covariance matrix, sorted descending.

    The values are obtained from the symmetric eigenproblem
    ``L^T (Omega^T sigma Omega) L`` with ``sigma = L L^T``, whose eigenvalues are
    the squared symplectic eigenvalues, each appearing twice.

    Parameters
    ----------
    sigma : array_like, shape (2n, 2n)
        Covariance matrix.
    check : bool, default True
        Validate symmetry and the uncertainty principle. Values within
        ``TOL_UNC`` below 1 are clamped to 1.

    Returns
    -------
    ndarray, shape (n,)
    """
    sigma = check_covariance(sigma, physical=False) if check else np.asarray(sigma, float)
    return symplectic_spectra(sigma[None], check=check)[0]


def symplectic_spectra(stack, *, check=True):
    """Symplectic spectra of a stack of covariance matrices, shape ``(k, 2n, 2n)``."""
    stack = np.asarray(stack, dtype=float)
    n = stack.shape[-1] // 2
    omega = symplectic_form(n)
    try:
        chol = np.linalg.cholesky(stack)
    except np.linalg.LinAlgError as exc:
        raise InvariantViolation("covariance matrix is not positive definite") from exc
    k = omega.T @ stack @ omega
    sym = np.swapaxes(chol, -1, -2) @ k @ chol
    sym = 0.5 * (sym + np.swapaxes(sym, -1, -2))
    lam = np.linalg.eigvalsh(sym)
    # eigenvalues come in degenerate pairs; average each pair
    nu2 = 0.5 * (lam[..., 0::2] + lam[..., 1::2])
    nu = np.sqrt(np.clip(nu2, 0.0, None))[..., ::-1]
    if check:
        low = float(np.min(nu))
        if low < 1.0 - TOL_UNC:
            raise InvariantViolation(
                f"symplectic eigenvalue {low!r} violates the uncertainty principle"
            )
        nu = np.maximum(nu, 1.0)
    return nu


def purity(sigma):
    """Purity ``1 / sqrt(det sigma)`` of a Gaussian state."""
    sigma = check_covariance(sigma, physical=False)
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise InvariantViolation("covariance matrix is not positive definite")
    mu = math.exp(-0.5 * logdet)
    if mu > 1.0 + TOL_UNC:
        raise InvariantViolation(f"det(sigma) < 1 (purity {mu!r}): unphysical state")
    return min(mu, 1.0)


def entropic_h(x, base=2):
    """Entropic function of a symplectic eigenvalue.

    ``h(x) = (x+1)/2 log((x+1)/2) - (x-1)/2 log((x-1)/2)``, with ``h(1) = 0``.
    Vectorised over ``x``; scalars in give a float out.
    """
    factor = log_factor(check_log_base(base))
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0) or np.any(np.isnan(x)):
        raise ValueError("entropic function requires x >= 1")
    eps = x - 1.0
    plus = (x + 1.0) / 2.0
    exact = xlogy(plus, plus) - xlogy(eps / 2.0, eps / 2.0)
    # leading terms of the expansion about x = 1
    half = eps / 2.0
    series = half - xlogy(half, half) + half**2 / 2.0
    out = np.where(eps < _H_SERIES_CUTOFF, series, exact) * factor
    return float(out) if out.ndim == 0 else out


def von_neumann_entropy(gamma, base=2):
    """Entropy ``sum_j h(nu_j)`` of a Gaussian state."""
    return float(np.sum(entropic_h(symplectic_eigenvalues(gamma), base=base)))


def reduce(sigma, modes):
    """Covariance matrix of the subsystem made of ``modes`` (0-based indices).

    The result keeps the xxpp ordering on the selected modes, in the order given.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0] // 2
    modes = [int(i) for i in modes]
    if not modes:
        raise ValueError("mode subset must be non-empty")
    if len(set(modes)) != len(modes):
        raise ValueError(f"mode subset has duplicates: {modes}")
    if min(modes) < 0 or max(modes) >= n:
        raise ValueError(f"mode subset {modes} out of range for {n} modes")
    idx = modes + [i + n for i in modes]
    return sigma[np.ix_(idx, idx)].copy()


def energy(sigma):
    """Energy ``tr(sigma)`` in units of ``hbar omega / 4`` (zero first moments)."""
    return float(np.trace(check_covariance(sigma, physical=False)))


def symplectic_invariants(gamma):
    """Elementary symmetric polynomials of the squared symplectic eigenvalues.

    Returns ``Delta_1 .. Delta_m`` as an array of length ``m``.
    """
    nu2 = symplectic_eigenvalues(gamma) ** 2
    # coefficients of prod (t + nu_k^2), highest power first
    coeffs = np.array([1.0])
    for v in nu2:
        coeffs = np.convolve(coeffs, [1.0, v])
    return coeffs[1:]


def charpoly_invariants(gamma):
    """Invariants read off the characteristic polynomial of ``Omega gamma``.

    ``det(t - Omega gamma) = sum_d Delta_d t^(2(m-d))``; only even-order
    coefficients are non-zero.
    """
    gamma = check_covariance(gamma, physical=False)
    m = gamma.shape[0] // 2
    coeffs = np.real(np.poly(symplectic_form(m) @ gamma))
    return coeffs[2::2].copy()


def entropy_from_invariants(delta, base=2, *, rtol=1e-6):
    """Recover the entropy from the symplectic invariants.

    The squared symplectic eigenvalues are the roots of
    ``t^m - Delta_1 t^(m-1) + Delta_2 t^(m-2) - ...``.

    Raises
    ------
    InvariantViolation
        If the polynomial has complex roots or roots below 1 beyond tolerance.
    """
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    m = delta.size
    signs = (-1.0) ** np.arange(1, m + 1)
    poly = np.concatenate([[1.0], signs * delta])
    roots = np.roots(poly)
    scale = max(1.0, float(np.max(np.abs(roots))))
    # clustered roots are ill-conditioned individually but their mean is not
    tol_cluster = 10.0 * np.finfo(float).eps ** (1.0 / m) * scale
    if np.any(np.abs(roots.imag) > max(tol_cluster, rtol * scale)):
        raise InvariantViolation(f"invariants {delta} give complex roots {roots}")
    roots = np.sort(roots.real)
    # forward error of each computed root; near-multiple roots have a tiny
    # derivative and hence an error estimate comparable to their spread
    eps = np.finfo(float).eps
    mag = np.polyval(np.abs(poly), np.abs(roots))
    slope = np.abs(np.polyval(np.polyder(poly), roots))
    err = eps * mag / np.maximum(slope, eps * mag)
    nu2 = roots.copy()
    start = 0
    for i in range(1, m + 1):
        if i == m or roots[i] - roots[i - 1] > 10.0 * (err[i] + err[i - 1]):
            nu2[start:i] = roots[start:i].mean()
            start = i
    if nu2[0] < 1.0 - max(TOL_UNC, tol_cluster):
        raise InvariantViolation(f"invariants {delta} give a root below 1: {nu2[0]!r}")
    nu = np.sqrt(np.maximum(nu2, 1.0))
    return float(np.sum(entropic_h(nu, base=base)))


def _check_symmetric_generator(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2:
        raise ValueError(f"expected a 2n x 2n matrix, got shape {a.shape}")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-9:
        raise ValueError("generator matrix must be symmetric")
    return 0.5 * (a + a.T)


def bch_displacement_matrix(a):
    """Matrix ``M`` moving the linear term past the quadratic one in ``G_{A,b}``.

    For invertible symmetric ``A``, ``M = 1/4 Omega A^-1 (I - exp(4 A Omega))``,
    which equals ``int_0^1 exp(4 t A Omega) dt``.

    Raises
    ------
    np.linalg.LinAlgError
        If ``A`` is singular or too badly conditioned; use
        :func:`bch_displacement_quadrature` instead.
    """
    a = _check_symmetric_generator(a)
    n = a.shape[0] // 2
    if np.linalg.cond(a) > 1e12:
        raise np.linalg.LinAlgError(
            "A is singular or ill-conditioned; use bch_displacement_quadrature"
        )
    omega = symplectic_form(n)
    gen = 4.0 * a @ omega
    return 0.25 * omega @ np.linalg.solve(a, np.eye(2 * n) - expm(gen))


def bch_displacement_quadrature(a, panels=10_000):
    """``int_0^1 exp(4 t A Omega) dt`` by composite Simpson's rule.

    Works for singular ``A``. The integrand is evaluated at the uniform nodes by
    repeated multiplication with a single step propagator.
    """
    a = _check_symmetric_generator(a)
    if panels < 2 or panels % 2:
        raise ValueError("Simpson's rule needs an even panel count >= 2")
    n = a.shape[0] // 2
    gen = 4.0 * a @ symplectic_form(n)
    step = expm(gen / panels)
    total = np.zeros_like(gen)
    current = np.eye(2 * n)
    for k in range(panels + 1):
        w = 1.0 if k in (0, panels) else (4.0 if k % 2 else 2.0)
        total += w * current
        current = current @ step
    return total / (3.0 * panels)


def binomial_invariants(m):
    """Invariants of the ``m``-mode vacuum, ``C(m, d)`` for ``d = 1..m``."""
    return comb(m, np.arange(1, m + 1), exact=False)
