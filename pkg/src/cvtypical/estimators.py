"""scikit-learn style front ends for sampling, feature extraction and bounds."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ensemble import EnsembleConfig, draw_sample, run_ensemble
from .haar import assemble_pure_cm, unitary_to_ortho_symplectic
from .lp import solve_entropy_bounds
from .measures import CanonicalConfig, MicrocanonicalConfig
from .symplectic import entropic_h, reduce, symplectic_eigenvalues
from .validation import check_covariance, check_log_base


def _measure_config(measure, n_modes, energy, temperature):
    if measure == "microcanonical":
        if energy is None:
            raise ValueError("microcanonical measure needs energy")
        return MicrocanonicalConfig(int(n_modes), float(energy))
    if measure == "canonical":
        if temperature is None:
            raise ValueError("canonical measure needs temperature")
        return CanonicalConfig(int(n_modes), float(temperature))
    raise ValueError(f"unknown measure {measure!r}")


def check_covariance_batch(X):
    """Validate a stack of covariance matrices, shape ``(k, 2n, 2n)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3:
        raise ValueError(f"expected shape (k, 2n, 2n), got {X.shape}")
    return np.stack([check_covariance(s) for s in X])


class EntanglementTransformer(TransformerMixin, BaseEstimator):
    """Map covariance matrices to entanglement features of a subsystem.

    Each row of the output is ``[entropy, mu^-2, nu_1..nu_m, Delta_1..Delta_m]``
    for the reduction onto ``modes`` (the first ``m`` modes when an int).

    Parameters
    ----------
    modes : int or sequence of int, default 1
    log_base : {2, 'e'}, default 2
    """

    def __init__(self, modes=1, log_base=2):
        self.modes = modes
        self.log_base = log_base

    def _mode_list(self, n):
        if np.isscalar(self.modes):
            return list(range(int(self.modes)))
        return [int(i) for i in self.modes]

    def fit(self, X=None, y=None):
        check_log_base(self.log_base)
        if X is not None:
            X = check_covariance_batch(X)
            self.n_modes_in_ = X.shape[1] // 2
            reduce(X[0], self._mode_list(self.n_modes_in_))
        self.m_ = int(self.modes) if np.isscalar(self.modes) else len(self.modes)
        return self

    def transform(self, X):
        check_is_fitted(self, "m_")
        X = check_covariance_batch(X)
        n = X.shape[1] // 2
        modes = self._mode_list(n)
        out = np.empty((X.shape[0], 2 + 2 * len(modes)))
        for i, sigma in enumerate(X):
            nu = symplectic_eigenvalues(reduce(sigma, modes))
            nu2 = nu**2
            coeffs = np.array([1.0])
            for v in nu2:
                coeffs = np.convolve(coeffs, [1.0, v])
            out[i, 0] = np.sum(entropic_h(nu, base=self.log_base))
            out[i, 1] = np.prod(nu2)
            out[i, 2 : 2 + len(modes)] = nu
            out[i, 2 + len(modes) :] = coeffs[1:]
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "m_")
        m = self.m_
        return np.array(
            ["entropy", "inv_purity"]
            + [f"nu_{k + 1}" for k in range(m)]
            + [f"delta_{d + 1}" for d in range(m)],
            dtype=object,
        )


class TypicalEntanglement(BaseEstimator):
    """Sample pure Gaussian states and summarise subsystem entanglement.

    ``fit`` draws ``n_samples`` states from the chosen measure and stores the
    per-sample statistics and their summary; ``sample_states`` returns full
    covariance matrices for use with :class:`EntanglementTransformer`.
    """

    def __init__(
        self,
        measure="microcanonical",
        n_modes=5,
        energy=None,
        temperature=None,
        m=1,
        n_samples=5000,
        random_state=0,
        log_base=2,
        n_jobs=1,
    ):
        self.measure = measure
        self.n_modes = n_modes
        self.energy = energy
        self.temperature = temperature
        self.m = m
        self.n_samples = n_samples
        self.random_state = random_state
        self.log_base = log_base
        self.n_jobs = n_jobs

    def _config(self, samples=None):
        return EnsembleConfig(
            _measure_config(self.measure, self.n_modes, self.energy, self.temperature),
            m=int(self.m),
            samples=int(samples or self.n_samples),
            seed=int(self.random_state),
            base=self.log_base,
        )

    def fit(self, X=None, y=None):
        result = run_ensemble(self._config(), workers=int(self.n_jobs))
        self.result_ = result
        self.summary_ = result.summary
        self.entropies_ = result.entropy
        self.inv_purities_ = result.inv_purity
        self.mean_entropy_ = result.summary.mean_entropy
        self.std_entropy_ = result.summary.std_entropy
        return self

    def sample_states(self, n_states):
        """Full covariance matrices of the first ``n_states`` ensemble members."""
        cfg = self._config(samples=max(int(n_states), 1))
        states = []
        for i in range(int(n_states)):
            _, energies, u = draw_sample(cfg, i, return_state=True)
            states.append(assemble_pure_cm(energies, unitary_to_ortho_symplectic(u)))
        return np.stack(states)


class EntropyBounds(BaseEstimator):
    """Rigorous bounds on the micro-canonical mean entropy of one mode."""

    def __init__(self, n_modes=4, energy=16.0, n_bins=10_000, log_base=2):
        self.n_modes = n_modes
        self.energy = energy
        self.n_bins = n_bins
        self.log_base = log_base

    def fit(self, X=None, y=None):
        res = solve_entropy_bounds(
            MicrocanonicalConfig(int(self.n_modes), float(self.energy)),
            n_bins=int(self.n_bins),
            base=self.log_base,
        )
        self.result_ = res
        self.lower_ = res.lower
        self.upper_ = res.upper
        self.feasible_ = res.feasible
        return self
