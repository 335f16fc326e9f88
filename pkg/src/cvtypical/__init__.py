"""Typical entanglement of pure Gaussian states under energy-constrained measures."""

__version__ = "0.1.0"

from .analytics import (
    MomentPair,
    asymptotic_entropy,
    asymptotic_invariant,
    canonical_invpurity_moments,
    entropy_from_purity,
    haar_invpurity_moments,
    max_entropy,
    max_inv_purity,
    max_subsystem_entropy,
    microcanonical_invpurity_moments,
    page_entropy,
)
from .ensemble import EnsembleConfig, concentration_scan, histogram, mdep_scan, run_ensemble
from .estimators import EntanglementTransformer, EntropyBounds, TypicalEntanglement
from .haar import (
    assemble_pure_cm,
    sample_haar_unitary,
    squeezing_from_energy,
    unitary_to_ortho_symplectic,
)
from .lp import BoundResult, Discretization, solve_bounds_from_moments, solve_entropy_bounds
from .measures import (
    CanonicalConfig,
    MicrocanonicalConfig,
    mc_marginal_density,
    mc_normalization,
    sample_can_energies,
    sample_mc_energies,
)
from .symplectic import (
    bch_displacement_matrix,
    bch_displacement_quadrature,
    energy,
    entropic_h,
    entropy_from_invariants,
    purity,
    reduce,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_invariants,
    von_neumann_entropy,
)
from .validation import InfeasibleProgram, InvariantViolation

__all__ = [
    "BoundResult",
    "CanonicalConfig",
    "Discretization",
    "EnsembleConfig",
    "EntanglementTransformer",
    "EntropyBounds",
    "InfeasibleProgram",
    "InvariantViolation",
    "MicrocanonicalConfig",
    "MomentPair",
    "TypicalEntanglement",
    "assemble_pure_cm",
    "asymptotic_entropy",
    "asymptotic_invariant",
    "bch_displacement_matrix",
    "bch_displacement_quadrature",
    "canonical_invpurity_moments",
    "concentration_scan",
    "energy",
    "entropic_h",
    "entropy_from_invariants",
    "entropy_from_purity",
    "haar_invpurity_moments",
    "histogram",
    "max_entropy",
    "max_inv_purity",
    "max_subsystem_entropy",
    "mc_marginal_density",
    "mc_normalization",
    "mdep_scan",
    "microcanonical_invpurity_moments",
    "page_entropy",
    "purity",
    "reduce",
    "run_ensemble",
    "sample_can_energies",
    "sample_haar_unitary",
    "sample_mc_energies",
    "solve_bounds_from_moments",
    "solve_entropy_bounds",
    "squeezing_from_energy",
    "symplectic_eigenvalues",
    "symplectic_form",
    "symplectic_invariants",
    "unitary_to_ortho_symplectic",
    "von_neumann_entropy",
]
