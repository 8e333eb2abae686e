"""Exact diagonalization and algebraic Bethe ansatz for multi-well boson tunneling models."""
from .bae import (
    BaeRoots,
    BaeSolution,
    SectorLabel,
    SectorResult,
    SolverConfig,
    bae_residual,
    closed_form_energy,
    enumerate_sectors,
    energy_from_roots,
    solve_bae,
)
from .fock import FockBasis, OperatorMatrix, enumerate_basis
from .model import CouplingParams, ParameterError, SpectralParams, build_hamiltonian, to_spectral
from .spectrum import completeness_count, degeneracy, diagonalize, match_model, match_spectra

__all__ = [
    "BaeRoots", "BaeSolution", "SectorLabel", "SectorResult", "SolverConfig",
    "bae_residual", "closed_form_energy", "enumerate_sectors", "energy_from_roots", "solve_bae",
    "FockBasis", "OperatorMatrix", "enumerate_basis",
    "CouplingParams", "ParameterError", "SpectralParams", "build_hamiltonian", "to_spectral",
    "completeness_count", "degeneracy", "diagonalize", "match_model", "match_spectra",
]

__version__ = "0.1.0"
