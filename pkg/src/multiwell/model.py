"""Multi-well tunneling Hamiltonians and their conserved operators.

The model couples ``n`` A-side wells to ``m`` B-side wells through the
collective modes ``A = sum_i alpha_i a_i`` and ``B = sum_j beta_j b_j``::

    H = U (N_A - N_B)^2 + mu (N_A - N_B) + t (A^dag B + A B^dag)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import (
    FockBasis,
    OperatorMatrix,
    adjacent_basis,
    collective_operator,
    enumerate_basis,
    identity,
)
from .ortho import NORM_TOL, ComplementBasis


class ParameterError(ValueError):
    """Couplings violate a model constraint."""


@dataclass(frozen=True)
class CouplingParams:
    U: float
    mu: float
    t: float
    alpha: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(x) for x in self.alpha))
        object.__setattr__(self, "beta", tuple(float(x) for x in self.beta))
        for name, vec in (("alpha", self.alpha), ("beta", self.beta)):
            if not vec:
                raise ParameterError(f"{name} must have at least one entry")
            s = sum(x * x for x in vec)
            if abs(s - 1.0) > NORM_TOL:
                raise ParameterError(f"sum of {name}^2 must equal 1 (got {s:.15g})")
        for name in ("U", "mu", "t"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def m(self) -> int:
        return len(self.beta)

    @property
    def modes(self) -> int:
        return self.n + self.m

    def tunneling(self) -> np.ndarray:
        """Matrix of pair amplitudes ``t_ij = t alpha_i beta_j``."""
        return self.t * np.outer(self.alpha, self.beta)

    def complement(self) -> ComplementBasis:
        return ComplementBasis.from_couplings(self.alpha, self.beta)


@dataclass(frozen=True)
class SpectralParams:
    eta: float
    omega: float

    def __post_init__(self):
        if self.eta == 0:
            raise ParameterError("eta must be nonzero")


def to_spectral(p: CouplingParams) -> SpectralParams:
    """Invert ``U = -t eta^2 / 4`` and ``mu = -t omega eta`` taking ``eta > 0``."""
    if p.t == 0:
        raise ParameterError("t = 0 has no spectral parametrization")
    if p.U == 0:
        raise ParameterError("U = 0 gives eta = 0, which the Lax operator cannot use")
    if p.U * p.t > 0:
        raise ParameterError("U*t > 0 needs imaginary eta, which is out of scope")
    eta = math.sqrt(-4.0 * p.U / p.t)
    omega = -p.mu / (p.t * eta)
    return SpectralParams(eta, omega)


def from_spectral(s: SpectralParams, t: float) -> tuple[float, float]:
    """Return ``(U, mu)`` for spectral couplings at tunneling scale ``t``."""
    return -t * s.eta**2 / 4.0, -t * s.omega * s.eta


def with_spectral(
    eta: float, omega: float, t: float, alpha: Sequence[float], beta: Sequence[float]
) -> CouplingParams:
    U, mu = from_spectral(SpectralParams(eta, omega), t)
    return CouplingParams(U, mu, t, tuple(alpha), tuple(beta))


def model_basis(p: CouplingParams, N: int) -> FockBasis:
    return enumerate_basis(p.modes, N)


def _side(p: CouplingParams, side: str) -> tuple[tuple[float, ...], list[int]]:
    if side == "A":
        return p.alpha, list(range(p.n))
    if side == "B":
        return p.beta, list(range(p.n, p.n + p.m))
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def lowering(p: CouplingParams, basis: FockBasis, side: str) -> OperatorMatrix:
    """Collective annihilator ``A`` or ``B`` acting on ``basis``."""
    coeffs, modes = _side(p, side)
    return collective_operator(basis, adjacent_basis(basis, -1), coeffs, modes, "annihilation")


def raising(p: CouplingParams, basis: FockBasis, side: str) -> OperatorMatrix:
    """Collective creator ``A^dag`` or ``B^dag`` acting on ``basis``."""
    coeffs, modes = _side(p, side)
    return collective_operator(basis, adjacent_basis(basis, +1), coeffs, modes, "creation")


def side_number(p: CouplingParams, basis: FockBasis, side: str) -> OperatorMatrix:
    """``N_A`` or ``N_B`` on ``basis``."""
    _, modes = _side(p, side)
    occ = basis.occupations()[:, modes].sum(axis=1).astype(complex)
    return OperatorMatrix(basis, basis, np.diag(occ))


def build_hamiltonian(p: CouplingParams, N: int) -> OperatorMatrix:
    basis = model_basis(p, N)
    occ = basis.occupations()
    imbalance = occ[:, : p.n].sum(axis=1) - occ[:, p.n:].sum(axis=1)
    H = OperatorMatrix(basis, basis, np.diag(p.U * imbalance**2 + p.mu * imbalance).astype(complex))
    if p.t != 0 and N > 0:
        hop = raising(p, adjacent_basis(basis, -1), "A") @ lowering(p, basis, "B")
        H = H + p.t * (hop + hop.H)
    return H


def build_number_operator(p: CouplingParams, N: int) -> OperatorMatrix:
    return N * identity(model_basis(p, N))


def gamma_lowering(basis: FockBasis, comp: ComplementBasis) -> list[OperatorMatrix]:
    """Complement annihilators ``Gamma_i`` then ``Gamma-bar_j`` on ``basis``."""
    lower = adjacent_basis(basis, -1)
    a_modes = list(range(comp.n))
    b_modes = list(range(comp.n, comp.n + comp.m))
    ops = [collective_operator(basis, lower, v, a_modes, "annihilation") for v in comp.mu]
    ops += [collective_operator(basis, lower, v, b_modes, "annihilation") for v in comp.nu]
    return ops


def build_conserved_Q(
    p: CouplingParams, N: int, comp: ComplementBasis | None = None
) -> list[OperatorMatrix]:
    """Number operators ``Gamma^dag Gamma`` of the complement modes.

    Ordered as ``Q_1..Q_{n-1}`` followed by ``Qbar_1..Qbar_{m-1}``.
    """
    comp = comp if comp is not None else p.complement()
    if (comp.n, comp.m) != (p.n, p.m):
        raise ValueError("complement basis does not match the model's well counts")
    basis = model_basis(p, N)
    return [g.H @ g for g in gamma_lowering(basis, comp)]


def commutator_norm(X: OperatorMatrix | np.ndarray, Y: OperatorMatrix | np.ndarray) -> float:
    x = X.data if isinstance(X, OperatorMatrix) else np.asarray(X)
    y = Y.data if isinstance(Y, OperatorMatrix) else np.asarray(Y)
    if x.shape != y.shape or x.shape[0] != x.shape[1]:
        raise ValueError(f"commutator needs equal square shapes, got {x.shape} and {y.shape}")
    return float(np.linalg.norm(x @ y - y @ x))

