"""Quantum inverse scattering objects realized as explicit matrices.

Operator-valued 2x2 matrices in auxiliary space (Lax operators, the monodromy)
are handled through entry functions ``f(i, j, basis_in) -> OperatorMatrix``.
Entry ``(i, j)`` shifts the particle number by ``i - j``, so ``N - (aux index)``
is conserved and identities such as RTT can be checked exactly on the finite
block ``⊕_{aux config c} Fock(C + sum(c))`` without truncation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from .fock import FockBasis, OperatorMatrix, adjacent_basis, collective_operator, enumerate_basis, identity
from .model import (
    CouplingParams,
    SpectralParams,
    build_hamiltonian,
    gamma_lowering,
    lowering,
    model_basis,
    raising,
    side_number,
)
from .ortho import ComplementBasis

EntryFn = Callable[[int, int, FockBasis], OperatorMatrix]


class _Label(Protocol):
    l: tuple[int, ...]
    k: tuple[int, ...]


# -- R-matrix ----------------------------------------------------------------


def r_matrix(u: complex, eta: float) -> np.ndarray:
    """4x4 su(2)-invariant R-matrix with ``b = u/(u+eta)``, ``c = eta/(u+eta)``."""
    b = u / (u + eta)
    c = eta / (u + eta)
    R = np.eye(4, dtype=complex)
    R[1, 1] = R[2, 2] = b
    R[1, 2] = R[2, 1] = c
    return R


def ybe_residual(u: complex, v: complex, eta: float) -> float:
    """Frobenius norm of ``R12(u-v) R13(u) R23(v) - R23(v) R13(u) R12(u-v)``."""
    I2 = np.eye(2)
    # P23 swaps spaces 2 and 3 of (C^2)^{⊗3}
    P23 = np.zeros((8, 8))
    for a, b, c in itertools.product(range(2), repeat=3):
        P23[4 * a + 2 * c + b, 4 * a + 2 * b + c] = 1.0
    R12 = np.kron(r_matrix(u - v, eta), I2)
    R13 = P23 @ np.kron(r_matrix(u, eta), I2) @ P23
    R23 = np.kron(I2, r_matrix(v, eta))
    return float(np.linalg.norm(R12 @ R13 @ R23 - R23 @ R13 @ R12))


# -- Lax operators and monodromy ---------------------------------------------


def _lax_fn(u: complex, side: str, p: CouplingParams, sp: SpectralParams) -> EntryFn:
    eta = sp.eta

    def entry(i: int, j: int, basis: FockBasis) -> OperatorMatrix:
        if (i, j) == (0, 0):
            return u * identity(basis) + eta * side_number(p, basis, side)
        if (i, j) == (0, 1):
            return lowering(p, basis, side)
        if (i, j) == (1, 0):
            return raising(p, basis, side)
        return identity(basis) / eta

    return entry


def lax_entries(
    u: complex, side: str, p: CouplingParams, sp: SpectralParams, C: int
) -> list[list[OperatorMatrix]]:
    """Blocks of ``L^X(u)`` for ``X`` = ``side``; block ``(i, j)`` acts on ``Fock(C + j)``."""
    f = _lax_fn(u, side, p, sp)
    return [[f(i, j, model_basis(p, C + j)) for j in range(2)] for i in range(2)]


def _closed_form_fn(u: complex, p: CouplingParams, sp: SpectralParams) -> EntryFn:
    eta, w = sp.eta, sp.omega

    def entry(i: int, j: int, b: FockBasis) -> OperatorMatrix:
        if (i, j) == (0, 0):
            up = adjacent_basis(b, +1)
            return (
                (u + w) * identity(b) + eta * side_number(p, b, "A")
            ) @ ((u - w) * identity(b) + eta * side_number(p, b, "B")) + lowering(
                p, up, "A"
            ) @ raising(p, b, "B")
        if (i, j) == (0, 1):
            down = adjacent_basis(b, -1)
            factor = (u + w) * identity(down) + eta * side_number(p, down, "A")
            return factor @ lowering(p, b, "B") + lowering(p, b, "A") / eta
        if (i, j) == (1, 0):
            up = adjacent_basis(b, +1)
            factor = (u - w) * identity(up) + eta * side_number(p, up, "B")
            return factor @ raising(p, b, "A") + raising(p, b, "B") / eta
        down = adjacent_basis(b, -1)
        return raising(p, down, "A") @ lowering(p, b, "B") + identity(b) / eta**2

    return entry


def _product_fn(left: EntryFn, right: EntryFn) -> EntryFn:
    """Entry function of the auxiliary-space matrix product ``left @ right``."""

    def entry(i: int, j: int, b: FockBasis) -> OperatorMatrix:
        total = None
        for k in range(2):
            mid = right(k, j, b)
            term = left(i, k, mid.codomain) @ mid
            total = term if total is None else total + term
        return total

    return entry


def _lax_product_fn(u: complex, p: CouplingParams, sp: SpectralParams) -> EntryFn:
    return _product_fn(_lax_fn(u + sp.omega, "A", p, sp), _lax_fn(u - sp.omega, "B", p, sp))


@dataclass(frozen=True)
class MonodromyOperators:
    """Entries of ``T(u)`` acting on the N-particle space.

    ``A``, ``D`` preserve N, ``B`` lowers it by one and ``C`` raises it by one.
    """

    u: complex
    A: OperatorMatrix
    B: OperatorMatrix
    C: OperatorMatrix
    D: OperatorMatrix

    def as_entries(self):
        return [[self.A, self.B], [self.C, self.D]]


def monodromy(
    u: complex, p: CouplingParams, sp: SpectralParams, N: int, method: str = "closed"
) -> MonodromyOperators:
    """Monodromy entries on ``Fock(N)``.

    ``method="closed"`` uses the closed forms; ``method="lax"`` multiplies
    ``L^A(u+omega) L^B(u-omega)`` blockwise and exists as a cross-check.
    """
    if method == "closed":
        f = _closed_form_fn(u, p, sp)
    elif method == "lax":
        f = _lax_product_fn(u, p, sp)
    else:
        raise ValueError(f"unknown monodromy method {method!r}")
    b = model_basis(p, N)
    return MonodromyOperators(u, f(0, 0, b), f(0, 1, b), f(1, 0, b), f(1, 1, b))


def monodromy_crosscheck(u: complex, p: CouplingParams, sp: SpectralParams, N: int) -> float:
    """Largest entrywise gap between closed-form and Lax-product monodromies."""
    closed = monodromy(u, p, sp, N, "closed").as_entries()
    lax = monodromy(u, p, sp, N, "lax").as_entries()
    gaps = [
        np.abs(closed[i][j].data - lax[i][j].data).max(initial=0.0)
        for i in range(2)
        for j in range(2)
    ]
    return float(max(gaps))


# -- graded block assembly ----------------------------------------------------


def _sector(M: int, N: int) -> FockBasis:
    return enumerate_basis(M, N) if N >= 0 else FockBasis(M, N, ())


class _GradedBlock:
    """Charge-``C`` block of ``(C^2)^{⊗n_aux} ⊗ Fock`` as one dense matrix."""

    def __init__(self, M: int, C: int, n_aux: int):
        self.M, self.C = M, C
        self.configs = list(itertools.product(range(2), repeat=n_aux))
        self.bases = [_sector(M, C + sum(c)) for c in self.configs]
        self.offsets = np.cumsum([0] + [b.dim for b in self.bases])
        self.dim = int(self.offsets[-1])

    def _slot(self, idx):
        return slice(self.offsets[idx], self.offsets[idx + 1])

    def embed(self, f: EntryFn, space: int) -> np.ndarray:
        """Operator-valued aux matrix ``f`` acting on auxiliary ``space``."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for ci, col in enumerate(self.configs):
            if self.bases[ci].dim == 0:
                continue
            for ri, row in enumerate(self.configs):
                if any(row[s] != col[s] for s in range(len(row)) if s != space):
                    continue
                if self.bases[ri].dim == 0:
                    continue
                block = f(row[space], col[space], self.bases[ci])
                out[self._slot(ri), self._slot(ci)] = block.data
        return out

    def embed_scalar(self, R: np.ndarray, spaces: tuple[int, int]) -> np.ndarray:
        """4x4 numeric matrix on two auxiliary spaces, identity on the rest."""
        s1, s2 = spaces
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for ci, col in enumerate(self.configs):
            for ri, row in enumerate(self.configs):
                if any(row[s] != col[s] for s in range(len(row)) if s not in spaces):
                    continue
                val = R[2 * row[s1] + row[s2], 2 * col[s1] + col[s2]]
                if val == 0:
                    continue
                if sum(row) != sum(col):
                    raise ValueError("R-matrix entry does not conserve auxiliary charge")
                out[self._slot(ri), self._slot(ci)] = val * np.eye(self.bases[ci].dim)
        return out


def _intertwining_residual(fu: EntryFn, fv: EntryFn, u, v, eta, M: int, C: int) -> float:
    g = _GradedBlock(M, C, 2)
    R = g.embed_scalar(r_matrix(u - v, eta), (0, 1))
    T1 = g.embed(fu, 0)
    T2 = g.embed(fv, 1)
    return float(np.linalg.norm(R @ T1 @ T2 - T2 @ T1 @ R))


def rll_residual(u, v, side: str, p: CouplingParams, sp: SpectralParams, C: int) -> float:
    """``||R12(u-v) L1(u) L2(v) - L2(v) L1(u) R12(u-v)||`` on the charge-C block."""
    return _intertwining_residual(
        _lax_fn(u, side, p, sp), _lax_fn(v, side, p, sp), u, v, sp.eta, p.modes, C
    )


def rtt_residual(u, v, p: CouplingParams, sp: SpectralParams, C: int) -> float:
    """``||R12(u-v) T1(u) T2(v) - T2(v) T1(u) R12(u-v)||`` on the charge-C block."""
    return _intertwining_residual(
        _closed_form_fn(u, p, sp), _closed_form_fn(v, p, sp), u, v, sp.eta, p.modes, C
    )


def ac_relation_residual(u, v, p: CouplingParams, sp: SpectralParams, N: int) -> float:
    """Residual of ``A(u)C(v) = (u-v+eta)/(u-v) C(v)A(u) - eta/(u-v) C(u)A(v)`` on Fock(N)."""
    eta = sp.eta
    Tu, Tv = monodromy(u, p, sp, N), monodromy(v, p, sp, N)
    Tu1 = monodromy(u, p, sp, N + 1)
    lhs = Tu1.A @ Tv.C
    rhs = ((u - v + eta) / (u - v)) * (Tv.C @ Tu.A) - (eta / (u - v)) * (Tu.C @ Tv.A)
    return float(np.linalg.norm(lhs.data - rhs.data))


def dc_relation_residual(u, v, p: CouplingParams, sp: SpectralParams, N: int) -> float:
    """Residual of ``D(u)C(v) = (u-v-eta)/(u-v) C(v)D(u) + eta/(u-v) C(u)D(v)`` on Fock(N)."""
    eta = sp.eta
    Tu, Tv = monodromy(u, p, sp, N), monodromy(v, p, sp, N)
    Tu1 = monodromy(u, p, sp, N + 1)
    lhs = Tu1.D @ Tv.C
    rhs = ((u - v - eta) / (u - v)) * (Tv.C @ Tu.D) + (eta / (u - v)) * (Tu.C @ Tv.D)
    return float(np.linalg.norm(lhs.data - rhs.data))


# -- transfer matrix -----------------------------------------------------------


def transfer_matrix(u: complex, p: CouplingParams, sp: SpectralParams, N: int) -> OperatorMatrix:
    T = monodromy(u, p, sp, N)
    return T.A + T.D


def transfer_coefficients(
    p: CouplingParams, sp: SpectralParams, N: int, points: Sequence[float] = (0.0, 1.0, -1.0)
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Matrix coefficients ``(c0, c1, c2)`` of ``tau(u) = c0 + c1 u + c2 u^2``.

    Obtained by sampling ``tau`` at three points and inverting the Vandermonde system.
    """
    pts = np.asarray(points, dtype=complex)
    V = np.vander(pts, 3, increasing=True)
    samples = np.array([transfer_matrix(x, p, sp, N).data for x in pts])
    coeffs = np.tensordot(np.linalg.inv(V), samples, axes=1)
    return coeffs[0], coeffs[1], coeffs[2]


def hamiltonian_from_transfer(p: CouplingParams, sp: SpectralParams, N: int) -> OperatorMatrix:
    """``t (tau(0) - (eta^2 N^2/4 - omega^2 + eta^-2))``."""
    eta, w = sp.eta, sp.omega
    tau0 = transfer_matrix(0.0, p, sp, N)
    return p.t * (tau0 - (eta**2 * N**2 / 4 - w**2 + eta**-2))


def transfer_eigenvalue(u: complex, roots: Sequence[complex], label: _Label, sp: SpectralParams) -> complex:
    """Eigenvalue ``lambda(u)`` of the transfer matrix on the Bethe state built from ``roots``."""
    eta, w = sp.eta, sp.omega
    L, K = sum(label.l), sum(label.k)
    plus = minus = 1.0 + 0j
    for v in roots:
        plus *= (u - v + eta) / (u - v)
        minus *= (u - v - eta) / (u - v)
    return (u + w + eta * L) * (u - w + eta * K) * plus + minus / eta**2


# -- states ----------------------------------------------------------------------


@dataclass(frozen=True)
class StateVector:
    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (self.basis.dim,):
            raise ValueError("amplitude vector does not match basis dimension")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> StateVector:
        return StateVector(self.basis, self.amplitudes / self.norm)


def _gamma_raising(basis: FockBasis, comp: ComplementBasis) -> list[OperatorMatrix]:
    up = adjacent_basis(basis, +1)
    a_modes = list(range(comp.n))
    b_modes = list(range(comp.n, comp.n + comp.m))
    ops = [collective_operator(basis, up, v, a_modes, "creation") for v in comp.mu]
    ops += [collective_operator(basis, up, v, b_modes, "creation") for v in comp.nu]
    return ops


def pseudovacuum(label: _Label, comp: ComplementBasis, N: int | None = None) -> StateVector:
    """Normalized ``prod (Gamma_i^dag)^{l_i} prod (Gammabar_j^dag)^{k_j} |0>``."""
    if len(label.l) != comp.n - 1 or len(label.k) != comp.m - 1:
        raise ValueError("label length does not match the complement basis")
    powers = list(label.l) + list(label.k)
    r = sum(powers)
    if N is not None and r > N:
        raise ValueError(f"sector has r={r} > N={N}")
    basis = enumerate_basis(comp.n + comp.m, 0)
    vec = np.ones(1, dtype=complex)
    for which, power in enumerate(powers):
        for _ in range(power):
            op = _gamma_raising(basis, comp)[which]
            vec = op @ vec
            basis = op.codomain
    return StateVector(basis, vec).normalized()


def pseudovacuum_residuals(
    label: _Label, p: CouplingParams, sp: SpectralParams, us: Sequence[complex]
) -> dict[str, float]:
    """Relative residuals of ``B|phi>=0``, ``D|phi>=eta^-2|phi>`` and the A-eigenvalue."""
    comp = p.complement()
    phi = pseudovacuum(label, comp)
    r = phi.basis.N
    L, K = sum(label.l), sum(label.k)
    out = {"B": 0.0, "D": 0.0, "A": 0.0}
    for u in us:
        T = monodromy(u, p, sp, r)
        a_val = (u + sp.omega + sp.eta * L) * (u - sp.omega + sp.eta * K)
        out["B"] = max(out["B"], float(np.linalg.norm(T.B @ phi.amplitudes)))
        out["D"] = max(
            out["D"], float(np.linalg.norm(T.D @ phi.amplitudes - phi.amplitudes / sp.eta**2))
        )
        out["A"] = max(
            out["A"],
            float(np.linalg.norm(T.A @ phi.amplitudes - a_val * phi.amplitudes)) / max(1.0, abs(a_val)),
        )
    return out


def bethe_state(
    roots: Sequence[complex],
    label: _Label,
    p: CouplingParams,
    sp: SpectralParams,
    N: int,
    comp: ComplementBasis | None = None,
) -> StateVector:
    """Unnormalized ``prod_i C(v_i) |phi_label>`` in the N-particle space."""
    comp = comp if comp is not None else p.complement()
    phi = pseudovacuum(label, comp, N)
    if len(roots) != N - phi.basis.N:
        raise ValueError(f"expected {N - phi.basis.N} roots, got {len(roots)}")
    vec, r = phi.amplitudes, phi.basis.N
    for v in roots:
        vec = monodromy(v, p, sp, r).C @ vec
        r += 1
    return StateVector(model_basis(p, N), vec)


def hamiltonian_residual(state: StateVector, energy: float, p: CouplingParams) -> float:
    """``||H psi - E psi|| / ||psi||``."""
    if state.norm == 0:
        return float("inf")
    H = build_hamiltonian(p, state.basis.N)
    return float(np.linalg.norm(H @ state.amplitudes - energy * state.amplitudes)) / state.norm


def q_eigenvalue_check(state: StateVector, label: _Label, comp: ComplementBasis) -> list[float]:
    """``||Q_j psi - l_j psi|| / ||psi||`` for each ``Q_j`` then each ``Qbar_j``."""
    if state.norm == 0:
        raise ValueError("zero state has no eigenvalues")
    expected = list(label.l) + list(label.k)
    out = []
    for g, val in zip(gamma_lowering(state.basis, comp), expected):
        Q = g.H @ g
        out.append(float(np.linalg.norm(Q @ state.amplitudes - val * state.amplitudes)) / state.norm)
    return out
