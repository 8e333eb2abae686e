"""Bosonic Fock bases at fixed particle number and ladder operators between them.

Modes are ordered ``a_1..a_n, b_1..b_m``. Operators that change the particle
number are stored as rectangular matrices between adjacent fixed-N bases.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

OccupationVector = tuple[int, ...]


@dataclass(frozen=True)
class FockBasis:
    """Occupation-number states of ``N`` bosons in ``M`` modes.

    States are in lexicographically descending order, so for ``M=3, N=2`` the
    first states are ``(2,0,0), (1,1,0), (1,0,1), ...``.
    """

    M: int
    N: int
    states: tuple[OccupationVector, ...] = field(repr=False, compare=False)

    @functools.cached_property
    def index(self) -> dict[OccupationVector, int]:
        return {s: p for p, s in enumerate(self.states)}

    @property
    def key(self) -> tuple[int, int]:
        return (self.M, self.N)

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def occupations(self) -> np.ndarray:
        """Occupations as a ``(dim, M)`` integer array."""
        if not self.states:
            return np.zeros((0, self.M), dtype=int)
        return np.array(self.states, dtype=int)

    def basis_vector(self, occupation: Sequence[int]) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[tuple(occupation)]] = 1.0
        return v


def _compositions(M: int, N: int):
    # descending lexicographic: largest first entry first
    if M == 1:
        yield (N,)
        return
    for first in range(N, -1, -1):
        for rest in _compositions(M - 1, N - first):
            yield (first,) + rest


@functools.lru_cache(maxsize=256)
def enumerate_basis(M: int, N: int) -> FockBasis:
    if M < 1:
        raise ValueError(f"mode count must be >= 1, got M={M}")
    if N < 0:
        raise ValueError(f"particle number must be >= 0, got N={N}")
    states = tuple(_compositions(M, N))
    assert len(states) == comb(N + M - 1, M - 1)
    return FockBasis(M, N, states)


def adjacent_basis(basis: FockBasis, shift: int) -> FockBasis:
    """Basis with ``N + shift`` particles; empty when that number is negative."""
    N = basis.N + shift
    if N < 0:
        return FockBasis(basis.M, N, ())
    return enumerate_basis(basis.M, N)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Linear map ``domain -> codomain`` stored as a dense complex array.

    ``X @ Y`` composes (checking that ``Y.codomain`` is ``X.domain``) and
    ``X @ vec`` applies the map to a plain amplitude array.
    """

    domain: FockBasis
    codomain: FockBasis
    data: np.ndarray

    def __post_init__(self):
        expected = (self.codomain.dim, self.domain.dim)
        if self.data.shape != expected:
            raise ValueError(f"matrix shape {self.data.shape} does not match bases {expected}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def H(self) -> OperatorMatrix:
        return OperatorMatrix(self.codomain, self.domain, self.data.conj().T)

    def _check_same(self, other: OperatorMatrix):
        if self.domain.key != other.domain.key or self.codomain.key != other.codomain.key:
            raise ValueError(
                f"basis mismatch: {self.domain.key}->{self.codomain.key} vs "
                f"{other.domain.key}->{other.codomain.key}"
            )

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            if other.codomain.key != self.domain.key:
                raise ValueError(
                    f"cannot compose: inner bases {other.codomain.key} and {self.domain.key} differ"
                )
            return OperatorMatrix(other.domain, self.codomain, self.data @ other.data)
        return self.data @ np.asarray(other)

    def __add__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_same(other)
            return OperatorMatrix(self.domain, self.codomain, self.data + other.data)
        return self + other * identity(self.domain) if np.isscalar(other) else NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return OperatorMatrix(self.domain, self.codomain, scalar * self.data)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)


def identity(basis: FockBasis) -> OperatorMatrix:
    return OperatorMatrix(basis, basis, np.eye(basis.dim, dtype=complex))


def zero(domain: FockBasis, codomain: FockBasis) -> OperatorMatrix:
    return OperatorMatrix(domain, codomain, np.zeros((codomain.dim, domain.dim), dtype=complex))


def _check_pair(basis_from: FockBasis, basis_to: FockBasis, shift: int, mode: int):
    if basis_from.M != basis_to.M:
        raise ValueError(f"bases have different mode counts ({basis_from.M} vs {basis_to.M})")
    if basis_to.N != basis_from.N + shift:
        raise ValueError(
            f"expected target particle number {basis_from.N + shift}, got {basis_to.N}"
        )
    if not 0 <= mode < basis_from.M:
        raise ValueError(f"mode {mode} out of range for M={basis_from.M}")


@functools.lru_cache(maxsize=1024)
def creation_matrix(basis_from: FockBasis, basis_to: FockBasis, mode: int) -> OperatorMatrix:
    """Matrix of ``a_mode^dagger`` from the N-particle to the (N+1)-particle basis.

    Results are cached and shared; treat ``.data`` as read-only.
    """
    _check_pair(basis_from, basis_to, +1, mode)
    data = np.zeros((basis_to.dim, basis_from.dim), dtype=complex)
    for col, state in enumerate(basis_from.states):
        n = state[mode]
        target = state[:mode] + (n + 1,) + state[mode + 1:]
        data[basis_to.index[target], col] = np.sqrt(n + 1)
    data.setflags(write=False)
    return OperatorMatrix(basis_from, basis_to, data)


def annihilation_matrix(basis_from: FockBasis, basis_to: FockBasis, mode: int) -> OperatorMatrix:
    """Matrix of ``a_mode`` from the N-particle to the (N-1)-particle basis."""
    _check_pair(basis_from, basis_to, -1, mode)
    return creation_matrix(basis_to, basis_from, mode).H


def number_matrix(basis: FockBasis, mode: int) -> OperatorMatrix:
    if not 0 <= mode < basis.M:
        raise ValueError(f"mode {mode} out of range for M={basis.M}")
    diag = basis.occupations()[:, mode].astype(complex)
    return OperatorMatrix(basis, basis, np.diag(diag))


def collective_operator(
    basis_from: FockBasis,
    basis_to: FockBasis,
    coeffs: Sequence[float],
    modes: Sequence[int],
    kind: str = "creation",
) -> OperatorMatrix:
    """``sum_i coeffs[i] * ladder(modes[i])`` for ``kind`` in {"creation", "annihilation"}.

    Real coefficients are assumed, so the annihilation form uses them unconjugated.
    """
    if len(coeffs) != len(modes):
        raise ValueError(f"{len(coeffs)} coefficients for {len(modes)} modes")
    if kind == "creation":
        ladder = creation_matrix
    elif kind == "annihilation":
        ladder = annihilation_matrix
    else:
        raise ValueError(f"unknown ladder kind {kind!r}")
    shift = 1 if kind == "creation" else -1
    if basis_to.N != basis_from.N + shift or basis_to.M != basis_from.M:
        _check_pair(basis_from, basis_to, shift, 0)
    out = zero(basis_from, basis_to)
    for c, mode in zip(coeffs, modes):
        if c != 0:
            out = out + c * ladder(basis_from, basis_to, mode)
    return out
