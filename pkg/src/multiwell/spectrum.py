"""Exact diagonalization, state counting and BAE-vs-ED spectrum matching."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .bae import (
    SectorLabel,
    SectorResult,
    SolverConfig,
    closed_form_energy,
    enumerate_sectors,
    group_sectors,
    solve_bae,
)
from .fock import OperatorMatrix
from .model import CouplingParams, build_hamiltonian

SYMMETRY_TOL = 1e-12


def diagonalize(H: OperatorMatrix | np.ndarray, vectors: bool = False):
    """Ascending eigenvalues of a symmetric/Hermitian matrix (and eigenvectors if asked)."""
    h = H.data if isinstance(H, OperatorMatrix) else np.asarray(H)
    asym = np.abs(h - h.conj().T).max(initial=0.0)
    if asym > SYMMETRY_TOL * max(1.0, np.abs(h).max(initial=0.0)):
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    if vectors:
        return np.linalg.eigh(h)
    return np.linalg.eigvalsh(h)


def _labels_per_r(r: int, n: int, m: int) -> int:
    parts = n + m - 2
    if parts == 0:
        return 1 if r == 0 else 0
    return comb(r + parts - 1, parts - 1)


def completeness_count(n: int, m: int, N: int) -> dict:
    """States supplied by each ``r``: ``(N - r + 1)`` times the number of labels with that ``r``."""
    if n + m < 2:
        raise ValueError("need at least two wells")
    per_r = [(N - r + 1) * _labels_per_r(r, n, m) for r in range(N + 1)]
    return {"per_r": per_r, "total": sum(per_r), "dimension": comb(N + n + m - 1, n + m - 1)}


def _side_degeneracy(wells: int, total: int) -> int:
    if wells == 1:
        return 1 if total == 0 else 0
    return comb(wells - 2 + total, total)


def degeneracy(L: int, K: int, n: int, m: int) -> int:
    """Number of pseudovacua sharing the Bethe equations of group ``(L, K)``."""
    return _side_degeneracy(n, L) * _side_degeneracy(m, K)


@dataclass
class SpectrumReport:
    ed_eigenvalues: list[float]
    bae_entries: list[dict]
    pairs: list[tuple[float, float]]
    unmatched_ed: list[float]
    unmatched_bae: list[float]
    tol: float
    notes: list[str] = field(default_factory=list)

    @property
    def max_gap(self) -> float:
        return max((abs(a - b) for a, b in self.pairs), default=0.0)

    @property
    def success(self) -> bool:
        return not self.unmatched_ed and not self.unmatched_bae and self.max_gap < self.tol

    @property
    def degeneracy_total(self) -> int:
        return sum(e["degeneracy"] for e in self.bae_entries)


def match_spectra(
    ed: Sequence[float], bae: Sequence[tuple[float, int]], tol: float = 1e-6
) -> SpectrumReport:
    """Greedy nearest-pair matching.

    Each ED eigenvalue is used once and each BAE energy ``degeneracy`` times;
    pairs further apart than ``tol`` are never formed and end up unmatched.
    """
    ed = sorted(float(x) for x in ed)
    expanded = sorted(float(e) for e, d in bae for _ in range(int(d)))
    cand = []
    for i, x in enumerate(ed):
        lo = np.searchsorted(expanded, x - tol, side="left")
        hi = np.searchsorted(expanded, x + tol, side="right")
        cand += [(abs(x - expanded[j]), i, j) for j in range(lo, hi)]
    cand.sort()
    used_ed, used_bae, pairs = set(), set(), []
    for gap, i, j in cand:
        if gap >= tol or i in used_ed or j in used_bae:
            continue
        used_ed.add(i)
        used_bae.add(j)
        pairs.append((ed[i], expanded[j]))
    pairs.sort()
    entries = [{"energy": float(e), "degeneracy": int(d)} for e, d in bae]
    return SpectrumReport(
        ed_eigenvalues=ed,
        bae_entries=entries,
        pairs=pairs,
        unmatched_ed=[ed[i] for i in range(len(ed)) if i not in used_ed],
        unmatched_bae=[expanded[j] for j in range(len(expanded)) if j not in used_bae],
        tol=tol,
    )


@dataclass
class GroupSolution:
    """BAE solutions for one ``(L, K)`` group of pseudovacuum labels."""

    group: tuple[int, int]
    labels: list[SectorLabel]
    degeneracy: int
    energies: list[float]
    results: list[SectorResult]

    @property
    def complete(self) -> bool:
        return all(r.complete for r in self.results)


def bae_spectrum(
    p: CouplingParams, N: int, cfg: SolverConfig = SolverConfig(), exhaustive: bool = False
) -> list[GroupSolution]:
    """Solve every sector group; ``r = N`` groups use the closed-form energy.

    By default one representative label per group is solved and fanned out with
    the group's degeneracy. ``exhaustive=True`` solves every label and keeps all
    results so the shared-energy claim can be checked rather than assumed.
    """
    out = []
    for group, labels in group_sectors(enumerate_sectors(p.n, p.m, N)).items():
        deg = degeneracy(*group, p.n, p.m)
        if len(labels) != deg:
            raise AssertionError(f"group {group} has {len(labels)} labels, formula gives {deg}")
        if labels[0].r == N:
            out.append(GroupSolution(group, labels, deg, [closed_form_energy(labels[0], p)], []))
            continue
        todo = labels if exhaustive else labels[:1]
        results = [solve_bae(lab, p, N, cfg) for lab in todo]
        out.append(GroupSolution(group, labels, deg, results[0].energies, results))
    return out


def match_model(
    p: CouplingParams,
    N: int,
    cfg: SolverConfig = SolverConfig(),
    tol: float = 1e-6,
    bae_params: CouplingParams | None = None,
) -> tuple[SpectrumReport, list[GroupSolution]]:
    """Diagonalize ``p`` and match against the BAE spectrum of ``bae_params`` (default ``p``)."""
    ed = diagonalize(build_hamiltonian(p, N))
    groups = bae_spectrum(bae_params or p, N, cfg)
    bae = [(e, g.degeneracy) for g in groups for e in g.energies]
    report = match_spectra(ed, bae, tol)
    for g in groups:
        if not g.complete:
            report.notes.append(f"incomplete sector group L={g.group[0]}, K={g.group[1]}")
    return report, groups
