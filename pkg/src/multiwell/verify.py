"""Check batteries for the algebraic, conservation, counting and Bethe-state claims.

Each suite returns a list of :class:`Check` records with the measured residual
and its threshold, ready for tabulation or JSON serialization.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import aba
from .bae import SolverConfig, enumerate_sectors
from .fock import enumerate_basis
from .model import (
    CouplingParams,
    build_conserved_Q,
    build_hamiltonian,
    build_number_operator,
    commutator_norm,
    to_spectral,
)
from .spectrum import bae_spectrum, completeness_count, degeneracy, match_model

SUITES = ("algebra", "conserved", "completeness", "bethe")


@dataclass
class Check:
    suite: str
    name: str
    value: float
    threshold: float
    passed: bool
    detail: str = ""
    op: str = "<"

    def to_dict(self) -> dict:
        return asdict(self)


def _le(suite: str, name: str, value: float, threshold: float, detail: str = "") -> Check:
    return Check(suite, name, float(value), threshold, bool(value < threshold), detail)


def _eq(suite: str, name: str, value, expected, detail: str = "") -> Check:
    return Check(suite, name, float(value), float(expected), bool(value == expected), detail, "==")


def _random_pairs(rng: np.random.Generator, count: int, scale: float = 1.5):
    z = scale * (rng.normal(size=(count, 2)) + 1j * rng.normal(size=(count, 2)))
    return [(complex(a), complex(b)) for a, b in z]


def algebra_suite(p: CouplingParams, N: int, seed: int = 0, pairs: int = 3) -> list[Check]:
    sp = to_spectral(p)
    rng = np.random.default_rng(seed)
    S = "algebra"
    out = []
    ybe = max(aba.ybe_residual(u, v, sp.eta) for u, v in _random_pairs(rng, 100))
    out.append(_le(S, "Yang-Baxter equation (100 pairs)", ybe, 1e-13))
    uv = _random_pairs(rng, pairs)
    sectors = range(N + 1)
    rll = max(aba.rll_residual(u, v, side, p, sp, C) for u, v in uv for side in "AB" for C in sectors)
    out.append(_le(S, "RLL relation, both Lax operators", rll, 1e-10))
    rtt = max(aba.rtt_residual(u, v, p, sp, C) for u, v in uv for C in sectors)
    out.append(_le(S, "RTT relation", rtt, 1e-10, f"charge blocks 0..{N}"))
    cross = max(aba.monodromy_crosscheck(u, p, sp, C) for u, _ in uv for C in sectors)
    out.append(_le(S, "monodromy closed form vs Lax product", cross, 1e-12))
    ac = max(aba.ac_relation_residual(u, v, p, sp, C) for u, v in uv for C in sectors)
    out.append(_le(S, "A(u)C(v) exchange relation", ac, 1e-10))
    dc = max(aba.dc_relation_residual(u, v, p, sp, C) for u, v in uv for C in sectors)
    out.append(_le(S, "D(u)C(v) exchange relation", dc, 1e-10))
    tau = max(
        commutator_norm(aba.transfer_matrix(u, p, sp, N), aba.transfer_matrix(v, p, sp, N))
        for u, v in uv
    )
    out.append(_le(S, "[tau(u), tau(v)] = 0", tau, 1e-10))
    c0, c1, c2 = aba.transfer_coefficients(p, sp, N)
    eye = np.eye(c0.shape[0])
    out.append(_le(S, "c1 = eta N", np.abs(c1 - sp.eta * N * eye).max(initial=0.0), 1e-10))
    out.append(_le(S, "c2 = identity", np.abs(c2 - eye).max(initial=0.0), 1e-10))
    h_gap = np.abs(aba.hamiltonian_from_transfer(p, sp, N).data - build_hamiltonian(p, N).data).max(initial=0.0)
    out.append(_le(S, "H recovered from tau(0)", h_gap, 1e-10))
    us = [0.37, -1.21 + 0.4j, 2.03]
    worst = {"B": 0.0, "D": 0.0, "A": 0.0}
    labels = enumerate_sectors(p.n, p.m, N)
    for lab in labels:
        res = aba.pseudovacuum_residuals(lab, p, sp, us)
        for key in worst:
            worst[key] = max(worst[key], res[key])
    detail = f"{len(labels)} sectors"
    out.append(_le(S, "pseudovacuum B(u)|phi> = 0", worst["B"], 1e-12, detail))
    out.append(_le(S, "pseudovacuum D(u)|phi> = eta^-2 |phi>", worst["D"], 1e-12, detail))
    out.append(_le(S, "pseudovacuum A(u) eigenvalue", worst["A"], 1e-12, detail))
    return out


def conserved_suite(p: CouplingParams, N: int) -> list[Check]:
    S = "conserved"
    H = build_hamiltonian(p, N)
    Nop = build_number_operator(p, N)
    Q = build_conserved_Q(p, N)
    Qa, Qb = Q[: p.n - 1], Q[p.n - 1:]

    def fam(xs, ys, same=False):
        vals = [commutator_norm(x, y) for i, x in enumerate(xs) for j, y in enumerate(ys) if not same or i < j]
        return max(vals, default=0.0)

    families = {
        "[H, N]": fam([H], [Nop]),
        "[H, Q]": fam([H], Qa),
        "[H, Qbar]": fam([H], Qb),
        "[N, Q]": fam([Nop], Qa),
        "[N, Qbar]": fam([Nop], Qb),
        "[Q, Q]": fam(Qa, Qa, same=True),
        "[Q, Qbar]": fam(Qa, Qb),
        "[Qbar, Qbar]": fam(Qb, Qb, same=True),
    }
    out = [_le(S, name, val, 1e-10) for name, val in families.items()]
    ops = [H, Nop, *Q]
    out.append(_eq(S, "conserved operator count", len(ops), p.n + p.m))
    stack = np.array([o.data.ravel() for o in ops])
    sv = np.linalg.svd(stack, compute_uv=False)
    rank = int((sv > 1e-10 * sv[0]).sum())
    out.append(_eq(S, "linearly independent conserved operators", rank, p.n + p.m, f"at N={N}"))
    return out


def completeness_suite(p: CouplingParams, N: int, max_modes: int = 7, max_N: int = 8) -> list[Check]:
    S = "completeness"
    cc = completeness_count(p.n, p.m, N)
    dim = enumerate_basis(p.modes, N).dim
    out = [_eq(S, "sum_r (N-r+1) x labels(r) = Fock dimension", cc["total"], dim, f"per_r={cc['per_r']}")]
    labels = enumerate_sectors(p.n, p.m, N)
    by_group: dict[tuple[int, int], int] = {}
    for lab in labels:
        by_group[lab.group] = by_group.get(lab.group, 0) + 1
    bad = [g for g, c in by_group.items() if c != degeneracy(*g, p.n, p.m)]
    out.append(_eq(S, "labels per (L,K) group = degeneracy formula", len(bad), 0))
    states = sum((N - g[0] - g[1] + 1) * degeneracy(*g, p.n, p.m) for g in by_group)
    out.append(_eq(S, "states from grouped sectors = Fock dimension", states, dim))
    failures = 0
    cases = 0
    for modes in range(2, max_modes + 1):
        for n in range(1, modes):
            for NN in range(max_N + 1):
                cases += 1
                c = completeness_count(n, modes - n, NN)
                failures += c["total"] != c["dimension"]
    out.append(_eq(S, f"counting identity, all n+m<={max_modes}, N<={max_N}", failures, 0, f"{cases} cases"))
    return out


def bethe_suite(p: CouplingParams, N: int, cfg: SolverConfig = SolverConfig(), tol: float = 1e-6) -> list[Check]:
    S = "bethe"
    sp = to_spectral(p)
    comp = p.complement()
    groups = bae_spectrum(p, N, cfg, exhaustive=True)
    state_res = q_dev = 0.0
    n_states = 0
    short = []
    spread = 0.0
    for g in groups:
        for res in g.results:
            if not res.complete:
                short.append(str(res.sector))
            spread = max(spread, _energy_spread(g.results[0].energies, res.energies))
            for sol in res.solutions:
                psi = aba.bethe_state(sol.roots.roots, res.sector, p, sp, N, comp)
                state_res = max(state_res, aba.hamiltonian_residual(psi, sol.energy.real, p))
                q_dev = max(q_dev, max(aba.q_eigenvalue_check(psi, res.sector, comp), default=0.0))
                n_states += 1
    out = [
        _eq(S, "sectors short of N-r+1 valid solutions", len(short), 0, ", ".join(short)),
        _le(S, "Bethe state residual |H psi - E psi|/|psi|", state_res, 1e-6, f"{n_states} states"),
        _le(S, "Q eigenvalue deviation", q_dev, 1e-8),
        _le(S, "energy spread within degenerate groups", spread, 1e-8),
    ]
    report, _ = match_model(p, N, cfg, tol)
    out.append(
        Check(S, "BAE vs ED one-to-one match", report.max_gap, tol, report.success,
              f"{len(report.pairs)}/{len(report.ed_eigenvalues)} matched")
    )
    return out


def _energy_spread(a, b) -> float:
    if len(a) != len(b):
        return float("inf")
    return float(np.abs(np.subtract(sorted(a), sorted(b))).max(initial=0.0))


def run_suite(name: str, p: CouplingParams, N: int, seed: int = 0, cfg: SolverConfig = SolverConfig()) -> list[Check]:
    runners: dict[str, Callable[[], list[Check]]] = {
        "algebra": lambda: algebra_suite(p, N, seed),
        "conserved": lambda: conserved_suite(p, N),
        "completeness": lambda: completeness_suite(p, N),
        "bethe": lambda: bethe_suite(p, N, cfg),
    }
    if name == "all":
        return [c for s in SUITES for c in runners[s]()]
    if name not in runners:
        raise ValueError(f"unknown suite {name!r}")
    return runners[name]()
