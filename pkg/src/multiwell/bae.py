"""Bethe ansatz equations: sector enumeration, multi-start root search, classification.

For a sector with ``L = sum(l)``, ``K = sum(k)`` and ``M = N - r`` unknowns the
equations are solved in their denominator-cleared form::

    eta^2 (v_i + omega + eta L)(v_i - omega + eta K) prod_{j!=i} (v_i - v_j + eta)
        - prod_{j!=i} (v_i - v_j - eta) = 0
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import linear_sum_assignment

from .aba import bethe_state, hamiltonian_residual, transfer_eigenvalue
from .model import CouplingParams, SpectralParams, to_spectral

log = logging.getLogger(__name__)

DEFAULT_U_SAMPLES = (0.37, -1.21, 2.03)


@dataclass(frozen=True, order=True)
class SectorLabel:
    """Pseudovacuum exponents ``l`` (A-side complement) and ``k`` (B-side complement)."""

    l: tuple[int, ...]
    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "l", tuple(int(x) for x in self.l))
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        if any(x < 0 for x in self.l + self.k):
            raise ValueError("sector exponents must be non-negative")

    @property
    def L(self) -> int:
        return sum(self.l)

    @property
    def K(self) -> int:
        return sum(self.k)

    @property
    def r(self) -> int:
        return self.L + self.K

    @property
    def group(self) -> tuple[int, int]:
        """Labels with equal ``(L, K)`` share one set of Bethe equations."""
        return (self.L, self.K)

    def __str__(self) -> str:
        return ",".join(map(str, self.l)) + ";" + ",".join(map(str, self.k))

    @classmethod
    def parse(cls, text: str, n: int, m: int) -> SectorLabel:
        """Parse ``"l1,..;k1,.."``. The ``;`` may be dropped when one side has no entries."""
        left, sep, right = text.partition(";")
        if not sep:
            if m == 1:
                left, right = text, ""
            elif n == 1:
                left, right = "", text
            else:
                raise ValueError(f"sector label {text!r} needs a ';' between l and k")
        try:
            l = tuple(int(x) for x in left.split(",") if x.strip())
            k = tuple(int(x) for x in right.split(",") if x.strip())
        except ValueError:
            raise ValueError(f"sector label {text!r} has a non-integer entry") from None
        if len(l) != n - 1 or len(k) != m - 1:
            raise ValueError(f"sector label {text!r} needs {n - 1} l-entries and {m - 1} k-entries")
        return cls(l, k)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_sectors(n: int, m: int, N: int) -> list[SectorLabel]:
    """Every label with ``r <= N``, ordered by ``r``, then ``L`` descending."""
    if n < 1 or m < 1:
        raise ValueError("well counts must be >= 1")
    out = []
    for r in range(N + 1):
        for L in range(r, -1, -1):
            for l in _compositions(L, n - 1):
                for k in _compositions(r - L, m - 1):
                    out.append(SectorLabel(l, k))
    return out


def group_sectors(labels: Sequence[SectorLabel]) -> dict[tuple[int, int], list[SectorLabel]]:
    groups: dict[tuple[int, int], list[SectorLabel]] = {}
    for lab in labels:
        groups.setdefault(lab.group, []).append(lab)
    return groups


@dataclass(frozen=True)
class SolverConfig:
    max_starts: int = 500
    newton_tol: float = 1e-12
    max_iter: int = 200
    dedup_tol: float = 1e-7
    classify_tol: float = 1e-6
    seed: int = 0
    u_samples: tuple[float, ...] = DEFAULT_U_SAMPLES
    baxter_seeds: bool = True


def canonical_roots(roots: Sequence[complex]) -> tuple[complex, ...]:
    """Sort by real part, then imaginary part."""
    return tuple(sorted((complex(v) for v in roots), key=lambda z: (z.real, z.imag)))


@dataclass(frozen=True)
class BaeRoots:
    roots: tuple[complex, ...]
    sector: SectorLabel

    def __post_init__(self):
        object.__setattr__(self, "roots", canonical_roots(self.roots))

    def __len__(self) -> int:
        return len(self.roots)


@dataclass
class BaeSolution:
    roots: BaeRoots
    energy: complex
    diagnostics: dict[str, float]
    verdict: str
    reasons: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.verdict == "valid"


class PoleConfiguration(ValueError):
    """Two roots sit at ``v_i - v_j = -eta``, a pole of the uncleared equations."""


# -- residual and Jacobian ---------------------------------------------------


def _sector_coeffs(sector: SectorLabel, sp: SpectralParams) -> tuple[float, float]:
    # a(v) = eta^2 (v + s1)(v + s2)
    return sp.omega + sp.eta * sector.L, -sp.omega + sp.eta * sector.K


def _cleared_system(V: np.ndarray, s1: float, s2: float, eta: float, jac: bool):
    """Residual ``F`` (S, M) and optionally Jacobian ``J`` (S, M, M) for a batch of root vectors."""
    S, M = V.shape
    a = eta**2 * (V + s1) * (V + s2)
    diff = V[:, :, None] - V[:, None, :]
    eye = np.eye(M, dtype=bool)
    fp = np.where(eye, 1.0, diff + eta)
    fm = np.where(eye, 1.0, diff - eta)
    Pp = fp.prod(axis=2)
    Pm = fm.prod(axis=2)
    F = a * Pp - Pm
    if not jac:
        return F, None
    da = eta**2 * (2 * V + s1 + s2)
    # excl[s, i, j] = prod over k not in {i, j} of f[s, i, k]
    mask = np.eye(M, dtype=bool)[None, None, :, :]  # k == j
    Ep = np.where(mask, 1.0, fp[:, :, None, :]).prod(axis=3)
    Em = np.where(mask, 1.0, fm[:, :, None, :]).prod(axis=3)
    J = -a[:, :, None] * Ep + Em
    off = ~eye
    diag = da * Pp + a * np.where(off, Ep, 0).sum(axis=2) - np.where(off, Em, 0).sum(axis=2)
    J[:, eye] = diag
    return F, J


def bae_residual(roots: BaeRoots | Sequence[complex], sector: SectorLabel, params, N: int) -> np.ndarray:
    """Cleared-form residual vector; raises :class:`PoleConfiguration` on ``v_i - v_j = -eta``.

    ``params`` may be :class:`CouplingParams` or :class:`SpectralParams`.
    """
    sp = params if isinstance(params, SpectralParams) else to_spectral(params)
    v = np.asarray(roots.roots if isinstance(roots, BaeRoots) else roots, dtype=complex)
    if v.size != N - sector.r:
        raise ValueError(f"sector needs {N - sector.r} roots, got {v.size}")
    if v.size > 1:
        d = v[:, None] - v[None, :] + sp.eta
        np.fill_diagonal(d, 1.0)
        if np.abs(d).min() < 1e-12 * max(1.0, abs(sp.eta)):
            raise PoleConfiguration("roots differ by exactly -eta")
    s1, s2 = _sector_coeffs(sector, sp)
    F, _ = _cleared_system(v[None, :], s1, s2, sp.eta, jac=False)
    return F[0]


# -- energies --------------------------------------------------------------------


def closed_form_energy(sector: SectorLabel, p: CouplingParams) -> float:
    """Energy of an ``r = N`` sector: ``U (L - K)^2 + mu (L - K)``."""
    d = sector.L - sector.K
    return p.U * d * d + p.mu * d


def _standoff_samples(roots: Sequence[complex], samples: Sequence[float], standoff: float = 1e-3):
    out = []
    for u in samples:
        while any(abs(u - v) <= standoff for v in roots):
            u += 0.1113
        out.append(u)
    return out


def energy_from_roots(
    roots: BaeRoots | Sequence[complex],
    sector: SectorLabel,
    p: CouplingParams,
    N: int,
    u_samples: Sequence[float] = DEFAULT_U_SAMPLES,
) -> tuple[complex, float]:
    """Energy averaged over ``u_samples`` and the largest pairwise gap between samples.

    A genuine solution gives a ``u``-independent value, so the gap is a validity test.
    """
    sp = to_spectral(p)
    eta, w = sp.eta, sp.omega
    v = list(roots.roots if isinstance(roots, BaeRoots) else roots)
    vals = []
    for u in _standoff_samples(v, u_samples):
        lam = transfer_eigenvalue(u, v, sector, sp)
        vals.append(p.t * (lam + w**2 - u**2 - eta**-2 - u * eta * N - eta**2 * N**2 / 4))
    vals = np.array(vals)
    gap = float(np.abs(vals[:, None] - vals[None, :]).max())
    return complex(vals.mean()), gap


# -- Baxter TQ seeds -------------------------------------------------------------


def baxter_solutions(sector: SectorLabel, sp: SpectralParams, N: int) -> list[tuple[complex, np.ndarray]]:
    """Eigen-solutions of the TQ relation ``lambda(u) Q(u) = a0(u) Q(u+eta) + eta^-2 Q(u-eta)``.

    With ``lambda(u) = u^2 + eta N u + e`` the relation is linear in the
    coefficients of the degree-``M`` polynomial ``Q``, so the ``M+1`` pairs
    ``(e, roots of Q)`` follow from one small eigenproblem. Used to seed Newton.
    """
    M = N - sector.r
    eta = sp.eta
    s1, s2 = _sector_coeffs(sector, sp)
    a0 = P.polymul([s1, 1.0], [s2, 1.0])
    lam_part = np.array([0.0, eta * N, 1.0])
    T = np.zeros((M + 1, M + 1), dtype=complex)
    for d in range(M + 1):
        up = P.polypow([eta, 1.0], d)
        down = P.polypow([-eta, 1.0], d)
        mono = np.zeros(d + 1)
        mono[d] = 1.0
        img = P.polysub(P.polyadd(P.polymul(a0, up), down / eta**2), P.polymul(lam_part, mono))
        img = np.pad(img, (0, max(0, M + 3 - len(img))))
        T[:, d] = img[: M + 1]
    evals, evecs = np.linalg.eig(T)
    out = []
    for e, q in zip(evals, evecs.T):
        if abs(q[-1]) < 1e-14 * np.abs(q).max():
            continue
        out.append((complex(e), P.polyroots(q / q[-1]) if M > 0 else np.zeros(0)))
    return out


# -- Newton ------------------------------------------------------------------------


def _starts(sector: SectorLabel, sp: SpectralParams, N: int, cfg: SolverConfig) -> np.ndarray:
    M = N - sector.r
    eta, w = sp.eta, sp.omega
    rng = np.random.default_rng(cfg.seed)
    structured = []
    if cfg.baxter_seeds:
        structured += [roots for _, roots in baxter_solutions(sector, sp, N)]
    bases = [w, -w, -w - eta * sector.L, w - eta * sector.K, 0.0]
    for base in bases:
        ladder = base - eta * np.arange(M)
        structured.append(ladder + 1e-2 * (1 + 1j) * np.arange(1, M + 1))
        structured.append(base + 0.3 * np.exp(2j * np.pi * (np.arange(M) + 0.25) / max(M, 1)))
    radius = 1.0 + 2.0 * (abs(eta) * N + abs(w))
    r = radius * np.sqrt(rng.random((cfg.max_starts, M)))
    phase = 2 * np.pi * rng.random((cfg.max_starts, M))
    rand = r * np.exp(1j * phase)
    if structured:
        return np.vstack([np.array(structured, dtype=complex).reshape(-1, M), rand])
    return rand


def newton_batch(
    V0: np.ndarray, sector: SectorLabel, sp: SpectralParams, cfg: SolverConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on every row of ``V0``; returns final roots and a convergence mask."""
    s1, s2 = _sector_coeffs(sector, sp)
    eta = sp.eta
    V = np.array(V0, dtype=complex)
    S, M = V.shape
    active = np.ones(S, dtype=bool)
    converged = np.zeros(S, dtype=bool)
    F, J = _cleared_system(V, s1, s2, eta, jac=True)
    fnorm = np.linalg.norm(F, axis=1)
    for _ in range(cfg.max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Fa, Ja = F[idx], J[idx]
        try:
            step = -np.linalg.solve(Ja, Fa[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = -np.einsum("sij,sj->si", np.linalg.pinv(Ja), Fa)
        damp = np.ones(idx.size)
        trial = V[idx] + step
        Ft, _ = _cleared_system(trial, s1, s2, eta, jac=False)
        tn = np.linalg.norm(Ft, axis=1)
        for _ in range(12):
            bad = ~(tn < fnorm[idx]) & np.isfinite(fnorm[idx])
            if not bad.any():
                break
            damp[bad] *= 0.5
            trial[bad] = V[idx[bad]] + damp[bad, None] * step[bad]
            Fb, _ = _cleared_system(trial[bad], s1, s2, eta, jac=False)
            tn[bad] = np.linalg.norm(Fb, axis=1)
        V[idx] = trial
        Fn, Jn = _cleared_system(trial, s1, s2, eta, jac=True)
        F[idx], J[idx], fnorm[idx] = Fn, Jn, tn
        small_step = damp * np.linalg.norm(step, axis=1) <= cfg.newton_tol * (1 + np.linalg.norm(trial, axis=1))
        small_res = tn <= cfg.newton_tol * _residual_scale(trial, s1, s2, eta)
        done = (small_step & (damp == 1.0)) | small_res
        blown = ~np.all(np.isfinite(trial), axis=1) | (np.abs(trial).max(axis=1) > 1e8)
        converged[idx[done & ~blown]] = True
        active[idx[done | blown]] = False
    # polish: a few full steps, kept only where they lower the residual
    for _ in range(3):
        good = np.flatnonzero(np.all(np.isfinite(V), axis=1) & np.isfinite(fnorm))
        if good.size == 0:
            break
        try:
            step = -np.linalg.solve(J[good], F[good][..., None])[..., 0]
        except np.linalg.LinAlgError:
            break
        trial = V[good] + step
        Ft, Jt = _cleared_system(trial, s1, s2, eta, jac=True)
        tn = np.linalg.norm(Ft, axis=1)
        better = tn < fnorm[good]
        sel = good[better]
        V[sel], F[sel], J[sel], fnorm[sel] = trial[better], Ft[better], Jt[better], tn[better]
    # accept rows that stalled at a tiny residual
    scale = _residual_scale(V, s1, s2, eta)
    ok = np.all(np.isfinite(V), axis=1)
    stalled = ok & ~converged & (np.nan_to_num(fnorm, nan=np.inf) <= 1e3 * cfg.newton_tol * scale)
    return V, converged | stalled


def _residual_scale(V: np.ndarray, s1: float, s2: float, eta: float) -> np.ndarray:
    # magnitude of the largest term in each cleared equation
    M = V.shape[1]
    mag = 1.0 + np.abs(V).max(axis=1) + abs(eta) + abs(s1) + abs(s2)
    return eta**2 * mag ** (M + 1) + mag ** max(M - 1, 0)


def _multiset_distance(x: np.ndarray, y: np.ndarray) -> float:
    cost = np.abs(x[:, None] - y[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max(initial=0.0))


def deduplicate(candidates: Sequence[np.ndarray], tol: float) -> list[np.ndarray]:
    """Keep one representative per cluster of root multisets within ``tol``."""
    reps: list[np.ndarray] = []
    sums: list[complex] = []
    for cand in candidates:
        s = cand.sum()
        dup = False
        for rep, rs in zip(reps, sums):
            if abs(rs - s) > len(cand) * tol:
                continue
            if _multiset_distance(cand, rep) <= tol:
                dup = True
                break
        if not dup:
            reps.append(np.asarray(canonical_roots(cand), dtype=complex))
            sums.append(s)
    return reps


# -- classification ----------------------------------------------------------------


def judge(diagnostics: dict[str, float], energy: complex, tol: float) -> list[str]:
    """Reasons a candidate is spurious, computed from its diagnostics alone.

    Thresholds scale with ``max(1, |Re E|)``. An empty list means valid.
    """
    d = diagnostics
    escale = max(1.0, abs(energy.real))
    reasons = []
    if d["min_root_separation"] < tol:
        reasons.append("coincident roots")
    if d["pole_configuration"]:
        reasons.append("pole configuration")
    gap = d["u_independence_gap"]
    if not math.isfinite(gap) or gap > tol * escale:
        reasons.append("energy depends on u")
    if not abs(energy.imag) < 1e-8 * escale:
        reasons.append("complex energy")
    if not d["state_norm"] >= 1e-10:
        reasons.append("vanishing Bethe state")
    elif not d["state_residual"] <= tol * escale:
        reasons.append("Bethe state is not an eigenvector")
    return reasons


def classify_solution(
    candidate: BaeRoots, p: CouplingParams, N: int, cfg: SolverConfig = SolverConfig()
) -> BaeSolution:
    """Run the validity tests on a converged root set (see :func:`judge`)."""
    sp = to_spectral(p)
    sector = candidate.sector
    v = np.asarray(candidate.roots, dtype=complex)
    diag = {
        "bae_residual": 0.0,
        "u_independence_gap": math.inf,
        "state_residual": math.inf,
        "state_norm": 0.0,
        "min_root_separation": math.inf,
        "pole_configuration": 0.0,
    }
    if v.size > 1:
        diag["min_root_separation"] = float(np.abs(v[:, None] - v[None, :])[~np.eye(v.size, dtype=bool)].min())
    try:
        res = bae_residual(candidate, sector, sp, N)
        if v.size:
            s1, s2 = _sector_coeffs(sector, sp)
            diag["bae_residual"] = float(np.abs(res).max() / _residual_scale(v[None, :], s1, s2, sp.eta)[0])
    except PoleConfiguration:
        diag["pole_configuration"] = 1.0
    energy, gap = energy_from_roots(candidate, sector, p, N, cfg.u_samples)
    diag["u_independence_gap"] = gap
    if diag["min_root_separation"] >= cfg.classify_tol and np.isfinite(energy):
        psi = bethe_state(tuple(v), sector, p, sp, N)
        diag["state_norm"] = psi.norm
        if psi.norm >= 1e-10:
            diag["state_residual"] = hamiltonian_residual(psi, energy.real, p)
    reasons = judge(diag, energy, cfg.classify_tol)
    return BaeSolution(candidate, energy, diag, "spurious" if reasons else "valid", reasons)


# -- sector solve ------------------------------------------------------------------


@dataclass
class SectorResult:
    sector: SectorLabel
    expected: int
    solutions: list[BaeSolution]
    spurious: list[BaeSolution]

    @property
    def complete(self) -> bool:
        return len(self.solutions) == self.expected

    @property
    def energies(self) -> list[float]:
        return sorted(s.energy.real for s in self.solutions)


def solve_bae(
    sector: SectorLabel, p: CouplingParams, N: int, cfg: SolverConfig = SolverConfig()
) -> SectorResult:
    """Multi-start Newton solve of one sector's equations.

    ``N - r + 1`` valid solutions are expected; a shortfall is logged and
    visible via ``SectorResult.complete`` rather than raised.
    """
    if sector.r >= N:
        raise ValueError(f"sector {sector} has r={sector.r} >= N={N}; it has no Bethe equations")
    sp = to_spectral(p)
    V0 = _starts(sector, sp, N, cfg)
    V, ok = newton_batch(V0, sector, sp, cfg)
    uniq = deduplicate([row for row in V[ok]], cfg.dedup_tol)
    valid, spurious = [], []
    for roots in uniq:
        sol = classify_solution(BaeRoots(tuple(roots), sector), p, N, cfg)
        (valid if sol.valid else spurious).append(sol)
    valid.sort(key=lambda s: s.energy.real)
    result = SectorResult(sector, N - sector.r + 1, valid, spurious)
    if not result.complete:
        log.warning(
            "sector %s: found %d valid solutions, expected %d", sector, len(valid), result.expected
        )
    return result

