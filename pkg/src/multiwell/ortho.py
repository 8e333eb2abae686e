"""Orthonormal complements of the tunneling coefficient vectors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12


def orthonormal_complement(v: Sequence[float]) -> list[np.ndarray]:
    """Deterministic orthonormal basis of the hyperplane orthogonal to unit vector ``v``.

    A Householder reflection maps ``e_1`` to ``±v``; its remaining columns span
    ``v``-perp. Each returned vector is flipped so its first entry with
    magnitude above 1e-12 is positive.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a non-empty 1-d vector")
    if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
        raise ValueError(f"vector must have unit norm, got |v| = {np.linalg.norm(v)!r}")
    d = v.size
    if d == 1:
        return []
    w = v.copy()
    w[0] += 1.0 if v[0] >= 0 else -1.0
    H = np.eye(d) - 2.0 * np.outer(w, w) / (w @ w)
    out = []
    for col in H[:, 1:].T:
        lead = col[np.flatnonzero(np.abs(col) > NORM_TOL)[0]]
        out.append(col if lead > 0 else -col)
    return out


@dataclass(frozen=True)
class ComplementBasis:
    """Complement vectors ``mu`` (to alpha, n-1 of them) and ``nu`` (to beta, m-1)."""

    n: int
    m: int
    mu: tuple[np.ndarray, ...]
    nu: tuple[np.ndarray, ...]

    @classmethod
    def from_couplings(cls, alpha: Sequence[float], beta: Sequence[float]) -> ComplementBasis:
        return cls(
            len(alpha),
            len(beta),
            tuple(orthonormal_complement(alpha)),
            tuple(orthonormal_complement(beta)),
        )

    def check(self, alpha, beta, tol: float = NORM_TOL) -> float:
        """Largest deviation of the frame conditions; raises if above ``tol``."""
        worst = 0.0
        for vecs, ref in ((self.mu, alpha), (self.nu, beta)):
            frame = np.array([np.asarray(ref, float), *vecs])
            worst = max(worst, float(np.abs(frame @ frame.T - np.eye(len(frame))).max()))
        if worst > tol:
            raise ValueError(f"complement frame deviates from orthonormal by {worst:.3e}")
        return worst
