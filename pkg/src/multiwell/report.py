"""JSON reports and their re-checking.

Top-level keys (all optional except ``schema``, ``command`` and ``model``)::

    schema       "multiwell-report/1"
    command      spectrum | bae | verify | match
    model        {n, m, N, U, mu, t, alpha[], beta[], eta, omega}
    solver       SolverConfig fields
    eigenvalues  ascending ED eigenvalues
    sectors[]    {label, l[], k[], L, K, r, expected, complete, bae,
                  closed_form_energy, solutions[], spurious[]}
                 each solution: {roots[] as [re, im], energy as [re, im],
                                 diagnostics{}, verdict, reasons[]}
    matching     {tol, success, max_gap, pairs[], unmatched_ed[], unmatched_bae[],
                  bae_entries[], notes[]}
    checks[]     {suite, name, value, threshold, op, passed, detail}

Non-finite numbers are written as the strings "inf", "-inf" and "nan" so the
file stays strict JSON.
"""
from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path

from .bae import BaeRoots, SectorLabel, SectorResult, SolverConfig, classify_solution, judge
from .model import CouplingParams, to_spectral
from .spectrum import SpectrumReport, match_spectra
from .verify import Check

SCHEMA = "multiwell-report/1"


def _num(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _unnum(x) -> float:
    return float(x)  # float() parses "inf"/"nan" too


def _cplx(z: complex) -> list:
    return [_num(z.real), _num(z.imag)]


def _uncplx(pair) -> complex:
    return complex(_unnum(pair[0]), _unnum(pair[1]))


def model_dict(p: CouplingParams, N: int) -> dict:
    out = {"n": p.n, "m": p.m, "N": N, "U": p.U, "mu": p.mu, "t": p.t,
           "alpha": list(p.alpha), "beta": list(p.beta)}
    try:
        sp = to_spectral(p)
        out.update(eta=sp.eta, omega=sp.omega)
    except ValueError:
        out.update(eta=None, omega=None)
    return out


def model_from_dict(d: dict) -> tuple[CouplingParams, int]:
    return CouplingParams(d["U"], d["mu"], d["t"], tuple(d["alpha"]), tuple(d["beta"])), int(d["N"])


def solver_dict(cfg: SolverConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["u_samples"] = list(d["u_samples"])
    return d


def solver_from_dict(d: dict) -> SolverConfig:
    d = dict(d)
    d["u_samples"] = tuple(d["u_samples"])
    return SolverConfig(**d)


def solution_dict(sol) -> dict:
    return {
        "roots": [_cplx(v) for v in sol.roots.roots],
        "energy": _cplx(sol.energy),
        "diagnostics": {k: _num(v) for k, v in sol.diagnostics.items()},
        "verdict": sol.verdict,
        "reasons": list(sol.reasons),
    }


def sector_dict(label: SectorLabel, result: SectorResult | None = None,
                closed_form: float | None = None, bae: str = "") -> dict:
    d = {"label": str(label), "l": list(label.l), "k": list(label.k),
         "L": label.L, "K": label.K, "r": label.r, "bae": bae}
    if result is None:
        d.update(expected=1, complete=True, closed_form_energy=closed_form,
                 solutions=[], spurious=[])
    else:
        d.update(expected=result.expected, complete=result.complete, closed_form_energy=None,
                 solutions=[solution_dict(s) for s in result.solutions],
                 spurious=[solution_dict(s) for s in result.spurious])
    return d


def matching_dict(rep: SpectrumReport) -> dict:
    return {
        "tol": rep.tol, "success": rep.success, "max_gap": rep.max_gap,
        "pairs": [list(p) for p in rep.pairs],
        "unmatched_ed": rep.unmatched_ed, "unmatched_bae": rep.unmatched_bae,
        "ed_eigenvalues": rep.ed_eigenvalues, "bae_entries": rep.bae_entries,
        "notes": rep.notes,
    }


def check_dict(c: Check) -> dict:
    d = c.to_dict()
    d["value"] = _num(d["value"])
    d["threshold"] = _num(d["threshold"])
    return d


def new_report(command: str, p: CouplingParams, N: int, cfg: SolverConfig | None = None) -> dict:
    rep = {"schema": SCHEMA, "command": command, "model": model_dict(p, N)}
    if cfg is not None:
        rep["solver"] = solver_dict(cfg)
    return rep


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False)


def write_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(dumps(report) + "\n")


def load_report(path: str | Path) -> dict:
    rep = json.loads(Path(path).read_text())
    if rep.get("schema") != SCHEMA:
        raise ValueError(f"unsupported report schema {rep.get('schema')!r}")
    return rep


def _check_passes(c: dict) -> bool:
    v, thr = _unnum(c["value"]), _unnum(c["threshold"])
    return v == thr if c.get("op", "<") == "==" else v < thr


def recheck(report: dict, recompute: bool = False) -> list[str]:
    """Re-derive every verdict in ``report``; return a description of each disagreement.

    Verdicts are re-judged from the stored diagnostics. With ``recompute`` the
    diagnostics themselves are rebuilt from the stored model and roots.
    """
    out = []
    tol = report.get("solver", {}).get("classify_tol", SolverConfig.classify_tol)
    if recompute and report.get("sectors"):
        p, N = model_from_dict(report["model"])
        cfg = solver_from_dict(report["solver"]) if "solver" in report else SolverConfig()
    for sec in report.get("sectors", []):
        for kind in ("solutions", "spurious"):
            for i, sol in enumerate(sec[kind]):
                energy = _uncplx(sol["energy"])
                diag = {k: _unnum(v) for k, v in sol["diagnostics"].items()}
                verdict = "spurious" if judge(diag, energy, tol) else "valid"
                if recompute:
                    label = SectorLabel(sec["l"], sec["k"])
                    roots = BaeRoots(tuple(_uncplx(v) for v in sol["roots"]), label)
                    verdict = classify_solution(roots, p, N, cfg).verdict
                if verdict != sol["verdict"]:
                    out.append(f"sector {sec['label']} {kind}[{i}]: stored {sol['verdict']}, got {verdict}")
    for c in report.get("checks", []):
        if _check_passes(c) != c["passed"]:
            out.append(f"check {c['suite']}/{c['name']}: stored passed={c['passed']}")
    m = report.get("matching")
    if m:
        bae = [(e["energy"], e["degeneracy"]) for e in m["bae_entries"]]
        again = match_spectra(m["ed_eigenvalues"], bae, m["tol"])
        if again.success != m["success"]:
            out.append(f"matching: stored success={m['success']}, got {again.success}")
    return out
