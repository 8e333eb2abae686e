"""Command-line front end.

Exit codes: 0 success, 1 verification or matching failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from typing import Sequence


from . import report as rp
from .bae import SectorLabel, closed_form_energy, enumerate_sectors, solve_bae
from .config import FORMATS, ConfigError, RunConfig, load_config
from .model import CouplingParams, ParameterError, build_hamiltonian, to_spectral
from .spectrum import bae_spectrum, diagonalize, match_spectra
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_CONFIG):
        super().__init__(message)
        self.code = code


# -- table rendering ---------------------------------------------------------------


def render_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    line = "-+-".join("-" * w for w in widths)
    fmt = lambda r: " | ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    return "\n".join([fmt(cells[0]), line] + [fmt(r) for r in cells[1:]])


def _fmt(x: float, digits: int = 10) -> str:
    return f"{x:.{digits}g}"


def _fmt_root(z: complex) -> str:
    if abs(z.imag) < 1e-12 * max(1.0, abs(z.real)):
        return _fmt(z.real)
    return f"{_fmt(z.real)}{z.imag:+.{10}g}i"


def pseudovacuum_text(label: SectorLabel) -> str:
    def side(sym, exps):
        out = []
        for i, e in enumerate(exps, 1):
            if e:
                name = sym if len(exps) == 1 else f"{sym}{i}"
                out.append(f"({name}†)^{e}" if e > 1 else f"{name}†")
        return out

    return " ".join(side("Γ", label.l) + side("Γ̄", label.k) + ["|0>"])


def bae_text(label: SectorLabel, p: CouplingParams, N: int) -> str:
    M = N - label.r
    if M == 0:
        return "none"
    sp = to_spectral(p)
    s1, s2 = sp.omega + sp.eta * label.L, -sp.omega + sp.eta * label.K
    lhs = f"η²(v_i{s1:+.6g})(v_i{s2:+.6g})"
    if M == 1:
        return f"{lhs} = 1"
    return f"{lhs} = Π_j≠i (v_i-v_j-η)/(v_i-v_j+η)"


# -- commands ----------------------------------------------------------------------


def _spectral_or_fail(p: CouplingParams) -> None:
    try:
        to_spectral(p)
    except ParameterError as exc:
        raise CliError(f"this command needs the Bethe ansatz parametrization: {exc}") from None


def cmd_spectrum(cfg: RunConfig, args) -> tuple[int, dict, str]:
    p, N = cfg.model.params, cfg.model.N
    ev = diagonalize(build_hamiltonian(p, N))
    rep = rp.new_report("spectrum", p, N)
    rep["eigenvalues"] = [float(x) for x in ev]
    text = render_table(["#", "energy"], [(i, _fmt(e)) for i, e in enumerate(ev, 1)])
    return EXIT_OK, rep, f"{len(ev)} eigenvalues (n={p.n}, m={p.m}, N={N})\n{text}"


def _select_sectors(p: CouplingParams, N: int, sector: str | None, r: int | None) -> list[SectorLabel]:
    labels = enumerate_sectors(p.n, p.m, N)
    if sector is not None:
        try:
            want = SectorLabel.parse(sector, p.n, p.m)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        if want not in labels:
            raise CliError(f"unknown sector {sector!r}: r = {want.r} exceeds N = {N}")
        labels = [want]
    if r is not None:
        if not 0 <= r <= N:
            raise CliError(f"--r must lie in 0..{N}")
        labels = [lab for lab in labels if lab.r == r]
    return labels


def cmd_bae(cfg: RunConfig, args) -> tuple[int, dict, str]:
    p, N, scfg = cfg.model.params, cfg.model.N, cfg.solver
    _spectral_or_fail(p)
    labels = _select_sectors(p, N, args.sector, args.r)
    rep = rp.new_report("bae", p, N, scfg)
    rep["sectors"] = []
    rows, warnings = [], []
    for lab in labels:
        first = [str(lab), pseudovacuum_text(lab), bae_text(lab, p, N)]
        if lab.r == N:
            e = closed_form_energy(lab, p)
            rep["sectors"].append(rp.sector_dict(lab, closed_form=e, bae="none"))
            rows.append(first + ["no associated BAEs", _fmt(e), "", "closed form"])
            continue
        res = solve_bae(lab, p, N, scfg)
        rep["sectors"].append(rp.sector_dict(lab, res, bae=bae_text(lab, p, N)))
        if not res.complete:
            warnings.append(
                f"sector {lab}: {len(res.solutions)} valid solutions found, {res.expected} expected"
            )
        shown = res.solutions + (res.spurious if args.show_spurious else [])
        if not shown:
            rows.append(first + ["no valid solution", "", "", ""])
        for i, sol in enumerate(shown):
            lead = first if i == 0 else ["", "", ""]
            roots = ", ".join(f"v{j}={_fmt_root(v)}" for j, v in enumerate(sol.roots.roots, 1))
            verdict = sol.verdict if sol.valid else f"spurious ({'; '.join(sol.reasons)})"
            rows.append(lead + [roots, _fmt(sol.energy.real),
                                f"{sol.diagnostics['state_residual']:.1e}", verdict])
        if res.spurious and not args.show_spurious:
            rows.append(["", "", "", f"({len(res.spurious)} spurious candidates rejected)", "", "", ""])
    text = render_table(["l;k", "pseudovacuum", "BAE", "BAE solution", "energy", "residual", "verdict"], rows)
    if warnings:
        text += "\n\nWARNING: incomplete sectors (raise max_starts or change seed)\n"
        text += "\n".join(f"  {w}" for w in warnings)
        rep["warnings"] = warnings
    return EXIT_OK, rep, text


def cmd_verify(cfg: RunConfig, args) -> tuple[int, dict, str]:
    p, N = cfg.model.params, cfg.model.N
    if args.suite in ("algebra", "bethe", "all"):
        _spectral_or_fail(p)
    checks = run_suite(args.suite, p, N, cfg.solver.seed, cfg.solver)
    rep = rp.new_report("verify", p, N, cfg.solver)
    rep["checks"] = [rp.check_dict(c) for c in checks]
    rows = [
        (c.suite, c.name, f"{c.value:.3e}" if c.op == "<" else _fmt(c.value),
         f"{c.op} {c.threshold:.0e}" if c.op == "<" else f"{c.op} {_fmt(c.threshold)}",
         "PASS" if c.passed else "FAIL", c.detail)
        for c in checks
    ]
    failed = sum(not c.passed for c in checks)
    text = render_table(["suite", "check", "value", "required", "result", "detail"], rows)
    text += f"\n\n{len(checks) - failed}/{len(checks)} checks passed"
    return (EXIT_FAIL if failed else EXIT_OK), rep, text


def cmd_match(cfg: RunConfig, args) -> tuple[int, dict, str]:
    p, N = cfg.model.params, cfg.model.N
    _spectral_or_fail(p)
    bae_p = p
    if args.perturb_bae_mu:
        bae_p = dataclasses.replace(p, mu=p.mu + args.perturb_bae_mu)
    ed = diagonalize(build_hamiltonian(p, N))
    groups = bae_spectrum(bae_p, N, cfg.solver)
    source = [(e, g) for g in groups for e in g.energies]
    report = match_spectra(ed, [(e, g.degeneracy) for e, g in source], args.tol)
    for g in groups:
        if not g.complete:
            report.notes.append(f"incomplete sector group L={g.group[0]}, K={g.group[1]}")
    if args.perturb_bae_mu:
        report.notes.append(f"BAE side uses mu shifted by {args.perturb_bae_mu:g}")

    def group_of(e):
        e0, g = min(source, key=lambda s: abs(s[0] - e))
        return f"L={g.group[0]},K={g.group[1]} (x{g.degeneracy})"

    rep = rp.new_report("match", p, N, cfg.solver)
    rep["eigenvalues"] = [float(x) for x in ed]
    rep["matching"] = rp.matching_dict(report)
    rows = [(_fmt(a), _fmt(b), f"{abs(a - b):.1e}", group_of(b)) for a, b in report.pairs]
    rows += [(_fmt(a), "-", "", "unmatched ED") for a in report.unmatched_ed]
    rows += [("-", _fmt(b), "", "unmatched BAE " + group_of(b)) for b in report.unmatched_bae]
    text = render_table(["ED", "BAE", "|gap|", "sector group"], rows)
    text += (f"\n\n{len(report.pairs)}/{len(ed)} matched, max gap {report.max_gap:.1e}, "
             f"tol {args.tol:g}: {'SUCCESS' if report.success else 'FAILURE'}")
    for note in report.notes:
        text += f"\nnote: {note}"
    return (EXIT_OK if report.success else EXIT_FAIL), rep, text


def cmd_recheck(args) -> tuple[int, dict, str]:
    try:
        rep = rp.load_report(args.report)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot read report {args.report}: {exc}") from None
    try:
        diffs = rp.recheck(rep, recompute=args.recompute)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"malformed report {args.report}: {exc}") from None
    n_sol = sum(len(s["solutions"]) + len(s["spurious"]) for s in rep.get("sectors", []))
    summary = (f"rechecked {n_sol} solution verdicts, {len(rep.get('checks', []))} checks, "
               f"{'1 matching' if rep.get('matching') else 'no matching'}")
    out = {"schema": rp.SCHEMA, "command": "recheck", "model": rep["model"],
           "source": str(args.report), "disagreements": diffs}
    text = summary + ("\nall verdicts reproduced" if not diffs else "\n" + "\n".join(diffs))
    return (EXIT_FAIL if diffs else EXIT_OK), out, text


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="INI model configuration")
    common.add_argument("--format", choices=FORMATS, help="output format (default from config)")
    common.add_argument("--seed", type=int, help="override the solver seed")
    common.add_argument("--out", help="write a JSON report to this path")
    common.add_argument("-v", "--verbose", action="store_true", help="show solver log messages")

    parser = argparse.ArgumentParser(prog="multiwell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="exact diagonalization")
    bae = sub.add_parser("bae", parents=[common], help="solve the Bethe ansatz equations")
    bae.add_argument("--sector", help="label 'l1,..;k1,..'")
    bae.add_argument("--r", type=int, help="only sectors with this r")
    bae.add_argument("--show-spurious", action="store_true", help="also list rejected candidates")
    ver = sub.add_parser("verify", parents=[common], help="run a check suite")
    ver.add_argument("--suite", choices=SUITES + ("all",), default="all")
    match = sub.add_parser("match", parents=[common], help="match BAE energies against ED")
    match.add_argument("--tol", type=float, default=1e-6)
    match.add_argument("--perturb-bae-mu", type=float, default=0.0,
                       help="shift mu on the BAE side only (negative control)")
    rc = sub.add_parser("recheck", help="re-derive verdicts stored in a JSON report")
    rc.add_argument("--report", required=True)
    rc.add_argument("--recompute", action="store_true",
                    help="rebuild diagnostics from the stored model and roots")
    rc.add_argument("--format", choices=FORMATS, default="table")
    rc.add_argument("--out")
    return parser


COMMANDS = {"spectrum": cmd_spectrum, "bae": cmd_bae, "verify": cmd_verify, "match": cmd_match}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "recheck":
            code, rep, text = cmd_recheck(args)
            fmt, out = args.format, args.out
        else:
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg = dataclasses.replace(cfg, solver=dataclasses.replace(cfg.solver, seed=args.seed))
            fmt = args.format or cfg.output.format
            out = args.out or cfg.output.path
            code, rep, text = COMMANDS[args.command](cfg, args)
    except (ConfigError, CliError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return getattr(exc, "code", EXIT_CONFIG)
    print(rp.dumps(rep) if fmt == "json" else text)
    if out:
        rp.write_report(rep, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
