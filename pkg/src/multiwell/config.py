"""Run configuration read from an INI file.

Schema::

    [model]
    n = 2                 # A-side wells
    m = 1                 # B-side wells
    N = 3                 # particle number
    U = 1.0               # either U, mu, t ...
    mu = 0.5
    t = -0.5
    # eta = 2.0           # ... or eta, omega, t
    # omega = 0.5
    alpha = 0.7071067811865476, 0.7071067811865476
    beta = 1.0

    [solver]              # optional, any SolverConfig field
    max_starts = 500
    seed = 0

    [output]              # optional
    format = table        # table | json
    path = report.json

Keys are case-sensitive, so ``n`` and ``N`` are distinct.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .bae import SolverConfig
from .model import CouplingParams, ParameterError, with_spectral

FORMATS = ("table", "json")


class ConfigError(ValueError):
    """The configuration file is missing, malformed or violates a model constraint."""


@dataclass(frozen=True)
class ModelConfig:
    params: CouplingParams
    N: int
    parameterization: str = "coupling"  # "coupling" or "spectral"


@dataclass(frozen=True)
class OutputConfig:
    format: str = "table"
    path: str | None = None


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    source: str | None = None


def _float(sec, key) -> float:
    try:
        return float(sec[key])
    except ValueError:
        raise ConfigError(f"[model] {key} = {sec[key]!r} is not a number") from None


def _int(sec, key, section="model") -> int:
    try:
        return int(sec[key])
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {sec[key]!r} is not an integer") from None


def _vector(sec, key) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in sec[key].split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"[model] {key} must be a comma-separated list of numbers") from None


def _model(sec) -> ModelConfig:
    for key in ("n", "m", "N", "t", "alpha", "beta"):
        if key not in sec:
            raise ConfigError(f"[model] is missing required key {key!r}")
    n, m, N = _int(sec, "n"), _int(sec, "m"), _int(sec, "N")
    if n < 1 or m < 1:
        raise ConfigError("[model] n and m must be >= 1")
    if N < 0:
        raise ConfigError("[model] N must be >= 0")
    alpha, beta = _vector(sec, "alpha"), _vector(sec, "beta")
    if len(alpha) != n:
        raise ConfigError(f"[model] alpha has {len(alpha)} entries but n = {n}")
    if len(beta) != m:
        raise ConfigError(f"[model] beta has {len(beta)} entries but m = {m}")
    coupling = "U" in sec or "mu" in sec
    spectral = "eta" in sec or "omega" in sec
    if coupling == spectral:
        raise ConfigError("[model] give exactly one of (U, mu, t) or (eta, omega, t)")
    t = _float(sec, "t")
    try:
        if coupling:
            if "U" not in sec or "mu" not in sec:
                raise ConfigError("[model] coupling form needs both U and mu")
            p = CouplingParams(_float(sec, "U"), _float(sec, "mu"), t, alpha, beta)
        else:
            if "eta" not in sec or "omega" not in sec:
                raise ConfigError("[model] spectral form needs both eta and omega")
            p = with_spectral(_float(sec, "eta"), _float(sec, "omega"), t, alpha, beta)
    except ParameterError as exc:
        raise ConfigError(f"[model] {exc}") from None
    return ModelConfig(p, N, "coupling" if coupling else "spectral")


def _solver(sec) -> SolverConfig:
    kinds = {f.name: f.type for f in dataclasses.fields(SolverConfig)}
    kwargs = {}
    for key, raw in sec.items():
        if key not in kinds:
            raise ConfigError(f"[solver] unknown key {key!r}")
        kind = kinds[key]
        try:
            if kind == "int":
                kwargs[key] = int(raw)
            elif kind == "float":
                kwargs[key] = float(raw)
            elif kind == "bool":
                kwargs[key] = sec.getboolean(key)
            else:
                kwargs[key] = tuple(float(x) for x in raw.split(",") if x.strip())
        except ValueError:
            raise ConfigError(f"[solver] {key} = {raw!r} has the wrong type") from None
    cfg = SolverConfig(**kwargs)
    if cfg.max_starts < 0 or cfg.max_iter < 1:
        raise ConfigError("[solver] max_starts must be >= 0 and max_iter >= 1")
    if len(cfg.u_samples) < 2:
        raise ConfigError("[solver] u_samples needs at least two values")
    return cfg


def _output(sec) -> OutputConfig:
    fmt = sec.get("format", "table")
    if fmt not in FORMATS:
        raise ConfigError(f"[output] format must be one of {FORMATS}, got {fmt!r}")
    return OutputConfig(fmt, sec.get("path") or None)


def parse_config(text: str, source: str | None = None) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=source or "<string>")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    if not cp.has_section("model"):
        raise ConfigError("config needs a [model] section")
    unknown = set(cp.sections()) - {"model", "solver", "output"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    solver = _solver(cp["solver"]) if cp.has_section("solver") else SolverConfig()
    output = _output(cp["output"]) if cp.has_section("output") else OutputConfig()
    return RunConfig(_model(cp["model"]), solver, output, source)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
