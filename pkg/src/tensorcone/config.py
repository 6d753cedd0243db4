"""INI-style configuration for model generation and parameter sweeps.

Model file::

    [model]
    kind = counts          ; counts | bisection | cuts | motif
    n = 20
    m = 4
    seed = 7
    repeats_mode = sample  ; sample | zero (counts and bisection only)

    [counts]
    T = 1
    alpha = 0.9, 0.1, 0

A sweep file has a ``[sweep]`` section (``kind``, ``n`` as a comma list, ``m``,
``trials``, ``seed``), the model section of that kind where any value may
list several alternatives separated by ``|``, and an optional ``[solver]``
section (``zeta``, ``outer``, ``inner``, ``descent``, ``gamma``, ``starts``).
"""

from __future__ import annotations

import configparser
import dataclasses
import itertools
from pathlib import Path
from typing import Any

import numpy as np

from . import hpm
from .spectra import AscentConfig
from .solver import SolverConfig
from .tensor import SymmetricTensor

__all__ = [
    "ConfigError",
    "ModelConfig",
    "SweepConfig",
    "load_model_config",
    "parse_model_config",
    "load_sweep_config",
    "parse_sweep_config",
    "generate",
    "solver_config_from",
]

KINDS = ("counts", "bisection", "cuts", "motif")
MODEL_KEYS = {"kind", "n", "m", "seed", "repeats_mode"}
SECTION_KEYS = {
    "counts": {"T", "alpha"},
    "bisection": {"q"},
    "cuts": {"alpha"},
    "motif": {"motif_edges", "alpha4"},
}
SWEEP_KEYS = {"kind", "n", "m", "trials", "seed"}
SOLVER_KEYS = {"zeta", "outer", "inner", "descent", "gamma", "starts"}


class ConfigError(ValueError):
    """A configuration file is invalid; ``key`` names the offending entry when known."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(message)


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    cp.optionxform = str  # keys are case-sensitive ("T")
    return cp


def _read(text: str) -> configparser.ConfigParser:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return cp


def _check_keys(cp: configparser.ConfigParser, section: str, allowed: set[str]) -> None:
    for key in cp[section]:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section [{section}]", key)


def _get(cp, section: str, key: str, convert, default: Any = None):
    if not cp.has_option(section, key):
        if default is None:
            raise ConfigError(f"missing key {key!r} in section [{section}]", key)
        return default
    raw = cp.get(section, key).strip()
    try:
        return convert(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid value for {key!r}: {raw!r} ({exc})", key) from None


def _floats(raw: str) -> tuple[float, ...]:
    values = tuple(float(t) for t in raw.split(",") if t.strip())
    if not values:
        raise ValueError("empty list")
    return values


def _ints(raw: str) -> tuple[int, ...]:
    values = tuple(int(t) for t in raw.split(",") if t.strip())
    if not values:
        raise ValueError("empty list")
    return values


def _edges(raw: str) -> tuple[tuple[int, int], ...]:
    edges = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        if "->" not in token:
            raise ValueError(f"edge {token!r} is not of the form i->j")
        i, j = token.split("->")
        edges.append((int(i), int(j)))
    if not edges:
        raise ValueError("no edges")
    return tuple(edges)


def _kind(raw: str) -> str:
    if raw not in KINDS:
        raise ValueError(f"must be one of {', '.join(KINDS)}")
    return raw


@dataclasses.dataclass(frozen=True)
class ModelConfig:
    kind: str
    n: int
    m: int
    seed: int
    repeats_mode: str
    params: Any

    def model_record(self) -> hpm.HpmSpec:
        if self.kind == "counts":
            return hpm.hpm_of_counts(self.params, self.n)
        if self.kind == "bisection":
            return hpm.hpm_of_bisection(self.params, self.m, self.n)
        if self.kind == "cuts":
            return hpm.hpm_of_cuts(self.params)
        return hpm.hpm_of_motif(self.params, self.n)


def _model_params(kind: str, values: dict[str, Any], n: int, m: int) -> Any:
    try:
        if kind == "counts":
            params = hpm.CountsParams(values["alpha"], values.get("T", 1))
            if params.m != m:
                raise ConfigError(f"alpha has {len(params.alpha_compact)} entries, which implies m={params.m}, not {m}", "alpha")
            return params
        if kind == "bisection":
            return hpm.BisectionParams(values["q"])
        if kind == "cuts":
            if m != 4:
                raise ConfigError(f"cuts model needs m=4, got {m}", "m")
            return hpm.CutsParams(values["alpha"], n)
        if m != 4:
            raise ConfigError(f"motif model needs m=4, got {m}", "m")
        return hpm.MotifParams.from_edges(values["motif_edges"], values["alpha4"], m)
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]!r} in section [{kind}]", exc.args[0]) from None
    except ConfigError:
        raise
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"invalid [{kind}] parameters: {exc}", kind) from None


_CONVERTERS = {"T": int, "alpha": _floats, "q": float, "motif_edges": _edges, "alpha4": _floats}


def _check_sections(cp, allowed: set[str]) -> None:
    for section in cp.sections():
        if section not in allowed:
            raise ConfigError(f"unknown section [{section}]", section)


def parse_model_config(text: str) -> ModelConfig:
    cp = _read(text)
    if not cp.has_section("model"):
        raise ConfigError("missing section [model]", "model")
    _check_sections(cp, {"model", *KINDS})
    _check_keys(cp, "model", MODEL_KEYS)
    for kind in KINDS:
        if cp.has_section(kind):
            _check_keys(cp, kind, SECTION_KEYS[kind])
    kind = _get(cp, "model", "kind", _kind)
    n = _get(cp, "model", "n", int)
    m = _get(cp, "model", "m", int)
    seed = _get(cp, "model", "seed", int)
    repeats = _get(cp, "model", "repeats_mode", str, "sample")
    if repeats not in ("sample", "zero"):
        raise ConfigError(f"repeats_mode must be 'sample' or 'zero', got {repeats!r}", "repeats_mode")
    if n < 2 or n % 2:
        raise ConfigError(f"n must be even and >= 2, got {n}", "n")
    if m < 2 or m % 2:
        raise ConfigError(f"m must be even and >= 2, got {m}", "m")
    if seed < 0:
        raise ConfigError(f"seed must be nonnegative, got {seed}", "seed")
    if not cp.has_section(kind):
        raise ConfigError(f"missing section [{kind}] for kind={kind}", "kind")
    values = {key: _get(cp, kind, key, _CONVERTERS[key]) for key in cp[kind]}
    return ModelConfig(kind, n, m, seed, repeats, _model_params(kind, values, n, m))


def load_model_config(path: str | Path) -> ModelConfig:
    return parse_model_config(Path(path).read_text())


def generate(cfg: ModelConfig, seed: int | None = None) -> tuple[SymmetricTensor, np.ndarray]:
    """Draw ``(W, y*)`` from the configured model; the same seed gives the same pair."""
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    y_star = hpm.random_assignment(cfg.n, rng)
    if cfg.kind == "counts":
        W = hpm.sample_counts(cfg.params, y_star, rng, cfg.repeats_mode)
    elif cfg.kind == "bisection":
        W = hpm.sample_bisection(cfg.params, y_star, rng, cfg.m, cfg.repeats_mode)
    elif cfg.kind == "cuts":
        W = hpm.sample_cuts(cfg.params, y_star, rng)
    else:
        W = hpm.sample_motif(cfg.params, y_star, rng)
    return W, y_star


def solver_config_from(values: dict[str, Any], seed: int = 0) -> SolverConfig:
    """Map CLI/INI names (zeta, outer, inner, descent, gamma, starts) to a :class:`SolverConfig`."""
    base = SolverConfig()
    ascent = AscentConfig(
        step_gamma=float(values.get("gamma", base.ascent.step_gamma)),
        num_starts=int(values.get("starts", base.ascent.num_starts)),
        max_iters=int(values.get("descent", base.descent_iters)),
    )
    return SolverConfig(
        zeta=float(values.get("zeta", base.zeta)),
        outer_iters=int(values.get("outer", base.outer_iters)),
        inner_iters=int(values.get("inner", base.inner_iters)),
        descent_iters=int(values.get("descent", base.descent_iters)),
        ascent=ascent,
        seed=seed,
    )


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    kind: str
    n_values: tuple[int, ...]
    m: int
    trials: int
    seed: int
    grid: tuple[dict[str, Any], ...]
    solver: dict[str, float]

    def points(self) -> list[tuple[int, dict[str, Any]]]:
        return [(n, point) for n in self.n_values for point in self.grid]

    def model_config(self, n: int, point: dict[str, Any], seed: int) -> ModelConfig:
        return ModelConfig(self.kind, n, self.m, seed, "sample", _model_params(self.kind, point, n, self.m))


def parse_sweep_config(text: str) -> SweepConfig:
    cp = _read(text)
    if not cp.has_section("sweep"):
        raise ConfigError("missing section [sweep]", "sweep")
    _check_sections(cp, {"sweep", "solver", *KINDS})
    _check_keys(cp, "sweep", SWEEP_KEYS)
    kind = _get(cp, "sweep", "kind", _kind)
    n_values = _get(cp, "sweep", "n", _ints)
    m = _get(cp, "sweep", "m", int)
    trials = _get(cp, "sweep", "trials", int)
    seed = _get(cp, "sweep", "seed", int, 0)
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}", "trials")
    if any(n < 2 or n % 2 for n in n_values):
        raise ConfigError(f"every n must be even and >= 2, got {list(n_values)}", "n")
    if not cp.has_section(kind):
        raise ConfigError(f"missing section [{kind}] for kind={kind}", "kind")
    _check_keys(cp, kind, SECTION_KEYS[kind])
    axes = {}
    for key in cp[kind]:
        options = [opt for opt in cp.get(kind, key).split("|") if opt.strip()]
        if not options:
            raise ConfigError(f"empty grid for {key!r}", key)
        try:
            axes[key] = [_CONVERTERS[key](opt.strip()) for opt in options]
        except ValueError as exc:
            raise ConfigError(f"invalid value for {key!r}: {exc}", key) from None
    grid = tuple(dict(zip(axes, combo)) for combo in itertools.product(*axes.values()))
    if not grid:
        raise ConfigError("empty grid", kind)
    for point in grid:
        for n in n_values:
            _model_params(kind, point, n, m)
    solver = {}
    if cp.has_section("solver"):
        _check_keys(cp, "solver", SOLVER_KEYS)
        solver = {key: _get(cp, "solver", key, float) for key in cp["solver"]}
    return SweepConfig(kind, n_values, m, trials, seed, grid, solver)


def load_sweep_config(path: str | Path) -> SweepConfig:
    return parse_sweep_config(Path(path).read_text())
