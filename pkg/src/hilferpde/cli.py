"""Command-line front end: `key = value` configs, grid runs, verify suite.

Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 numeric failure during a run. CSV artifacts carry the header
x,y,value,err with 17 significant digits and LF endings; the verify
report is a flat JSON list of check records.
"""

import argparse
import json
import math
import pathlib
import sys
from dataclasses import dataclass

import numpy as np

from .cauchy import InitialData, kernel_exponent, solve
from .fracops import EquationSpec, GeneralEquationSpec
from .kernel import gamma_b, kernel_spec
from .selfsim import coefficients, eval_selfsimilar, similarity_exponents
from .verify import run_checks

_COMMANDS = ("eval-kernel", "solve", "selfsim", "verify")
_PRESETS = ("gaussian", "bump", "poly-decay")

_INT_KEYS = ("n", "x_steps", "y_steps", "branch", "terms", "q", "p")
_FLOAT_KEYS = ("alpha", "beta", "m", "k", "alpha1", "beta1", "alpha2",
               "beta2", "d", "b", "x_min", "x_max", "y_min", "y_max",
               "tolerance", "growth_M", "growth_N")
_STR_KEYS = ("command", "preset", "table", "output")
_KEY_ORDER = _STR_KEYS[:1] + _INT_KEYS[:1] + _FLOAT_KEYS + _INT_KEYS[1:] \
    + _STR_KEYS[1:]

_GRID_KEYS = ("x_min", "x_max", "x_steps", "y_min", "y_max", "y_steps")
_GENERAL_KEYS = ("m", "k", "alpha1", "beta1", "alpha2", "beta2", "d",
                 "q", "p")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration text."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = None
    alpha: float = None
    beta: float = None
    m: float = None
    k: float = None
    alpha1: float = None
    beta1: float = None
    alpha2: float = None
    beta2: float = None
    d: float = None
    b: float = None
    x_min: float = None
    x_max: float = None
    y_min: float = None
    y_max: float = None
    tolerance: float = None
    growth_M: float = None
    growth_N: float = None
    x_steps: int = None
    y_steps: int = None
    branch: int = None
    terms: int = None
    q: int = None
    p: int = None
    preset: str = None
    table: str = None
    output: str = None


def parse_config(text: str, command: str = None) -> RunConfig:
    """Parse `key = value` lines into a validated RunConfig.

    command, when given, is the CLI subcommand; a `command` key in the
    text must agree with it. Errors carry the offending line number.
    """
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _INT_KEYS + _FLOAT_KEYS + _STR_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for '{key}'")
        if key in _INT_KEYS:
            try:
                value = int(value)
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: {key} must be an integer, got '{value}'"
                ) from None
        elif key in _FLOAT_KEYS:
            try:
                value = float(value)
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: {key} must be a number, got '{value}'"
                ) from None
            if not math.isfinite(value):
                raise ConfigError(f"line {lineno}: {key} must be finite")
        seen[key] = value

    file_cmd = seen.pop("command", None)
    if file_cmd is not None and file_cmd not in _COMMANDS:
        raise ConfigError(
            f"command must be one of {', '.join(_COMMANDS)}, got '{file_cmd}'"
        )
    if command is not None and file_cmd is not None and file_cmd != command:
        raise ConfigError(
            f"config says command = {file_cmd} but invoked as {command}"
        )
    cmd = command or file_cmd
    if cmd is None:
        raise ConfigError("no command: pass a subcommand or a command key")
    cfg = RunConfig(command=cmd, **seen)
    _validate(cfg)
    return cfg


def _require(cfg: RunConfig, keys):
    for key in keys:
        if getattr(cfg, key) is None:
            raise ConfigError(
                f"command '{cfg.command}' requires key '{key}'"
            )


def _validate(cfg: RunConfig):
    if cfg.alpha is not None and not (0.0 < cfg.alpha < 2.0):
        raise ConfigError("alpha must lie in (0,2)")
    if cfg.beta is not None and not (0.0 <= cfg.beta <= 1.0):
        raise ConfigError(f"beta must lie in [0,1], got {cfg.beta}")
    if cfg.n is not None and cfg.n < 1:
        raise ConfigError(f"n must be a positive integer, got {cfg.n}")
    if cfg.tolerance is not None and not (cfg.tolerance > 0.0):
        raise ConfigError(f"tolerance must be positive, got {cfg.tolerance}")
    if cfg.growth_M is not None and not (cfg.growth_M > 0.0):
        raise ConfigError(f"growth_M must be positive, got {cfg.growth_M}")
    if cfg.growth_N is not None and cfg.growth_N < 0.0:
        raise ConfigError(
            f"growth_N must be nonnegative, got {cfg.growth_N}"
        )
    if cfg.preset is not None and cfg.preset not in _PRESETS:
        raise ConfigError(
            f"preset must be one of {', '.join(_PRESETS)}, got '{cfg.preset}'"
        )
    if cfg.preset is not None and cfg.table is not None:
        raise ConfigError("give either preset or table, not both")
    for steps in ("x_steps", "y_steps"):
        v = getattr(cfg, steps)
        if v is not None and v < 1:
            raise ConfigError(f"{steps} must be >= 1, got {v}")
    if cfg.x_min is not None and cfg.x_max is not None \
            and cfg.x_min > cfg.x_max:
        raise ConfigError("x_min must not exceed x_max")
    if cfg.y_min is not None:
        if cfg.y_min <= 0.0:
            raise ConfigError(
                f"grid y_min must be positive, got {cfg.y_min}"
            )
        if cfg.y_max is not None and cfg.y_min > cfg.y_max:
            raise ConfigError("y_min must not exceed y_max")
    if cfg.branch is not None and cfg.branch < 1:
        raise ConfigError(f"branch must be >= 1, got {cfg.branch}")
    if cfg.terms is not None and cfg.terms < 0:
        raise ConfigError(f"terms must be >= 0, got {cfg.terms}")

    if cfg.command in ("eval-kernel", "solve"):
        _require(cfg, ("n", "alpha", "beta") + _GRID_KEYS)
        eq = _equation(cfg)  # re-checks the operator constraints
        if cfg.command == "solve":
            if cfg.preset is None and cfg.table is None:
                raise ConfigError(
                    "command 'solve' requires a preset or a table"
                )
            if cfg.growth_N is not None:
                sigma = kernel_spec(eq, kernel_exponent(eq, 0)).bound.sigma
                if not (cfg.growth_N < sigma):
                    raise ConfigError(
                        f"growth certificate fails: N={cfg.growth_N:.6g} "
                        f"is not below sigma={sigma:.6g}"
                    )
    elif cfg.command == "selfsim":
        _require(cfg, _GENERAL_KEYS + _GRID_KEYS)
        _general(cfg)  # re-checks the general-operator constraints
    elif cfg.command == "verify":
        triple = (cfg.n, cfg.alpha, cfg.beta)
        if any(v is not None for v in triple):
            _require(cfg, ("n", "alpha", "beta"))
            _equation(cfg)


def _equation(cfg: RunConfig) -> EquationSpec:
    try:
        return EquationSpec(n=cfg.n, alpha=cfg.alpha, beta=cfg.beta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _general(cfg: RunConfig) -> GeneralEquationSpec:
    try:
        return GeneralEquationSpec(
            m=cfg.m, k=cfg.k, alpha1=cfg.alpha1, beta1=cfg.beta1,
            alpha2=cfg.alpha2, beta2=cfg.beta2, d=cfg.d, q=cfg.q, p=cfg.p,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def config_echo(cfg: RunConfig) -> str:
    """Canonical config text; parse_config(config_echo(c)) equals c."""
    pairs = ((key, getattr(cfg, key)) for key in _KEY_ORDER)
    return "\n".join(f"{k} = {v}" for k, v in pairs if v is not None) + "\n"


def _grid(cfg: RunConfig):
    xs = np.linspace(cfg.x_min, cfg.x_max, cfg.x_steps)
    ys = np.linspace(cfg.y_min, cfg.y_max, cfg.y_steps)
    return xs, ys


def _write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        fh.write("x,y,value,err\n")
        for x, y, v, e in rows:
            fh.write(f"{x:.17g},{y:.17g},{v:.17g},{e:.17g}\n")


def _preset_data(cfg: RunConfig, s_count: int) -> InitialData:
    if cfg.table is not None:
        pts = np.loadtxt(cfg.table, delimiter=",", comments="#", ndmin=2)
        if pts.shape[1] != 2:
            raise ConfigError(
                f"table {cfg.table} must have two columns x,value"
            )
        tx, tv = pts[:, 0], pts[:, 1]
        if np.any(np.diff(tx) <= 0.0):
            raise ConfigError("table x column must be strictly increasing")

        def shape(x, tx=tx, tv=tv):
            return np.interp(np.asarray(x, dtype=float), tx, tv,
                             left=0.0, right=0.0)

        growth_m = float(np.max(np.abs(tv)))
        if growth_m == 0.0:
            raise ConfigError("table values are identically zero")
    else:
        shape = _PRESET_FUNCS[cfg.preset]
        growth_m = 1.0
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    funcs = (shape,) + (zero,) * (s_count - 1)
    return InitialData(
        funcs=funcs,
        growth_M=cfg.growth_M if cfg.growth_M is not None else growth_m,
        growth_N=cfg.growth_N if cfg.growth_N is not None else 0.0,
    )


def _bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - xi * xi))
    return out


_PRESET_FUNCS = {
    "gaussian": lambda x: np.exp(-np.asarray(x, dtype=float) ** 2),
    "bump": _bump,
    "poly-decay": lambda x: 1.0 / (1.0 + np.asarray(x, dtype=float) ** 2),
}


def _run_eval_kernel(cfg: RunConfig) -> int:
    eq = _equation(cfg)
    b = cfg.b if cfg.b is not None else kernel_exponent(eq, 0)
    ks = kernel_spec(eq, b)
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-12
    xs, ys = _grid(cfg)
    rows = []
    for y in ys:
        for x in xs:
            val, err = gamma_b(ks, float(x), float(y), tol)
            rows.append((x, y, val, err))
    _write_csv(cfg.output or "kernel.csv", rows)
    return 0


def _run_solve(cfg: RunConfig) -> int:
    eq = _equation(cfg)
    data = _preset_data(cfg, eq.s_count)
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-8
    xs, ys = _grid(cfg)
    field = solve(eq, data, (xs, ys), tol=tol)
    out = pathlib.Path(cfg.output or "solution.csv")
    rows = []
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            rows.append((x, y, field.values[i, j], field.err[i, j]))
    _write_csv(out, rows)
    summary = {
        "config": config_echo(cfg),
        "rows": len(rows),
        "max_err": float(np.max(field.err)),
        "max_abs_value": float(np.max(np.abs(field.values))),
    }
    spath = out.with_name(out.stem + "_summary.json")
    with open(spath, "w", newline="\n") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return 0


def _run_selfsim(cfg: RunConfig) -> int:
    g = _general(cfg)
    e = similarity_exponents(g, cfg.b if cfg.b is not None else 0.0)
    tab = coefficients(
        g, e,
        cfg.branch if cfg.branch is not None else 1,
        cfg.terms if cfg.terms is not None else 8,
    )
    xs, ys = _grid(cfg)
    rows = []
    for y in ys:
        for x in xs:
            val, tail = eval_selfsimilar(g, e, tab, float(x), float(y))
            rows.append((x, y, val, tail))
    _write_csv(cfg.output or "selfsim.csv", rows)
    return 0


def _run_verify(cfg: RunConfig) -> int:
    eq = _equation(cfg) if cfg.n is not None else None
    records = run_checks(eq)
    path = cfg.output or "verify_report.json"
    with open(path, "w", newline="\n") as fh:
        json.dump(records, fh, indent=2)
        fh.write("\n")
    for r in records:
        flag = "PASS" if r["pass"] else "FAIL"
        print(f"{flag}  {r['check']}: measured {r['measured']:.3e}, "
              f"threshold {r['threshold']:.1e}")
    ok = all(r["pass"] for r in records)
    print(f"{sum(r['pass'] for r in records)}/{len(records)} checks passed; "
          f"report written to {path}")
    return 0 if ok else 1


_RUNNERS = {
    "eval-kernel": _run_eval_kernel,
    "solve": _run_solve,
    "selfsim": _run_selfsim,
    "verify": _run_verify,
}


def run(cfg: RunConfig) -> int:
    """Execute a validated config; returns the process exit code."""
    try:
        return _RUNNERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hilferpde",
        description="Kernels, Cauchy solutions and self-similar series for "
                    "high-even-order Hilfer-fractional diffusion equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=(name != "verify"),
                       help="path to a key = value config file")
    args = parser.parse_args(argv)
    if args.config is None:
        cfg = RunConfig(command="verify")
    else:
        try:
            text = pathlib.Path(args.config).read_text()
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
        try:
            cfg = parse_config(text, command=args.command)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
