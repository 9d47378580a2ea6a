"""Command-line front end: parameter sweeps written as reproducible CSV.

Every subcommand reads an optional JSON config, applies flag overrides
(flags win), evaluates a one-dimensional sweep and writes CSV with a
``#`` comment header recording the config hash, package version and the
regime threshold.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np

from . import __version__
from .classical import (Stability, bifurcation_boundaries, classical_action, critical_point, line_re,
                        solve_cubic)
from .density import (DEFAULT_KAPPA, branch_curvature, continuation_branch, density, rho_critical,
                      select_regime)
from .fluctuations import critical_prefactor, fluc_potential, fluctuation_spec, marginal_integral
from .model import BarrierParams, DomainError, NumericalFailure, theta_from_lambda1, validate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
CLAMP = 1e12
AXES = ("theta", "lambda1", "q", "r", "z", "Y1", "Q")
UNITS = ("absolute", "lambda_c", "r_c", "Q_c")
DEFAULT_ORACLE = {"L": 15.0, "N": 1500, "q_match": 8.0, "k_c": 1.0, "slices": 4096,
                  "epsilons": [0.2, 0.1, 0.05], "window": [-1.0, 1.0], "points": 41}

# sweep defaults per subcommand: axis, from, to, steps, unit
SWEEP_DEFAULTS = {
    "regions": ("lambda1", -1.0, 1.0, 81, "lambda_c"),
    "bifurcation": ("lambda1", -1.0, 2.0, 121, "lambda_c"),
    "flucpot": ("Y1", -60.0, 60.0, 241, "absolute"),
    "kq": ("lambda1", -1.0, 2.0, 121, "lambda_c"),
    "action": ("r", -3.0, 3.0, 121, "absolute"),
    "density": ("r", -3.0, 3.0, 121, "absolute"),
    "distribution": ("q", -3.0, 3.0, 121, "absolute"),
    "compare-oracle": ("q", -1.0, 1.0, 41, "absolute"),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Resolved run configuration."""

    command: str
    a: dict
    epsilon: float
    axis: str
    start: float
    stop: float
    steps: int
    unit: str = "absolute"
    fixed: dict = field(default_factory=dict)
    kappa: float = DEFAULT_KAPPA
    out: str | None = None
    oracle: dict = field(default_factory=lambda: dict(DEFAULT_ORACLE))
    allow_strong_asymmetry: bool = False
    jobs: int = 1

    @property
    def params(self) -> BarrierParams:
        return BarrierParams(self.a, self.epsilon)

    def canonical(self) -> str:
        d = asdict(self)
        for k in ("out", "jobs"):
            d.pop(k)
        d["a"] = {str(n): v for n, v in sorted(self.a.items())}
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


# --- configuration -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="barriertop", description="Semiclassical barrier-top density matrix sweeps.")
    parser.add_argument("--version", action="version", version=f"barriertop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SWEEP_DEFAULTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        for key in ("a3", "a4", "a5", "a6", "epsilon", "theta", "lambda1", "q", "r", "z", "Q", "kappa"):
            p.add_argument(f"--{key}", type=float)
        p.add_argument("--axis", choices=AXES)
        p.add_argument("--from", dest="start", type=float)
        p.add_argument("--to", dest="stop", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--unit", choices=UNITS)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for the sweep")
        p.add_argument("--allow-strong-asymmetry", action="store_true")
        if name == "distribution":
            p.add_argument("--formulas", action="store_true",
                           help="add unconditional columns for each regime formula")
    return parser


def _number(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be a number")
    return float(value)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    raw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    known = {"a3", "a4", "a5", "a6", "a", "epsilon", "kappa", "sweep", "fixed", "oracle", "out"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    a = {3: 0.2, 4: 1.0}
    for n, v in (raw.get("a") or {}).items():
        a[int(n)] = _number(v, f"a[{n}]")
    for n in (3, 4, 5, 6):
        if f"a{n}" in raw:
            a[n] = _number(raw[f"a{n}"], f"a{n}")
        if getattr(args, f"a{n}") is not None:
            a[n] = args.__dict__[f"a{n}"]
    eps = args.epsilon if args.epsilon is not None else _number(raw.get("epsilon", 0.01), "epsilon")
    kappa = args.kappa if args.kappa is not None else _number(raw.get("kappa", DEFAULT_KAPPA), "kappa")

    axis, start, stop, steps, unit = SWEEP_DEFAULTS[args.command]
    sw = raw.get("sweep") or {}
    if "axis" in sw and sw["axis"] != axis and ("from" not in sw or "to" not in sw):
        raise ConfigError("a custom sweep axis needs explicit 'from' and 'to'")
    axis = args.axis or sw.get("axis", axis)
    if args.axis and args.axis != SWEEP_DEFAULTS[args.command][0] and (args.start is None or args.stop is None):
        if "from" not in sw or "to" not in sw:
            raise ConfigError("a custom sweep axis needs explicit --from and --to")
    if axis not in AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    start = args.start if args.start is not None else _number(sw.get("from", start), "sweep.from")
    stop = args.stop if args.stop is not None else _number(sw.get("to", stop), "sweep.to")
    steps = args.steps if args.steps is not None else sw.get("steps", steps)
    if isinstance(steps, bool) or not isinstance(steps, int):
        raise ConfigError("sweep.steps must be an integer")
    unit = args.unit or sw.get("unit", unit if axis == SWEEP_DEFAULTS[args.command][0] else "absolute")
    if unit not in UNITS:
        raise ConfigError(f"unknown sweep unit {unit!r}")

    fixed = {k: _number(v, f"fixed.{k}") for k, v in (raw.get("fixed") or {}).items()}
    for key in ("theta", "lambda1", "q", "r", "z", "Q"):
        if getattr(args, key) is not None:
            fixed[key] = getattr(args, key)
    if "theta" in fixed and "lambda1" in fixed:
        if not ((args.theta is None) ^ (args.lambda1 is None)):
            raise ConfigError("give either theta or lambda1, not both")
        fixed.pop("lambda1" if args.theta is not None else "theta")
    bad = set(fixed) - set(AXES)
    if bad:
        raise ConfigError(f"unknown fixed variables: {sorted(bad)}")

    oracle = dict(DEFAULT_ORACLE)
    oracle.update(raw.get("oracle") or {})
    if args.command == "compare-oracle" and args.epsilon is not None:
        oracle["epsilons"] = [args.epsilon]

    cfg = RunConfig(args.command, a, eps, axis, start, stop, steps, unit, fixed, kappa,
                    args.out or raw.get("out"), oracle, args.allow_strong_asymmetry, max(1, args.jobs))
    check_config(cfg)
    return cfg


def check_config(cfg: RunConfig) -> None:
    if cfg.steps < 2:
        raise ConfigError("sweep needs steps >= 2")
    if not cfg.start < cfg.stop:
        raise ConfigError("sweep needs from < to")
    if not cfg.kappa > 0.0:
        raise ConfigError("kappa must be positive")
    if cfg.command == "compare-oracle" and all(v == 0.0 for v in cfg.a.values()):
        raise ConfigError("all a_n = 0: the inverted oscillator has no confined oracle; "
                          "check the harmonic closed form against the stable-well kernel instead")
    eps_list = cfg.oracle["epsilons"] if cfg.command == "compare-oracle" else [cfg.epsilon]
    for eps in eps_list:
        problems = validate(BarrierParams(cfg.a, eps), cfg.allow_strong_asymmetry)
        if problems:
            raise ConfigError("; ".join(problems))
    if cfg.axis in cfg.fixed:
        raise ConfigError(f"{cfg.axis} is both swept and fixed")
    if cfg.unit == "lambda_c" and cfg.axis != "lambda1":
        raise ConfigError("unit lambda_c applies to the lambda1 axis only")
    if cfg.unit == "r_c" and cfg.axis not in ("r", "q"):
        raise ConfigError("unit r_c applies to the r and q axes only")
    if cfg.unit == "Q_c" and cfg.axis != "Q":
        raise ConfigError("unit Q_c applies to the Q axis only")
    if cfg.unit != "absolute" and critical_point(cfg.params).lambda_c == 0.0:
        raise ConfigError("critical-scale units need a3 != 0")


def sweep_values(cfg: RunConfig) -> np.ndarray:
    """Grid ``from + (to - from) i/(steps - 1)`` in the chosen unit.

    Endpoints are combined with integer weights so that grid points such
    as 0 land exactly on zero.
    """
    n = cfg.steps - 1
    i = np.arange(cfg.steps)
    x = (cfg.start * (n - i) + cfg.stop * i) / n
    cd = critical_point(cfg.params)
    scale = {"absolute": 1.0, "lambda_c": cd.lambda_c, "r_c": cd.r_c, "Q_c": cd.Q_c}[cfg.unit]
    return x * scale


def _theta(vals: dict) -> float:
    if "theta" in vals:
        return float(vals["theta"])
    if "lambda1" in vals:
        return theta_from_lambda1(vals["lambda1"])
    raise ConfigError("need theta or lambda1")


def _point(cfg: RunConfig, x: float, defaults: dict | None = None) -> dict:
    vals = dict(defaults or {})
    vals.update(cfg.fixed)
    if cfg.axis in ("theta", "lambda1"):
        vals.pop("theta", None)
        vals.pop("lambda1", None)
    vals[cfg.axis] = float(x)
    return vals


# --- per-point evaluators (module level so they pickle) ---------------------

def _row_regions(cfg, x):
    p = cfg.params
    lam = _point(cfg, x).get("lambda1")
    if lam is None:
        raise ConfigError("regions sweeps lambda1")
    try:
        rm, rp = bifurcation_boundaries(p, lam)
    except DomainError:
        rm = rp = math.nan
    return [[lam, rm, rp, line_re(p, lam)]]


def _row_bifurcation(cfg, x):
    v = _point(cfg, x, {"r": 0.0})
    th = _theta(v)
    bs = solve_cubic(cfg.params, th, v["r"])
    return [[x, s.Q, s.stability.value] for s in bs.solutions]


def _row_flucpot(cfg, x):
    p = cfg.params
    cd = critical_point(p)
    v = _point(cfg, x, {"Q": cd.Q_c, "lambda1": 0.5 * cd.lambda_c})
    spec = fluctuation_spec(p, _theta(v), v["Q"])
    return [[v["Y1"], fluc_potential(spec, v["Y1"])]]


def _row_kq(cfg, x):
    p = cfg.params
    cd = critical_point(p)
    v = _point(cfg, x, {"Q": cd.Q_c, "lambda1": 0.0})
    th = _theta(v)
    spec = fluctuation_spec(p, th, v["Q"])
    k = marginal_integral(spec)
    return [[x, v["Q"], spec.Lambda1, k.value, k.log_value]]


def _row_action(cfg, x):
    v = _point(cfg, x, {"lambda1": 0.0, "z": 0.0, "r": 0.0})
    th = _theta(v)
    bs = solve_cubic(cfg.params, th, v["r"])
    return [[x, s.Q, s.stability.value, classical_action(cfg.params, th, v["z"], v["r"], s.Q)] for s in bs.solutions]


def _row_density(cfg, x):
    v = _point(cfg, x, {"lambda1": 0.0, "z": 0.0, "r": 0.0})
    d = density(cfg.params, _theta(v), v["z"], v["r"], cfg.kappa)
    return [[x, d.value, d.regime.value]]


def _clamp(value):
    if math.isnan(value):
        return value, False
    if value > CLAMP:
        return CLAMP, True
    return value, False


def formula_columns(params: BarrierParams, theta: float, r: float, kappa: float = DEFAULT_KAPPA):
    """Each regime formula at ``z = 0`` evaluated regardless of validity.

    Returns ``(rho_critical, rho_gaussian, rho_two_branch)``; NaN where a
    formula has no defining path and ``inf`` where it diverges.
    """
    choice = select_regime(params, theta, 0.0, r, kappa)
    crit = rho_critical(params, theta, 0.0, r, choice.lowest_action_branch()).value

    def gauss(branches):
        logs = []
        for br in branches:
            L = branch_curvature(params, theta, br)
            if L < 0.0:
                return math.nan
            with np.errstate(divide="ignore"):
                logs.append(-0.5 * np.log(L) - classical_action(params, theta, 0.0, r, br.Q))
        return float(critical_prefactor(theta) * np.exp(np.logaddexp.reduce(logs)))

    gaussian = gauss([continuation_branch(choice.branches)])
    paths = [s for s in choice.branches.solutions if s.stability is not Stability.UNSTABLE]
    two = gauss(paths) if len(paths) == 2 else math.nan
    return crit, gaussian, two


def _row_distribution(cfg, x, formulas=False):
    v = _point(cfg, x, {"q": 0.0, "lambda1": 0.0})
    th = _theta(v)
    d = density(cfg.params, th, 0.0, v["q"], cfg.kappa)
    row = [x, d.value, d.regime.value]
    if formulas:
        vals = formula_columns(cfg.params, th, v["q"], cfg.kappa)
        flags = []
        for name, val in zip(("critical", "gaussian", "two_branch"), vals):
            cv, hit = _clamp(val)
            row.append(cv)
            if hit:
                flags.append(name)
        row.append(";".join(flags) if flags else "none")
    return [row]


COLUMNS = {
    "regions": ["lambda1", "r_minus", "r_plus", "r_e"],
    "bifurcation": [None, "Q", "stability"],
    "flucpot": ["Y1", "V"],
    "kq": [None, "Q", "Lambda1", "K", "log_K"],
    "action": [None, "Q", "stability", "S_cl"],
    "density": [None, "rho", "regime"],
    "distribution": [None, "P", "regime"],
}
EVALUATORS = {
    "regions": _row_regions, "bifurcation": _row_bifurcation, "flucpot": _row_flucpot, "kq": _row_kq,
    "action": _row_action, "density": _row_density, "distribution": _row_distribution,
}


# --- output --------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return "%.17g" % (float(v) + 0.0)  # no negative zero


def write_csv(cfg: RunConfig, columns: list, rows, extra_header=()) -> str:
    buf = io.StringIO(newline="")
    buf.write(f"# barriertop {__version__}\n")
    buf.write(f"# command: {cfg.command}\n")
    buf.write(f"# config_sha256: {cfg.digest()}\n")
    buf.write(f"# kappa: {_fmt(cfg.kappa)}\n")
    for line in extra_header:
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _evaluate(func, xs, jobs):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(func, xs))
    else:
        chunks = [func(x) for x in xs]
    return [row for chunk in chunks for row in chunk]


def run_sweep(cfg: RunConfig, formulas: bool = False) -> str:
    xs = [float(x) for x in sweep_values(cfg)]
    func = EVALUATORS[cfg.command]
    if cfg.command == "distribution":
        func = partial(func, formulas=formulas)
    cols = list(COLUMNS[cfg.command])
    cols[0] = cols[0] or cfg.axis
    if formulas:
        cols += ["rho_critical", "rho_gaussian", "rho_two_branch", "clamped"]
    rows = _evaluate(partial(func, cfg), xs, cfg.jobs)
    return write_csv(cfg, cols, rows, [f"sweep: {cfg.axis} unit={cfg.unit}"])


def run_compare_oracle(cfg: RunConfig) -> tuple[str, str]:
    from .oracle import GridSpec, compare_with_semiclassical
    o = cfg.oracle
    theta = _theta(cfg.fixed) if ("theta" in cfg.fixed or "lambda1" in cfg.fixed) else 0.9 * np.pi
    grid = GridSpec(float(o["L"]), int(o["N"]))
    rows, summary, maxima = [], [], []
    for eps in o["epsilons"]:
        params = BarrierParams(cfg.a, float(eps))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cmp = compare_with_semiclassical(params, theta, grid, float(o["q_match"]), (cfg.start, cfg.stop),
                                             cfg.steps, cfg.kappa, float(o.get("k_c", 1.0)))
        note = " (grid edge warning)" if caught else ""
        for q, s, e, rel in zip(cmp.q, cmp.semiclassical, cmp.exact, cmp.rel_error):
            rows.append([float(eps), q, s, e, rel])
        maxima.append(cmp.max_rel)
        summary.append(f"epsilon={eps:g}: max_rel={cmp.max_rel:.6g} mean_rel={cmp.mean_rel:.6g}{note}")
    ordered = sorted(zip(o["epsilons"], maxima), reverse=True)
    ms = [m for _, m in ordered]
    if len(ms) > 1:
        ok = all(b < a for a, b in zip(ms, ms[1:]))
        summary.append(f"epsilon trend: {'decreasing' if ok else 'NOT decreasing'}")
    text = write_csv(cfg, ["epsilon", "q", "P_semiclassical_normalized", "P_exact_normalized", "rel_error"], rows,
                     [f"theta: {_fmt(theta)}", f"oracle: L={o['L']} N={o['N']} q_match={o['q_match']}"])
    return text, "\n".join(summary)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.command == "compare-oracle":
            text, summary = run_compare_oracle(cfg)
            print(summary, file=sys.stderr)
        else:
            text = run_sweep(cfg, getattr(args, "formulas", False))
    except (ConfigError, DomainError) as exc:
        print(f"barriertop: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"barriertop: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
