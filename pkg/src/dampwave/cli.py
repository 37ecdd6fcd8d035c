"""Command-line front end.

Every subcommand reads its options from flags and, optionally, from one
section of an INI file (``--config FILE --section NAME``); flags win.
Exit codes: 0 all checks pass, 1 a check failed, 2 bad configuration.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .decay import (AlphaQuery, Quantity, ProblemSetup, alpha_sup, classify_decay, fit_decay,
                    geometric_times, get_scenario, norm_series, run_scenario, theorem_scenarios)
from .errors import AlphaUndecided, ConfigError, DampWaveError, EmptyAlphaSet
from .oracle import oracle_check
from .quadrature import parse_profile
from .spectral import Zone, ZonePartition, kernel_arrays, profile_arrays
from .symbols import builtin_catalog, check_hypotheses, parse_symbol

SERIES_HEADER = ("t", "norm", "quantity", "zone", "symbol", "n")
SUMMARY_HEADER = ("scenario", "slope", "expected", "tolerance", "pass")

# built-in defaults, applied after the config file so that None means "unset"
DEFAULTS = {
    "n": 3, "s": 0.0, "tol": 1e-2, "u0": "gaussian:scale=1", "u1": "zero",
    "quantity": "SolutionItself", "zone": "Interior", "t_min": 1.0, "t_max": 1e4,
    "count": 33, "eps": 0.5, "bign": 2.0, "tolerance": 0.05, "t": 1.0,
    "r": "0,0.25,0.5,1,2,4", "seed": 0, "samples": 50, "oracle_tol": 1e-6,
    "output_dir": "results",
}


# -- output ----------------------------------------------------------------

def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write atomically: a temp file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(path: Optional[Path], header, rows) -> None:
    rows = list(rows)
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    else:
        write_csv(path, header, rows)


# -- config merging --------------------------------------------------------

def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if args.config is None:
        if args.section is not None:
            raise ConfigError("--section needs --config")
    else:
        cfg = configparser.ConfigParser()
        if not cfg.read(args.config):
            raise ConfigError(f"cannot read config file {args.config}")
        if args.section is None:
            raise ConfigError("--config needs --section")
        if not cfg.has_section(args.section):
            raise ConfigError(f"no section [{args.section}] in {args.config}; "
                              f"available: {', '.join(cfg.sections())}")
        actions = {a.dest: a for a in parser._actions}
        for key, raw in cfg.items(args.section):
            dest = key.replace("-", "_")
            if dest in ("config", "section") or dest not in actions:
                raise ConfigError(f"unknown key {key!r} in section [{args.section}]")
            if getattr(args, dest) not in (None, False, []):
                continue  # the flag overrides the file
            action = actions[dest]
            try:
                if isinstance(action, argparse._StoreTrueAction):
                    value = _parse_bool(raw)
                elif isinstance(action, argparse._AppendAction):
                    value = [x.strip() for x in raw.split(",") if x.strip()]
                else:
                    value = action.type(raw) if action.type else raw
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
            setattr(args, dest, value)
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)


# -- validation helpers ----------------------------------------------------

def _symbol(text: Optional[str]):
    if not text:
        raise ConfigError("--symbol is required")
    try:
        return parse_symbol(text)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad symbol {text!r}: {exc}") from None


def _profile(text: str):
    try:
        return parse_profile(text)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad data profile {text!r}: {exc}") from None


def _enum(kind, text: str):
    for member in kind:
        if member.value.lower() == text.lower():
            return member
    raise ConfigError(f"unknown {kind.__name__} {text!r}; choose from "
                      f"{', '.join(m.value for m in kind)}")


def _dimension(n: int) -> int:
    if n < 1:
        raise ConfigError(f"n must be a positive integer, got {n}")
    return n


def _zones(args) -> ZonePartition:
    try:
        return ZonePartition(args.eps, args.bign)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _output_file(path: Optional[str]) -> Optional[Path]:
    if path is None:
        return None
    out = Path(path)
    if not out.parent.is_dir():
        raise ConfigError(f"output directory {out.parent} does not exist")
    return out


def _times(args) -> np.ndarray:
    try:
        times = geometric_times(args.t_min, args.t_max, args.count)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.t_min < 1:
        raise ConfigError("t_min must be >= 1 for decay series")
    return times


def _setup(args) -> ProblemSetup:
    sym = _symbol(args.symbol)
    return ProblemSetup(sym, _dimension(args.n), _profile(args.u0), _profile(args.u1),
                        _zones(args), s=args.s)


# -- commands --------------------------------------------------------------

def cmd_hypothesis_check(args) -> int:
    syms = [_symbol(args.symbol)] if args.symbol else builtin_catalog()
    failed = False
    for sym in syms:
        rep = check_hypotheses(sym)
        status = "ok" if not rep.mismatches else "MISMATCH: " + "; ".join(rep.mismatches)
        decided = "" if rep.regularity_decided else " (declared)"
        print(f"{rep.symbol}: small_limit_ok={rep.small_limit_ok} "
              f"large_limit={rep.large_limit_kind.value} "
              f"regularity={rep.regularity_class.value}{decided} {status}")
        failed = failed or bool(rep.mismatches)
    return 1 if failed else 0


def cmd_alpha(args) -> int:
    sym = _symbol(args.symbol)
    n = _dimension(args.n)
    if 2 * args.s + n <= 0:
        raise ConfigError(f"2s+n must be positive, got s={args.s}, n={n}")
    try:
        alpha = alpha_sup(AlphaQuery(sym, n, args.s, eps=args.eps, tol=args.tol))
    except AlphaUndecided as exc:
        print(f"undecided: {exc}")
        return 1
    except EmptyAlphaSet as exc:
        raise ConfigError(str(exc)) from None
    if math.isinf(alpha):
        print("Unbounded")
    else:
        print(f"{alpha:.4f} ± {args.tol:.4f}")
    return 0


def _series_from_args(args):
    setup = _setup(args)
    quantity = _enum(Quantity, args.quantity)
    zone = _enum(Zone, args.zone)
    times = _times(args)
    return setup, quantity, zone, times


def cmd_solve(args) -> int:
    setup, quantity, zone, times = _series_from_args(args)
    out = _output_file(args.output)
    series = norm_series(setup, quantity, zone, times)
    _emit(out, SERIES_HEADER, series.rows())
    return 0


def cmd_decay_fit(args) -> int:
    setup, quantity, zone, times = _series_from_args(args)
    out = _output_file(args.output)
    series = norm_series(setup, quantity, zone, times)
    if out is not None:
        write_csv(out, SERIES_HEADER, series.rows())
    kind, slope = classify_decay(series.t, series.norm, t_min=args.fit_t_min)
    if math.isinf(slope):
        print(f"class={kind.value} slope=-inf (norms underflow)")
    else:
        fit = fit_decay(series.t, series.norm, t_min=args.fit_t_min)
        print(f"class={kind.value} slope={fit.slope:.6f} max_residual={fit.max_residual:.3e} "
              f"window=[{fit.t_window[0]:.6g}, {fit.t_window[1]:.6g}] points={fit.n_points}")
    if args.expected is None:
        return 0
    ok = abs(slope - args.expected) <= args.tolerance
    print(f"expected {args.expected} ± {args.tolerance}: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_profiles(args) -> int:
    sym = _symbol(args.symbol)
    out = _output_file(args.output)
    try:
        r = np.array([float(x) for x in args.r.split(",")])
    except ValueError:
        raise ConfigError(f"bad radius list {args.r!r}") from None
    if np.any(r < 0) or args.t < 0:
        raise ConfigError("radii and t must be non-negative")
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(r == 0, 0.0, sym(r))
    k0, k1, _, _ = kernel_arrays(args.t, r, mu)
    g0, g1, h0, h1 = profile_arrays(args.t, r, mu)
    rows = [(args.t, *vals) for vals in zip(r, mu, k0, k1, g0, g1, h0, h1)]
    _emit(out, ("t", "r", "mu", "k0", "k1", "g0", "g1", "h0", "h1"), rows)
    return 0


def cmd_oracle_check(args) -> int:
    syms = [_symbol(args.symbol)] if args.symbol else builtin_catalog()
    out = _output_file(args.output)
    if args.samples < 1:
        raise ConfigError("samples must be positive")
    rows = []
    for sym in syms:
        rep = oracle_check(sym, seed=args.seed, samples=args.samples, tol=args.oracle_tol)
        rows.append((rep.symbol, len(rep.rows), rep.max_error, rep.has_confluent, rep.ok))
    width = max(len(r[0]) for r in rows)
    print(f"{'symbol':<{width}}  samples  max_rel_error  confluent  result")
    for name, count, err, conf, ok in rows:
        print(f"{name:<{width}}  {count:>7}  {err:>13.3e}  {str(conf):>9}  "
              f"{'PASS' if ok else 'FAIL'}")
    if out is not None:
        write_csv(out, ("symbol", "samples", "max_error", "confluent", "pass"), rows)
    return 0 if all(r[-1] for r in rows) else 1


def cmd_scenarios(args) -> int:
    if args.list:
        for spec in theorem_scenarios():
            print(f"{spec.name}: {spec.description}")
        return 0
    try:
        specs = [get_scenario(n) for n in args.name] if args.name else theorem_scenarios()
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    out_dir = Path(args.output_dir)
    if out_dir.exists() and not out_dir.is_dir():
        raise ConfigError(f"{out_dir} is not a directory")
    outcomes = [(spec, run_scenario(spec)) for spec in specs]
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = []
    for spec, cases in outcomes:
        rows = [row for case in cases for series in case.series for row in series.rows()]
        write_csv(out_dir / f"{spec.name}.csv", SERIES_HEADER, rows)
        summary.extend(case.summary_row for case in cases)
    write_csv(out_dir / "summary.csv", SUMMARY_HEADER, summary)
    for name, slope, expected, tol, ok in summary:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  slope={slope:.4f}  expected={expected}")
    return 0 if all(row[-1] for row in summary) else 1


# -- parser ----------------------------------------------------------------

def _common(p: argparse.ArgumentParser, symbol: bool = True) -> None:
    p.add_argument("--config", help="INI file with default options")
    p.add_argument("--section", help="section of the config file to read")
    if symbol:
        p.add_argument("--symbol", help="catalog symbol, e.g. power-law:beta=1")


def _series_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, help="space dimension (default 3)")
    p.add_argument("--s", type=float, help="extra r^s weight (default 0)")
    p.add_argument("--u0", help="initial position profile (default gaussian:scale=1)")
    p.add_argument("--u1", help="initial velocity profile (default zero)")
    p.add_argument("--quantity", help="SolutionItself | EnergyGrad | EnergyTime | ProfileResidual")
    p.add_argument("--zone", help="Interior | Bounded | Exterior | All")
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--count", type=int, help="number of geometric time samples")
    p.add_argument("--eps", type=float, help="interior zone boundary")
    p.add_argument("--bign", type=float, help="exterior zone boundary")
    p.add_argument("--output", help="CSV output path (default stdout)")


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "hypothesis-check": cmd_hypothesis_check,
    "alpha": cmd_alpha,
    "solve": cmd_solve,
    "decay-fit": cmd_decay_fit,
    "profiles": cmd_profiles,
    "oracle-check": cmd_oracle_check,
    "scenarios": cmd_scenarios,
}


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="dampwave", description="Decay-rate lab for strongly damped wave equations.")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["hypothesis-check"] = sub.add_parser(
        "hypothesis-check", help="probe limit behaviour of a symbol (all if omitted)")
    _common(p)

    p = subs["alpha"] = sub.add_parser("alpha", help="interior exponent alpha^m(n, s)")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=float)
    p.add_argument("--tol", type=float, help="bisection tolerance (default 0.01)")
    p.add_argument("--eps", type=float)

    p = subs["solve"] = sub.add_parser("solve", help="write a norm series as CSV")
    _common(p)
    _series_options(p)

    p = subs["decay-fit"] = sub.add_parser("decay-fit", help="fit the decay rate of a series")
    _common(p)
    _series_options(p)
    p.add_argument("--fit-t-min", type=float, help="start of the fit window (default last decade)")
    p.add_argument("--expected", type=float, help="expected slope; enables pass/fail")
    p.add_argument("--tolerance", type=float)

    p = subs["profiles"] = sub.add_parser("profiles", help="kernels and profiles at one time")
    _common(p)
    p.add_argument("--t", type=float)
    p.add_argument("--r", help="comma-separated radii")
    p.add_argument("--output")

    p = subs["oracle-check"] = sub.add_parser("oracle-check", help="RK4 versus closed forms")
    _common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--oracle-tol", type=float)
    p.add_argument("--output")

    p = subs["scenarios"] = sub.add_parser("scenarios", help="run the canned experiments")
    _common(p, symbol=False)
    p.add_argument("--list", action="store_true", help="list scenario names and exit")
    p.add_argument("--name", action="append", help="run only this scenario (repeatable)")
    p.add_argument("--output-dir")
    p.add_argument("--seed", type=int, help="accepted for uniformity; scenarios are not random")
    return parser, subs


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args, subs[args.command])
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"dampwave: error: {exc}", file=sys.stderr)
        return 2
    except DampWaveError as exc:
        print(f"dampwave: check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
