"""Command-line interface: ``expectiles {estimate,curve,theo,simulate}``.

Errors are reported on a single stderr line ``error: <reason>: <message>``
where ``<reason>`` is one of ``usage``, ``input``, ``domain`` or
``runtime``.  Usage and input problems exit with status 2, failures
during computation with status 1.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    NormalLimit,
    estimate_covariance,
    limit_law,
)
from .distributions import (
    ConvergenceError,
    StudentT,
    expectile_derivative,
    model_from_json,
)
from .empirical import breakpoints, build_sample, expectile
from .simulation import (
    DEFAULT_REPS,
    ExperimentConfig,
    run_consistency_experiment,
    run_coverage_experiment,
    run_jump_experiment,
    run_stable_experiment,
)


class CliError(Exception):
    def __init__(self, reason, message, status):
        super().__init__(message)
        self.reason = reason
        self.status = status


def _usage(msg):
    return CliError("usage", msg, 2)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _usage(message)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _parse_taus(text):
    try:
        taus = [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise _usage(f"cannot parse tau list {text!r}") from None
    if not taus:
        raise _usage("empty tau list")
    for t in taus:
        if not 0.0 < t < 1.0:
            raise CliError("domain", f"tau must lie in (0, 1), got {t!r}", 2)
    return taus


def _parse_grid(text):
    """``lo:hi:k`` (k equally spaced levels) or a comma list."""
    if ":" in text:
        try:
            lo, hi, k = text.split(":")
            taus = np.linspace(float(lo), float(hi), int(k)).tolist()
        except ValueError:
            raise _usage(f"cannot parse tau grid {text!r}; expected lo:hi:k") from None
        return _parse_taus(",".join(repr(t) for t in taus))
    return _parse_taus(text)


def _parse_sizes(text):
    try:
        sizes = [int(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise _usage(f"cannot parse sample sizes {text!r}") from None
    if not sizes:
        raise _usage("empty list of sample sizes")
    return sizes


def read_data(path):
    """Read one real per line; blank lines and ``#`` comments are skipped."""
    try:
        text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    except OSError as exc:
        raise CliError("input", f"cannot read {path}: {exc.strerror or exc}", 2) from None
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            v = float(line)
        except ValueError:
            raise CliError("input", f"{path}:{lineno}: not a number: {line!r}", 2) from None
        if not math.isfinite(v):
            raise CliError("input", f"{path}:{lineno}: non-finite value", 2)
        values.append(v)
    if not values:
        raise CliError("input", f"{path}: empty sample", 2)
    return values


def read_model(text):
    """Model from inline JSON or from a JSON file."""
    src = text
    if not text.lstrip().startswith("{"):
        try:
            src = Path(text).read_text()
        except OSError as exc:
            raise CliError("input", f"cannot read model {text}: {exc.strerror or exc}", 2) from None
    try:
        obj = json.loads(src)
    except json.JSONDecodeError as exc:
        raise CliError("input", f"model JSON does not parse: {exc}", 2) from None
    try:
        return model_from_json(obj)
    except ValueError as exc:
        raise CliError("domain", f"{exc}; supported: t with alpha > 1, finite discrete laws", 2) from None


def _emit(args, rows, columns, payload=None):
    if args.format == "json":
        text = json.dumps(payload if payload is not None else rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c, "")) for c in columns])
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_estimate(args):
    taus = _parse_taus(args.tau)
    sample = build_sample(read_data(args.data))
    level = float(args.level)
    if not 0.0 <= level < 1.0:
        raise CliError("domain", f"level must lie in [0, 1), got {level!r}", 2)
    from scipy.special import ndtri

    z = float(ndtri(0.5 + 0.5 * level))
    mus = np.atleast_1d(expectile(sample, taus))
    if sample.distinct.size > 1:
        var = np.diag(estimate_covariance(sample, taus).sigma)
    else:
        var = np.zeros(len(taus))
    rows = []
    for t, mu, v in zip(taus, mus, var):
        se = math.sqrt(v / sample.n)
        rows.append({"tau": t, "expectile": float(mu), "se": se,
                     "lower": float(mu) - z * se, "upper": float(mu) + z * se,
                     "level": level, "n": sample.n})
    _emit(args, rows, ["tau", "expectile", "se", "lower", "upper", "level", "n"])


def cmd_curve(args):
    sample = build_sample(read_data(args.data))
    if args.grid < 0:
        raise _usage("grid size must be nonnegative")
    rows = [{"tau": t, "expectile": a, "is_breakpoint": 1}
            for t, a in breakpoints(sample).rows()]
    if args.grid:
        grid = np.arange(1, args.grid + 1) / (args.grid + 1)
        vals = np.atleast_1d(expectile(sample, grid))
        rows += [{"tau": float(t), "expectile": float(v), "is_breakpoint": 0}
                 for t, v in zip(grid, vals)]
    rows.sort(key=lambda r: (r["tau"], -r["is_breakpoint"]))
    _emit(args, rows, ["tau", "expectile", "is_breakpoint"])


def _limit_block(lim):
    d = lim.to_dict()
    if isinstance(lim, NormalLimit):
        return {"kind": "normal", "sigma": float(lim.sigma[0, 0])}
    return d


def cmd_theo(args):
    model = read_model(args.model)
    taus = _parse_taus(args.tau)
    rows = []
    for t in taus:
        mu = float(model.expectile(t))
        if float(model.point_mass(mu)) > 0:
            deriv = "atom"
        else:
            deriv = expectile_derivative(model, t)
        try:
            lim = _limit_block(limit_law(model, t))
        except ValueError as exc:
            raise CliError("domain", str(exc), 2) from None
        rows.append({"tau": t, "expectile": mu, "derivative": deriv,
                     "limit_kind": lim["kind"], "limit": lim})
    if args.format == "csv":
        for r in rows:
            r["limit"] = json.dumps(r["limit"], sort_keys=True)
    _emit(args, rows, ["tau", "expectile", "derivative", "limit_kind", "limit"],
          payload={"model": model.to_json(), "rows": rows})


def _simulation_model(args):
    if args.model and args.alpha is not None:
        raise _usage("give either --alpha or --model, not both")
    if args.alpha is not None:
        try:
            return StudentT(args.alpha)
        except ValueError as exc:
            raise CliError("domain", str(exc), 2) from None
    if args.model:
        return read_model(args.model)
    raise _usage("a model is required: --alpha A (Student t) or --model JSON")


def cmd_simulate(args):
    model = _simulation_model(args)
    taus = _parse_taus(args.tau)
    if len(taus) != 1:
        raise _usage("simulate takes a single --tau")
    kind = args.experiment
    reps = args.reps if args.reps is not None else DEFAULT_REPS[kind]
    grid = _parse_grid(args.taus) if args.taus else ()
    if kind == "consistency" and not grid:
        grid = _parse_grid("0.1:0.9:17")
    if kind == "stable" and not (isinstance(model, StudentT) and 1 < model.alpha < 2):
        raise CliError("domain", "stable experiment needs a t model with 1 < alpha < 2", 2)
    if kind in ("jump", "coverage") and not model.has_finite_variance:
        raise CliError("domain", f"{kind} experiment needs a finite variance (t needs alpha > 2)", 2)
    try:
        cfg = ExperimentConfig(model, taus[0], _parse_sizes(args.n), reps, args.seed, taus=grid)
    except ValueError as exc:
        raise _usage(str(exc)) from None
    threads = args.threads
    if kind == "stable":
        rep = run_stable_experiment(cfg, threads=threads)
    elif kind == "jump":
        rep = run_jump_experiment(cfg, threads=threads)
    elif kind == "consistency":
        rep = run_consistency_experiment(cfg, threads=threads)
    else:
        rep = run_coverage_experiment(cfg, level=args.level, threads=threads)
    paths = rep.write(args.out or ".")
    for p in paths:
        print(p)
    for res in rep.results:
        info = {"n": res.n}
        if res.ks is not None:
            info["ks"] = res.ks
        info.update(res.summary)
        print(" ".join(f"{k}={_fmt(v)}" for k, v in info.items()), file=sys.stderr)


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--out", help="output file (estimate/curve/theo) or directory (simulate)")
    shared.add_argument("--format", choices=("csv", "json"), default="csv")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--threads", type=int, default=None,
                        help="worker threads for simulations (default: all cores)")

    p = _Parser(prog="expectiles", description="Sample and population expectiles.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("estimate", parents=[shared], help="sample expectiles with CIs")
    e.add_argument("data", help="file with one number per line ('-' for stdin)")
    e.add_argument("--tau", default="0.5", help="comma-separated levels")
    e.add_argument("--level", type=float, default=0.95)
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("curve", parents=[shared], help="breakpoints and expectile curve")
    c.add_argument("data")
    c.add_argument("--grid", type=int, default=99, help="number of uniform grid levels")
    c.set_defaults(func=cmd_curve)

    t = sub.add_parser("theo", parents=[shared], help="population expectiles and limit laws")
    t.add_argument("--model", required=True, help='inline JSON or file, e.g. {"t": 1.5}')
    t.add_argument("--tau", default="0.5")
    t.set_defaults(func=cmd_theo)

    s = sub.add_parser("simulate", parents=[shared], help="Monte Carlo experiments")
    s.add_argument("experiment", choices=("stable", "jump", "consistency", "coverage"))
    s.add_argument("--alpha", type=float, help="Student t degrees of freedom")
    s.add_argument("--model", help="model JSON (inline or file)")
    s.add_argument("--tau", default="0.5")
    s.add_argument("--n", default="20,200,2000", help="comma-separated sample sizes")
    s.add_argument("--reps", type=int)
    s.add_argument("--taus", help="level grid lo:hi:k for the consistency experiment")
    s.add_argument("--level", type=float, default=0.95)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", None) is not None and args.threads < 1:
            raise _usage("--threads must be at least 1")
        args.func(args)
    except CliError as exc:
        print(f"error: {exc.reason}: {exc}", file=sys.stderr)
        return exc.status
    except ValueError as exc:
        print(f"error: domain: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, RuntimeError, ArithmeticError) as exc:
        print(f"error: runtime: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
