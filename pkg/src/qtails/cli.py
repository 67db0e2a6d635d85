"""Command-line interface: figure regeneration, bounds, rates, MC, selftest.

Every subcommand validates its whole configuration before computing and
writes its output in one shot, so no partial files are left behind.  CSV
files start with '#'-prefixed metadata (format version and a JSON echo of
the configuration) and use LF endings with shortest round-trip floats;
regenerating with the same configuration and seed is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    chernoff_standard,
    compact_deformed_bound,
    eta_n_asymptotic,
    fat_fixed_a_bound,
    fixed_a_asymptotic,
    lower_bound_sum,
    markov_fixed_a_bound,
    rate_function,
    xi_asymptotic,
)
from .deformed import Deformation
from .distributions import Distribution, QExponential, StudentT, Uniform
from .errors import ConfigError, QTailsError
from .moments import Regime
from .montecarlo import estimate_curve, estimate_tail_of_mean
from .selftest import DEFAULT_SELFTEST_SAMPLES, run_selftest

FORMAT_VERSION = "1"
DEFAULT_SEED = 20240601
SEED_ENV_VAR = "QTAILS_SEED"

_BOUND_KINDS = (
    "chernoff", "compact", "markov_a", "fat_markov_a", "lower",
    "eta_n_asym", "xi_asym", "fixed_a_asym",
)


@dataclass
class RunConfig:
    """Validated parameters of one subcommand invocation."""

    command: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"command": self.command, **self.params}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        return cls(command=data.pop("command"), params=data)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(out: str, columns: list[str], rows: list[tuple], config: RunConfig) -> None:
    lines = [
        f"# format_version={FORMAT_VERSION}",
        f"# config={json.dumps(config.to_dict(), sort_keys=True)}",
        ",".join(columns),
    ]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _parse_x(spec: str) -> list[float]:
    """Either a single value or lo:hi:steps."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ConfigError(f"--x expects 'value' or 'lo:hi:steps', got {spec!r}")
    lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 2 or not hi > lo:
        raise ConfigError(f"--x needs hi > lo and steps >= 2, got {spec!r}")
    return [float(v) for v in np.linspace(lo, hi, steps)]


def _parse_model(spec: str) -> Distribution:
    """Model specs: uniform[:lo:hi], qexp:q[:scale], student:nu."""
    parts = spec.split(":")
    kind = parts[0].lower()
    try:
        if kind == "uniform":
            if len(parts) == 1:
                return Uniform(0.0, 1.0)
            if len(parts) == 3:
                return Uniform(float(parts[1]), float(parts[2]))
        elif kind == "qexp":
            if len(parts) == 2:
                return QExponential(Deformation(float(parts[1])))
            if len(parts) == 3:
                return QExponential(Deformation(float(parts[1])), float(parts[2]))
        elif kind == "student":
            if len(parts) == 2:
                return StudentT(int(parts[1]))
        raise ConfigError(f"bad model spec {spec!r}")
    except QTailsError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad model spec {spec!r}: {exc}") from exc


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    return int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))


def _qtag(q: float, decimals: int) -> str:
    """Column tag for a deformation order: 0.5 -> '05', 0.65 -> '065'."""
    if q >= 1.0:
        return f"{q:g}".replace(".", "")
    return f"{q:.{decimals}f}".replace("0.", "0", 1)


def _log_or_inf(v: float) -> float:
    if v == 0.0:
        return -math.inf
    if v == math.inf:
        return math.inf
    return math.log(v)


def cmd_fig1(args) -> int:
    q = args.q
    d = Deformation(q)  # validates the range
    xs = _parse_x(args.x)
    n = args.n
    config = RunConfig("fig1", {
        "model": "uniform:0:1", "q": q, "n": n, "x": args.x, "out": args.out,
    })
    model = Uniform(0.0, 1.0)
    col_deformed = f"bound_q{_qtag(q, 1)}"
    rows = []
    for x in xs:
        rows.append((x,
                     compact_deformed_bound(x, n, model, d),
                     chernoff_standard(x, n, model)))
    _write_csv(args.out, ["x", col_deformed, "bound_q1"], rows, config)
    return 0


def cmd_fig2(args) -> int:
    qs = args.q or [0.6, 0.65]
    nu, n, a = 3, args.n, args.a
    model = StudentT(nu)
    q_limit = 1.0 - 1.0 / nu
    for q in qs:
        if not 0.0 < q < 1.0:
            raise ConfigError(f"q must lie in (0, 1), got {q}")
        if q >= q_limit:
            raise ConfigError(
                f"deformed generating function of student:{nu} diverges for "
                f"q >= 1 - 1/nu = {q_limit:.6g}; got q = {q}"
            )
    xs = _parse_x(args.x)
    seed = _resolve_seed(args.seed)
    if args.mc and args.samples < 1000:
        raise ConfigError(f"--samples must be >= 1000, got {args.samples}")
    config = RunConfig("fig2", {
        "model": f"student:{nu}", "q": qs, "n": n, "a": a, "x": args.x,
        "mc": bool(args.mc), "samples": args.samples if args.mc else None,
        "seed": seed if args.mc else None, "raw": bool(args.raw), "out": args.out,
    })

    lower = [lower_bound_sum(x, n, model) for x in xs]
    uppers = [[fixed_a_asymptotic(x, n, a, model, Deformation(q)) for x in xs]
              for q in qs]
    mc = None
    if args.mc:
        est = estimate_curve(model, n, xs, args.samples, seed, workers=args.workers)
        mc = [e.p_hat for e in est]

    prefix = "" if args.raw else "log_"
    columns = ["x", f"{prefix}lower"]
    columns += [f"{prefix}upper_q{_qtag(q, 2)}" for q in qs]
    if mc is not None:
        columns.append(f"{prefix}mc")
    rows = []
    conv = (lambda v: v) if args.raw else _log_or_inf
    for i, x in enumerate(xs):
        row = [x, conv(lower[i])]
        row += [conv(u[i]) for u in uppers]
        if mc is not None:
            row.append(conv(mc[i]))
        rows.append(tuple(row))
    _write_csv(args.out, columns, rows, config)
    return 0


def cmd_rate(args) -> int:
    model = _parse_model(args.model)
    d = Deformation(args.q)
    regime = _pick_regime(args.regime, model)
    xs = _parse_x(args.x)
    config = RunConfig("rate", {
        "model": args.model, "q": args.q, "regime": regime.value, "x": args.x,
        "out": args.out,
    })
    rows = []
    for x in xs:
        res = rate_function(x, model, d, regime)
        rows.append((x, res.rate, res.theta_star, res.a_star))
    _write_csv(args.out, ["x", "rate", "theta_star", "a_star"], rows, config)
    return 0


def _pick_regime(spec: str, model: Distribution) -> Regime:
    if spec == "compact":
        return Regime.COMPACT_SUPPORT
    if spec == "fat":
        return Regime.FAT_TAIL
    return Regime.COMPACT_SUPPORT if model.support[1] < math.inf else Regime.FAT_TAIL


def cmd_bound(args) -> int:
    model = _parse_model(args.model)
    xs = _parse_x(args.x)
    if len(xs) != 1:
        raise ConfigError("bound expects a single --x value")
    x, n, kind = xs[0], args.n, args.kind
    needs_q = kind != "lower"
    needs_a = kind in ("markov_a", "fat_markov_a", "fixed_a_asym")
    d = Deformation(args.q) if needs_q and kind != "chernoff" else None
    if needs_a and args.a is None:
        raise ConfigError(f"--a is required for kind {kind!r}")
    config = RunConfig("bound", {
        "kind": kind, "model": args.model, "q": d.q if d else None, "n": n,
        "a": args.a if needs_a else None, "x": args.x, "out": args.out,
    })
    if kind == "chernoff":
        value = chernoff_standard(x, n, model)
    elif kind == "compact":
        value = compact_deformed_bound(x, n, model, d)
    elif kind == "markov_a":
        value = markov_fixed_a_bound(x, n, args.a, model, d)
    elif kind == "fat_markov_a":
        value = fat_fixed_a_bound(x, n, args.a, model, d)
    elif kind == "lower":
        value = lower_bound_sum(x, n, model)
    elif kind == "eta_n_asym":
        value = eta_n_asymptotic(x, n, d)
    elif kind == "xi_asym":
        value = xi_asymptotic(x, n, model, d)
    elif kind == "fixed_a_asym":
        value = fixed_a_asymptotic(x, n, args.a, model, d)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown kind {kind!r}")
    row = (kind, x, n,
           "" if d is None else d.q,
           "" if not needs_a else args.a,
           value)
    _write_csv(args.out, ["kind", "x", "n", "q", "a", "value"], [row], config)
    return 0


def cmd_mc(args) -> int:
    model = _parse_model(args.model)
    xs = _parse_x(args.x)
    seed = _resolve_seed(args.seed)
    if args.samples < 1000:
        raise ConfigError(f"--samples must be >= 1000, got {args.samples}")
    config = RunConfig("mc", {
        "model": args.model, "n": args.n, "x": args.x, "samples": args.samples,
        "seed": seed, "out": args.out,
    })
    if len(xs) == 1:
        ests = [estimate_tail_of_mean(model, args.n, xs[0], args.samples, seed,
                                      workers=args.workers)]
    else:
        ests = estimate_curve(model, args.n, xs, args.samples, seed,
                              workers=args.workers)
    rows = [(e.x, e.n, e.p_hat, e.stderr, e.samples, e.seed) for e in ests]
    _write_csv(args.out, ["x", "n", "p_hat", "stderr", "samples", "seed"],
               rows, config)
    return 0


def cmd_selftest(args) -> int:
    seed = _resolve_seed(args.seed)
    ok = run_selftest(samples=args.samples, seed=seed, verbose=True)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtails",
        description="Tail bounds for i.i.d. sums via deformed exponentials",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig1", help="uniform-source bound comparison CSV")
    p.add_argument("--q", type=float, default=0.5, help="deformation order")
    p.add_argument("--n", type=int, default=1, help="number of summands")
    p.add_argument("--x", default="0.5:1.0:101", help="threshold grid lo:hi:steps")
    p.add_argument("--out", default="fig1.csv")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", help="student-t sum bound curves CSV")
    p.add_argument("--q", type=float, action="append",
                   help="deformation order (repeatable; default 0.6 and 0.65)")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--a", type=float, default=5.0, help="fixed strength of the upper envelope")
    p.add_argument("--x", default="4.0:20.0:161", help="threshold grid lo:hi:steps")
    p.add_argument("--mc", action="store_true", help="add a Monte Carlo column")
    p.add_argument("--samples", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--raw", action="store_true", help="raw values instead of logs")
    p.add_argument("--out", default="fig2.csv")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("rate", help="rate function over a threshold grid")
    p.add_argument("--model", default="uniform")
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--regime", choices=("auto", "compact", "fat"), default="auto")
    p.add_argument("--x", default="0.55:0.95:9")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("bound", help="one bound value")
    p.add_argument("--kind", choices=_BOUND_KINDS, required=True)
    p.add_argument("--model", default="uniform")
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--x", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("mc", help="Monte Carlo tail estimate")
    p.add_argument("--model", default="qexp:0.5")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--x", required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.add_argument("--samples", type=int, default=DEFAULT_SELFTEST_SAMPLES)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QTailsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
