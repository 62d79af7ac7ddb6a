"""Command-line driver.

    nsprobe estimate {ns,ns-std,influence,bias} --fn FILE --delta D --eps E --seed S
    nsprobe exact --fn FILE [--deltas ...] [--rhos ...]
    nsprobe bench --family majority --n 16,20,24 --delta-rule 1/n --runs 30
    nsprobe lowerbound {thinness,distinguish,halpha,family} --n 16 ...

JSON goes to single reports, CSV to sweeps.  Every JSON output carries the
tool version, the resolved config, the seed and the mode; CSV outputs
written with ``--out`` get the same metadata in a ``<out>.meta.json``
sidecar.  Exit codes: 0 ok, 2 usage or invalid input, 3 a sampling cap was
hit, 4 the dimension is too large for the requested exact computation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import secrets
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from . import exact
from . import lowerbounds as lb
from . import oracle as orc
from .estimators import (CapExceeded, NotMonotone, influence_estimate, std_bias_estimate,
                         std_ns_estimate)
from .nscore import estimate_ns
from .oracle import DimensionError, OracleSession, SpecError
from .params import PAPER, PRACTICAL, NsParams

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_DIM = 0, 2, 3, 4
SEED_ENV = "NSPROBE_SEED"
BENCH_HEADER = ["n", "delta", "method", "run", "estimate", "queries", "wall_ms"]
DISTINGUISH_HEADER = ["q", "trials", "success_rate", "stderr", "thinness", "bound", "vacuous",
                      "queries"]
FAMILIES = ("majority", "dictator", "f0")
METHODS = ("ns", "ns-std", "influence", "bias")


class UsageError(ValueError):
    pass


# -- small parsers ---------------------------------------------------------

def float_list(s: str) -> list[float]:
    return [number(t) for t in s.split(",") if t.strip()]


def int_list(s: str) -> list[int]:
    return [int(t) for t in s.split(",") if t.strip()]


def number(s: str) -> float:
    """Float, fraction ``1/16`` or power ``2^-6``."""
    s = s.strip()
    try:
        if "^" in s:
            b, e = s.split("^")
            return float(b) ** float(e)
        if "/" in s:
            a, b = s.split("/")
            return float(a) / float(b)
        return float(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return secrets.randbits(32)


def sub_rng(seed, *parts) -> random.Random:
    # string seeds hash through sha512, so derived streams are stable across runs
    return random.Random(":".join(str(p) for p in (seed, *parts)))


def load_function(args) -> orc.FunctionSpec:
    if args.fn and args.spec:
        raise UsageError("give either --fn or --spec, not both")
    if args.fn:
        try:
            text = Path(args.fn).read_text()
        except OSError as e:
            raise UsageError(f"cannot read {args.fn}: {e.strerror}") from None
        return orc.parse_fn_file(text)[0]
    if args.spec:
        return orc.deserialize(args.spec)
    raise UsageError("a function is required: --fn FILE or --spec JSON")


def family_function(name: str, n: int, C1: float) -> orc.FunctionSpec:
    if name == "majority":
        return orc.majority(n)
    if name == "dictator":
        return orc.dictator(n, 0)
    return orc.make_f0(n, C1)


def delta_for(rule: str, n: int) -> float:
    """``1/n``, ``c/n``, ``1/sqrt(n)`` or a constant."""
    r = rule.replace(" ", "")
    if r.endswith("/n"):
        return float(r[:-2]) / n
    if r == "1/sqrt(n)":
        return 1 / math.sqrt(n)
    return float(r)


# -- output ----------------------------------------------------------------

def envelope(command: str, config: dict, seed, mode, result) -> dict:
    return {"tool": "nsprobe", "version": __version__, "command": command, "config": config,
            "seed": seed, "mode": mode, "result": result}


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def emit_csv(header, rows, out: str | None, meta: dict) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    emit(buf.getvalue(), out)
    if out:
        Path(out + ".meta.json").write_text(dump_json(meta))


def config_of(args, drop=("func", "out")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in drop}


# -- estimate --------------------------------------------------------------

def run_estimate(kind: str, f: orc.FunctionSpec, cfg: dict, rng: random.Random, seed) -> dict:
    sess = OracleSession(f)
    mode, eps = cfg["mode"], cfg["eps"]
    if kind == "ns":
        overrides = {k: cfg[k] for k in ("t1", "t2", "w", "kappa") if cfg.get(k) is not None}
        params = NsParams.build(f.n, cfg["delta"], eps, cfg["C"], mode, **overrides)
        return estimate_ns(sess, params, rng, seed=seed, force=cfg.get("force", False)).to_dict()
    if kind == "ns-std":
        rep = std_ns_estimate(sess, cfg["delta"], eps, kappa=cfg.get("kappa"), mode=mode,
                              max_trials=cfg.get("max_trials"), rng=rng, seed=seed)
    elif kind == "influence":
        rep = influence_estimate(sess, eps, cfg["C"], w=cfg.get("w"), kappa=cfg.get("kappa"),
                                 mode=mode, max_trials=cfg.get("max_trials"), rng=rng, seed=seed,
                                 force=cfg.get("force", False))
        if rep.cap_reached:
            raise CapExceeded(f"influence sampler hit its cap after {rep.trials} trials", rep)
    else:
        rep = std_bias_estimate(sess, eps, kappa=cfg.get("kappa"), mode=mode,
                                max_trials=cfg.get("max_trials"), rng=rng, seed=seed)
    if rep.cap_reached:
        raise CapExceeded(f"{kind} sampler hit its cap after {rep.trials} trials", rep)
    return rep.to_dict()


def cmd_estimate(args) -> int:
    f = load_function(args)
    if args.kind in ("ns", "ns-std") and args.delta is None:
        raise UsageError(f"estimate {args.kind} needs --delta")
    if args.delta is not None and not 0 < args.delta <= 0.5:
        raise UsageError(f"--delta {args.delta} outside (0, 1/2]")
    if not 0 < args.eps < 1:
        raise UsageError(f"--eps {args.eps} outside (0, 1)")
    seed = resolve_seed(args.seed)
    cfg = config_of(args)
    cfg["seed"] = seed
    cfg["n"] = f.n
    cfg["function"] = orc.to_obj(f)
    result = run_estimate(args.kind, f, cfg, random.Random(seed), seed)
    emit(dump_json(envelope(f"estimate {args.kind}", cfg, seed, args.mode, result)), args.out)
    return EXIT_OK


# -- exact -----------------------------------------------------------------

def cmd_exact(args) -> int:
    f = load_function(args)
    if f.n > orc.MAX_TABLE_N:
        raise DimensionError(f"exact values need a truth table; n={f.n} > {orc.MAX_TABLE_N}")
    tab = orc.truth_table(f)
    w = exact.spectral_weights(tab)
    result = {
        "n": f.n,
        "bias": exact.exact_bias(tab),
        "influence": exact.influence_edge_scan(tab),
        "influence_fourier": exact.influence_fourier(tab),
        "monotone": bool(orc.table_is_monotone(tab, f.n)),
        "ns": [{"delta": d, "value": exact.ns_from_weights(w, d)} for d in args.deltas],
        "stability": [{"rho": r, "value": exact.exact_stability(tab, r)} for r in args.rhos],
    }
    cfg = config_of(args)
    cfg["function"] = orc.to_obj(f)
    emit(dump_json(envelope("exact", cfg, None, "exact", result)), args.out)
    return EXIT_OK


# -- bench -----------------------------------------------------------------

def bench_task(task) -> list:
    n, delta, method, run, cfg = task
    f = family_function(cfg["family"], n, cfg["C1"])
    rng = sub_rng(cfg["seed"], n, method, run)
    t0 = time.perf_counter()
    rep = run_estimate(method, f, {**cfg, "delta": delta}, rng, cfg["seed"])
    ms = (time.perf_counter() - t0) * 1000
    value = rep["estimate"] if method == "ns" else rep["value"]
    return [n, repr(delta), method, run, repr(value), rep["queries"],
            f"{ms:.1f}" if cfg["timing"] else ""]


def cmd_bench(args) -> int:
    for m in args.methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    if args.runs < 0:
        raise UsageError("--runs must be >= 0")
    seed = resolve_seed(args.seed)
    cfg = config_of(args)
    cfg["seed"] = seed
    tasks = []
    for n in args.n:
        delta = delta_for(args.delta_rule, n)
        if not 0 < delta <= 0.5:
            raise UsageError(f"delta rule {args.delta_rule!r} gives {delta} at n={n}")
        for m in args.methods:
            for r in range(args.runs):
                tasks.append((n, delta, m, r, cfg))
    if args.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(bench_task, tasks))
    else:
        rows = [bench_task(t) for t in tasks]
    meta = envelope("bench", cfg, seed, args.mode,
                    {"rows": len(rows), "queries": sum(r[5] for r in rows)})
    emit_csv(BENCH_HEADER, rows, args.out, meta)
    return EXIT_OK


# -- lowerbound ------------------------------------------------------------

def family_spec(args, kind=None) -> lb.FamilySpec:
    return lb.FamilySpec(kind or args.family_kind, args.n, args.C1, args.C2,
                         args.clauses, args.width, args.delta)


def cmd_lowerbound(args) -> int:
    seed = resolve_seed(args.seed)
    cfg = config_of(args)
    cfg["seed"] = seed
    kind = args.kind
    if kind == "distinguish":
        spec = family_spec(args, "D2_bias" if args.family_kind == lb.D1 else None)
        base = lb.draw_base(spec, sub_rng(seed, "base"))
        rows = []
        for q in args.q:
            if q < 0:
                raise UsageError("--q values must be >= 0")
            r = lb.distinguisher_experiment(spec, q, args.trials, sub_rng(seed, "q", q), base)
            rows.append([q, r.trials, repr(r.success_rate), repr(r.stderr), repr(r.thinness),
                         repr(r.bound), int(r.vacuous), r.queries])
        meta = envelope("lowerbound distinguish", cfg, seed, "lowerbound",
                        {"threshold": spec.threshold, "base": orc.to_obj(base),
                         "queries": sum(r[7] for r in rows)})
        emit_csv(DISTINGUISH_HEADER, rows, args.out, meta)
        return EXIT_OK
    if kind == "thinness":
        spec = family_spec(args, "D2_bias" if args.family_kind == lb.D1 else None)
        rng = sub_rng(seed, "thinness")
        base = lb.draw_base(spec, rng)
        level = spec.threshold if args.level is None else args.level
        rep = lb.measure_thinness(base, level, args.samples, rng)
        result = {"level": rep.level, "estimate": rep.estimate, "samples": rep.samples,
                  "stderr": rep.stderr, "exact": rep.exact, "base": orc.to_obj(base),
                  "queries": 0 if rep.exact else rep.samples}
    elif kind == "halpha":
        if args.n > 24:
            raise DimensionError("H^alpha needs n <= 24")
        deltas = args.deltas or [1 / args.n, 0.25]
        frac = lb.h_alpha_concentration(args.n, args.alpha, deltas, args.draws,
                                        sub_rng(seed, "halpha"))
        result = {"alpha": args.alpha, "draws": args.draws, "queries": 0,
                  "fraction_in_range": [{"delta": d, "fraction": v} for d, v in frac.items()]}
    else:
        spec = family_spec(args)
        rng = sub_rng(seed, "family")
        result = lb.verify_family_properties(spec, rng, args.draws)
        result["queries"] = 0
        if args.fn_out:
            f = lb.draw_family(spec, sub_rng(seed, "family-draw"))
            Path(args.fn_out).write_text(orc.format_fn_file(f, spec.to_dict()))
    emit(dump_json(envelope(f"lowerbound {kind}", cfg, seed, "lowerbound", result)), args.out)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------

def add_function_args(p):
    p.add_argument("--fn", help="path to a .fn fixture file")
    p.add_argument("--spec", help="inline JSON function spec")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nsprobe", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"nsprobe {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="run one estimator on a function")
    p.add_argument("kind", choices=METHODS)
    add_function_args(p)
    p.add_argument("--delta", type=number)
    p.add_argument("--eps", type=number, default=0.1)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--mode", choices=(PRACTICAL, PAPER), default=PRACTICAL)
    p.add_argument("--kappa", type=int)
    p.add_argument("--w", type=int)
    p.add_argument("--t1", type=float)
    p.add_argument("--t2", type=int)
    p.add_argument("--max-trials", type=int)
    p.add_argument("--force", action="store_true", help="skip the monotonicity check")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("exact", help="exact bias, influence, NS and stability")
    add_function_args(p)
    p.add_argument("--deltas", type=float_list, default=[0.01, 0.05, 0.1, 0.25, 0.5])
    p.add_argument("--rhos", type=float_list, default=[0.5, 0.9])
    p.add_argument("--out")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bench", help="query-count sweep, CSV rows per run")
    p.add_argument("--family", choices=FAMILIES, default="majority")
    p.add_argument("--n", type=int_list, default=[16, 20, 24])
    p.add_argument("--delta-rule", default="1/n")
    p.add_argument("--eps", type=number, default=0.25)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--C1", type=float, default=2.0)
    p.add_argument("--mode", choices=(PRACTICAL, PAPER), default=PRACTICAL)
    p.add_argument("--methods", type=lambda s: s.split(","), default=["ns", "ns-std"])
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true",
                   help="fill wall_ms (makes the output nondeterministic)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("lowerbound", help="hard-instance experiments")
    p.add_argument("kind", choices=("thinness", "distinguish", "halpha", "family"))
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--C1", type=float, default=2.0)
    p.add_argument("--C2", type=float, default=0.0)
    p.add_argument("--clauses", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--family-kind", choices=(lb.D1,) + lb.D2_KINDS, default="D2_bias")
    p.add_argument("--delta", type=number)
    p.add_argument("--q", type=int_list, default=[1, 2, 4, 8])
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--samples", type=int, default=10 ** 5)
    p.add_argument("--level", type=int)
    p.add_argument("--alpha", type=number, default=2 ** -6)
    p.add_argument("--deltas", type=float_list)
    p.add_argument("--draws", type=int, default=1)
    p.add_argument("--fn-out", help="also write one family draw as a .fn file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lowerbound)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as e:
        print(f"nsprobe: cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except DimensionError as e:
        print(f"nsprobe: infeasible dimension: {e}", file=sys.stderr)
        return EXIT_DIM
    except (UsageError, SpecError, NotMonotone, ValueError) as e:
        print(f"nsprobe: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
