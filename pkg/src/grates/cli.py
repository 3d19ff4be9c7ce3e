"""Command-line front end: construct, entropy, classify, rates, theorem54, lemma58, noniso, props."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import io as gio
from .entropy_functions import EntropyFunction, HFunction, classify, parse_function_spec, property_check
from .orbit_entropy import (default_stage, entropy_series, join_sequence_geometric,
                            name_measures_symbolic)
from .rank_one import AlignedSet, GrowthAssumption, RankOneSystem, build
from .rates import (Reindexer, SequenceSpec, lemma58_bound, lemma58_verify, nonisomorphism_report,
                    rate_report, search_synthetic_pair, theorem54_check)

OUTDIR_ENV = "GRATES_OUTDIR"
DEFAULT_MEMORY_MIB = 256
PROPERTIES = ("Subadditive", "Subderivative", "Concave", "PhiDecreasing")


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- parsing


def parse_int_list(s: str) -> list[int]:
    try:
        return [int(v) for v in s.replace(" ", "").split(",") if v]
    except ValueError as e:
        raise UsageError(f"bad integer list {s!r}") from e


def parse_range(s: str) -> tuple:
    """'a..b' (inclusive) or a single value."""
    if ".." in s:
        a, b = s.split("..", 1)
        return Fraction(a), Fraction(b)
    v = Fraction(s)
    return v, v


def parse_aligned(s: str) -> AlignedSet:
    """'unit' or 'levels:m=<stage>,idx=i+j+...'."""
    if s == "unit":
        return AlignedSet.unit()
    if s.startswith("levels:"):
        kv = dict(p.split("=", 1) for p in s[len("levels:"):].split(","))
        try:
            return AlignedSet(int(kv["m"]), frozenset(int(i) for i in kv["idx"].split("+")))
        except (KeyError, ValueError) as e:
            raise UsageError(f"bad E specifier {s!r}") from e
    raise UsageError(f"bad E specifier {s!r} (use 'unit' or 'levels:m=..,idx=..')")


def parse_sequence(s: str) -> SequenceSpec:
    name, _, arg = s.partition(":")
    name = name.lower()
    if name == "n":
        return SequenceSpec("N")
    if name == "log2n":
        return SequenceSpec("Log2N")
    if name == "hlog2n":
        h = HFunction("HIR") if arg in ("", "hir") else HFunction("HLog") if arg == "hlog" else None
        if h is None:
            raise UsageError(f"unknown h {arg!r}")
        return SequenceSpec("HofLog2N", h=h)
    if name == "phi2pow":
        return SequenceSpec("PhiOf2PowMinusN", g=parse_function_spec(arg))
    if name == "philog":
        return SequenceSpec("PhiOfLogIter", g=parse_function_spec(arg))
    raise UsageError(f"unknown sequence {s!r}")


def parse_reindexer(s: str | None) -> Reindexer | None:
    if not s:
        return None
    kind, _, rest = s.partition(":")
    if kind == "zeta":
        return Reindexer.zeta(parse_int_list(rest))
    if kind == "scaled":
        a, _, ps = rest.partition(":")
        return Reindexer.scaled(parse_int_list(ps), Fraction(a))
    if kind == "thresholds":
        return Reindexer(tuple(Fraction(v) for v in rest.split(",")))
    raise UsageError(f"unknown reindexer {s!r}")


def parse_assumption(s: str):
    if s == "prefix":
        return "prefix"
    if s == "none":
        return None
    if s.startswith("gamma:"):
        g, _, c = s[len("gamma:"):].partition(",C=")
        return GrowthAssumption(int(g), Fraction(c or "1"))
    raise UsageError(f"unknown assumption {s!r}")


def load_system(path: str, memory_mib: int) -> RankOneSystem:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"system file {path} does not exist")
    data = json.loads(p.read_text())
    s = RankOneSystem.from_json(data)
    s.memory_budget_symbols = memory_mib * 2 ** 20
    return s


# ---------------------------------------------------------------- commands


def cmd_construct(args, out: gio.OutputSet):
    s = build(parse_int_list(args.primes), args.stages, assumption=parse_assumption(args.assumption))
    for st in s.stages[1:]:
        chk = s.check_stage_integer(st.n) if st.height <= s.level_budget else None
        if chk is not None and not (chk["tiles_tower"] and chk["extends_previous"]):
            raise RuntimeError(f"stage {st.n} failed its integer checks")
    data = gio.emit(s, "JSON")
    _deliver(out, args.out, data)


def cmd_entropy(args, out: gio.OutputSet):
    s = load_system(args.system, args.memory_budget)
    g = parse_function_spec(args.g)
    E = parse_aligned(args.E)
    lo, hi = parse_range(args.k)
    ks = list(range(int(lo), int(hi) + 1))
    if args.path == "geometric":
        M = args.stage if args.stage is not None else default_stage(s, max(ks), E.stage)
        joins = join_sequence_geometric(s, E, max(ks), M)
        src = [j for j in joins if j.n in ks]
        series = entropy_series(g, src, normalizer=s.normalizer(), E=E.describe(), stage=M)
    else:
        src = []
        for k in ks:
            M = args.stage if args.stage is not None else default_stage(s, k, E.stage)
            src.append(name_measures_symbolic(s, M, E, k, workers=args.workers))
        series = entropy_series(g, src, E=E.describe())
    _deliver(out, args.out, gio.emit(series, "CSV"))


def cmd_classify(args, out: gio.OutputSet):
    g = parse_function_spec(args.g)
    v = classify(g, args.depth)
    rep = {"g": g.spec(), "class": v.cls, "depth": v.depth, "ratio": v.ratio,
           "constant": v.constant, "verdict": str(v)}
    _deliver(out, args.out, gio.emit(rep, "JSON"))


def cmd_rates(args, out: gio.OutputSet):
    p = Path(args.series)
    if not p.exists():
        raise UsageError(f"series file {args.series} does not exist")
    series = gio.parse_entropy_csv(p.read_bytes())
    rep = rate_report(series, parse_sequence(args.seq), nu=parse_reindexer(args.reindex), c=args.c)
    if args.out_csv:
        out.write(args.out_csv, gio.emit(rep, "CSV"))
    _deliver(out, args.out, gio.emit(rep, "JSON"))


def cmd_theorem54(args, out: gio.OutputSet):
    s = load_system(args.system, args.memory_budget)
    g = parse_function_spec(args.g)
    E = parse_aligned(args.E)
    k = 2 * s.stage(args.n).p ** 2
    names = name_measures_symbolic(s, args.n + 1, E, k, workers=args.workers)
    rep = theorem54_check(s, E, args.n, g, workers=args.workers, names=names)
    if args.entropy_csv:
        series = entropy_series(g, [names], E=E.describe())
        out.write(args.entropy_csv, gio.emit(series, "CSV"))
    body = {"n": rep.n, "k": rep.k, "stage": rep.stage, "H": rep.H, "lambda_E": rep.lam,
            "terms": [{"P0": t[0], "mu_R": t[1], "h": t[2], "rhs": t[3], "rhs_mu_R_lower": t[4]} for t in rep.terms],
            "rhs": rep.rhs, "holds": rep.holds, "ratio": rep.ratio, "h_denominator": rep.h_denominator,
            "residual_upper": rep.residual_upper, "Q_ratio": rep.Q_ratio}
    _deliver(out, args.out, gio.emit(body, "JSON"))
    return 0 if rep.holds else 1


def cmd_lemma58(args, out: gio.OutputSet):
    s = load_system(args.system, args.memory_budget)
    kw = dict(strict=not args.non_strict)
    eps, a = Fraction(args.eps), Fraction(args.a)
    if args.no_entropy:
        rep = lemma58_bound(s, args.k, args.n, eps, a, args.r, **kw)
    else:
        rep = lemma58_verify(s, args.k, args.n, eps, a, args.r, workers=args.workers, **kw)
    body = {"n": rep.n, "k": rep.k, "bound": rep.bound, "parts": rep.parts, "conditions": rep.conditions,
            "in_range": rep.in_range, "H": rep.H, "holds": rep.holds}
    _deliver(out, args.out, gio.emit(body, "JSON"))
    return 0 if rep.holds in (True, None) else 1


def cmd_noniso(args, out: gio.OutputSet):
    if args.search:
        found = search_synthetic_pair(Fraction(args.a), Fraction(args.b), args.r)
        if found is None:
            body = {"found": False}
        else:
            body = {"found": True, "xi0": list(found["xi0"]), "xi": list(found["xi"]),
                    "report": found["report"].to_json()}
    else:
        lo, hi = parse_range(args.range)
        rep = nonisomorphism_report(parse_int_list(args.xi0), parse_int_list(args.xi),
                                    Fraction(args.a), Fraction(args.b), args.r, (lo, hi))
        body = rep.to_json()
    _deliver(out, args.out, gio.emit(body, "JSON"))


def cmd_props(args, out: gio.OutputSet):
    g = parse_function_spec(args.g)
    res = {}
    for prop in PROPERTIES:
        r = property_check(g, prop, args.samples, args.seed)
        res[prop] = {"holds": bool(r), "samples": args.samples,
                     "counterexample": list(r.counterexample) if r.counterexample else None}
    _deliver(out, args.out, gio.emit({"g": g.spec(), "seed": args.seed, "properties": res}, "JSON"))
    return 0 if all(v["holds"] for v in res.values()) else 1


def _deliver(out: gio.OutputSet, path, data: bytes):
    if path:
        out.write(path, data)
    else:
        sys.stdout.write(data.decode())


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys override the flags")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--memory-budget", type=int, default=DEFAULT_MEMORY_MIB, help="MiB for word materialization")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (stdout when omitted)")

    p = argparse.ArgumentParser(prog="grates", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", parents=[common], help="primes -> system JSON")
    c.add_argument("--primes", required=True)
    c.add_argument("--stages", type=int)
    c.add_argument("--assumption", default="prefix", help="prefix | none | gamma:G,C=c")
    c.set_defaults(func=cmd_construct)

    e = sub.add_parser("entropy", parents=[common], help="certified H(g, P_k) series as CSV")
    e.add_argument("--system", required=True)
    e.add_argument("--g", required=True)
    e.add_argument("--E", default="unit")
    e.add_argument("--k", required=True, help="k or lo..hi")
    e.add_argument("--stage", type=int)
    e.add_argument("--path", choices=("symbolic", "geometric"), default="symbolic")
    e.set_defaults(func=cmd_entropy)

    k = sub.add_parser("classify", parents=[common], help="class verdict for g")
    k.add_argument("--g", required=True)
    k.add_argument("--depth", type=int, default=50)
    k.set_defaults(func=cmd_classify)

    r = sub.add_parser("rates", parents=[common], help="ratios H_n / a_n")
    r.add_argument("--series", required=True)
    r.add_argument("--seq", required=True, help="n | log2n | hlog2n[:hir|hlog] | phi2pow:<g> | philog:<g>")
    r.add_argument("--reindex", help="zeta:q0,q1,.. | scaled:a:p0,p1,.. | thresholds:t0,t1,..")
    r.add_argument("--c", type=float)
    r.add_argument("--out-csv")
    r.set_defaults(func=cmd_rates)

    t = sub.add_parser("theorem54", parents=[common], help="finite-stage Theorem 5.4 inequality")
    t.add_argument("--system", required=True)
    t.add_argument("--g", default="gir")
    t.add_argument("--E", default="unit")
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--entropy-csv")
    t.set_defaults(func=cmd_theorem54)

    l = sub.add_parser("lemma58", parents=[common], help="Lemma 5.8 bound and verification")
    l.add_argument("--system", required=True)
    l.add_argument("--k", type=int, required=True)
    l.add_argument("--n", type=int, required=True)
    l.add_argument("--eps", default="1")
    l.add_argument("--a", default="1/5")
    l.add_argument("--r", type=int, default=2)
    l.add_argument("--non-strict", action="store_true", help="evaluate outside the lemma's k range")
    l.add_argument("--no-entropy", action="store_true", help="bound only")
    l.set_defaults(func=cmd_lemma58)

    n = sub.add_parser("noniso", parents=[common], help="non-isomorphism criterion evidence")
    n.add_argument("--xi0")
    n.add_argument("--xi")
    n.add_argument("--a", default="1/10000")
    n.add_argument("--b", default="2498/10000")
    n.add_argument("--r", type=int, default=2)
    n.add_argument("--range", default="1..1000000000000")
    n.add_argument("--search", action="store_true")
    n.set_defaults(func=cmd_noniso)

    q = sub.add_parser("props", parents=[common], help="randomized property suite for g")
    q.add_argument("--g", required=True)
    q.add_argument("--samples", type=int, default=1000)
    q.set_defaults(func=cmd_props)
    return p


def _apply_config(args):
    if not args.config:
        return args
    p = Path(args.config)
    if not p.exists():
        raise UsageError(f"config file {args.config} does not exist")
    data = json.loads(p.read_text())
    for key, val in data.items():
        dest = key.replace("-", "_")
        if dest in ("command", "func"):
            continue
        if not hasattr(args, dest):
            raise UsageError(f"config key {key!r} does not apply to {args.command}")
        setattr(args, dest, val)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = gio.OutputSet(os.environ.get(OUTDIR_ENV))
    try:
        args = _apply_config(args)
        if args.command == "noniso" and not args.search and not (args.xi0 and args.xi):
            raise UsageError("noniso needs --xi0 and --xi (or --search)")
        rc = args.func(args, out)
        return int(rc or 0)
    except (UsageError, ValueError, MemoryError, OSError, KeyError, json.JSONDecodeError) as e:
        out.remove_all()
        print(f"grates {args.command}: error: {e}", file=sys.stderr)
        return 2
    except Exception:
        out.remove_all()
        raise


if __name__ == "__main__":
    sys.exit(main())
