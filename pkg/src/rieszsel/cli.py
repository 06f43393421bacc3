"""Command-line front end.

Exit codes: 0 success, 1 input or parse error, 2 invariant violation,
3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bounds, line_mpd, metric, oracle, reductions, ultrametric
from .errors import CapExceeded, InputError, InvariantViolation, TrivialInstance

VERIFY_MAX_N = 12
SIG_DIGITS = 12


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _round(x):
    """Floats to 12 significant digits; non-finite values become strings."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, dict):
        return {str(k): _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if hasattr(x, "item"):  # numpy scalar
        return _round(x.item())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def render(result: dict, fmt: str) -> str:
    data = _round(result)
    if fmt == "json":
        return json.dumps(data, sort_keys=True)
    width = max((len(k) for k in data), default=0)
    lines = []
    for key in sorted(data):
        v = data[key]
        txt = v if isinstance(v, str) else json.dumps(v, sort_keys=True)
        lines.append(f"{key.ljust(width)}  {txt}")
    return "\n".join(lines)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _load_metric(args) -> metric.MetricInstance:
    m = metric.load_metric(_read(args.input))
    if getattr(args, "validate", False):
        bad = metric.validate_metric(m)
        if bad:
            raise InputError(f"not a metric: {bad[0].axiom} violated at {bad[0].witness}")
    return m


def _parse_subset(m, text: str) -> tuple:
    items = [x.strip() for x in text.split(",") if x.strip()]
    out = []
    for it in items:
        if it in m.labels:
            out.append(m.labels.index(it))
        else:
            try:
                out.append(int(it))
            except ValueError:
                raise InputError(f"unknown label {it!r}") from None
    return metric.as_subset(m, out)


# -- subcommands -------------------------------------------------------------


def cmd_energy(args):
    m = _load_metric(args)
    sub = _parse_subset(m, args.subset)
    return {
        "energy": metric.riesz_energy(m, sub, args.s),
        "mpd": metric.mpd(m, sub),
        "subset": metric.subset_labels(m, sub),
        "indices": list(sub),
    }


def cmd_solve_tree(args):
    t = ultrametric.parse_tree(_read(args.input))
    sol = ultrametric.solve_ultrametric(t, args.k, args.s)
    if args.table:
        Path(args.table).write_text(sol.table.to_csv())
    return {"energy": sol.energy, "subset": list(sol.labels), "indices": list(sol.subset),
            "k": args.k, "s": args.s}


def cmd_brute(args):
    m = _load_metric(args)
    if args.mpd:
        res = oracle.brute_force_mpd(m, args.k, cap=args.cap, threads=args.threads)
    else:
        if args.s is None:
            raise InputError("-s is required unless --mpd is given")
        res = oracle.brute_force_riesz(m, args.k, args.s, cap=args.cap, threads=args.threads)
    out = res.to_dict()
    out["labels"] = [metric.subset_labels(m, w) for w in res.witnesses]
    return out


def cmd_mpd_line(args):
    inst = line_mpd.load_line(_read(args.input))
    if args.method == "dp":
        value, sub = line_mpd.line_mpd_dp(inst, args.k)
    else:
        value, sub = line_mpd.line_mpd_search(inst, args.k)
    vals = inst.values()
    return {"value": value, "subset": list(sub), "xs": [float(vals[i]) for i in sub],
            "method": args.method}


def _verify_size(n):
    if n > VERIFY_MAX_N:
        raise CapExceeded(n, VERIFY_MAX_N)


def cmd_reduce_clique(args):
    g = reductions.load_graph(_read(args.input), n=args.n)
    red = reductions.clique_to_rssp(g, args.k, args.s)
    out = red.to_dict()
    if args.verify:
        _verify_size(g.n)
        chk = reductions.verify_clique_reduction(g, args.k, args.s, threads=args.threads)
        out.update(min_energy=chk.min_energy, clique_exists=chk.clique_exists,
                   decision=chk.decision, equivalent=chk.equivalent)
        if not chk.equivalent:
            raise _Violation(out)
    if args.emit:
        Path(args.emit).write_text(json.dumps(red.instance.to_dict()))
    return out


def cmd_reduce_gis(args):
    p = reductions.load_planar(_read(args.input))
    if args.k is not None:
        p = reductions.PlanarInstance(p.points, p.delta, args.k)
    if args.delta is not None:
        p = reductions.PlanarInstance(p.points, args.delta, p.k)
    try:
        red = reductions.gis_to_rssp(p)
    except TrivialInstance as e:
        return {"trivial": True, "reason": e.reason, "answer": e.answer, "k": p.k}
    out = red.to_dict()
    out["trivial"] = False
    if args.verify:
        _verify_size(len(p.points))
        chk = reductions.verify_gis_reduction(p, threads=args.threads)
        out.update(independent_exists=chk.independent_exists, decision=chk.decision,
                   equivalent=chk.equivalent, separated=chk.separated)
        if not (chk.equivalent and chk.separated):
            raise _Violation(out)
    if args.emit:
        Path(args.emit).write_text(json.dumps(red.instance.to_dict()))
    return out


def cmd_large_s(args):
    m = _load_metric(args)
    res = reductions.large_s_threshold(m, args.k, cap=args.cap)
    out = res.to_dict()
    if args.verify:
        _verify_size(m.n)
        s = args.s if args.s is not None else res.s0 * (1 + 1e-6) + 1.0
        chk = reductions.verify_large_s(m, args.k, s, threads=args.threads)
        out.update(s=s, minimizers=[list(w) for w in chk.minimizers],
                   all_mpd_optimal=chk.all_mpd_optimal)
        if not chk.all_mpd_optimal:
            raise _Violation(out)
    return out


def cmd_bounds(args):
    if args.layers is None:
        raise InputError("--layers is required")
    rep = bounds.verify_budget(args.r, args.s, args.layers)
    out = rep.to_dict()
    a, b = bounds.overlap_gap(args.r, args.s)
    out.update(zeta=bounds.zeta_minus_one(args.s), overlap_forbidden=a, overlap_admissible=b)
    if not rep.ok:
        raise _Violation(out)
    return out


def cmd_counterexample(args):
    cfg = oracle.SearchConfig(
        n_min=args.n_min, n_max=args.n_max, k_min=args.k_min, k_max=args.k_max,
        s=args.s if args.s is not None else 1.0, seed=args.seed, budget=args.budget,
        generator=args.generator, objective="mpd" if args.mpd else "riesz",
    )
    rep = oracle.find_line_counterexample(cfg)
    return rep.to_dict()


def cmd_validate(args):
    text = _read(args.input)
    kind = args.kind
    if kind == "auto":
        stripped = text.lstrip()
        if stripped.startswith("{"):
            try:
                obj = json.loads(text)
            except json.JSONDecodeError as e:
                raise InputError(f"invalid JSON: {e}") from None
            kind = "metric" if isinstance(obj, dict) and "dist" in obj else "tree"
        else:
            kind = "tree" if stripped.startswith("(") or text.rstrip().endswith(";") else "metric"
    if kind == "tree":
        t = ultrametric.parse_tree(text)
        m = ultrametric.tree_to_metric(t)
        bad = metric.validate_metric(m)
        um = metric.ultrametric_violation(m)
        return {"kind": "tree", "valid": not bad and um is None, "leaves": t.n_leaves,
                "violations": [v.to_dict() for v in bad],
                "ultrametric_witness": list(um) if um else None}
    m = metric.load_metric(text)
    bad = metric.validate_metric(m)
    um = metric.ultrametric_violation(m) if not bad else None
    return {"kind": "metric", "valid": not bad, "n": m.n,
            "violations": [v.to_dict() for v in bad],
            "ultrametric": not bad and um is None}


class _Violation(Exception):
    def __init__(self, payload):
        super().__init__("invariant violation")
        self.payload = payload


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--cap", type=int, default=None, help="enumeration cap (default: $RIESZ_CAP or 2e7)")

    p = _Parser(prog="rieszsel", description="Exact Riesz s-energy subset selection tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, inp=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if inp:
            sp.add_argument("input", help="input file, or - for stdin")
        sp.set_defaults(func=func)
        return sp

    sp = add("energy", cmd_energy, "Riesz energy and MPD of a subset")
    sp.add_argument("--subset", required=True, help="comma-separated labels or indices")
    sp.add_argument("-s", type=float, required=True)
    sp.add_argument("--validate", action="store_true")

    sp = add("solve-tree", cmd_solve_tree, "exact DP on an ultrametric tree (JSON or Newick)")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-s", type=float, required=True)
    sp.add_argument("--table", help="write the DP table as CSV to this path")

    sp = add("brute", cmd_brute, "exhaustive optimum over k-subsets")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-s", type=float)
    sp.add_argument("--mpd", action="store_true", help="maximize MPD instead of minimizing energy")
    sp.add_argument("--validate", action="store_true")

    sp = add("mpd-line", cmd_mpd_line, "exact MPD on the line")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--method", choices=("dp", "search"), default="dp")

    sp = add("reduce-clique", cmd_reduce_clique, "k-clique -> energy instance")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-s", type=float, required=True)
    sp.add_argument("-n", type=int, default=None, help="vertex count for edge-list input")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--emit", help="write the constructed metric JSON to this path")

    sp = add("reduce-gis", cmd_reduce_gis, "planar independent set -> energy instance")
    sp.add_argument("-k", type=int, default=None, help="override k from the file")
    sp.add_argument("--delta", type=float, default=None, help="override delta from the file")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--emit", help="write the constructed metric JSON to this path")

    sp = add("large-s", cmd_large_s, "exponent beyond which energy minimizers are MPD-optimal")
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-s", type=float, default=None, help="exponent for --verify (default s0(1+1e-6)+1)")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--validate", action="store_true")

    sp = add("bounds", cmd_bounds, "far-field budget report on a hexagonal packing", inp=False)
    sp.add_argument("-r", type=float, default=0.5)
    sp.add_argument("-s", type=float, required=True)
    sp.add_argument("--layers", type=int, required=True)

    sp = add("counterexample", cmd_counterexample, "search for a naive line-DP failure", inp=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=100_000)
    sp.add_argument("-s", type=float, default=None)
    sp.add_argument("--n-min", type=int, default=2)
    sp.add_argument("--n-max", type=int, default=8)
    sp.add_argument("--k-min", type=int, default=2)
    sp.add_argument("--k-max", type=int, default=4)
    sp.add_argument("--generator", choices=("random", "grid"), default="random")
    sp.add_argument("--mpd", action="store_true", help="check the exact MPD DP instead")

    sp = add("validate", cmd_validate, "check a metric or tree file")
    sp.add_argument("--kind", choices=("auto", "metric", "tree"), default="auto")
    return p


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        if args.threads < 1:
            raise InputError("--threads must be at least 1")
        result = args.func(args)
    except _Violation as v:
        print(render(v.payload, fmt), file=out)
        print("error: invariant violation", file=err)
        return 2
    except InvariantViolation as e:
        print(f"error: {e}", file=err)
        return 2
    except CapExceeded as e:
        print(f"error: {e}", file=err)
        return 3
    except InputError as e:
        print(f"error: {e}", file=err)
        return 1
    print(render(result, fmt), file=out)
    return 0


def main():  # pragma: no cover
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":  # pragma: no cover
    main()
