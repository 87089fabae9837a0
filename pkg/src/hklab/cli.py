"""Command-line harness: generate instances, solve, certify, report.

Exit codes: 0 on success, 1 on validation or solver errors, 2 when a
size cap refuses to run (override with --force).  Rationals print as
"p/q" in lowest terms next to a decimal approximation where helpful.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from .core import (
    Instance,
    UnreachableError,
    ValidationError,
    format_rational,
    load_instance,
    parse_rational,
    support_graph,
)
from .exact import (
    DEFAULT_DP_CAP,
    DEFAULT_DUAL_CAP,
    SizeCapExceeded,
    exact_atsp,
    exact_atspp,
)
from .instances import (
    gen_bem,
    gen_fig1,
    gen_fig4,
    gen_random,
    nw_to_unweighted,
    split_vertex,
)
from .merge import path_from_tour_report
from .relaxation import (
    InfeasibleRelaxation,
    PreconditionError,
    min_gap_dual,
    solve_relaxation,
)

CSV_COLUMNS = ["name", "n", "m", "lp", "opt", "ratio", "delta_star", "merge_ok", "ms"]


def _approx(q: Fraction) -> str:
    return f"{float(q):.6g}"


def _write_instance(inst: Instance, out: str | None) -> None:
    text = inst.to_json()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_gen(args) -> int:
    if args.family == "fig1":
        inst = gen_fig1(args.k)
    elif args.family == "fig4":
        inst = gen_fig4()
    elif args.family == "bem":
        inst = gen_bem(args.l, args.i)
    elif args.family == "random":
        inst = gen_random(
            args.n,
            parse_rational(args.p),
            args.cost_bound,
            args.seed,
            node_weighted=args.node_weighted,
            mode=args.mode,
        )
    elif args.family == "split":
        inst = split_vertex(load_instance(args.input), args.vertex, args.style)
    elif args.family == "nw2uw":
        inst, _ = nw_to_unweighted(load_instance(args.input), parse_rational(args.eps))
    else:
        raise ValidationError(f"unknown family {args.family!r}")
    _write_instance(inst, args.output)
    return 0


def _cmd_lp(args) -> int:
    inst = load_instance(args.file)
    lp, dual = solve_relaxation(inst)
    print(f"lp = {format_rational(lp.objective)} (~{_approx(lp.objective)})")
    print(f"cut family ({len(lp.cuts)} sets):")
    for u in lp.cuts:
        print("  " + " ".join(sorted(u)))
    return 0


def _cmd_dual(args) -> int:
    inst = load_instance(args.file)
    lp, dual = solve_relaxation(inst)
    if args.min_gap:
        cert = min_gap_dual(inst, lp)
        payload = cert.witness.to_json_dict()
        payload["delta_star"] = format_rational(cert.delta_star)
    else:
        payload = dual.to_json_dict()
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_opt(args) -> int:
    inst = load_instance(args.file)
    cap = 10**9 if args.force else DEFAULT_DP_CAP
    walk, cost = (exact_atspp if inst.mode == "atspp" else exact_atsp)(inst, cap=cap)
    print(
        json.dumps(
            {
                "opt": format_rational(cost),
                "walk": list(walk.vertices),
            },
            indent=2,
        )
    )
    return 0


def _cmd_merge(args) -> int:
    inst = load_instance(args.file)
    cap = 10**9 if args.force else DEFAULT_DP_CAP
    rep = path_from_tour_report(inst, d=parse_rational(args.d), cap=cap)
    print(
        json.dumps(
            {
                "cost": format_rational(rep.cost),
                "tour_cost": format_rational(rep.tour_cost),
                "k": rep.k,
                "lp": format_rational(rep.lp_value),
                "gap": format_rational(rep.gap),
                "merge_bound": format_rational(rep.merge_bound),
                "target": None if rep.target is None else format_rational(rep.target),
                "walk": list(rep.walk.vertices),
            },
            indent=2,
        )
    )
    return 0


def _ratio_row(inst: Instance, force: bool) -> dict:
    t0 = time.monotonic()
    row = {"name": inst.name, "n": inst.n, "m": inst.m}
    lp, dual = solve_relaxation(inst)
    row["lp"] = format_rational(lp.objective)
    cap = 10**9 if force else DEFAULT_DP_CAP
    try:
        _, opt = (exact_atspp if inst.mode == "atspp" else exact_atsp)(inst, cap=cap)
        row["opt"] = format_rational(opt)
        row["ratio"] = (
            format_rational(opt / lp.objective) if lp.objective > 0 else "n/a"
        )
    except SizeCapExceeded:
        row["opt"] = "skipped"
        row["ratio"] = "n/a"
    if inst.mode == "atspp":
        row["delta_star"] = format_rational(min_gap_dual(inst, lp).delta_star)
        try:
            rep = path_from_tour_report(inst, cap=cap)
            ok = rep.target is None or rep.cost <= rep.target
            row["merge_ok"] = "pass" if ok else "fail"
        except SizeCapExceeded:
            row["merge_ok"] = "skipped"
    else:
        row["delta_star"] = "n/a"
        row["merge_ok"] = "n/a"
    row["ms"] = str(int((time.monotonic() - t0) * 1000))
    return row


def _cmd_ratio(args) -> int:
    inst = load_instance(args.file)
    row = _ratio_row(inst, args.force)
    writer = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerow(row)
    return 0


def _parse_range(spec: str) -> list[int]:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(spec)]


def _cmd_report(args) -> int:
    instances: list[Instance] = []
    if args.family == "fig1":
        for k in _parse_range(args.k):
            instances.append(gen_fig1(k))
    elif args.family:
        raise ValidationError(f"unsupported report family {args.family!r}")
    for path in args.files or []:
        instances.append(load_instance(path))
    if not instances:
        raise ValidationError("nothing to report on")
    rows = [_ratio_row(inst, args.force) for inst in instances]
    rows.sort(key=lambda r: r["name"])
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hklab",
        description="Exact lab for cut relaxations of directed tour/path problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write an instance as JSON")
    gsub = gen.add_subparsers(dest="family", required=True)
    g1 = gsub.add_parser("fig1")
    g1.add_argument("--k", type=int, required=True)
    gsub.add_parser("fig4")
    gb = gsub.add_parser("bem")
    gb.add_argument("--l", type=int, required=True)
    gb.add_argument("--i", type=int, required=True)
    gr = gsub.add_parser("random")
    gr.add_argument("--n", type=int, required=True)
    gr.add_argument("--p", default="1/2")
    gr.add_argument("--cost-bound", type=int, default=10)
    gr.add_argument("--seed", type=int, default=0)
    gr.add_argument("--node-weighted", action="store_true")
    gr.add_argument("--mode", choices=["atsp", "atspp"], default="atspp")
    gs = gsub.add_parser("split")
    gs.add_argument("--input", required=True)
    gs.add_argument("--vertex", required=True)
    gs.add_argument("--style", choices=["out_in", "duplicate"], default="out_in")
    gn = gsub.add_parser("nw2uw")
    gn.add_argument("--input", required=True)
    gn.add_argument("--eps", required=True)
    for g in (g1, gsub.choices["fig4"], gb, gr, gs, gn):
        g.add_argument("-o", "--output")

    lp = sub.add_parser("lp", help="LP value and generated cut family")
    lp.add_argument("file")

    dual = sub.add_parser("dual", help="dual certificate JSON")
    dual.add_argument("file")
    dual.add_argument("--min-gap", action="store_true")

    opt = sub.add_parser("opt", help="exact optimum walk")
    opt.add_argument("file")
    opt.add_argument("--force", action="store_true")

    merge = sub.add_parser("merge", help="tour-splitting pipeline")
    merge.add_argument("file")
    merge.add_argument("--d", default="3")
    merge.add_argument("--force", action="store_true")

    ratio = sub.add_parser("ratio", help="per-instance report line")
    ratio.add_argument("file")
    ratio.add_argument("--force", action="store_true")

    report = sub.add_parser("report", help="batch CSV report")
    report.add_argument("--family", choices=["fig1"])
    report.add_argument("--k", default="2..6")
    report.add_argument("--files", nargs="*")
    report.add_argument("--csv")
    report.add_argument("--force", action="store_true")
    return parser


COMMANDS = {
    "gen": _cmd_gen,
    "lp": _cmd_lp,
    "dual": _cmd_dual,
    "opt": _cmd_opt,
    "merge": _cmd_merge,
    "ratio": _cmd_ratio,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SizeCapExceeded as exc:
        print(f"refused: {exc} (use --force to override)", file=sys.stderr)
        return 2
    except (
        ValidationError,
        UnreachableError,
        InfeasibleRelaxation,
        PreconditionError,
        OSError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
