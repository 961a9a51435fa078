"""Command-line entry point: ``sri <subcommand>``.

Exit codes: 0 optimal (or success), 1 unsat or a failed check, 2 timeout,
3 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from statistics import mean
from typing import Optional

from . import analysis, criteria, engine, ipexport, model, oracle, reductions
from .criteria import CRITERIA, Criterion, solve_criterion
from .errors import SRIError

EXIT_OK, EXIT_UNSAT, EXIT_TIMEOUT, EXIT_INPUT = 0, 1, 2, 3
DEFAULT_TIMEOUT_MS = 3_000_000
BENCH_HEADER = ["criterion", "n", "completeness", "seed", "objective", "nodes", "millis", "status"]

_STATUS = {engine.OPTIMAL: "optimal", engine.UNSAT: "unsat", engine.BUDGET_EXCEEDED: "timeout"}
_EXIT = {engine.OPTIMAL: EXIT_OK, engine.UNSAT: EXIT_UNSAT, engine.BUDGET_EXCEEDED: EXIT_TIMEOUT}


class InputError(Exception):
    pass


def _pairs(m: Optional[model.Matching]):
    return None if m is None else [[a + 1, b + 1] for a, b in m.pairs()]


def _plain(value):
    return list(value) if isinstance(value, tuple) else value


def result_document(res: criteria.CriterionResult) -> dict:
    out = res.outcome
    return {
        "criterion": res.criterion.value,
        "status": _STATUS[out.status],
        "objective": _plain(out.objective_value),
        "matching": _pairs(out.matching),
        "profile": None if res.profile is None else res.profile.as_list(),
        "profile_scope": res.scope,
        "cost": None if res.summary is None else res.summary.cost,
        "regret": None if res.summary is None else res.summary.regret,
        "blocking": None if res.summary is None else res.summary.blocking_count,
        "trace": [[k, v] for k, v in res.trace],
        "nodes": out.stats.nodes,
        "millis": round(out.stats.millis, 3),
    }


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args) -> model.Instance:
    return model.load_instance(args.instance, symmetrize=getattr(args, "symmetrize", False))


def _csv_floats(text: str, kind=float) -> list:
    try:
        return [kind(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"cannot parse list {text!r}") from None


# -- subcommands ----------------------------------------------------------------


def cmd_generate(args) -> int:
    inst = model.generate_random(model.RandomSpec(args.size, args.completeness, args.seed))
    _emit(model.serialize_instance(inst), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args)
    res = solve_criterion(inst, args.criterion, time_limit_ms=args.timeout_ms)
    doc = result_document(res)
    if args.format == "json":
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        lines = [f"{k}: {v}" for k, v in doc.items() if k != "matching"]
        if res.matching is not None:
            lines.append("matching:")
            lines += [f"  {a} {b}" for a, b in doc["matching"]]
        _emit("\n".join(lines) + "\n", args.out)
    if res.status == engine.UNSAT:
        print(f"{args.criterion}: instance admits no stable matching", file=sys.stderr)
    return _EXIT[res.status]


def cmd_enumerate(args) -> int:
    inst = _load(args)
    ms = oracle.enumerate_stable(inst)
    if args.format == "json":
        _emit(json.dumps({"count": len(ms), "matchings": [_pairs(m) for m in ms]}, indent=2) + "\n", args.out)
    else:
        chunks = [f"# {len(ms)} stable matching(s)"]
        for i, m in enumerate(ms, start=1):
            chunks.append(f"# matching {i}\n" + model.serialize_matching(m).rstrip("\n"))
        _emit("\n".join(chunks) + "\n", args.out)
    return EXIT_OK


def criterion_value(inst: model.Instance, m: model.Matching, c: Criterion):
    """The quantity criterion c ranks matchings by, measured on m."""
    if c is Criterion.ALMOST_STABLE:
        return analysis.count_blocking(inst, m)
    if c is Criterion.ANY_STABLE:
        return None
    p = analysis.profile(inst, m)
    if c is Criterion.EGALITARIAN:
        return p.cost()
    if c is Criterion.FC_MAX:
        return p[1] if p.length else 0
    if c is Criterion.MIN_REGRET:
        return p.regret()
    return p.counts


def cmd_check(args) -> int:
    inst = _load(args)
    m = model.load_matching(args.matching, inst.n)
    model.check_matching(inst, m)
    c = Criterion(args.criterion)
    blocking = sorted(analysis.blocking_pairs(inst, m))
    doc = {"criterion": c.value, "stable": not blocking, "blocking": len(blocking)}
    # almost-stable accepts any matching; every other criterion needs stability
    ok = c is Criterion.ALMOST_STABLE or not blocking
    value = criterion_value(inst, m, c) if ok or c is Criterion.ALMOST_STABLE else None
    doc["value"] = _plain(value)
    if args.assert_optimal and ok:
        best = solve_criterion(inst, c, time_limit_ms=args.timeout_ms)
        if best.status != engine.OPTIMAL:
            return _EXIT[best.status]
        doc["optimum"] = _plain(best.objective)
        if c is not Criterion.ANY_STABLE:
            ok = _plain(value) == _plain(best.objective)
    doc["ok"] = ok
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK if ok else EXIT_UNSAT


def cmd_reduce(args) -> int:
    with open(args.graph, encoding="utf-8") as fh:
        g = reductions.parse_graph(fh.read())
    spec = reductions.GadgetSpec(args.variant, g)
    inst = spec.build()
    _emit(model.serialize_instance(inst), args.out)
    if args.verify:
        rep = reductions.predict_and_verify(spec, time_limit_ms=args.timeout_ms)
        print(
            f"{rep.variant}: k={rep.k} predicted {rep.prediction.measure} "
            f"{rep.prediction.formula} = {rep.prediction.value}, actual {rep.actual} "
            f"({'ok' if rep.ok else 'MISMATCH'})",
            file=sys.stderr,
        )
        return EXIT_OK if rep.ok else EXIT_UNSAT
    return EXIT_OK


def cmd_export_lp(args) -> int:
    inst = _load(args)
    m = ipexport.build_ip(inst, args.objective, level=args.level, sense=args.sense)
    _emit(ipexport.export_lp(m), args.out)
    return EXIT_OK


def _objective_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        return " ".join(str(v) for v in value)
    return str(value)


def bench_rows(sizes, completeness, seeds, crits, timeout_ms):
    for c in crits:
        for n in sizes:
            for p in completeness:
                for seed in range(seeds):
                    inst = model.generate_random(model.RandomSpec(n, p, seed))
                    res = solve_criterion(inst, c, time_limit_ms=timeout_ms)
                    status = _STATUS[res.status]
                    obj = "" if status == "timeout" else _objective_cell(res.objective)
                    yield [c, n, p, seed, obj, res.outcome.stats.nodes, f"{res.outcome.stats.millis:.3f}", status]


def bench_summary(rows) -> list[list]:
    """Per (criterion, n, completeness) cell: mean millis and nodes, or TO if any run timed out."""
    cells: dict = {}
    for r in rows:
        cells.setdefault((r[0], r[1], r[2]), []).append(r)
    out = []
    for (c, n, p), rs in cells.items():
        if any(r[7] == "timeout" for r in rs):
            out.append([c, n, p, len(rs), "TO", "TO"])
        else:
            out.append([c, n, p, len(rs), f"{mean(float(r[6]) for r in rs):.3f}", f"{mean(int(r[5]) for r in rs):.1f}"])
    return out


def cmd_bench(args) -> int:
    sizes = _csv_floats(args.sizes, int)
    comp = _csv_floats(args.completeness, float)
    crits = CRITERIA if args.criteria == "all" else _csv_floats(args.criteria, str)
    for c in crits:
        Criterion(c)
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        rows = []
        for row in bench_rows(sizes, comp, args.seeds, crits, args.timeout_ms):
            w.writerow(row)
            fh.flush()
            rows.append(row)
    finally:
        if fh is not sys.stdout:
            fh.close()
    summary = bench_summary(rows)
    if args.summary:
        with open(args.summary, "w", newline="", encoding="utf-8") as sh:
            sw = csv.writer(sh, lineterminator="\n")
            sw.writerow(["criterion", "n", "completeness", "runs", "mean_millis", "mean_nodes"])
            sw.writerows(summary)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sri", description="Optimal stable matchings for stable roommates with incomplete lists")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", help="instance file")
            p.add_argument("--symmetrize", action="store_true", help="drop one-sided list entries instead of rejecting them")
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--completeness", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    common(p, instance=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve one criterion")
    common(p)
    p.add_argument("--criterion", choices=CRITERIA, default="any-stable")
    p.add_argument("--timeout-ms", type=float, default=DEFAULT_TIMEOUT_MS)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", help="list every stable matching")
    common(p)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("check", help="verify a matching file against an instance")
    common(p)
    p.add_argument("matching", help="matching file")
    p.add_argument("--criterion", choices=CRITERIA, default="any-stable")
    p.add_argument("--assert-optimal", action="store_true", help="also require the criterion optimum")
    p.add_argument("--timeout-ms", type=float, default=DEFAULT_TIMEOUT_MS)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="build a hardness gadget from a graph file")
    p.add_argument("graph", help="graph file: 'n m' then m lines 'u v'")
    p.add_argument("--variant", choices=reductions.VARIANTS, required=True)
    p.add_argument("--verify", action="store_true", help="solve the gadget and compare with the predicted optimum")
    p.add_argument("--timeout-ms", type=float, default=DEFAULT_TIMEOUT_MS)
    common(p, instance=False)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("export-lp", help="write the integer program in LP format")
    common(p)
    p.add_argument("--objective", choices=ipexport.OBJECTIVES, default=ipexport.EGALITARIAN)
    p.add_argument("--level", type=int)
    p.add_argument("--sense", choices=("minimize", "maximize"))
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("bench", help="sweep random instances and write CSV")
    p.add_argument("--sizes", default="20,40")
    p.add_argument("--completeness", default="0.25,0.5,0.75,1.0")
    p.add_argument("--seeds", type=int, default=5, help="seeds 0..N-1 per cell")
    p.add_argument("--criteria", default="all", help="comma-separated criteria or 'all'")
    p.add_argument("--timeout-ms", type=float, default=DEFAULT_TIMEOUT_MS)
    p.add_argument("--summary", help="also write per-cell means (TO if any run timed out)")
    common(p, instance=False)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except (SRIError, InputError, OSError, ValueError) as e:
        print(f"sri {args.command}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
