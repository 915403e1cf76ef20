"""Command-line front end.

Subcommands: validate, explain, recognize, export-dot.  Exit codes are
uniform across commands: 0 success with results, 1 success but nothing
found, 2 bad input (parse or query errors), 3 I/O trouble.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .errors import AbducerError
from .kb import CausalNetwork, parse_network
from .oracle import RankedExplanation, best_explanations_bruteforce
from .recognition import (
    RecognitionQuery,
    all_concept_ids,
    parse_recognition_kb,
    recognize,
)
from .solver import SolveStats, explain


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _split_csv(raw: str, what: str) -> list[str]:
    items = [t.strip() for t in raw.split(",") if t.strip()]
    if not items:
        raise ValueError(f"{what} must be a non-empty comma-separated list")
    return items


def _result_row(r: RankedExplanation) -> dict:
    return {
        "rank": r.rank,
        "culprit": r.scenario.culprit,
        "causations": [[x, y] for x, y in r.scenario.sorted_causations],
        "log_weight": r.log_weight,
        "probability": r.probability,
    }


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


def _links_text(r: RankedExplanation) -> str:
    pairs = [f"{x}->{y}" for x, y in r.scenario.sorted_causations]
    return ",".join(pairs) if pairs else "-"


def cmd_validate(args: argparse.Namespace) -> int:
    text = _read(args.path)
    if args.path.endswith(".rkb"):
        kb = parse_recognition_kb(text)
        print(f"OK: {len(kb.concepts)} concepts, {len(kb.isa)} isa, {len(kb.specs)} specs")
    else:
        net = parse_network(text)
        print(f"OK: {len(net.events)} events, {len(net.causal)} causal, {len(net.isa)} isa")
    return 0


def cmd_explain(args: argparse.Namespace) -> int:
    net = parse_network(_read(args.path))
    obs = _split_csv(args.obs, "--obs")
    stats = SolveStats() if args.stats else None
    started = time.perf_counter()
    if args.oracle:
        from .kb import add_top

        if args.multi:
            work = net if net.top else add_top(net)
            results = best_explanations_bruteforce(work, obs, args.k, culprit=work.top)
        else:
            results = best_explanations_bruteforce(net, obs, args.k)
    else:
        results = explain(net, obs, k=args.k, multi=args.multi, stats=stats)
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    if args.json:
        payload = {
            "query": {
                "observations": sorted(set(obs)),
                "mode": "multi" if args.multi else "single",
                "k": args.k,
                "engine": "oracle" if args.oracle else "solver",
            },
            "results": [_result_row(r) for r in results],
        }
        if args.stats:
            payload["stats"] = {
                "wall_ms": elapsed_ms,
                "dp_runs": stats.dp_runs if stats else 0,
                "relaxations": stats.relaxations if stats else 0,
                "table_entries": stats.table_entries if stats else 0,
            }
        print(_dump_json(payload))
    else:
        for r in results:
            print(
                f"rank={r.rank} culprit={r.scenario.culprit} "
                f"weight={r.log_weight:.6f} probability={r.probability:.6g} "
                f"causations={_links_text(r)}"
            )
        if not results:
            print("no explanation")
        if args.stats:
            line = f"stats: wall_ms={elapsed_ms:.1f}"
            if stats is not None:
                line += (
                    f" dp_runs={stats.dp_runs} relaxations={stats.relaxations}"
                    f" table_entries={stats.table_entries}"
                )
            print(line)
    return 0 if results else 1


def cmd_recognize(args: argparse.Namespace) -> int:
    kb = parse_recognition_kb(_read(args.path))
    if args.open_cset:
        cset = list(all_concept_ids(kb))
    elif args.cset:
        cset = _split_csv(args.cset, "--cset")
    else:
        raise ValueError("either --cset or --open-cset is required")
    descr = []
    for tok in _split_csv(args.descr, "--descr"):
        p, eq, v = tok.partition("=")
        if not eq or not p or not v:
            raise ValueError(f"bad description entry (want property=value): {tok}")
        descr.append((p, v))

    stats = SolveStats() if args.stats else None
    started = time.perf_counter()
    rows = recognize(kb, RecognitionQuery.make(cset, descr), stats=stats)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    ranked = [r for r in rows if r.applicable]

    if args.json:
        out = []
        rank = 0
        for r in rows:
            rec: dict = {"concept": r.concept, "applicable": r.applicable}
            if r.applicable:
                rank += 1
                rec["rank"] = rank
                rec["weight"] = r.weight
                rec["score"] = float(r.score)  # type: ignore[arg-type]
            else:
                rec["reason"] = r.reason
            out.append(rec)
        payload = {
            "query": {
                "cset": sorted(set(cset)),
                "descr": [[p, v] for p, v in sorted(set(descr))],
            },
            "results": out,
        }
        if args.stats:
            payload["stats"] = {
                "wall_ms": elapsed_ms,
                "dp_runs": stats.dp_runs if stats else 0,
                "relaxations": stats.relaxations if stats else 0,
                "table_entries": stats.table_entries if stats else 0,
            }
        print(_dump_json(payload))
    else:
        rank = 0
        for r in rows:
            if r.applicable:
                rank += 1
                print(
                    f"rank={rank} concept={r.concept} "
                    f"weight={r.weight:.6f} score={float(r.score):g}"  # type: ignore[arg-type]
                )
            else:
                print(f"inapplicable concept={r.concept} reason={r.reason}")
        if not rows:
            print("no candidates")
        if args.stats:
            line = f"stats: wall_ms={elapsed_ms:.1f}"
            if stats is not None:
                line += (
                    f" dp_runs={stats.dp_runs} relaxations={stats.relaxations}"
                    f" table_entries={stats.table_entries}"
                )
            print(line)
    return 0 if ranked else 1


def _dot_lines(net: CausalNetwork) -> list[str]:
    lines = ["digraph causal_network {", "  rankdir=LR;"]
    for e in net.events:
        if e.is_disorder:
            lines.append(f'  "{e.id}" [shape=doublecircle];')
        else:
            lines.append(f'  "{e.id}";')
    for l in net.causal:
        lines.append(f'  "{l.cause}" -> "{l.effect}" [label="{l.cond_prob:g}"];')
    for l in net.isa:
        lines.append(f'  "{l.child}" -> "{l.parent}" [style=dashed,label="isa"];')
    lines.append("}")
    return lines


def cmd_export_dot(args: argparse.Namespace) -> int:
    net = parse_network(_read(args.path))
    text = "\n".join(_dot_lines(net)) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="abducer", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a KB and report its size")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("explain", help="rank explanations for observations")
    p.add_argument("path")
    p.add_argument("--obs", required=True, help="comma-separated observed events")
    p.add_argument("--k", type=int, default=1, help="number of results (default 1)")
    p.add_argument("--multi", action="store_true", help="allow multiple culprits via the augmented root")
    p.add_argument("--oracle", action="store_true", help="use the exhaustive reference engine")
    p.add_argument("--json", action="store_true")
    p.add_argument("--stats", action="store_true", help="include timing and DP counters")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("recognize", help="rank candidate concepts for a description")
    p.add_argument("path")
    p.add_argument("--cset", help="comma-separated candidate concepts")
    p.add_argument("--open-cset", action="store_true", help="consider every concept as a candidate")
    p.add_argument("--descr", required=True, help="comma-separated property=value pairs")
    p.add_argument("--json", action="store_true")
    p.add_argument("--stats", action="store_true")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("export-dot", help="render the network as a DOT digraph")
    p.add_argument("path")
    p.add_argument("--out", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_export_dot)

    return top


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except (AbducerError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
