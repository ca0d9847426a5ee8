"""Command line: ``run`` a program against a query, or ``bench`` a workload."""
from __future__ import annotations

import argparse
import sys

from .bench import BENCHES, DEFAULT_MAX_TABLE_NODES, MODES, bench, emit_csv
from .reader import parse_program, parse_query
from .solver import Engine
from .terms import render


def _format_answer(ans: dict) -> str:
    if not ans:
        return "yes"
    return ", ".join(f"{k} = {render(v)}" for k, v in ans.items())


def cmd_run(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
        engine = Engine(parse_program(text), max_table_nodes=args.max_table_nodes)
        goal, names = parse_query(args.query)
        answers = list(engine.solve(goal, names))
    except Exception as exc:  # any load or evaluation failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for ans in answers:
        print(_format_answer(ans))
    if args.stats:
        st = engine.store.stats()
        ts = engine.table_space_stats()
        print(
            f"% intern_records={st.records} intern_bytes={st.bytes_estimate} "
            f"trie_nodes={ts['nodes']} table_bytes={ts['bytes_estimate']} call_entries={ts['call_entries']}"
        )
    return 0 if answers else 1


def cmd_bench(args) -> int:
    try:
        row = bench(args.name, args.n, args.mode, args.seed, max_table_nodes=args.max_table_nodes)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = emit_csv([row])
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="internlog", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="consult FILE and print the answers to a query")
    r.add_argument("file")
    r.add_argument("--query", required=True)
    r.add_argument("--stats", action="store_true", help="append intern and table statistics")
    r.add_argument("--max-table-nodes", type=int, default=None)
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="run one benchmark instance and print a CSV row")
    b.add_argument("name", choices=BENCHES)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--mode", choices=MODES, default="intern")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--csv", help="also write the CSV to this path")
    b.add_argument("--max-table-nodes", type=int, default=DEFAULT_MAX_TABLE_NODES)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)
