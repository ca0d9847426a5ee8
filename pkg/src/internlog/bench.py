"""Benchmark harness for the tabling/interning workloads.

Inputs are generated with :class:`random.Random` (Mersenne Twister)
seeded by ``seed``, so every field of a :class:`BenchRow` except
``cpu_ms`` is reproducible.
"""
from __future__ import annotations

import csv
import io
import random
import time
from dataclasses import dataclass, field

from .solver import Engine, relaxed_gc
from .tables import ResourceBudgetExceeded
from .terms import Struct, Var, functor, make_list

BENCHES = ("intern_list", "islist", "epal", "lr", "find")
MODES = ("intern", "plain")
CSV_COLUMNS = ("bench", "n", "mode", "cpu_ms", "trie_nodes", "table_bytes", "intern_records", "intern_bytes", "result")
DEFAULT_MAX_TABLE_NODES = 50_000_000

ISLIST = """\
:- table islist/1{as_intern}.
islist([]).
islist([_|L]) :- islist(L).
"""

EPAL = """\
:- table epal/2{as_intern}.
epal --> [].
epal --> [X],epal,[X].
"""

LR = """\
:- table lr/2{as_intern}.
lr --> [].
lr --> lr,[1].
lr --> lr,[2].
lr --> lr,[3].
"""

FIND = """\
find(Ent,Len,SortedList) :-
    Len > 0,
    split_sorted(Len,SortedList,LoList,HiList),
    HiList = [Mid|_],
    (Mid == Ent
     -> true
     ;  LoLen is Len // 2,
        (Ent @< Mid
         -> find(Ent,LoLen,LoList)
         ;  HiLen is Len - LoLen, HiLen > 1,
            find(Ent,HiLen,HiList)
        ) ).

:- table split_sorted/4{as_intern}.
split_sorted(Len,List,LoList,HiList) :-
    Len1 is Len // 2, split_off(Len1,List,LoList,HiList).

split_off(Len,List,LoList,HiList) :-
    (Len =< 0
     -> LoList = [], HiList = List
     ;  List = [X|List1], LoList = [X|LoList1], Len1 is Len - 1,
        split_off(Len1,List1,LoList1,HiList)  ).
"""

PROGRAMS = {"islist": ISLIST, "epal": EPAL, "lr": LR, "find": FIND}


def program_text(name: str, mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return PROGRAMS[name].format(as_intern=" as intern" if mode == "intern" else "")


@dataclass
class BenchRow:
    bench: str
    n: int
    mode: str
    cpu_ms: float | str
    trie_nodes: int | str
    table_bytes: int | str
    intern_records: int | str
    intern_bytes: int | str
    result: str
    detail: dict = field(default_factory=dict, compare=False)

    @classmethod
    def failed(cls, bench, n, mode, detail=None):
        return cls(bench, n, mode, "xx", "xx", "xx", "xx", "xx", "xx", detail or {})


def _cpu() -> float:
    return time.process_time()


def islist_input(n: int, seed: int) -> list[int]:
    return random.Random(seed).sample(range(1, 10 * n + 1), n)


def epal_input(n: int, seed: int) -> list[int]:
    rng = random.Random(seed)
    half = [rng.randint(1, 10_000_000) for _ in range(n // 2)]
    return half + half[::-1]


def lr_input(n: int, seed: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.choice((1, 2, 3)) for _ in range(n)]


def find_input(n: int) -> list[int]:
    return list(range(0, 2 * n, 2))


def find_probes(count: int = 100) -> list[int]:
    return [100 * i + 1 for i in range(1, count + 1)]


def _goal(name: str, *args):
    return Struct(functor(name, len(args)), tuple(args))


def _row(bench, n, mode, engine, cpu, result, **detail) -> BenchRow:
    ts = engine.table_space_stats()
    st = engine.store.stats()
    detail.setdefault("call_entries", ts["call_entries"])
    return BenchRow(
        bench, n, mode, round(cpu * 1000, 3), ts["nodes"], ts["bytes_estimate"], st.records, st.bytes_estimate, result, detail
    )


def bench(
    name: str,
    n: int,
    mode: str = "intern",
    seed: int = 0,
    *,
    max_table_nodes: int = DEFAULT_MAX_TABLE_NODES,
    probes: int = 100,
    items: list | None = None,
) -> BenchRow:
    """Run one benchmark instance and report its counters.

    ``items`` overrides the generated input list (islist, epal, lr).
    """
    if name not in BENCHES:
        raise ValueError(f"unknown benchmark {name!r}; expected one of {BENCHES}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if name == "intern_list":
        engine = Engine()
        lst = make_list(items if items is not None else islist_input(n, seed))
        t0 = _cpu()
        if mode == "intern":
            with relaxed_gc():
                engine.store.intern_term(lst)
        t1 = _cpu()
        return _row(name, n, mode, engine, t1 - t0, "count")

    engine = Engine(program_text(name, mode), max_table_nodes=max_table_nodes)
    try:
        if name == "find":
            return _run_find(engine, n, mode, probes)
        if name == "islist":
            data = items if items is not None else islist_input(n, seed)
            goal = _goal("islist", make_list(data))
        elif name == "epal":
            data = items if items is not None else epal_input(n, seed)
            goal = _goal("epal", make_list(data), make_list([]))
        else:
            data = items if items is not None else lr_input(n, seed)
            goal = _goal("lr", make_list(data), make_list([]))
        t0 = _cpu()
        answers = list(engine.solve(goal, {}))
        t1 = _cpu()
    except (ResourceBudgetExceeded, MemoryError, RecursionError) as exc:
        return BenchRow.failed(name, n, mode, {"error": type(exc).__name__})
    pred = goal.functor
    trie = engine.tables.tries.get(pred)
    return _row(
        name,
        n,
        mode,
        engine,
        t1 - t0,
        "recognized" if answers else "rejected",
        symbols_inserted=trie.symbols_inserted if trie else 0,
        answers=len(answers),
    )


def _run_find(engine: Engine, n: int, mode: str, probes: int) -> BenchRow:
    lst = make_list(find_input(n))
    t0 = _cpu()
    if mode == "intern":
        # interned once up front, not once per probe
        with relaxed_gc():
            lst = engine.store.intern_term(lst)
    i = Var("I")
    key = Var("K")
    goal = Struct(
        functor(",", 2),
        (
            _goal("between", 1, probes, i),
            Struct(
                functor(",", 2),
                (
                    _goal("is", key, _goal("+", _goal("*", 100, i), 1)),
                    _goal("find", key, n, lst),
                ),
            ),
        ),
    )
    found = list(engine.solve(goal, {"I": i}))
    t1 = _cpu()
    entries = engine.table_entries("split_sorted", 4)
    return _row(
        "find",
        n,
        mode,
        engine,
        t1 - t0,
        "rejected" if not found else "recognized",
        probes=probes,
        found=len(found),
        rejected=probes - len(found),
        split_entries=len(entries),
    )


def emit_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([getattr(r, c) for c in CSV_COLUMNS])
    return buf.getvalue()
