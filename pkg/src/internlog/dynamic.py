"""Dynamic predicates: assertz with optional interning, first-argument index."""
from __future__ import annotations

from .clauses import CompiledClause, compile_clause
from .intern import InternStore, copy_term
from .reader import Clause, predicate_of
from .terms import LIST, Atom, Cons, Functor, Struct, deref


def index_key(t):
    """First-argument key: principal functor for compounds, the value for constants.

    Interned and heap terms with the same principal functor get the same key.
    Returns None for an unbound argument.
    """
    t = deref(t)
    tp = type(t)
    if tp is Struct:
        return t.functor
    if tp is Cons:
        return LIST
    if tp is int:
        return ("i", t)
    if tp is Atom:
        return t
    return None


def heap_cells(t) -> int:
    """Words held by heap (non-interned) records reachable from ``t``."""
    n = 0
    stack = [t]
    while stack:
        x = deref(stack.pop())
        tp = type(x)
        if tp is Cons and not x.interned:
            n += 2
            stack.append(x.head)
            stack.append(x.tail)
        elif tp is Struct and not x.interned:
            n += x.functor.arity + 1
            stack.extend(x.args)
    return n


class DynamicPredicate:
    def __init__(self, pred: Functor, intern_mode: bool = False, store: InternStore | None = None):
        self.functor = pred
        self.intern_mode = intern_mode
        self.store = store
        self.clauses: list[CompiledClause] = []
        self.index: dict[object, list[CompiledClause]] = {}
        self.var_clauses: list[CompiledClause] = []
        self.heap_cells = 0

    def assertz(self, clause: Clause):
        head = deref(clause.head)
        if predicate_of(head) is not self.functor:
            raise ValueError(f"clause for {predicate_of(head)} asserted into {self.functor}")
        # detach from the caller's bindings
        varmap = {}
        head = copy_term(head, varmap)
        body = tuple(copy_term(g, varmap) for g in clause.body)
        if self.intern_mode:
            if self.store is None:
                raise ValueError("intern-mode dynamic predicate needs a store")
            intern = self.store.intern_term
            if type(head) is Struct:
                head = Struct(head.functor, tuple(intern(a) for a in head.args))
            body = tuple(
                Struct(g.functor, tuple(intern(a) for a in g.args)) if type(g) is Struct else g for g in body
            )
        compiled = compile_clause(Clause(head, body))
        args = head.args if type(head) is Struct else ()
        for a in args:
            self.heap_cells += heap_cells(a)
        self.clauses.append(compiled)
        key = index_key(args[0]) if args else None
        if key is None:
            self.var_clauses.append(compiled)
            for bucket in self.index.values():
                bucket.append(compiled)
        else:
            bucket = self.index.get(key)
            if bucket is None:
                bucket = self.index[key] = list(self.var_clauses)
            bucket.append(compiled)
        return compiled

    def clauses_for(self, args) -> list[CompiledClause]:
        if not args:
            return self.clauses
        key = index_key(args[0])
        if key is None:
            return self.clauses
        return self.index.get(key, self.var_clauses)


class DynamicStore:
    def __init__(self, store: InternStore):
        self.store = store
        self.preds: dict[Functor, DynamicPredicate] = {}

    def declare(self, pred: Functor, intern_mode: bool = False) -> DynamicPredicate:
        dp = self.preds.get(pred)
        if dp is None:
            dp = self.preds[pred] = DynamicPredicate(pred, intern_mode, self.store)
        return dp

    def get(self, pred: Functor) -> DynamicPredicate | None:
        return self.preds.get(pred)

    def assertz(self, clause: Clause):
        pred = predicate_of(deref(clause.head))
        dp = self.preds.get(pred)
        if dp is None:
            dp = self.declare(pred)
        return dp.assertz(clause)

    def heap_cells(self) -> int:
        return sum(dp.heap_cells for dp in self.preds.values())
