"""Tabled evaluation of definite programs.

Non-tabled goals run in an iterative depth-first machine with a
choicepoint stack and a trail.  A call to an incomplete table suspends:
the rest of the resolvent (the continuation) is copied into a consumer
that the table resumes once per answer.  Work is grouped by the table
whose answer the continuation ends in (its owner); the scheduler always
works on the youngest table with pending work and completes a segment of
the table stack once nothing in it has work or depends on an older
table.  Answers to the top-level query are returned after completion.

Interned records make the copying cheap: calls and answers of an
intern-mode table are interned first, and copies of interned subterms
are just references.
"""
from __future__ import annotations

import gc
import logging
from contextlib import contextmanager

from .builtins import ARITH_COMPARE, BUILTINS, InstantiationError, evaluate_template
from .clauses import CompiledClause, TIte, TStruct, VarSlot, compile_clause, instantiate, unify_body, unify_head
from .dynamic import DynamicStore
from .intern import InternStore, TraversalCounters, copy_term
from .reader import Clause, Program, parse_program, parse_query, predicate_of
from .tables import CallTable, Status, TableEntry, TableSpace, Trie, add_answer, delinearize, linearize
from .terms import FAIL, TRUE, Atom, Struct, Var, deref, functor
from .unify import BindingStore, _unify

log = logging.getLogger(__name__)

COMMA = functor(",", 2)
SEMI = functor(";", 2)
ARROW = functor("->", 2)
BETWEEN = functor("between", 3)
EQ = functor("=", 2)
IS = functor("is", 2)

K_CLAUSES, K_ALT, K_BETWEEN, K_ANSWERS = range(4)


class UndefinedPredicate(Exception):
    pass


class TablingError(Exception):
    pass


@contextmanager
def relaxed_gc(threshold: int = 200_000):
    """Collect the youngest generation less often while the block runs.

    Evaluation allocates many short-lived acyclic objects; the default
    threshold makes the cycle collector rescan them far too often.
    """
    old = gc.get_threshold()
    gc.set_threshold(max(threshold, old[0]), old[1], old[2])
    try:
        yield
    finally:
        gc.set_threshold(*old)


def _push(goals, rest, fresh):
    for g in reversed(goals):
        rest = (g, rest, fresh)
    return rest


class CutTo:
    __slots__ = ("height",)

    def __init__(self, height: int):
        self.height = height


class AnswerGoal:
    __slots__ = ("owner", "template")

    def __init__(self, owner, template):
        self.owner = owner
        self.template = template


class Resolve:
    """Resolve a call against program clauses, bypassing the table."""

    __slots__ = ("pred", "args")

    def __init__(self, pred, args):
        self.pred = pred
        self.args = args


class Consumer:
    __slots__ = ("table", "owner", "vars", "cont", "next", "scheduled")

    def __init__(self, table, owner, variables, cont):
        self.table = table
        self.owner = owner
        self.vars = variables
        self.cont = cont
        self.next = 0
        self.scheduled = False


class _Producer:
    __slots__ = ()


PRODUCE = _Producer()


class QueryRoot:
    """Pseudo-table collecting the answers to the top-level query."""

    def __init__(self, template):
        self.template = template
        self.index = 0
        self.leader = 0
        self.queue: list = []
        self.answers: list = []
        self.seen: set = set()
        self.status = Status.EVALUATING
        self.predicate = None


class EngineStats:
    def __init__(self):
        self.producer_clause_tries = 0
        self.deliveries = 0
        self.consumers = 0
        self.completed_sccs = 0


class Engine:
    """One evaluator: program, intern store, tables and dynamic store.

    ``intern`` overrides the declared modes: True makes every tabled and
    dynamic predicate intern-mode, False makes every one plain.
    """

    def __init__(
        self,
        program: Program | str | None = None,
        *,
        store: InternStore | None = None,
        intern: bool | None = None,
        max_table_nodes: int | None = None,
    ):
        self.store = store if store is not None else InternStore()
        self.space = TableSpace(max_table_nodes)
        self.tables = CallTable(self.space)
        self.dynamic = DynamicStore(self.store)
        self.bindings = BindingStore()
        self.counters = TraversalCounters()
        self.stats = EngineStats()
        self.intern_override = intern
        self.static: dict = {}
        self.table_modes: dict = {}
        self._stack: list = []
        if program is not None:
            self.consult(program)

    # program loading

    def _mode(self, declared: str) -> bool:
        if self.intern_override is not None:
            return self.intern_override
        return declared == "intern"

    def consult(self, program: Program | str):
        if isinstance(program, str):
            program = parse_program(program)
        for pred, mode in program.table_decls.items():
            if self.dynamic.get(pred) is not None:
                raise ValueError(f"{pred} cannot be both tabled and dynamic")
            self.table_modes[pred] = self._mode(mode)
        for pred, mode in program.dynamic_decls.items():
            if pred in self.table_modes:
                raise ValueError(f"{pred} cannot be both tabled and dynamic")
            self.dynamic.declare(pred, self._mode(mode))
        for pred, clauses in program.clauses.items():
            dp = self.dynamic.get(pred)
            for c in clauses:
                if dp is not None:
                    dp.assertz(c)
                else:
                    self.static.setdefault(pred, []).append(compile_clause(c))
        return self

    def declare_dynamic(self, name: str, arity: int, intern: bool = False):
        pred = functor(name, arity)
        if pred in self.table_modes:
            raise ValueError(f"{pred} cannot be both tabled and dynamic")
        return self.dynamic.declare(pred, intern if self.intern_override is None else self.intern_override)

    def assertz(self, clause):
        if not isinstance(clause, Clause):
            clause = Clause(deref(clause))
        return self.dynamic.assertz(clause)

    # queries

    def query(self, text: str) -> list[dict]:
        goal, names = parse_query(text)
        return list(self.solve(goal, names))

    def solve(self, goal, names: dict | None = None):
        """Yield one {name: term} dict per distinct answer of ``goal``."""
        if names is None:
            names = {f"G{v.id}": v for v in linearize([goal], False)[1]}
        else:
            names = {k: v for k, v in names.items() if not k.startswith("_")}
        keys = list(names)
        template = [names[k] for k in keys]
        answers = self._evaluate(goal, template)
        for ans in answers:
            yield dict(zip(keys, ans))

    def _evaluate(self, goal, template) -> list:
        root = QueryRoot(template)
        cont = (goal, (AnswerGoal(root, template), None, None), None)
        root.queue.append(cont)
        self._stack = [root]
        try:
            with relaxed_gc():
                self._schedule()
        except BaseException:
            self._abandon()
            raise
        finally:
            self.bindings.undo_to(0)
        return root.answers

    def _abandon(self):
        for entry in self._stack[1:]:
            if entry.status is not Status.COMPLETE:
                self.tables.forget(entry)
        self._stack = []

    # scheduling

    def _schedule(self):
        stack = self._stack
        while stack:
            top = stack[-1]
            if top.queue:
                self._work(top)
                continue
            i = len(stack) - 1
            lmin = i
            while i >= 0:
                t = stack[i]
                if t.queue:
                    break
                if t.leader < lmin:
                    lmin = t.leader
                if lmin >= i:
                    self._complete(stack, i)
                    break
                i -= 1
            else:
                raise TablingError("scheduler found no work and nothing to complete")
            if i < len(stack) and stack[i].queue:
                self._work(stack[i])

    def _complete(self, stack, i):
        for t in stack[i:]:
            t.status = Status.COMPLETE
            if isinstance(t, TableEntry):
                t.consumers = []
        del stack[i:]
        self.stats.completed_sccs += 1

    def _work(self, owner):
        item = owner.queue.pop()
        if item is PRODUCE:
            args, tvars = delinearize(owner.call_syms)
            clauses = self.static.get(owner.predicate, ())
            self.stats.producer_clause_tries += len(clauses)
            cont = (Resolve(owner.predicate, args), (AnswerGoal(owner, tvars), None, None), None)
            self._run(cont, owner)
        elif type(item) is Consumer:
            self._deliver(item)
        else:
            self._run(item, owner)

    def _deliver(self, c: Consumer):
        answers = c.table.answer_list
        s = self.bindings
        while c.next < len(answers):
            ans = answers[c.next]
            c.next += 1
            self.stats.deliveries += 1
            mark = len(s.trail)
            terms = ans.terms
            if not ans.ground:
                vm = {}
                terms = [copy_term(t, vm) for t in terms]
            ok = True
            for v, t in zip(c.vars, terms):
                if not _unify(v, t, s):
                    ok = False
                    break
            if ok:
                self._run(c.cont, c.owner)
            s.undo_to(mark)
        c.scheduled = False

    def _new_answer(self, owner, template):
        if type(owner) is QueryRoot:
            key = tuple(linearize(template, False)[0])
            if key not in owner.seen:
                owner.seen.add(key)
                vm = {}
                owner.answers.append([copy_term(t, vm) for t in template])
            return
        if add_answer(owner, template, self.store):
            for c in owner.consumers:
                if not c.scheduled:
                    c.scheduled = True
                    c.owner.queue.append(c)

    def _call_table(self, pred, args, cont, owner, cps):
        """Returns the continuation to proceed with, or None to backtrack."""
        intern_mode = self.table_modes[pred]
        if intern_mode:
            intern = self.store.intern_term
            args = [intern(a) for a in args]
        syms, cvars = linearize(args, intern_mode)
        trie = self.tables.trie_for(pred, intern_mode)
        leaf, is_new = trie.insert(syms)
        if is_new:
            entry = TableEntry(pred, syms, intern_mode, Trie(intern_mode, self.space), leaf)
            leaf.payload = entry
            self.tables.entries.append(entry)
            entry.status = Status.EVALUATING
            entry.index = entry.leader = len(self._stack)
            entry.queue.append(PRODUCE)
            self._stack.append(entry)
        else:
            entry = leaf.payload
        if entry.status is Status.COMPLETE:
            answers = entry.answer_list
            if not answers:
                return None
            s = self.bindings
            cp = [K_ANSWERS, len(s.trail), cont, cvars, answers, 0]
            cps.append(cp)
            return self._next_answer(cp, cps)
        # suspend: copy the continuation into a consumer
        vm = {}
        vars_copy = [copy_term(v, vm) for v in cvars]
        cont_copy = self._copy_cont(cont, vm)
        c = Consumer(entry, owner, vars_copy, cont_copy)
        entry.consumers.append(c)
        self.stats.consumers += 1
        if entry.index < owner.leader:
            owner.leader = entry.index
        if entry.answer_list:
            c.scheduled = True
            owner.queue.append(c)
        return None

    def _next_answer(self, cp, cps):
        s = self.bindings
        answers = cp[4]
        i = cp[5]
        ans = answers[i]
        if i + 1 < len(answers):
            cp[5] = i + 1
        else:
            cps.pop()
        terms = ans.terms
        if not ans.ground:
            vm = {}
            terms = [copy_term(t, vm) for t in terms]
        for v, t in zip(cp[3], terms):
            if not _unify(v, t, s):
                return None
        return cp[2]

    def _copy_cont(self, cont, vm):
        goals = []
        while cont is not None:
            g, cont, fr = cont
            goals.append(instantiate(g, fr) if fr is not None else g)
        out = None
        for g in reversed(goals):
            tg = type(g)
            if tg is AnswerGoal:
                g = AnswerGoal(g.owner, [copy_term(t, vm) for t in g.template])
            elif tg is CutTo:
                raise TablingError("tabled call inside an if-then-else condition")
            else:
                g = copy_term(g, vm)
            out = (g, out, None)
        return out

    # the goal machine

    def _run(self, cont, owner):
        s = self.bindings
        trail = s.trail
        base = len(trail)
        cps: list = []
        static = self.static
        tabled = self.table_modes
        dynamic = self.dynamic.preds
        builtins = BUILTINS
        while True:
            if cont is not None:
                goal, rest, fr = cont
                if fr is not None:
                    # a clause-body template with its environment
                    tg = type(goal)
                    if tg is TStruct:
                        f = goal.functor
                        # unification and arithmetic run on the template itself
                        if f is EQ:
                            a, b = goal.args
                            if type(a) is VarSlot and fr[a.k] is not None:
                                ok = unify_body(b, fr[a.k], fr, s, _unify)
                            elif type(b) is VarSlot and fr[b.k] is not None:
                                ok = unify_body(a, fr[b.k], fr, s, _unify)
                            else:
                                ok = unify_body(b, instantiate(a, fr), fr, s, _unify)
                            cont = rest if ok else None
                            continue
                        if f is IS:
                            a, b = goal.args
                            ok = unify_body(a, evaluate_template(b, fr), fr, s, _unify)
                            cont = rest if ok else None
                            continue
                        cmp = ARITH_COMPARE.get(f)
                        if cmp is not None:
                            a, b = goal.args
                            cont = rest if cmp(evaluate_template(a, fr), evaluate_template(b, fr)) else None
                            continue
                        goal = instantiate(goal, fr)
                    elif tg is TIte:
                        if goal.cond is None:
                            cps.append([K_ALT, len(trail), _push(goal.else_, rest, fr)])
                            cont = _push(goal.then, rest, fr)
                            continue
                        if goal.else_ is not None:
                            cps.append([K_ALT, len(trail), _push(goal.else_, rest, fr)])
                            cut = CutTo(len(cps) - 1)
                        else:
                            cut = CutTo(len(cps))
                        cont = _push(goal.cond, (cut, _push(goal.then, rest, fr), None), fr)
                        continue
                    elif tg is VarSlot:
                        goal = instantiate(goal, fr)
                tg = type(goal)
                if tg is Var:
                    goal = deref(goal)
                    tg = type(goal)
                if tg is Struct:
                    f = goal.functor
                    if f is COMMA:
                        a = goal.args
                        cont = (a[0], (a[1], rest, None), None)
                        continue
                    bi = builtins.get(f)
                    if bi is not None:
                        if bi(self, goal.args):
                            cont = rest
                            continue
                        cont = None
                        continue
                    if f in tabled:
                        cont = self._call_table(f, goal.args, rest, owner, cps)
                        continue
                    clauses = static.get(f)
                    if clauses is None:
                        dp = dynamic.get(f)
                        if dp is not None:
                            clauses = dp.clauses_for(goal.args)
                    if clauses is not None:
                        cont = self._try_clauses(goal.args, clauses, 0, rest, cps, None)
                        continue
                    if f is SEMI:
                        left, right = goal.args
                        left = deref(left)
                        cps.append([K_ALT, len(trail), (right, rest, None)])
                        if type(left) is Struct and left.functor is ARROW:
                            c, t = left.args
                            cont = (c, (CutTo(len(cps) - 1), (t, rest, None), None), None)
                        else:
                            cont = (left, rest, None)
                        continue
                    if f is ARROW:
                        c, t = goal.args
                        cont = (c, (CutTo(len(cps)), (t, rest, None), None), None)
                        continue
                    if f is BETWEEN:
                        cont = self._between(goal.args, rest, cps)
                        continue
                    raise UndefinedPredicate(f"unknown procedure {f}")
                if tg is CutTo:
                    del cps[goal.height:]
                    cont = rest
                    continue
                if tg is AnswerGoal:
                    self._new_answer(goal.owner, goal.template)
                    cont = None
                    continue
                if tg is Resolve:
                    clauses = static.get(goal.pred, ())
                    cont = self._try_clauses(goal.args, clauses, 0, rest, cps, None)
                    continue
                if tg is Atom:
                    if goal is TRUE:
                        cont = rest
                        continue
                    if goal is FAIL:
                        cont = None
                        continue
                    f = functor(goal, 0)
                    if f in tabled:
                        cont = self._call_table(f, (), rest, owner, cps)
                        continue
                    clauses = static.get(f)
                    if clauses is None:
                        dp = dynamic.get(f)
                        if dp is not None:
                            clauses = dp.clauses
                    if clauses is not None:
                        cont = self._try_clauses((), clauses, 0, rest, cps, None)
                        continue
                    raise UndefinedPredicate(f"unknown procedure {f}")
                if tg is Var:
                    raise InstantiationError("unbound goal")
                raise TypeError(f"goal is not callable: {goal!r}")
            # backtrack
            while True:
                if not cps:
                    s.undo_to(base)
                    return
                cp = cps[-1]
                s.undo_to(cp[1])
                kind = cp[0]
                if kind == K_CLAUSES:
                    cont = self._try_clauses(cp[3], cp[4], cp[5], cp[2], cps, cp)
                elif kind == K_ALT:
                    cps.pop()
                    cont = cp[2]
                elif kind == K_BETWEEN:
                    v = cp[4]
                    if v < cp[5]:
                        cp[4] = v + 1
                    else:
                        cps.pop()
                    cp[3].ref = v
                    trail.append(cp[3])
                    cont = cp[2]
                else:
                    cont = self._next_answer(cp, cps)
                if cont is not None:
                    break

    def _try_clauses(self, args, clauses, i, cont, cps, cp):
        s = self.bindings
        trail = s.trail
        mark = len(trail)
        n = len(clauses)
        while i < n:
            cl: CompiledClause = clauses[i]
            i += 1
            fresh = [None] * cl.nvars
            ok = True
            for tmpl, a in zip(cl.head_args, args):
                if not unify_head(tmpl, a, fresh, s, _unify):
                    ok = False
                    break
            if ok:
                if i < n:
                    if cp is None:
                        cps.append([K_CLAUSES, mark, cont, args, clauses, i])
                    else:
                        cp[5] = i
                elif cp is not None:
                    cps.pop()
                body = cl.body
                for g in reversed(body):
                    cont = (g, cont, fresh)
                return cont
            while len(trail) > mark:
                trail.pop().ref = None
        if cp is not None:
            cps.pop()
        return None

    def _between(self, args, cont, cps):
        lo = deref(args[0])
        hi = deref(args[1])
        x = deref(args[2])
        if type(lo) is Var or type(hi) is Var:
            raise InstantiationError("between/3 needs bound limits")
        if type(x) is int:
            return cont if lo <= x <= hi else None
        if type(x) is not Var:
            return None
        if lo > hi:
            return None
        s = self.bindings
        if lo < hi:
            cps.append([K_BETWEEN, len(s.trail), cont, x, lo + 1, hi])
        s.bind(x, lo)
        return cont

    # reporting

    def table_space_stats(self) -> dict:
        return self.tables.stats()

    def table_entries(self, name: str, arity: int) -> list[TableEntry]:
        pred = functor(name, arity)
        return [e for e in self.tables.entries if e.predicate is pred]


def solve(goal, program: Program | str, **kwargs):
    """Evaluate ``goal`` (text or term) against ``program`` in a fresh engine."""
    engine = Engine(program, **kwargs)
    if isinstance(goal, str):
        return engine.query(goal)
    return list(engine.solve(goal))


__all__ = [
    "Engine",
    "TablingError",
    "UndefinedPredicate",
    "solve",
    "predicate_of",
]
