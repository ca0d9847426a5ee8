"""Clause templates.

A stored clause keeps its ground subterms as they are (shared by every
renaming) and replaces variables by numbered slots.  Renaming then only
rebuilds the non-ground spine, and head unification can match the
template against the call without building the head at all.
"""
from __future__ import annotations

from .intern import is_ground
from .reader import Clause
from .terms import TRUE, Cons, Struct, Var, deref, functor

COMMA = functor(",", 2)
SEMI = functor(";", 2)
ARROW = functor("->", 2)


class VarSlot:
    __slots__ = ("k",)

    def __init__(self, k: int):
        self.k = k


class TStruct:
    __slots__ = ("functor", "args")

    def __init__(self, functor, args):
        self.functor = functor
        self.args = args


class TCons:
    __slots__ = ("head", "tail")

    def __init__(self, head, tail):
        self.head = head
        self.tail = tail


class TIte:
    """Compiled control construct: ``(C -> T ; E)``, ``(C -> T)`` or ``(L ; R)``.

    ``cond`` is None for a plain disjunction (``then`` holds the left
    branch); ``else_`` is None when there is no else branch.  Branches are
    tuples of goal templates.
    """

    __slots__ = ("cond", "then", "else_")

    def __init__(self, cond, then, else_):
        self.cond = cond
        self.then = then
        self.else_ = else_


class CompiledClause:
    __slots__ = ("head_args", "body", "nvars", "source")

    def __init__(self, head_args, body, nvars, source):
        self.head_args = head_args
        self.body = body
        self.nvars = nvars
        self.source = source


def _template(t, slots: dict):
    t = deref(t)
    tp = type(t)
    if tp is Var:
        s = slots.get(t)
        if s is None:
            s = slots[t] = VarSlot(len(slots))
        return s
    if tp is Struct or tp is Cons:
        if t.interned or is_ground(t):
            return t
        if tp is Cons:
            # iterative along the list spine
            cells = []
            while type(t) is Cons and not t.interned and not is_ground(t):
                cells.append(t)
                t = deref(t.tail)
            out = _template(t, slots)
            for c in reversed(cells):
                out = TCons(_template(c.head, slots), out)
            return out
        return TStruct(t.functor, tuple(_template(a, slots) for a in t.args))
    return t


def _goals(g, slots: dict) -> tuple:
    # flatten conjunctions; control constructs become TIte nodes
    g = deref(g)
    if type(g) is Struct:
        f = g.functor
        if f is COMMA:
            return _goals(g.args[0], slots) + _goals(g.args[1], slots)
        if f is SEMI:
            left = deref(g.args[0])
            right = _goals(g.args[1], slots)
            if type(left) is Struct and left.functor is ARROW:
                return (TIte(_goals(left.args[0], slots), _goals(left.args[1], slots), right),)
            return (TIte(None, _goals(left, slots), right),)
        if f is ARROW:
            return (TIte(_goals(g.args[0], slots), _goals(g.args[1], slots), None),)
    if g is TRUE:
        return ()
    return (_template(g, slots),)


def compile_clause(clause: Clause) -> CompiledClause:
    slots: dict = {}
    head = deref(clause.head)
    head_args = tuple(_template(a, slots) for a in head.args) if type(head) is Struct else ()
    body = ()
    for g in clause.body:
        body += _goals(g, slots)
    return CompiledClause(head_args, body, len(slots), clause)


def _conj(goals, fresh):
    if not goals:
        return TRUE
    out = instantiate(goals[-1], fresh)
    for g in reversed(goals[:-1]):
        out = Struct(COMMA, (instantiate(g, fresh), out))
    return out


def instantiate(t, fresh: list):
    tp = type(t)
    if tp is VarSlot:
        v = fresh[t.k]
        if v is None:
            v = fresh[t.k] = Var()
        return v
    if tp is TStruct:
        args = []
        for a in t.args:
            ta = type(a)
            if ta is VarSlot:
                # inlined: argument slots are the common case
                v = fresh[a.k]
                if v is None:
                    v = fresh[a.k] = Var()
                args.append(v)
            elif ta is TStruct or ta is TCons:
                args.append(instantiate(a, fresh))
            else:
                args.append(a)
        return Struct(t.functor, tuple(args))
    if tp is TIte:
        if t.cond is None:
            return Struct(SEMI, (_conj(t.then, fresh), _conj(t.else_, fresh)))
        ite = Struct(ARROW, (_conj(t.cond, fresh), _conj(t.then, fresh)))
        if t.else_ is None:
            return ite
        return Struct(SEMI, (ite, _conj(t.else_, fresh)))
    if tp is TCons:
        cells = []
        while type(t) is TCons:
            cells.append(t)
            t = t.tail
        out = instantiate(t, fresh)
        for c in reversed(cells):
            out = Cons(instantiate(c.head, fresh), out)
        return out
    return t


def unify_head(tmpl, term, fresh: list, s, unify_terms) -> bool:
    """Match a head template against a call argument without building it."""
    tp = type(tmpl)
    if tp is VarSlot:
        k = tmpl.k
        v = fresh[k]
        if v is None:
            while type(term) is Var and term.ref is not None:
                term = term.ref
            fresh[k] = term
            return True
        return unify_terms(v, term, s)
    if tp is TStruct or tp is TCons:
        while type(term) is Var:
            r = term.ref
            if r is None:
                term.ref = instantiate(tmpl, fresh)
                s.trail.append(term)
                return True
            term = r
        if tp is TCons:
            if type(term) is not Cons:
                return False
            if not unify_head(tmpl.head, term.head, fresh, s, unify_terms):
                return False
            return unify_head(tmpl.tail, term.tail, fresh, s, unify_terms)
        if type(term) is not Struct or term.functor is not tmpl.functor:
            return False
        for a, b in zip(tmpl.args, term.args):
            if not unify_head(a, b, fresh, s, unify_terms):
                return False
        return True
    return unify_terms(tmpl, term, s)


def unify_body(tmpl, term, fresh: list, s, unify_terms) -> bool:
    """Like :func:`unify_head`, for goals inside a clause body.

    Body goals can be retried on backtracking with the same environment,
    so a variable met for the first time is created and bound through the
    trail rather than stored directly.
    """
    tp = type(tmpl)
    if tp is VarSlot:
        k = tmpl.k
        v = fresh[k]
        if v is None:
            v = fresh[k] = Var()
            while type(term) is Var:
                r = term.ref
                if r is None:
                    if term is v:
                        return True
                    break
                term = r
            v.ref = term
            s.trail.append(v)
            return True
        return unify_terms(v, term, s)
    if tp is TStruct or tp is TCons:
        while type(term) is Var:
            r = term.ref
            if r is None:
                term.ref = instantiate(tmpl, fresh)
                s.trail.append(term)
                return True
            term = r
        if tp is TCons:
            if type(term) is not Cons:
                return False
            if not unify_body(tmpl.head, term.head, fresh, s, unify_terms):
                return False
            return unify_body(tmpl.tail, term.tail, fresh, s, unify_terms)
        if type(term) is not Struct or term.functor is not tmpl.functor:
            return False
        for a, b in zip(tmpl.args, term.args):
            if not unify_body(a, b, fresh, s, unify_terms):
                return False
        return True
    return unify_terms(tmpl, term, s)
