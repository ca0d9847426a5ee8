"""Deterministic builtins: arithmetic, comparison and term inspection."""
from __future__ import annotations

from .clauses import TStruct, VarSlot
from .intern import copy_term, is_ground
from .terms import Atom, Cons, Struct, Var, deref, functor
from .unify import _unify


class InstantiationError(Exception):
    pass


class ArithmeticTypeError(TypeError):
    pass


def _int_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("integer division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


_BINARY = {
    functor("+", 2): lambda a, b: a + b,
    functor("-", 2): lambda a, b: a - b,
    functor("*", 2): lambda a, b: a * b,
    functor("//", 2): _int_div,
}
_NEG = functor("-", 1)


def evaluate(t) -> int:
    t = deref(t)
    tp = type(t)
    if tp is int:
        return t
    if tp is Var:
        raise InstantiationError("unbound variable in arithmetic")
    if tp is Struct:
        op = _BINARY.get(t.functor)
        if op is not None:
            return op(evaluate(t.args[0]), evaluate(t.args[1]))
        if t.functor is _NEG:
            return -evaluate(t.args[0])
    raise ArithmeticTypeError(f"not an integer expression: {t!r}")


def evaluate_template(t, fresh) -> int:
    """Evaluate an arithmetic clause template without instantiating it."""
    tp = type(t)
    if tp is int:
        return t
    if tp is VarSlot:
        v = fresh[t.k]
        if v is None:
            raise InstantiationError("unbound variable in arithmetic")
        return evaluate(v)
    if tp is TStruct:
        op = _BINARY.get(t.functor)
        if op is not None:
            return op(evaluate_template(t.args[0], fresh), evaluate_template(t.args[1], fresh))
        if t.functor is _NEG:
            return -evaluate_template(t.args[0], fresh)
        raise ArithmeticTypeError(f"not an integer expression: {t.functor}")
    return evaluate(t)


ARITH_COMPARE = {
    functor("<", 2): lambda a, b: a < b,
    functor(">", 2): lambda a, b: a > b,
    functor("=<", 2): lambda a, b: a <= b,
    functor(">=", 2): lambda a, b: a >= b,
    functor("=:=", 2): lambda a, b: a == b,
}


def identical(a, b) -> bool:
    """``==``: structural identity without binding anything."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = deref(x)
        y = deref(y)
        if x is y:
            continue
        tx = type(x)
        if tx is not type(y):
            return False
        if tx is int:
            if x != y:
                return False
        elif tx is Cons:
            if x.interned and y.interned:
                return False
            stack.append((x.tail, y.tail))
            stack.append((x.head, y.head))
        elif tx is Struct:
            if (x.interned and y.interned) or x.functor is not y.functor:
                return False
            stack.extend(zip(x.args, y.args))
        else:
            return False
    return True


def _order_class(t) -> int:
    tp = type(t)
    if tp is Var:
        return 0
    if tp is int:
        return 1
    if tp is Atom:
        return 2
    return 3


def _shape(t):
    # (arity, name) with list cells as '.'/2
    if type(t) is Cons:
        return 2, ".", (t.head, t.tail)
    return t.functor.arity, t.functor.name.name, t.args


def compare(a, b) -> int:
    """Standard order: Var < Int < Atom < Compound; compounds by arity, name, args.

    Interned terms are compared by structure, never by handle.
    """
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = deref(x)
        y = deref(y)
        if x is y:
            continue
        cx, cy = _order_class(x), _order_class(y)
        if cx != cy:
            return -1 if cx < cy else 1
        if cx == 0:
            return -1 if x.id < y.id else 1
        if cx == 1:
            if x != y:
                return -1 if x < y else 1
            continue
        if cx == 2:
            if x.name != y.name:
                return -1 if x.name < y.name else 1
            continue
        ax, nx, argsx = _shape(x)
        ay, ny, argsy = _shape(y)
        if ax != ay:
            return -1 if ax < ay else 1
        if nx != ny:
            return -1 if nx < ny else 1
        stack.extend(zip(reversed(argsx), reversed(argsy)))
    return 0


def _arith(cmp):
    def run(engine, args):
        return cmp(evaluate(args[0]), evaluate(args[1]))

    return run


def _is(engine, args):
    return _unify(args[0], evaluate(args[1]), engine.bindings)


def _eq(engine, args):
    return _unify(args[0], args[1], engine.bindings)


def _ground(engine, args):
    return is_ground(args[0], engine.counters)


def _copy_term(engine, args):
    return _unify(args[1], copy_term(args[0], counters=engine.counters), engine.bindings)


def _intern_term(engine, args):
    return _unify(args[1], engine.store.intern_term(args[0]), engine.bindings)


BUILTINS = {f: _arith(cmp) for f, cmp in ARITH_COMPARE.items()}
BUILTINS.update({
    functor("=", 2): _eq,
    functor("is", 2): _is,
    functor("==", 2): lambda engine, args: identical(args[0], args[1]),
    functor("\\==", 2): lambda engine, args: not identical(args[0], args[1]),
    functor("@<", 2): lambda engine, args: compare(args[0], args[1]) < 0,
    functor("ground", 1): _ground,
    functor("copy_term", 2): _copy_term,
    functor("intern_term", 2): _intern_term,
})
# true/0, fail/0 and between/3 are handled by the solver loop
