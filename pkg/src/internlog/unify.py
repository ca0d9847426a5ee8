"""Trail-based unification with the interned fast paths."""
from __future__ import annotations

from .terms import Cons, Struct, Var, deref


class StaleMark(Exception):
    """Raised when undoing to a mark that was already unwound past."""


class BindingStore:
    """Variable bindings live on the variables; the trail records them."""

    __slots__ = ("trail", "comparisons")

    def __init__(self):
        self.trail: list[Var] = []
        self.comparisons = 0

    def mark(self) -> int:
        return len(self.trail)

    def undo_to(self, mark: int):
        trail = self.trail
        if mark > len(trail):
            raise StaleMark(f"mark {mark} is above trail height {len(trail)}")
        while len(trail) > mark:
            trail.pop().ref = None

    def bind(self, v: Var, t):
        v.ref = t
        self.trail.append(v)

    def bindings_since(self, mark: int) -> list[Var]:
        return self.trail[mark:]


def unify(a, b, s: BindingStore) -> bool:
    """Unify ``a`` and ``b``; on failure ``s`` is left as it was.

    No occurs check.  Two interned records are equal iff they are the
    same record, so they never need to be descended into.
    """
    mark = len(s.trail)
    if _unify(a, b, s):
        return True
    s.undo_to(mark)
    return False


def _unify(a, b, s: BindingStore) -> bool:
    trail = s.trail
    stack = [(a, b)]
    n = 0
    try:
        while stack:
            a, b = stack.pop()
            n += 1
            while type(a) is Var:
                r = a.ref
                if r is None:
                    break
                a = r
            while type(b) is Var:
                r = b.ref
                if r is None:
                    break
                b = r
            if a is b:
                continue
            ta = type(a)
            tb = type(b)
            if ta is Var:
                if tb is Var and b.id > a.id:
                    b.ref = a
                    trail.append(b)
                else:
                    a.ref = b
                    trail.append(a)
            elif tb is Var:
                b.ref = a
                trail.append(b)
            elif ta is Cons:
                if tb is not Cons or (a.interned and b.interned):
                    return False
                stack.append((a.tail, b.tail))
                stack.append((a.head, b.head))
            elif ta is Struct:
                if tb is not Struct or (a.interned and b.interned) or a.functor is not b.functor:
                    return False
                stack.extend(zip(reversed(a.args), reversed(b.args)))
            elif ta is int:
                if tb is not int or a != b:
                    return False
            else:
                return False
        return True
    finally:
        s.comparisons += n
