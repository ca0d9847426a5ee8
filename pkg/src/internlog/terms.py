"""Term representation shared by the heap and the intern store.

Integers are plain Python ints.  Atoms and functors are unique objects
drawn from process-wide tables, so they compare by identity.  Compound
terms (:class:`Struct`) and list cells (:class:`Cons`) carry an
``interned`` flag; the record layout is the same in both regions.
"""
from __future__ import annotations

import enum
import itertools
import re


class TermError(Exception):
    pass


class Tag(enum.Enum):
    VAR = "var"
    INT = "int"
    ATOM = "atom"
    COMPOUND = "compound"
    LIST_CELL = "list_cell"
    NIL = "nil"


class Atom:
    __slots__ = ("name", "id")

    def __init__(self, name: str, id: int):
        self.name = name
        self.id = id

    def __repr__(self):
        return f"Atom({self.name!r})"


class AtomTable:
    """Bijection between atom names and dense integer ids."""

    def __init__(self):
        self._by_name: dict[str, Atom] = {}
        self._by_id: list[Atom] = []

    def intern(self, name: str) -> Atom:
        a = self._by_name.get(name)
        if a is None:
            a = Atom(name, len(self._by_id))
            self._by_name[name] = a
            self._by_id.append(a)
        return a

    def by_id(self, id: int) -> Atom:
        return self._by_id[id]

    def __len__(self):
        return len(self._by_id)

    def __contains__(self, name):
        return name in self._by_name


ATOMS = AtomTable()


def intern_atom(name: str) -> Atom:
    if not name:
        raise TermError("atom name must be nonempty")
    return ATOMS.intern(name)


NIL = intern_atom("[]")
TRUE = intern_atom("true")
FAIL = intern_atom("fail")
DOT = intern_atom(".")


class Functor:
    """Name/arity pair.  Arity 0 is only used as a predicate key."""

    __slots__ = ("name", "arity", "id")

    def __init__(self, name: Atom, arity: int, id: int):
        self.name = name
        self.arity = arity
        self.id = id

    def __repr__(self):
        return f"{self.name.name}/{self.arity}"


_functors: dict[tuple[Atom, int], Functor] = {}


def functor(name: str | Atom, arity: int) -> Functor:
    if isinstance(name, str):
        name = intern_atom(name)
    key = (name, arity)
    f = _functors.get(key)
    if f is None:
        f = Functor(name, arity, len(_functors))
        _functors[key] = f
    return f


_var_ids = itertools.count()


class Var:
    """Logic variable.  ``ref`` is None while unbound."""

    __slots__ = ("ref", "id", "name")

    def __init__(self, name: str | None = None):
        self.ref = None
        self.id = next(_var_ids)
        self.name = name

    def __repr__(self):
        return f"_G{self.id}" if self.ref is None else f"_G{self.id}={self.ref!r}"


class Struct:
    __slots__ = ("functor", "args", "interned", "link", "hid", "hash")

    def __init__(self, functor: Functor, args, interned: bool = False):
        self.functor = functor
        self.args = args
        self.interned = interned

    def __repr__(self):
        return render(self)


class Cons:
    __slots__ = ("head", "tail", "interned", "link", "hid", "hash")

    def __init__(self, head, tail, interned: bool = False):
        self.head = head
        self.tail = tail
        self.interned = interned

    def __repr__(self):
        return render(self)


# Marker used wherever a list cell needs a functor-like identity.
class _ListMarker:
    __slots__ = ()
    arity = 2
    id = -1

    def __repr__(self):
        return "'[|]'/2"


LIST = _ListMarker()


def make_compound(f: Functor, args) -> Struct:
    if f.arity < 1:
        raise TermError(f"compound terms need arity >= 1, got {f}")
    args = tuple(args)
    if len(args) != f.arity:
        raise TermError(f"{f} given {len(args)} arguments")
    return Struct(f, args)


def make_list_cell(head, tail) -> Cons:
    return Cons(head, tail)


def make_list(items, tail=NIL):
    t = tail
    for x in reversed(items):
        t = Cons(x, t)
    return t


def deref(t):
    while type(t) is Var:
        r = t.ref
        if r is None:
            return t
        t = r
    return t


def tag_of(t) -> Tag:
    t = deref(t)
    tp = type(t)
    if tp is int:
        return Tag.INT
    if tp is Var:
        return Tag.VAR
    if tp is Atom:
        return Tag.NIL if t is NIL else Tag.ATOM
    if tp is Struct:
        return Tag.COMPOUND
    if tp is Cons:
        return Tag.LIST_CELL
    raise TermError(f"not a term: {t!r}")


def region(t) -> str:
    """``'interned'`` or ``'heap'`` for compounds and list cells."""
    t = deref(t)
    if type(t) not in (Struct, Cons):
        raise TermError("only compounds and list cells live in a region")
    return "interned" if t.interned else "heap"


def list_items(t):
    """Return (items, tail) for a possibly partial list."""
    items = []
    t = deref(t)
    while type(t) is Cons:
        items.append(t.head)
        t = deref(t.tail)
    return items, t


_plain_atom = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_symbol_atom = re.compile(r"[+\-*/\\^<>=~:.?@#&$]+\Z")


def format_atom(name: str) -> str:
    if _plain_atom.match(name) or name in ("[]", "!", ";", ","):
        return name if name != "," else "','"
    if _symbol_atom.match(name) and name != ".":
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def render(t, names: dict | None = None) -> str:
    """Canonical text form; re-readable by :mod:`internlog.reader`."""
    out: list[str] = []
    _render(t, out, names or {})
    return "".join(out)


def _render(t, out, names):
    t = deref(t)
    tp = type(t)
    if tp is int:
        out.append(str(t))
    elif tp is Atom:
        out.append(format_atom(t.name))
    elif tp is Var:
        out.append(names.get(t) or f"_G{t.id}")
    elif tp is Cons:
        out.append("[")
        _render(t.head, out, names)
        t = deref(t.tail)
        while type(t) is Cons:
            out.append(",")
            _render(t.head, out, names)
            t = deref(t.tail)
        if t is not NIL:
            out.append("|")
            _render(t, out, names)
        out.append("]")
    elif tp is Struct:
        name = format_atom(t.functor.name.name)
        out.append(name)
        out.append("(")
        for i, a in enumerate(t.args):
            if i:
                out.append(",")
            _render(a, out, names)
        out.append(")")
    else:
        raise TermError(f"not a term: {t!r}")
