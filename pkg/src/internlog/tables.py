"""Variant tries for call and answer tables.

A term tuple is linearized in pre-order into trie symbols.  Symbols are
plain objects compared with ``==``: ints by value, atoms, functors,
:data:`LIST` and interned records by identity, and :class:`VarSym` by
first-occurrence index.  In intern mode an interned record is emitted as
a single symbol; otherwise it is walked like any heap term.

Each trie node is projected at 4 words (symbol, children, payload,
link) of 8 bytes for space reporting.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .terms import LIST, Cons, Functor, Struct, Var

NODE_WORDS = 4
SMALL_NODE = 8


class UnsupportedRetrieval(Exception):
    """Unification-based lookup was requested on an intern-mode trie."""


class TableError(Exception):
    pass


class ResourceBudgetExceeded(Exception):
    pass


class VarSym:
    __slots__ = ("k",)

    def __init__(self, k: int):
        self.k = k

    def __repr__(self):
        return f"VarSym({self.k})"


_varsyms: list[VarSym] = []


def var_sym(k: int) -> VarSym:
    while len(_varsyms) <= k:
        _varsyms.append(VarSym(len(_varsyms)))
    return _varsyms[k]


def linearize(args, intern_mode: bool):
    """Pre-order symbol sequence for ``args`` plus its variables in first-occurrence order."""
    syms = []
    variables = []
    varidx = {}
    stack = list(reversed(args))
    push = stack.append
    emit = syms.append
    while stack:
        t = stack.pop()
        while type(t) is Var:
            r = t.ref
            if r is None:
                break
            t = r
        tp = type(t)
        if tp is Cons:
            if intern_mode and t.interned:
                emit(t)
            else:
                emit(LIST)
                push(t.tail)
                push(t.head)
        elif tp is Struct:
            if intern_mode and t.interned:
                emit(t)
            else:
                emit(t.functor)
                stack.extend(reversed(t.args))
        elif tp is Var:
            k = varidx.get(t)
            if k is None:
                k = varidx[t] = len(variables)
                variables.append(t)
            emit(var_sym(k))
        else:
            emit(t)
    return syms, variables


def delinearize(syms):
    """Rebuild the term tuple spelled by ``syms`` with fresh variables.

    Interned-record symbols are returned as the records themselves.
    Returns (terms, variables) with variables indexed by VarSym number.
    """
    variables: list[Var | None] = []
    stack = []
    push = stack.append
    pop = stack.pop
    for s in reversed(syms):
        tp = type(s)
        if tp is Functor:
            args = tuple([pop() for _ in range(s.arity)])
            push(Struct(s, args))
        elif s is LIST:
            h = pop()
            push(Cons(h, pop()))
        elif tp is VarSym:
            k = s.k
            while len(variables) <= k:
                variables.append(None)
            v = variables[k]
            if v is None:
                v = variables[k] = Var()
            push(v)
        else:
            push(s)
    stack.reverse()
    return stack, variables


class TrieNode:
    __slots__ = ("symbol", "children", "payload")

    def __init__(self, symbol):
        self.symbol = symbol
        # None, a single TrieNode, a short list, or a dict index
        self.children = None
        self.payload = None

    def child(self, sym):
        ch = self.children
        if ch is None:
            return None
        tc = type(ch)
        if tc is TrieNode:
            return ch if ch.symbol == sym else None
        if tc is list:
            for c in ch:
                if c.symbol == sym:
                    return c
            return None
        return ch.get(_key(sym))

    def add_child(self, node):
        ch = self.children
        if ch is None:
            self.children = node
        elif type(ch) is TrieNode:
            self.children = [ch, node]
        elif type(ch) is list:
            if len(ch) < SMALL_NODE:
                ch.append(node)
            else:
                index = {_key(c.symbol): c for c in ch}
                index[_key(node.symbol)] = node
                self.children = index
        else:
            ch[_key(node.symbol)] = node

    def iter_children(self):
        ch = self.children
        if ch is None:
            return ()
        if type(ch) is TrieNode:
            return (ch,)
        if type(ch) is list:
            return tuple(ch)
        return tuple(ch.values())


def _key(sym):
    # ints must not collide with other symbol kinds in a dict index
    return ("i", sym) if type(sym) is int else sym


class TableSpace:
    """Global node accounting shared by every trie of one engine."""

    def __init__(self, max_nodes: int | None = None):
        self.nodes = 0
        self.leaves = 0
        self.max_nodes = max_nodes

    def bytes_estimate(self) -> int:
        return self.nodes * NODE_WORDS * 8


class Trie:
    def __init__(self, intern_mode: bool = False, space: TableSpace | None = None):
        self.root = TrieNode(None)
        self.intern_mode = intern_mode
        self.space = space if space is not None else TableSpace()
        self.nodes = 0
        self.leaves = 0
        self.symbols_inserted = 0

    def insert(self, syms):
        """Return (leaf, is_new) for the path spelling ``syms``."""
        node = self.root
        created = 0
        for s in syms:
            nxt = node.child(s)
            if nxt is None:
                nxt = TrieNode(s)
                node.add_child(nxt)
                created += 1
            node = nxt
        if created:
            self.nodes += created
            space = self.space
            space.nodes += created
            if space.max_nodes is not None and space.nodes > space.max_nodes:
                raise ResourceBudgetExceeded(f"table space exceeds {space.max_nodes} nodes")
        if node.payload is None:
            node.payload = _PENDING
            self.leaves += 1
            self.space.leaves += 1
            self.symbols_inserted += len(syms)
            return node, True
        return node, False

    def lookup_variant(self, syms):
        node = self.root
        for s in syms:
            node = node.child(s)
            if node is None:
                return None
        return node if node.payload is not None else None

    def retrieve_unifiable(self, args):
        guard_unification_retrieval(self)
        raise NotImplementedError("unification-based table retrieval is not supported")


_PENDING = object()


def trie_insert(trie: Trie, syms):
    return trie.insert(syms)


def trie_lookup_variant(trie: Trie, syms):
    return trie.lookup_variant(syms)


def guard_unification_retrieval(trie: Trie):
    """Refuse unification-based retrieval on an intern-mode trie.

    Interned records sit on single trie links and carry no index on
    their inner symbols, so only variant lookups are allowed there.
    """
    if trie.intern_mode:
        raise UnsupportedRetrieval("intern-mode tables only support variant retrieval")


class Status(enum.Enum):
    NEW = "new"
    EVALUATING = "evaluating"
    COMPLETE = "complete"


@dataclass(eq=False)
class Answer:
    terms: tuple
    ground: bool


@dataclass(eq=False)
class TableEntry:
    predicate: Functor
    call_syms: list
    intern_mode: bool
    answers: Trie
    call_leaf: TrieNode | None = None
    status: Status = Status.NEW
    answer_list: list = field(default_factory=list)
    consumers: list = field(default_factory=list)
    # scheduler state
    index: int = -1
    leader: int = -1
    queue: list = field(default_factory=list)

    def __repr__(self):
        return f"<TableEntry {self.predicate} {self.status.value} answers={len(self.answer_list)}>"


class CallTable:
    """Call tries per predicate, sharing one :class:`TableSpace`."""

    def __init__(self, space: TableSpace | None = None):
        self.space = space if space is not None else TableSpace()
        self.tries: dict[Functor, Trie] = {}
        self.entries: list[TableEntry] = []

    def trie_for(self, pred: Functor, intern_mode: bool) -> Trie:
        t = self.tries.get(pred)
        if t is None:
            t = self.tries[pred] = Trie(intern_mode, self.space)
        return t

    def lookup_or_create(self, pred: Functor, args, intern_mode: bool, store=None):
        """Find or create the entry for the call ``pred(args)``.

        In intern mode ``args`` are interned first (when a store is
        given).  Returns (entry, is_new, call_variables).
        """
        if intern_mode and store is not None:
            args = [store.intern_term(a) for a in args]
        syms, variables = linearize(args, intern_mode)
        trie = self.trie_for(pred, intern_mode)
        leaf, is_new = trie.insert(syms)
        if is_new:
            entry = TableEntry(pred, syms, intern_mode, Trie(intern_mode, self.space), leaf)
            leaf.payload = entry
            self.entries.append(entry)
        else:
            entry = leaf.payload
        return entry, is_new, variables

    def forget(self, entry: TableEntry):
        """Drop an abandoned (never completed) entry."""
        trie = self.tries[entry.predicate]
        if entry.call_leaf is not None and entry.call_leaf.payload is entry:
            entry.call_leaf.payload = None
            trie.leaves -= 1
            self.space.leaves -= 1
        self.entries.remove(entry)

    def stats(self) -> dict:
        return {
            "nodes": self.space.nodes,
            "leaves": self.space.leaves,
            "bytes_estimate": self.space.bytes_estimate(),
            "call_entries": len(self.entries),
        }


def add_answer(entry: TableEntry, ans_args, store=None) -> bool:
    """Insert an answer tuple; returns True iff it was not already present."""
    if entry.status is Status.COMPLETE:
        raise TableError(f"cannot add answers to complete table {entry}")
    if entry.intern_mode and store is not None:
        ans_args = [store.intern_term(a) for a in ans_args]
    syms, variables = linearize(ans_args, entry.intern_mode)
    leaf, is_new = entry.answers.insert(syms)
    if is_new:
        terms, _ = delinearize(syms)
        ans = Answer(tuple(terms), not variables)
        leaf.payload = ans
        entry.answer_list.append(ans)
    return is_new


def answer_iterate(entry: TableEntry):
    for ans in entry.answer_list:
        yield ans.terms


def table_space_stats(*tables: CallTable) -> dict:
    nodes = sum(t.space.nodes for t in tables)
    leaves = sum(t.space.leaves for t in tables)
    return {"nodes": nodes, "leaves": leaves, "bytes_estimate": nodes * NODE_WORDS * 8}


__all__ = [
    "Answer",
    "CallTable",
    "ResourceBudgetExceeded",
    "Status",
    "TableEntry",
    "TableError",
    "TableSpace",
    "Trie",
    "TrieNode",
    "UnsupportedRetrieval",
    "VarSym",
    "add_answer",
    "answer_iterate",
    "delinearize",
    "guard_unification_retrieval",
    "linearize",
    "table_space_stats",
    "trie_insert",
    "trie_lookup_variant",
    "var_sym",
]
