"""Hash-consed store of ground records.

Records of arity n live in a per-arity hash table; list cells have a
table of their own.  Each record carries the link to the next record in
its bucket chain, its cached hash and a handle id (``hid``) that gives
it a canonical word for hashing the records above it.

Space accounting is a fixed projection, not a measurement:
a compound record of arity n costs ``n + 2`` words (link, functor,
slots), a list record costs 3 words (link, head, tail), every bucket
costs one word, and a word is 8 bytes.
"""
from __future__ import annotations

from dataclasses import dataclass

from .terms import LIST, Atom, Cons, Functor, Struct, TermError, Var, deref

MASK = (1 << 64) - 1
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
LIST_WORD = 0x9E3779B97F4A7C15

DEFAULT_BUCKETS = 4096
DEFAULT_LIST_BUCKETS = 65536
WORD_BYTES = 8


def slot_word(s) -> int:
    tp = type(s)
    if tp is int:
        return (s << 2) & MASK
    if tp is Atom:
        return (s.id << 2) | 1
    if (tp is Struct or tp is Cons) and s.interned:
        return (s.hid << 2) | 2
    raise TermError(f"not a canonical slot: {s!r}")


def _mix(h: int) -> int:
    h ^= h >> 30
    h = (h * 0xBF58476D1CE4E5B9) & MASK
    h ^= h >> 27
    h = (h * 0x94D049BB133111EB) & MASK
    return h ^ (h >> 31)


def canonical_hash(f, slots) -> int:
    """FNV-1a fold over the functor word and each slot word, then mixed."""
    h = FNV_OFFSET
    w = LIST_WORD if f is LIST else (f.id << 2) | 3
    h = ((h ^ w) * FNV_PRIME) & MASK
    for s in slots:
        h = ((h ^ slot_word(s)) * FNV_PRIME) & MASK
    return _mix(h)


def _cons_hash(head, tail) -> int:
    # canonical_hash(LIST, (head, tail)) unrolled for the hot path
    h = ((FNV_OFFSET ^ LIST_WORD) * FNV_PRIME) & MASK
    tp = type(head)
    if tp is int:
        w = (head << 2) & MASK
    elif tp is Atom:
        w = (head.id << 2) | 1
    else:
        w = (head.hid << 2) | 2
    h = ((h ^ w) * FNV_PRIME) & MASK
    tp = type(tail)
    if tp is int:
        w = (tail << 2) & MASK
    elif tp is Atom:
        w = (tail.id << 2) | 1
    else:
        w = (tail.hid << 2) | 2
    h = ((h ^ w) * FNV_PRIME) & MASK
    h ^= h >> 30
    h = (h * 0xBF58476D1CE4E5B9) & MASK
    h ^= h >> 27
    h = (h * 0x94D049BB133111EB) & MASK
    return h ^ (h >> 31)


class HashTable:
    """Bucket-chained table of records of one arity; doubles at load 1.0."""

    def __init__(self, arity: int, size: int):
        self.arity = arity
        self.buckets: list = [None] * size
        self.mask = size - 1
        self.count = 0
        self.resizes = 0

    def _grow(self):
        size = len(self.buckets) * 2
        buckets = [None] * size
        mask = size - 1
        for rec in self.buckets:
            while rec is not None:
                nxt = rec.link
                i = rec.hash & mask
                rec.link = buckets[i]
                buckets[i] = rec
                rec = nxt
        self.buckets = buckets
        self.mask = mask
        self.resizes += 1

    def chain(self, h: int):
        rec = self.buckets[h & self.mask]
        while rec is not None:
            yield rec
            rec = rec.link


@dataclass
class InternStats:
    records: int
    cells_used: int
    bytes_estimate: int
    probes: int


@dataclass
class TraversalCounters:
    """Instrumentation for the short-circuiting traversals."""

    visits: int = 0
    allocations: int = 0

    def reset(self):
        self.visits = 0
        self.allocations = 0


def is_interned(t) -> bool:
    t = deref(t)
    tp = type(t)
    if tp is Struct or tp is Cons:
        return t.interned
    return tp is int or tp is Atom


def _is_canonical(s) -> bool:
    tp = type(s)
    return tp is int or tp is Atom or ((tp is Struct or tp is Cons) and s.interned)


class InternStore:
    def __init__(self, buckets: int = DEFAULT_BUCKETS, list_buckets: int = DEFAULT_LIST_BUCKETS):
        self._initial = buckets
        self.tables: list[HashTable | None] = []
        self.list_table = HashTable(2, list_buckets)
        self.records = 0
        self.cells_used = 0
        self.probes = 0
        self._next_hid = 0

    def _table(self, arity: int) -> HashTable:
        tables = self.tables
        if arity >= len(tables):
            tables.extend([None] * (arity + 1 - len(tables)))
        t = tables[arity]
        if t is None:
            t = tables[arity] = HashTable(arity, self._initial)
        return t

    def lookup_or_insert(self, f, slots):
        """Return the canonical record for ``f`` applied to ``slots``."""
        slots = tuple(deref(s) for s in slots)
        for s in slots:
            if not _is_canonical(s):
                raise TermError(f"not a canonical slot: {s!r}")
        if f is LIST:
            if len(slots) != 2:
                raise TermError("list records have exactly two slots")
            return self._cons(slots[0], slots[1])
        if not isinstance(f, Functor) or f.arity != len(slots) or f.arity < 1:
            raise TermError(f"bad functor {f!r} for {len(slots)} slots")
        return self._struct(f, slots)

    def _cons(self, head, tail) -> Cons:
        h = _cons_hash(head, tail)
        table = self.list_table
        i = h & table.mask
        rec = table.buckets[i]
        probes = 0
        while rec is not None:
            probes += 1
            if rec.hash == h and rec.head == head and rec.tail == tail:
                self.probes += probes
                return rec
            rec = rec.link
        self.probes += probes
        rec = Cons(head, tail, True)
        rec.hash = h
        rec.hid = self._next_hid
        self._next_hid += 1
        rec.link = table.buckets[i]
        table.buckets[i] = rec
        table.count += 1
        self.records += 1
        self.cells_used += 3
        if table.count > len(table.buckets):
            table._grow()
        return rec

    def _struct(self, f: Functor, slots: tuple) -> Struct:
        h = canonical_hash(f, slots)
        table = self._table(f.arity)
        i = h & table.mask
        rec = table.buckets[i]
        probes = 0
        while rec is not None:
            probes += 1
            if rec.hash == h and rec.functor is f and rec.args == slots:
                self.probes += probes
                return rec
            rec = rec.link
        self.probes += probes
        rec = Struct(f, slots, True)
        rec.hash = h
        rec.hid = self._next_hid
        self._next_hid += 1
        rec.link = table.buckets[i]
        table.buckets[i] = rec
        table.count += 1
        self.records += 1
        self.cells_used += f.arity + 2
        if table.count > len(table.buckets):
            table._grow()
        return rec

    def intern_term(self, t):
        """Copy ``t`` with every ground subterm replaced by its record.

        Variables are kept as they are, so the copy shares them with ``t``.
        Interned subterms are reused without being traversed.
        """
        t = deref(t)
        tp = type(t)
        if (tp is not Struct and tp is not Cons) or t.interned:
            return t
        if tp is Cons:
            r = self._intern_flat_list(t)
            if r is not None:
                return r
        # pre-order collection; reversing it visits children before parents
        order = []
        seen = set()
        stack = [t]
        while stack:
            n = stack.pop()
            order.append(n)
            if type(n) is Cons:
                kids = (n.head, n.tail)
            else:
                kids = n.args
            for a in kids:
                a = deref(a)
                ta = type(a)
                if (ta is Cons or ta is Struct) and not a.interned and id(a) not in seen:
                    seen.add(id(a))
                    stack.append(a)
        memo = {}
        cons = self._cons
        for n in reversed(order):
            key = id(n)
            if key in memo:
                continue
            if type(n) is Cons:
                h = deref(n.head)
                th = type(h)
                if (th is Cons or th is Struct) and not h.interned:
                    h = memo[id(h)]
                    th = type(h)
                tl = deref(n.tail)
                tt = type(tl)
                if (tt is Cons or tt is Struct) and not tl.interned:
                    tl = memo[id(tl)]
                    tt = type(tl)
                if (th is int or th is Atom or (th is not Var and h.interned)) and (
                    tt is int or tt is Atom or (tt is not Var and tl.interned)
                ):
                    memo[key] = cons(h, tl)
                else:
                    memo[key] = Cons(h, tl)
            else:
                args = []
                ground = True
                for a in n.args:
                    a = deref(a)
                    ta = type(a)
                    if ta is Var:
                        ground = False
                    elif ta is Cons or ta is Struct:
                        if not a.interned:
                            a = memo[id(a)]
                            if not a.interned:
                                ground = False
                    args.append(a)
                if ground:
                    memo[key] = self._struct(n.functor, tuple(args))
                else:
                    memo[key] = Struct(n.functor, tuple(args))
        return memo[id(t)]

    def _intern_flat_list(self, t):
        # fast path for a list whose elements are already canonical;
        # returns None to fall back to the general walk
        heads = []
        x = t
        while True:
            tp = type(x)
            if tp is Var:
                if x.ref is None:
                    break
                x = x.ref
                continue
            if tp is not Cons or x.interned:
                break
            h = deref(x.head)
            th = type(h)
            if not (th is int or th is Atom or ((th is Cons or th is Struct) and h.interned)):
                return None
            heads.append(h)
            x = x.tail
        tp = type(x)
        if tp is Struct and not x.interned:
            return None
        out = x
        if tp is Var:
            for h in reversed(heads):
                out = Cons(h, out)
            return out
        cons = self._cons
        for h in reversed(heads):
            out = cons(h, out)
        return out

    def bucket_count(self) -> int:
        n = len(self.list_table.buckets)
        for t in self.tables:
            if t is not None:
                n += len(t.buckets)
        return n

    def stats(self) -> InternStats:
        return InternStats(
            records=self.records,
            cells_used=self.cells_used,
            bytes_estimate=(self.cells_used + self.bucket_count()) * WORD_BYTES,
            probes=self.probes,
        )


def is_ground(t, counters: TraversalCounters | None = None) -> bool:
    """True iff ``t`` has no unbound variables; stops at interned records."""
    visits = 0
    stack = [t]
    ground = True
    while stack:
        x = deref(stack.pop())
        visits += 1
        tp = type(x)
        if tp is Var:
            ground = False
            break
        if tp is Cons:
            if not x.interned:
                stack.append(x.tail)
                stack.append(x.head)
        elif tp is Struct:
            if not x.interned:
                stack.extend(reversed(x.args))
    if counters is not None:
        counters.visits += visits
    return ground


def copy_term(t, varmap: dict | None = None, counters: TraversalCounters | None = None):
    """Copy ``t`` with fresh variables; interned records are shared, not copied.

    ``varmap`` maps original variables to their copies and may be passed
    in to copy several terms with consistent renaming.
    """
    if varmap is None:
        varmap = {}
    t = deref(t)
    tp = type(t)
    if counters is not None:
        counters.visits += 1
    if tp is Var:
        v = varmap.get(t)
        if v is None:
            v = varmap[t] = Var()
            if counters is not None:
                counters.allocations += 1
        return v
    if (tp is not Struct and tp is not Cons) or t.interned:
        return t
    order = []
    seen = set()
    stack = [t]
    visits = 0
    while stack:
        n = stack.pop()
        order.append(n)
        kids = (n.head, n.tail) if type(n) is Cons else n.args
        visits += len(kids)
        for a in kids:
            a = deref(a)
            ta = type(a)
            if (ta is Cons or ta is Struct) and not a.interned and id(a) not in seen:
                seen.add(id(a))
                stack.append(a)
    memo = {}
    allocs = 0
    for n in reversed(order):
        key = id(n)
        if key in memo:
            continue
        if type(n) is Cons:
            kids = (n.head, n.tail)
        else:
            kids = n.args
        out = []
        for a in kids:
            a = deref(a)
            ta = type(a)
            if ta is Var:
                v = varmap.get(a)
                if v is None:
                    v = varmap[a] = Var()
                    allocs += 1
                a = v
            elif (ta is Cons or ta is Struct) and not a.interned:
                a = memo[id(a)]
            out.append(a)
        if type(n) is Cons:
            memo[key] = Cons(out[0], out[1])
        else:
            memo[key] = Struct(n.functor, tuple(out))
        allocs += 1
    if counters is not None:
        counters.allocations += allocs
        counters.visits += visits
    return memo[id(t)]
