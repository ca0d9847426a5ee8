import random
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from internlog.intern import (
    DEFAULT_BUCKETS,
    DEFAULT_LIST_BUCKETS,
    InternStore,
    TraversalCounters,
    canonical_hash,
    copy_term,
    is_ground,
    is_interned,
)
from internlog.terms import LIST, NIL, Cons, Struct, TermError, Var, functor, intern_atom, make_list

from oracles import (
    V,
    deep_copy_heap,
    distinct_compound_subterms,
    from_py,
    is_variant,
    random_ground,
    structural_equal,
    to_py,
)

a, b, c = intern_atom("a"), intern_atom("b"), intern_atom("c")
F2 = functor("f", 2)
G1 = functor("g", 1)


def test_hash_is_deterministic():
    s = InternStore()
    h_ga = s.intern_term(from_py(("g", "a")))
    assert canonical_hash(F2, [1, h_ga]) == canonical_hash(F2, [1, h_ga])


def test_hash_argument_order_matters():
    rng = random.Random(7)
    collisions = 0
    trials = 100_000
    for _ in range(trials):
        x, y = rng.sample(range(1 << 30), 2)
        if canonical_hash(F2, [x, y]) == canonical_hash(F2, [y, x]):
            collisions += 1
    assert collisions / trials < 1e-3


def test_hash_functor_participates():
    rng = random.Random(8)
    collisions = 0
    trials = 100_000
    for i in range(trials):
        fa = functor(f"g{rng.randrange(50)}", 1)
        fb = functor(f"h{rng.randrange(50)}", 1)
        slot = rng.randrange(1 << 20)
        if canonical_hash(fa, [slot]) == canonical_hash(fb, [slot]):
            collisions += 1
    assert collisions / trials < 1e-3
    assert canonical_hash(functor("g", 1), [a]) != canonical_hash(functor("h", 1), [a])


def test_lookup_or_insert_canonical():
    s = InternStore()
    h_ga = s.lookup_or_insert(G1, [a])
    r1 = s.lookup_or_insert(F2, [1, h_ga])
    before = s.stats().records
    r2 = s.lookup_or_insert(F2, [1, h_ga])
    assert r1 is r2
    assert s.stats().records == before


def test_lookup_or_insert_rejects_noncanonical_slots():
    s = InternStore()
    with pytest.raises(TermError):
        s.lookup_or_insert(F2, [Var(), 1])
    with pytest.raises(TermError):
        s.lookup_or_insert(F2, [Struct(G1, (a,)), 1])


def test_collisions_in_one_bucket():
    s = InternStore(buckets=1 << 12)
    table = s._table(1)
    seen: dict = {}
    pair = None
    for i in range(100_000):
        rec = s.lookup_or_insert(G1, [i])
        idx = rec.hash & table.mask
        if idx in seen:
            pair = (seen[idx], i)
            break
        seen[idx] = i
    assert pair is not None
    r0 = s.lookup_or_insert(G1, [pair[0]])
    r1 = s.lookup_or_insert(G1, [pair[1]])
    assert r0 is not r1
    chain = list(s.tables[1].chain(r0.hash))
    assert r0 in chain and r1 in chain


def test_list_table_is_separate():
    s = InternStore()
    cell = s.lookup_or_insert(LIST, [1, NIL])
    comp = s.lookup_or_insert(functor("cons", 2), [1, NIL])
    assert cell is not comp
    assert type(cell) is Cons and type(comp) is Struct


def test_resize_doubles_at_load_one():
    s = InternStore(buckets=8, list_buckets=8)
    made = [s.lookup_or_insert(G1, [i]) for i in range(100)]
    table = s.tables[1]
    assert len(table.buckets) >= table.count
    assert len(table.buckets) == 128
    for i, r in enumerate(made):
        assert s.lookup_or_insert(G1, [i]) is r


def test_default_sizes():
    s = InternStore()
    assert len(s.list_table.buckets) == DEFAULT_LIST_BUCKETS == 65536
    assert len(s._table(3).buckets) == DEFAULT_BUCKETS == 4096


def test_intern_nested_term_and_repeat():
    s = InternStore()
    h = s.intern_term(from_py(("f", 1, ("g", "a"))))
    assert h.interned
    assert s.intern_term(from_py(("f", 1, ("g", "a")))) is h
    assert s.intern_term(h) is h
    assert s.stats().records == 2


def test_intern_keeps_variables():
    s = InternStore()
    x = Var("X")
    t = Struct(F2, (a, x))
    r = s.intern_term(t)
    assert type(r) is Struct and not r.interned
    assert r.args[0] is a and r.args[1] is x


def test_intern_partial_list():
    s = InternStore()
    x = Var("X")
    r = s.intern_term(make_list([1, 2], x))
    assert type(r) is Cons and not r.interned
    assert not r.tail.interned
    assert r.tail.tail is x
    assert s.stats().records == 0


def test_intern_maximal_ground_subterms():
    s = InternStore()
    x = Var()
    r = s.intern_term(from_py(("f", ("g", "a"), V(0)), {V(0): x}))
    assert not r.interned
    assert r.args[0].interned
    assert r.args[0] is s.intern_term(from_py(("g", "a")))
    assert r.args[1] is x


def test_intern_ground_list_counts():
    s = InternStore()
    lst = make_list(list(range(10_000)))
    assert distinct_compound_subterms([lst]) == 10_000
    h = s.intern_term(lst)
    assert s.stats().records == 10_000
    h2 = s.intern_term(make_list(list(range(10_000))))
    assert h2 is h
    assert s.stats().records == 10_000


def test_intern_is_iterative_on_deep_terms():
    s = InternStore()
    t = 0
    for _ in range(200_000):
        t = Struct(G1, (t,))
    h = s.intern_term(t)
    assert h.interned and s.stats().records == 200_000


def test_intern_bound_variables_are_followed():
    s = InternStore()
    x = Var()
    x.ref = from_py(("g", "a"))
    r = s.intern_term(Struct(F2, (1, x)))
    assert r.interned
    assert r is s.intern_term(from_py(("f", 1, ("g", "a"))))


def test_intern_shared_subterm_dag():
    s = InternStore()
    shared = from_py(("g", "a"))
    t = Struct(F2, (shared, shared))
    h = s.intern_term(t)
    assert h.args[0] is h.args[1]
    assert s.stats().records == 2


def test_is_interned():
    s = InternStore()
    assert is_interned(s.intern_term(make_list([1, 2, 3])))
    assert not is_interned(from_py(("f", "a")))
    assert not is_interned(Var())
    assert is_interned(3) and is_interned(a) and is_interned(NIL)


def test_is_ground_counts():
    cnt = TraversalCounters()
    assert not is_ground(Var(), cnt)
    assert cnt.visits == 1
    assert not is_ground(from_py(("f", "a", ("[|]", 1, V(0)))))
    assert is_ground(from_py(("f", "a", ("[|]", 1, "[]"))))


def test_is_ground_short_circuits_interned():
    s = InternStore()
    h = s.intern_term(make_list(list(range(50_000))))
    cnt = TraversalCounters()
    assert is_ground(h, cnt)
    assert cnt.visits == 1


def test_copy_term_shares_variables():
    x = Var()
    t = Struct(F2, (x, x))
    r = copy_term(t)
    assert r.args[0] is r.args[1]
    assert r.args[0] is not x


def test_copy_term_reuses_interned():
    s = InternStore()
    h = s.intern_term(from_py(("f", 1, ("g", "a"))))
    cnt = TraversalCounters()
    assert copy_term(h, counters=cnt) is h
    assert cnt.allocations == 0 and cnt.visits == 1


def test_copy_term_mixed():
    s = InternStore()
    h = s.intern_term(make_list([1, 2, 3]))
    x = Var()
    t = Struct(F2, (x, h))
    cnt = TraversalCounters()
    r = copy_term(t, counters=cnt)
    assert r.args[1] is h
    assert r.args[0] is not x and type(r.args[0]) is Var
    # the new f/2 node and one fresh variable
    assert cnt.allocations == 2
    assert is_variant(to_py(r), to_py(deep_copy_heap(t)))


def test_stats_empty_and_bytes_formula():
    s = InternStore()
    st0 = s.stats()
    assert st0.records == 0 and st0.cells_used == 0
    s.intern_term(from_py(("f", 1, ("g", "a"))))
    s.intern_term(make_list([1, 2]))
    st1 = s.stats()
    # f/2 record 4 words, g/1 record 3 words, two list records 3 words each
    assert st1.cells_used == 4 + 3 + 3 + 3
    assert st1.bytes_estimate == (st1.cells_used + s.bucket_count()) * 8
    assert st1.bytes_estimate == (13 + 65536 + 4096 + 4096) * 8


def test_records_monotone():
    s = InternStore()
    rng = random.Random(3)
    last = 0
    for _ in range(200):
        s.intern_term(from_py(random_ground(rng, 4)))
        now = s.stats().records
        assert now >= last
        last = now


def test_records_never_mutated():
    s = InternStore()
    h = s.intern_term(from_py(("f", 1, ("g", "a"))))
    snapshot = (h.functor, h.args)
    rng = random.Random(4)
    for _ in range(500):
        s.intern_term(from_py(random_ground(rng, 4)))
    assert (h.functor, h.args) == snapshot


ground_py = st.recursive(
    st.one_of(st.integers(0, 3), st.sampled_from(["a", "b", "[]"])),
    lambda kids: st.one_of(
        st.tuples(st.just("f"), kids, kids),
        st.tuples(st.just("g"), kids),
        st.tuples(st.just("[|]"), kids, kids),
    ),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(ground_py, ground_py)
def test_canonicity_property(p, q):
    s = InternStore()
    hp = s.intern_term(from_py(p))
    hq = s.intern_term(from_py(q))
    assert (hp is hq) == structural_equal(from_py(p), from_py(q))


@settings(max_examples=300, deadline=None)
@given(ground_py)
def test_idempotence_and_logical_identity(p):
    s = InternStore()
    t = from_py(p)
    h = s.intern_term(t)
    assert s.intern_term(h) is h
    assert structural_equal(t, h)


@settings(max_examples=300, deadline=None)
@given(ground_py)
def test_sharing_count_matches_oracle(p):
    s = InternStore()
    t = from_py(p)
    s.intern_term(t)
    assert s.stats().records == distinct_compound_subterms([t])


mixed_py = st.recursive(
    st.one_of(st.integers(0, 3), st.sampled_from(["a", "[]"]), st.builds(V, st.integers(0, 2))),
    lambda kids: st.one_of(st.tuples(st.just("f"), kids, kids), st.tuples(st.just("[|]"), kids, kids)),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(mixed_py)
def test_nonground_intern_keeps_same_variables(p):
    s = InternStore()
    varmap: dict = {}
    t = from_py(p, varmap)
    r = s.intern_term(t)
    assert structural_equal(t, r)
    assert s.intern_term(r) is r or structural_equal(s.intern_term(r), r)


def test_intern_time_grows_linearly():
    def timed(n):
        lst = make_list(list(range(n)))
        s = InternStore()
        t0 = time.process_time()
        s.intern_term(lst)
        return time.process_time() - t0

    small = min(timed(100_000) for _ in range(2))
    large = timed(1_000_000)
    assert large / small < 15
