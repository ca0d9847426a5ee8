"""
Interning ground terms
======================

Build a couple of terms, intern them, and look at what the store keeps.
"""

from internlog import InternStore, copy_term, is_ground, parse_term, render
from internlog.intern import TraversalCounters

store = InternStore()

# two separately parsed copies of the same ground term
t1 = parse_term("f(1, g(a), [1,2,3])")
t2 = parse_term("f(1, g(a), [1,2,3])")
print(t1 is t2)  # False: two heap copies

h1 = store.intern_term(t1)
h2 = store.intern_term(t2)
print(h1 is h2)  # True: one canonical record
print(render(h1), store.stats())

# terms with variables keep their variables; ground parts are still shared
mixed = store.intern_term(parse_term("f(X, g(a))"))
print(mixed.interned, mixed.args[1] is h1.args[1])

# ground/1 and copy_term/2 stop at the first interned record
cnt = TraversalCounters()
print(is_ground(h1, cnt), copy_term(h1, counters=cnt) is h1, cnt)
