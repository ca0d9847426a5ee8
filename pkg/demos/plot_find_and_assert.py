"""
Binary search over an interned list, and shared asserted facts
==============================================================

``find/3`` halves an interned sorted list through a tabled split, so each
probe touches a logarithmic number of table entries. Asserting facts that
share ground arguments stores one interned copy per distinct argument.
"""

from internlog import Engine
from internlog.bench import bench
from internlog.terms import Struct, functor, make_list

row = bench("find", 100_000, "intern", probes=100)
print("find:", row.result, row.detail, f"{row.cpu_ms:.0f} ms")

p2 = functor("p", 2)
shared = [Struct(functor("f", 2), (j, make_list([j, j + 1]))) for j in range(100)]
for decl in (":- dynamic p/2 as intern.\n", ":- dynamic p/2.\n"):
    engine = Engine(decl)
    for i in range(10_000):
        engine.assertz(Struct(p2, (i, shared[i % 100])))
    st = engine.store.stats()
    print(decl.strip(), "records:", st.records, "record words:", st.cells_used, "heap words:", engine.dynamic.heap_cells())
