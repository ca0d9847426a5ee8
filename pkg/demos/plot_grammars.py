"""
Tabled grammars over interned input
===================================

Even-length palindromes and a left-recursive grammar, run with and without
interning. Trie node counts grow linearly with interning.
"""

from internlog.bench import bench, emit_csv

rows = []
for n in (200, 400, 800, 1600):
    rows.append(bench("epal", n, "intern"))
    rows.append(bench("lr", n, "intern"))
rows.append(bench("epal", 400, "plain"))
# a small budget turns an oversized run into an xx row instead of an error
rows.append(bench("epal", 1600, "plain", max_table_nodes=100_000))

print(emit_csv(rows))
