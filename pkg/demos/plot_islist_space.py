"""
Call-table space for islist/1
=============================

Without interning every suffix of the input list is copied into the call
table, so the symbol count is (n+1)^2. With interning each suffix is one
symbol and the count is linear.
"""

from internlog.bench import bench

print(f"{'n':>5} {'plain symbols':>14} {'(n+1)^2':>10} {'intern entries':>15} {'records':>8}")
for n in (50, 100, 200, 400):
    plain = bench("islist", n, "plain")
    interned = bench("islist", n, "intern")
    print(
        f"{n:>5} {plain.detail['symbols_inserted']:>14} {(n + 1) ** 2:>10}"
        f" {interned.detail['call_entries']:>15} {interned.intern_records:>8}"
    )
