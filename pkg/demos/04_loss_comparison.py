"""How close each method gets to the optimum.

Fixed preference shapes over N options, then random profiles above unit
popularity scored by MAAPE against the optimal loss.  The same tables come
from ``cfjs sweep`` as CSV (with ``--svg DIR`` for line charts).

    python3 demos/04_loss_comparison.py
"""

from cfjs.experiments import CASES, Method, compare_losses, phom_random_study

SHAPES = {
    "i": "1:2:...:N",
    "ii": "1:1:2:4:...",
    "iii": "(ii) against its reverse",
    "iv": "1:3:9:...",
}

records = compare_losses([5, 10, 20])
by = {(r.n, r.case_id, r.method): r.loss for r in records}
for case in CASES:
    print(f"\ncase {case}: {SHAPES[case]}")
    print("   N  " + "".join(f"{str(m):>16}" for m in Method))
    for n in (5, 10, 20):
        print(f"  {n:2d}  " + "".join(f"{by[(n, case, m)]:16.3e}" for m in Method))

# Pure HOM wins everywhere except (iii): its joint matrix is always symmetric,
# so it cannot follow opposed preferences and uniform guessing does better.

print("\nrandom profiles with S_max > 1, MAAPE against the optimum (50 per N)")
study = phom_random_study([3, 5, 10], "gt1", profiles_per_n=50, seed=0)
print("   N  " + "".join(f"{str(r.method):>16}" for r in study[:3]) + "   HOM usage")
for n in (3, 5, 10):
    rows = [r for r in study if r.n == n]
    usage = next(r.usage for r in rows if r.method is Method.PURE_HOM)
    print(f"  {n:2d}  " + "".join(f"{r.maape:16.3e}" for r in rows) + f"   {usage:.1e}")
