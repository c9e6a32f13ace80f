"""Watch a correction round repair a stuck greedy injection on Z_12.

The greedy pass walks the multipliers in the given order and leaves one
A-point without a partner.  One minimal chain of length 4 shifts two
assignments along and frees a B-point for it.
"""

from fractions import Fraction

from comparison_chains import (FinSet, GroupCtx, Window, build_injection, build_tiling, greedy_initial,
                               verify_key_hypothesis)

ctx = GroupCtx.torus(12)
w = Window.torus(ctx)
A = FinSet(ctx, [(3,), (6,), (8,)])
B = FinSet(ctx, [(0,), (1,), (4,), (5,), (10,), (11,)])
T = build_tiling(ctx, {"type": "zd_boxes", "sides": [4]}, w)
order = [(0,), (1,), (9,), (11,), (10,), (3,), (2,)]
eps = Fraction(1, 5)

print("hypothesis:", verify_key_hypothesis(A, B, T, eps).passed)

greedy = greedy_initial(A, B, order, w)
print("greedy images:", {a: greedy(a) for a in greedy.assignment})
print("unmatched after greedy:", greedy.unmatched())

res = build_injection(A, B, T, eps, w, order=order)
for k, rnd in enumerate(res.rounds, 1):
    for C in rnd:
        print(f"round {k}: chain {C.points}")
print("final images:", {a: res.injection(a) for a in A})
print("total:", res.injection.is_total(), " N =", res.stats["N"], " rounds =", res.stats["rounds"])
