"""Fill the gaps of a grid quasitiling on Z_60 x Z_60.

Nine 19x19 boxes at spacing 20 leave a one-cell grid of uncovered points.
Each uncovered point is glued to a tile through a target set of 79 points
per box, and the new tiles stay almost as invariant as the old ones.
"""

from fractions import Fraction

from comparison_chains import (FinSet, GroupCtx, Quasitiling, Window, box, check_property, interval_targets,
                               tiling_from_quasitiling)

ctx = GroupCtx.torus(60, 60)
w = Window.torus(ctx)
centers = FinSet(ctx, [(20 * i, 20 * j) for i in range(3) for j in range(3)])
Tq = Quasitiling([box(ctx, (0, 0), (18, 18))], [centers], w)
K = FinSet(ctx, [(0, 0), (1, 0), (0, 1)])
eps = Fraction(3, 2)

delta = 1 - Fraction(len(Tq.union()), len(w.domain))
targets = interval_targets(Tq, K, eps, delta)
res = tiling_from_quasitiling(Tq, targets, w, K=K, eps=eps)

print("uncovered density:", delta)
print("i_S:", targets.counts)
print("largest added set:", res.stats["max_added"])
print("output shapes:", res.stats["output_shapes"])
print("is a tiling:", check_property(res.tiling, "tiling", w).passed)
print("hypotheses met:", res.stats["hypotheses_met"], " violations:", res.stats["invariance_violations"])
