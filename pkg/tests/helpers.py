"""Small constructors shared by the test modules."""

import random

from comparison_chains import FinSet, GroupCtx, Window


def pts(ctx, *xs):
    """FinSet from integers (1-d) or tuples."""
    return FinSet(ctx, [x if isinstance(x, tuple) else (x,) for x in xs])


def z(n):
    ctx = GroupCtx.torus(n)
    return ctx, Window.torus(ctx)


def random_disjoint(ctx, w, pa, pb, rng):
    A, B = [], []
    for x in w.domain:
        r = rng.random()
        if r < pa:
            A.append(x)
        elif r < pa + pb:
            B.append(x)
    return FinSet(ctx, A), FinSet(ctx, B)


def tight_torus_instance(n, side, rng, slack=2):
    """A/B on Z_n with |B| = |A| + slack in every tile of the side-`side` box tiling."""
    ctx = GroupCtx.torus(n)
    A, B = [], []
    for c in range(0, n, side):
        cells = list(range(c, c + side))
        rng.shuffle(cells)
        na = rng.randint(0, (side - slack) // 2)
        A += cells[:na]
        B += cells[na:na + na + slack]
    return ctx, FinSet(ctx, [(x,) for x in A]), FinSet(ctx, [(x,) for x in B])
