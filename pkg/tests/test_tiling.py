import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from comparison_chains import (FinSet, GroupCtx, PreconditionError, Quasitiling, Window, ball, box, build_tiling,
                               check_property, interval, saturation, shape_union_E)
from comparison_chains.tiling import heisenberg_factor, heisenberg_subgroup_member, retention_quota
from helpers import pts, z


def test_z12_grid_tiling():
    ctx = GroupCtx.torus(12, 12)
    w = Window.torus(ctx)
    T = build_tiling(ctx, {"type": "zd_boxes", "sides": [4, 4]}, w)
    rep = check_property(T, "tiling", w)
    assert rep.passed and len(T) == 9
    assert rep.witnesses["uncovered"] == [] and rep.witnesses["doubly_covered"] == []


def test_z30_tiling():
    ctx, w = z(30)
    T = build_tiling(ctx, {"type": "zd_boxes", "sides": [10]}, w)
    assert T.shapes[0] == interval(ctx, 0, 9)
    assert T.centers[0] == pts(ctx, 0, 10, 20)


def test_divisibility_required():
    ctx, w = z(30)
    with pytest.raises(PreconditionError):
        build_tiling(ctx, {"type": "zd_boxes", "sides": [7]}, w)


def test_overlap_disjoint_and_eps_disjoint():
    ctx, w = z(20)
    T = Quasitiling([interval(ctx, 0, 8)], [pts(ctx, 0, 8)], w)
    rep = check_property(T, "disjoint", w)
    assert not rep.passed and rep.witnesses["overlap"] == [(8,)]
    rep = check_property(T, "eps_disjoint", w, eps=Fraction(1, 5))
    assert rep.passed
    cores = [c for _, c in rep.witnesses["cores"]]
    assert all(len(c) > Fraction(4, 5) * 9 for c in cores)
    assert cores[0].isdisjoint(cores[1])


def brute_eps_disjoint(T, eps):
    shared = [p for p, ks in T.cover_index.items() if len(ks) > 1]
    choices = [T.cover_index[p] + [None] for p in shared]
    for pick in itertools.product(*choices):
        owner = dict(zip(shared, pick))
        ok = True
        for k, (_, S) in enumerate(T.tiles):
            kept = sum(1 for p in S if len(T.cover_index[p]) == 1 or owner[p] == k)
            if not kept > (1 - eps) * len(S):
                ok = False
                break
        if ok:
            return True
    return False


def test_eps_disjoint_matches_brute_force():
    rng = random.Random(4)
    ctx, w = z(16)
    checked = 0
    while checked < 60:
        sizes = [rng.randint(2, 5) for _ in range(2)]
        shapes = [interval(ctx, 0, s - 1) for s in sizes]
        cs = rng.sample(range(16), 4)
        centers = [pts(ctx, *cs[:2]), pts(ctx, *cs[2:])]
        try:
            T = Quasitiling(shapes, centers, w)
        except PreconditionError:
            continue
        if sum(len(ks) > 1 for ks in T.cover_index.values()) > 8:
            continue
        eps = Fraction(rng.randint(1, 6), 7)
        rep = check_property(T, "eps_disjoint", w, eps=eps)
        assert rep.passed == brute_eps_disjoint(T, eps)
        if not rep.passed:
            assert rep.witnesses["infeasible_tiles"]
        checked += 1


def test_identity_k_is_always_invariant():
    ctx, w = z(20)
    T = Quasitiling([interval(ctx, 0, 4), pts(ctx, 0, 3)], [pts(ctx, 0, 10), pts(ctx, 5)], w)
    assert check_property(T, "invariant", w, K=FinSet.identity_set(ctx), eps=Fraction(1, 100)).passed


def test_alpha_covering():
    ctx, w = z(20)
    T = Quasitiling([interval(ctx, 0, 8)], [pts(ctx, 0, 10)], w)
    rep = check_property(T, "alpha_covering", w, alpha=Fraction(9, 10), F=interval(ctx, 0, 9))
    assert rep.passed and rep.witnesses["lower_density"] == Fraction(9, 10)
    assert not check_property(T, "alpha_covering", w, alpha=Fraction(19, 20), F=interval(ctx, 0, 9)).passed


def test_quasitiling_validation():
    ctx, w = z(10)
    with pytest.raises(PreconditionError):
        Quasitiling([pts(ctx, 1, 2)], [pts(ctx, 0)], w)
    with pytest.raises(PreconditionError):
        Quasitiling([pts(ctx, 0), pts(ctx, 0, 1)], [pts(ctx, 3), pts(ctx, 3)], w)
    with pytest.raises(PreconditionError):
        # {0,1}+1 and {0,9}+2 are the same set
        Quasitiling([pts(ctx, 0, 1), pts(ctx, 0, 9)], [pts(ctx, 1), pts(ctx, 2)], w)


def test_heisenberg_transversal_on_ball():
    H = GroupCtx.heisenberg()
    w = Window.margin(ball(H, [(1, 0, 0), (0, 1, 0)], 6))
    T = build_tiling(H, {"type": "heisenberg_transversal", "a": 2, "b": 2}, w)
    assert T.shapes[0] == box(H, (0, 0, 0), (1, 1, 3))
    # every window point factors uniquely as s * gamma with gamma in the subgroup
    for p in w.domain:
        hits = [s for s in T.shapes[0] if heisenberg_subgroup_member(H.mul(H.inv(s), p), 2, 2)]
        assert len(hits) == 1
        s, gamma = heisenberg_factor(p, 2, 2)
        assert H.mul(s, gamma) == p and s == hits[0]


def test_heisenberg_core_partition_on_larger_ball():
    H = GroupCtx.heisenberg()
    w = Window.margin(ball(H, [(1, 0, 0), (0, 1, 0)], 8))
    T = build_tiling(H, {"type": "heisenberg_transversal", "a": 2, "b": 2}, w)
    rep = check_property(T, "tiling", w)
    assert rep.passed and rep.witnesses["region_size"] > 0


def test_shape_union_E_examples():
    Z = GroupCtx.lattice(1)
    w = Window.margin(interval(Z, -20, 20))
    T = Quasitiling([pts(Z, 0, 1, 2)], [pts(Z, 0)], w)
    assert shape_union_E(T) == interval(Z, -2, 2)
    T = Quasitiling([pts(Z, 0, 1), pts(Z, 0, 5)], [pts(Z, 0), pts(Z, 10)], w)
    assert shape_union_E(T) == pts(Z, -1, 0, 1, -5, 5)
    Z2 = GroupCtx.lattice(2)
    T = Quasitiling([box(Z2, (0, 0), (3, 3))], [FinSet(Z2, [(0, 0)])], Window.margin(box(Z2, (0, 0), (3, 3))))
    assert shape_union_E(T) == box(Z2, (-3, -3), (3, 3))


def test_saturation_examples():
    ctx = GroupCtx.torus(12, 12)
    w = Window.torus(ctx)
    T = build_tiling(ctx, {"type": "zd_boxes", "sides": [4, 4]}, w)
    assert saturation(FinSet(ctx, [(3, 3)]), T) == box(ctx, (0, 0), (3, 3))
    tile = box(ctx, (4, 8), (7, 11))
    assert saturation(tile, T) == tile
    c30, w30 = z(30)
    T30 = build_tiling(c30, {"type": "zd_boxes", "sides": [10]}, w30)
    assert saturation(pts(c30, 9, 10), T30) == interval(c30, 0, 19)


def test_saturation_needs_tiled_points():
    ctx, w = z(20)
    T = Quasitiling([interval(ctx, 0, 8)], [pts(ctx, 0, 10)], w)
    with pytest.raises(PreconditionError):
        saturation(pts(ctx, 9), T)


def test_retention_quota():
    assert retention_quota(9, Fraction(1, 5)) == 8
    assert retention_quota(10, Fraction(1, 5)) == 9


def test_defect_of_boxes_decreases_with_side():
    ctx = GroupCtx.torus(60)
    K = pts(ctx, 0, 1)
    prev = None
    for s in (2, 3, 4, 5, 6, 10, 12, 15, 20, 30):
        T = build_tiling(ctx, {"type": "zd_boxes", "sides": [s]}, Window.torus(ctx))
        d = check_property(T, "invariant", K=K, eps=1).witnesses["defects"][0]
        assert d == Fraction(1, s)
        assert prev is None or d < prev
        prev = d


N = 24
CTX = GroupCtx.torus(N)
W = Window.torus(CTX)
T6 = build_tiling(CTX, {"type": "zd_boxes", "sides": [6]}, W)
sets = st.sets(st.integers(0, N - 1)).map(lambda s: FinSet(CTX, [(x,) for x in s]))


@given(st.sampled_from([1, 2, 3, 4, 6, 8, 12, 24]))
def test_built_tilings_pass(side):
    T = build_tiling(CTX, {"type": "zd_boxes", "sides": [side]}, W)
    assert check_property(T, "tiling", W).passed


@given(sets, sets)
def test_saturation_monotone_and_idempotent(P, Q):
    Q = P | Q
    PT, QT = saturation(P, T6), saturation(Q, T6)
    assert PT.issubset(QT)
    assert saturation(PT, T6) == PT
    assert P.issubset(PT)
    assert PT.issubset(shape_union_E(T6).product(P)) or not len(P)


@given(st.lists(st.sets(st.integers(-3, 3), min_size=1, max_size=4), min_size=1, max_size=3))
def test_shape_union_E_symmetric(shapes):
    Z = GroupCtx.lattice(1)
    Ss = [FinSet(Z, [(x,) for x in s | {0}]) for s in shapes]
    Cs = [FinSet(Z, [(100 * i,)]) for i in range(len(Ss))]
    T = Quasitiling(Ss, Cs, Window.margin(interval(Z, -5, 400)))
    E = shape_union_E(T)
    assert E.is_symmetric() and (0,) in E
