import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from comparison_chains import (BudgetExceeded, Chain, FinSet, GroupCtx, PartialInjection, PreconditionError,
                               TheoremViolation, Window, build_injection, build_tiling, chain_bound,
                               compute_chain_bound_N, correct_along, correct_simultaneously, find_chains,
                               greedy_initial, interval, minimal_chains, name_of, run_corrections, splice_shorter,
                               validate_chain, verify_key_hypothesis)
from comparison_chains.correction import NameOrder, compare_names, minimal_from_list, minimal_chain_search
from comparison_chains.oracle import MatchInstance, brute_chain_check, max_matching
from helpers import pts, random_disjoint, tight_torus_instance, z

ZL = GroupCtx.lattice(1)
WL = Window.margin(interval(ZL, -20, 20))


def chain(*xs):
    return Chain(tuple((x,) for x in xs))


def test_greedy_examples():
    phi = greedy_initial(pts(ZL, 0), pts(ZL, 1), [(0,), (1,), (-1,)], WL)
    assert phi.assignment == {(0,): (1,)}
    phi = greedy_initial(pts(ZL, 0, 2), pts(ZL, 1), [(1,), (-1,)], WL)
    assert phi.assignment == {(0,): (1,)}
    assert phi.unmatched() == [(2,)]


def test_greedy_is_bounded_by_max_matching():
    rng = random.Random(7)
    ctx, w = z(60)
    E = interval(ctx, -3, 3)
    for _ in range(30):
        A, B = random_disjoint(ctx, w, 0.3, 0.3, rng)
        order = list(E.elems)
        rng.shuffle(order)
        phi = greedy_initial(A, B, order, w)
        assert len(phi) <= max_matching(MatchInstance(A, B, E)).size


def test_injection_invariants_enforced():
    with pytest.raises(PreconditionError):
        PartialInjection(pts(ZL, 0, 2), pts(ZL, 1), [(1,), (-1,)], {(0,): (1,), (2,): (-1,)}, WL)
    with pytest.raises(PreconditionError):
        PartialInjection(pts(ZL, 0), pts(ZL, 3), [(1,)], {(0,): (3,)}, WL)


def basic_phi():
    return PartialInjection(pts(ZL, 0, 2), pts(ZL, 1, 3), [(-1,), (0,), (1,)], {(2,): (-1,)}, WL)


def test_find_chains_examples():
    phi = basic_phi()
    C = find_chains(phi, 4, start=(0,))
    assert C.points == ((0,), (1,), (2,), (3,))
    assert [c.points for c in find_chains(phi, 4)] == [C.points]
    phi = PartialInjection(pts(ZL, 0), pts(ZL, 1), [(-1,), (0,), (1,)], {}, WL)
    assert find_chains(phi, 2, start=(0,)).points == ((0,), (1,))
    phi = PartialInjection(pts(ZL, 0), pts(ZL, 5), [(-1,), (0,), (1,)], {}, WL)
    assert find_chains(phi, 8, start=(0,)) is None
    assert find_chains(phi, 8) == []


def test_find_chains_against_brute_force():
    rng = random.Random(12)
    for _ in range(60):
        n = rng.randint(8, 30)
        ctx, w = z(n)
        A, B = random_disjoint(ctx, w, 0.35, 0.35, rng)
        E = [(x % n,) for x in range(-2, 3)]
        phi = greedy_initial(A, B, E, w)
        for ml in (2, 4, 6, 8):
            assert sorted(c.points for c in find_chains(phi, ml)) == brute_chain_check(phi, ml)


def test_names_and_order():
    phi = basic_phi()
    C = chain(0, 1, 2, 3)
    assert name_of(C, ZL) == ((1,), (-1,), (1,))
    E = [(-1,), (0,), (1,)]
    assert compare_names(((1,),), ((1,), (-1,), (1,)), E) < 0
    E2 = [(0,), (1,), (-1,)]
    assert compare_names(((0,), (1,), (0,)), ((1,), (0,), (0,)), E2) < 0
    order = NameOrder(E2)
    names = [((1,),), ((0,), (1,), (0,)), ((1,), (0,), (0,)), ((0,),)]
    assert sorted(names, key=order.key) == [((0,),), ((1,),), ((0,), (1,), (0,)), ((1,), (0,), (0,))]


def test_validate_chain_rejects():
    phi = basic_phi()
    with pytest.raises(PreconditionError):
        validate_chain(phi, chain(0, 1, 0, 3))
    with pytest.raises(PreconditionError):
        validate_chain(phi, chain(2, 3))   # 2 is already matched
    with pytest.raises(PreconditionError):
        validate_chain(phi, chain(0, 3))   # 3 not in E*0


def test_minimal_single_and_disjoint():
    phi = basic_phi()
    assert [c.points for c in minimal_chains(phi, 4)] == [chain(0, 1, 2, 3).points]
    phi = PartialInjection(pts(ZL, 0, 10), pts(ZL, 1, 9), [(-1,), (0,), (1,)], {}, WL)
    m = minimal_chains(phi, 2)
    assert {c.points for c in m} == {chain(0, 1).points, chain(10, 9).points}
    assert name_of(m[0], ZL) != name_of(m[1], ZL)


def colliding_instance():
    ctx, w = z(16)
    E = [(0,), (1,), (15,), (3,), (13,)]
    phi = PartialInjection(pts(ctx, 0, 2, 4, 6, 10), pts(ctx, 1, 5, 7, 9, 11), E,
                           {(2,): (15,), (6,): (15,), (10,): (15,)}, w)
    return ctx, phi, chain(0, 1, 2, 5, 6, 7), chain(4, 5, 6, 9, 10, 11)


def test_equal_name_collision_and_shorter_chain():
    ctx, phi, C1, C2 = colliding_instance()
    validate_chain(phi, C1)
    validate_chain(phi, C2)
    assert name_of(C1, ctx) == name_of(C2, ctx)
    assert set(C1.points) & set(C2.points)
    allc = find_chains(phi, 6)
    minimal = minimal_from_list(allc, phi)
    assert C1 not in minimal and C2 not in minimal
    S = splice_shorter(C1, C2, phi)
    assert len(S) < len(C1)
    assert set(S.points) & set(C1.points) and set(S.points) & set(C2.points)
    assert S in allc


def test_correct_along_examples():
    phi = basic_phi()
    out = correct_along(phi, chain(0, 1, 2, 3))
    assert out.assignment == {(0,): (1,), (2,): (1,)}
    phi0 = PartialInjection(pts(ZL, 0), pts(ZL, 1), [(-1,), (0,), (1,)], {}, WL)
    assert correct_along(phi0, chain(0, 1)).assignment == {(0,): (1,)}


def test_correction_deltas_randomized():
    rng = random.Random(21)
    for _ in range(80):
        n = rng.randint(8, 40)
        ctx, w = z(n)
        A, B = random_disjoint(ctx, w, 0.4, 0.3, rng)
        phi = greedy_initial(A, B, [(x % n,) for x in (0, 1, -1, 2, -2)], w)
        for C in find_chains(phi, 8)[:5]:
            out = correct_along(phi, C)
            assert set(out.domain) - set(phi.domain) == {C.points[0]}
            assert set(out.range) - set(phi.range) == {C.points[-1]}
            assert phi.domain.issubset(out.domain)


def test_simultaneous_requires_non_colliding():
    ctx, phi, C1, C2 = colliding_instance()
    with pytest.raises(TheoremViolation):
        correct_simultaneously(phi, [C1, C2])


def test_rounds_reach_maximum_matching():
    # exhaustive chains are augmenting paths: the rounds stop at a maximum matching
    rng = random.Random(3)
    used_chains = 0
    for _ in range(150):
        n = rng.randint(10, 60)
        ctx, w = z(n)
        A, B = random_disjoint(ctx, w, 0.35, 0.35, rng)
        r = rng.randint(1, 3)
        E = FinSet(ctx, [(x % n,) for x in range(-r, r + 1)])
        order = list(E.elems)
        rng.shuffle(order)
        res = run_corrections(greedy_initial(A, B, order, w), None, n + 1)
        used_chains += res.stats["chains_applied"]
        assert len(res.injection) == max_matching(MatchInstance(A, B, E)).size
        for rnd in res.rounds:
            seen = set()
            for C in rnd:
                assert seen.isdisjoint(C.points)
                seen.update(C.points)
    assert used_chains > 0


def test_chain_bound_examples():
    E = pts(ZL, -1, 0, 1)
    assert compute_chain_bound_N(E, Fraction(1, 2)) == 9
    assert compute_chain_bound_N(E, 1) == 5
    # scan of the growth table by floats, as a second route
    for eps, expect in ((0.5, 9), (1.0, 5)):
        ok = [math.log(4 * n + 1) / n < math.log(1 + eps) for n in range(1, 200)]
        first = max(i for i, v in enumerate(ok) if not v) + 2
        assert first == expect


def test_chain_bound_torus_always_exists():
    ctx, _ = z(50)
    b = chain_bound(interval(ctx, -3, 3), Fraction(1, 20))
    assert b.saturated
    assert b.growth[-1][1] == 50
    assert 50 < Fraction(21, 20) ** b.N


def test_chain_bound_cap_error_carries_growth():
    with pytest.raises(BudgetExceeded) as exc:
        chain_bound(pts(ZL, -1, 0, 1), Fraction(1, 100), cap=10)
    assert "growth" in str(exc.value)


def test_chain_bound_needs_symmetric_E():
    with pytest.raises(PreconditionError):
        chain_bound(pts(ZL, 0, 1), 1)


def test_key_hypothesis_examples():
    ctx, w = z(10)
    T = build_tiling(ctx, {"type": "zd_boxes", "sides": [10]}, w)
    A, B = pts(ctx, 0, 5), pts(ctx, 1, 3, 5, 7, 9)
    rep = verify_key_hypothesis(A, B, T, Fraction(1, 5))
    assert rep.passed and (rep.tiles[0].a_count, rep.tiles[0].b_count) == (2, 5)
    # strict inequality: 3 > 3 is false
    assert not verify_key_hypothesis(A, B, T, Fraction(3, 10)).passed
    E0 = FinSet(ctx)
    assert verify_key_hypothesis(E0, B, T, Fraction(4, 10)).passed
    assert not verify_key_hypothesis(E0, B, T, Fraction(5, 10)).passed


def test_build_injection_z30():
    ctx, w = z(30)
    T = build_tiling(ctx, {"type": "zd_boxes", "sides": [10]}, w)
    A = pts(ctx, *range(0, 30, 5))
    B = pts(ctx, *[x for x in range(30) if x % 5 in (1, 3)])
    res = build_injection(A, B, T, Fraction(1, 10), w)
    phi = res.injection
    assert phi.is_total() and len(phi) == 6
    assert all(c in interval(ctx, -9, 9) for c in phi.assignment.values())
    assert res.stats["N"] == compute_chain_bound_N(interval(ctx, -9, 9), Fraction(1, 10))
    assert res.stats["m"] == res.stats["rounds"] + 1
    assert res.stats["horizon_exponent"] == 19 + 4 * res.stats["N"] * res.stats["m"]


def test_build_injection_trivial_and_failing():
    ctx, w = z(10)
    T = build_tiling(ctx, {"type": "zd_boxes", "sides": [10]}, w)
    res = build_injection(FinSet(ctx), pts(ctx, 1, 3), T, Fraction(1, 10), w)
    assert len(res.injection) == 0 and res.stats["rounds"] == 0
    with pytest.raises(PreconditionError) as exc:
        build_injection(pts(ctx, 0, 2, 4, 6, 8), pts(ctx, 1, 3, 5, 7, 9), T, Fraction(1, 10), w)
    assert exc.value.witness.tile.center == (0,)


def test_build_injection_with_corrections_needed():
    # found by random search: with this E order greedy strands one point
    ctx, w = z(12)
    T = build_tiling(ctx, {"type": "zd_boxes", "sides": [4]}, w)
    A, B = pts(ctx, 3, 6, 8), pts(ctx, 0, 1, 4, 5, 10, 11)
    order = [(0,), (1,), (9,), (11,), (10,), (3,), (2,)]
    assert len(greedy_initial(A, B, order, w)) == 2
    res = build_injection(A, B, T, Fraction(1, 5), w, order=order)
    assert res.injection.is_total()
    assert res.stats["rounds"] == 1 and res.stats["max_chain_length"] == 4
    assert res.stats["max_chain_length"] <= 2 * res.stats["N"]


def test_determinism():
    rng = random.Random(9)
    ctx, A, B = tight_torus_instance(60, 10, rng)
    w = Window.torus(ctx)
    T = build_tiling(ctx, {"type": "zd_boxes", "sides": [10]}, w)
    r1 = build_injection(A, B, T, Fraction(1, 11), w)
    r2 = build_injection(A, B, T, Fraction(1, 11), w)
    assert r1.injection == r2.injection and r1.stats == r2.stats


def test_margin_mode_injection():
    w = Window.margin(interval(ZL, 0, 39))
    T = build_tiling(ZL, {"type": "zd_boxes", "sides": [5]}, w)
    A = pts(ZL, *range(0, 40, 5))
    B = pts(ZL, *[x for x in range(40) if x % 5 in (2, 4)])
    res = build_injection(A, B, T, Fraction(1, 6), w)
    assert res.injection.is_total()


@given(st.integers(0, 10_000))
def test_rounds_monotone_domains(seed):
    rng = random.Random(seed)
    n = rng.randint(10, 40)
    ctx, w = z(n)
    A, B = random_disjoint(ctx, w, 0.4, 0.4, rng)
    E = [(x % n,) for x in (0, 1, -1)]
    phi = greedy_initial(A, B, E, w)
    prev = len(phi)
    for _ in range(n):
        s = minimal_chain_search(phi, 2 * n)
        if not s.minimal:
            break
        phi = correct_simultaneously(phi, s.minimal)
        assert len(phi) == prev + len(s.minimal) > prev
        prev = len(phi)
