import itertools

import pytest
from hypothesis import given, strategies as st

from comparison_chains import FinSet, GroupCtx, ContextMismatch, ball, box, interval, power_growth, set_op, stabilization_point
from helpers import pts

HEIS = GroupCtx.heisenberg()
Z2 = GroupCtx.lattice(2)
T12 = GroupCtx.torus(12)
T5x7 = GroupCtx.torus(5, 7)

small = st.integers(-6, 6)
heis_pt = st.tuples(small, small, small)
z2_pt = st.tuples(small, small)
t57_pt = st.tuples(st.integers(0, 4), st.integers(0, 6))

GROUPS = [(HEIS, heis_pt), (Z2, z2_pt), (T5x7, t57_pt)]


def test_mul_examples():
    assert Z2.mul((1, 2), (3, 4)) == (4, 6)
    assert HEIS.mul((1, 0, 0), (0, 1, 0)) == (1, 1, 1)
    assert T12.mul((7,), (8,)) == (3,)


def test_heisenberg_inverse_formula():
    assert HEIS.inv((2, 3, 5)) == (-2, -3, -5 + 6)
    assert HEIS.mul((2, 3, 5), HEIS.inv((2, 3, 5))) == (0, 0, 0)


def test_dimension_mismatch():
    with pytest.raises(ContextMismatch):
        Z2.mul((1, 2), (1, 2, 3))
    with pytest.raises(ContextMismatch):
        FinSet(Z2, [(1, 2)]) | FinSet(T12, [(1,)])


def test_torus_canonical_reduction():
    assert T12.canon((-1,)) == (11,)
    assert FinSet(T12, [(13,), (1,), (-11,)]).elems == ((1,),)
    with pytest.raises(ValueError):
        GroupCtx.torus(0)


@pytest.mark.parametrize("ctx,gen", GROUPS)
def test_group_laws(ctx, gen):
    @given(gen, gen, gen)
    def check(g, h, k):
        g, h, k = ctx.canon(g), ctx.canon(h), ctx.canon(k)
        assert ctx.mul(ctx.mul(g, h), k) == ctx.mul(g, ctx.mul(h, k))
        assert ctx.mul(ctx.identity, g) == g == ctx.mul(g, ctx.identity)
        assert ctx.mul(g, ctx.inv(g)) == ctx.identity == ctx.mul(ctx.inv(g), g)
    check()


def test_heisenberg_is_not_abelian():
    a, b = (1, 0, 0), (0, 1, 0)
    assert HEIS.mul(a, b) != HEIS.mul(b, a)
    assert not HEIS.is_abelian


def test_product_and_defect_example():
    K = pts(GroupCtx.lattice(1), 0, 1)
    F = interval(GroupCtx.lattice(1), 0, 9)
    KF = K.product(F)
    assert KF == interval(GroupCtx.lattice(1), 0, 10)
    assert len(KF ^ F) == 1


def test_power_of_interval():
    Z = GroupCtx.lattice(1)
    E = pts(Z, -1, 0, 1)
    for n in range(6):
        P = E.power(n)
        assert P == interval(Z, -n, n)
        assert len(P) == 2 * n + 1
    assert E.power(0) == FinSet.identity_set(Z)


def test_heisenberg_ball_by_word_enumeration():
    gens = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]
    words = set()
    for length in range(3):
        for w in itertools.product(gens, repeat=length):
            g = (0, 0, 0)
            for s in w:
                g = HEIS.mul(g, s)
            words.add(g)
    B2 = ball(HEIS, [(1, 0, 0), (0, 1, 0)], 2)
    assert set(B2) == words
    assert len(B2) == 17


@given(st.lists(t57_pt, min_size=1, max_size=8), t57_pt)
def test_translate_cancellative_and_inverse_involution(F, g):
    F = FinSet(T5x7, F)
    g = T5x7.canon(g)
    assert len(F.right_translate(g)) == len(F)
    assert len(F.left_translate(g)) == len(F)
    assert F.inverse().inverse() == F


@given(st.lists(heis_pt, min_size=1, max_size=6), heis_pt)
def test_heisenberg_translates(F, g):
    F = FinSet(HEIS, F)
    assert len(F.right_translate(g)) == len(F)
    assert F.inverse().inverse() == F
    assert F.right_translate(g).right_translate(HEIS.inv(g)) == F


@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=4),
       st.integers(0, 2), st.integers(0, 2), st.booleans())
def test_power_inclusion(E, m, n, with_e):
    E = FinSet(HEIS, E)
    if with_e:
        E = E | FinSet.identity_set(HEIS)
    lhs = E.power(m + n)
    rhs = E.power(m).product(E.power(n))
    assert lhs.issubset(rhs)
    if with_e:
        assert lhs == rhs


def test_torus_power_stabilizes():
    ctx = GroupCtx.torus(10)
    n, P = stabilization_point(pts(ctx, 0, 1))
    assert P == ctx.elements()
    assert n == 9
    growth = power_growth(pts(ctx, 0, 1, 9), 6)
    assert growth[0] == 1 and growth[-1] == 10


def test_set_op_dispatch():
    Z = GroupCtx.lattice(1)
    X, Y = pts(Z, 0, 1), pts(Z, 1, 2)
    assert set_op("product", X, Y) == pts(Z, 1, 2, 3)
    assert set_op("sym_diff", X, Y) == pts(Z, 0, 2)
    assert set_op("right_translate", X, g=(5,)) == pts(Z, 5, 6)
    assert set_op("inverse", X) == pts(Z, 0, -1)
    assert set_op("power", pts(Z, -1, 0, 1), n=2) == interval(Z, -2, 2)


def test_canonical_order_is_lexicographic():
    S = box(Z2, (0, 0), (1, 1))
    assert S.elems == ((0, 0), (0, 1), (1, 0), (1, 1))
