"""Banach densities at a fixed finite set F, computed exactly.

All values are :class:`fractions.Fraction`.  A :class:`Window` fixes which
right translates ``Fg`` take part in the infimum / supremum:

* torus-exact mode quantifies over every element of a finite torus;
* margin mode quantifies over the translates lying entirely inside a finite
  window of an infinite group.  The number of admissible translates is always
  reported, and an empty admissible set raises
  :class:`~comparison_chains.errors.BoundaryInconclusive`.

The limit densities along a Folner sequence have no finite realization in
general; on a finite group they coincide with ``|B| / |G|``, which is what
:func:`limit_density` returns for torus windows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BoundaryInconclusive, ContextMismatch, PreconditionError
from .group import FinSet, GroupCtx, Point

TORUS_EXACT = "torus-exact"
MARGIN = "margin"


def as_fraction(x) -> Fraction:
    """Exact conversion; floats go through their shortest decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class Window:
    """Finite region over which "for all g in G" is realized."""

    ctx: GroupCtx
    domain: FinSet
    mode: str

    def __post_init__(self):
        if self.mode not in (TORUS_EXACT, MARGIN):
            raise ValueError(f"unknown window mode {self.mode!r}")
        if self.domain.ctx != self.ctx:
            raise ContextMismatch("window domain lives in a different group")
        if self.mode == TORUS_EXACT:
            if not self.ctx.is_finite or len(self.domain) != self.ctx.order():
                raise ValueError("torus-exact windows must cover the whole torus")

    @classmethod
    def torus(cls, ctx: GroupCtx) -> "Window":
        return cls(ctx, ctx.elements(), TORUS_EXACT)

    @classmethod
    def margin(cls, domain: FinSet) -> "Window":
        return cls(domain.ctx, domain, MARGIN)

    @property
    def exact(self) -> bool:
        return self.mode == TORUS_EXACT

    def admissible_translates(self, F: FinSet) -> list:
        """All g with Fg inside the window (every g in torus mode)."""
        if not len(F):
            raise PreconditionError("F must be nonempty")
        if self.exact:
            return list(self.domain.elems)
        ctx = self.ctx
        dom = self.domain.members
        f0_inv = ctx.inv(F.elems[0])
        out = []
        for x in self.domain.elems:
            g = ctx.mul(f0_inv, x)
            if all(ctx.mul(f, g) in dom for f in F.elems):
                out.append(g)
        return out

    def core(self, E: FinSet) -> FinSet:
        """Points x whose neighbourhood E*x stays inside the window."""
        if self.exact:
            return self.domain
        ctx = self.ctx
        dom = self.domain.members
        return FinSet._trusted(ctx, [x for x in self.domain.elems
                                     if all(ctx.mul(e, x) in dom for e in E.elems)])


@dataclass(frozen=True)
class DensityReport:
    """Result of a density evaluation.

    ``witness`` is a translate attaining the extremum, ``translates`` the
    number of translates quantified over.
    """

    kind: str
    value: Fraction
    translates: int
    witness: Point
    mode: str

    def __float__(self):
        return float(self.value)


def _counts(F: FinSet, S: frozenset, g: Point, mul) -> int:
    return sum(1 for f in F.elems if mul(f, g) in S)


def banach_density(kind: str, F: FinSet, B: FinSet, A: FinSet | None, w: Window) -> DensityReport:
    """Lower / upper Banach density of B at F, or the advantage of B over A.

    ``kind`` is ``"lower"``, ``"upper"`` or ``"advantage"``; ``A`` is only
    read for the advantage (``None`` means the empty set).
    """
    if kind not in ("lower", "upper", "advantage"):
        raise ValueError(f"unknown density kind {kind!r}")
    for X in (F, B) + ((A,) if A is not None else ()):
        if X.ctx != w.ctx:
            raise ContextMismatch("operands and window live in different groups")
    if not B.issubset(w.domain) or (A is not None and not A.issubset(w.domain)):
        raise PreconditionError("density sets must lie inside the window")
    translates = w.admissible_translates(F)
    if not translates:
        raise BoundaryInconclusive(
            f"no translate of F (|F|={len(F)}) fits inside the {len(w.domain)}-point window")

    mul = w.ctx.mul
    Bm = B.members
    Am = A.members if (A is not None and kind == "advantage") else frozenset()
    best = None
    best_g = None
    for g in translates:
        c = _counts(F, Bm, g, mul)
        if Am:
            c -= _counts(F, Am, g, mul)
        if best is None or (c > best if kind == "upper" else c < best):
            best, best_g = c, g
    return DensityReport(kind, Fraction(best, len(F)), len(translates), best_g, w.mode)


def lower_density(F, B, w) -> Fraction:
    return banach_density("lower", F, B, None, w).value


def upper_density(F, B, w) -> Fraction:
    return banach_density("upper", F, B, None, w).value


def density_advantage(F, B, A, w) -> Fraction:
    return banach_density("advantage", F, B, A, w).value


def limit_density(B: FinSet, w: Window) -> Fraction:
    """Lower (= upper) Banach density on a finite torus: |B| / |G|."""
    if not w.exact:
        raise BoundaryInconclusive("limit densities are only exact on a torus")
    return Fraction(len(B), len(w.domain))


def invariance_defect(K: FinSet, F: FinSet) -> Fraction:
    """|KF symmetric-difference F| / |F|; F is (K, eps)-invariant iff this is < eps."""
    if K.ctx != F.ctx:
        raise ContextMismatch("K and F live in different groups")
    if not len(K) or not len(F):
        raise PreconditionError("K and F must be nonempty")
    return Fraction(len(K.product(F) ^ F), len(F))


def sup_over_family(kind: str, family: Sequence[FinSet], B: FinSet, A: FinSet | None,
                    w: Window) -> tuple:
    """Best fixed-F value over a user-supplied family of finite sets.

    Approximates the sup/inf over *all* finite F; the returned index says
    which member attained it.  ``kind`` of ``lower`` / ``advantage`` takes the
    supremum, ``upper`` the infimum.
    """
    values = [banach_density(kind, F, B, A, w).value for F in family]
    pick = min if kind == "upper" else max
    best = pick(values)
    return best, values.index(best)


# -- inequality checks ----------------------------------------------------

@dataclass
class InequalityReport:
    which: str
    holds: bool
    lhs: Fraction
    rhs: Fraction
    relation: str
    details: dict = field(default_factory=dict)


def check_bdc(F: FinSet, F1: FinSet, B: FinSet, A: FinSet, w: Window) -> InequalityReport:
    """D_{F1}(B,A) >= D_F(B,A) - 4*eps with eps the (F, .)-defect of F1.

    In margin mode the left side only ranges over translates g with
    F*F1*g inside the window, which is where the inequality is provable.
    """
    eps = invariance_defect(F, F1)
    rhs_rep = banach_density("advantage", F, B, A, w)
    if w.exact:
        lhs_rep = banach_density("advantage", F1, B, A, w)
        lhs, n_lhs = lhs_rep.value, lhs_rep.translates
    else:
        FF1 = F.product(F1)
        ok = set(w.admissible_translates(FF1))
        if not ok:
            raise BoundaryInconclusive("F*F1 does not fit in the window")
        mul = w.ctx.mul
        vals = [_counts(F1, B.members, g, mul) - _counts(F1, A.members, g, mul) for g in ok]
        lhs, n_lhs = Fraction(min(vals), len(F1)), len(ok)
    rhs = rhs_rep.value - 4 * eps
    return InequalityReport("bdc", lhs >= rhs, lhs, rhs, ">=",
                            {"eps": eps, "D_F": rhs_rep.value, "translates_lhs": n_lhs,
                             "translates_rhs": rhs_rep.translates})


def check_union_bound(pieces: Iterable[tuple], w: Window) -> InequalityReport:
    """Lower density of a disjoint union of translated pieces.

    ``pieces`` holds triples ``(A_k, B_k, g_k)`` with ``B_k`` a subset of
    ``A_k``.  Checks D(U B_k g_k) >= D(U A_k g_k) * min_k |B_k|/|A_k| with the
    limit densities of a torus window.
    """
    pieces = list(pieces)
    if not pieces:
        raise PreconditionError("need at least one piece")
    ctx = w.ctx
    covered = set()
    Bset = set()
    ratio = None
    for k, (Ak, Bk, gk) in enumerate(pieces):
        if not len(Ak):
            raise PreconditionError(f"piece {k} is empty", witness=k)
        if not Bk.issubset(Ak):
            raise PreconditionError(f"B_{k} is not contained in A_{k}", witness=k)
        tr = Ak.right_translate(gk)
        clash = covered & tr.members
        if clash:
            raise PreconditionError(f"translated piece {k} overlaps an earlier piece",
                                    witness=sorted(clash)[0])
        covered |= tr.members
        Bset |= Bk.right_translate(gk).members
        r = Fraction(len(Bk), len(Ak))
        ratio = r if ratio is None else min(ratio, r)
    A = FinSet._trusted(ctx, covered)
    B = FinSet._trusted(ctx, Bset)
    lhs = limit_density(B, w)
    dA = limit_density(A, w)
    rhs = dA * ratio
    return InequalityReport("union_bound", lhs >= rhs, lhs, rhs, ">=",
                            {"D_A": dA, "min_ratio": ratio})


def check_coro(F: FinSet, B: FinSet, A: FinSet, w: Window) -> InequalityReport:
    """lower_F(B) - upper_F(A) <= advantage_F(B, A)."""
    lo = banach_density("lower", F, B, None, w).value
    up = banach_density("upper", F, A, None, w).value if len(A) else Fraction(0)
    adv = banach_density("advantage", F, B, A, w).value
    lhs = lo - up
    return InequalityReport("coro", lhs <= adv, lhs, adv, "<=",
                            {"lower_B": lo, "upper_A": up})


def check_inequality(which: str, **inputs) -> InequalityReport:
    """Dispatch to :func:`check_bdc`, :func:`check_union_bound` or :func:`check_coro`."""
    if which == "bdc":
        return check_bdc(**inputs)
    if which == "union_bound":
        return check_union_bound(**inputs)
    if which == "coro":
        return check_coro(**inputs)
    raise ValueError(f"unknown inequality {which!r}")
