"""Conversions between quasitilings, tilings and injections.

Forward: a disjoint quasitiling leaves some points uncovered.  Choose a
target set ``B_S`` inside each shape, send the uncovered points injectively
into the union of the ``B_S c``, and glue every uncovered point onto the tile
owning its image.  The result is an exact tiling whose new shapes are at most
``i_S = |B_S|`` points larger.

Converse: if every tile of a tiling holds more B-points than A-points, pair
them inside each tile.  The pairing only looks at the tile's own label
pattern, so it is determined by a block code and yields a subequivalence
certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .correction import PartialInjection, greedy_initial, run_corrections
from .density import Window, as_fraction, invariance_defect
from .errors import PreconditionError, TheoremViolation
from .group import FinSet, Point, stabilization_point
from .oracle import MatchInstance, hall_deficiency
from .symbolic import (BlockCode, Configuration, build_code_table, certificate_from_code,
                       extract_sets, tiled_configuration, verify_certificate)
from .tiling import Quasitiling, check_property, shape_union_E


@dataclass
class TargetChoice:
    """Per shape: the chosen subset B_S and its size i_S."""

    targets: tuple

    @property
    def counts(self) -> tuple:
        return tuple(len(t) for t in self.targets)


def default_targets(T: Quasitiling, counts: Sequence[int]) -> TargetChoice:
    """The ``i_S`` lexicographically smallest points of each shape."""
    if len(counts) != len(T.shapes):
        raise ValueError("need one target count per shape")
    out = []
    for S, i in zip(T.shapes, counts):
        if not 0 <= i <= len(S):
            raise PreconditionError(f"target count {i} does not fit in a shape of size {len(S)}")
        out.append(FinSet._trusted(T.ctx, S.elems[:i]))
    return TargetChoice(tuple(out))


def open_interval_integer(lo: Fraction, hi: Fraction):
    """Smallest integer strictly between lo and hi, or None."""
    k = math.floor(lo) + 1
    return k if k < hi else None


def interval_targets(T: Quasitiling, K: FinSet, eps, delta) -> TargetChoice:
    """Pick i_S inside (2 delta/(1-delta) |S|, eps/(2|K|) |S|) for every shape.

    Raises PreconditionError when an interval holds no integer; the remedy is
    to use larger shapes.
    """
    eps, delta = as_fraction(eps), as_fraction(delta)
    if not delta < 1:
        raise PreconditionError("uncovered density must be below 1")
    low_rate = 2 * delta / (1 - delta)
    high_rate = eps / (2 * len(K))
    if not low_rate < high_rate:
        raise PreconditionError(
            f"2*delta/(1-delta) = {low_rate} is not below eps/(2|K|) = {high_rate}; "
            "the quasitiling does not cover enough")
    counts = []
    for idx, S in enumerate(T.shapes):
        i = open_interval_integer(low_rate * len(S), high_rate * len(S))
        if i is None:
            raise PreconditionError(
                f"no integer in ({low_rate * len(S)}, {high_rate * len(S)}) for shape {idx}; "
                "enlarge the shapes", witness=idx)
        counts.append(i)
    return default_targets(T, counts)


@dataclass
class ConversionResult:
    tiling: Quasitiling
    injection: PartialInjection
    stats: dict = field(default_factory=dict)
    added: dict = field(default_factory=dict)   # TileId -> added set (FinSet)


def _as_injection(inj, A, B, E_hint, w) -> PartialInjection:
    if isinstance(inj, PartialInjection):
        return inj
    # mapping a -> image point
    ctx = A.ctx
    assignment = {ctx.canon(a): ctx.div(ctx.canon(b), ctx.canon(a)) for a, b in dict(inj).items()}
    E = sorted(set(E_hint) | set(assignment.values()))
    return PartialInjection(A, B, E, assignment, w)


def _search_injection(A, B, base_E: FinSet, w, max_growth: int = 4):
    E = base_E
    last = None
    for _ in range(max_growth):
        phi = greedy_initial(A, B, E.elems, w)
        res = run_corrections(phi, None, len(A) + 1)
        if res.injection.is_total():
            return res.injection, E
        last = E
        bigger = E.product(base_E)
        if bigger == E:
            break
        E = bigger
    hall = hall_deficiency(MatchInstance(A, B, last), method="matching")
    raise PreconditionError(
        f"no injection from the uncovered set into the targets (Hall deficiency {hall.deficiency})",
        witness=hall.witness)


def tiling_from_quasitiling(Tq: Quasitiling, targets: TargetChoice, w: Window, *,
                            injection=None, K: FinSet | None = None, eps=None) -> ConversionResult:
    """Glue uncovered points onto tiles to turn a disjoint quasitiling into a tiling.

    ``injection`` may be supplied as a PartialInjection or a mapping
    ``uncovered point -> target point``; otherwise one is built with the
    correction engine over multipliers from (union of shapes)(union of shapes)^-1,
    enlarged by powers if needed.  With ``K`` and ``eps`` the output tiles are
    audited for ``|K Phi(Sc)| < (1+eps)|S|``.
    """
    if not w.exact:
        raise PreconditionError("the conversion is implemented on whole tori only")
    ctx = Tq.ctx
    if not check_property(Tq, "disjoint", w).passed:
        raise PreconditionError("input quasitiling is not disjoint")
    if len(targets.targets) != len(Tq.shapes):
        raise ValueError("need one target set per shape")
    for S, BS in zip(Tq.shapes, targets.targets):
        if not BS.issubset(S):
            raise PreconditionError("target sets must lie inside their shapes")
    covered = Tq.union()
    A = w.domain - covered
    owner = {}
    for tid, _ in Tq.tiles:
        for b in targets.targets[tid.shape].right_translate(tid.center):
            owner[b] = tid
    B = FinSet._trusted(ctx, owner)
    if not A.isdisjoint(B):
        raise PreconditionError("uncovered set meets the targets")

    U = FinSet._trusted(ctx, {p for S in Tq.shapes for p in S})
    base_E = U.product(U.inverse())
    if injection is None:
        phi, E_used = _search_injection(A, B, base_E, w)
    else:
        phi = _as_injection(injection, A, B, base_E.elems, w)
        E_used = FinSet._trusted(ctx, phi.E)
    if not phi.is_total():
        raise PreconditionError("supplied injection is not total on the uncovered set")

    added = {tid: [] for tid, _ in Tq.tiles}
    for a in phi.A:
        added[owner[phi(a)]].append(a)
    shape_ids = {}
    new_shapes, new_centers = [], []
    added_sets = {}
    for tid, pts in Tq.tiles:
        extra = FinSet._trusted(ctx, added[tid])
        added_sets[tid] = extra
        shape = (pts | extra).right_translate(ctx.inv(tid.center))
        k = shape_ids.get(shape)
        if k is None:
            k = shape_ids[shape] = len(new_shapes)
            new_shapes.append(shape)
            new_centers.append([])
        new_centers[k].append(tid.center)
    T = Quasitiling(new_shapes, [FinSet._trusted(ctx, c) for c in new_centers], w)
    rep = check_property(T, "tiling", w)
    if not rep.passed:
        raise TheoremViolation(f"converted quasitiling is not a partition: {rep.witnesses}")

    counts = targets.counts
    max_added = max((len(v) for v in added_sets.values()), default=0)
    over = [tid for tid, v in added_sets.items() if len(v) > counts[tid.shape]]
    if over:
        raise TheoremViolation(f"added set larger than i_S at {over[0]}")
    delta = Fraction(len(A), len(w.domain))
    stats = {
        "uncovered": len(A),
        "targets": len(B),
        "delta": delta,
        "max_added": max_added,
        "i_S": list(counts),
        "input_shapes": len(Tq.shapes),
        "output_shapes": len(new_shapes),
        "multiplier_set_size": len(E_used),
    }
    if K is not None and eps is not None:
        stats.update(_audit(Tq, T, added_sets, targets, K, as_fraction(eps), delta))
    return ConversionResult(T, phi, stats, added_sets)


def _audit(Tq, T, added_sets, targets, K, eps, delta) -> dict:
    """Invariance audit of the output tiles, plus whether the hypotheses held."""
    ctx = Tq.ctx
    if ctx.identity not in K:
        K = K | FinSet.identity_set(ctx)
    half_invariant = all(invariance_defect(K, S) < eps / 2 for S in Tq.shapes)
    low_rate = 2 * delta / (1 - delta) if delta < 1 else None
    high_rate = eps / (2 * len(K))
    in_interval = low_rate is not None and all(
        low_rate * len(S) < i < high_rate * len(S) for S, i in zip(Tq.shapes, targets.counts))
    violations = []
    for tid, pts in Tq.tiles:
        grown = pts | added_sets[tid]
        lhs = len(K.product(grown))
        if not lhs < (1 + eps) * len(Tq.shapes[tid.shape]):
            violations.append((tid, lhs))
    return {
        "hypotheses_met": half_invariant and in_interval,
        "half_invariant": half_invariant,
        "i_S_in_interval": in_interval,
        "invariance_violations": violations,
    }


# -- converse ---------------------------------------------------------------

@dataclass
class ConverseResult:
    injection: PartialInjection
    certificate: object
    code: BlockCode
    stats: dict = field(default_factory=dict)


def injection_from_tiling(c: Configuration, T: Quasitiling) -> ConverseResult:
    """Pair A-points with B-points inside every tile.

    Within a tile ``Sc`` the A- and B-points are sorted by their shape
    coordinate ``x c^-1`` and paired in order.  Requires strictly more
    B-points than A-points in every tile.
    """
    w = c.window
    ctx = c.ctx
    if not check_property(T, "tiling", w).passed:
        raise PreconditionError("input is not a tiling")
    A, B = extract_sets(c)
    Am, Bm = A.members, B.members
    E = shape_union_E(T)
    assignment = {}
    for tid, pts in T.tiles:
        cinv = ctx.inv(tid.center)
        local_a = sorted((ctx.mul(x, cinv), x) for x in pts if x in Am)
        local_b = sorted((ctx.mul(x, cinv), x) for x in pts if x in Bm)
        if len(local_a) >= len(local_b):
            raise PreconditionError(
                f"per-tile count condition fails at {tid}: {len(local_a)} A-points, "
                f"{len(local_b)} B-points", witness=tid)
        for (_, a), (_, b) in zip(local_a, local_b):
            assignment[a] = ctx.div(b, a)
    phi = PartialInjection(A, B, E.elems, assignment, w)
    if not phi.is_total():
        raise TheoremViolation("tile-wise pairing missed some A-points")
    marked = tiled_configuration(c, T)
    code = build_code_table([(marked, phi)], E)
    if not isinstance(code, BlockCode):
        raise TheoremViolation(f"tile-wise pairing is not pattern-determined: {code}")
    cert = certificate_from_code(code, marked)
    rep = verify_certificate(cert, A, B)
    if not rep.passed:
        raise TheoremViolation(f"certificate failed: {rep.reason} {rep.witness}")
    return ConverseResult(phi, cert, code, {"A": len(A), "B": len(B), "parts": len(cert.parts),
                                             "code_entries": len(code.table)})
