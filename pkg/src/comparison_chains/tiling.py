"""Quasitilings, their property checks, and explicit tilings of the supported groups.

A quasitiling is a finite list of shapes (each containing the identity) and,
per shape, a set of centers; its tiles are the right translates ``S*c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import math

import networkx as nx

from .density import Window, as_fraction, banach_density, invariance_defect
from .errors import BoundaryInconclusive, ContextMismatch, PreconditionError
from .group import FinSet, GroupCtx, HEISENBERG, LATTICE, TORUS, Point, box


@dataclass(frozen=True)
class TileId:
    shape: int
    center: Point


class Quasitiling:
    """Shapes plus pairwise disjoint center sets.

    The constructor validates that every shape contains the identity, that
    center sets are pairwise disjoint and that distinct (shape, center) pairs
    give distinct tiles.
    """

    def __init__(self, shapes, centers, window: Window | None = None):
        shapes = tuple(shapes)
        centers = tuple(centers)
        if len(shapes) != len(centers):
            raise ValueError("need exactly one center set per shape")
        if not shapes:
            raise ValueError("a quasitiling needs at least one shape")
        ctx = shapes[0].ctx
        for S, C in zip(shapes, centers):
            if S.ctx != ctx or C.ctx != ctx:
                raise ContextMismatch("shapes and centers must share one group")
            if ctx.identity not in S:
                raise PreconditionError(f"shape {S} does not contain the identity")
        seen = {}
        for i, C in enumerate(centers):
            for c in C:
                if c in seen:
                    raise PreconditionError(
                        f"center {c} is used by shapes {seen[c]} and {i}", witness=c)
                seen[c] = i
        if window is not None and window.ctx != ctx:
            raise ContextMismatch("window lives in a different group")
        self.ctx = ctx
        self.shapes = shapes
        self.centers = centers
        self.window = window
        sets = {}
        for tid, pts in self._materialize():
            if pts in sets:
                raise PreconditionError(
                    f"tiles {sets[pts]} and {tid} coincide as sets", witness=(sets[pts], tid))
            sets[pts] = tid

    def _materialize(self):
        for i, (S, C) in enumerate(zip(self.shapes, self.centers)):
            for c in C:
                yield TileId(i, c), S.right_translate(c)

    @cached_property
    def tiles(self) -> list:
        """List of ``(TileId, FinSet)`` in shape-then-center order."""
        return list(self._materialize())

    @cached_property
    def cover_index(self) -> dict:
        """point -> list of indices into :attr:`tiles` covering it."""
        idx = {}
        for k, (_, pts) in enumerate(self.tiles):
            for p in pts:
                idx.setdefault(p, []).append(k)
        return idx

    def union(self) -> FinSet:
        return FinSet._trusted(self.ctx, self.cover_index.keys())

    def tile_of(self, p: Point) -> tuple:
        ks = self.cover_index.get(tuple(p), [])
        if len(ks) != 1:
            raise PreconditionError(f"point {p} is covered by {len(ks)} tiles", witness=p)
        return self.tiles[ks[0]]

    def __len__(self):
        return sum(len(C) for C in self.centers)

    def __repr__(self):
        return f"Quasitiling({len(self.shapes)} shapes, {len(self)} tiles, {self.ctx.describe()})"


def shape_union_E(T: Quasitiling) -> FinSet:
    """Union of S*S^-1 over the shapes: symmetric and contains e."""
    out = set()
    for S in T.shapes:
        out |= S.product(S.inverse()).members
    return FinSet._trusted(T.ctx, out)


@dataclass
class PropertyReport:
    which: str
    passed: bool
    witnesses: dict = field(default_factory=dict)
    inconclusive: list = field(default_factory=list)


def _escaping_tiles(T: Quasitiling, w: Window) -> list:
    if w.exact:
        return []
    dom = w.domain.members
    return [tid for tid, pts in T.tiles if not pts.members <= dom]


def _region(T: Quasitiling, w: Window) -> FinSet:
    return w.domain if w.exact else w.core(shape_union_E(T))


def check_property(T: Quasitiling, which: str, w: Window | None = None, *, K: FinSet | None = None,
                   eps=None, alpha=None, F: FinSet | None = None) -> PropertyReport:
    """Check one of ``invariant``, ``eps_disjoint``, ``disjoint``,
    ``alpha_covering`` or ``tiling``.

    ``invariant`` needs ``K`` and ``eps``; ``eps_disjoint`` needs ``eps``;
    ``alpha_covering`` needs ``alpha`` and a probe set ``F``.
    """
    w = w or T.window
    if w is None:
        raise ValueError("quasitiling is not bound to a window")
    if which == "invariant":
        return _check_invariant(T, K, as_fraction(eps))
    if which == "disjoint":
        return _check_disjoint(T, w)
    if which == "eps_disjoint":
        return _check_eps_disjoint(T, w, as_fraction(eps))
    if which == "alpha_covering":
        return _check_covering(T, w, as_fraction(alpha), F)
    if which == "tiling":
        return _check_tiling(T, w)
    raise ValueError(f"unknown property {which!r}")


def _check_invariant(T, K, eps):
    defects = [invariance_defect(K, S) for S in T.shapes]
    bad = [i for i, d in enumerate(defects) if not d < eps]
    return PropertyReport("invariant", not bad, {"defects": defects, "failing_shapes": bad})


def _check_disjoint(T, w):
    overlap = sorted(p for p, ks in T.cover_index.items() if len(ks) > 1)
    return PropertyReport("disjoint", not overlap, {"overlap": overlap},
                          _escaping_tiles(T, w))


def _check_tiling(T, w):
    region = _region(T, w)
    idx = T.cover_index
    uncovered = [p for p in region if p not in idx]
    doubled = [p for p in region if len(idx.get(p, ())) > 1]
    return PropertyReport("tiling", not uncovered and not doubled,
                          {"uncovered": uncovered, "doubly_covered": doubled,
                           "region_size": len(region)},
                          _escaping_tiles(T, w))


def _check_covering(T, w, alpha, F):
    if F is None:
        raise ValueError("alpha_covering needs a probe set F")
    U = T.union() & w.domain
    rep = banach_density("lower", F, U, None, w)
    return PropertyReport("alpha_covering", rep.value >= alpha,
                          {"lower_density": rep.value, "translates": rep.translates,
                           "witness": rep.witness})


def retention_quota(size: int, eps: Fraction) -> int:
    """Smallest integer r with r > (1 - eps) * size."""
    return math.floor((1 - eps) * size) + 1


def _check_eps_disjoint(T, w, eps):
    """Decide eps-disjointness exactly with a max-flow feasibility problem.

    Points covered by a single tile stay with it; every multiply covered
    point may be handed to at most one of its tiles.  Tile t must end up with
    more than (1-eps)|t| points, i.e. it needs ``demand[t]`` shared points.
    """
    tiles = T.tiles
    own = [0] * len(tiles)
    shared = {}
    for p, ks in T.cover_index.items():
        if len(ks) == 1:
            own[ks[0]] += 1
        else:
            shared[p] = ks
    demand = [max(0, retention_quota(len(pts), eps) - own[k]) for k, (_, pts) in enumerate(tiles)]
    # a tile needing more points than it has can never be satisfied
    for k, (_, pts) in enumerate(tiles):
        if retention_quota(len(pts), eps) > len(pts):
            return PropertyReport("eps_disjoint", False,
                                  {"infeasible_tiles": [tiles[k][0]], "demand": demand[k],
                                   "available": 0}, _escaping_tiles(T, w))
    total = sum(demand)
    assignment = {}
    if total:
        G = nx.DiGraph()
        for k, d in enumerate(demand):
            if d:
                G.add_edge("s", ("t", k), capacity=d)
        for p, ks in shared.items():
            G.add_edge(("p", p), "z", capacity=1)
            for k in ks:
                if demand[k]:
                    G.add_edge(("t", k), ("p", p))  # uncapacitated
        flow_value, flow = nx.maximum_flow(G, "s", "z")
        if flow_value < total:
            _, (src_side, _) = nx.minimum_cut(G, "s", "z")
            bad = sorted(node[1] for node in src_side if node != "s" and node[0] == "t")
            nbrs = {p for k in bad for p in shared if k in shared[p]}
            return PropertyReport("eps_disjoint", False,
                                  {"infeasible_tiles": [tiles[k][0] for k in bad],
                                   "demand": sum(demand[k] for k in bad),
                                   "available": len(nbrs)},
                                  _escaping_tiles(T, w))
        for k, d in enumerate(demand):
            if d:
                for node, f in flow[("t", k)].items():
                    if f:
                        assignment[node[1]] = k
    kept = []
    for k, (tid, pts) in enumerate(tiles):
        mine = [p for p in pts if len(T.cover_index[p]) == 1 or assignment.get(p) == k]
        kept.append((tid, FinSet._trusted(T.ctx, mine)))
    return PropertyReport("eps_disjoint", True, {"cores": kept, "assignment": assignment},
                          _escaping_tiles(T, w))


# -- explicit tilings -----------------------------------------------------

def heisenberg_subgroup_member(g: Point, a: int, b: int) -> bool:
    x, y, z = g
    return x % a == 0 and y % b == 0 and z % (a * b) == 0


def heisenberg_factor(g: Point, a: int, b: int) -> tuple:
    """Write g = s * gamma with s in the box shape and gamma in the subgroup."""
    x, y, z = g
    sx, sy = x % a, y % b
    gx, gy = x - sx, y - sy
    zr = z - sx * gy
    sz = zr % (a * b)
    return (sx, sy, sz), (gx, gy, zr - sz)


def build_tiling(ctx: GroupCtx, spec: dict, w: Window) -> Quasitiling:
    """Construct an exact single-shape tiling.

    ``spec`` is ``{"type": "zd_boxes", "sides": [...]}`` (torus or lattice) or
    ``{"type": "heisenberg_transversal", "a": a, "b": b}``.  The result is
    checked with :func:`check_property` before it is returned.
    """
    kind = spec.get("type")
    if kind == "zd_boxes":
        T = _zd_boxes(ctx, tuple(int(s) for s in spec["sides"]), w)
    elif kind == "heisenberg_transversal":
        T = _heisenberg(ctx, int(spec["a"]), int(spec["b"]), w)
    else:
        raise ValueError(f"unknown tiling type {kind!r}")
    rep = check_property(T, "tiling", w)
    if not rep.passed:
        bad = (rep.witnesses["uncovered"] + rep.witnesses["doubly_covered"])[0]
        raise PreconditionError(f"constructed tiling fails the partition check at {bad}",
                                witness=bad)
    return T


def _zd_boxes(ctx, sides, w):
    if ctx.kind not in (TORUS, LATTICE):
        raise ContextMismatch("box tilings need Z^d or a torus")
    if len(sides) != ctx.dim or any(s < 1 for s in sides):
        raise ValueError("need one positive side length per axis")
    shape = box(ctx, (0,) * ctx.dim, tuple(s - 1 for s in sides))
    if ctx.kind == TORUS:
        for s, n in zip(sides, ctx.sizes):
            if n % s:
                raise PreconditionError(f"side {s} does not divide axis length {n}")
        centers = box(ctx, (0,) * ctx.dim, tuple(n // s - 1 for s, n in zip(sides, ctx.sizes)))
        centers = FinSet._trusted(ctx, (tuple(c * s for c, s in zip(p, sides)) for p in centers))
    else:
        centers = FinSet._trusted(ctx, {tuple((x // s) * s for x, s in zip(p, sides))
                                        for p in w.domain})
    return Quasitiling([shape], [centers], w)


def _heisenberg(ctx, a, b, w):
    if ctx.kind != HEISENBERG:
        raise ContextMismatch("transversal tiling needs the Heisenberg group")
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive")
    shape = box(ctx, (0, 0, 0), (a - 1, b - 1, a * b - 1))
    centers = FinSet._trusted(ctx, {heisenberg_factor(p, a, b)[1] for p in w.domain})
    T = Quasitiling([shape], [centers], w)
    # every window point must factor as s*gamma for exactly one s in the shape
    mul, inv = ctx.mul, ctx.inv
    cset = centers.members
    for p in w.domain:
        hits = [s for s in shape if heisenberg_subgroup_member(mul(inv(s), p), a, b)]
        if len(hits) != 1 or mul(inv(hits[0]), p) not in cset:
            raise PreconditionError(f"point {p} factors {len(hits)} times through the shape",
                                    witness=p)
    return T


def saturation(P: FinSet, T: Quasitiling) -> FinSet:
    """Union of all tiles meeting P."""
    out = set()
    for p in P:
        _, pts = T.tile_of(p)
        out |= pts.members
    return FinSet._trusted(T.ctx, out)
