"""Group arithmetic and finite-set algebra for the supported groups.

Three kinds of group are supported:

* ``lattice``    -- Z^d, elements are integer d-tuples;
* ``torus``      -- Z_{n_1} x ... x Z_{n_d}, coordinates reduced to [0, n_i);
* ``heisenberg`` -- the discrete Heisenberg group H3(Z) in normal form
  (x, y, z) with (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y').

Group elements are plain tuples of ints in canonical form.  Finite sets of
elements are :class:`FinSet` objects, which keep their points sorted
lexicographically; every deterministic choice downstream (enumeration of
multiplier sets, greedy scans, chain name order) relies on that order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ContextMismatch

Point = tuple

LATTICE = "lattice"
TORUS = "torus"
HEISENBERG = "heisenberg"


@dataclass(frozen=True)
class GroupCtx:
    """A supported group.

    Use the constructors :meth:`lattice`, :meth:`torus` and
    :meth:`heisenberg` rather than building instances by hand.
    """

    kind: str
    dim: int
    sizes: tuple = ()

    def __post_init__(self):
        if self.kind not in (LATTICE, TORUS, HEISENBERG):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.kind == TORUS:
            if len(self.sizes) != self.dim:
                raise ValueError("torus needs one axis length per dimension")
            if any(int(n) < 1 for n in self.sizes):
                raise ValueError("torus axis lengths must be >= 1")
        if self.kind == HEISENBERG and self.dim != 3:
            raise ValueError("Heisenberg points are (x, y, z) triples")

    @classmethod
    def lattice(cls, d: int) -> "GroupCtx":
        return cls(LATTICE, d)

    @classmethod
    def torus(cls, *sizes: int) -> "GroupCtx":
        if len(sizes) == 1 and isinstance(sizes[0], (tuple, list)):
            sizes = tuple(sizes[0])
        return cls(TORUS, len(sizes), tuple(int(n) for n in sizes))

    @classmethod
    def heisenberg(cls) -> "GroupCtx":
        return cls(HEISENBERG, 3)

    # -- element arithmetic ---------------------------------------------

    @property
    def identity(self) -> Point:
        return (0,) * self.dim

    @property
    def is_finite(self) -> bool:
        return self.kind == TORUS

    @property
    def is_abelian(self) -> bool:
        return self.kind != HEISENBERG

    def order(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self.kind} group is infinite")
        n = 1
        for s in self.sizes:
            n *= s
        return n

    def canon(self, coords: Iterable[int]) -> Point:
        p = tuple(int(c) for c in coords)
        if len(p) != self.dim:
            raise ContextMismatch(f"point {p} has {len(p)} coordinates, group needs {self.dim}")
        if self.kind == TORUS:
            return tuple(c % n for c, n in zip(p, self.sizes))
        return p

    def mul(self, g: Point, h: Point) -> Point:
        if len(g) != self.dim or len(h) != self.dim:
            raise ContextMismatch(f"cannot multiply {g} and {h} in a {self.dim}-dimensional group")
        if self.kind == LATTICE:
            return tuple(a + b for a, b in zip(g, h))
        if self.kind == TORUS:
            return tuple((a + b) % n for a, b, n in zip(g, h, self.sizes))
        x, y, z = g
        u, v, w = h
        return (x + u, y + v, z + w + x * v)

    def inv(self, g: Point) -> Point:
        if len(g) != self.dim:
            raise ContextMismatch(f"point {g} does not belong to a {self.dim}-dimensional group")
        if self.kind == LATTICE:
            return tuple(-a for a in g)
        if self.kind == TORUS:
            return tuple((-a) % n for a, n in zip(g, self.sizes))
        x, y, z = g
        return (-x, -y, -z + x * y)

    def div(self, g: Point, h: Point) -> Point:
        """Return g * h^-1 (the multiplier carrying h to g from the left)."""
        return self.mul(g, self.inv(h))

    def elements(self) -> "FinSet":
        """The whole group as a FinSet (tori only)."""
        if not self.is_finite:
            raise ValueError(f"{self.kind} group is infinite")
        pts = itertools.product(*(range(n) for n in self.sizes))
        return FinSet._trusted(self, pts)

    def describe(self) -> str:
        if self.kind == TORUS:
            return "Z_" + "xZ_".join(str(n) for n in self.sizes)
        if self.kind == LATTICE:
            return f"Z^{self.dim}"
        return "H3(Z)"


class FinSet:
    """Deduplicated finite set of group elements in lexicographic order.

    Supports ``len``, iteration (in canonical order), membership and the set
    operators ``| & - ^``.  Instances are immutable and hashable.
    """

    __slots__ = ("ctx", "elems", "_members")

    def __init__(self, ctx: GroupCtx, points: Iterable[Sequence[int]] = ()):
        canon = ctx.canon
        members = frozenset(canon(p) for p in points)
        self.ctx = ctx
        self._members = members
        self.elems = tuple(sorted(members))

    @classmethod
    def _trusted(cls, ctx: GroupCtx, points: Iterable[Point]) -> "FinSet":
        # points are already canonical tuples
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj._members = frozenset(points)
        obj.elems = tuple(sorted(obj._members))
        return obj

    @classmethod
    def identity_set(cls, ctx: GroupCtx) -> "FinSet":
        return cls._trusted(ctx, [ctx.identity])

    # -- container protocol ---------------------------------------------

    def __len__(self) -> int:
        return len(self.elems)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.elems)

    def __contains__(self, p) -> bool:
        return tuple(p) in self._members

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinSet):
            return NotImplemented
        return self.ctx == other.ctx and self._members == other._members

    def __hash__(self) -> int:
        return hash((self.ctx, self._members))

    def __repr__(self) -> str:
        if len(self.elems) <= 8:
            body = ", ".join(map(str, self.elems))
        else:
            body = ", ".join(map(str, self.elems[:4])) + f", ... ({len(self.elems)} points)"
        return f"FinSet[{self.ctx.describe()}]{{{body}}}"

    @property
    def members(self) -> frozenset:
        return self._members

    def _check(self, other: "FinSet") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx.describe()} vs {other.ctx.describe()}")

    # -- boolean algebra --------------------------------------------------

    def __or__(self, other: "FinSet") -> "FinSet":
        self._check(other)
        return FinSet._trusted(self.ctx, self._members | other._members)

    def __and__(self, other: "FinSet") -> "FinSet":
        self._check(other)
        return FinSet._trusted(self.ctx, self._members & other._members)

    def __sub__(self, other: "FinSet") -> "FinSet":
        self._check(other)
        return FinSet._trusted(self.ctx, self._members - other._members)

    def __xor__(self, other: "FinSet") -> "FinSet":
        self._check(other)
        return FinSet._trusted(self.ctx, self._members ^ other._members)

    union = __or__
    intersection = __and__
    difference = __sub__
    sym_diff = __xor__

    def issubset(self, other: "FinSet") -> bool:
        self._check(other)
        return self._members <= other._members

    def isdisjoint(self, other: "FinSet") -> bool:
        self._check(other)
        return self._members.isdisjoint(other._members)

    # -- group-flavoured operations --------------------------------------

    def product(self, other: "FinSet") -> "FinSet":
        """{k*f : k in self, f in other}; self is the left factor."""
        self._check(other)
        mul = self.ctx.mul
        return FinSet._trusted(self.ctx, {mul(k, f) for k in self.elems for f in other.elems})

    def right_translate(self, g: Point) -> "FinSet":
        mul = self.ctx.mul
        g = self.ctx.canon(g)
        return FinSet._trusted(self.ctx, (mul(f, g) for f in self.elems))

    def left_translate(self, g: Point) -> "FinSet":
        mul = self.ctx.mul
        g = self.ctx.canon(g)
        return FinSet._trusted(self.ctx, (mul(g, f) for f in self.elems))

    def inverse(self) -> "FinSet":
        inv = self.ctx.inv
        return FinSet._trusted(self.ctx, (inv(f) for f in self.elems))

    def power(self, n: int) -> "FinSet":
        """The n-fold product E*E*...*E; power(0) is {e}."""
        if n < 0:
            raise ValueError("power exponent must be >= 0")
        result = FinSet.identity_set(self.ctx)
        for _ in range(n):
            nxt = result.product(self)
            if nxt == result:
                break  # fixed point: further products change nothing
            result = nxt
        return result

    def is_symmetric(self) -> bool:
        return self.inverse() == self


def set_op(which: str, X: FinSet, Y: FinSet | None = None, *, g: Point | None = None,
           n: int | None = None) -> FinSet:
    """Dispatch by name to one of the finite-set operations.

    ``which`` is one of ``product``, ``right_translate``, ``inverse``,
    ``sym_diff`` or ``power``.
    """
    if which == "product":
        return X.product(Y)
    if which == "right_translate":
        return X.right_translate(g)
    if which == "inverse":
        return X.inverse()
    if which == "sym_diff":
        return X ^ Y
    if which == "power":
        return X.power(n)
    raise ValueError(f"unknown set operation {which!r}")


def power_growth(E: FinSet, n_max: int) -> list:
    """Sizes |E^0|, |E^1|, ..., |E^n_max| computed incrementally."""
    sizes = []
    cur = FinSet.identity_set(E.ctx)
    for _ in range(n_max + 1):
        sizes.append(len(cur))
        cur = cur.product(E)
    return sizes


def stabilization_point(E: FinSet, limit: int = 10_000) -> tuple:
    """Smallest n with E^n == E^(n+1), together with E^n.

    On a torus with e in E this is where the powers fill the subgroup
    generated by E.  Raises if the powers are still growing after ``limit``.
    """
    cur = FinSet.identity_set(E.ctx)
    for n in range(limit + 1):
        nxt = cur.product(E)
        if nxt == cur:
            return n, cur
        cur = nxt
    raise RuntimeError(f"powers of E did not stabilize within {limit} steps")


def ball(ctx: GroupCtx, generators: Iterable[Sequence[int]], radius: int) -> FinSet:
    """Word-metric ball: products of at most ``radius`` generators or their inverses."""
    gens = FinSet(ctx, list(generators) + [ctx.identity])
    return (gens | gens.inverse()).power(radius)


def box(ctx: GroupCtx, lows: Sequence[int], highs: Sequence[int]) -> FinSet:
    """Coordinate box prod_i [lows_i, highs_i] (inclusive)."""
    ranges = [range(lo, hi + 1) for lo, hi in zip(lows, highs)]
    return FinSet(ctx, itertools.product(*ranges))


def interval(ctx: GroupCtx, lo: int, hi: int) -> FinSet:
    """Shorthand for a one-dimensional box {lo, ..., hi}."""
    return box(ctx, (lo,), (hi,))
