"""Correction chains and the injection builder.

Given disjoint finite sets A, B and an ordered multiplier set E, the builder
starts from the greedy partial injection and repeatedly corrects it along
all *minimal* correction chains of bounded length until it is total on A.

Terminology
-----------
chain        ``(a1, b1, ..., an, bn)`` of distinct points, ``b_i in E a_i`` and
             ``b_i = phi(a_{i+1})`` for ``i < n``
correction   a chain with ``a1`` outside the domain and ``bn`` outside the range
name         ``(p1, q1, ..., pn)`` with ``p_i = b_i a_i^-1``, ``q_i = b_i a_{i+1}^-1``
order        names compare by length first, then lexicographically with respect
             to the enumeration of E
minimal      collides (shares a point) with no chain of strictly smaller name
"""

from __future__ import annotations

import collections
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .density import Window, as_fraction
from .errors import (BoundaryInconclusive, BudgetExceeded, ContextMismatch,
                     PreconditionError, TheoremViolation)
from .group import FinSet, GroupCtx, Point, stabilization_point
from .tiling import Quasitiling, shape_union_E

DEFAULT_CHAIN_BUDGET = 2_000_000


class PartialInjection:
    """``a -> c*a`` on a subset of A, with every multiplier c in E.

    ``E`` is kept as an ordered tuple: the order drives both the greedy scan
    and the name order.  Instances are treated as immutable.
    """

    __slots__ = ("ctx", "A", "B", "E", "assignment", "_image", "_E_set", "_nbrs", "_window")

    def __init__(self, A: FinSet, B: FinSet, E: Sequence[Point], assignment: Mapping[Point, Point],
                 window: Window | None = None):
        ctx = A.ctx
        if B.ctx != ctx:
            raise ContextMismatch("A and B live in different groups")
        self.ctx = ctx
        self.A = A
        self.B = B
        self.E = tuple(ctx.canon(e) for e in E)
        self._E_set = frozenset(self.E)
        if len(self._E_set) != len(self.E):
            raise ValueError("E enumeration has repeated elements")
        self.assignment = dict(sorted(assignment.items()))
        self._window = window
        self._nbrs = {}
        image = {}
        mul = ctx.mul
        for a, c in self.assignment.items():
            if a not in A:
                raise PreconditionError(f"{a} is not in A", witness=a)
            if c not in self._E_set:
                raise PreconditionError(f"multiplier {c} at {a} is not in E", witness=a)
            b = mul(c, a)
            if b not in B:
                raise PreconditionError(f"{a} is sent outside B", witness=a)
            if b in image:
                raise PreconditionError(f"{image[b]} and {a} share the image {b}",
                                        witness=(image[b], a))
            image[b] = a
        self._image = image

    # -- basic views --------------------------------------------------------

    def __call__(self, a: Point) -> Point:
        return self.ctx.mul(self.assignment[a], a)

    def __len__(self):
        return len(self.assignment)

    def __eq__(self, other):
        return (isinstance(other, PartialInjection) and self.A == other.A and self.B == other.B
                and self.E == other.E and self.assignment == other.assignment)

    @property
    def domain(self) -> FinSet:
        return FinSet._trusted(self.ctx, self.assignment)

    @property
    def range(self) -> FinSet:
        return FinSet._trusted(self.ctx, self._image)

    def preimage(self, b: Point):
        return self._image.get(b)

    def is_total(self) -> bool:
        return len(self.assignment) == len(self.A)

    def unmatched(self) -> list:
        return [a for a in self.A.elems if a not in self.assignment]

    def with_assignment(self, assignment) -> "PartialInjection":
        return PartialInjection(self.A, self.B, self.E, assignment, self._window)

    def neighbours(self, a: Point) -> tuple:
        """B-points of E*a, in E order (the dashed edges out of a)."""
        got = self._nbrs.get(a)
        if got is None:
            mul = self.ctx.mul
            Bm = self.B.members
            got = tuple(b for b in (mul(e, a) for e in self.E) if b in Bm)
            self._nbrs[a] = got
        return got

    def touches_boundary(self, a: Point) -> bool:
        w = self._window
        if w is None or w.exact:
            return False
        mul = self.ctx.mul
        dom = w.domain.members
        return any(mul(e, a) not in dom for e in self.E)

    def to_json(self) -> dict:
        return {"assignments": [[list(a), list(c)] for a, c in self.assignment.items()],
                "E": [list(e) for e in self.E]}


def empty_injection(A, B, E, window=None) -> PartialInjection:
    return PartialInjection(A, B, E, {}, window)


# -- greedy first approximation -------------------------------------------

def greedy_initial(A: FinSet, B: FinSet, E: Sequence[Point], w: Window | None = None) -> PartialInjection:
    """Scan E in order; at step i send each unassigned a to g_i*a when that
    point of B has not been taken in an earlier step."""
    if not A.isdisjoint(B):
        raise PreconditionError("A and B must be disjoint")
    ctx = A.ctx
    mul = ctx.mul
    Bm = B.members
    used = set()
    assignment = {}
    for g in (ctx.canon(e) for e in E):
        step = {}
        for a in A.elems:
            if a in assignment:
                continue
            b = mul(g, a)
            if b in Bm and b not in used:
                step[a] = b
        for a, b in step.items():
            assignment[a] = g
            used.add(b)
    return PartialInjection(A, B, E, assignment, w)


# -- chains ---------------------------------------------------------------

@dataclass(frozen=True)
class Chain:
    points: tuple
    boundary: bool = False

    @property
    def pairs(self) -> int:
        return len(self.points) // 2

    def __len__(self):
        return len(self.points)

    @property
    def a_points(self) -> tuple:
        return self.points[0::2]

    @property
    def b_points(self) -> tuple:
        return self.points[1::2]


def validate_chain(phi: PartialInjection, C: Chain, correction: bool = True) -> None:
    """Raise PreconditionError unless C is a (phi, E)-chain (a correction chain by default)."""
    pts = C.points
    if not pts or len(pts) % 2:
        raise PreconditionError("a chain has positive even length")
    if len(set(pts)) != len(pts):
        raise PreconditionError("chain points are not distinct")
    mul, div = phi.ctx.mul, phi.ctx.div
    a_s, b_s = C.a_points, C.b_points
    for i, (a, b) in enumerate(zip(a_s, b_s)):
        if a not in phi.A or b not in phi.B:
            raise PreconditionError(f"chain step {i} leaves A x B")
        if div(b, a) not in phi._E_set:
            raise PreconditionError(f"b_{i+1} is not in E a_{i+1}")
        if i + 1 < len(a_s):
            nxt = a_s[i + 1]
            if phi.assignment.get(nxt) is None or mul(phi.assignment[nxt], nxt) != b:
                raise PreconditionError(f"b_{i+1} is not phi(a_{i+2})")
    if correction:
        if a_s[0] in phi.assignment:
            raise PreconditionError("correction chains start outside the domain")
        if phi.preimage(b_s[-1]) is not None:
            raise PreconditionError("correction chains end outside the range")


def name_of(C: Chain, ctx: GroupCtx) -> tuple:
    """(p1, q1, ..., pn) with p_i = b_i a_i^-1 and q_i = b_i a_{i+1}^-1."""
    div = ctx.div
    a_s, b_s = C.a_points, C.b_points
    out = []
    for i, (a, b) in enumerate(zip(a_s, b_s)):
        out.append(div(b, a))
        if i + 1 < len(a_s):
            out.append(div(b, a_s[i + 1]))
    return tuple(out)


class NameOrder:
    """Length-first, then lexicographic order on names, induced by an enumeration of E."""

    def __init__(self, E: Sequence[Point]):
        self.E = tuple(E)
        self.rank = {e: i for i, e in enumerate(self.E)}

    def key(self, name: Sequence[Point]) -> tuple:
        return (len(name), tuple(self.rank[e] for e in name))

    def compare(self, n1, n2) -> int:
        k1, k2 = self.key(n1), self.key(n2)
        return (k1 > k2) - (k1 < k2)


def compare_names(n1, n2, E: Sequence[Point]) -> int:
    return NameOrder(E).compare(n1, n2)


def _distance_to_end(phi: PartialInjection) -> dict:
    """Fewest pairs needed to reach an unmatched B-point from each A-point.

    Multi-source BFS on the reversed chain graph; a lower bound on the
    remaining length of any chain passing through a given A-point.
    """
    rev = collections.defaultdict(list)
    dist = {}
    queue = collections.deque()
    image = phi._image
    for a in phi.A.elems:
        for b in phi.neighbours(a):
            rev[b].append(a)
            if b not in image and a not in dist:
                dist[a] = 1
                queue.append(a)
    while queue:
        a = queue.popleft()
        if a not in phi.assignment:
            continue  # chains never pass through unmatched A-points after the start
        for a2 in rev[phi(a)]:
            if a2 not in dist:
                dist[a2] = dist[a] + 1
                queue.append(a2)
    return dist


class _Enumerator:
    """Depth-first enumeration of correction chains with distance pruning."""

    def __init__(self, phi: PartialInjection, budget: int):
        self.phi = phi
        self.dist = _distance_to_end(phi)
        self.budget = budget
        self.count = 0

    def chains_from(self, a1: Point, exact_pairs: int | None, max_pairs: int) -> list:
        out = []
        d0 = self.dist.get(a1)
        if d0 is None or d0 > max_pairs:
            return out
        phi = self.phi
        image = phi._image
        dist = self.dist
        path = [a1]
        visited = {a1}
        boundary = [phi.touches_boundary(a1)]
        lo = exact_pairs if exact_pairs is not None else 1

        def rec(a, used):
            # used = pairs in path once a's b is chosen
            for b in phi.neighbours(a):
                if b in visited:
                    continue
                a_next = image.get(b)
                if a_next is None:
                    if used >= lo:
                        self.count += 1
                        if self.count > self.budget:
                            raise BudgetExceeded(f"more than {self.budget} correction chains")
                        out.append(Chain(tuple(path) + (b,), any(boundary)))
                    continue
                if used >= max_pairs or a_next in visited:
                    continue
                if used + dist.get(a_next, max_pairs + 1) > max_pairs:
                    continue
                path.extend((b, a_next))
                visited.update((b, a_next))
                boundary.append(phi.touches_boundary(a_next))
                rec(a_next, used + 1)
                boundary.pop()
                visited.difference_update((b, a_next))
                del path[-2:]

        rec(a1, 1)
        return out


def find_chains(phi: PartialInjection, maxlen: int, start: Point | None = None,
                budget: int = DEFAULT_CHAIN_BUDGET):
    """Correction chains of length at most ``maxlen``.

    With ``start`` return the shortest correction chain from that point (the
    smallest-named one among the shortest), or ``None``.  Without ``start``
    return every correction chain of length <= maxlen, sorted by name.
    """
    if maxlen % 2:
        raise ValueError("maxlen must be even")
    max_pairs = maxlen // 2
    en = _Enumerator(phi, budget)
    order = NameOrder(phi.E)
    if start is not None:
        start = phi.ctx.canon(start)
        if start in phi.assignment or start not in phi.A:
            raise PreconditionError("chains start at unassigned points of A")
        d = en.dist.get(start)
        if d is None or d > max_pairs:
            return None
        found = en.chains_from(start, d, d)
        return min(found, key=lambda C: order.key(name_of(C, phi.ctx)))
    chains = []
    for a1 in phi.unmatched():
        chains.extend(en.chains_from(a1, None, max_pairs))
    chains.sort(key=lambda C: (order.key(name_of(C, phi.ctx)), C.points))
    return chains


def _select_minimal(chains: list, order: NameOrder, ctx) -> list:
    """Chains sharing no point with any chain of strictly smaller name."""
    keyed = sorted(((order.key(name_of(C, ctx)), C) for C in chains), key=lambda t: (t[0], t[1].points))
    earlier = set()
    minimal = []
    i = 0
    while i < len(keyed):
        j = i
        while j < len(keyed) and keyed[j][0] == keyed[i][0]:
            j += 1
        group = [C for _, C in keyed[i:j]]
        for C in group:
            if earlier.isdisjoint(C.points):
                minimal.append(C)
        for C in group:
            earlier.update(C.points)
        i = j
    return minimal


def assert_non_colliding(chains: Iterable[Chain]) -> None:
    seen = {}
    for k, C in enumerate(chains):
        for p in C.points:
            if p in seen:
                raise TheoremViolation(f"minimal chains {seen[p]} and {k} collide at {p}")
            seen[p] = k


@dataclass
class MinimalChainSearch:
    minimal: list
    examined: int       # number of correction chains enumerated
    levels: int         # longest chain length (in pairs) that had to be enumerated
    boundary: bool


def minimal_chain_search(phi: PartialInjection, maxlen: int,
                         budget: int = DEFAULT_CHAIN_BUDGET) -> MinimalChainSearch:
    """Minimal correction chains of length <= maxlen, enumerated level by level.

    Level n holds all correction chains with exactly n pairs.  Once every
    unassigned start has a chain at some level <= n, each longer chain shares
    its start with a shorter one and cannot be minimal, so the enumeration
    stops there; the selected set is the same as for a full enumeration up to
    ``maxlen``.
    """
    if maxlen % 2:
        raise ValueError("maxlen must be even")
    max_pairs = maxlen // 2
    en = _Enumerator(phi, budget)
    starts = [a for a in phi.unmatched() if a in en.dist and en.dist[a] <= max_pairs]
    uncovered = set(starts)
    chains = []
    level = 0
    for n in range(1, max_pairs + 1):
        if not uncovered:
            break
        level = n
        for a1 in starts:
            if en.dist[a1] > n:
                continue
            got = en.chains_from(a1, n, n)
            if got:
                uncovered.discard(a1)
                chains.extend(got)
    order = NameOrder(phi.E)
    minimal = _select_minimal(chains, order, phi.ctx)
    assert_non_colliding(minimal)
    return MinimalChainSearch(minimal, len(chains), level, any(C.boundary for C in chains))


def minimal_chains(phi: PartialInjection, maxlen: int, budget: int = DEFAULT_CHAIN_BUDGET) -> list:
    """Minimal correction chains of length at most ``maxlen``, sorted by name."""
    return minimal_chain_search(phi, maxlen, budget).minimal


def minimal_from_list(chains: Sequence[Chain], phi: PartialInjection) -> list:
    """Minimal members of an explicit, exhaustive chain list."""
    out = _select_minimal(list(chains), NameOrder(phi.E), phi.ctx)
    assert_non_colliding(out)
    return out


def splice_shorter(C1: Chain, C2: Chain, phi: PartialInjection) -> Chain:
    """Shorter colliding chain for two equal-name colliding chains.

    Follows C1 up to the first shared (b, a) pair and continues along C2.
    """
    if name_of(C1, phi.ctx) != name_of(C2, phi.ctx) or C1 == C2:
        raise PreconditionError("need two different chains with the same name")
    pos2 = {}
    for j in range(C2.pairs - 1):
        pos2[(C2.points[2 * j + 1], C2.points[2 * j + 2])] = j
    hits = []
    for i in range(C1.pairs - 1):
        key = (C1.points[2 * i + 1], C1.points[2 * i + 2])
        if key in pos2:
            hits.append((i, pos2[key]))
    if not hits:
        raise PreconditionError("chains do not collide in an interior pair")
    i0 = min(min(i, j) for i, j in hits)
    # make the smaller index belong to the first chain
    for i, j in hits:
        if i == i0:
            first, second, jj = C1, C2, j
            break
        if j == i0:
            first, second, jj = C2, C1, i
            break
    head = first.points[: 2 * i0 + 3]   # a1 .. b_{i0}, a_{i0+1}
    tail = second.points[2 * jj + 3:]   # b'_{j+1} ...
    out = Chain(head + tail, first.boundary or second.boundary)
    validate_chain(phi, out)
    return out


def correct_along(phi: PartialInjection, C: Chain) -> PartialInjection:
    """phi^C: the dashed edges of C become the map, the solid ones are dropped."""
    validate_chain(phi, C)
    div = phi.ctx.div
    new = dict(phi.assignment)
    for a, b in zip(C.a_points, C.b_points):
        new[a] = div(b, a)
    out = phi.with_assignment(new)
    if len(out) != len(phi) + 1:
        raise TheoremViolation("a correction must add exactly one domain point")
    return out


def correct_simultaneously(phi: PartialInjection, chains: Sequence[Chain]) -> PartialInjection:
    """Apply corrections along pairwise non-colliding chains in one step."""
    assert_non_colliding(chains)
    div = phi.ctx.div
    new = dict(phi.assignment)
    for C in chains:
        validate_chain(phi, C)
        for a, b in zip(C.a_points, C.b_points):
            new[a] = div(b, a)
    out = phi.with_assignment(new)
    if len(out) != len(phi) + len(chains):
        raise TheoremViolation("simultaneous corrections lost or duplicated points")
    return out


# -- the chain-length bound -------------------------------------------------

@dataclass
class ChainBound:
    N: int
    growth: list          # [(n, |(E^2)^n|)] for n = 1 .. last examined
    n_cap: int
    saturated: bool       # True when the growth reached its final value (finite group)


def chain_bound(E: FinSet, eps, ctx: GroupCtx | None = None, cap: int = 64) -> ChainBound:
    """Smallest N with |(E^2)^n| < (1+eps)^n for every n >= N.

    The comparison is done exactly in rationals (it is the same as
    log|(E^2)^n| / n < log(1+eps)).  On a torus the growth saturates, after
    which the condition is monotone in n and the answer is exact.  Otherwise
    the condition is checked on [N, cap] only.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    ctx = ctx or E.ctx
    if ctx.identity not in E or not E.is_symmetric():
        raise PreconditionError("E must be symmetric and contain the identity")
    E2 = E.product(E)
    base = 1 + eps
    growth = []
    cur = E2
    n = 1
    if ctx.is_finite:
        sat_n, _ = stabilization_point(E2)
        sat_n = max(sat_n, 1)
        final = None
        while True:
            growth.append((n, len(cur)))
            if n >= sat_n and len(cur) < base ** n:
                final = n
                break
            if n >= sat_n:
                # saturated: jump straight to the first n where the constant size wins
                size = len(cur)
                m = n
                while not size < base ** m:
                    m += 1
                for k in range(n + 1, m + 1):
                    growth.append((k, size))
                final = m
                break
            cur = cur.product(E2)
            n += 1
        n_cap, saturated = final, True
    else:
        while n <= cap:
            growth.append((n, len(cur)))
            if n < cap:
                cur = cur.product(E2)
            n += 1
        n_cap, saturated = cap, False
        if not growth[-1][1] < base ** cap:
            raise BudgetExceeded(f"growth condition still fails at n = {cap}: {growth}")
    N = n_cap
    for k, size in reversed(growth):
        if size < base ** k:
            N = k
        else:
            break
    return ChainBound(max(N, 1), growth, n_cap, saturated)


def compute_chain_bound_N(E: FinSet, eps, ctx: GroupCtx | None = None, cap: int = 64) -> int:
    return chain_bound(E, eps, ctx, cap).N


# -- the key hypothesis -----------------------------------------------------

@dataclass
class TileCount:
    tile: object
    a_count: int
    b_count: int
    size: int
    ok: bool


@dataclass
class KeyHypothesisReport:
    passed: bool
    tiles: list
    eps: Fraction

    @property
    def failing(self) -> list:
        return [t for t in self.tiles if not t.ok]


def verify_key_hypothesis(A: FinSet, B: FinSet, T: Quasitiling, eps) -> KeyHypothesisReport:
    """|B n T| - |A n T| > eps |T| for every tile (strict)."""
    eps = as_fraction(eps)
    Am, Bm = A.members, B.members
    rows = []
    for tid, pts in T.tiles:
        na = sum(1 for p in pts if p in Am)
        nb = sum(1 for p in pts if p in Bm)
        rows.append(TileCount(tid, na, nb, len(pts), nb - na > eps * len(pts)))
    return KeyHypothesisReport(all(r.ok for r in rows), rows, eps)


# -- the full pipeline ------------------------------------------------------

@dataclass
class InjectionResult:
    injection: PartialInjection
    stats: dict = field(default_factory=dict)
    rounds: list = field(default_factory=list)   # per round: list of applied chains


def resolve_order(E: FinSet, order=None) -> tuple:
    """Enumeration of E: canonical by default, or an explicit permutation of E."""
    if order is None:
        return E.elems
    seq = tuple(E.ctx.canon(p) for p in order)
    if sorted(seq) != list(E.elems):
        raise PreconditionError("order must be a permutation of E")
    return seq


def run_corrections(phi: PartialInjection, max_pairs: int | None, max_rounds: int,
                    budget: int = DEFAULT_CHAIN_BUDGET) -> InjectionResult:
    """Round loop: correct along all minimal chains until phi is total.

    ``max_pairs=None`` allows chains of any length (bounded by |A| pairs).
    Stops early, without raising, if a round finds no correction chain.
    """
    rounds = []
    hist = collections.Counter()
    examined = 0
    boundary = False
    limit = max_pairs if max_pairs is not None else max(len(phi.A), 1)
    while not phi.is_total() and len(rounds) < max_rounds:
        search = minimal_chain_search(phi, 2 * limit, budget)
        examined += search.examined
        boundary |= search.boundary
        if not search.minimal:
            break
        before = len(phi)
        phi = correct_simultaneously(phi, search.minimal)
        if len(phi) <= before:
            raise TheoremViolation("a correction round did not enlarge the domain")
        rounds.append(search.minimal)
        hist.update(len(C) for C in search.minimal)
    stats = {
        "rounds": len(rounds),
        "chains_applied": sum(len(r) for r in rounds),
        "chains_examined": examined,
        "max_chain_length": max(hist) if hist else 0,
        "chain_length_histogram": {str(k): hist[k] for k in sorted(hist)},
        "boundary_inconclusive": boundary,
        "total": phi.is_total(),
    }
    return InjectionResult(phi, stats, rounds)


def build_injection(A: FinSet, B: FinSet, T: Quasitiling, eps, w: Window, *, order=None,
                    max_rounds: int | None = None, budget: int = DEFAULT_CHAIN_BUDGET) -> InjectionResult:
    """Total injection A -> B with multipliers in E = union of S S^-1.

    Steps: verify the per-tile hypothesis, compute N, run the greedy scan, then
    correct along minimal chains of length <= 2N until total.
    """
    if not A.isdisjoint(B):
        raise PreconditionError("A and B must be disjoint")
    hyp = verify_key_hypothesis(A, B, T, eps)
    if not hyp.passed:
        bad = hyp.failing[0]
        raise PreconditionError(
            f"tile {bad.tile} has |B|-|A| = {bad.b_count - bad.a_count}, "
            f"needs more than {hyp.eps * bad.size}", witness=bad)
    E = shape_union_E(T)
    seq = resolve_order(E, order)
    bound = chain_bound(E, eps, w.ctx)
    N = bound.N
    phi = greedy_initial(A, B, seq, w)
    greedy_size = len(phi)
    cap = max_rounds if max_rounds is not None else len(w.domain) + 1
    res = run_corrections(phi, N, cap, budget)
    k = len(E)
    m = res.stats["rounds"] + 1   # index of the final map phi_m
    res.stats.update({
        "N": N,
        "k": k,
        "m": m,
        "horizon_exponent": k + 4 * N * m,
        "round_cap": cap,
        "greedy_domain": greedy_size,
        "A": len(A),
        "B": len(B),
        "E_order": [list(e) for e in seq],
    })
    if not res.injection.is_total():
        stuck = res.injection.unmatched()
        if w.exact:
            raise TheoremViolation(
                f"injection stuck with {len(stuck)} unmatched points despite the hypothesis: {stuck[:10]}")
        raise BoundaryInconclusive(f"{len(stuck)} points left unmatched in margin mode",
                                   witness=stuck)
    if any(len(C) > 2 * N for r in res.rounds for C in r):
        raise TheoremViolation("applied a chain longer than 2N")
    return res
