"""Reference implementations used as ground truth in the tests.

Nothing here imports from the correction module: the point of these
functions is to reach the same answers by a different road.

* :func:`max_matching`     -- Hopcroft-Karp on the graph a -- b iff b in E*a
* :func:`hall_deficiency`  -- max |W| - |N(W)| by subset enumeration, or via
  the matching and Konig's alternating-reachability argument
* :func:`brute_chain_check` -- all correction chains by naive depth-first
  search straight from the definition
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .errors import BudgetExceeded, PreconditionError
from .group import FinSet

INF = float("inf")


@dataclass(frozen=True)
class MatchInstance:
    A: FinSet
    B: FinSet
    E: FinSet

    def __post_init__(self):
        if not self.A.isdisjoint(self.B):
            raise PreconditionError("A and B must be disjoint")

    def adjacency(self) -> dict:
        mul = self.A.ctx.mul
        Bm = self.B.members
        return {a: sorted({mul(e, a) for e in self.E} & Bm) for a in self.A}


@dataclass
class Matching:
    size: int
    matching: dict   # a -> b


def max_matching(inst: MatchInstance) -> Matching:
    """Maximum matching by Hopcroft-Karp (BFS layering + DFS augmentation)."""
    adj = inst.adjacency()
    left = list(inst.A)
    match_l = {a: None for a in left}
    match_r = {}
    dist = {}

    def bfs():
        q = deque()
        for a in left:
            if match_l[a] is None:
                dist[a] = 0
                q.append(a)
            else:
                dist[a] = INF
        found = INF
        while q:
            a = q.popleft()
            if dist[a] >= found:
                continue
            for b in adj[a]:
                a2 = match_r.get(b)
                if a2 is None:
                    found = min(found, dist[a] + 1)
                elif dist[a2] == INF:
                    dist[a2] = dist[a] + 1
                    q.append(a2)
        return found != INF

    def dfs(a):
        for b in adj[a]:
            a2 = match_r.get(b)
            if a2 is None or (dist[a2] == dist[a] + 1 and dfs(a2)):
                match_l[a] = b
                match_r[b] = a
                return True
        dist[a] = INF
        return False

    while bfs():
        for a in left:
            if match_l[a] is None:
                dfs(a)
    pairs = {a: b for a, b in match_l.items() if b is not None}
    return Matching(len(pairs), pairs)


@dataclass
class HallReport:
    deficiency: int
    witness: FinSet | None
    method: str


def hall_deficiency(inst: MatchInstance, max_subset_bits: int = 16, method: str = "auto") -> HallReport:
    """max over W in A of |W| - |N(W)| (>= 0), with a maximizing W.

    ``method`` is ``"subsets"``, ``"matching"`` or ``"auto"`` (subsets when
    |A| <= max_subset_bits).
    """
    ctx = inst.A.ctx
    adj = inst.adjacency()
    left = list(inst.A)
    if method == "subsets" or (method == "auto" and len(left) <= max_subset_bits):
        if len(left) > max_subset_bits and method == "subsets":
            raise BudgetExceeded(f"|A| = {len(left)} is too large for subset enumeration")
        best, best_w = 0, ()
        for r in range(1, len(left) + 1):
            for W in combinations(left, r):
                nb = set()
                for a in W:
                    nb.update(adj[a])
                d = len(W) - len(nb)
                if d > best:
                    best, best_w = d, W
        return HallReport(best, FinSet._trusted(ctx, best_w), "subsets")
    m = max_matching(inst)
    # Konig: A-points reachable from unmatched A-points by alternating paths
    match_r = {b: a for a, b in m.matching.items()}
    seen = set(a for a in left if a not in m.matching)
    q = deque(seen)
    while q:
        a = q.popleft()
        for b in adj[a]:
            a2 = match_r.get(b)
            if a2 is not None and a2 not in seen:
                seen.add(a2)
                q.append(a2)
    return HallReport(len(left) - m.size, FinSet._trusted(ctx, seen), "matching")


def brute_chain_check(phi, maxlen: int, budget: int = 1_000_000) -> list:
    """All correction chains of length <= maxlen by naive search.

    ``phi`` only needs ``A``, ``B``, ``E`` and ``assignment`` attributes.
    Chains come back as point tuples, sorted.
    """
    if maxlen <= 0:
        return []
    ctx = phi.A.ctx
    mul, inv = ctx.mul, ctx.inv
    E = set(phi.E)
    assign = dict(phi.assignment)
    image = {mul(c, a): a for a, c in assign.items()}
    A = list(phi.A)
    B = list(phi.B)
    found = []

    def grow(seq):
        if len(found) > budget:
            raise BudgetExceeded("too many chains")
        a = seq[-1]
        for b in B:
            if b in seq or mul(b, inv(a)) not in E:
                continue
            chain = seq + (b,)
            if b not in image:
                found.append(chain)
                continue
            if len(chain) + 2 > maxlen:
                continue
            nxt = [x for x in A if x in assign and mul(assign[x], x) == b]
            for x in nxt:
                if x not in chain:
                    grow(chain + (x,))

    for a1 in A:
        if a1 not in assign:
            grow((a1,))
    return sorted(found)
