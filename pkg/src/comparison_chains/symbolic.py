"""Symbolic configurations, block codes and subequivalence certificates.

A configuration labels every point of a window.  With the alphabet
{0, 1, 2} it encodes a pair of disjoint sets: label 1 marks A, label 2
marks B.  The shift acts on the right, ``h(x)_g = x_{g h}``, so the pattern
of ``x`` seen from a point ``a`` through a horizon ``F`` is the tuple
``(x_{f a})_{f in F}`` with F in canonical order.

A block code maps such patterns to multipliers; the injection it determines
sends ``a`` to ``code(pattern at a) * a``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .density import Window
from .errors import ContextMismatch, PreconditionError
from .group import FinSet, Point, stabilization_point

A_LABEL = 1
B_LABEL = 2


class Configuration:
    """Total labelling ``window.domain -> alphabet``."""

    __slots__ = ("window", "labels")

    def __init__(self, window: Window, labels: Mapping[Point, Hashable]):
        missing = [p for p in window.domain if p not in labels]
        if missing:
            raise PreconditionError(f"configuration is undefined at {missing[0]}", witness=missing[0])
        self.window = window
        self.labels = {p: labels[p] for p in window.domain}

    @property
    def ctx(self):
        return self.window.ctx

    def __getitem__(self, p: Point):
        return self.labels[p]

    def __eq__(self, other):
        return (isinstance(other, Configuration) and self.window == other.window
                and self.labels == other.labels)

    def pattern_at(self, a: Point, F: FinSet):
        """Labels on F*a in canonical F order, or None if F*a leaves the window."""
        mul = self.ctx.mul
        labels = self.labels
        out = []
        for f in F.elems:
            p = mul(f, a)
            if p not in labels:
                return None
            out.append(labels[p])
        return tuple(out)

    def points_labelled(self, symbol) -> FinSet:
        return FinSet._trusted(self.ctx, [p for p, s in self.labels.items() if s == symbol])


def encode(A: FinSet, B: FinSet, w: Window) -> Configuration:
    """The {0,1,2}-configuration with 1 on A, 2 on B and 0 elsewhere."""
    if not A.isdisjoint(B):
        raise PreconditionError("A and B must be disjoint")
    if not (A.issubset(w.domain) and B.issubset(w.domain)):
        raise PreconditionError("A and B must lie inside the window")
    labels = dict.fromkeys(w.domain.elems, 0)
    labels.update(dict.fromkeys(A.elems, A_LABEL))
    labels.update(dict.fromkeys(B.elems, B_LABEL))
    return Configuration(w, labels)


def extract_sets(c: Configuration) -> tuple:
    """(A, B) = (label-1 points, label-2 points)."""
    bad = {s for s in c.labels.values() if s not in (0, 1, 2)}
    if bad:
        raise PreconditionError(f"labels outside {{0,1,2}}: {sorted(map(str, bad))}")
    return c.points_labelled(A_LABEL), c.points_labelled(B_LABEL)


def translate_configuration(c: Configuration, h: Point) -> Configuration:
    """The shifted configuration h(x), x_{g h} at g (torus windows only)."""
    if not c.window.exact:
        raise PreconditionError("shifting is only defined on a whole torus")
    mul = c.ctx.mul
    return Configuration(c.window, {g: c.labels[mul(g, h)] for g in c.window.domain})


def _assignment(inj) -> Mapping:
    return inj.assignment if hasattr(inj, "assignment") else inj


# -- block codes ----------------------------------------------------------

@dataclass
class BlockCode:
    """Pattern -> multiplier table over a fixed horizon."""

    horizon: FinSet
    table: dict
    skipped: int = 0

    def multiplier(self, c: Configuration, a: Point) -> Point:
        pat = c.pattern_at(a, self.horizon)
        if pat is None:
            raise PreconditionError(f"horizon around {a} leaves the window", witness=a)
        try:
            return self.table[pat]
        except KeyError:
            raise PreconditionError(f"code has no entry for the pattern at {a}",
                                    witness=pat) from None

    def to_json(self) -> dict:
        return {
            "horizon": [list(f) for f in self.horizon],
            "entries": sorted([json.dumps(list(p)), list(m)] for p, m in self.table.items()),
            "skipped": self.skipped,
        }


@dataclass
class ConflictReport:
    """Two matched points with equal patterns but different multipliers."""

    pattern: tuple
    first: tuple   # (corpus index, point, multiplier)
    second: tuple
    skipped: int = 0


def build_code_table(corpus: Iterable[tuple], F: FinSet):
    """Fold (configuration, injection) samples into a block code.

    Returns a :class:`BlockCode`, or a :class:`ConflictReport` as soon as one
    pattern is seen with two different multipliers.  Matched points whose
    pattern leaves the window are skipped and counted.
    """
    table = {}
    origin = {}
    skipped = 0
    for idx, (c, inj) in enumerate(corpus):
        if c.ctx != F.ctx:
            raise ContextMismatch("horizon and configuration live in different groups")
        assign = _assignment(inj)
        A = [p for p, s in c.labels.items() if _is_a(s)]
        missing = [a for a in A if a not in assign]
        if missing:
            raise PreconditionError(f"injection is undefined at {missing[0]}", witness=missing[0])
        for a in sorted(A):
            pat = c.pattern_at(a, F)
            if pat is None:
                skipped += 1
                continue
            mult = assign[a]
            prev = table.get(pat)
            if prev is None:
                table[pat] = mult
                origin[pat] = (idx, a, mult)
            elif prev != mult:
                return ConflictReport(pat, origin[pat], (idx, a, mult), skipped)
    return BlockCode(F, table, skipped)


def _is_a(symbol) -> bool:
    # plain {0,1,2} labels, or tuples whose first entry is the {0,1,2} symbol
    if isinstance(symbol, tuple):
        return symbol[0] == A_LABEL
    return symbol == A_LABEL


def _is_b(symbol) -> bool:
    if isinstance(symbol, tuple):
        return symbol[0] == B_LABEL
    return symbol == B_LABEL


def minimal_horizon(corpus: list, E: FinSet, max_power: int | None = None) -> tuple:
    """First conflict-free horizon among E^0, E^1, ...

    Returns ``(j, code)``.  The search stops once the powers of E stabilize
    (or at ``max_power``); ``(None, last_conflict)`` if nothing works.
    """
    if max_power is None:
        max_power, _ = stabilization_point(E)
    H = FinSet.identity_set(E.ctx)
    result = None
    for j in range(max_power + 1):
        result = build_code_table(corpus, H)
        if isinstance(result, BlockCode):
            return j, result
        H = H.product(E)
    return None, result


# -- certificates ---------------------------------------------------------

@dataclass
class SubeqCertificate:
    """Partition of A into parts, part i moved into B by left multiplication with elements[i]."""

    elements: tuple
    parts: tuple

    def to_json(self) -> dict:
        return {"elements": [list(g) for g in self.elements],
                "parts": [[list(p) for p in part] for part in self.parts]}


def certificate_from_code(code: BlockCode, c: Configuration) -> SubeqCertificate:
    """Group the A-points of c by the multiplier the code assigns them."""
    groups = {}
    for a in sorted(p for p, s in c.labels.items() if _is_a(s)):
        groups.setdefault(code.multiplier(c, a), []).append(a)
    elements = tuple(sorted(groups))
    parts = tuple(FinSet._trusted(c.ctx, groups[g]) for g in elements)
    return SubeqCertificate(elements, parts)


@dataclass
class CertificateReport:
    passed: bool
    reason: str = ""
    witness: tuple | None = None


def verify_certificate(cert: SubeqCertificate, A: FinSet, B: FinSet) -> CertificateReport:
    """Parts partition A and the moved parts are disjoint subsets of B."""
    if len(cert.elements) != len(cert.parts):
        return CertificateReport(False, "elements and parts differ in number")
    if len(set(cert.elements)) != len(cert.elements):
        return CertificateReport(False, "elements are not distinct")
    owner = {}
    for i, part in enumerate(cert.parts):
        for a in part:
            if a in owner:
                return CertificateReport(False, "not a partition: parts overlap", (owner[a], i))
            owner[a] = i
    if set(owner) != set(A.members):
        stray = sorted(set(owner) ^ set(A.members))[0]
        return CertificateReport(False, "not a partition of A", (stray,))
    mul = A.ctx.mul
    Bm = B.members
    hit = {}
    for i, (g, part) in enumerate(zip(cert.elements, cert.parts)):
        for a in part:
            b = mul(g, a)
            if b not in Bm:
                return CertificateReport(False, "image leaves B", (a, b))
            if b in hit:
                return CertificateReport(False, "images collide", (hit[b], a))
            hit[b] = a
    return CertificateReport(True)


def tiled_configuration(c: Configuration, T) -> Configuration:
    """Pair each label with the shape symbol of the tiling (0 off centers).

    Shape symbols are 1-based shape indices.  The pair alphabet is what a
    code needs to see the tile a point belongs to.
    """
    marks = {}
    for i, C in enumerate(T.centers):
        for x in C:
            marks[x] = i + 1
    return Configuration(c.window, {p: (s, marks.get(p, 0)) for p, s in c.labels.items()})


def sets_of(c: Configuration) -> tuple:
    """(A, B) for plain or paired labels."""
    A = [p for p, s in c.labels.items() if _is_a(s)]
    B = [p for p, s in c.labels.items() if _is_b(s)]
    return FinSet._trusted(c.ctx, A), FinSet._trusted(c.ctx, B)
