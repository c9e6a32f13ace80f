"""JSON encodings for the library's objects.

Everything here returns plain dicts/lists with deterministic ordering, so
``json.dumps(..., sort_keys=True)`` gives byte-stable output.  Fractions are
written as ``{"fraction": "7/24", "decimal": 0.2916...}``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .group import FinSet, GroupCtx

SCHEMA_VERSION = 1


def fraction_json(x: Fraction) -> dict:
    x = Fraction(x)
    return {"fraction": f"{x.numerator}/{x.denominator}", "decimal": float(x)}


def fraction_from_json(d) -> Fraction:
    if isinstance(d, dict):
        return Fraction(d["fraction"])
    return Fraction(d)


def group_json(ctx: GroupCtx) -> dict:
    return {"kind": ctx.kind, "dim": ctx.dim, "sizes": list(ctx.sizes) if ctx.sizes else None}


def group_from_json(d: dict) -> GroupCtx:
    kind = d["kind"]
    if kind == "torus":
        return GroupCtx.torus(*d["sizes"])
    if kind == "lattice":
        return GroupCtx.lattice(d["dim"])
    if kind == "heisenberg":
        return GroupCtx.heisenberg()
    raise ValueError(f"unknown group kind {kind!r}")


def points_json(S) -> list:
    return [list(p) for p in S]


def finset_from_json(ctx: GroupCtx, pts) -> FinSet:
    return FinSet(ctx, [tuple(p) for p in pts])


def quasitiling_json(T) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "group": group_json(T.ctx),
        "shapes": [points_json(S) for S in T.shapes],
        "centers": [points_json(C) for C in T.centers],
    }


def quasitiling_from_json(d: dict, w=None):
    from .tiling import Quasitiling
    ctx = group_from_json(d["group"])
    shapes = [finset_from_json(ctx, s) for s in d["shapes"]]
    centers = [finset_from_json(ctx, c) for c in d["centers"]]
    return Quasitiling(shapes, centers, w)


def injection_json(phi) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "group": group_json(phi.ctx),
        "E": points_json(phi.E),
        "assignment": [[list(a), list(phi.assignment[a])] for a in sorted(phi.assignment)],
    }


def injection_from_json(d: dict, A: FinSet, B: FinSet, w=None):
    from .correction import PartialInjection
    ctx = A.ctx
    E = [ctx.canon(tuple(e)) for e in d["E"]]
    assignment = {ctx.canon(tuple(a)): ctx.canon(tuple(m)) for a, m in d["assignment"]}
    return PartialInjection(A, B, E, assignment, w)


def to_jsonable(x: Any):
    """Recursively convert Fractions, FinSets, tuples and dataclass-ish objects."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Fraction):
        return fraction_json(x)
    if isinstance(x, FinSet):
        return points_json(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    if hasattr(x, "__dataclass_fields__"):
        return {k: to_jsonable(getattr(x, k)) for k in x.__dataclass_fields__}
    return str(x)


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"
