"""Batch front end: ``comparison-chains <subcommand> --config cfg.json --out dir``.

Exit codes: 0 success, 1 precondition or verdict failure, 2 internal
assertion breach, 3 malformed config.  Every run writes ``report.json``
(stable key order, no timestamps), ``summary.csv`` and ``metadata.json``.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import platform
import random
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema

from . import serialize as ser
from .correction import build_injection, chain_bound, resolve_order, verify_key_hypothesis
from .density import (Window, as_fraction, banach_density, check_inequality, invariance_defect)
from .dyntile import (TargetChoice, default_targets, injection_from_tiling, interval_targets,
                      tiling_from_quasitiling)
from .errors import BoundaryInconclusive, BudgetExceeded, ContextMismatch, PreconditionError, TheoremViolation
from .group import FinSet, GroupCtx, ball, box
from .symbolic import (BlockCode, SubeqCertificate, build_code_table, certificate_from_code, encode,
                       minimal_horizon, verify_certificate)
from .tiling import Quasitiling, build_tiling, check_property, shape_union_E

SUBCOMMANDS = ("density", "tile", "compare", "convert", "verify")

_points = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}
_rational = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^-?\d+(/\d+)?$|^-?\d*\.\d+$"}]}

_setgen = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": ["explicit", "interval", "box", "ball", "periodic", "random", "ref"]}},
    "allOf": [
        {"if": {"properties": {"type": {"const": "explicit"}}},
         "then": {"required": ["points"], "properties": {"points": _points}}},
        {"if": {"properties": {"type": {"const": "interval"}}},
         "then": {"required": ["lo", "hi"],
                  "properties": {"lo": {"type": "integer"}, "hi": {"type": "integer"}}}},
        {"if": {"properties": {"type": {"const": "box"}}},
         "then": {"required": ["lows", "highs"],
                  "properties": {"lows": {"type": "array", "items": {"type": "integer"}},
                                 "highs": {"type": "array", "items": {"type": "integer"}}}}},
        {"if": {"properties": {"type": {"const": "ball"}}},
         "then": {"required": ["radius"],
                  "properties": {"radius": {"type": "integer", "minimum": 0}, "generators": _points}}},
        {"if": {"properties": {"type": {"const": "periodic"}}},
         "then": {"required": ["period", "residues"],
                  "properties": {"period": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                                 "residues": _points}}},
        {"if": {"properties": {"type": {"const": "random"}}},
         "then": {"required": ["seed", "density"],
                  "properties": {"seed": {"type": "integer"},
                                 "density": {"type": "number", "minimum": 0, "maximum": 1},
                                 "exclude": {"type": "array", "items": {"type": "string"}}}}},
        {"if": {"properties": {"type": {"const": "ref"}}},
         "then": {"required": ["name"], "properties": {"name": {"type": "string"}}}},
    ],
}

_tiling = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": ["zd_boxes", "heisenberg_transversal", "explicit"]}},
    "allOf": [
        {"if": {"properties": {"type": {"const": "zd_boxes"}}},
         "then": {"required": ["sides"],
                  "properties": {"sides": {"type": "array", "items": {"type": "integer", "minimum": 1}}}}},
        {"if": {"properties": {"type": {"const": "heisenberg_transversal"}}},
         "then": {"required": ["a", "b"],
                  "properties": {"a": {"type": "integer", "minimum": 1},
                                 "b": {"type": "integer", "minimum": 1}}}},
        {"if": {"properties": {"type": {"const": "explicit"}}},
         "then": {"required": ["shapes", "centers"],
                  "properties": {"shapes": {"type": "array", "items": _points},
                                 "centers": {"type": "array", "items": _points}}}},
    ],
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "group", "window"],
    "properties": {
        "schema_version": {"const": ser.SCHEMA_VERSION},
        "group": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["torus", "lattice", "heisenberg"]},
                "sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                "dim": {"type": "integer", "minimum": 1},
            },
            "allOf": [
                {"if": {"properties": {"kind": {"const": "torus"}}}, "then": {"required": ["sizes"]}},
                {"if": {"properties": {"kind": {"const": "lattice"}}}, "then": {"required": ["dim"]}},
            ],
        },
        "window": {
            "type": "object",
            "required": ["type"],
            "properties": {"type": {"enum": ["torus", "box", "ball"]}},
            "allOf": [
                {"if": {"properties": {"type": {"const": "box"}}},
                 "then": {"required": ["lows", "highs"]}},
                {"if": {"properties": {"type": {"const": "ball"}}},
                 "then": {"required": ["radius"]}},
            ],
        },
        "sets": {"type": "object", "additionalProperties": _setgen},
        "tiling": _tiling,
        "eps": _rational,
        "order": {"oneOf": [_points, {"enum": ["canonical", "reversed"]}]},
        "density": {
            "type": "object",
            "required": ["F"],
            "properties": {
                "F": _setgen,
                "kinds": {"type": "array", "items": {"enum": ["lower", "upper", "advantage"]}},
                "checks": {"type": "array", "items": {
                    "type": "object",
                    "required": ["which"],
                    "properties": {
                        "which": {"enum": ["bdc", "union_bound", "coro"]},
                        "F1": _setgen,
                        "pieces": {"type": "array", "items": {
                            "type": "object", "required": ["A", "B", "g"],
                            "properties": {"A": _setgen, "B": _setgen,
                                           "g": {"type": "array", "items": {"type": "integer"}}}}},
                    },
                    "allOf": [
                        {"if": {"properties": {"which": {"const": "bdc"}}}, "then": {"required": ["F1"]}},
                        {"if": {"properties": {"which": {"const": "union_bound"}}},
                         "then": {"required": ["pieces"]}},
                    ],
                }},
            },
        },
        "properties": {"type": "array", "items": {
            "type": "object",
            "required": ["which"],
            "properties": {"which": {"enum": ["tiling", "disjoint", "invariant", "eps_disjoint",
                                              "alpha_covering"]},
                           "K": _setgen, "F": _setgen, "eps": _rational, "alpha": _rational},
        }},
        "convert": {
            "type": "object",
            "required": ["direction"],
            "properties": {
                "direction": {"enum": ["forward", "converse"]},
                "quasitiling": _tiling,
                "targets": {"type": "object", "properties": {
                    "counts": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "interval": {"type": "boolean"}}},
                "K": _setgen,
                "eps": _rational,
                "injection": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                                         "items": {"type": "array"}}},
            },
        },
        "verify": {
            "type": "object",
            "properties": {
                "certificate": {"type": "object", "required": ["elements", "parts"],
                                "properties": {"elements": _points,
                                               "parts": {"type": "array", "items": _points}}},
                "certificate_file": {"type": "string"},
            },
        },
    },
}


class ConfigError(Exception):
    def __init__(self, where: str, msg: str):
        super().__init__(f"config error at {where or '<root>'}: {msg}")
        self.where = where


def _where(path) -> str:
    return "/".join(str(p) for p in path)


def load_config(path, seed_override: int | None = None) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError("", f"cannot read config: {e}") from None
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        e = max(errors, key=lambda e: len(e.absolute_path))
        raise ConfigError(_where(e.absolute_path), e.message)
    if seed_override is not None:
        _override_seeds(cfg, seed_override)
    cfg["_base"] = str(Path(path).resolve().parent)
    return cfg


def _override_seeds(node, seed):
    if isinstance(node, dict):
        if node.get("type") == "random":
            node["seed"] = seed
        for v in node.values():
            _override_seeds(v, seed)
    elif isinstance(node, list):
        for v in node:
            _override_seeds(v, seed)


# -- building objects from the config --------------------------------------

class Built:
    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.ctx = self._group(cfg["group"])
        self.w = self._window(cfg["window"])
        self.sets = {}
        for name, gen in cfg.get("sets", {}).items():
            self.sets[name] = self.make_set(gen, f"sets/{name}")

    def _group(self, g):
        if g["kind"] == "torus":
            return GroupCtx.torus(*g["sizes"])
        if g["kind"] == "lattice":
            return GroupCtx.lattice(g["dim"])
        return GroupCtx.heisenberg()

    def _window(self, spec):
        ctx = self.ctx
        if spec["type"] == "torus":
            if not ctx.is_finite:
                raise ConfigError("window/type", "torus windows need a torus group")
            return Window.torus(ctx)
        return Window.margin(self.make_set(spec, "window", allow_window=False))

    def _default_gens(self):
        d = self.ctx.dim
        if self.ctx.kind == "heisenberg":
            return [(1, 0, 0), (0, 1, 0)]
        return [tuple(int(i == j) for j in range(d)) for i in range(d)]

    def make_set(self, gen: dict, where: str, allow_window: bool = True) -> FinSet:
        ctx = self.ctx
        t = gen["type"]
        try:
            if t == "explicit":
                return FinSet(ctx, [tuple(p) for p in gen["points"]])
            if t == "interval":
                if ctx.dim != 1:
                    raise ConfigError(where, "interval sets need a one-dimensional group")
                return FinSet(ctx, [(x,) for x in range(gen["lo"], gen["hi"] + 1)])
            if t == "box":
                return box(ctx, gen["lows"], gen["highs"])
            if t == "ball":
                gens = [tuple(g) for g in gen.get("generators", self._default_gens())]
                return ball(ctx, gens, gen["radius"])
            if t == "ref":
                if gen["name"] not in self.sets:
                    raise ConfigError(where + "/name", f"unknown set {gen['name']!r}")
                return self.sets[gen["name"]]
            if not allow_window:
                raise ConfigError(where + "/type", f"{t!r} cannot describe a window")
            if t == "periodic":
                period = gen["period"]
                if len(period) != ctx.dim:
                    raise ConfigError(where + "/period", "need one period per axis")
                res = {tuple(r % p for r, p in zip(rr, period)) for rr in gen["residues"]}
                return FinSet._trusted(ctx, [x for x in self.w.domain
                                             if tuple(c % p for c, p in zip(x, period)) in res])
            if t == "random":
                rng = random.Random(gen["seed"])
                excl = set()
                for name in gen.get("exclude", []):
                    if name not in self.sets:
                        raise ConfigError(where + "/exclude", f"unknown set {name!r}")
                    excl |= self.sets[name].members
                p = gen["density"]
                return FinSet._trusted(ctx, [x for x in self.w.domain
                                             if rng.random() < p and x not in excl])
        except (ContextMismatch, ValueError, TypeError) as e:
            if isinstance(e, PreconditionError):
                raise
            raise ConfigError(where, str(e)) from None
        raise ConfigError(where + "/type", f"unknown set type {t!r}")

    def need(self, key: str):
        if key not in self.cfg:
            raise ConfigError(key, f"'{key}' is required for this subcommand")
        return self.cfg[key]

    def set_named(self, name: str) -> FinSet:
        if name not in self.sets:
            raise ConfigError(f"sets/{name}", f"set {name!r} is required for this subcommand")
        return self.sets[name]

    def tiling(self, spec=None, where="tiling", check=True) -> Quasitiling:
        spec = spec if spec is not None else self.need("tiling")
        try:
            if spec["type"] == "explicit":
                shapes = [FinSet(self.ctx, [tuple(p) for p in s]) for s in spec["shapes"]]
                centers = [FinSet(self.ctx, [tuple(p) for p in c]) for c in spec["centers"]]
                return Quasitiling(shapes, centers, self.w)
            return build_tiling(self.ctx, spec, self.w)
        except (ContextMismatch, ValueError, TypeError) as e:
            if isinstance(e, PreconditionError):
                raise
            raise ConfigError(where, str(e)) from None

    def eps(self, value, where="eps") -> Fraction:
        try:
            return as_fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(where, str(e)) from None


def parse_order(text: str | None):
    """``--order``: a JSON list of points, ``canonical`` or ``reversed``."""
    if text is None or text == "canonical":
        return text
    if text == "reversed":
        return text
    try:
        val = json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError("--order", "expected a JSON list of points, 'canonical' or 'reversed'") from None
    if not isinstance(val, list):
        raise ConfigError("--order", "expected a JSON list of points")
    return [tuple(p) for p in val]


def _order_for(E: FinSet, order):
    if order in (None, "canonical"):
        return None
    if order == "reversed":
        return list(reversed(E.elems))
    return list(order)


# -- subcommands ------------------------------------------------------------

class Outcome:
    def __init__(self):
        self.status = "ok"
        self.report = {}
        self.rows = []           # CSV rows: list of dicts
        self.artifacts = {}      # filename -> jsonable

    def fail(self, status: str):
        if self.status == "ok":
            self.status = status


def cmd_density(b: Built, out: Outcome, order=None):
    d = b.need("density")
    F = b.make_set(d["F"], "density/F")
    B = b.set_named("B")
    A = b.sets.get("A")
    kinds = d.get("kinds", ["lower", "upper"] + (["advantage"] if A is not None else []))
    vals = {}
    for k in kinds:
        rep = banach_density(k, F, B, A if k == "advantage" else None, b.w)
        vals[k] = {"value": rep.value, "witness": list(rep.witness) if rep.witness else None,
                   "translates": rep.translates}
        out.rows.append({"item": f"density_{k}", "value": str(rep.value), "passed": ""})
    checks = []
    if A is None:
        A = FinSet(b.ctx)
    for i, chk in enumerate(d.get("checks", [])):
        which = chk["which"]
        if which == "bdc":
            rep = check_inequality("bdc", F=F, F1=b.make_set(chk["F1"], f"density/checks/{i}/F1"),
                                   B=B, A=A, w=b.w)
        elif which == "coro":
            rep = check_inequality("coro", F=F, B=B, A=A, w=b.w)
        else:
            pieces = [(b.make_set(p["A"], f"density/checks/{i}/pieces/{j}/A"),
                       b.make_set(p["B"], f"density/checks/{i}/pieces/{j}/B"),
                       b.ctx.canon(p["g"])) for j, p in enumerate(chk["pieces"])]
            rep = check_inequality("union_bound", pieces=pieces, w=b.w)
        checks.append({"which": which, "holds": rep.holds, "lhs": rep.lhs, "rhs": rep.rhs,
                       "relation": rep.relation})
        out.rows.append({"item": f"check_{which}", "value": f"{rep.lhs} {rep.relation} {rep.rhs}",
                         "passed": rep.holds})
        if not rep.holds:
            out.fail("inequality-violated")
    out.report.update({"densities": vals, "checks": checks, "F_size": len(F)})


def cmd_tile(b: Built, out: Outcome, order=None):
    T = b.tiling()
    props = b.cfg.get("properties", [{"which": "tiling"}])
    results = []
    for i, p in enumerate(props):
        kw = {}
        if "K" in p:
            kw["K"] = b.make_set(p["K"], f"properties/{i}/K")
        if "F" in p:
            kw["F"] = b.make_set(p["F"], f"properties/{i}/F")
        if "eps" in p:
            kw["eps"] = b.eps(p["eps"], f"properties/{i}/eps")
        if "alpha" in p:
            kw["alpha"] = b.eps(p["alpha"], f"properties/{i}/alpha")
        try:
            rep = check_property(T, p["which"], b.w, **kw)
        except TypeError as e:
            raise ConfigError(f"properties/{i}", f"missing parameter for {p['which']}: {e}") from None
        results.append({"which": p["which"], "passed": rep.passed, "witnesses": rep.witnesses,
                        "inconclusive": rep.inconclusive})
        out.rows.append({"item": p["which"], "value": "", "passed": rep.passed})
        if not rep.passed:
            out.fail("property-failed")
    out.report.update({"tiles": len(T), "shapes": len(T.shapes), "properties": results,
                       "E_size": len(shape_union_E(T))})
    out.artifacts["tiling.json"] = ser.quasitiling_json(T)


def _horizon(E: FinSet, exponent: int, w: Window):
    """E^exponent, stopping early once the power is fixed or no longer fits the window."""
    H = FinSet.identity_set(E.ctx)
    for j in range(1, exponent + 1):
        nxt = H.product(E)
        if nxt == H:
            return H, exponent, False
        if not w.exact and not len(w.core(nxt)):
            return H, j - 1, True
        H = nxt
    return H, exponent, False


def compare_pipeline(A: FinSet, B: FinSet, T: Quasitiling, eps: Fraction, w: Window, order=None) -> dict:
    """Hypothesis, injection, block code at the full horizon, certificate.

    Returns a dict of jsonable pieces; raises the library's errors unchanged.
    """
    hyp = verify_key_hypothesis(A, B, T, eps)
    res = build_injection(A, B, T, eps, w, order=_order_for(shape_union_E(T), order))
    phi = res.injection
    E = shape_union_E(T)
    exponent = res.stats["horizon_exponent"]
    H, used, truncated = _horizon(E, exponent, w)
    c = encode(A, B, w)
    code = build_code_table([(c, phi)], H)
    if not isinstance(code, BlockCode):
        raise TheoremViolation(f"block code conflict at horizon E^{used}: {code.first} vs {code.second}")
    j_min, min_code = minimal_horizon([(c, phi)], E, max_power=used)
    if w.exact:
        cert = certificate_from_code(code, c)
        source = "block-code"
    else:
        groups = {}
        for a, m in phi.assignment.items():
            groups.setdefault(m, []).append(a)
        elems = tuple(sorted(groups))
        cert = SubeqCertificate(elems, tuple(FinSet._trusted(A.ctx, groups[g]) for g in elems))
        source = "assignment"
    vrep = verify_certificate(cert, A, B)
    if not vrep.passed:
        raise TheoremViolation(f"certificate failed: {vrep.reason} {vrep.witness}")
    return {
        "hypothesis": hyp,
        "result": res,
        "code": code,
        "horizon_power": used,
        "horizon_truncated": truncated,
        "minimal_horizon": j_min,
        "certificate": cert,
        "certificate_source": source,
        "certificate_verdict": vrep,
    }


def cmd_compare(b: Built, out: Outcome, order=None):
    A, B = b.set_named("A"), b.set_named("B")
    T = b.tiling()
    eps = b.eps(b.need("eps"))
    order = order if order is not None else b.cfg.get("order")
    hyp = verify_key_hypothesis(A, B, T, eps)
    out.report["hypothesis"] = {
        "passed": hyp.passed,
        "tiles": [{"center": list(t.tile.center), "shape": t.tile.shape, "A": t.a_count,
                   "B": t.b_count, "size": t.size, "ok": t.ok} for t in hyp.tiles],
    }
    for t in hyp.tiles:
        out.rows.append({"item": f"tile {list(t.tile.center)}", "value": f"{t.b_count}-{t.a_count}",
                         "passed": t.ok})
    r = compare_pipeline(A, B, T, eps, b.w, order)
    res = r["result"]
    stats = dict(res.stats)
    out.report.update({
        "stats": stats,
        "horizon_power": r["horizon_power"],
        "horizon_truncated": r["horizon_truncated"],
        "minimal_conflict_free_horizon": r["minimal_horizon"],
        "code_entries": len(r["code"].table),
        "code_skipped": r["code"].skipped,
        "certificate_source": r["certificate_source"],
        "certificate_valid": r["certificate_verdict"].passed,
        "injection_size": len(res.injection),
    })
    for k in ("N", "m", "rounds", "max_chain_length", "horizon_exponent"):
        out.rows.append({"item": k, "value": stats[k], "passed": ""})
    out.artifacts["injection.json"] = ser.injection_json(res.injection)
    out.artifacts["certificate.json"] = r["certificate"].to_json()
    out.artifacts["code.json"] = r["code"].to_json()
    out.artifacts["tiling.json"] = ser.quasitiling_json(T)


def cmd_convert(b: Built, out: Outcome, order=None):
    conv = b.need("convert")
    if conv["direction"] == "forward":
        if "quasitiling" not in conv:
            raise ConfigError("convert/quasitiling", "forward conversion needs a quasitiling")
        Tq = b.tiling(conv["quasitiling"], "convert/quasitiling")
        K = b.make_set(conv["K"], "convert/K") if "K" in conv else None
        eps = b.eps(conv["eps"], "convert/eps") if "eps" in conv else None
        tspec = conv.get("targets", {})
        if tspec.get("interval"):
            if K is None or eps is None:
                raise ConfigError("convert/targets", "interval mode needs K and eps")
            delta = Fraction(len(b.w.domain - Tq.union()), len(b.w.domain))
            targets = interval_targets(Tq, K, eps, delta)
        elif "counts" in tspec:
            targets = default_targets(Tq, tspec["counts"])
        else:
            raise ConfigError("convert/targets", "give target counts or interval mode")
        inj = None
        if "injection" in conv:
            inj = {b.ctx.canon(a): b.ctx.canon(t) for a, t in conv["injection"]}
        res = tiling_from_quasitiling(Tq, targets, b.w, injection=inj, K=K, eps=eps)
        out.report.update({"direction": "forward", "stats": res.stats,
                           "added": [{"center": list(t.center), "shape": t.shape, "points": v}
                                     for t, v in sorted(res.added.items(), key=lambda kv: (kv[0].shape, kv[0].center))]})
        out.rows.append({"item": "uncovered", "value": res.stats["uncovered"], "passed": ""})
        out.rows.append({"item": "max_added", "value": res.stats["max_added"], "passed": ""})
        if res.stats.get("invariance_violations"):
            if res.stats.get("hypotheses_met"):
                raise TheoremViolation("invariance audit failed although the hypotheses hold")
        out.artifacts["tiling.json"] = ser.quasitiling_json(res.tiling)
        out.artifacts["injection.json"] = ser.injection_json(res.injection)
    else:
        A, B = b.set_named("A"), b.set_named("B")
        T = b.tiling()
        res = injection_from_tiling(encode(A, B, b.w), T)
        out.report.update({"direction": "converse", "stats": res.stats,
                           "certificate_elements": [list(g) for g in res.certificate.elements]})
        out.rows.append({"item": "parts", "value": res.stats["parts"], "passed": True})
        out.artifacts["injection.json"] = ser.injection_json(res.injection)
        out.artifacts["certificate.json"] = res.certificate.to_json()


def cmd_verify(b: Built, out: Outcome, order=None):
    v = b.need("verify")
    A, B = b.set_named("A"), b.set_named("B")
    if "certificate" in v:
        data = v["certificate"]
    elif "certificate_file" in v:
        try:
            data = json.loads((Path(b.cfg["_base"]) / v["certificate_file"]).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError("verify/certificate_file", str(e)) from None
    else:
        raise ConfigError("verify", "give a certificate or certificate_file")
    ctx = b.ctx
    try:
        cert = SubeqCertificate(tuple(ctx.canon(g) for g in data["elements"]),
                                tuple(FinSet(ctx, [tuple(p) for p in part]) for part in data["parts"]))
    except (KeyError, ValueError, TypeError, ContextMismatch) as e:
        raise ConfigError("verify/certificate", str(e)) from None
    rep = verify_certificate(cert, A, B)
    out.report.update({"valid": rep.passed, "reason": rep.reason,
                       "witness": list(rep.witness) if rep.witness else None})
    out.rows.append({"item": "certificate", "value": rep.reason, "passed": rep.passed})
    if not rep.passed:
        out.fail("certificate-invalid")


COMMANDS = {"density": cmd_density, "tile": cmd_tile, "compare": cmd_compare,
            "convert": cmd_convert, "verify": cmd_verify}


# -- driver -----------------------------------------------------------------

def _write(out_dir: Path, sub: str, cfg_path: str, outcome: Outcome, code: int, started: str):
    out_dir.mkdir(parents=True, exist_ok=True)
    report = {"schema_version": ser.SCHEMA_VERSION, "subcommand": sub, "status": outcome.status,
              "exit_code": code, **outcome.report}
    (out_dir / "report.json").write_text(ser.dumps(report))
    for name, obj in sorted(outcome.artifacts.items()):
        (out_dir / name).write_text(ser.dumps(obj))
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=["item", "value", "passed"])
        wr.writeheader()
        for row in outcome.rows:
            wr.writerow(row)
    meta = {"started": started, "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "config": str(Path(cfg_path).resolve()), "python": platform.python_version()}
    (out_dir / "metadata.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def run(subcommand: str, config: str, out: str, seed_override=None, order=None) -> int:
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()
    outcome = Outcome()
    try:
        cfg = load_config(config, seed_override)
        order = parse_order(order)
        built = Built(cfg)
        COMMANDS[subcommand](built, outcome, order)
        code = 0 if outcome.status == "ok" else 1
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        outcome.status = "config-error"
        outcome.report["error"] = str(e)
        code = 3
    except BoundaryInconclusive as e:
        outcome.status = "boundary-inconclusive"
        outcome.report["error"] = str(e)
        code = 1
    except (PreconditionError, BudgetExceeded) as e:
        outcome.status = "precondition-failed"
        outcome.report["error"] = str(e)
        w = getattr(e, "witness", None)
        if w is not None:
            outcome.report["witness"] = ser.to_jsonable(w)
        code = 1
    except (TheoremViolation, AssertionError) as e:
        outcome.status = "internal-assertion"
        outcome.report["error"] = str(e)
        code = 2
    if code:
        print(f"{subcommand}: {outcome.status}: {outcome.report.get('error', '')}", file=sys.stderr)
    _write(Path(out), subcommand, config, outcome, code, started)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="comparison-chains",
                                description="Densities, tilings and comparison injections on tori and windows.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="experiment config (JSON)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed-override", type=int, default=None, help="replace every random seed")
    p.add_argument("--order", default=None,
                   help="E enumeration: JSON list of points, 'canonical' or 'reversed'")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.subcommand, args.config, args.out, args.seed_override, args.order)


if __name__ == "__main__":
    sys.exit(main())
