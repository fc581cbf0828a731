"""Verification runner behind the fockmod console script.

Reads a scenario config (JSON, schema fockmod/1), builds the model
context it describes, runs the named checks and emits a report.  JSON
reports are byte-identical for identical config and seed: keys are
sorted, residuals are serialized through repr so they round-trip to the
exact double, and no timing data enters the payload (the text format
prints the wall time instead).

Exit codes: 0 all checks passed, 1 at least one check failed (the
report is still written), 2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
import zlib
from importlib import resources

from . import __version__
from .weyl import GridSpec, State, TestFunctionPair, WeylElement
from .bimodule import SECTOR_MINUS, SECTOR_PLUS, ModuleVector
from . import models
from .models import (
    CheckResult,
    ModelContext,
    SIGMA_KINDS,
    build_context,
    profile_array,
)

SCHEMA = "fockmod/1"
BUNDLED = (
    "delta_locality",
    "bump_freeness",
    "poisson_nonlocal",
    "lebesgue_gauge",
    "car_suite",
)


class ConfigError(Exception):
    """Anything wrong with a scenario config or its use."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


# ---------------------------------------------------------------------------
# config loading and scenario assembly


def load_config(spec: str) -> dict:
    """Load a config from a path or a bundled scenario name."""
    if os.path.exists(spec):
        try:
            with open(spec, "r", encoding="utf-8") as fh:
                return json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{spec}: invalid JSON ({e})") from e
    name = spec[:-5] if spec.endswith(".json") else spec
    if name in BUNDLED:
        data = resources.files("fockmod.configs").joinpath(name + ".json").read_text()
        return json.loads(data)
    raise ConfigError(
        f"config {spec!r} is neither a file nor a bundled scenario "
        f"(bundled: {', '.join(BUNDLED)})"
    )


def _parse_grid(d: dict) -> GridSpec:
    _require(isinstance(d, dict), "grid: expected an object")
    try:
        return GridSpec(
            dimension=int(d.get("dimension", 1)),
            points_per_axis=int(d.get("points", 16)),
            spacing=float(d.get("spacing", 1.0)),
            components=int(d.get("components", 1)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"grid: {e}") from e


def _parse_profile(grid: GridSpec, spec, what: str):
    _require(isinstance(spec, dict), f"{what}: profile must be an object")
    try:
        return profile_array(grid, spec)
    except (KeyError, ValueError, IndexError) as e:
        raise ConfigError(f"{what}: {e}") from e


def _parse_generators(grid: GridSpec, lst) -> list[TestFunctionPair]:
    _require(isinstance(lst, list) and lst, "generators: need a nonempty list")
    out = []
    for i, g in enumerate(lst):
        _require(isinstance(g, dict) and "s0" in g, f"generators[{i}]: need s0")
        s0 = _parse_profile(grid, g["s0"], f"generators[{i}].s0")
        s1 = _parse_profile(grid, g.get("s1", {"shape": "zero"}), f"generators[{i}].s1")
        out.append(TestFunctionPair(grid, s0, s1))
    return out


_SECTORS = {"+": SECTOR_PLUS, "-": SECTOR_MINUS}


def build_scenario(config: dict):
    """Context plus named plain module vectors from a validated config."""
    _require(isinstance(config, dict), "config: expected a JSON object")
    _require(
        config.get("schema") == SCHEMA,
        f"config: schema must be {SCHEMA!r}, got {config.get('schema')!r}",
    )
    grid = _parse_grid(config.get("grid", {}))
    sigma = config.get("sigma")
    _require(isinstance(sigma, dict) and "kind" in sigma, "sigma: need an object with kind")
    kind = sigma["kind"]
    _require(kind in SIGMA_KINDS, f"sigma.kind: {kind!r} not in {SIGMA_KINDS}")
    radius = sigma.get("radius")
    if kind == "bump":
        _require(
            isinstance(radius, (int, float)) and radius > 0,
            "sigma.radius: bump needs a positive radius",
        )
        radius = float(radius)
    state = config.get("state", "tracial")
    _require(state in State.KINDS, f"state: {state!r} not in {State.KINDS}")
    truncation = int(config.get("truncation", 3))
    _require(1 <= truncation <= 4, "truncation: expected 1..4 at desk scale")
    gen_pairs = _parse_generators(grid, config.get("generators"))
    try:
        ctx = build_context(kind, grid, gen_pairs, state, truncation, radius)
    except ValueError as e:
        raise ConfigError(f"model construction failed: {e}") from e
    vectors: dict[str, ModuleVector] = {}
    for name, vs in (config.get("vectors") or {}).items():
        _require(isinstance(vs, dict), f"vectors.{name}: expected an object")
        sector = _SECTORS.get(vs.get("sector", "+"))
        _require(sector is not None, f"vectors.{name}.sector: use '+' or '-'")
        comp = int(vs.get("component", 0))
        _require(0 <= comp < grid.components, f"vectors.{name}.component out of range")
        prof = _parse_profile(grid, vs.get("profile", {}), f"vectors.{name}.profile")
        vectors[name] = models.plus_vector(ctx.module, prof, comp, sector)
    ctx.vectors = vectors
    return ctx


def _vector(ctx: ModelContext, name, where: str) -> ModuleVector:
    _require(isinstance(name, str) and name in ctx.vectors, f"{where}: unknown vector {name!r}")
    return ctx.vectors[name]


def _fspec(ctx: ModelContext, spec, where: str) -> ModuleVector:
    """Module vector from [[vector, exponents], ...] term lists."""
    _require(isinstance(spec, list) and spec, f"{where}: expected a nonempty term list")
    m = len(ctx.gens)
    total = None
    for j, term in enumerate(spec):
        _require(
            isinstance(term, list) and len(term) == 2,
            f"{where}[{j}]: expected [vector, exponents]",
        )
        vec = _vector(ctx, term[0], f"{where}[{j}]")
        exps = term[1]
        _require(
            isinstance(exps, list) and len(exps) == m and all(isinstance(e, int) for e in exps),
            f"{where}[{j}]: exponents must be {m} integers",
        )
        coeff = WeylElement.monomial(ctx.gens, tuple(exps))
        part = ModuleVector(ctx.module, {b: coeff * a for b, a in vec.entries.items()})
        total = part if total is None else total + part
    return total


def _check_seed(seed: int, name: str, ordinal: int) -> int:
    return zlib.crc32(f"{seed}:{name}:{ordinal}".encode())


# ---------------------------------------------------------------------------
# check dispatch


def _pairs(ctx, params, key, where, expect=None):
    out = []
    for i, pair in enumerate(params.get(key, [])):
        _require(
            isinstance(pair, list) and len(pair) == 2,
            f"{where}.{key}[{i}]: expected [f, g]",
        )
        f = _fspec(ctx, pair[0], f"{where}.{key}[{i}][0]")
        g = _fspec(ctx, pair[1], f"{where}.{key}[{i}][1]")
        out.append((f, g) if expect is None else (f, g, expect))
    return out


def _vec_gen_pairs(ctx, params, key, where):
    out = []
    for i, pair in enumerate(params.get(key, [])):
        _require(
            isinstance(pair, list) and len(pair) == 2 and isinstance(pair[1], int),
            f"{where}.{key}[{i}]: expected [vector, generator]",
        )
        _require(0 <= pair[1] < len(ctx.gens), f"{where}.{key}[{i}]: generator index out of range")
        out.append((_vector(ctx, pair[0], f"{where}.{key}[{i}]"), pair[1]))
    return out


def _observables(ctx, params, where):
    specs = []
    for i, ob in enumerate(params.get("observables", [])):
        _require(isinstance(ob, dict), f"{where}.observables[{i}]: expected an object")
        k = ob.get("generator")
        if k is None:
            s = WeylElement.unit(ctx.gens)
        else:
            _require(
                isinstance(k, int) and 0 <= k < len(ctx.gens),
                f"{where}.observables[{i}].generator out of range",
            )
            s = WeylElement.monomial(ctx.gens, ctx.gens.unit(k))
        w1 = _vector(ctx, ob.get("w1"), f"{where}.observables[{i}].w1")
        w2 = _vector(ctx, ob.get("w2"), f"{where}.observables[{i}].w2")
        specs.append((s, w1, w2))
    return specs


def _run_weyl(ctx, params, seed, tol):
    return models.check_weyl_exactness(
        ctx.gens, seed, int(params.get("cases", 200)), tol or 1e-14
    )


def _run_gram(ctx, params, seed, tol):
    return models.check_gram_positivity(
        ctx.gens, seed, int(params.get("size", 8)), tol or 1e-10
    )


def _run_car(ctx, params, seed, tol):
    pairs = _pairs(ctx, params, "free", "car", True) + _pairs(
        ctx, params, "nonfree", "car", False
    )
    _require(bool(pairs), "car: no pairs given")
    return models.check_car(ctx, pairs, tol or 1e-10)


def _run_adjointness(ctx, params, seed, tol):
    return models.check_adjointness(ctx, seed, int(params.get("cases", 100)), tol or 1e-10)


def _run_covariance(ctx, params, seed, tol):
    return models.check_covariance(ctx, seed, int(params.get("cases", 100)), tol or 1e-12)


def _run_norm(ctx, params, seed, tol):
    return models.check_norm_recovery(ctx, seed, int(params.get("cases", 20)), tol or 1e-8)


def _run_nonfock(ctx, params, seed, tol):
    return models.check_nonfock(ctx)


def _run_pauli(ctx, params, seed, tol):
    return models.check_pauli(ctx, tol=tol or 1e-12)


def _run_dirac_adjoint(ctx, params, seed, tol):
    return models.check_dirac_adjoint(ctx, seed, int(params.get("cases", 10)), tol or 1e-12)


def _run_relative_locality(ctx, params, seed, tol):
    return models.check_relative_locality(
        ctx,
        _vec_gen_pairs(ctx, params, "local", "relative_locality"),
        _vec_gen_pairs(ctx, params, "witness", "relative_locality"),
        tol or 1e-12,
    )


def _run_bilinear(ctx, params, seed, tol):
    def triples(key):
        out = []
        for i, t in enumerate(params.get(key, [])):
            _require(
                isinstance(t, list) and len(t) == 3 and isinstance(t[0], int),
                f"bilinear_locality.{key}[{i}]: expected [generator, w1, w2]",
            )
            _require(0 <= t[0] < len(ctx.gens), f"bilinear_locality.{key}[{i}]: generator out of range")
            out.append(
                (
                    t[0],
                    _vector(ctx, t[1], f"bilinear_locality.{key}[{i}]"),
                    _vector(ctx, t[2], f"bilinear_locality.{key}[{i}]"),
                )
            )
        return out

    return models.check_bilinear_locality(
        ctx, triples("commuting"), triples("witness"), tol or 1e-10
    )


def _run_anticom_model(ctx, params, seed, tol):
    return models.check_anticommutator_model(
        ctx, _pairs(ctx, params, "pairs", "anticommutator_model"), tol or 1e-10
    )


def _run_observable_net(ctx, params, seed, tol):
    specs = _observables(ctx, params, "observable_net")
    disjoint = []
    for i, p in enumerate(params.get("disjoint", [])):
        _require(
            isinstance(p, list)
            and len(p) == 2
            and all(isinstance(x, int) and 0 <= x < len(specs) for x in p),
            f"observable_net.disjoint[{i}]: expected a valid index pair",
        )
        disjoint.append((p[0], p[1]))
    return models.check_observable_net(ctx, specs, disjoint, tol or 1e-10)


def _run_gauge(ctx, params, seed, tol):
    angles = params.get("angles", [0.7, 2.4])
    _require(
        isinstance(angles, list) and all(isinstance(a, (int, float)) for a in angles),
        "gauge_invariance.angles: expected numbers",
    )
    return models.check_gauge_invariance(
        ctx, _observables(ctx, params, "gauge_invariance"), angles
    )


def _run_cov_phase(ctx, params, seed, tol):
    return models.check_covariance_phase(
        ctx, _vec_gen_pairs(ctx, params, "pairs", "covariance_phase"), tol or 1e-12
    )


def _run_neutral(ctx, params, seed, tol):
    return models.check_neutral_commutant(
        ctx, _vec_gen_pairs(ctx, params, "pairs", "neutral_commutant"), tol or 1e-12
    )


def _run_freeness(ctx, params, seed, tol):
    return models.check_mutual_freeness(
        ctx,
        _pairs(ctx, params, "free", "mutual_freeness"),
        _pairs(ctx, params, "nonfree", "mutual_freeness"),
    )


_CHECKS = {
    "weyl_exactness": _run_weyl,
    "gram_positivity": _run_gram,
    "car": _run_car,
    "adjointness": _run_adjointness,
    "covariance": _run_covariance,
    "norm_recovery": _run_norm,
    "nonfock": _run_nonfock,
    "pauli": _run_pauli,
    "dirac_adjoint": _run_dirac_adjoint,
    "relative_locality": _run_relative_locality,
    "bilinear_locality": _run_bilinear,
    "anticommutator_model": _run_anticom_model,
    "observable_net": _run_observable_net,
    "gauge_invariance": _run_gauge,
    "covariance_phase": _run_cov_phase,
    "neutral_commutant": _run_neutral,
    "mutual_freeness": _run_freeness,
}


# ---------------------------------------------------------------------------
# report assembly


def _sanitize(obj):
    """JSON-safe copy; floats stay floats, complex becomes repr text."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, complex):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_sanitize(v) for v in obj)
    return repr(obj)


def _json_check(cr: CheckResult) -> dict:
    return {
        "name": cr.name,
        "status": cr.status,
        "residuals": {k: repr(float(v)) for k, v in cr.residuals.items()},
        "tolerances": {k: repr(float(v)) for k, v in cr.tolerance.items()},
        "witness": _sanitize(cr.witness),
        "details": _sanitize(cr.details),
    }


def _config_digest(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def run_config(
    config: dict,
    seed: int | None = None,
    truncation: int | None = None,
    tolerance: float | None = None,
) -> dict:
    """Run one scenario and return its serialized record."""
    config = dict(config)
    if seed is not None:
        config["seed"] = int(seed)
    if truncation is not None:
        config["truncation"] = int(truncation)
    base_seed = int(config.get("seed", 0))
    ctx = build_scenario(config)
    items = config.get("checks")
    _require(isinstance(items, list) and items, "checks: need a nonempty list")
    records = []
    failed = 0
    for ordinal, item in enumerate(items):
        _require(isinstance(item, dict) and "check" in item, f"checks[{ordinal}]: need a check name")
        cname = item["check"]
        _require(cname in _CHECKS, f"checks[{ordinal}]: unknown check {cname!r}")
        cr = _CHECKS[cname](ctx, item, _check_seed(base_seed, cname, ordinal), tolerance)
        records.append(_json_check(cr))
        failed += 0 if cr.passed else 1
    return {
        "name": config.get("name", "scenario"),
        "config": {
            "digest": _config_digest(config),
            "grid": config.get("grid", {}),
            "seed": base_seed,
            "sigma": config.get("sigma"),
            "state": config.get("state", "tracial"),
            "truncation": config.get("truncation", 3),
        },
        "checks": records,
        "summary": {
            "failed": failed,
            "passed": len(records) - failed,
            "status": "pass" if failed == 0 else "fail",
            "total": len(records),
        },
    }


def assemble_report(runs: list[dict], grid: GridSpec) -> dict:
    failed = sum(r["summary"]["failed"] for r in runs)
    total = sum(r["summary"]["total"] for r in runs)
    return {
        "schema": SCHEMA,
        "tool": {"name": "fockmod", "version": __version__},
        "conventions": _sanitize(models.conventions(grid)),
        "runs": runs,
        "summary": {
            "failed": failed,
            "passed": total - failed,
            "status": "pass" if failed == 0 else "fail",
            "total": total,
        },
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def report_text(report: dict, elapsed: float) -> str:
    lines = []
    tool = report["tool"]
    lines.append(f"{tool['name']} {tool['version']}  schema {report['schema']}")
    for run in report["runs"]:
        cfg = run["config"]
        sigma = cfg.get("sigma") or {}
        lines.append("")
        lines.append(
            f"run {run['name']}  (sigma={sigma.get('kind')}, state={cfg['state']}, "
            f"truncation={cfg['truncation']}, seed={cfg['seed']})"
        )
        for c in run["checks"]:
            tag = "PASS" if c["status"] == "pass" else "FAIL"
            parts = []
            for k in sorted(c["residuals"]):
                val = float(c["residuals"][k])
                tol = c["tolerances"].get(k)
                parts.append(f"{k}={val:.3g}" + (f" (tol {float(tol):g})" if tol else ""))
            lines.append(f"  [{tag}] {c['name']:<22} {'; '.join(parts)}".rstrip())
            if c["status"] != "pass" and c.get("witness"):
                lines.append(f"         witness: {c['witness']}")
    s = report["summary"]
    lines.append("")
    lines.append(
        f"summary: {s['total']} checks, {s['passed']} passed, {s['failed']} failed"
        f"  [{s['status'].upper()}]"
    )
    lines.append(f"elapsed: {elapsed:.2f} s")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# built-in seeded CAR batteries


def _point(center: int) -> dict:
    return {"shape": "point", "center": center, "amplitude": 1.0}


def _box(center: int, width: float, amp: float) -> dict:
    return {"shape": "box", "center": center, "width": width, "amplitude": amp}


def _values(points: int, entries: dict[int, float]) -> dict:
    vals = [0.0] * points
    for i, v in entries.items():
        vals[i] = v
    return {"shape": "values", "values": vals}


_CAR_TABLE = {
    "delta": {
        "radius": None,
        "generators": [
            {"s0": _box(2, 2.0, 1.1), "s1": _point(2) | {"amplitude": 0.7}},
            {"s0": _box(12, 2.0, 0.9), "s1": _point(12) | {"amplitude": -0.5}},
        ],
        "safe": (5, 6, 7, 8, 15),
        "groups": ((0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (-1, 1)),
        "count": 13,
        "nonfree_vectors": {"nfA": _point(2), "nfB": _point(3), "nfC": _point(12)},
        "nonfree": [
            [[["nfA", [1, 0]]], [["nfA", [0, 0]]]],
            [[["nfC", [0, 1]]], [["nfC", [0, 0]]]],
            [[["nfA", [1, 0]]], [["nfB", [0, 0]]]],
        ],
        "pauli": True,
    },
    "bump": {
        "radius": 2.0,
        "generators": [
            {"s0": _box(2, 2.0, 1.2)},
            {"s0": _box(12, 2.0, 0.8)},
        ],
        "safe": (6, 7, 8),
        "groups": ((0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (-1, 1)),
        "count": 13,
        "nonfree_vectors": {"nfA": _point(2), "nfB": _point(4), "nfC": _point(12)},
        "nonfree": [
            [[["nfA", [1, 0]]], [["nfA", [0, 0]]]],
            [[["nfB", [1, 0]]], [["nfB", [0, 0]]]],
            [[["nfC", [0, 1]]], [["nfC", [0, 0]]]],
        ],
        "pauli": True,
    },
    "poisson": {
        "radius": None,
        "generators": [
            {"s0": _values(16, {2: 1.0, 3: -2.0, 4: 1.0})},
            {"s0": _values(16, {10: 1.0, 11: -2.0, 12: 1.0})},
            {"s0": _point(7)},
        ],
        "safe": (0, 6, 7, 8, 15),
        "groups": (
            (0, 0, 0),
            (1, 0, 0),
            (0, 1, 0),
            (1, 1, 0),
            (2, 0, 0),
            (0, 2, 0),
            (-1, 1, 0),
        ),
        "count": 12,
        "nonfree_vectors": {"nfA": _point(3), "nfB": _point(0), "nfM": _point(7)},
        "nonfree": [
            [[["nfA", [1, 0, 0]]], [["nfA", [0, 0, 0]]]],
            [[["nfM", [0, 0, 1]]], [["nfB", [0, 0, 0]]]],
        ],
        "pauli": True,
    },
    "lebesgue": {
        "radius": None,
        "generators": [
            {"s0": _values(16, {2: 1.0, 3: -1.0}), "s1": _point(2) | {"amplitude": 0.3}},
            {"s0": _box(12, 2.0, 1.0)},
        ],
        "safe": (4, 5, 6, 9),
        "groups": ((0, 0), (1, 0), (2, 0), (-1, 0), (3, 0)),
        "count": 12,
        "nonfree_vectors": {"nfA": _point(5), "nfB": _point(9)},
        "nonfree": [
            [[["nfA", [0, 1]]], [["nfB", [0, 0]]]],
            [[["nfB", [0, 1]]], [["nfA", [1, 0]]]],
        ],
        "pauli": False,
    },
}


def _rand_fspec(rng: random.Random, table: dict, vectors: dict) -> list:
    terms = []
    n_terms = 2 if rng.random() < 0.2 else 1
    for _ in range(n_terms):
        if rng.random() < 0.25 and len(table["safe"]) >= 2:
            sites = rng.sample(table["safe"], 2)
            prof = _values(16, {sites[0]: 0.6, sites[1]: 0.8})
        else:
            prof = _point(rng.choice(table["safe"]))
        name = f"v{len(vectors)}"
        vectors[name] = {"sector": "+", "component": 0, "profile": prof}
        terms.append([name, list(rng.choice(table["groups"]))])
    return terms


def builtin_car_config(kind: str, seed: int = 7) -> dict:
    """Deterministic per-model CAR battery derived from the seed."""
    if kind not in _CAR_TABLE:
        raise ConfigError(f"no built-in CAR battery for sigma kind {kind!r}")
    table = _CAR_TABLE[kind]
    rng = random.Random(zlib.crc32(f"{seed}:carpairs:{kind}".encode()))
    vectors = {
        name: {"sector": "+", "component": 0, "profile": prof}
        for name, prof in table["nonfree_vectors"].items()
    }
    free = []
    for _ in range(table["count"]):
        free.append([_rand_fspec(rng, table, vectors), _rand_fspec(rng, table, vectors)])
    sigma = {"kind": kind}
    if table["radius"] is not None:
        sigma["radius"] = table["radius"]
    checks = [
        {"check": "car", "free": free, "nonfree": table["nonfree"]},
        {"check": "nonfock"},
        {"check": "dirac_adjoint", "cases": 6},
    ]
    if table["pauli"]:
        checks.append({"check": "pauli"})
    if kind == "delta":
        checks.extend(
            [
                {"check": "weyl_exactness", "cases": 100},
                {"check": "gram_positivity", "size": 8},
                {"check": "adjointness", "cases": 100},
                {"check": "covariance", "cases": 100},
                {"check": "norm_recovery", "cases": 20},
            ]
        )
    return {
        "schema": SCHEMA,
        "name": f"{kind}_car",
        "grid": {"dimension": 1, "points": 16, "spacing": 1.0, "components": 1},
        "sigma": sigma,
        "state": "tracial",
        "truncation": 3,
        "seed": seed,
        "generators": table["generators"],
        "vectors": vectors,
        "checks": checks,
    }


# ---------------------------------------------------------------------------
# entry point


def _add_common(p: argparse.ArgumentParser, config_required: bool) -> None:
    p.add_argument(
        "--config",
        required=config_required,
        metavar="PATH",
        help="scenario config: a JSON file path or a bundled name "
        f"({', '.join(BUNDLED)})",
    )
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument(
        "--truncation", type=int, default=None, help="override the Fock truncation"
    )
    p.add_argument(
        "--tolerance",
        type=float,
        default=None,
        help="override every residual tolerance (thresholds for designed "
        "violations are not affected)",
    )
    p.add_argument("--out", metavar="PATH", help="write the report to a file")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockmod",
        description="Exact verification runner for twisted fermionic Fock bimodules.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser(
        "verify-car",
        help="anticommutation battery; without --config runs the built-in "
        "four-model suite",
    )
    _add_common(p, config_required=False)
    p = sub.add_parser("model", help="run the checks of one scenario config")
    _add_common(p, config_required=True)
    p = sub.add_parser(
        "all", help="built-in CAR suite plus every bundled model scenario"
    )
    _add_common(p, config_required=False)
    return parser


def _configs_for(args) -> list[dict]:
    if args.config is not None:
        return [load_config(args.config)]
    if args.command == "verify-car":
        return [builtin_car_config(kind, args.seed if args.seed is not None else 7) for kind in SIGMA_KINDS]
    # all
    out = [builtin_car_config(kind, args.seed if args.seed is not None else 7) for kind in SIGMA_KINDS]
    out.extend(
        load_config(name)
        for name in ("delta_locality", "bump_freeness", "poisson_nonlocal", "lebesgue_gauge")
    )
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        configs = _configs_for(args)
        runs = [
            run_config(c, args.seed, args.truncation, args.tolerance) for c in configs
        ]
    except ConfigError as e:
        print(f"fockmod: {e}", file=sys.stderr)
        return 2
    grid = _parse_grid(configs[0].get("grid", {}))
    report = assemble_report(runs, grid)
    elapsed = time.perf_counter() - t0
    text = report_json(report) if args.format == "json" else report_text(report, elapsed)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["summary"]["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
