"""Config-driven entry point.

One JSON config describes one run: a catalog spacetime plus one of the five
commands (distance, admissible, witness, sandwich, suite).  Reports are JSON
documents whose floats round-trip bit-exactly (Python repr), so a replay from
the emitted report reproduces every numeric field.

Exit codes: 0 all contracts held, 1 contract violation, 2 config error,
3 geometric obstruction (named in the report).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .causal import CauchySurface, classify_pair
from .distance import closed_form_distance, distance_field, max_path_distance
from .eikonal import check_admissible, export_field_csv
from .errors import (ConfigError, ContractViolation, CoverageImpossible,
                     DisjointTracesImpossible, ToolkitError, WitnessRejected)
from .fields import GridSpec, affine_time_field
from .geometry import Spacetime, spacetime_from_spec
from .verify import (Budget, property_suite, sandwich_report,
                     verification_box)
from .witness import (build_covering_witness, build_equality_witness,
                      build_reverse_witness, build_unrelated_witness,
                      verify_covering_invariants)

COMMANDS = ("distance", "admissible", "witness", "sandwich", "suite")


def _require(config: dict, key: str, what: str = "config"):
    if key not in config:
        raise ConfigError(f"{what} is missing required key {key!r}")
    return config[key]


def _reject_unknown(d: dict, allowed, what: str):
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"{what} has unknown keys {unknown}")


def _point(s: Spacetime, coords, what: str):
    if not isinstance(coords, (list, tuple)):
        raise ConfigError(f"{what} must be a coordinate list")
    try:
        return s.point(*[float(c) for c in coords])
    except (TypeError, ValueError, ToolkitError) as exc:
        raise ConfigError(f"bad {what}: {exc}") from exc


def _points(config: dict, s: Spacetime):
    pts = _require(config, "points")
    _reject_unknown(pts, ("p", "q"), "points")
    return (_point(s, _require(pts, "p", "points"), "points.p"),
            _point(s, _require(pts, "q", "points"), "points.q"))


def _grid_spec(d: dict) -> GridSpec:
    _reject_unknown(d, ("box", "resolution", "exclusion_radius"), "grid")
    box = tuple((float(lo), float(hi)) for lo, hi in _require(d, "box", "grid"))
    res = _require(d, "resolution", "grid")
    resolution = tuple(int(r) for r in res) if isinstance(res, list) else (int(res),) * len(box)
    try:
        return GridSpec(box=box, resolution=resolution,
                        exclusion_radius=float(d.get("exclusion_radius", 0.0)))
    except ToolkitError as exc:
        raise ConfigError(f"bad grid: {exc}") from exc


def _budget(config: dict, seed: int) -> Budget:
    d = dict(config.get("budget", {}))
    _reject_unknown(d, ("n_segments", "restarts", "epsilons", "grid_resolution",
                        "box_pad", "depth", "quadrature_n"), "budget")
    if "epsilons" in d:
        d["epsilons"] = tuple(float(e) for e in d["epsilons"])
    try:
        return Budget(seed=seed, **d)
    except TypeError as exc:
        raise ConfigError(f"bad budget: {exc}") from exc


def _field(config: dict, s: Spacetime):
    spec = dict(_require(config, "field"))
    kind = spec.pop("kind", None)
    if kind == "affine_time":
        _reject_unknown(spec, ("rate", "offset"), "field")
        return affine_time_field(s.dim, float(spec.get("rate", 1.0)),
                                 float(spec.get("offset", 0.0)))
    if kind in ("distance_from", "distance_to"):
        _reject_unknown(spec, ("base",), "field")
        base = _point(s, _require(spec, "base", "field"), "field.base")
        direction = "from_base" if kind == "distance_from" else "to_base"
        return distance_field(s, base, direction)
    raise ConfigError(f"unknown field kind {kind!r}")


def _run_distance(config, s, seed):
    p, q = _points(config, s)
    budget = _budget(config, seed)
    rel = classify_pair(s, p, q)
    closed = closed_form_distance(s, p, q) if s.has_closed_form else None
    lower = (max_path_distance(s, p, q, budget.n_segments, budget.restarts,
                               budget.seed, budget.quadrature_n)
             if rel.is_future else 0.0)
    ok = closed is None or lower <= closed + 1e-9
    return 0 if ok else 1, {
        "relation": rel.value,
        "closed_form": closed,
        "path_lower_bound": lower,
        "budget": budget.to_dict(),
    }


def _run_admissible(config, s, seed):
    field = _field(config, s)
    grid = _grid_spec(_require(config, "grid"))
    report = check_admissible(s, field, grid)
    return (0 if report.verdict else 1), {"admissibility": report.to_dict()}, field, grid


def _run_witness(config, s, seed):
    spec = dict(_require(config, "witness"))
    case = spec.pop("case", None)
    window = tuple(spec.pop("window")) if "window" in spec else None
    depth = float(spec.pop("depth", 0.15))
    if case == "covering":
        _reject_unknown(spec, ("surface_level", "side", "excluded", "guards", "r_max"),
                        "witness")
        surface = CauchySurface(float(_require(spec, "surface_level", "witness")))
        side = _require(spec, "side", "witness")
        excluded = [_point(s, e, "witness.excluded") for e in _require(spec, "excluded", "witness")]
        guards = [_point(s, g, "witness.guards") for g in _require(spec, "guards", "witness")]
        cw = build_covering_witness(s, surface, side, excluded, guards, depth,
                                    r_max=float(spec.get("r_max", 1.0)), window=window)
        invariants = verify_covering_invariants(cw, seed=seed)
        sign = cw.sign
        box = ((surface.level, surface.level + sign * 2.0) if sign > 0
               else (surface.level - 2.0, surface.level))
        xbox = ((0.0, s.circumference) if window is None else window)
        grid = GridSpec((box, xbox), (81, 81))
        adm = check_admissible(s, cw.field, grid)
        ok = (invariants["zero_max_abs"] == 0.0 and invariants["positive_min"] > 0.0
              and invariants["locality_ok"] and adm.verdict)
        return (0 if ok else 1), {
            "witness": cw.to_dict(), "invariants": invariants,
            "admissibility": adm.to_dict()}, cw.field
    if case in ("equality", "reverse", "unrelated"):
        _reject_unknown(spec, ("p", "q", "epsilon"), "witness")
        p = _point(s, _require(spec, "p", "witness"), "witness.p")
        q = _point(s, _require(spec, "q", "witness"), "witness.q")
        if case == "equality":
            w = build_equality_witness(s, p, q, float(_require(spec, "epsilon", "witness")),
                                       depth, window)
        elif case == "reverse":
            w = build_reverse_witness(s, p, q, depth, window)
        else:
            w = build_unrelated_witness(s, p, q, float(_require(spec, "epsilon", "witness")),
                                        depth, window)
        grid = GridSpec(verification_box(s, [p, q]), (61,) * s.dim)
        adm = check_admissible(s, w.field, grid)
        return (0 if adm.verdict else 1), {
            "witness": w.to_dict(), "delta": w.delta(),
            "admissibility": adm.to_dict()}, w.field
    raise ConfigError(f"unknown witness case {case!r}")


def _run_sandwich(config, s, seed):
    p, q = _points(config, s)
    report = sandwich_report(s, p, q, _budget(config, seed))
    return 0, report.to_dict()


def _run_suite(config, s, seed):
    trials = int(config.get("trials", 1000))
    report = property_suite(s, seed=seed, trials=trials)
    return (0 if report.all_passed else 1), report.to_dict(), report


def run_config(config: dict, output_dir: str | Path = ".",
               seed_override: int | None = None) -> tuple[int, dict]:
    """Execute one validated config; returns (exit_status, report_dict)."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    allowed = {"schema_version", "command", "spacetime", "seed", "output",
               "points", "budget", "field", "grid", "witness", "trials"}
    _reject_unknown(config, allowed, "config")
    version = config.get("schema_version", 1)
    if version != 1:
        raise ConfigError(f"unsupported schema_version {version}")
    command = _require(config, "command")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    try:
        s = spacetime_from_spec(_require(config, "spacetime"))
    except ToolkitError as exc:
        raise ConfigError(f"bad spacetime: {exc}") from exc
    seed = int(seed_override if seed_override is not None else config.get("seed", 0))

    output = dict(config.get("output", {}))
    _reject_unknown(output, ("report", "grid_csv"), "output")

    field = grid = suite = None
    if command == "distance":
        status, results = _run_distance(config, s, seed)
    elif command == "admissible":
        status, results, field, grid = _run_admissible(config, s, seed)
    elif command == "witness":
        status, results, field = _run_witness(config, s, seed)
        grid = _grid_spec(config["grid"]) if "grid" in config else None
    elif command == "sandwich":
        status, results = _run_sandwich(config, s, seed)
    else:
        status, results, suite = _run_suite(config, s, seed)

    report = {
        "schema_version": 1,
        "command": command,
        "status": "ok" if status == 0 else "failed",
        "spacetime": s.spec(),
        "seed": seed,
        "config": config,
        "results": results,
    }

    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / output.get("report", f"{command}_report.json")
    report_path.write_text(json.dumps(report, indent=2) + "\n")
    if output.get("grid_csv") and field is not None and grid is not None:
        export_field_csv(s, field, grid, out_dir / output["grid_csv"])
    if suite is not None:
        import csv as _csv
        with open(report_path.with_suffix(".csv"), "w", newline="") as fh:
            _csv.writer(fh).writerows(suite.csv_rows())
    return status, report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lorentzdist",
        description="Distance computations, admissibility checks, witness "
                    "constructions, sandwich verifications, and property suites "
                    "on catalog spacetimes.")
    parser.add_argument("--config", required=True, help="path to JSON run config")
    parser.add_argument("--output", default=".", help="directory for report files")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    args = parser.parse_args(argv)

    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        status, report = run_config(config, args.output, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (CoverageImpossible, DisjointTracesImpossible) as exc:
        print(f"geometric obstruction: {exc}", file=sys.stderr)
        return 3
    except (ContractViolation, WitnessRejected) as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 1
    except ToolkitError as exc:
        # precondition violations from user-supplied inputs
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({"command": report["command"], "status": report["status"]}))
    return status


if __name__ == "__main__":
    sys.exit(main())
