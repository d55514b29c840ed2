"""Command-line driver: scenario runs, the map catalog, deck groups and kernels.

A scenario is a JSON file::

    {"name": "b2-basic", "map": "b2", "checks": ["isometry", "deck"],
     "degree_cap": 6, "quadrature_level": 24, "seed": 1,
     "tolerances": {"isometry": 1e-8}}

``run`` writes ``report.json`` and one CSV table per check into the output
directory and exits with 0 when every check passes, 1 when a check fails
and 2 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import checks, deck, domains, maps, spaces

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2
SEED_MASK = 2 ** 64 - 1


class ScenarioError(ValueError):
    pass


class IoFailure(OSError):
    pass


@dataclass
class Scenario:
    name: str
    map: str
    checks: list[str]
    degree_cap: int = 4
    quadrature_level: int = 24
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in self.checks:
            checks.get_check(name)
        if self.degree_cap < 1 or self.quadrature_level < 1:
            raise ScenarioError("degree_cap and quadrature_level must be at least 1")
        for name, tol in self.tolerances.items():
            checks.get_check(name)
            if not tol > 0:
                raise ScenarioError(f"tolerance for {name} must be positive")
        self.seed = int(self.seed) & SEED_MASK

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        known = {"name", "map", "checks", "degree_cap", "quadrature_level", "seed", "tolerances"}
        extra = set(data) - known
        if extra:
            raise ScenarioError(f"unknown scenario fields {sorted(extra)}")
        missing = {"name", "map", "checks"} - set(data)
        if missing:
            raise ScenarioError(f"missing scenario fields {sorted(missing)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "Scenario":
        try:
            with open(path) as handle:
                data = json.load(handle)
        except OSError as exc:
            raise IoFailure(f"cannot read scenario {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def tolerance(self, check: str) -> float:
        return float(self.tolerances.get(check, checks.DEFAULT_TOLERANCES[check]))


def check_rng(seed: int, name: str) -> np.random.Generator:
    """Independent stream per check so results do not depend on check order."""
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def _run_check(scenario: Scenario, name: str) -> tuple[str, checks.CheckOutcome, float]:
    f = maps.from_name(scenario.map)
    ctx = checks.CheckContext(scenario.degree_cap, scenario.quadrature_level,
                              check_rng(scenario.seed, name))
    start = time.perf_counter()
    outcome = checks.get_check(name)(f, ctx)
    return name, outcome, time.perf_counter() - start


def _write_rows(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(rows[0]) if rows else ["residual"])
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def run(scenario: Scenario, out_dir, parallel: bool = False) -> dict:
    """Execute every check, write report.json and CSV tables, return the report."""
    maps.from_name(scenario.map)  # fail early on unknown maps
    if parallel and len(scenario.checks) > 1:
        workers = min(len(scenario.checks), os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_check, [scenario] * len(scenario.checks),
                                    scenario.checks))
    else:
        results = [_run_check(scenario, name) for name in scenario.checks]
    try:
        os.makedirs(out_dir, exist_ok=True)
        report = {"scenario": asdict(scenario), "checks": {}, "artifacts": []}
        for name, outcome, seconds in results:
            table = f"{name}.csv"
            _write_rows(os.path.join(out_dir, table), outcome.rows)
            extra = []
            for filename, writer in sorted(outcome.artifacts.items()):
                artifact = f"{name}_{filename}"
                writer(os.path.join(out_dir, artifact))
                extra.append(artifact)
            tol = scenario.tolerance(name)
            report["checks"][name] = {
                "check": name,
                "pass": bool(outcome.max_residual < tol),
                "max_residual": float(outcome.max_residual),
                "tolerance": tol,
                "seed": scenario.seed,
                "details": table,
                "artifacts": extra,
                "wall_time_s": round(seconds, 3),
            }
            report["artifacts"].extend([table] + extra)
        report["pass"] = all(c["pass"] for c in report["checks"].values())
        with open(os.path.join(out_dir, "report.json"), "w") as handle:
            json.dump(report, handle, sort_keys=True, indent=2)
            handle.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write report to {out_dir}: {exc}") from exc
    return report


def strip_timing(report: dict) -> dict:
    """Copy of a report without wall-time fields, for determinism comparisons."""
    out = json.loads(json.dumps(report))
    for entry in out.get("checks", {}).values():
        entry.pop("wall_time_s", None)
    return out


# command handlers

def _cmd_run(args) -> int:
    scenario = Scenario.load(args.scenario)
    if args.seed is not None:
        scenario.seed = int(args.seed) & SEED_MASK
    out = args.out or os.path.join("runs", scenario.name)
    report = run(scenario, out, parallel=args.parallel)
    for name, entry in report["checks"].items():
        status = "PASS" if entry["pass"] else "FAIL"
        print(f"{status} {name}: max residual {entry['max_residual']:.3e} "
              f"(tolerance {entry['tolerance']:.1e})")
    print(f"report written to {os.path.join(out, 'report.json')}")
    return EXIT_OK if report["pass"] else EXIT_FAILED


def _cmd_list(args) -> int:
    print(maps.list_catalog())
    return EXIT_OK


def _cmd_deck(args) -> int:
    report = deck.deck_group(maps.from_name(args.map), seed=args.seed)
    print(report.table())
    payload = {"elements": [e.descriptor() for e in report.elements],
               "is_galois": report.is_galois, "fiber_size": report.fiber_size}
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def parse_point(text: str) -> np.ndarray:
    """Coordinates separated by ';', each a Python complex literal such as 0.1+0.2j."""
    return np.array([complex(part.strip().replace(" ", "")) for part in text.split(";")])


def _cmd_kernel(args) -> int:
    model = spaces.kernel_from_name(args.name)
    try:
        z_text, w_text = args.at.split(",")
    except ValueError:
        raise ScenarioError("--at expects two points separated by ','") from None
    value = spaces.kernel_eval(model, parse_point(z_text), parse_point(w_text))
    print(json.dumps({"kernel": args.name, "value": [value.real, value.imag]}, sort_keys=True))
    return EXIT_OK


def _cmd_rule(args) -> int:
    rule = domains.quadrature(domains.from_name(args.domain), args.level)
    print(f"{rule.domain.name}: {len(rule)} nodes, exact to bidegree {rule.exact_degree}, "
          f"total weight {rule.weights.sum():.15g}")
    if args.dump_rule:
        try:
            rule.to_csv(args.dump_rule)
        except OSError as exc:
            raise IoFailure(f"cannot write {args.dump_rule}: {exc}") from exc
        print(f"rule written to {args.dump_rule}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bergman-lab",
                                     description="Bergman-space checks for proper holomorphic maps")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("scenario")
    p.add_argument("--out", help="output directory (default runs/<name>)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--parallel", action="store_true", help="run checks in worker processes")
    p.set_defaults(handler=_cmd_run)

    p = sub.add_parser("list", help="list catalog maps")
    p.set_defaults(handler=_cmd_list)

    p = sub.add_parser("deck", help="deck transformation group of a catalog map")
    p.add_argument("map")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_deck)

    p = sub.add_parser("kernel", help="evaluate a kernel model")
    p.add_argument("name", help="kernel:disc, kernel:polydisc:<d>, kernel:symdisc:<d>, pullback:<map>")
    p.add_argument("--at", required=True, help="z,w with coordinates separated by ';'")
    p.set_defaults(handler=_cmd_kernel)

    p = sub.add_parser("rule", help="describe or export a quadrature rule")
    p.add_argument("domain", help="D, D^d, G_d, polydisc:<d> or symdisc:<d>")
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--dump-rule", metavar="CSV", help="write nodes and weights to CSV")
    p.set_defaults(handler=_cmd_rule)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (maps.UnknownMap, checks.UnknownCheck, ScenarioError, checks.CheckNotApplicable,
            KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
