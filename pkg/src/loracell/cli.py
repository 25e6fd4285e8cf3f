"""Command-line front end.

Verbs: coverage (closed-form sweep over distance), mc (Monte Carlo
estimates), simulate (throughput/PDR sweep), reproduce (bundled recipes for
the reference figures), validate-config. Every run writes a CSV plus a
.manifest.json recording the resolved configuration digest; re-running with
the same digest reproduces the CSV byte for byte.

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .airtime import pure_aloha_throughput
from .coverage import coverage_probability, typical_at
from .montecarlo import estimate_coverage
from .scenario import (
    SF_RANGE,
    ConfigurationError,
    Scenario,
    default_scenario,
    load_scenario,
)
from .simulator import COLLISION_MODELS, multichannel_projection, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_CASE_FILES = {"N1": "sim_n1", "N2": "sim_n2"}
_FIGURES = ("fig2", "fig3", "fig4")


def _fmt(value) -> str:
    """Fixed 12-significant-digit formatting so golden files are stable."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_dat(path: Path, header: list[str], rows: list[list]) -> None:
    """gnuplot-friendly columnar text: '#' header, space separated."""
    lines = ["# " + " ".join(header)]
    lines += [" ".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


@dataclass(frozen=True)
class RunManifest:
    command: str
    scenario_path: str
    output_path: str
    seed: int
    timestamp: str
    tool_version: str
    config_digest: str


def _scenario_digest(scenario: Scenario) -> str:
    blob = repr(scenario).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _write_manifest(out_path: Path, command: str, scenario_path: str,
                    scenario: Scenario, seed: int) -> None:
    manifest = RunManifest(
        command=command,
        scenario_path=str(scenario_path),
        output_path=str(out_path),
        seed=seed,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        tool_version=__version__,
        config_digest=_scenario_digest(scenario),
    )
    path = out_path.with_suffix(out_path.suffix + ".manifest.json")
    path.write_text(json.dumps(asdict(manifest), indent=2) + "\n", encoding="utf-8")


def _load(args) -> tuple[Scenario, str]:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = replace(scenario, rng_seed=args.seed)
    if getattr(args, "replications", None) is not None:
        scenario = replace(scenario, replications=args.replications)
    return scenario, str(args.scenario)


def _coverage_rows(scenario: Scenario, distances) -> tuple[list[str], list[list]]:
    header = ["distance_m", "sf", "h1", "q1", "c1"] + [f"p_sir_sf{sf}" for sf in SF_RANGE]
    rows = []
    for d in distances:
        typical = typical_at(scenario.topology, float(d))
        br = coverage_probability(typical, scenario)
        rows.append([d, typical.sf, br.h1, br.q1, br.c1, *br.p_sir])
    return header, rows


def cmd_coverage(args) -> int:
    scenario, spath = _load(args)
    step = args.grid_step
    radius = scenario.topology.cell_radius_m
    distances = np.arange(step, radius + step / 2, step)
    counts = args.node_counts or [scenario.node_count]
    multi = len(counts) > 1
    for count in counts:
        scn = scenario.with_node_count(count)
        header, rows = _coverage_rows(scn, distances)
        if args.validate:
            header += ["mc_c1", "mc_se"]
            for row in rows:
                typical = typical_at(scn.topology, float(row[0]))
                _, _, c1 = estimate_coverage(typical, scn, args.trials, scn.rng_seed)
                row += [c1.mean, c1.standard_error]
        out = Path(args.out)
        if multi:
            out = out.with_name(f"{out.stem}_N{count}{out.suffix}")
        _write_csv(out, header, rows)
        _write_manifest(out, "coverage", spath, scn, scn.rng_seed)
        print(f"coverage: wrote {len(rows)} rows to {out}")
    return EXIT_OK


def cmd_mc(args) -> int:
    scenario, spath = _load(args)
    header = ["distance_m", "sf", "trials", "h1", "h1_se", "q1", "q1_se", "c1", "c1_se"]
    rows = []
    for d in args.distances:
        typical = typical_at(scenario.topology, float(d))
        h1, q1, c1 = estimate_coverage(typical, scenario, args.trials,
                                       scenario.rng_seed,
                                       shared_fading=args.shared_fading)
        rows.append([d, typical.sf, args.trials, h1.mean, h1.standard_error,
                     q1.mean, q1.standard_error, c1.mean, c1.standard_error])
    out = Path(args.out)
    _write_csv(out, header, rows)
    _write_manifest(out, "mc", spath, scenario, scenario.rng_seed)
    print(f"mc: wrote {len(rows)} rows to {out}")
    return EXIT_OK


def _simulate_scenario(args) -> tuple[Scenario, str]:
    if args.scenario:
        scenario = load_scenario(args.scenario)
        spath = str(args.scenario)
    elif args.case:
        scenario = default_scenario(_CASE_FILES[args.case])
        spath = f"{_CASE_FILES[args.case]}.ini"
    else:
        raise ConfigurationError("simulate: provide --scenario or --case")
    if args.model:
        scenario = replace(scenario, collision_model=args.model)
    if args.seed is not None:
        scenario = replace(scenario, rng_seed=args.seed)
    if args.replications is not None:
        scenario = replace(scenario, replications=args.replications)
    if args.loads:
        loads = tuple(float(v) for v in args.loads.split(","))
        scenario = replace(scenario, offered_loads=loads)
    return scenario, spath


def _sim_rows(outcomes) -> tuple[list[str], list[list]]:
    header = ["offered_g", "measured_g", "s_mean", "s_ci95", "pdr_mean", "pdr_ci95",
              "tx_count", "rx_count", "aloha_theory"]
    rows = [[o.offered_load, o.measured_g, o.throughput, o.throughput_ci95,
             o.pdr, o.pdr_ci95, o.tx_count, o.rx_count,
             pure_aloha_throughput(o.measured_g)] for o in outcomes]
    return header, rows


def cmd_simulate(args) -> int:
    scenario, spath = _simulate_scenario(args)
    single_sf = len(set(scenario.sf_set)) == 1
    if scenario.collision_model == "IIC" and single_sf and not args.force:
        raise ConfigurationError(
            "simulate: IIC with a single spreading factor is redundant (inter-SF "
            "interference cannot occur, IC gives identical results); "
            "pass --force to run it anyway"
        )
    outcomes = sweep(scenario, jobs=args.jobs)
    header, rows = _sim_rows(outcomes)
    out = Path(args.out)
    _write_csv(out, header, rows)
    _write_manifest(out, "simulate", spath, scenario, scenario.rng_seed)
    print(f"simulate: wrote {len(rows)} rows to {out}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.figure not in _FIGURES:
        raise ConfigurationError(
            f"reproduce: unknown figure {args.figure!r}; valid ids: {', '.join(_FIGURES)}"
        )
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    if args.figure == "fig2":
        scenario = default_scenario("coverage_eu868")
        if args.seed is not None:
            scenario = replace(scenario, rng_seed=args.seed)
        distances = np.arange(10.0, scenario.topology.cell_radius_m + 5.0, 10.0)
        header = ["distance_m", "sf"]
        columns = [list(distances)]
        for count in (250, 500, 2500):
            scn = scenario.with_node_count(count)
            _, rows = _coverage_rows(scn, distances)
            if len(columns) == 1:
                columns.append([r[1] for r in rows])
            header.append(f"c1_N{count}")
            columns.append([r[4] for r in rows])
        rows = [list(vals) for vals in zip(*columns)]
        csv_path = outdir / "fig2_coverage.csv"
        _write_csv(csv_path, header, rows)
        _write_dat(outdir / "fig2_coverage.dat", header, rows)
        _write_manifest(csv_path, "reproduce fig2", "coverage_eu868.ini",
                        scenario, scenario.rng_seed)
        print(f"reproduce fig2: wrote {csv_path}")
        return EXIT_OK

    # fig3 (throughput) and fig4 (PDR) share the same sweeps
    runs = [
        ("n1_bp", "N1", "BP"),
        ("n1_ic", "N1", "IC"),
        ("n2_bp", "N2", "BP"),
        ("n2_ic", "N2", "IC"),
        ("n2_iic", "N2", "IIC"),
    ]
    results = {}
    for name, case, model in runs:
        scenario = default_scenario(_CASE_FILES[case])
        scenario = replace(scenario, collision_model=model)
        if args.seed is not None:
            scenario = replace(scenario, rng_seed=args.seed)
        if args.replications is not None:
            scenario = replace(scenario, replications=args.replications)
        results[name] = sweep(scenario, jobs=args.jobs)
        ref_scenario = scenario

    loads = [o.offered_load for o in results["n1_bp"]]
    if args.figure == "fig3":
        header = (["offered_g", "aloha_theory"]
                  + [f"s_{name}" for name, _, _ in runs]
                  + ["s_n1_ic_x5"])
        rows = []
        for k, g in enumerate(loads):
            theory = pure_aloha_throughput(results["n1_bp"][k].measured_g)
            svals = [results[name][k].throughput for name, _, _ in runs]
            proj = multichannel_projection(results["n1_ic"][k], 5).throughput
            rows.append([g, theory, *svals, proj])
        stem = "fig3_throughput"
    else:
        header = ["offered_g"] + [f"pdr_{name}" for name, _, _ in runs]
        rows = [[g, *[results[name][k].pdr for name, _, _ in runs]]
                for k, g in enumerate(loads)]
        stem = "fig4_pdr"
    csv_path = outdir / f"{stem}.csv"
    _write_csv(csv_path, header, rows)
    _write_dat(outdir / f"{stem}.dat", header, rows)
    _write_manifest(csv_path, f"reproduce {args.figure}", "sim_n1.ini+sim_n2.ini",
                    ref_scenario, ref_scenario.rng_seed)
    print(f"reproduce {args.figure}: wrote {csv_path}")
    return EXIT_OK


def cmd_validate_config(args) -> int:
    scenario = load_scenario(args.scenario)
    digest = _scenario_digest(scenario)
    print(f"{args.scenario}: valid (digest {digest[:16]})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loracell",
        description="LoRaWAN cell coverage and throughput experiments",
    )
    parser.add_argument("--version", action="version", version=f"loracell {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scenario_required=True):
        p.add_argument("--scenario", required=scenario_required,
                       help="scenario file (path, $LORACELL_CONFIG_DIR, or packaged name)")
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p = sub.add_parser("coverage", help="closed-form coverage sweep over distance")
    common(p)
    p.add_argument("--grid-step", type=float, default=10.0, help="distance step in m")
    p.add_argument("--node-counts", type=lambda s: [int(v) for v in s.split(",")],
                   default=None, help="comma list; one output file per count")
    p.add_argument("--validate", action="store_true",
                   help="append Monte Carlo estimate and standard error columns")
    p.add_argument("--trials", type=int, default=200_000,
                   help="Monte Carlo trials per point for --validate")
    p.add_argument("--replications", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("mc", help="Monte Carlo coverage estimates at given distances")
    common(p)
    p.add_argument("--distances", type=lambda s: [float(v) for v in s.split(",")],
                   required=True, help="comma list of distances in m")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--shared-fading", action="store_true",
                   help="reuse one fading draw across all threshold events")
    p.add_argument("--replications", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("simulate", help="event-driven throughput/PDR sweep")
    common(p, scenario_required=False)
    p.add_argument("--case", choices=sorted(_CASE_FILES), default=None,
                   help="packaged case preset (alternative to --scenario)")
    p.add_argument("--model", choices=COLLISION_MODELS, default=None,
                   help="override the scenario collision model")
    p.add_argument("--loads", default=None, help="comma list of offered loads")
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--force", action="store_true",
                   help="allow redundant model/case combinations")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce", help="run a bundled reference-figure recipe")
    p.add_argument("figure", help=f"one of: {', '.join(_FIGURES)}")
    p.add_argument("--outdir", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("validate-config", help="check a scenario file and print its digest")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_validate_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
