"""Command-line front end.

    edgestep <generate|normalize|campaign|bootstrap|urn> --config run.yaml [--out DIR]
             [--workers N] [--seed S]

Exit codes: 0 success, 2 validation error, 3 gate failure, 4 runtime anomaly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from . import bootstrap as bp
from . import experiments
from .config import COMMANDS, ConfigError, RunConfig, config_hash, dump_config, from_dict
from .generator import ProcessConfig, generate, read_snapshot, simulate, write_snapshot, write_trajectory_csv
from .normalization import build_table, dump_csv, xi_infinity
from .seeding import replica_stream
from .urn import UrnState, red_proportion_trajectory, start_for_vertex, write_summary_csv

EXIT_OK, EXIT_INVALID, EXIT_GATE, EXIT_ANOMALY = 0, 2, 3, 4


def _generate(cfg: RunConfig, out: Path) -> dict:
    pc = ProcessConfig(cfg.f, cfg.horizon, cfg.seed, tuple(cfg.param("tracked")),
                       cfg.param("stride"), int(cfg.param("gap")))
    record, G = simulate(pc)
    write_snapshot(G, out / "snapshot.bin")
    write_trajectory_csv(record, out / "trajectory.csv")
    return {"outputs": ["snapshot.bin", "trajectory.csv"], "n_vertices": G.n_vertices,
            "max_degree": int(record.max_degree[-1]), "last_gap_failure": record.last_gap_failure}


def _normalize(cfg: RunConfig, out: Path) -> dict:
    table = build_table(cfg.f, max(cfg.horizon, 2), int(cfg.param("k_max")))
    dump_csv(table, out / "normalization.csv", int(cfg.param("per_decade")))
    xi = xi_infinity(table)
    return {"outputs": ["normalization.csv"], "phi_T": float(table.phi(table.horizon)),
            "xi_T": xi.value, "xi_converged": xi.converged}


def _campaign(cfg: RunConfig, out: Path) -> dict:
    params = {k: v for k, v in cfg.params.items() if k != "kind"}
    cc = experiments.CampaignConfig(cfg.params["kind"], cfg.f, cfg.horizon, cfg.replicas, cfg.seed,
                                    params, cfg.workers)
    result = experiments.run_campaign(cc)
    result.write(out)
    return {"outputs": ["raw.csv", "summary.json", "PASS" if result.passed else "FAIL"],
            "gates": result.gates, "warnings": result.warnings,
            "exit": EXIT_OK if result.passed else EXIT_GATE}


def _bootstrap(cfg: RunConfig, out: Path) -> dict:
    f = cfg.f
    snapshot = cfg.param("snapshot")
    fixed = read_snapshot(snapshot) if snapshot else None
    r = int(cfg.param("r"))
    rows, results, report, caught = [], [], None, []
    for k in range(cfg.replicas):
        rng = replica_stream(cfg.seed, k)
        G = fixed if fixed is not None else generate(f, cfg.horizon, rng)
        a = cfg.param("a")
        a = math.log(G.time) if a is None else float(a)
        if report is None:
            with warnings.catch_warnings(record=True) as w:
                warnings.simplefilter("always", bp.ClassificationWarning)
                report = bp.structure_report(G, f, a, r)
            caught = [str(x.message) for x in w if issubclass(x.category, bp.ClassificationWarning)]
        res = bp.run_to_stabilization(G, bp.BootstrapParams(a, r), rng)
        results.append(res)
        rows.append({"replica": k, "a": a, "r": r, "I0": res.initial_size, "I_inf": res.final.size,
                     "fraction": res.fraction, "rounds": res.rounds})
    bp.write_runs_csv(rows, out / "runs.csv")
    bp.write_rounds_csv(results, out / "rounds.csv")
    anomalies = [f"replica {k}: {res.anomaly}" for k, res in enumerate(results) if res.anomaly]
    summary = {"structure": report.__dict__, "warnings": caught, "anomalies": anomalies,
               "median_fraction": float(np.median([x["fraction"] for x in rows]))}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True, default=float) + "\n")
    return {"outputs": ["runs.csv", "rounds.csv", "summary.json"], "warnings": caught,
            "anomalies": anomalies, "exit": EXIT_ANOMALY if anomalies else EXIT_OK}


def _urn(cfg: RunConfig, out: Path) -> dict:
    birth = cfg.param("birth_time")
    if birth is not None:
        start = start_for_vertex(int(birth))
    else:
        start = UrnState(int(cfg.param("red")), int(cfg.param("blue")), int(cfg.param("start_time")))
    f = cfg.f if cfg.param("immigration") else None
    table = build_table(cfg.f, max(cfg.horizon, 2), k_max=0) if f is not None else None
    summary = red_proportion_trajectory(f, start, cfg.horizon, cfg.replicas, cfg.seed, table=table,
                                        sequential=bool(cfg.param("sequential")))
    write_summary_csv(summary, out / "urn.csv")
    return {"outputs": ["urn.csv"]}


HANDLERS = {"generate": _generate, "normalize": _normalize, "campaign": _campaign,
            "bootstrap": _bootstrap, "urn": _urn}


def execute(cfg: RunConfig, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    info = HANDLERS[cfg.command](cfg, out)
    code = info.pop("exit", EXIT_OK)
    manifest = {"command": cfg.command, "config_hash": config_hash(cfg), "version": __version__,
                "wall_time_s": round(time.perf_counter() - start, 3), "exit_code": code, **info}
    (out / "config.yaml").write_text(dump_config(cfg))
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=float) + "\n")
    for w in info.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    if code == EXIT_GATE:
        print(json.dumps({"status": "gate_failure",
                          "failed": [k for k, v in info.get("gates", {}).items() if not v]}), file=sys.stderr)
    elif code == EXIT_ANOMALY:
        print(json.dumps({"status": "anomaly", "anomalies": info.get("anomalies", [])}), file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="edgestep", description="Edge-step preferential attachment toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="YAML run configuration")
    ap.add_argument("--out", help="output directory (overrides the config)")
    ap.add_argument("--workers", type=int, help="worker processes (overrides the config)")
    ap.add_argument("--seed", type=int, help="master seed (overrides the config)")
    return ap


def _invalid(errors: list[str]) -> int:
    print(json.dumps({"status": "validation_error", "errors": errors}), file=sys.stderr)
    return EXIT_INVALID


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = yaml.safe_load(Path(args.config).read_text())
    except (OSError, yaml.YAMLError) as exc:
        return _invalid([f"cannot read config: {exc}"])
    if not isinstance(doc, dict):
        return _invalid(["config must be a mapping"])
    doc.setdefault("command", args.command)
    if doc["command"] != args.command:
        return _invalid([f"config command {doc['command']!r} does not match {args.command!r}"])
    for key in ("seed", "workers"):
        if getattr(args, key) is not None:
            doc[key] = getattr(args, key)
    if args.out is not None:
        doc["output"] = args.out
    try:
        cfg = from_dict(doc)
    except ConfigError as exc:
        return _invalid(exc.errors)
    if cfg.output is None:
        return _invalid(["no output directory: set 'output' or pass --out"])
    try:
        return execute(cfg, Path(cfg.output))
    except ValueError as exc:
        return _invalid([str(exc)])


if __name__ == "__main__":
    sys.exit(main())
