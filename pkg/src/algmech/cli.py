"""Command-line front end: simulate, verify, report.

Exit codes: 0 success (verify: all checks pass), 1 bad input/config,
2 integration diverged (a partial trajectory CSV is still written).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import DEFAULT_TOLERANCES, build_scenario, initial_point, load_config
from .errors import InputError, IntegrationDivergedError
from .hamiltonian import integrate
from .verify import CHECKS, run_check


def cmd_simulate(config_path, out=None) -> int:
    try:
        cfg = load_config(config_path)
        if cfg.integration is None:
            raise InputError("config missing 'integration'")
        bundle, _ = build_scenario(cfg.scenario)
        x0 = initial_point(cfg.integration, bundle)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    path = out or cfg.output.get("trajectory") or "trajectory.csv"
    try:
        traj = integrate(
            bundle.algebroid,
            bundle.hamiltonian,
            x0,
            float(cfg.integration["h"]),
            int(cfg.integration["steps"]),
            bundle.monitors,
        )
    except IntegrationDivergedError as exc:
        with open(path, "w") as fh:
            fh.write(exc.trajectory.to_csv())
        print(
            f"error: integration diverged, last good step {exc.last_good_step}; "
            f"partial trajectory in {path}",
            file=sys.stderr,
        )
        return 2
    with open(path, "w") as fh:
        fh.write(traj.to_csv())
    print(f"wrote {len(traj.samples)} samples to {path}")
    return 0


def cmd_verify(config_path, report_path=None, seed=None) -> int:
    try:
        cfg = load_config(config_path)
        if cfg.verification is None:
            raise InputError("config missing 'verification'")
        bundle, spec = build_scenario(cfg.scenario)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    vcfg = cfg.verification
    points = int(vcfg.get("points", 100))
    base_seed = int(seed if seed is not None else vcfg.get("seed", 0))
    tolerances = {**DEFAULT_TOLERANCES, **(vcfg.get("tolerances") or {})}
    entries = []
    for pos, entry in enumerate(vcfg.get("checks", [])):
        if isinstance(entry, str):
            entry = {"name": entry}
        name = entry["name"]
        if name not in CHECKS:
            print(f"error: unknown check name {name!r}", file=sys.stderr)
            return 1
        ccfg = dict(entry)
        ccfg.pop("name")
        ccfg.setdefault("points", points)
        ccfg["analytic_tol"] = tolerances["analytic"]
        ccfg["fd_tol"] = tolerances["fd"]
        if spec is not None:
            ccfg["constraint_spec"] = spec
        try:
            entries.append(run_check(name, bundle, ccfg, base_seed + pos))
        except InputError as exc:
            print(f"error: check {name!r}: {exc}", file=sys.stderr)
            return 1
    path = report_path or cfg.output.get("report") or "report.json"
    text = json.dumps(entries, indent=2)
    with open(path, "w") as fh:
        fh.write(text + "\n")
    for e in entries:
        status = "pass" if e["pass"] else "FAIL"
        print(
            f"{status}  {e['check']}: max_residual={e['max_residual']:.3e} "
            f"tolerance={e['tolerance']:.3e} points={e['points']}"
        )
    return 0 if all(e["pass"] for e in entries) else 1


def _parse_csv(path):
    try:
        with open(path) as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise InputError(f"cannot read trajectory: {exc}") from exc
    if not lines:
        raise InputError("trajectory file is empty")
    header = lines[0].split(",")
    if header[0] != "t":
        raise InputError("malformed trajectory header: first column must be 't'")
    n = sum(1 for c in header if c.startswith("q") and c[1:].isdigit())
    m = sum(1 for c in header if c.startswith("p") and c[1:].isdigit())
    if header[: 1 + n + m + 2] != (
        ["t"]
        + [f"q{i + 1}" for i in range(n)]
        + [f"p{a + 1}" for a in range(m)]
        + ["H", "dHdt"]
    ):
        raise InputError("malformed trajectory header: column contract violated")
    monitors = header[1 + n + m + 2 :]
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise InputError(f"malformed trajectory row: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != len(header) or data.shape[0] == 0:
        raise InputError("trajectory rows do not match the header")
    return header, n, m, monitors, data


def cmd_report(csv_path) -> int:
    try:
        header, n, m, monitors, data = _parse_csv(csv_path)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    t = data[:, 0]
    state = data[:, 1 : 1 + n + m]
    H = data[:, 1 + n + m]
    print(f"rows: {data.shape[0]}")
    print(f"duration: {t[-1] - t[0]:.17g}")
    print(f"H drift: {np.max(np.abs(H - H[0])):.3e}")
    print(f"max |state|: {np.max(np.abs(state)):.17g}")
    for j, name in enumerate(monitors):
        col = data[:, 1 + n + m + 2 + j]
        print(
            f"monitor {name}: min={np.min(col):.17g} max={np.max(col):.17g} "
            f"drift={np.max(np.abs(col - col[0])):.3e}"
        )
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="algmech",
        description="Algebroid mechanics: simulate scenarios and verify the "
        "structural theorems numerically.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_sim = sub.add_parser("simulate", help="integrate a scenario, write a CSV trajectory")
    p_sim.add_argument("config")
    p_sim.add_argument("--out", default=None)
    p_ver = sub.add_parser("verify", help="run named checks, write a JSON report")
    p_ver.add_argument("config")
    p_ver.add_argument("--report", default=None)
    p_ver.add_argument("--seed", type=int, default=None)
    p_rep = sub.add_parser("report", help="summarize a trajectory CSV")
    p_rep.add_argument("csv")
    args = parser.parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args.config, out=args.out)
    if args.command == "verify":
        return cmd_verify(args.config, report_path=args.report, seed=args.seed)
    return cmd_report(args.csv)


if __name__ == "__main__":
    sys.exit(main())
