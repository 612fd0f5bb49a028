"""Command-line entry point: ``twodisk <command> --config FILE``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .coefficient import SharpCoefficient, SmoothCoefficient
from .config import ExperimentConfig, load_config
from .errors import ConfigParse, IoFailure, TwoDiskError
from .fields import barrier_b
from .geometry import build_geometry
from .solver import BoundarySpec
from .verify import (
    analytic_family_2d,
    analytic_family_3d,
    barrier_invariants,
    barrier_reference,
    delta_sweep,
    identity_residuals_nd,
    lemma_residuals_2d,
    radial_constancy_check,
    run_case,
    single_disk_oracle,
    sweep_checks,
)
from .verify.barrier import profile_rows
from .verify.io import read_csv, write_csv, write_json
from .verify.sweep import SWEEP_COLUMNS, CaseSettings

logger = logging.getLogger("twodisk")

COMMANDS = ("solve", "sweep", "identities", "oracle", "barrier", "report")
NEEDS_COEFFICIENT = ("solve", "sweep", "barrier")


def case_settings(cfg: ExperimentConfig) -> CaseSettings:
    return CaseSettings(
        mu=float(cfg.geometry.mu),
        box=tuple(cfg.geometry.box),
        mode=cfg.coefficient.mode,
        epsilon_fraction=float(cfg.coefficient.epsilon_fraction),
        profile=cfg.coefficient.profile,
        K=float(cfg.fields.K),
        C_scale=float(cfg.fields.C_scale),
        tol=float(cfg.solver.tol),
        backend=cfg.solver.backend,
        quadrature=int(cfg.solver.quadrature),
        max_iter=cfg.solver.max_iter,
    )


def boundary_spec(cfg: ExperimentConfig) -> BoundarySpec:
    b = cfg.boundary
    return BoundarySpec(b.family, int(b.k), bool(b.normalized))


def cmd_solve(cfg):
    c = cfg.coefficient
    res = run_case(cfg.geometry.delta, c.kappa_plus, c.kappa_minus, boundary_spec(cfg), cfg.solver.h, case_settings(cfg))
    row = res.row
    checks = {
        "max_principle": row["max_principle_ok"],
        "subharmonic": row["subharmonic_ok"],
        "n_below_m": row["N_minus_M_max_E"] <= cfg.thresholds.n_vs_m_tol,
    }
    checks["ok"] = all(checks.values())
    return [row], SWEEP_COLUMNS, checks


def cmd_sweep(cfg):
    c = cfg.coefficient
    table = delta_sweep(
        cfg.geometry.deltas, (c.kappa_plus, c.kappa_minus), boundary_spec(cfg), cfg.solver.h_levels, case_settings(cfg)
    )
    t = cfg.thresholds
    checks = sweep_checks(
        table,
        expect=t.expect,
        bounded_factor=t.bounded_factor,
        blowup_factor=t.blowup_factor,
        refinement_tol=t.refinement_tol,
        n_vs_m_tol=t.n_vs_m_tol,
    )
    return table.rows, SWEEP_COLUMNS, checks


def cmd_identities(cfg):
    ident = cfg.identities
    t = cfg.thresholds
    rows, ok = [], True
    for p in ident.p_values:
        p = float(p)
        reports = lemma_residuals_2d(analytic_family_2d(p), ident.spacings, n_points=ident.n_points, seed=ident.seed)
        reports += identity_residuals_nd(analytic_family_3d(p), ident.spacings, n_points=ident.n_points, seed=ident.seed)
        for rep in reports:
            if p == 0:
                passed = max(rep.residuals) <= t.zero_residual
            else:
                passed = rep.order >= t.min_order
            ok &= passed
            rows.append({**rep.as_row(), "passed": passed})
    return rows, None, {"ok": bool(ok)}


def cmd_oracle(cfg):
    o = cfg.oracle
    t = cfg.thresholds
    s = cfg.solver
    rows, checks = [], {}
    for kappa in o.kappas:
        rep = single_disk_oracle(float(kappa), o.h_levels, box=o.box, tol=s.tol, backend=s.backend, quadrature=s.quadrature)
        rows += rep.as_rows()
        checks[f"single_disk[{kappa:g}]"] = all(r <= t.oracle_ratio for r in rep.ratios)
        rad = radial_constancy_check(float(kappa), o.radial_h_levels, box=o.radial_box, tol=s.tol, backend=s.backend, quadrature=s.quadrature)
        rows += rad.as_rows()
        checks[f"radial_constancy[{kappa:g}]"] = all(r < 1.0 for r in rad.ratios)
    checks["ok"] = all(checks.values())
    return rows, ["check", "kappa", "h", "error", "ratio", "grad_error", "nodes"], checks


def cmd_barrier(cfg):
    geometry = build_geometry(cfg.geometry.delta, cfg.geometry.mu, cfg.geometry.box, delta0=cfg.geometry.delta0)
    c = cfg.coefficient
    smooth = SmoothCoefficient(
        SharpCoefficient(geometry, c.kappa_plus, c.kappa_minus), c.epsilon_fraction * geometry.delta, c.profile
    )
    rows, checks = [], {}
    for K in cfg.fields.K_values:
        for which in ("plus", "minus"):
            prof = barrier_b(smooth, float(K), which, n_samples=int(cfg.fields.barrier_samples))
            inv = barrier_invariants(prof, barrier_reference(smooth, float(K), prof.radii, which))
            passed = all(v for k, v in inv.items() if isinstance(v, bool)) and inv["max_reference_diff"] <= 1e-8
            checks[f"K={K:g},{which}"] = passed
            for r in profile_rows(prof):
                rows.append({"K": float(K), "disk": which, "variant": prof.variant, **r})
    checks["ok"] = all(checks.values())
    return rows, ["K", "disk", "variant", "radius", "b", "slope", "a"], checks


def cmd_report(cfg):
    out = Path(cfg.output.directory)
    merged = {}
    for path in sorted(out.glob("*.csv")):
        merged[path.name] = read_csv(path)
    return None, None, {"ok": True, "merged": merged}


HANDLERS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "identities": cmd_identities,
    "oracle": cmd_oracle,
    "barrier": cmd_barrier,
    "report": cmd_report,
}


def _update_summary(out: Path, command: str, entry: dict) -> None:
    path = out / "summary.json"
    doc = {}
    if path.exists():
        try:
            doc = json.loads(path.read_text())
        except ValueError:
            doc = {}
    doc[command] = entry
    write_json(path, doc)


def run(command: str, cfg: ExperimentConfig, out_dir=None, stamp: str | None = None) -> int:
    """Execute one command; returns the process exit status."""
    if out_dir is not None:
        cfg.output.directory = str(out_dir)
    out = Path(cfg.output.directory)
    stamp = stamp or time.strftime("%Y%m%dT%H%M%S", time.gmtime())
    try:
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=int(cfg.solver.threads)):
            rows, columns, checks = HANDLERS[command](cfg)
        entry = {"checks": {k: v for k, v in checks.items() if k != "merged"}, "config": cfg.as_dict()}
        if rows is not None:
            csv_path = out / f"{command}-{stamp}.csv"
            if "csv" in cfg.output.formats:
                write_csv(csv_path, rows, columns)
            entry["csv"] = csv_path.name
        if command == "report":
            entry["merged"] = checks["merged"]
        if "json" in cfg.output.formats or command == "report":
            _update_summary(out, command, entry)
    except TwoDiskError as exc:
        record = {"command": command, "error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        try:
            write_json(out / "failure.json", record)
        except IoFailure:
            pass
        return 2
    ok = bool(checks.get("ok", False))
    logger.info("%s finished: %s", command, "ok" if ok else "FAILED")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twodisk", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="YAML experiment configuration")
    p.add_argument("--out", help="output directory (overrides output.directory)")
    p.add_argument("--threads", type=int, help="thread count for numerical kernels")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE", help="set a config key, e.g. solver.h=0.0125")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    overrides = list(args.override)
    if args.threads is not None:
        overrides.append(f"solver.threads={args.threads}")
    try:
        cfg = load_config(args.config, overrides, require_coefficient=args.command in NEEDS_COEFFICIENT)
    except ConfigParse as exc:
        record = {"command": args.command, "error": "ConfigParse", "message": str(exc)}
        print(json.dumps(record), file=sys.stderr)
        if args.out:
            try:
                write_json(Path(args.out) / "failure.json", record)
            except IoFailure:
                pass
        return 2
    return run(args.command, cfg, args.out)


__all__ = ["main", "run"]
