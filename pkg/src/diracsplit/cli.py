"""Config-driven command line: check | spectrum | split | reconstruct.

Exit codes: 0 success, 1 structural validation failure, 2 numerical
failure (tolerance, convergence, tachyonic mode, unsupported analytic
form), 3 config/parse failure.  Reports are written even when a
tolerance fails.  Every number in a report comes from one library
call; the CLI only formats.

NumPy is imported lazily so DIRAC_SPLIT_THREADS can cap the BLAS
thread pools before they start.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_CONFIG = 3


def _cap_threads():
    val = os.environ.get("DIRAC_SPLIT_THREADS", "")
    if val and val != "0":
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, val)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="diracsplit",
        description="Split the Dirac equation in longitudinal external "
                    "fields and verify the pieces numerically.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, doc in (
            ("check", "validate the potential and its commutator condition"),
            ("spectrum", "transverse Pauli eigenvalues"),
            ("split", "split a test solution and verify the subequations"),
            ("reconstruct", "full separation pipeline with convergence check")):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--tolerance", type=float, default=None,
                       help="override solver tolerance")
        p.add_argument("--skip-check", action="store_true",
                       help="skip the structural gate (testing only)")
        if name in ("spectrum", "reconstruct"):
            p.add_argument("--branch", type=int, choices=(1, 2), default=None)
        if name == "spectrum":
            p.add_argument("--modes", type=int, default=None)
    return ap


def main(argv=None) -> int:
    _cap_threads()
    args = _parser().parse_args(argv)
    from .config import load_config
    from .errors import (ConfigError, ConvergenceFailure, DiracSplitError,
                         TachyonicMode, ToleranceExceeded, UnsupportedField,
                         ZeroNorm)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.tolerance is not None:
        cfg.tolerance = args.tolerance
    if getattr(args, "branch", None) is not None:
        cfg.branch = args.branch
    if getattr(args, "modes", None) is not None:
        cfg.modes = args.modes
    if args.out is not None:
        cfg.out_dir = args.out
    handler = {"check": _cmd_check, "spectrum": _cmd_spectrum,
               "split": _cmd_split, "reconstruct": _cmd_reconstruct}[args.command]
    try:
        return handler(cfg, args)
    except (ToleranceExceeded, ConvergenceFailure, TachyonicMode,
            UnsupportedField, ZeroNorm) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DiracSplitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# shared pieces

def _grids(cfg):
    from .lattice import AxisSpec, Grid2D
    tr = Grid2D.transverse(AxisSpec(cfg.transverse.min, cfg.transverse.max,
                                    cfg.transverse.n))
    lon = Grid2D.longitudinal(AxisSpec(cfg.longitudinal.min, cfg.longitudinal.max,
                                       cfg.longitudinal.n))
    return tr, lon


def _structural_gate(cfg, report, skip: bool) -> bool:
    from .potentials import validate_longitudinal
    v = validate_longitudinal(cfg.potential)
    report.tables["validation"] = {
        "passed": v.passed,
        "failures": [{"component": name, "coords": coords}
                     for name, coords in v.failures],
    }
    if not v.passed:
        report.flags.append("structural_validation_failed")
    return v.passed or skip


def _planewave_solution(cfg):
    """Analytic plane-wave Dirac solution; materialized onto the x3 axis
    when the potential multiplies the longitudinal profile."""
    from .errors import UnsupportedField
    from .fields import BispinorField
    from .lattice import AxisSpec
    m, p3 = cfg.m, cfg.p3
    p0 = cfg.energy_sign * math.sqrt(m * m + p3 * p3)
    c1, c2 = cfg.coef1, cfg.coef2
    coeffs = (c1, c2, c1 * (p0 - p3) / m, c2 * (p0 + p3) / m)
    psi = BispinorField.plane_wave(coeffs, p0, p3)
    used = set().union(*(a.coords() for a in cfg.potential.A))
    if 0 in used:
        raise UnsupportedField(
            "x0-dependent potentials have no plane-wave solutions to split")
    if used & {1, 2}:
        raise UnsupportedField(
            "potential with transverse structure: use scenario.solution = separated")
    if 3 in used:
        axis = AxisSpec(cfg.longitudinal.min, cfg.longitudinal.max,
                        cfg.longitudinal.n)
        psi = psi.materialize(axis)
    return psi


def _separated_solution(cfg, grid, center=None):
    """One separated branch on the given transverse grid.

    The target eigenvalue level is located once by multiplicity
    scanning (center=None) and the per-grid mode is the cluster member
    nearest that center, with beta regenerated through the ladder.
    Returns (solution, center) so refined grids reuse the level.
    """
    import numpy as np

    from .errors import ConvergenceFailure
    from .lattice import ComplexField2D
    from .potentials import field_strengths
    from .separation import (Branch, SeparatedSolution, TransverseMode,
                             effective_mass, eigensolve_near, pauli_blocks,
                             scan_levels, solve_longitudinal_planewave,
                             transverse_ladders)
    branch = Branch(cfg.branch)
    p = cfg.potential
    if center is None:
        hmax = float(np.abs(grid.evaluate(field_strengths(p).H)).max())
        lam_max = cfg.lambda_max or max(1.0, 2.0 * abs(p.q) * hmax * (cfg.level + 1) + 1.0)
        for _ in range(3):
            levels = scan_levels(p, grid, branch, lam_max=lam_max, method=cfg.method)
            if len(levels) > cfg.level:
                break
            lam_max *= 2.0
        else:
            raise ConvergenceFailure(
                f"could not locate level {cfg.level} below lambda2 = {lam_max:g}")
        center = levels[cfg.level].center
    up, _ = pauli_blocks(p, grid, branch)
    vals, vecs = eigensolve_near(up, float(center), k=min(8, up.shape[0] - 2))
    j = int(np.argmin(np.abs(vals - center)))
    lam2 = float(vals[j])
    psi = ComplexField2D(grid, vecs[:, j].reshape(grid.shape))
    dm_op, dp_op = transverse_ladders(p, grid)
    first = dm_op if branch is Branch.DOTTED1 else dp_op
    beta = first.apply(psi) * (1.0 / cfg.m)
    total = math.sqrt(psi.norm() ** 2 + beta.norm() ** 2)
    psi, beta = psi * (1.0 / total), beta * (1.0 / total)
    mode = TransverseMode(lambda2=lam2, psi=psi, beta=beta, branch=branch,
                          source_block="up", degenerate=True,
                          beta_from="ladder", eigen_residual=0.0)
    lon = solve_longitudinal_planewave(effective_mass(cfg.m, lam2), cfg.p3,
                                       branch, sign=cfg.energy_sign)
    sep = SeparatedSolution(mode=mode, longitudinal=lon, m=cfg.m, q=p.q,
                            potential=p)
    return sep, center


# ---------------------------------------------------------------------------
# commands

def _cmd_check(cfg, args) -> int:
    from .potentials import commutator_residual, field_strengths
    from .reporting import Report
    t0 = time.time()
    report = Report(command="check", config_echo=cfg.echo())
    ok = _structural_gate(cfg, report, skip=False)
    fs = field_strengths(cfg.potential)
    report.tables["field_strengths"] = {"E": repr(fs.E), "H": repr(fs.H)}
    report.residuals["commutator"] = commutator_residual(cfg.potential)
    report.exit_status = EXIT_OK if ok else EXIT_VALIDATION
    report.wall_time_s = time.time() - t0
    report.write(cfg.out_dir)
    if not ok:
        bad = ", ".join(f["component"]
                        for f in report.tables["validation"]["failures"])
        print(f"validation FAILED: forbidden coordinates in {bad}",
              file=sys.stderr)
    else:
        print(f"check passed; commutator residual "
              f"{report.residuals['commutator']:.3e}")
    return report.exit_status


def _cmd_spectrum(cfg, args) -> int:
    from .reporting import Report, write_csv
    from .separation import Branch, effective_mass, solve_transverse
    t0 = time.time()
    report = Report(command="spectrum", config_echo=cfg.echo())
    if not _structural_gate(cfg, report, args.skip_check):
        report.exit_status = EXIT_VALIDATION
        report.wall_time_s = time.time() - t0
        report.write(cfg.out_dir)
        return EXIT_VALIDATION
    tr, _ = _grids(cfg)
    branch = Branch(cfg.branch)
    modes = solve_transverse(cfg.potential, tr, branch, cfg.modes, m=cfg.m,
                             method=cfg.method)
    rows = []
    for i, mode in enumerate(modes):
        meff = effective_mass(cfg.m, mode.lambda2)
        rows.append((cfg.branch, i, mode.lambda2, meff, mode.eigen_residual))
        report.spectrum.append({
            "branch": cfg.branch, "index": i, "lambda2": mode.lambda2,
            "eff_mass": meff, "eigen_residual": mode.eigen_residual,
            "source_block": mode.source_block, "degenerate": mode.degenerate})
    write_csv(Path(cfg.out_dir) / "spectrum.csv",
              ("branch", "index", "lambda2", "eff_mass", "eigen_residual"), rows)
    report.wall_time_s = time.time() - t0
    report.write(cfg.out_dir)
    print(f"spectrum: {len(rows)} modes, lambda2 in "
          f"[{rows[0][2]:.6g}, {rows[-1][2]:.6g}]")
    return EXIT_OK


def _cmd_split(cfg, args) -> int:
    from .clifford import ProjectorId
    from .errors import ToleranceExceeded
    from .reporting import Report
    from .separation import reconstruct
    from .splitting import (dirac_residual, identity_residuals, recombine,
                            split, subequation_residual)
    t0 = time.time()
    report = Report(command="split", config_echo=cfg.echo())
    if not _structural_gate(cfg, report, args.skip_check):
        report.exit_status = EXIT_VALIDATION
        report.wall_time_s = time.time() - t0
        report.write(cfg.out_dir)
        return EXIT_VALIDATION
    if cfg.solution == "planewave":
        psi = _planewave_solution(cfg)
    else:
        tr, _ = _grids(cfg)
        sep, _ = _separated_solution(cfg, tr)
        psi = reconstruct(sep)
        report.tables["separated"] = {"lambda2": sep.mode.lambda2,
                                      "eff_mass": sep.longitudinal.eff_mass}
        report.tables["grid"] = {"h": tr.axis_a.h}
    p, m = cfg.potential, cfg.m
    report.residuals["dirac"] = dirac_residual(psi, p, m)
    pair = split(psi, p, m)
    report.residuals["additivity"] = pair.additivity
    r1, r2 = identity_residuals(pair, p)
    report.residuals["identity_1"] = r1
    report.residuals["identity_2"] = r2
    for name, fld, pid in (("subeq_P4", pair.psi1, ProjectorId.P4),
                           ("subeq_P3", pair.psi2, ProjectorId.P3)):
        sub = subequation_residual(fld, pid, p, m)
        report.residuals[name] = sub.total
        report.residuals[name + "_identity_row"] = sub.identity
        if sub.empty:
            report.flags.append(name + "_empty_component")
    rec = recombine(pair)
    report.residuals["recombine"] = (rec - psi).norm() / psi.norm()
    worst = max(report.residuals.values())
    report.tables["tolerance"] = {"value": cfg.tolerance, "worst": worst}
    ok = worst <= cfg.tolerance
    report.exit_status = EXIT_OK if ok else EXIT_NUMERICAL
    report.wall_time_s = time.time() - t0
    report.write(cfg.out_dir)
    print("split residuals: " + ", ".join(
        f"{k}={v:.3e}" for k, v in sorted(report.residuals.items())))
    if not ok:
        raise ToleranceExceeded(
            f"worst residual {worst:.3e} > tolerance {cfg.tolerance:g}")
    return EXIT_OK


def _cmd_reconstruct(cfg, args) -> int:
    from .fields import BispinorField
    from .lattice import AxisSpec, Grid2D
    from .reporting import Report, write_csv
    from .separation import Branch, reconstruct, solve_longitudinal_planewave
    from .splitting import dirac_residual
    t0 = time.time()
    report = Report(command="reconstruct", config_echo=cfg.echo())
    if not _structural_gate(cfg, report, args.skip_check):
        report.exit_status = EXIT_VALIDATION
        report.wall_time_s = time.time() - t0
        report.write(cfg.out_dir)
        return EXIT_VALIDATION
    p, m, p3 = cfg.potential, cfg.m, cfg.p3
    branch = Branch(cfg.branch)

    if p.is_zero():
        # free case: lambda2 = 0 with a transversally constant mode
        lon = solve_longitudinal_planewave(m, p3, branch, sign=cfg.energy_sign)
        at = lon.alpha_tilde.coef
        coeffs = ((0.0, at, 0.0, 1.0) if branch is Branch.DOTTED1
                  else (at, 0.0, 1.0, 0.0))
        psi = BispinorField.plane_wave(coeffs, lon.p0, lon.p3)
        resid = dirac_residual(psi, p, m)
        report.residuals["dirac_h"] = resid
        report.residuals["dispersion"] = lon.residuals["dispersion"]
        report.convergence.append({"h": 0.0, "residual": resid, "lambda2": 0.0})
        report.flags.append("exact-mode")
        report.wall_time_s = time.time() - t0
        report.write(cfg.out_dir)
        print(f"reconstruct (analytic): dirac residual {resid:.3e}")
        return EXIT_OK

    n = cfg.transverse.n
    grids = [Grid2D.transverse(AxisSpec(cfg.transverse.min, cfg.transverse.max, k))
             for k in (n, 2 * n + 1)]  # n -> 2n+1 halves h exactly
    center = None
    seps = []
    residuals = []
    for grid in grids:
        sep, center = _separated_solution(cfg, grid, center)
        seps.append(sep)
        residuals.append(dirac_residual(reconstruct(sep), p, m))
        report.convergence.append({"h": grid.axis_a.h, "residual": residuals[-1],
                                   "lambda2": sep.mode.lambda2})
    lam2 = seps[0].mode.lambda2
    lon0 = seps[0].longitudinal
    report.residuals["dirac_h"] = residuals[0]
    report.residuals["dirac_h_half"] = residuals[1]
    report.residuals["dispersion"] = abs(lon0.p0 ** 2 - p3 * p3 - m * m - lam2)
    if residuals[0] < 1e-13:
        report.flags.append("exact-mode")
    else:
        report.tables["convergence_ratio"] = residuals[0] / residuals[1]

    samples = reconstruct(seps[0]).sample_transverse(grids[0])
    mid_a, mid_b = grids[0].shape[0] // 2, grids[0].shape[1] // 2
    rows = []
    for i, x in enumerate(grids[0].axis_a.points):
        rows.append(("x1", x) + tuple(abs(c[i, mid_b]) ** 2 for c in samples))
    for j, x in enumerate(grids[0].axis_b.points):
        rows.append(("x2", x) + tuple(abs(c[mid_a, j]) ** 2 for c in samples))
    write_csv(Path(cfg.out_dir) / "samples.csv",
              ("axis", "coord", "abs2_xi1", "abs2_xi2", "abs2_eta1", "abs2_eta2"),
              rows)
    report.wall_time_s = time.time() - t0
    report.write(cfg.out_dir)
    ratio = report.tables.get("convergence_ratio")
    print(f"reconstruct: residual {residuals[0]:.3e} -> {residuals[1]:.3e}"
          + (f" (ratio {ratio:.2f})" if ratio else " (exact mode)"))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
