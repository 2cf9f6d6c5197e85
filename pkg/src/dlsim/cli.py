"""Command-line harness: ``simulate <config> [--out DIR] [--workers N]
[--experiment NAME]``.

Each experiment writes one or more CSV datasets plus a text report into the
output directory.  Outputs are deterministic: identical configs produce
byte-identical files regardless of worker count.  Exit codes: 0 success,
2 partial row failures, 3 configuration error, 4 solver non-convergence on
a required row.  ``DLS_LOG`` (debug|info|warn) controls verbosity.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, ExperimentConfig, load_config
from .constants import TWO_PI
from .dual_isotope import compare_with_lorentzian
from .lasing_solver import (
    PumpShiftScenario,
    ShiftSweepResult,
    ShiftSweepRow,
    shift_ratio_analytic,
    sweep_shift_ratio,
)
from .report import emit_report
from .validation import (
    coherence_scan,
    coherence_scan_max_deviation,
    fit_saturated_index,
    saturated_index_scan,
)
from .atomic_core import ThreeLevelParams

log = logging.getLogger("dlsim")

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_CONFIG = 3
EXIT_NO_CONVERGENCE = 4


def _csv_float(x: float, digits: int) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.{digits - 1}e}"


def write_csv(path: Path, schema: str, header: Sequence[str],
              rows: Sequence[Sequence], digits: int) -> None:
    """Versioned-header CSV with LF endings and fixed significant digits."""
    lines = [f"# schema: {schema}", ",".join(header)]
    for row in rows:
        cells = [_csv_float(v, digits) if isinstance(v, float) else str(v)
                 for v in row]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


@dataclass
class RunOutcome:
    exit_code: int
    files: list[Path]
    report_path: Optional[Path]


def _sweep_to_rows(result: ShiftSweepResult):
    return [(r.model, float(r.delta_P_hz), float(r.inv_ng), float(r.delta_L_hz),
             float(r.ratio), r.status) for r in result.rows]


_SWEEP_HEADER = ("model", "delta_P_hz", "inv_ng", "delta_L_hz", "ratio", "status")


def _analytic_rows(inv_ng_grid, delta_p_values) -> list[ShiftSweepRow]:
    rows = []
    for inv in inv_ng_grid:
        ng = 1.0 / inv
        ratio = shift_ratio_analytic(ng)
        for dp in delta_p_values:
            dp_hz = dp / TWO_PI
            rows.append(ShiftSweepRow(inv_ng=inv, delta_P_hz=dp_hz,
                                      delta_L_hz=ratio * dp_hz, ratio=ratio,
                                      model="analytic", status="ok"))
    return rows


def _run_ratio_sweep(cfg: ExperimentConfig, out: Path, workers: int,
                     subluminal: bool, stem: str) -> tuple[RunOutcome, ShiftSweepResult]:
    medium = cfg.sub_medium() if subluminal else cfg.dual_medium()
    base = PumpShiftScenario(delta_P=0.0, medium=medium, cavity=cfg.cavity)
    inv_grid = cfg.sweep.inv_ng_grid()
    ng_targets = [1.0 / v for v in inv_grid]
    result = sweep_shift_ratio(base, ng_targets, cfg.sweep.delta_p,
                               workers=workers)
    result.rows.extend(_analytic_rows(inv_grid, cfg.sweep.delta_p))
    result.sort()

    csv_path = out / f"{stem}.csv"
    write_csv(csv_path, f"dlsim.shift_sweep.v1", _SWEEP_HEADER,
              _sweep_to_rows(result), cfg.csv_digits)
    report_path = out / f"{stem}_report.txt"
    emit_report(result, "text", report_path)
    code = EXIT_PARTIAL if result.error_rows() else EXIT_OK
    if not result.ok_rows():
        code = EXIT_NO_CONVERGENCE
    return RunOutcome(code, [csv_path], report_path), result


def _run_fig6(cfg: ExperimentConfig, out: Path) -> RunOutcome:
    dual = cfg.dual_medium(oracle_scale=True)
    ng_sweep = [1.0 / v for v in cfg.sweep.inv_ng_grid()]
    rows = compare_with_lorentzian(dual, cfg.cavity, ng_sweep,
                                   cfg.sweep.delta_p[0],
                                   scaffold=cfg.oracle,
                                   tol_freq=cfg.solver.freq_tol)
    csv_path = out / "fig6_oracle_comparison.csv"
    write_csv(csv_path, "dlsim.oracle_comparison.v1",
              ("n_g", "ratio_oracle", "ratio_lorentzian", "abs_diff",
               "rel_diff", "status"),
              [(float(r.n_g), float(r.ratio_oracle), float(r.ratio_lorentzian),
                float(r.abs_diff), float(r.rel_diff), r.status) for r in rows],
              cfg.csv_digits)

    sweep = ShiftSweepResult()
    dp_hz = cfg.sweep.delta_p[0] / TWO_PI
    for r in rows:
        for model, ratio in (("oracle", r.ratio_oracle),
                             ("lorentzian", r.ratio_lorentzian)):
            sweep.rows.append(ShiftSweepRow(
                inv_ng=1.0 / r.n_g, delta_P_hz=dp_hz,
                delta_L_hz=ratio * dp_hz, ratio=ratio, model=model,
                status=r.status))
    sweep.sort()
    ok = [r for r in rows if r.ok]
    section = ["oracle vs lorentzian agreement:"]
    if ok:
        worst = max(ok, key=lambda r: r.rel_diff)
        section.append(f"  worst relative disagreement = {worst.rel_diff:.3e} "
                       f"at n_g = {worst.n_g:g}")
    section.append(f"  failed rows = {len(rows) - len(ok)}")
    report_path = out / "fig6_report.txt"
    emit_report(sweep, "text", report_path, extra_sections=["\n".join(section)])
    code = EXIT_OK if len(ok) == len(rows) else EXIT_PARTIAL
    if not ok:
        code = EXIT_NO_CONVERGENCE
    return RunOutcome(code, [csv_path], report_path)


def _fig7_params(cfg: ExperimentConfig) -> ThreeLevelParams:
    tl = cfg.three_level
    return ThreeLevelParams(omega_L=tl.probe_rabi, omega_P=tl.pump_rabi,
                            delta_p=tl.pump_detuning, delta_diff=0.0,
                            gamma_eff=tl.pumping_rate,
                            gamma_3=tl.excited_linewidth)


def _run_fig7(cfg: ExperimentConfig, out: Path) -> RunOutcome:
    points = coherence_scan(_fig7_params(cfg), points=cfg.sweep.fig7_points)
    re_dev, im_dev = coherence_scan_max_deviation(points)
    csv_path = out / "fig7_coherence.csv"
    write_csv(csv_path, "dlsim.coherence_scan.v1",
              ("delta_diff_hz", "re_rho31_exact", "re_rho31_approx",
               "im_rho31_exact", "im_rho31_approx"),
              [(p.delta_diff / TWO_PI, p.rho31_exact.real, p.rho31_approx.real,
                p.rho31_exact.imag, p.rho31_approx.imag) for p in points],
              cfg.csv_digits)
    report_path = out / "fig7_report.txt"
    report_path.write_text(
        "coherence reduction check\n"
        "=========================\n"
        f"points: {len(points)}\n"
        f"max normalized deviation, real part: {re_dev:.6e}\n"
        f"max normalized deviation, imag part: {im_dev:.6e}\n",
        encoding="utf-8")
    return RunOutcome(EXIT_OK, [csv_path], report_path)


def _run_fig8(cfg: ExperimentConfig, out: Path) -> RunOutcome:
    from .gain_medium import CavityParams

    points = saturated_index_scan(cfg)
    tl = cfg.three_level
    cavity = CavityParams.from_mirror(tl.cavity_length, tl.wavelength,
                                      tl.mirror_reflectivity)
    fit = fit_saturated_index(points, cavity.Q, tl.pumping_rate)
    csv_path = out / "fig8_saturated_index.csv"
    write_csv(csv_path, "dlsim.saturated_index.v1",
              ("delta_hz", "index_minus_one_exact", "index_minus_one_lorentzian"),
              [(p.delta / TWO_PI, p.index_exact, p.index_lorentzian)
               for p in points], cfg.csv_digits)
    report_path = out / "fig8_report.txt"
    from .report import appendix_bound_lines
    report_path.write_text(
        "saturated index linearity check\n"
        "===============================\n"
        f"points: {len(points)}\n"
        f"fitted slope          : {fit.slope:.9e} s/rad\n"
        f"candidate 1/(Q*gamma) : {fit.slope_candidate_qg:.9e}\n"
        f"candidate 1/(2Q*gamma): {fit.slope_candidate_2qg:.9e}\n"
        f"matched candidate     : {fit.matched_candidate}\n"
        f"R^2                   : {fit.r_squared:.12f}\n"
        + "\n" + "\n".join(appendix_bound_lines()) + "\n",
        encoding="utf-8")
    return RunOutcome(EXIT_OK, [csv_path], report_path)


def run_experiment(cfg: ExperimentConfig, out_dir: Optional[str] = None,
                   workers: Optional[int] = None) -> RunOutcome:
    """Dispatch one experiment; returns the outcome with files and exit code."""
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    n_workers = workers or cfg.solver.workers
    t0 = time.monotonic()
    name = cfg.experiment
    log.info("running experiment %s -> %s", name, out)

    if name == "fig4_sub":
        outcome, _ = _run_ratio_sweep(cfg, out, n_workers, True, "fig4_sub")
    elif name in ("fig4_super", "fig5", "custom_sweep"):
        outcome, _ = _run_ratio_sweep(cfg, out, n_workers, False, name)
    elif name == "fig6":
        outcome = _run_fig6(cfg, out)
    elif name == "fig7":
        outcome = _run_fig7(cfg, out)
    elif name == "fig8":
        outcome = _run_fig8(cfg, out)
    else:  # unreachable: config validation guards the enum
        raise ConfigError(f"unknown experiment {name!r}")
    log.info("experiment %s finished in %.2f s (exit %d)",
             name, time.monotonic() - t0, outcome.exit_code)
    return outcome


def _setup_logging() -> None:
    level = {"debug": logging.DEBUG, "info": logging.INFO,
             "warn": logging.WARNING}.get(os.environ.get("DLS_LOG", "warn"),
                                          logging.WARNING)
    logging.basicConfig(level=level,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Raman-laser frequency-shift transfer simulations")
    parser.add_argument("config", help="path to the experiment config file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--workers", type=int, default=None,
                        help="parallel workers for sweep cells")
    parser.add_argument("--experiment", default=None,
                        help="override the experiment named in the config")
    args = parser.parse_args(argv)
    _setup_logging()

    try:
        cfg = load_config(args.config)
        if args.experiment is not None:
            from .config import EXPERIMENTS
            if args.experiment not in EXPERIMENTS:
                raise ConfigError(f"unknown experiment {args.experiment!r}")
            cfg = replace(cfg, experiment=args.experiment)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        outcome = run_experiment(cfg, out_dir=args.out, workers=args.workers)
    except Exception as exc:  # solver-level failure on a required row
        log.exception("experiment failed")
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    for f in outcome.files:
        print(f"wrote {f}")
    if outcome.report_path:
        print(f"wrote {outcome.report_path}")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
