"""Self-consistent lasing frequency under pump-frequency shifts.

The operating laser frequency obeys the resonance condition
``omega * n_s(omega) = omega_L0`` with the cavity constant fixed; shifting
the Raman pump(s) by delta_P translates the saturated gain/index profile and
moves the root.  The transfer ratio delta_L/delta_P equals (n_g - 1)/n_g in
the small-shift limit, with n_g the saturated group index at line center:
close to +1 for a strongly subluminal laser, large and negative
(~ -1/n_g) for a superluminal one.

All root finding happens in delta_L = omega - omega_L0 coordinates with
index values handled as n - 1, which keeps the resonance residual
meaningful far below the float64 granularity of the optical frequency.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from .constants import TWO_PI
from .gain_medium import (
    BelowThreshold,
    CavityParams,
    DualMediumParams,
    MediumParams,
    lasing_range,
    linearized_index_super,
    saturated_field_sub,
    saturated_field_super,
    saturated_index_minus_one_sub,
    saturated_index_minus_one_super,
)

__all__ = [
    "PumpShiftScenario",
    "LasingSolution",
    "NoLasingSolution",
    "ShiftSweepRow",
    "ShiftSweepResult",
    "group_index",
    "solve_lasing_frequency",
    "shift_ratio_analytic",
    "sweep_shift_ratio",
    "calibrate_dip_gain",
    "subluminal_medium_for_group_index",
    "center_group_index",
    "DEFAULT_RESIDUAL_TOL",
]

DEFAULT_RESIDUAL_TOL = TWO_PI * 1e-4   # rad/s; 0.1 mHz resonance residual


class NoLasingSolution(RuntimeError):
    """No root of the resonance condition inside the lasing window."""


Medium = Union[MediumParams, DualMediumParams]


@dataclass(frozen=True)
class PumpShiftScenario:
    """A medium/cavity pair subjected to a common pump-frequency shift."""

    delta_P: float          # rad/s, applied to all Raman pumps
    medium: Medium
    cavity: CavityParams


@dataclass(frozen=True)
class LasingSolution:
    omega_L: float      # solved lasing frequency, rad/s
    delta_L: float      # omega_L - omega_L0
    residual: float     # omega_L*n_s(omega_L) - omega_L0 at the root
    n_g: float          # saturated group index at line center
    iterations: int


def group_index(index_minus_one: Callable[[float], float], omega0: float,
                step: Optional[float] = None) -> float:
    """Group index n_g = d(n*omega)/d(omega) at ``omega0``.

    ``index_minus_one`` maps detuning from omega0 to n - 1 (full-precision
    offsets; passing a function that returns n itself wastes ~7 digits).
    Central differences with one Richardson extrapolation; when ``step`` is
    omitted an adaptive loop shrinks the step until the extrapolation is
    stable.
    """
    def slope(h: float) -> float:
        gp = (omega0 + h) * index_minus_one(h)
        gm = (omega0 - h) * index_minus_one(-h)
        return (gp - gm) / (2.0 * h)

    def richardson(h: float) -> tuple[float, float]:
        s1, s2 = slope(h), slope(0.5 * h)
        return (4.0 * s2 - s1) / 3.0, abs(s1 - s2)

    if step is not None:
        val, _ = richardson(step)
    else:
        h = abs(omega0) * 1e-9
        val, err = richardson(h)
        for _ in range(12):
            h *= 0.25
            nval, nerr = richardson(h)
            if not math.isfinite(nval):
                break
            if nerr >= err:        # noise floor reached
                break
            val, err = nval, nerr
            if err <= 1e-10 * (1.0 + abs(val)):
                break
    ng = 1.0 + val
    if not math.isfinite(ng):
        raise ArithmeticError("group index derivative is not finite")
    return ng


def _index_minus_one_fn(medium: Medium, cavity: CavityParams) -> Callable[[float], float]:
    if isinstance(medium, DualMediumParams):
        return lambda d: saturated_index_minus_one_super(medium, cavity, d)
    return lambda d: saturated_index_minus_one_sub(medium, cavity, d)


def _field_sq_fn(medium: Medium, cavity: CavityParams) -> Callable[[float], float]:
    if isinstance(medium, DualMediumParams):
        return lambda d: saturated_field_super(medium, cavity, d)
    return lambda d: saturated_field_sub(medium, cavity, d)


def _narrow_linewidth(medium: Medium) -> float:
    if isinstance(medium, DualMediumParams):
        return medium.medium2.gamma
    return medium.gamma


def center_group_index(medium: Medium, cavity: CavityParams,
                       step: Optional[float] = None) -> float:
    """Saturated group index at the unshifted line center."""
    if step is None:
        step = _narrow_linewidth(medium) * 1e-6
    return group_index(_index_minus_one_fn(medium, cavity), cavity.omega_L0, step)


def solve_lasing_frequency(s: PumpShiftScenario,
                           tol: float = DEFAULT_RESIDUAL_TOL) -> LasingSolution:
    """Solve the resonance condition for the shifted laser frequency.

    The root is bracketed by scanning outward from delta_L = 0 toward the
    small-shift prediction (n_g-1)/n_g * delta_P (saturation only pulls the
    root back toward zero), then refined with Brent's method; among multiple
    roots the one nearest the unshifted frequency is returned.  Raises
    :class:`BelowThreshold` when the scan region leaves the lasing window
    and :class:`NoLasingSolution` when no sign change exists in it.
    """
    medium, cavity, dp = s.medium, s.cavity, s.delta_P
    omega0 = cavity.omega_L0
    n_g = center_group_index(medium, cavity)

    if dp == 0.0:
        # n_s(omega_L0) = 1 exactly: the unperturbed laser is a fixed point
        return LasingSolution(omega_L=omega0, delta_L=0.0, residual=0.0,
                              n_g=n_g, iterations=0)

    m_fn = _index_minus_one_fn(medium, cavity)
    lo_edge, hi_edge = lasing_range(_field_sq_fn(medium, cavity),
                                    scale=_narrow_linewidth(medium))

    def resonance(delta_l: float) -> float:
        return delta_l + (omega0 + delta_l) * m_fn(delta_l - dp)

    if n_g == 0.0:
        raise NoLasingSolution("group index exactly zero; transfer ratio unbounded")
    d_hat = (n_g - 1.0) / n_g * dp
    span = 1.2 * abs(d_hat)
    sign = math.copysign(1.0, d_hat) if d_hat != 0.0 else 1.0
    grid = np.concatenate(([0.0], sign * span * np.logspace(-9.0, 0.0, 500)))
    lo_lim, hi_lim = dp + lo_edge, dp + hi_edge
    grid = grid[(grid > lo_lim) & (grid < hi_lim) | (grid == 0.0)]
    if not ((lo_lim < 0.0 < hi_lim) and len(grid) >= 2):
        raise BelowThreshold(-1.0)

    vals = np.array([resonance(x) for x in grid])
    bracket = None
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            bracket = (grid[i], grid[i])
            break
        if vals[i] * vals[i + 1] < 0.0:
            bracket = (grid[i], grid[i + 1])
            break
    if bracket is None:
        # fall back to a linear scan of the whole window
        fine = np.linspace(lo_lim * 0.999, hi_lim * 0.999, 4001)
        fvals = np.array([resonance(x) for x in fine])
        crossings = np.nonzero(fvals[:-1] * fvals[1:] < 0.0)[0]
        if len(crossings) == 0:
            raise NoLasingSolution("no resonance root inside the lasing window")
        nearest = min(crossings, key=lambda i: min(abs(fine[i]), abs(fine[i + 1])))
        bracket = (fine[nearest], fine[nearest + 1])

    if bracket[0] == bracket[1]:
        root, iterations = bracket[0], 0
    else:
        root, info = brentq(resonance, bracket[0], bracket[1],
                            xtol=1e-12, rtol=8.9e-16, full_output=True)
        iterations = info.iterations
    residual = resonance(root)
    if abs(residual) > tol:
        raise NoLasingSolution(
            f"root refinement stalled: residual {residual:.3e} rad/s exceeds {tol:.3e}")
    return LasingSolution(omega_L=omega0 + root, delta_L=root,
                          residual=residual, n_g=n_g, iterations=iterations)


def shift_ratio_analytic(n_g: float) -> float:
    """Small-shift transfer ratio delta_L/delta_P = (n_g - 1)/n_g."""
    if n_g == 0.0:
        raise ValueError("transfer ratio has a pole at zero group index")
    return (n_g - 1.0) / n_g


def calibrate_dip_gain(dual: DualMediumParams, cavity: CavityParams,
                       ng_target: float, rel_tol: float = 1e-8,
                       g2_seed: Optional[float] = None) -> DualMediumParams:
    """Adjust the depletion amplitude G2 until the linearized group index
    hits ``ng_target``; 1-D bisection with automatic bracket expansion.

    n_g is monotone decreasing in G2, from the no-dip (subluminal) value
    down through zero; unreachable targets raise ``ValueError``.
    """
    def ng_of(g2: float) -> float:
        d = dual.with_dip_gain(g2)
        alpha_tilde, _ = linearized_index_super(d, cavity)
        return 1.0 + alpha_tilde * cavity.omega_L0

    lo = g2_seed * 0.5 if g2_seed else 1e-12
    hi = g2_seed * 2.0 if g2_seed else 1e-3
    f_lo, f_hi = ng_of(lo) - ng_target, ng_of(hi) - ng_target
    for _ in range(200):
        if f_lo > 0.0 >= f_hi:
            break
        if f_lo <= 0.0:
            lo *= 0.25
            f_lo = ng_of(lo) - ng_target
        if f_hi > 0.0:
            hi *= 4.0
            if hi > dual.G1:
                raise ValueError(
                    f"group index {ng_target} unreachable by dip-amplitude tuning")
            f_hi = ng_of(hi) - ng_target
    else:
        raise ValueError(f"no G2 bracket for group index {ng_target}")
    g2 = brentq(lambda g: ng_of(g) - ng_target, lo, hi, rtol=rel_tol)
    return dual.with_dip_gain(g2)


def subluminal_medium_for_group_index(ng_target: float, cavity: CavityParams,
                                      gain_over_loss: float = 50.0,
                                      N: float = 1e16,
                                      theta: float = 2.1e-3) -> MediumParams:
    """Single medium whose saturated index slope 1/(Q*gamma) realizes
    n_g = 1 + omega_L0/(Q*gamma); closed-form in gamma."""
    if ng_target <= 1.0:
        raise ValueError("subluminal group index must exceed 1")
    gamma = cavity.omega_L0 / (cavity.Q * (ng_target - 1.0))
    peak_gain = gain_over_loss / cavity.Q
    return MediumParams.from_peak_gain(peak_gain, gamma, N, theta)


@dataclass(frozen=True)
class ShiftSweepRow:
    inv_ng: float
    delta_P_hz: float
    delta_L_hz: float
    ratio: float
    model: str          # "analytic" | "lorentzian" | "oracle"
    status: str         # "ok" or an error code

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass
class ShiftSweepResult:
    rows: list[ShiftSweepRow] = field(default_factory=list)

    def sort(self) -> "ShiftSweepResult":
        self.rows.sort(key=lambda r: (r.model, r.delta_P_hz, r.inv_ng))
        return self

    def ok_rows(self) -> list[ShiftSweepRow]:
        return [r for r in self.rows if r.ok]

    def error_rows(self) -> list[ShiftSweepRow]:
        return [r for r in self.rows if not r.ok]


def _sweep_cell(args) -> ShiftSweepRow:
    medium, cavity, ng_target, delta_p_hz = args
    try:
        ng = center_group_index(medium, cavity)
        sol = solve_lasing_frequency(PumpShiftScenario(
            delta_P=TWO_PI * delta_p_hz, medium=medium, cavity=cavity))
        return ShiftSweepRow(inv_ng=1.0 / ng, delta_P_hz=delta_p_hz,
                             delta_L_hz=sol.delta_L / TWO_PI,
                             ratio=sol.delta_L / sol.delta_P if sol.delta_P else 0.0,
                             model="lorentzian", status="ok")
    except BelowThreshold:
        return ShiftSweepRow(1.0 / ng_target if ng_target else math.nan,
                             delta_p_hz, math.nan, math.nan,
                             "lorentzian", "below-threshold")
    except NoLasingSolution:
        return ShiftSweepRow(1.0 / ng_target if ng_target else math.nan,
                             delta_p_hz, math.nan, math.nan,
                             "lorentzian", "no-root")


def sweep_shift_ratio(base: PumpShiftScenario, ng_targets: Sequence[float],
                      delta_P_values: Sequence[float],
                      workers: int = 1) -> ShiftSweepResult:
    """Transfer-ratio table over a grid of group indices and pump shifts.

    For each target the medium is recalibrated (dip amplitude G2 for the
    dual medium, linewidth for the single one), then the resonance condition
    is solved at every pump shift.  ``delta_P_values`` are in rad/s.
    Calibration failures and below-threshold cells become per-row error
    markers; the sweep continues.  Rows are sorted by (model, delta_P,
    1/n_g) regardless of worker scheduling.
    """
    cells = []
    result = ShiftSweepResult()
    g2_seed = None
    for ng_t in ng_targets:
        try:
            if isinstance(base.medium, DualMediumParams):
                medium = calibrate_dip_gain(base.medium, base.cavity, ng_t,
                                            g2_seed=g2_seed)
                g2_seed = medium.G2
            else:
                medium = subluminal_medium_for_group_index(ng_t, base.cavity,
                                                           N=base.medium.N,
                                                           theta=base.medium.theta)
        except ValueError:
            for dp in delta_P_values:
                result.rows.append(ShiftSweepRow(
                    1.0 / ng_t if ng_t else math.nan, dp / TWO_PI,
                    math.nan, math.nan, "lorentzian", "calibration-failed"))
            continue
        for dp in delta_P_values:
            cells.append((medium, base.cavity, ng_t, dp / TWO_PI))

    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            result.rows.extend(pool.map(_sweep_cell, cells))
    else:
        result.rows.extend(_sweep_cell(c) for c in cells)
    return result.sort()
