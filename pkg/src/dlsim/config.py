"""Experiment configuration: strict INI-style files, Hz at the boundary.

Config files use flat ``key = value`` pairs in nested sections; every
frequency-like quantity is given in Hz and converted to rad/s exactly once
on load.  Unknown sections or keys are rejected.  An empty file yields the
full default parameter set (the published superluminal example: broad gain
1.2e5 / 2pi*30 MHz, dip 2pi*10 MHz, N1 = 9e6 m^-3, N2 = 1e11 m^-3,
Q = 1e6).
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .constants import TWO_PI
from .dual_isotope import OracleScaffold
from .gain_medium import CavityParams, DualMediumParams, MediumParams

__all__ = ["ExperimentConfig", "ConfigError", "load_config", "write_config",
           "EXPERIMENTS"]

EXPERIMENTS = ("fig4_sub", "fig4_super", "fig5", "fig6", "fig7", "fig8",
               "custom_sweep")


class ConfigError(ValueError):
    """Malformed or invalid configuration; message names the offending field."""


@dataclass(frozen=True)
class SweepSpec:
    inv_ng_min: float = 1.0
    inv_ng_max: float = 1e4
    inv_ng_points: int = 40
    inv_ng_values: Optional[tuple[float, ...]] = None
    delta_p: tuple[float, ...] = (TWO_PI * 1.0,)      # rad/s
    fig7_points: int = 81
    fig8_points: int = 41

    def inv_ng_grid(self) -> list[float]:
        if self.inv_ng_values is not None:
            return list(self.inv_ng_values)
        n = self.inv_ng_points
        lo, hi = math.log10(self.inv_ng_min), math.log10(self.inv_ng_max)
        return [10.0 ** (lo + (hi - lo) * i / (n - 1)) for i in range(n)] \
            if n > 1 else [self.inv_ng_min]


@dataclass(frozen=True)
class SolverSpec:
    residual_tol: float = TWO_PI * 1e-4    # rad/s
    max_iterations: int = 200
    relaxation: float = 0.7
    freq_tol: float = 0.01                 # rad/s, oracle iteration
    field_tol: float = 1e-9                # relative, oracle iteration
    workers: int = 1


@dataclass(frozen=True)
class ThreeLevelSpec:
    """Atomic parameters for the reduction-validation experiments."""

    probe_rabi: float = 1e5                # rad/s
    pump_rabi: float = 1e7
    pump_detuning: float = 6.28e9
    pumping_rate: float = 1e6
    excited_linewidth: float = 3.6e7
    dipole: float = 2.53e-29               # C m
    density: float = 1e16                  # m^-3
    gain_over_loss: float = 4.0            # G0 * Q for the saturated-index run
    mirror_reflectivity: float = 0.95
    cavity_length: float = 0.1             # m
    wavelength: float = 780e-9             # m
    pump_detuning_saturated: float = 6.28e12   # rad/s, keeps elimination valid when lasing


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "fig5"
    cavity: CavityParams = field(default_factory=lambda: CavityParams(Q=1e6))
    gain_peak: float = 1.2e5
    gain_linewidth: float = TWO_PI * 30e6
    gain_density: float = 9e6
    dip_peak: float = 1e-3                  # pre-calibration seed; n_g targets override
    dip_linewidth: float = TWO_PI * 10e6
    dip_density: float = 1e11
    oracle_gain_peak: float = 2e-5          # gentler gain for the density-matrix oracle
    sweep: SweepSpec = field(default_factory=SweepSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    oracle: OracleScaffold = field(default_factory=OracleScaffold)
    three_level: ThreeLevelSpec = field(default_factory=ThreeLevelSpec)
    output_dir: str = "out"
    csv_digits: int = 12

    def dual_medium(self, oracle_scale: bool = False) -> DualMediumParams:
        g1 = self.oracle_gain_peak if oracle_scale else self.gain_peak
        theta = self.oracle.theta
        m1 = MediumParams.from_peak_gain(g1, self.gain_linewidth,
                                         self.gain_density, theta)
        m2 = MediumParams.from_peak_gain(self.dip_peak, self.dip_linewidth,
                                         self.dip_density, theta)
        return DualMediumParams(medium1=m1, medium2=m2)

    def sub_medium(self) -> MediumParams:
        return MediumParams.from_peak_gain(self.gain_peak, self.gain_linewidth,
                                           self.gain_density, self.oracle.theta)


_SCHEMA = {
    "experiment": {"name"},
    "cavity": {"q", "length_m", "wavelength_m", "reflectivity",
               "laser_frequency_hz"},
    "gain": {"peak_gain", "linewidth_hz", "density_per_m3"},
    "dip": {"peak_gain", "linewidth_hz", "density_per_m3"},
    "oracle": {"theta", "pump_detuning_hz", "excited_linewidth_hz",
               "gain_peak"},
    "sweep": {"inv_ng_min", "inv_ng_max", "inv_ng_points", "inv_ng_values",
              "delta_p_hz", "fig7_points", "fig8_points"},
    "solver": {"residual_tol_hz", "max_iterations", "relaxation",
               "freq_tol_hz", "field_tol", "workers"},
    "three_level": {"probe_rabi_hz", "pump_rabi_hz", "pump_detuning_hz",
                    "pumping_rate_hz", "excited_linewidth_hz", "dipole_cm",
                    "density_per_m3", "gain_over_loss", "mirror_reflectivity",
                    "cavity_length_m", "wavelength_m",
                    "pump_detuning_saturated_hz"},
    "output": {"directory", "csv_digits"},
}


def _positive(value: float, name: str) -> float:
    if not (value > 0.0) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
    return value


def _parse_float(raw: str, name: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: not a number: {raw!r}") from exc


def _parse_int(raw: str, name: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: not an integer: {raw!r}") from exc


def _parse_float_list(raw: str, name: str) -> tuple[float, ...]:
    return tuple(_parse_float(tok.strip(), name)
                 for tok in raw.split(",") if tok.strip())


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a configuration file.

    Raises :class:`ConfigError` with the offending field (or the parser's
    line information for syntax errors).  Missing keys take the defaults;
    per-experiment sweep defaults are applied when the sweep section leaves
    them unset.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str.lower  # type: ignore[assignment]
    text = Path(path).read_text(encoding="utf-8")
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")

    def get(section: str, key: str) -> Optional[str]:
        if parser.has_section(section) and key in parser[section]:
            return parser[section][key]
        return None

    cfg = ExperimentConfig()

    name = get("experiment", "name") or cfg.experiment
    if name not in EXPERIMENTS:
        raise ConfigError(
            f"experiment.name must be one of {', '.join(EXPERIMENTS)}; got {name!r}")

    # cavity
    q_raw = get("cavity", "q")
    refl_raw = get("cavity", "reflectivity")
    length = _positive(_parse_float(get("cavity", "length_m") or "0.1",
                                    "cavity.length_m"), "cavity.length_m")
    wavelength = _positive(_parse_float(get("cavity", "wavelength_m") or "780e-9",
                                        "cavity.wavelength_m"), "cavity.wavelength_m")
    omega_l0 = TWO_PI * _positive(
        _parse_float(get("cavity", "laser_frequency_hz") or "384.230e12",
                     "cavity.laser_frequency_hz"), "cavity.laser_frequency_hz")
    refl = _parse_float(refl_raw, "cavity.reflectivity") if refl_raw else None
    if q_raw is not None:
        q = _parse_float(q_raw, "cavity.q")
        if q <= 0:
            raise ConfigError(f"cavity.q must be positive, got {q}")
        cavity = CavityParams(Q=q, L0=length, lambda0=wavelength, R=refl,
                              omega_L0=omega_l0)
    elif refl is not None:
        cavity = CavityParams.from_mirror(length, wavelength, refl,
                                          omega_L0=omega_l0)
    else:
        cavity = CavityParams(Q=1e6, L0=length, lambda0=wavelength,
                              omega_L0=omega_l0)

    def med(section: str, peak_d: float, width_d: float, dens_d: float):
        peak = _parse_float(get(section, "peak_gain") or repr(peak_d),
                            f"{section}.peak_gain")
        width = TWO_PI * _parse_float(
            get(section, "linewidth_hz") or repr(width_d / TWO_PI),
            f"{section}.linewidth_hz")
        dens = _parse_float(get(section, "density_per_m3") or repr(dens_d),
                            f"{section}.density_per_m3")
        _positive(peak, f"{section}.peak_gain")
        _positive(width, f"{section}.linewidth_hz")
        _positive(dens, f"{section}.density_per_m3")
        return peak, width, dens

    gain_peak, gain_width, gain_dens = med("gain", cfg.gain_peak,
                                           cfg.gain_linewidth, cfg.gain_density)
    dip_peak, dip_width, dip_dens = med("dip", cfg.dip_peak,
                                        cfg.dip_linewidth, cfg.dip_density)
    if not dip_width < gain_width:
        raise ConfigError("dip.linewidth_hz must be below gain.linewidth_hz")

    theta = _parse_float(get("oracle", "theta") or "0.01", "oracle.theta")
    if not (0.0 < theta < 1.0):
        raise ConfigError(f"oracle.theta must lie in (0, 1), got {theta}")
    oracle = OracleScaffold(
        theta=theta,
        pump_detuning=TWO_PI * _positive(
            _parse_float(get("oracle", "pump_detuning_hz")
                         or repr(OracleScaffold().pump_detuning / TWO_PI),
                         "oracle.pump_detuning_hz"), "oracle.pump_detuning_hz"),
        gamma_3=TWO_PI * _positive(
            _parse_float(get("oracle", "excited_linewidth_hz") or "6e6",
                         "oracle.excited_linewidth_hz"),
            "oracle.excited_linewidth_hz"),
    )
    oracle_gain = _parse_float(get("oracle", "gain_peak") or repr(cfg.oracle_gain_peak),
                               "oracle.gain_peak")
    _positive(oracle_gain, "oracle.gain_peak")

    # per-experiment sweep defaults, overridable by explicit keys
    sweep_defaults = {
        "fig4_sub": SweepSpec(inv_ng_min=1e-4, inv_ng_max=0.99),
        "fig4_super": SweepSpec(),
        "fig5": SweepSpec(delta_p=(TWO_PI * 1.0, TWO_PI * 1e3,
                                   TWO_PI * 1e5, TWO_PI * 1e6)),
        "fig6": SweepSpec(inv_ng_values=(0.5, 2.0, 5.0, 10.0, 30.0,
                                         100.0, 300.0, 1000.0)),
        "fig7": SweepSpec(),
        "fig8": SweepSpec(),
        "custom_sweep": SweepSpec(),
    }[name]
    sweep = sweep_defaults
    if get("sweep", "inv_ng_min") is not None:
        sweep = replace(sweep, inv_ng_min=_positive(
            _parse_float(get("sweep", "inv_ng_min"), "sweep.inv_ng_min"),
            "sweep.inv_ng_min"))
    if get("sweep", "inv_ng_max") is not None:
        sweep = replace(sweep, inv_ng_max=_positive(
            _parse_float(get("sweep", "inv_ng_max"), "sweep.inv_ng_max"),
            "sweep.inv_ng_max"))
    if get("sweep", "inv_ng_points") is not None:
        pts = _parse_int(get("sweep", "inv_ng_points"), "sweep.inv_ng_points")
        if pts < 1:
            raise ConfigError("sweep.inv_ng_points must be >= 1")
        sweep = replace(sweep, inv_ng_points=pts)
    if get("sweep", "inv_ng_values") is not None:
        sweep = replace(sweep, inv_ng_values=_parse_float_list(
            get("sweep", "inv_ng_values"), "sweep.inv_ng_values"))
    if get("sweep", "delta_p_hz") is not None:
        dps = _parse_float_list(get("sweep", "delta_p_hz"), "sweep.delta_p_hz")
        if not dps:
            raise ConfigError("sweep.delta_p_hz must list at least one value")
        sweep = replace(sweep, delta_p=tuple(TWO_PI * v for v in dps))
    if get("sweep", "fig7_points") is not None:
        sweep = replace(sweep, fig7_points=_parse_int(
            get("sweep", "fig7_points"), "sweep.fig7_points"))
    if get("sweep", "fig8_points") is not None:
        sweep = replace(sweep, fig8_points=_parse_int(
            get("sweep", "fig8_points"), "sweep.fig8_points"))

    solver = SolverSpec()
    if get("solver", "residual_tol_hz") is not None:
        solver = replace(solver, residual_tol=TWO_PI * _positive(
            _parse_float(get("solver", "residual_tol_hz"),
                         "solver.residual_tol_hz"), "solver.residual_tol_hz"))
    if get("solver", "max_iterations") is not None:
        solver = replace(solver, max_iterations=_parse_int(
            get("solver", "max_iterations"), "solver.max_iterations"))
    if get("solver", "relaxation") is not None:
        relax = _parse_float(get("solver", "relaxation"), "solver.relaxation")
        if not (0.0 < relax <= 1.0):
            raise ConfigError("solver.relaxation must lie in (0, 1]")
        solver = replace(solver, relaxation=relax)
    if get("solver", "freq_tol_hz") is not None:
        solver = replace(solver, freq_tol=TWO_PI * _positive(
            _parse_float(get("solver", "freq_tol_hz"), "solver.freq_tol_hz"),
            "solver.freq_tol_hz"))
    if get("solver", "field_tol") is not None:
        solver = replace(solver, field_tol=_positive(
            _parse_float(get("solver", "field_tol"), "solver.field_tol"),
            "solver.field_tol"))
    if get("solver", "workers") is not None:
        w = _parse_int(get("solver", "workers"), "solver.workers")
        if w < 1:
            raise ConfigError("solver.workers must be >= 1")
        solver = replace(solver, workers=w)

    tl = ThreeLevelSpec()
    tl_map = {
        "probe_rabi_hz": ("probe_rabi", TWO_PI), "pump_rabi_hz": ("pump_rabi", TWO_PI),
        "pump_detuning_hz": ("pump_detuning", TWO_PI),
        "pumping_rate_hz": ("pumping_rate", TWO_PI),
        "excited_linewidth_hz": ("excited_linewidth", TWO_PI),
        "dipole_cm": ("dipole", 1.0), "density_per_m3": ("density", 1.0),
        "gain_over_loss": ("gain_over_loss", 1.0),
        "mirror_reflectivity": ("mirror_reflectivity", 1.0),
        "cavity_length_m": ("cavity_length", 1.0),
        "wavelength_m": ("wavelength", 1.0),
        "pump_detuning_saturated_hz": ("pump_detuning_saturated", TWO_PI),
    }
    for key, (attr, factor) in tl_map.items():
        raw = get("three_level", key)
        if raw is not None:
            tl = replace(tl, **{attr: factor * _parse_float(raw, f"three_level.{key}")})

    out_dir = get("output", "directory") or cfg.output_dir
    digits = _parse_int(get("output", "csv_digits") or "12", "output.csv_digits")
    if not (1 <= digits <= 17):
        raise ConfigError("output.csv_digits must lie in [1, 17]")

    return ExperimentConfig(
        experiment=name, cavity=cavity,
        gain_peak=gain_peak, gain_linewidth=gain_width, gain_density=gain_dens,
        dip_peak=dip_peak, dip_linewidth=dip_width, dip_density=dip_dens,
        oracle_gain_peak=oracle_gain,
        sweep=sweep, solver=solver, oracle=oracle, three_level=tl,
        output_dir=out_dir, csv_digits=digits,
    )


def write_config(cfg: ExperimentConfig, path: str | Path) -> None:
    """Serialize a configuration back to the Hz-denominated file format.

    ``repr`` round-trips every float bit-exactly, so load -> write -> load
    is the identity.
    """
    buf = io.StringIO()
    buf.write("[experiment]\n")
    buf.write(f"name = {cfg.experiment}\n\n")
    buf.write("[cavity]\n")
    buf.write(f"q = {cfg.cavity.Q!r}\n")
    buf.write(f"length_m = {cfg.cavity.L0!r}\n")
    buf.write(f"wavelength_m = {cfg.cavity.lambda0!r}\n")
    if cfg.cavity.R is not None:
        buf.write(f"reflectivity = {cfg.cavity.R!r}\n")
    buf.write(f"laser_frequency_hz = {cfg.cavity.omega_L0 / TWO_PI!r}\n\n")
    buf.write("[gain]\n")
    buf.write(f"peak_gain = {cfg.gain_peak!r}\n")
    buf.write(f"linewidth_hz = {cfg.gain_linewidth / TWO_PI!r}\n")
    buf.write(f"density_per_m3 = {cfg.gain_density!r}\n\n")
    buf.write("[dip]\n")
    buf.write(f"peak_gain = {cfg.dip_peak!r}\n")
    buf.write(f"linewidth_hz = {cfg.dip_linewidth / TWO_PI!r}\n")
    buf.write(f"density_per_m3 = {cfg.dip_density!r}\n\n")
    buf.write("[oracle]\n")
    buf.write(f"theta = {cfg.oracle.theta!r}\n")
    buf.write(f"pump_detuning_hz = {cfg.oracle.pump_detuning / TWO_PI!r}\n")
    buf.write(f"excited_linewidth_hz = {cfg.oracle.gamma_3 / TWO_PI!r}\n")
    buf.write(f"gain_peak = {cfg.oracle_gain_peak!r}\n\n")
    buf.write("[sweep]\n")
    if cfg.sweep.inv_ng_values is not None:
        buf.write("inv_ng_values = "
                  + ", ".join(repr(v) for v in cfg.sweep.inv_ng_values) + "\n")
    else:
        buf.write(f"inv_ng_min = {cfg.sweep.inv_ng_min!r}\n")
        buf.write(f"inv_ng_max = {cfg.sweep.inv_ng_max!r}\n")
        buf.write(f"inv_ng_points = {cfg.sweep.inv_ng_points}\n")
    buf.write("delta_p_hz = "
              + ", ".join(repr(v / TWO_PI) for v in cfg.sweep.delta_p) + "\n")
    buf.write(f"fig7_points = {cfg.sweep.fig7_points}\n")
    buf.write(f"fig8_points = {cfg.sweep.fig8_points}\n\n")
    buf.write("[solver]\n")
    buf.write(f"residual_tol_hz = {cfg.solver.residual_tol / TWO_PI!r}\n")
    buf.write(f"max_iterations = {cfg.solver.max_iterations}\n")
    buf.write(f"relaxation = {cfg.solver.relaxation!r}\n")
    buf.write(f"freq_tol_hz = {cfg.solver.freq_tol / TWO_PI!r}\n")
    buf.write(f"field_tol = {cfg.solver.field_tol!r}\n")
    buf.write(f"workers = {cfg.solver.workers}\n\n")
    buf.write("[three_level]\n")
    tl = cfg.three_level
    buf.write(f"probe_rabi_hz = {tl.probe_rabi / TWO_PI!r}\n")
    buf.write(f"pump_rabi_hz = {tl.pump_rabi / TWO_PI!r}\n")
    buf.write(f"pump_detuning_hz = {tl.pump_detuning / TWO_PI!r}\n")
    buf.write(f"pumping_rate_hz = {tl.pumping_rate / TWO_PI!r}\n")
    buf.write(f"excited_linewidth_hz = {tl.excited_linewidth / TWO_PI!r}\n")
    buf.write(f"dipole_cm = {tl.dipole!r}\n")
    buf.write(f"density_per_m3 = {tl.density!r}\n")
    buf.write(f"gain_over_loss = {tl.gain_over_loss!r}\n")
    buf.write(f"mirror_reflectivity = {tl.mirror_reflectivity!r}\n")
    buf.write(f"cavity_length_m = {tl.cavity_length!r}\n")
    buf.write(f"wavelength_m = {tl.wavelength!r}\n")
    buf.write(f"pump_detuning_saturated_hz = {tl.pump_detuning_saturated / TWO_PI!r}\n\n")
    buf.write("[output]\n")
    buf.write(f"directory = {cfg.output_dir}\n")
    buf.write(f"csv_digits = {cfg.csv_digits}\n")
    Path(path).write_text(buf.getvalue(), encoding="utf-8")
