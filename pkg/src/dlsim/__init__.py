"""dlsim: Raman-laser gain/dispersion and pump-shift transfer simulator."""

from .atomic_core import (
    EffectiveTwoLevel,
    EliminationRegimeReport,
    Rho31Approximation,
    SteadyStateSolveError,
    ThreeLevelParams,
    ThreeLevelState,
    TwoLevelState,
    build_effective_two_level,
    rho31_approx,
    three_level_steady_state,
    two_level_steady_state,
    validate_elimination_regime,
)
from .config import ConfigError, ExperimentConfig, load_config, write_config
from .constants import EPS0, HBAR, OMEGA_L0_DEFAULT
from .dual_isotope import (
    DualIsotopeSystem,
    IterativeLasingState,
    OracleConvergenceError,
    build_dual_isotope_system,
    compare_with_lorentzian,
    iterate_lasing,
    medium_response,
    oracle_group_index,
)
from .gain_medium import (
    BelowThreshold,
    CavityParams,
    DualMediumParams,
    GainIndexPoint,
    MediumParams,
    linearized_index_super,
    saturated_field_sub,
    saturated_field_super,
    saturated_index_sub,
    saturated_index_super,
    unsaturated_sub,
    unsaturated_super,
)
from .lasing_solver import (
    LasingSolution,
    NoLasingSolution,
    PumpShiftScenario,
    ShiftSweepResult,
    ShiftSweepRow,
    group_index,
    shift_ratio_analytic,
    solve_lasing_frequency,
    sweep_shift_ratio,
)
from .report import emit_report

__version__ = "0.1.0"
