"""Three-level Raman system and its effective two-level reduction.

A far-detuned Raman pump (Rabi frequency ``omega_P``, one-photon detuning
``delta_p``) and a probe/laser field (``omega_L``) couple the two ground
states |1>, |2> of a lambda system through the excited state |3>.  Optical
pumping transfers population incoherently between the ground states at rate
``gamma_eff``; the excited state decays at ``gamma_3``.  When
``|delta_p| >> omega_P, omega_L, gamma_3`` the excited state can be
eliminated, leaving a driven two-level system whose steady state carries the
Raman gain and dispersion.

Rabi-frequency conventions (read this before touching anything)
---------------------------------------------------------------
Two inequivalent "effective Rabi frequency" normalizations are in common
use for the eliminated system, differing by a factor of 2:

* ``omega_eff = omega_L * omega_P / (4 * delta_p)`` is the off-diagonal
  *matrix element* of the eliminated two-level Hamiltonian.  This is the
  quantity stored on :class:`EffectiveTwoLevel`.
* The conventional Rabi frequency (H_offdiag = rabi/2) is twice that:
  ``rabi = theta * omega_L`` with ``theta = omega_P / (2 * delta_p)``.

The closed-form steady state implemented here uses the conventional Rabi
``rabi = 2 * omega_eff``; only then does the reduced model agree with the
exact three-level solution (and with the susceptibility formulas built on
``theta * omega_L``).  Plugging ``omega_eff`` itself into the same formulas
understates the coherence by a factor of 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ThreeLevelParams",
    "EffectiveTwoLevel",
    "TwoLevelState",
    "ThreeLevelState",
    "Rho31Approximation",
    "EliminationRegimeReport",
    "SteadyStateSolveError",
    "build_effective_two_level",
    "two_level_steady_state",
    "two_level_liouville_rhs",
    "three_level_steady_state",
    "three_level_liouvillian",
    "rho31_approx",
    "validate_elimination_regime",
]


class SteadyStateSolveError(RuntimeError):
    """Raised when the steady-state linear system has no unique solution."""

    def __init__(self, message: str, condition_number: float):
        super().__init__(f"{message} (condition number {condition_number:.3e})")
        self.condition_number = condition_number


@dataclass(frozen=True)
class ThreeLevelParams:
    """Parameters of the lambda system, all in rad/s.

    ``gamma_eff`` is the effective optical-pumping rate |1> -> |2>.  For the
    depletion medium of a dual-isotope laser the pump direction is reversed
    (|2> -> |1>); see ``invert_optical_pump`` on the solvers.
    """

    omega_L: float      # probe / laser Rabi frequency
    omega_P: float      # Raman pump Rabi frequency
    delta_p: float      # one-photon pump detuning
    delta_diff: float   # two-photon (Raman) detuning
    gamma_eff: float    # optical-pumping decay rate
    gamma_3: float      # excited-state decay rate

    def __post_init__(self):
        if self.gamma_eff <= 0:
            raise ValueError(f"gamma_eff must be > 0, got {self.gamma_eff}")
        if self.gamma_3 <= 0:
            raise ValueError(f"gamma_3 must be > 0, got {self.gamma_3}")


@dataclass(frozen=True)
class EffectiveTwoLevel:
    """Eliminated two-level system.

    ``omega_eff`` is the Hamiltonian off-diagonal element
    omega_L*omega_P/(4 delta_p); the conventional Rabi frequency is
    ``rabi = 2*omega_eff = theta*omega_L`` (see module docstring).
    ``delta`` includes the differential light shift
    (omega_L**2 - omega_P**2)/(4 delta_p).
    """

    omega_eff: float
    delta: float
    gamma_eff: float
    theta: float

    @property
    def rabi(self) -> float:
        """Conventional effective Rabi frequency, 2*omega_eff."""
        return 2.0 * self.omega_eff


@dataclass(frozen=True)
class TwoLevelState:
    """Steady state of the reduced system; rho11 + rho22 = 1."""

    rho11: float
    rho22: float
    rho21: complex


class ThreeLevelState:
    """Full 3x3 steady-state density matrix with named accessors."""

    def __init__(self, rho: np.ndarray):
        self.rho = rho

    @property
    def rho11(self) -> float:
        return self.rho[0, 0].real

    @property
    def rho22(self) -> float:
        return self.rho[1, 1].real

    @property
    def rho33(self) -> float:
        return self.rho[2, 2].real

    @property
    def rho21(self) -> complex:
        return complex(self.rho[1, 0])

    @property
    def rho31(self) -> complex:
        return complex(self.rho[2, 0])

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def trace_defect(self) -> float:
        return abs(np.trace(self.rho).real - 1.0) + abs(np.trace(self.rho).imag)


def build_effective_two_level(p: ThreeLevelParams) -> EffectiveTwoLevel:
    """Adiabatically eliminate the excited state.

    Returns the two-level system with
    ``omega_eff = omega_L*omega_P/(4*delta_p)`` (Hamiltonian off-diagonal
    element), ``delta = delta_diff + (omega_L**2 - omega_P**2)/(4*delta_p)``
    and ``theta = omega_P/(2*delta_p)``.

    Raises ``ValueError`` for zero one-photon detuning, where the
    elimination is undefined.
    """
    if p.delta_p == 0.0:
        raise ValueError("adiabatic elimination undefined for delta_p = 0")
    omega_eff = p.omega_L * p.omega_P / (4.0 * p.delta_p)
    delta = p.delta_diff + (p.omega_L**2 - p.omega_P**2) / (4.0 * p.delta_p)
    theta = p.omega_P / (2.0 * p.delta_p)
    return EffectiveTwoLevel(omega_eff=omega_eff, delta=delta,
                             gamma_eff=p.gamma_eff, theta=theta)


def two_level_steady_state(e: EffectiveTwoLevel) -> TwoLevelState:
    """Closed-form steady state of the optically pumped two-level system.

    With the conventional Rabi frequency ``W = e.rabi`` and detuning
    ``d = e.delta``::

        rho11 = W**2 / (2 W**2 + gamma**2 + 4 d**2)
        rho21 = W (2 d - i gamma) / (2 W**2 + gamma**2 + 4 d**2)

    The denominator is strictly positive for gamma_eff > 0.
    """
    w = e.rabi
    g = e.gamma_eff
    d = e.delta
    denom = 2.0 * w * w + g * g + 4.0 * d * d
    rho11 = w * w / denom
    rho21 = w * (2.0 * d - 1j * g) / denom
    return TwoLevelState(rho11=rho11, rho22=1.0 - rho11, rho21=rho21)


def two_level_liouville_rhs(e: EffectiveTwoLevel, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the reduced Liouville equation, d(rho)/dt.

    Hamiltonian: diag(-i gamma/2, -delta) with off-diagonal -rabi/2 (the
    field-phase gauge reproducing the closed-form steady state above), plus
    the incoherent refill of |2> at gamma*rho11.  Used as the slow
    time-stepping cross-check of :func:`two_level_steady_state`.
    """
    w = e.rabi
    h = np.array([[-0.5j * e.gamma_eff, -0.5 * w],
                  [-0.5 * w, -e.delta]], dtype=complex)
    drho = -1j * (h @ rho - rho @ h.conj().T)
    drho[1, 1] += e.gamma_eff * rho[0, 0]
    return drho


# vec() is column-stacked; fast block = optical coherences rho13/31/23/32.
_FAST = (6, 2, 7, 5)
_SLOW = (0, 4, 8, 1, 3)


def three_level_liouvillian(p: ThreeLevelParams, invert_optical_pump: bool = False,
                            branch_to_1: float = 0.5,
                            pump_frame_offset: float = 0.0) -> np.ndarray:
    """Vectorized 9x9 Liouvillian of the full lambda system.

    The Hamiltonian couples the probe with matrix element -omega_L/2 and the
    pump with +omega_P/2 (the gauge under which rho21 and rho31 match the
    reduced-model sign conventions).  Decay enters in Lindblad form:
    optical pumping |1> -> |2> at gamma_eff (reversed when
    ``invert_optical_pump``), excited decay gamma_3 branching into |1> with
    weight ``branch_to_1``.

    ``pump_frame_offset`` shifts the |2> and |3> energies rigidly (a pump
    retuning).  The physical two-photon detuning is then
    ``delta_diff + pump_frame_offset``; keeping large static compensations in
    this slot preserves full floating-point resolution of a small, varying
    ``delta_diff``.
    """
    s = pump_frame_offset
    h = np.array([
        [p.delta_diff, 0.0, -0.5 * p.omega_L],
        [0.0, -s, 0.5 * p.omega_P],
        [-0.5 * p.omega_L, 0.5 * p.omega_P, -p.delta_p - s],
    ], dtype=complex)

    jumps = []
    j = np.zeros((3, 3), dtype=complex)
    if invert_optical_pump:
        j[0, 1] = math.sqrt(p.gamma_eff)
    else:
        j[1, 0] = math.sqrt(p.gamma_eff)
    jumps.append(j)
    j = np.zeros((3, 3), dtype=complex)
    j[0, 2] = math.sqrt(p.gamma_3 * branch_to_1)
    jumps.append(j)
    j = np.zeros((3, 3), dtype=complex)
    j[1, 2] = math.sqrt(p.gamma_3 * (1.0 - branch_to_1))
    jumps.append(j)

    eye = np.eye(3)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for jk in jumps:
        jdj = jk.conj().T @ jk
        lv += np.kron(jk.conj(), jk) \
            - 0.5 * (np.kron(eye, jdj) + np.kron(jdj.T, eye))
    return lv


def three_level_steady_state(p: ThreeLevelParams, invert_optical_pump: bool = False,
                             branch_to_1: float = 0.5,
                             pump_frame_offset: float = 0.0) -> ThreeLevelState:
    """Exact steady state of the full three-level system.

    Solved as a direct linear system: the optical coherences (which evolve
    at ~delta_p) are eliminated by a Schur complement, then the slow 5x5
    block (populations and ground coherence) is solved with the trace
    constraint replacing one row.  The two-step elimination keeps the
    ground-state physics at full precision even when delta_p exceeds the
    ground linewidths by many orders of magnitude.

    Raises :class:`SteadyStateSolveError` when the system is singular
    (e.g. all couplings and the relevant decays switched off).
    """
    lv = three_level_liouvillian(p, invert_optical_pump=invert_optical_pump,
                                 branch_to_1=branch_to_1,
                                 pump_frame_offset=pump_frame_offset)
    fast = np.ix_(_FAST, _FAST)
    a_ff = lv[fast]
    a_fs = lv[np.ix_(_FAST, _SLOW)]
    a_sf = lv[np.ix_(_SLOW, _FAST)]
    a_ss = lv[np.ix_(_SLOW, _SLOW)]
    try:
        x = np.linalg.solve(a_ff, a_fs)
    except np.linalg.LinAlgError as exc:
        raise SteadyStateSolveError("singular fast block",
                                    float(np.linalg.cond(a_ff))) from exc
    reduced = a_ss - a_sf @ x

    m = reduced.copy()
    m[0, :] = (1.0, 1.0, 1.0, 0.0, 0.0)   # trace constraint
    b = np.zeros(5, dtype=complex)
    b[0] = 1.0
    scale = np.max(np.abs(m), axis=1)
    if np.any(scale == 0.0):
        raise SteadyStateSolveError("zero row in reduced Liouvillian",
                                    math.inf)
    ms = m / scale[:, None]
    bs = b / scale
    cond = float(np.linalg.cond(ms))
    if not np.isfinite(cond) or cond > 1e15:
        raise SteadyStateSolveError("no unique steady state", cond)
    y = np.linalg.solve(ms, bs)
    y += np.linalg.solve(ms, bs - ms @ y)   # one refinement step

    v = np.zeros(9, dtype=complex)
    v[list(_SLOW)] = y
    v[list(_FAST)] = -x @ y
    rho = v.reshape(3, 3, order="F")
    rho = 0.5 * (rho + rho.conj().T)        # symmetrize roundoff
    return ThreeLevelState(rho)


@dataclass(frozen=True)
class Rho31Approximation:
    """theta*rho21 estimate of the optical coherence with a validity flag."""

    value: complex
    saturation_warning: bool


def rho31_approx(e: EffectiveTwoLevel, s: TwoLevelState) -> Rho31Approximation:
    """Optical coherence in the nearly-pure-state limit: rho31 = theta*rho21.

    Valid when the effective drive is weak, rabi << gamma_eff; the
    ``saturation_warning`` flag is set when rabi/gamma_eff > 0.1.
    """
    warn = abs(e.rabi) > 0.1 * e.gamma_eff
    return Rho31Approximation(value=e.theta * s.rho21, saturation_warning=warn)


@dataclass(frozen=True)
class EliminationRegimeReport:
    """Hierarchy ratios behind the adiabatic elimination, with pass flags."""

    ratio_detuning_linewidth: float   # |delta_p| / gamma_3
    ratio_detuning_pump: float        # |delta_p| / omega_P
    ratio_pump_probe: float           # omega_P / omega_L
    ratio_detuning_probe: float       # |delta_p| / omega_L
    threshold: float

    @property
    def detuning_exceeds_linewidth(self) -> bool:
        return self.ratio_detuning_linewidth >= self.threshold

    @property
    def detuning_exceeds_pump(self) -> bool:
        return self.ratio_detuning_pump >= self.threshold

    @property
    def pump_exceeds_probe(self) -> bool:
        return self.ratio_pump_probe >= self.threshold

    @property
    def detuning_exceeds_probe(self) -> bool:
        return self.ratio_detuning_probe >= self.threshold

    @property
    def all_pass(self) -> bool:
        return (self.detuning_exceeds_linewidth and self.detuning_exceeds_pump
                and self.pump_exceeds_probe)


def validate_elimination_regime(p: ThreeLevelParams,
                                threshold: float = 10.0) -> EliminationRegimeReport:
    """Check the scale hierarchy |delta_p| >> omega_P >> omega_L, gamma_3.

    "Much greater" means a ratio of at least ``threshold`` (default 10).
    Ratios with a zero denominator are reported as inf.
    """
    def ratio(a, b):
        return math.inf if b == 0 else abs(a) / abs(b)

    return EliminationRegimeReport(
        ratio_detuning_linewidth=ratio(p.delta_p, p.gamma_3),
        ratio_detuning_pump=ratio(p.delta_p, p.omega_P),
        ratio_pump_probe=ratio(p.omega_P, p.omega_L),
        ratio_detuning_probe=ratio(p.delta_p, p.omega_L),
        threshold=threshold,
    )
