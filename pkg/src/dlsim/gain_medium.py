"""Gain and dispersion of the Raman medium, unsaturated and saturated.

Single medium (subluminal laser): a power-broadened Lorentzian gain line of
amplitude G0/2 and width gamma, with the matching dispersive index.  Dual
medium (superluminal laser): a broad gain line minus a narrower depletion
line carved by a second isotope.  Saturation is imposed by the gain-clamp
condition: in steady state the per-pass amplitude gain equals the cavity
loss 1/(2Q), which fixes the intracavity intensity E**2 at every lasing
frequency.

Index values are handled as n - 1 throughout the numerical core; the
spec-level wrappers that return n itself lose ~7 digits to the leading 1 and
must not be used inside root finders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .constants import EPS0, HBAR, OMEGA_L0_DEFAULT, TWO_PI

__all__ = [
    "MediumParams",
    "DualMediumParams",
    "CavityParams",
    "GainIndexPoint",
    "BelowThreshold",
    "unsaturated_sub",
    "saturated_field_sub",
    "saturated_index_sub",
    "saturated_index_minus_one_sub",
    "unsaturated_super",
    "saturated_field_super",
    "saturated_index_super",
    "saturated_index_minus_one_super",
    "linearized_index_super",
    "solve_clamped_field",
    "lasing_range",
    "RabiBoundReport",
    "saturated_rabi_bound_report",
]


class BelowThreshold(Exception):
    """Gain does not reach the cavity loss; carries the E**2 shortfall."""

    def __init__(self, margin: float):
        super().__init__(f"below lasing threshold (E^2 margin {margin:.6e} V^2/m^2)")
        self.margin = margin


@dataclass(frozen=True)
class MediumParams:
    """One Raman gain (or depletion) medium.

    N       atomic number density, 1/m^3
    mu      dipole moment of the optical transition, C m
    gamma   two-photon linewidth = optical-pumping rate, rad/s
    theta   pump mixing parameter omega_P/(2 delta_p), dimensionless
    """

    N: float
    mu: float
    gamma: float
    theta: float

    def __post_init__(self):
        if self.N <= 0 or self.mu <= 0 or self.gamma <= 0:
            raise ValueError("N, mu and gamma must all be positive")

    @property
    def peak_gain(self) -> float:
        """Unsaturated peak amplitude-gain coefficient G0 = 2 N theta^2 mu^2/(hbar eps0 gamma)."""
        return 2.0 * self.N * self.theta**2 * self.mu**2 / (HBAR * EPS0 * self.gamma)

    @property
    def zeta(self) -> float:
        """Saturation constant hbar N gamma/(2 eps0), V^2/m^2."""
        return HBAR * self.N * self.gamma / (2.0 * EPS0)

    def eta(self, delta: float) -> float:
        """Frequency-dependent saturation offset (gamma^2+4 delta^2) hbar N/(eps0 G0 gamma)."""
        return (self.gamma**2 + 4.0 * delta * delta) * HBAR * self.N \
            / (EPS0 * self.peak_gain * self.gamma)

    @classmethod
    def from_peak_gain(cls, peak_gain: float, gamma: float, N: float,
                       theta: float) -> "MediumParams":
        """Build a medium realizing a given G0; solves for the dipole moment."""
        if peak_gain <= 0:
            raise ValueError("peak_gain must be positive")
        mu = math.sqrt(peak_gain * HBAR * EPS0 * gamma / (2.0 * N)) / theta
        return cls(N=N, mu=mu, gamma=gamma, theta=theta)


@dataclass(frozen=True)
class DualMediumParams:
    """Broad gain medium (1) plus narrow depletion medium (2)."""

    medium1: MediumParams
    medium2: MediumParams

    def __post_init__(self):
        if not self.medium2.gamma < self.medium1.gamma:
            raise ValueError("depletion line must be narrower than the gain line")

    @property
    def G1(self) -> float:
        return self.medium1.peak_gain

    @property
    def G2(self) -> float:
        return self.medium2.peak_gain

    def with_dip_gain(self, G2: float) -> "DualMediumParams":
        """Same media with medium2 rescaled to a new peak gain (the n_g knob)."""
        m2 = MediumParams.from_peak_gain(G2, self.medium2.gamma,
                                         self.medium2.N, self.medium2.theta)
        return DualMediumParams(medium1=self.medium1, medium2=m2)


@dataclass(frozen=True)
class CavityParams:
    """Ring-cavity parameters; loss per pass is 1/(2Q) in amplitude."""

    Q: float
    L0: float = 0.1
    lambda0: float = 780e-9
    R: Optional[float] = None
    omega_L0: float = OMEGA_L0_DEFAULT

    def __post_init__(self):
        if self.Q <= 0:
            raise ValueError("Q must be positive")
        if self.R is not None and not (0.0 < self.R < 1.0):
            raise ValueError("reflectivity must lie in (0, 1)")

    @property
    def loss(self) -> float:
        return 1.0 / (2.0 * self.Q)

    @classmethod
    def from_mirror(cls, L0: float, lambda0: float, R: float,
                    omega_L0: float = OMEGA_L0_DEFAULT) -> "CavityParams":
        """Quality factor of a cavity whose only loss is the output coupler:
        Q = (2 pi L / lambda) / (1 - R)."""
        q = (TWO_PI * L0 / lambda0) / (1.0 - R)
        return cls(Q=q, L0=L0, lambda0=lambda0, R=R, omega_L0=omega_L0)


@dataclass(frozen=True)
class GainIndexPoint:
    """Per-pass amplitude gain and refractive index at one frequency.

    ``index`` stores n - 1 at full precision; the physical index is
    1 + index.
    """

    gain: float
    index: float


def _check_susceptibility_small(gain: float, index_m1: float) -> None:
    # |chi| << 1 underpins n = 1 + chi/2; fails only for unphysical inputs
    assert math.hypot(2.0 * gain, 2.0 * index_m1) < 0.1, \
        "susceptibility too large for the linearized index"


def unsaturated_sub(m: MediumParams, omega_L_rabi: float, delta: float) -> GainIndexPoint:
    """Unsaturated gain and index of the single medium at detuning ``delta``.

    gain  = (G0 gamma^2/2) / (2 theta^2 omega_L^2 + gamma^2 + 4 delta^2)
    n - 1 =  G0 gamma delta / (same denominator)
    """
    g0 = m.peak_gain
    denom = 2.0 * (m.theta * omega_L_rabi)**2 + m.gamma**2 + 4.0 * delta * delta
    gain = 0.5 * g0 * m.gamma**2 / denom
    index_m1 = g0 * m.gamma * delta / denom
    _check_susceptibility_small(gain, index_m1)
    return GainIndexPoint(gain=gain, index=index_m1)


def saturated_field_sub(m: MediumParams, c: CavityParams, delta: float) -> float:
    """Intracavity E**2 fixed by gain clamping: E^2 = 2 Q zeta - eta(delta).

    Raises :class:`BelowThreshold` (carrying the negative margin) when the
    unsaturated gain at ``delta`` does not reach the loss.  Exactly at
    threshold E^2 = 0 is returned.
    """
    e2 = 2.0 * c.Q * m.zeta - m.eta(delta)
    if e2 < 0.0:
        raise BelowThreshold(e2)
    return e2


def saturated_index_minus_one_sub(m: MediumParams, c: CavityParams, delta: float) -> float:
    """n_s - 1 of the lasing medium; exactly linear in delta (slope 1/(Q gamma))."""
    e2 = saturated_field_sub(m, c, delta)
    return (2.0 * m.zeta * delta / m.gamma) / (e2 + m.eta(delta))


def saturated_index_sub(m: MediumParams, c: CavityParams, delta: float) -> float:
    """Saturated refractive index n_s = 1 + delta/(Q gamma) over the lasing range."""
    return 1.0 + saturated_index_minus_one_sub(m, c, delta)


def unsaturated_super(d: DualMediumParams, omega1_rabi: float, omega2_rabi: float,
                      detuning: float) -> GainIndexPoint:
    """Gain-minus-dip profile of the dual medium at ``detuning`` from center."""
    m1, m2 = d.medium1, d.medium2
    den1 = 2.0 * (m1.theta * omega1_rabi)**2 + m1.gamma**2 + 4.0 * detuning**2
    den2 = 2.0 * (m2.theta * omega2_rabi)**2 + m2.gamma**2 + 4.0 * detuning**2
    gain = 0.5 * d.G1 * m1.gamma**2 / den1 - 0.5 * d.G2 * m2.gamma**2 / den2
    index_m1 = d.G1 * m1.gamma * detuning / den1 - d.G2 * m2.gamma * detuning / den2
    _check_susceptibility_small(gain, index_m1)
    return GainIndexPoint(gain=gain, index=index_m1)


def solve_clamped_field(zeta1: float, eta1: float, zeta2: float, eta2: float,
                        Q: float) -> float:
    """Positive root of  zeta1/(E^2+eta1) - zeta2/(E^2+eta2) = 1/(2Q).

    The quadratic in E^2 is solved in the cancellation-free form
    -2c/(b + sqrt(b^2-4c)) when b > 0, then polished with one Newton step on
    the clamp equation so the round-trip gain reproduces the loss to ~1e-12
    relative.  A discriminant within 1e-12 (relative) below zero is clamped
    to zero (grazing threshold); smaller discriminants and non-positive
    roots raise :class:`BelowThreshold`.
    """
    b = eta1 + eta2 - 2.0 * Q * (zeta1 - zeta2)
    cc = eta1 * eta2 - 2.0 * Q * zeta1 * eta2 + 2.0 * Q * zeta2 * eta1
    bracket = eta1 - eta2 - 2.0 * Q * (zeta1 + zeta2)
    disc = bracket * bracket - 16.0 * Q * Q * zeta1 * zeta2
    if disc < 0.0:
        if disc > -1e-12 * bracket * bracket:
            disc = 0.0
        else:
            raise BelowThreshold(-math.sqrt(-disc))
    sq = math.sqrt(disc)
    if b <= 0.0:
        e2 = 0.5 * (-b + sq)
    else:
        e2 = -2.0 * cc / (b + sq)
    if e2 <= 0.0:
        if e2 < 0.0:
            raise BelowThreshold(e2)
        return 0.0
    gain = zeta1 / (e2 + eta1) - zeta2 / (e2 + eta2) - 0.5 / Q
    dgain = -zeta1 / (e2 + eta1)**2 + zeta2 / (e2 + eta2)**2
    if dgain != 0.0:
        e2 -= gain / dgain
    if e2 < 0.0:
        raise BelowThreshold(e2)
    return e2


def saturated_field_super(d: DualMediumParams, c: CavityParams, detuning: float) -> float:
    """Clamped E**2 of the dual medium at ``detuning`` from the profile center."""
    m1, m2 = d.medium1, d.medium2
    return solve_clamped_field(m1.zeta, m1.eta(detuning),
                               m2.zeta, m2.eta(detuning), c.Q)


def saturated_index_minus_one_super(d: DualMediumParams, c: CavityParams,
                                    detuning: float) -> float:
    """n_s - 1 of the lasing dual medium, full nonlinear form."""
    m1, m2 = d.medium1, d.medium2
    e2 = saturated_field_super(d, c, detuning)
    return (2.0 * m1.zeta * detuning / m1.gamma) / (e2 + m1.eta(detuning)) \
        - (2.0 * m2.zeta * detuning / m2.gamma) / (e2 + m2.eta(detuning))


def saturated_index_super(d: DualMediumParams, c: CavityParams, detuning: float) -> float:
    """Saturated refractive index of the dual medium (1 + nonlinear dispersive term)."""
    return 1.0 + saturated_index_minus_one_super(d, c, detuning)


def linearized_index_super(d: DualMediumParams, c: CavityParams) -> tuple[float, float]:
    """Small-shift slope of the saturated dual-medium index.

    Freezing the saturation parameters at their line-center values makes the
    index linear, n_s = 1 + alpha_tilde * detuning with
    alpha_tilde = alpha' - beta'.  Returns (alpha_tilde, E2_center).
    """
    m1, m2 = d.medium1, d.medium2
    u1 = 2.0 * m1.zeta / d.G1
    u2 = 2.0 * m2.zeta / d.G2
    e2 = solve_clamped_field(m1.zeta, u1, m2.zeta, u2, c.Q)
    alpha_p = (2.0 * m1.zeta / m1.gamma) / (e2 + u1)
    beta_p = (2.0 * m2.zeta / m2.gamma) / (e2 + u2)
    return alpha_p - beta_p, e2


def lasing_range(field_sq: Callable[[float], float], scale: float,
                 max_expansions: int = 200, rel_tol: float = 1e-12) -> tuple[float, float]:
    """Detuning window over which ``field_sq`` stays above threshold.

    Expands outward from 0 in steps growing from ``scale`` until the medium
    drops below threshold on each side, then bisects the two edges.  The
    function must be above threshold at detuning 0.
    """
    def margin(delta: float) -> float:
        try:
            return field_sq(delta)
        except BelowThreshold as exc:
            return exc.margin if exc.margin < 0.0 else -1.0

    if margin(0.0) < 0.0:
        raise BelowThreshold(margin(0.0))

    edges = []
    for sign in (-1.0, 1.0):
        step = scale
        inner = 0.0
        for _ in range(max_expansions):
            outer = inner + sign * step
            if margin(outer) < 0.0:
                break
            inner = outer
            step *= 2.0
        else:
            raise RuntimeError("no threshold edge found; window unbounded?")
        lo, hi = inner, outer
        while abs(hi - lo) > rel_tol * max(abs(hi), scale):
            mid = 0.5 * (lo + hi)
            if margin(mid) >= 0.0:
                lo = mid
            else:
                hi = mid
        edges.append(0.5 * (lo + hi))
    return edges[0], edges[1]


@dataclass(frozen=True)
class RabiBoundReport:
    """Peak saturated probe Rabi frequency computed along two printed routes.

    The two routes disagree by construction (a factor-2 inconsistency in the
    source chain): via the clamp equation, G0 = 1/Q sits exactly at
    threshold and the saturated field vanishes; the direct formula
    mu^2 N gamma Q/(hbar eps0) gives a nonzero bound instead.  Both are
    reported against the published reference value instead of asserting
    equality.
    """

    q_factor: float
    omega_max_clamp_route: float       # from E^2 = 2 Q zeta - eta(0)
    omega_max_direct_route: float      # from mu^2 N gamma (2Q - 1/G0)/(hbar eps0)
    reference_value: float
    discrepancy_flag: bool

    @property
    def direct_vs_reference(self) -> float:
        return self.omega_max_direct_route / self.reference_value


def saturated_rabi_bound_report(mu: float = 2.53e-29, N: float = 1e16,
                                gamma: float = 1e6, L: float = 0.1,
                                lam: float = 780e-9, R: float = 0.95,
                                reference_value: float = 7.65e7) -> RabiBoundReport:
    """Recompute the saturated-probe Rabi bound for the worked example.

    Inputs are the published example values (G0 set to 1/Q).  The clamp
    route gives omega_max = mu/hbar * sqrt(max(2 Q zeta - eta(0), 0)); the
    direct route gives mu sqrt(N gamma (2Q - 1/G0)/(hbar eps0)).
    """
    q = (TWO_PI * L / lam) / (1.0 - R)
    g0 = 1.0 / q
    zeta = HBAR * N * gamma / (2.0 * EPS0)
    eta0 = HBAR * N * gamma / (EPS0 * g0)
    e2_clamp = 2.0 * q * zeta - eta0
    omega_clamp = mu / HBAR * math.sqrt(max(e2_clamp, 0.0))
    omega_direct = math.sqrt(mu * mu * N * gamma * (2.0 * q - 1.0 / g0) / (HBAR * EPS0))
    flag = abs(omega_direct - reference_value) > 0.05 * reference_value \
        or abs(omega_clamp - reference_value) > 0.05 * reference_value
    return RabiBoundReport(q_factor=q,
                           omega_max_clamp_route=omega_clamp,
                           omega_max_direct_route=omega_direct,
                           reference_value=reference_value,
                           discrepancy_flag=flag)
