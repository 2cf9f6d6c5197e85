"""Gain/dispersion tests: Lorentzian profiles, clamping, threshold logic."""

import math

import numpy as np
import pytest

from dlsim.atomic_core import ThreeLevelParams, three_level_steady_state
from dlsim.constants import EPS0, HBAR, TWO_PI
from dlsim.gain_medium import (
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
    saturated_index_sub,
    saturated_index_super,
    saturated_rabi_bound_report,
    solve_clamped_field,
    unsaturated_sub,
    unsaturated_super,
)

from oracles import positive_clamped_field_roots

GAM1 = TWO_PI * 30e6
GAM2 = TWO_PI * 10e6


def fig5_dual(g2: float = 1e-3) -> DualMediumParams:
    m1 = MediumParams.from_peak_gain(1.2e5, GAM1, 9e6, theta=0.01)
    m2 = MediumParams.from_peak_gain(g2, GAM2, 1e11, theta=0.01)
    return DualMediumParams(medium1=m1, medium2=m2)


def sub_medium(peak_gain=4e-6, gamma=1e6) -> MediumParams:
    return MediumParams.from_peak_gain(peak_gain, gamma, 1e16, theta=2.1e-3)


CAVITY = CavityParams(Q=1e6)


class TestMediumParams:
    def test_peak_gain_round_trip(self):
        m = MediumParams.from_peak_gain(3.3e-5, GAM1, 9e6, theta=0.02)
        assert m.peak_gain == pytest.approx(3.3e-5, rel=1e-12)

    def test_definitional_identities(self):
        # G0, zeta, eta expressed back through the microscopic parameters
        m = sub_medium()
        assert m.peak_gain == pytest.approx(
            2 * m.N * m.theta**2 * m.mu**2 / (HBAR * EPS0 * m.gamma), rel=1e-14)
        assert m.zeta == pytest.approx(HBAR * m.N * m.gamma / (2 * EPS0), rel=1e-14)
        delta = 0.37 * m.gamma
        assert m.eta(delta) == pytest.approx(
            (m.gamma**2 + 4 * delta**2) * HBAR**2 / (2 * m.theta**2 * m.mu**2),
            rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            MediumParams(N=-1.0, mu=1e-29, gamma=1e6, theta=0.01)
        with pytest.raises(ValueError):
            DualMediumParams(medium1=sub_medium(gamma=1e6),
                             medium2=sub_medium(gamma=2e6))


class TestCavityParams:
    def test_mirror_formula(self):
        c = CavityParams.from_mirror(0.1, 780e-9, 0.95)
        assert c.Q == pytest.approx(TWO_PI * 0.1 / 780e-9 / 0.05, rel=1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            CavityParams(Q=-5.0)
        with pytest.raises(ValueError):
            CavityParams(Q=1e6, R=1.5)


class TestUnsaturatedSub:
    def test_peak_is_half_g0(self):
        m = sub_medium()
        pt = unsaturated_sub(m, 0.0, 0.0)
        assert pt.gain == pytest.approx(m.peak_gain / 2, rel=1e-14)
        assert pt.index == 0.0

    def test_half_width_at_half_maximum(self):
        m = sub_medium()
        pt = unsaturated_sub(m, 0.0, m.gamma / 2)
        assert pt.gain == pytest.approx(m.peak_gain / 4, rel=1e-14)

    def test_lorentzian_dispersion_pairing(self):
        # (n - 1) = (2 delta / gamma) * gain, exactly
        m = sub_medium()
        rng = np.random.RandomState(5)
        for _ in range(50):
            delta = rng.uniform(-5, 5) * m.gamma
            rabi = rng.uniform(0, 3) * m.gamma / m.theta
            pt = unsaturated_sub(m, rabi, delta)
            assert pt.index == pytest.approx(2 * delta / m.gamma * pt.gain,
                                             rel=1e-13, abs=1e-30)

    def test_against_three_level_susceptibility(self):
        # chi from the exact density matrix reproduces the Lorentzian gain
        m = sub_medium()
        delta_p = 1e10
        omega_p = 2 * m.theta * delta_p
        rabi_probe = 0.02 * m.gamma / m.theta     # weak probe
        E = HBAR * rabi_probe / m.mu
        for delta in (0.0, 0.4e6, -1.1e6, 2.5e6):
            p = ThreeLevelParams(
                omega_L=rabi_probe, omega_P=omega_p, delta_p=delta_p,
                delta_diff=delta + (omega_p**2 - rabi_probe**2) / (4 * delta_p),
                gamma_eff=m.gamma, gamma_3=3.6e7)
            chi = 2 * m.N * m.mu * three_level_steady_state(p).rho31 / (EPS0 * E)
            pt = unsaturated_sub(m, rabi_probe, delta)
            assert -chi.imag / 2 == pytest.approx(pt.gain, rel=0.02)


class TestSaturatedSub:
    def test_threshold_boundary(self):
        m = sub_medium()
        edge = 0.5 * m.gamma * math.sqrt(CAVITY.Q * m.peak_gain - 1.0)
        assert saturated_field_sub(m, CAVITY, edge) == pytest.approx(0.0, abs=1e-9)

    def test_center_field_identity(self):
        # E^2(0) = 2 Q zeta - 2 zeta / G0
        m = sub_medium()
        e2 = saturated_field_sub(m, CAVITY, 0.0)
        assert e2 == pytest.approx(2 * CAVITY.Q * m.zeta - 2 * m.zeta / m.peak_gain,
                                   rel=1e-12)

    def test_at_threshold_gain_field_vanishes(self):
        m = sub_medium(peak_gain=1.0 / CAVITY.Q)
        assert saturated_field_sub(m, CAVITY, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_below_threshold_margin(self):
        m = sub_medium()
        edge = 0.5 * m.gamma * math.sqrt(CAVITY.Q * m.peak_gain - 1.0)
        with pytest.raises(BelowThreshold) as err:
            saturated_field_sub(m, CAVITY, 2 * edge)
        assert err.value.margin < 0.0

    def test_saturated_probe_rabi_order_of_magnitude(self):
        # G0 = 2/Q with the worked-example atom numbers lands within 10x of
        # the published 7.65e7 rad/s bound
        cav = CavityParams.from_mirror(0.1, 780e-9, 0.95)
        m = MediumParams.from_peak_gain(2.0 / cav.Q, 1e6, 1e16, theta=1.0)
        mu0 = 2.53e-29
        theta = math.sqrt(2.0 / cav.Q * HBAR * EPS0 * 1e6 / (2 * 1e16 * mu0**2))
        m = MediumParams(N=1e16, mu=mu0, gamma=1e6, theta=theta)
        e2 = saturated_field_sub(m, cav, 0.0)
        omega_l = mu0 * math.sqrt(e2) / HBAR
        assert 0.1 < omega_l / 7.65e7 < 10.0

    def test_index_exactly_linear(self):
        m = sub_medium()
        slope = 1.0 / (CAVITY.Q * m.gamma)
        for delta in np.linspace(-0.8, 0.8, 9) * m.gamma:
            got = saturated_index_minus_one_sub(m, CAVITY, float(delta))
            assert got == pytest.approx(slope * delta, rel=1e-12, abs=1e-30)

    def test_wrapper_returns_unity_at_center(self):
        m = sub_medium()
        assert saturated_index_sub(m, CAVITY, 0.0) == 1.0

    def test_odd_symmetry(self):
        m = sub_medium()
        d = 0.3 * m.gamma
        plus = saturated_index_sub(m, CAVITY, d) - 1.0
        minus = saturated_index_sub(m, CAVITY, -d) - 1.0
        assert plus == pytest.approx(-minus, rel=1e-12)


class TestUnsaturatedSuper:
    def test_center_difference(self):
        d = fig5_dual(g2=5e4)
        pt = unsaturated_super(d, 0.0, 0.0, 0.0)
        assert pt.gain == pytest.approx((d.G1 - d.G2) / 2, rel=1e-12)
        assert pt.index == 0.0

    def test_degenerate_dip_reduces_to_sub(self):
        d = fig5_dual(g2=1e-12)
        m1 = d.medium1
        for delta in (0.0, 1e7, -3e7):
            pt2 = unsaturated_super(d, 1e6, 1e6, delta)
            pt1 = unsaturated_sub(m1, 1e6, delta)
            assert pt2.gain == pytest.approx(pt1.gain, rel=1e-6)
            assert pt2.index == pytest.approx(pt1.index, rel=1e-6, abs=1e-25)

    def test_dip_shape_center_minimum(self):
        # G2/Gam2^2 > G1/Gam1^2: local minimum at center, maxima on the flanks
        m1 = MediumParams.from_peak_gain(2e-6, GAM1, 9e6, theta=0.01)
        m2 = MediumParams.from_peak_gain(1e-6, GAM2, 1e11, theta=0.01)
        d = DualMediumParams(medium1=m1, medium2=m2)
        gain = lambda x: unsaturated_super(d, 0.0, 0.0, x).gain
        h = GAM2 / 50
        second = (gain(h) - 2 * gain(0.0) + gain(-h)) / h**2
        assert second > 0.0
        flank = GAM2 * 0.8
        assert gain(flank) > gain(0.0)
        assert gain(-flank) > gain(0.0)


class TestClampedFieldSuper:
    def test_against_polynomial_roots(self):
        rng = np.random.RandomState(19)
        for _ in range(200):
            g2 = 10.0 ** rng.uniform(-7, -3)
            d = fig5_dual(g2=g2)
            delta = rng.uniform(-1, 1) * GAM2
            m1, m2 = d.medium1, d.medium2
            try:
                e2 = solve_clamped_field(m1.zeta, m1.eta(delta),
                                         m2.zeta, m2.eta(delta), CAVITY.Q)
            except BelowThreshold:
                continue
            roots = positive_clamped_field_roots(m1.zeta, m1.eta(delta),
                                                 m2.zeta, m2.eta(delta), CAVITY.Q)
            assert roots, "oracle found no positive root where solver did"
            assert min(abs(e2 - r) / e2 for r in roots) < 1e-6

    def test_substitute_back_residual(self):
        d = fig5_dual(g2=5.4e-7)
        for delta in np.linspace(-GAM2, GAM2, 7):
            e2 = saturated_field_super(d, CAVITY, float(delta))
            m1, m2 = d.medium1, d.medium2
            gain = m1.zeta / (e2 + m1.eta(delta)) - m2.zeta / (e2 + m2.eta(delta))
            assert abs(gain * 2 * CAVITY.Q - 1.0) < 1e-12

    def test_no_dip_limit_matches_sub(self):
        m1 = fig5_dual().medium1
        e2_expected = 2 * CAVITY.Q * m1.zeta - m1.eta(0.0)
        e2 = solve_clamped_field(m1.zeta, m1.eta(0.0), 0.0, 12.3, CAVITY.Q)
        assert e2 == pytest.approx(e2_expected, rel=1e-12)

    def test_fig5_parameters_lase_over_range(self):
        d = fig5_dual(g2=5.4e-7)
        for delta in np.linspace(-5 * GAM2, 5 * GAM2, 21):
            assert saturated_field_super(d, CAVITY, float(delta)) > 0.0

    def test_gain_clamp_invariant_random(self):
        rng = np.random.RandomState(23)
        loss = 1.0 / (2 * CAVITY.Q)
        for _ in range(200):
            g2 = 10.0 ** rng.uniform(-7, -4)
            d = fig5_dual(g2=g2)
            delta = rng.uniform(-2, 2) * GAM2
            m1, m2 = d.medium1, d.medium2
            try:
                e2 = saturated_field_super(d, CAVITY, delta)
            except BelowThreshold:
                continue
            gain = m1.zeta / (e2 + m1.eta(delta)) - m2.zeta / (e2 + m2.eta(delta))
            assert abs(gain - loss) <= 1e-10 * loss


class TestSaturatedIndexSuper:
    def test_center_exact_unity(self):
        d = fig5_dual(g2=5.4e-7)
        assert saturated_index_super(d, CAVITY, 0.0) == 1.0

    def test_odd_symmetry(self):
        d = fig5_dual(g2=5.4e-7)
        for delta in (1e5, 1e6, 1e7):
            plus = saturated_index_minus_one_super(d, CAVITY, delta)
            minus = saturated_index_minus_one_super(d, CAVITY, -delta)
            assert plus == pytest.approx(-minus, rel=1e-10)

    def test_anomalous_dispersion_at_center(self):
        # d(n*omega)/domega < 1 at the dip center for a calibrated medium
        d = fig5_dual(g2=5.39e-7)
        omega0 = CAVITY.omega_L0
        h = GAM2 * 1e-6
        gp = (omega0 + h) * saturated_index_minus_one_super(d, CAVITY, h)
        gm = (omega0 - h) * saturated_index_minus_one_super(d, CAVITY, -h)
        assert 1.0 + (gp - gm) / (2 * h) < 1.0


class TestLinearizedIndexSuper:
    def test_matches_finite_difference(self):
        d = fig5_dual(g2=5.39e-7)
        alpha_tilde, _ = linearized_index_super(d, CAVITY)
        h = GAM2 * 1e-6
        fd = (saturated_index_minus_one_super(d, CAVITY, h)
              - saturated_index_minus_one_super(d, CAVITY, -h)) / (2 * h)
        assert fd == pytest.approx(alpha_tilde, rel=1e-6)

    def test_weak_dip_limit_reduces_to_gain_only_slope(self):
        d = fig5_dual(g2=1e-12)
        alpha_tilde, e2 = linearized_index_super(d, CAVITY)
        m1 = d.medium1
        e2_sub = 2 * CAVITY.Q * m1.zeta - 2 * m1.zeta / d.G1
        alpha_sub = (2 * m1.zeta / m1.gamma) / (e2_sub + 2 * m1.zeta / d.G1)
        assert e2 == pytest.approx(e2_sub, rel=1e-4)
        assert alpha_tilde == pytest.approx(alpha_sub, rel=1e-3)

    def test_linearization_error_small_near_center(self):
        # full nonlinear index within 1% of the linear form for |d| <= 0.01 Gam2
        d = fig5_dual(g2=5.39e-7)
        alpha_tilde, _ = linearized_index_super(d, CAVITY)
        for delta in np.linspace(-0.01 * GAM2, 0.01 * GAM2, 9):
            if delta == 0.0:
                continue
            full = saturated_index_minus_one_super(d, CAVITY, float(delta))
            assert full == pytest.approx(alpha_tilde * delta, rel=0.01)


class TestLasingRange:
    def test_matches_analytic_edges_sub(self):
        m = sub_medium()
        lo, hi = lasing_range(lambda x: saturated_field_sub(m, CAVITY, x),
                              scale=m.gamma)
        edge = 0.5 * m.gamma * math.sqrt(CAVITY.Q * m.peak_gain - 1.0)
        assert hi == pytest.approx(edge, rel=1e-9)
        assert lo == pytest.approx(-edge, rel=1e-9)

    def test_below_threshold_center_raises(self):
        m = sub_medium(peak_gain=0.5 / CAVITY.Q)
        with pytest.raises(BelowThreshold):
            lasing_range(lambda x: saturated_field_sub(m, CAVITY, x),
                         scale=m.gamma)


class TestRabiBoundReport:
    def test_routes_and_flag(self):
        rep = saturated_rabi_bound_report()
        # with G0 = 1/Q the clamp route sits exactly at threshold
        assert rep.omega_max_clamp_route == 0.0
        # the direct route evaluates mu*sqrt(N gamma Q/(hbar eps0))
        expected = math.sqrt(2.53e-29**2 * 1e16 * 1e6 * rep.q_factor / (HBAR * EPS0))
        assert rep.omega_max_direct_route == pytest.approx(expected, rel=1e-12)
        # neither route reproduces the published number: the flag must fire
        assert rep.discrepancy_flag
        assert rep.direct_vs_reference == pytest.approx(4.34, abs=0.3)
