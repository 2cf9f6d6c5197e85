"""Atomic-core tests: elimination, steady states, reduction validity."""

import math

import numpy as np
import pytest

from dlsim.atomic_core import (
    SteadyStateSolveError,
    ThreeLevelParams,
    build_effective_two_level,
    rho31_approx,
    three_level_liouvillian,
    three_level_steady_state,
    two_level_liouville_rhs,
    two_level_steady_state,
    validate_elimination_regime,
)

from oracles import evolve_two_level_to_steady, three_level_steady_dense

RELAXED = dict(omega_L=1e5, omega_P=1e7, delta_p=6.28e9, delta_diff=0.0,
               gamma_eff=1e6, gamma_3=3.6e7)


def make_params(**overrides) -> ThreeLevelParams:
    kw = dict(RELAXED)
    kw.update(overrides)
    return ThreeLevelParams(**kw)


class TestBuildEffectiveTwoLevel:
    def test_vanishing_probe(self):
        p = make_params(omega_L=0.0, omega_P=2e7, delta_p=5e9, delta_diff=1.5e5)
        e = build_effective_two_level(p)
        assert e.omega_eff == 0.0
        assert e.delta == 1.5e5 - (2e7) ** 2 / (4 * 5e9)

    def test_symmetric_light_shift_cancellation(self):
        p = make_params(omega_L=3e6, omega_P=3e6, delta_diff=777.0)
        e = build_effective_two_level(p)
        assert e.delta == 777.0  # exact: shifts cancel

    def test_zero_detuning_rejected(self):
        with pytest.raises(ValueError):
            build_effective_two_level(make_params(delta_p=0.0))

    def test_theta_and_rabi_relation(self):
        p = make_params()
        e = build_effective_two_level(p)
        assert e.theta == pytest.approx(p.omega_P / (2 * p.delta_p), rel=1e-15)
        assert e.rabi == pytest.approx(e.theta * p.omega_L, rel=1e-12)

    def test_matches_schur_block_of_hermitian_hamiltonian(self):
        # eliminate |3> from the bare Hamiltonian by a Schur complement and
        # compare the dressed two-level block
        p = make_params()
        h = np.array([
            [p.delta_diff, 0.0, p.omega_L / 2],
            [0.0, 0.0, p.omega_P / 2],
            [p.omega_L / 2, p.omega_P / 2, -p.delta_p],
        ])
        h_eff = h[:2, :2] - np.outer(h[:2, 2], h[2, :2]) / h[2, 2]
        e = build_effective_two_level(p)
        assert e.omega_eff == pytest.approx(h_eff[0, 1], rel=1e-12)
        delta_schur = p.delta_diff + h_eff[0, 0] - p.delta_diff - h_eff[1, 1]
        # delta = (shifted |1> energy) - (shifted |2> energy), measured from delta_diff
        assert e.delta == pytest.approx(p.delta_diff + (h_eff[0, 0] - p.delta_diff)
                                        - h_eff[1, 1], rel=1e-12)
        del delta_schur
        # dressed splitting of the exact 3x3 agrees to O(theta^2)
        evals = np.sort(np.linalg.eigvalsh(h))
        splitting = evals[2] - evals[1]   # the two ground-like dressed states
        eff_h = np.array([[e.delta, e.omega_eff], [e.omega_eff, 0.0]])
        eff_split = np.ptp(np.linalg.eigvalsh(eff_h))
        assert splitting == pytest.approx(eff_split, rel=5e-6)


class TestTwoLevelSteadyState:
    def test_unpumped_system(self):
        e = build_effective_two_level(make_params(omega_L=0.0))
        s = two_level_steady_state(e)
        assert s.rho11 == 0.0
        assert s.rho21 == 0.0
        assert s.rho22 == 1.0

    def test_on_resonance_coherence_is_imaginary(self):
        p = make_params(delta_diff=(RELAXED["omega_P"] ** 2 - RELAXED["omega_L"] ** 2)
                        / (4 * RELAXED["delta_p"]))
        e = build_effective_two_level(p)
        assert e.delta == pytest.approx(0.0, abs=1e-6)
        s = two_level_steady_state(e)
        w, g = e.rabi, e.gamma_eff
        assert s.rho21.real == pytest.approx(0.0, abs=1e-18)
        assert s.rho21.imag == pytest.approx(-w * g / (2 * w**2 + g**2), rel=1e-12)

    def test_matches_time_integration(self):
        e = build_effective_two_level(make_params(delta_diff=3e5))
        s = two_level_steady_state(e)
        rho = evolve_two_level_to_steady(e.rabi, e.delta, e.gamma_eff)
        assert rho[0, 0].real == pytest.approx(s.rho11, abs=1e-8)
        assert abs(rho[1, 0] - s.rho21) < 1e-8

    def test_purity_identity_random_draws(self):
        rng = np.random.RandomState(7)
        for _ in range(300):
            rabi = 10.0 ** rng.uniform(2, 7)
            gamma = 10.0 ** rng.uniform(4, 8)
            delta = rng.uniform(-3, 3) * gamma
            # construct the state directly from an EffectiveTwoLevel surrogate
            p = make_params(omega_L=1.0, omega_P=1.0, delta_p=0.25 / (rabi / 2),
                            delta_diff=delta, gamma_eff=gamma)
            e = build_effective_two_level(p)
            assert e.rabi == pytest.approx(rabi, rel=1e-12)
            s = two_level_steady_state(e)
            lhs = abs(s.rho21) / math.sqrt(s.rho11 * s.rho22)
            rhs = math.sqrt((gamma**2 + 4 * e.delta**2)
                            / (e.rabi**2 + gamma**2 + 4 * e.delta**2))
            assert lhs == pytest.approx(rhs, rel=5e-14)

    def test_detuning_antisymmetry(self):
        rng = np.random.RandomState(11)
        for _ in range(100):
            gamma = 10.0 ** rng.uniform(4, 8)
            rabi = gamma * 10.0 ** rng.uniform(-3, 1)
            delta = rng.uniform(0.01, 5) * gamma
            dp = 1e10
            base = dict(omega_L=1.0, omega_P=4 * dp * rabi / 2, delta_p=dp,
                        gamma_eff=gamma, gamma_3=1e7)
            shift = (base["omega_L"]**2 - base["omega_P"]**2) / (4 * dp)
            sp = two_level_steady_state(build_effective_two_level(
                ThreeLevelParams(delta_diff=delta - shift, **base)))
            sm = two_level_steady_state(build_effective_two_level(
                ThreeLevelParams(delta_diff=-delta - shift, **base)))
            assert sp.rho21.real == pytest.approx(-sm.rho21.real, rel=1e-10)
            assert sp.rho21.imag == pytest.approx(sm.rho21.imag, rel=1e-10)

    def test_steady_state_is_fixed_point_of_rhs(self):
        e = build_effective_two_level(make_params(delta_diff=2e6))
        s = two_level_steady_state(e)
        rho = np.array([[s.rho11, np.conj(s.rho21)], [s.rho21, s.rho22]],
                       dtype=complex)
        rhs = two_level_liouville_rhs(e, rho)
        scale = max(e.gamma_eff, abs(e.delta), e.rabi)
        assert np.linalg.norm(rhs) <= 1e-10 * scale


class TestThreeLevelSteadyState:
    def test_optical_pumping_only(self):
        st = three_level_steady_state(make_params(omega_L=0.0, omega_P=0.0))
        assert st.rho22 == pytest.approx(1.0, abs=1e-12)
        assert abs(st.rho21) < 1e-14
        assert abs(st.rho31) < 1e-14

    def test_depletion_configuration_pumps_into_state_1(self):
        st = three_level_steady_state(make_params(omega_L=0.0, omega_P=0.0),
                                      invert_optical_pump=True)
        assert st.rho11 == pytest.approx(1.0, abs=1e-12)

    def test_hermitian_unit_trace(self):
        rng = np.random.RandomState(3)
        for _ in range(25):
            p = make_params(omega_L=10 ** rng.uniform(3, 6),
                            omega_P=10 ** rng.uniform(6, 8),
                            delta_diff=rng.uniform(-1e7, 1e7))
            st = three_level_steady_state(p)
            assert st.hermiticity_defect() < 1e-10
            assert st.trace_defect() < 1e-10
            for pop in (st.rho11, st.rho22, st.rho33):
                assert -1e-12 <= pop <= 1.0 + 1e-12

    def test_steady_state_residual(self):
        from oracles import three_level_liouvillian_dense
        p = make_params(delta_diff=4e5)
        st = three_level_steady_state(p)
        lv = three_level_liouvillian_dense(p.omega_L, p.omega_P, p.delta_p,
                                           p.delta_diff, p.gamma_eff, p.gamma_3)
        residual = lv @ st.rho.reshape(9, order="F")
        largest_rate = max(p.delta_p, p.omega_P, p.gamma_3, p.gamma_eff)
        assert np.linalg.norm(residual) <= 1e-10 * largest_rate

    def test_matches_dense_nine_by_nine_solve(self):
        for dd in (0.0, 7e5, -2.3e6):
            p = make_params(delta_diff=dd)
            st = three_level_steady_state(p)
            rho_ref = three_level_steady_dense(p.omega_L, p.omega_P, p.delta_p,
                                               p.delta_diff, p.gamma_eff,
                                               p.gamma_3)
            assert np.max(np.abs(st.rho - rho_ref)) < 1e-12

    def test_agrees_with_reduced_model_far_detuned(self):
        # |delta_p| / max(gamma_3, omega_P) >= 100 across +-10 gamma_eff
        base = make_params(omega_L=2e4, omega_P=1e7, delta_p=1e10,
                           gamma_eff=1e6, gamma_3=3.6e7)
        for dd in np.linspace(-10 * base.gamma_eff, 10 * base.gamma_eff, 21):
            p = make_params(omega_L=2e4, omega_P=1e7, delta_p=1e10,
                            gamma_eff=1e6, gamma_3=3.6e7, delta_diff=float(dd))
            exact = three_level_steady_state(p).rho21
            reduced = two_level_steady_state(build_effective_two_level(p)).rho21
            assert abs(exact - reduced) <= 1e-2 * abs(reduced)

    def test_branching_choice_is_irrelevant(self):
        p = make_params(delta_diff=1e5)
        a = three_level_steady_state(p, branch_to_1=0.5).rho21
        b = three_level_steady_state(p, branch_to_1=1.0).rho21
        assert abs(a - b) <= 1e-4 * abs(a)

    def test_singular_system_reports_condition_number(self):
        # every valid parameter set has a unique steady state (irreducible
        # Lindbladian), so force the degenerate case past the constructor
        p = make_params(omega_L=0.0, omega_P=0.0, delta_diff=0.0)
        object.__setattr__(p, "gamma_eff", 0.0)
        object.__setattr__(p, "gamma_3", 0.0)
        with pytest.raises(SteadyStateSolveError) as err:
            three_level_steady_state(p)
        assert err.value.condition_number > 1e15 \
            or not math.isfinite(err.value.condition_number)

    def test_liouvillian_shape(self):
        lv = three_level_liouvillian(make_params())
        assert lv.shape == (9, 9)


class TestRho31Approximation:
    def test_zero_coherence(self):
        e = build_effective_two_level(make_params(omega_L=0.0))
        s = two_level_steady_state(e)
        r = rho31_approx(e, s)
        assert r.value == 0.0
        assert not r.saturation_warning

    def test_warning_flag(self):
        p = make_params(omega_L=5e8, omega_P=5e9, delta_p=6.28e9, gamma_eff=1e6)
        e = build_effective_two_level(p)
        assert abs(e.rabi) > 0.1 * e.gamma_eff
        assert rho31_approx(e, two_level_steady_state(e)).saturation_warning

    def test_against_full_three_level(self):
        worst = 0.0
        for dd in np.linspace(-5e6, 5e6, 11):
            p = make_params(delta_diff=float(dd))
            e = build_effective_two_level(p)
            approx = rho31_approx(e, two_level_steady_state(e)).value
            exact = three_level_steady_state(p).rho31
            worst = max(worst, abs(approx - exact) / abs(exact))
        assert worst < 0.05


class TestEliminationRegime:
    def test_reference_point_passes(self):
        rep = validate_elimination_regime(make_params())
        assert rep.all_pass
        assert rep.ratio_detuning_linewidth == pytest.approx(6.28e9 / 3.6e7)
        assert rep.ratio_pump_probe == pytest.approx(100.0)

    def test_detuning_equal_linewidth_fails(self):
        rep = validate_elimination_regime(make_params(delta_p=3.6e7))
        assert not rep.detuning_exceeds_linewidth

    def test_saturated_probe_still_below_detuning(self):
        # probe at the worked-example saturated bound vs a 1 GHz-scale detuning
        rep = validate_elimination_regime(make_params(omega_L=7.65e7))
        assert rep.detuning_exceeds_probe
