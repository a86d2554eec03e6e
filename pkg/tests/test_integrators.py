"""Integration: conservation behavior, step consistency, policies, error
handling, and determinism."""

from dataclasses import replace

import numpy as np
import pytest

from ringdamp import (CasimirPolicy, IntegratorConfig, NumericalDomainError,
                      ParameterDomainError, Scheme, State, StiffnessError,
                      assemble_inertia, integrate, state_derivative,
                      state_from_body_rates, step)

from conftest import OMEGA0


class TestConfigValidation:
    def test_rejects_bad_dt(self):
        with pytest.raises(ParameterDomainError):
            IntegratorConfig(dt=0.0)

    def test_rejects_bad_tolerances(self):
        with pytest.raises(ParameterDomainError):
            IntegratorConfig(rel_tol=-1e-9)

    def test_rejects_inverted_dt_bounds(self):
        with pytest.raises(ParameterDomainError):
            IntegratorConfig(dt_min=1e-2, dt_max=1e-4)


class TestConservation:
    def test_axis_spin_is_constant(self, free_params):
        s0 = State(momentum=np.array([0.0, 0.0, 1.0]))
        traj = integrate(free_params, s0, 2.0, IntegratorConfig(dt=1e-3))
        assert np.array_equal(traj.momentum, np.tile(s0.momentum, (traj.n_samples, 1)))
        assert np.array_equal(traj.slug_rate, np.zeros(traj.n_samples))

    def test_dissipationless_conserves_energy_and_momentum(self, free_params):
        s0 = state_from_body_rates(free_params, np.array(OMEGA0))
        traj = integrate(free_params, s0, 100.0, IntegratorConfig(dt=1e-4))
        ke = traj.kinetic_energy
        assert np.abs(ke - ke[0]).max() <= 1e-6 * ke[0]
        assert traj.casimir_max_rel_err <= 1e-6

    def test_dissipative_run_conserves_momentum_magnitude(self, pm_traj_400):
        assert pm_traj_400.casimir_max_rel_err < 1e-6

    def test_kinetic_energy_non_increasing_with_drag(self, pm_traj_400):
        increases = np.diff(pm_traj_400.kinetic_energy)
        assert increases.max() <= 1e-10 * pm_traj_400.kinetic_energy[0]


class TestStep:
    def test_first_order_consistency(self, pm_params):
        iset = assemble_inertia(pm_params)
        s = state_from_body_rates(pm_params, np.array(OMEGA0))
        f = state_derivative(iset, pm_params, s).as_array()

        def defect(dt):
            stepped, _ = step(pm_params, s, dt)
            euler = s.as_array() + dt * f
            return np.linalg.norm(stepped.as_array() - euler)

        ratio = defect(2e-6) / defect(1e-6)
        assert 3.0 < ratio < 5.0  # defect is O(dt^2)

    def test_equilibrium_fixed(self, pm_params):
        s = State(momentum=np.array([0.0, 0.0, 1.0]))
        stepped, _ = step(pm_params, s, 1e-3)
        assert np.array_equal(stepped.momentum, s.momentum)
        assert stepped.slug_rate == 0.0

    def test_error_estimate_presence(self, pm_params):
        s = state_from_body_rates(pm_params, np.array(OMEGA0))
        _, err4 = step(pm_params, s, 1e-4, Scheme.RK4_FIXED)
        _, err45 = step(pm_params, s, 1e-4, Scheme.RK45_ADAPTIVE)
        assert err4 is None
        assert err45 is not None and 0 <= err45 < 1e-8

    def test_non_finite_rhs_raises_with_context(self, pm_params):
        s = State(momentum=np.array([1e200, 0.0, 1e200]), slug_rate=0.0)
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(NumericalDomainError, match="slug_rate"):
                step(pm_params, s, 1e-4)

    def test_schemes_agree_over_one_second(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        rk4 = integrate(pm_params, s0, 1.0, IntegratorConfig(dt=1e-4, sample_stride=1.0))
        rk45 = integrate(pm_params, s0, 1.0,
                         IntegratorConfig(scheme=Scheme.RK45_ADAPTIVE, rel_tol=1e-9,
                                          abs_tol=1e-12, sample_stride=1.0))
        gap = np.linalg.norm(rk45.momentum[-1] - rk4.momentum[-1])
        assert gap <= 1e-6 * np.linalg.norm(rk4.momentum[-1])


class TestPolicies:
    def test_casimir_alarm_flags_but_completes(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        cfg = IntegratorConfig(dt=1e-4, casimir_alarm=1e-15)
        traj = integrate(pm_params, s0, 0.5, cfg)
        assert "casimir alarm" in traj.termination
        assert traj.t[-1] == pytest.approx(0.5)

    def test_renormalize_pins_momentum_magnitude(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        cfg = IntegratorConfig(dt=1e-4, casimir_policy=CasimirPolicy.RENORMALIZE)
        traj = integrate(pm_params, s0, 2.0, cfg)
        assert traj.casimir_max_rel_err <= 1e-14
        assert 0 < traj.max_renorm_rel < 1e-10

    def test_renormalize_preserves_nutation_series(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        mon = integrate(pm_params, s0, 2.0, IntegratorConfig(dt=1e-4))
        ren = integrate(pm_params, s0, 2.0,
                        IntegratorConfig(dt=1e-4,
                                         casimir_policy=CasimirPolicy.RENORMALIZE))
        # rescaling h preserves the component ratios that define the angle
        assert np.abs(mon.nutation - ren.nutation).max() < 1e-7


class TestSamplingAndDeterminism:
    def test_sample_grid(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        traj = integrate(pm_params, s0, 0.1, IntegratorConfig(dt=1e-4))
        assert traj.n_samples == 11
        assert np.allclose(traj.t, np.arange(11) * 1e-2, rtol=0, atol=1e-15)

    def test_trailing_fractional_step(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        traj = integrate(pm_params, s0, 0.05005, IntegratorConfig(dt=1e-4))
        assert traj.t[-1] == pytest.approx(0.05005, abs=1e-15)
        assert traj.n_steps == 501
        assert np.all(np.diff(traj.t) > 0)

    def test_rk45_lands_on_sample_times(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        cfg = IntegratorConfig(scheme=Scheme.RK45_ADAPTIVE, sample_stride=1e-2)
        traj = integrate(pm_params, s0, 0.095, cfg)
        expected = np.concatenate([[0.0], np.arange(1, 10) * 1e-2, [0.095]])
        assert np.allclose(traj.t, expected, rtol=0, atol=1e-15)

    def test_bit_identical_reruns(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        cfg = IntegratorConfig(dt=1e-4)
        a = integrate(pm_params, s0, 1.0, cfg)
        b = integrate(pm_params, s0, 1.0, cfg)
        assert np.array_equal(a.momentum, b.momentum)
        assert np.array_equal(a.slug_rate, b.slug_rate)
        assert np.array_equal(a.t, b.t)


class TestFailures:
    def test_rejects_non_positive_t_end(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        with pytest.raises(ParameterDomainError):
            integrate(pm_params, s0, 0.0)

    def test_blowup_raises_with_partial(self, pm_params):
        s0 = State(momentum=np.array([1e200, 0.0, 1e200]), slug_rate=0.0)
        with pytest.raises(NumericalDomainError) as excinfo:
            integrate(pm_params, s0, 1.0, IntegratorConfig(dt=1e-4))
        partial = getattr(excinfo.value, "partial", None)
        assert partial is not None
        assert partial.n_samples >= 1

    def test_stiffness_error_on_step_underflow(self, pm_params):
        s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
        cfg = IntegratorConfig(scheme=Scheme.RK45_ADAPTIVE, dt=1e-3,
                               rel_tol=1e-13, abs_tol=1e-16,
                               dt_min=5e-4, dt_max=1e-2)
        with pytest.raises(StiffnessError) as excinfo:
            integrate(pm_params, s0, 1.0, cfg)
        assert excinfo.value.partial is not None
