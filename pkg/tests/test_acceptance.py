"""Acceptance criteria for the primary component.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.  Criteria and tolerances are pinned here; the reference runs
are shared session fixtures (point-mass 0-400 s and distributed 0-40 s, both
RK4 at dt = 1e-4 s).
"""

from dataclasses import replace

import numpy as np
import pytest

from ringdamp import (DistributedSlug, IntegratorConfig, PointMassSlug, State,
                      angular_rates, assemble_inertia, distributed_slug_accel,
                      distributed_slug_inertia, integrate, kinetic_energy_rate,
                      momentum_rate, point_slug_accel, point_slug_inertia,
                      portrait, portrait_seeds, settling_time, slug_mass,
                      state_derivative, state_from_body_rates)
from ringdamp.validation import thin_arc_inertia_quadrature

from conftest import OMEGA0


def _criterion(num, name, ok, detail):
    print(f"ACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'} | {detail}")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


@pytest.fixture(scope="module")
def free_traj_100(free_params):
    s0 = state_from_body_rates(free_params, np.array(OMEGA0))
    return integrate(free_params, s0, 100.0, IntegratorConfig(dt=1e-4))


@pytest.fixture(scope="module")
def free_probe_bundle(free_params):
    seeds = portrait_seeds(1.0, np.deg2rad(5.0))
    return portrait(free_params, seeds, 100.0, IntegratorConfig(dt=1e-4))


def _angles_from_axis(traj, axis):
    unit = traj.momentum / np.linalg.norm(traj.momentum, axis=1)[:, None]
    return np.degrees(np.arccos(np.clip(unit @ axis, -1.0, 1.0)))


def test_criterion_1_casimir_conservation(pm_traj_400):
    drift = pm_traj_400.casimir_max_rel_err
    _criterion(1, "casimir conservation", drift < 1e-6,
               f"max | |h|-|h0| |/|h0| = {drift:.3e} over 0-400 s (tol 1e-6)")


def test_criterion_2_point_mass_settling(pm_traj_400):
    report = settling_time(pm_traj_400, np.deg2rad(2.0))
    t_star = report.settling_time
    residual = np.degrees(report.residual_nutation)
    ok = (t_star is not None and 210.0 <= t_star <= 390.0
          and report.residual_nutation > 0)
    _criterion(2, "point-mass settling",
               ok, f"settling time {t_star} s (target 300 s +-30%), "
                   f"residual nutation {residual:.3f} deg (> 0 required)")


def test_criterion_3_distributed_settling(dist_traj_40):
    report = settling_time(dist_traj_40, np.deg2rad(2.0))
    t_star = report.settling_time
    residual = np.degrees(report.residual_nutation)
    # diagnostic: when the decay reaches its steady floor
    gamma = dist_traj_40.nutation
    floor = max(2 * report.residual_nutation,
                report.residual_nutation + np.deg2rad(0.05))
    above = np.nonzero(gamma >= floor)[0]
    steady_at = float(dist_traj_40.t[above[-1] + 1]) if len(above) else 0.0
    ok = (t_star is not None and 7.0 <= t_star <= 13.0 and residual < 0.5)
    _criterion(3, "distributed settling", ok,
               f"settling time below 2 deg: {t_star} s (target 10 s +-30%); "
               f"residual nutation {residual:.3f} deg (< 0.5 required); "
               f"decay reaches its steady floor at {steady_at:.2f} s "
               f"(the source text's 'about ten seconds' describes this point; "
               f"see the decisions ledger)")


def test_criterion_4_dissipationless_structure(free_traj_100, free_probe_bundle):
    ke = free_traj_100.kinetic_energy
    ke_drift = float(np.abs(ke - ke[0]).max() / ke[0])
    ok_a = ke_drift < 1e-6

    axes = [np.array(v) for v in ((1.0, 0, 0), (-1.0, 0, 0), (0, 1.0, 0),
                                  (0, -1.0, 0), (0, 0, 1.0), (0, 0, -1.0))]
    z_max = max(_angles_from_axis(free_probe_bundle[i], axes[i // 2]).max()
                for i in (8, 9, 10, 11))
    ok_b = z_max < 10.0
    y_excursions = [_angles_from_axis(free_probe_bundle[i], axes[i // 2]).max()
                    for i in (4, 5, 6, 7)]
    ok_c = min(y_excursions) > 45.0
    _criterion(4, "dissipationless structure", ok_a and ok_b and ok_c,
               f"KE drift {ke_drift:.3e} over 100 s (tol 1e-6); "
               f"polar probes stay within {z_max:.2f} deg (limit 10); "
               f"intermediate-axis probes reach {min(y_excursions):.1f} deg "
               f"(must exceed 45)")


def test_criterion_5_equilibrium_fixed_points(pm_params, dist_params):
    flat = replace(dist_params, slug=replace(dist_params.slug, vertical_offset=0.0))
    worst = 0.0
    for params in (pm_params, flat):
        inertia = assemble_inertia(params)
        i_char = float(np.median(np.diag(inertia.combined)))
        for axis in range(3):
            for sign in (1.0, -1.0):
                h = np.zeros(3)
                h[axis] = sign
                deriv = state_derivative(inertia, params, State(momentum=h))
                scaled = np.linalg.norm(deriv.d_momentum) * i_char \
                    + abs(deriv.d_slug_rate) * i_char**2
                worst = max(worst, scaled)
    _criterion(5, "equilibrium fixed points", worst < 1e-12,
               f"worst scaled |rhs| over six axis points x both models = "
               f"{worst:.3e} (tol 1e-12; vertical-offset coupling case "
               f"excluded, see ledger)")


def test_criterion_6_oracle_equivalences(pm_params, dist_params, pm_traj_400):
    rng = np.random.default_rng(101)
    details = []
    ok = True

    # (a) momentum equation vs frame-rotation form over 1000 random states
    worst_a = 0.0
    for params in (pm_params, dist_params):
        inertia = assemble_inertia(params)
        for _ in range(500):
            state = State(momentum=rng.normal(0, 0.5, 3),
                          slug_rate=float(rng.normal(0, 20)))
            dh = momentum_rate(inertia, state)
            _, slug_vec = angular_rates(inertia, state)
            alt = -np.cross(slug_vec, state.momentum)
            worst_a = max(worst_a, np.linalg.norm(dh - alt)
                          / max(np.linalg.norm(dh), 1e-300))
    ok &= worst_a < 1e-12
    details.append(f"(a) form equivalence {worst_a:.2e} (tol 1e-12)")

    # (b) closed-form arc inertia vs thin-arc quadrature
    worst_b = 0.0
    for angle in (30.0, 135.0, 270.0, 360.0):
        slug = DistributedSlug(density=1000.0, tube_radius=0.005,
                               fill_angle=np.deg2rad(angle))
        mass = slug_mass(slug, 0.025)
        d = mass * 0.025 / (mass + 2.0)
        closed = distributed_slug_inertia(slug, 0.025, d)
        quad = thin_arc_inertia_quadrature(slug, 0.025, d)
        worst_b = max(worst_b, np.abs(np.diag(closed) - np.diag(quad)).max()
                      / np.abs(np.diag(quad)).max())
    ok &= worst_b < 1e-10
    details.append(f"(b) quadrature {worst_b:.2e} (tol 1e-10)")

    # (c) point-mass limit at fill angle 1e-4
    slug = DistributedSlug(density=1000.0, tube_radius=0.005, fill_angle=1e-4)
    mass = slug_mass(slug, 0.025)
    dist = distributed_slug_inertia(slug, 0.025, 1.2e-4)
    point = point_slug_inertia(mass, 0.025, 1.2e-4)
    gap_c = np.abs(dist - point).max() / np.abs(point).max()
    ok &= gap_c < 1e-8
    details.append(f"(c) point-mass limit {gap_c:.2e} (tol 1e-8)")

    # (d) analytic energy rate along point-mass trajectory states; the
    # per-sample gap is normalized by the characteristic friction power of
    # the run (the slug rate passes through zero, where a pointwise relative
    # comparison is ill-posed)
    inertia = assemble_inertia(pm_params)
    arm = pm_params.ring_radius - inertia.com_offset
    samples = [pm_traj_400.state_at(k)
               for k in range(0, pm_traj_400.n_samples, 500)]
    powers = [pm_params.drag_coeff * arm**2 * s.slug_rate**2 for s in samples]
    power_ref = max(powers)
    worst_d = max(abs(kinetic_energy_rate(inertia, pm_params, s) + p)
                  for s, p in zip(samples, powers)) / power_ref
    ok &= worst_d < 1e-8
    details.append(f"(d) energy rate {worst_d:.2e} (tol 1e-8 of the "
                   f"run's peak friction power)")

    # (e) distributed slug acceleration with no vertical offset reduces
    # exactly to the point-mass formula with the arc inertia entries
    flat = replace(dist_params, slug=replace(dist_params.slug, vertical_offset=0.0))
    iset = assemble_inertia(flat)
    pm_like = replace(flat, slug=PointMassSlug(0.005))
    exact = all(distributed_slug_accel(iset, flat, s)
                == point_slug_accel(iset, pm_like, s)
                for s in (State(momentum=rng.normal(0, 0.5, 3),
                                slug_rate=float(rng.normal(0, 20)))
                          for _ in range(200)))
    ok &= exact
    details.append(f"(e) flat-slug reduction exact: {exact}")

    _criterion(6, "oracle equivalences", ok, "; ".join(details))


def test_criterion_7_integrator_order(pm_params):
    s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
    base = 2.5e-4

    def end_state(dt):
        traj = integrate(pm_params, s0, 1.0,
                         IntegratorConfig(dt=dt, sample_stride=1.0))
        return np.concatenate([traj.momentum[-1], [traj.slug_rate[-1]]])

    reference = end_state(base / 64)
    errors = [np.linalg.norm(end_state(base / 2**k) - reference)
              for k in range(3)]
    ratios = [errors[0] / errors[1], errors[1] / errors[2]]
    ok = all(16.0 * 0.8 <= r <= 16.0 * 1.2 for r in ratios)
    _criterion(7, "integrator order", ok,
               f"error reduction per step halving: {ratios[0]:.2f}, "
               f"{ratios[1]:.2f} (required 16x +-20% against a dt/64 reference)")


def test_criterion_8_momentum_transfer(pm_traj_400):
    h = pm_traj_400.momentum
    polar_gain = h[-1, 2] - h[0, 2]
    transverse = np.hypot(h[:, 0], h[:, 1])
    # envelope at the end of the run: peak over the final second
    tail = pm_traj_400.t >= pm_traj_400.t[-1] - 1.0
    envelope_ratio = transverse[tail].max() / transverse[0]
    ok = polar_gain > 0 and envelope_ratio < 0.25
    _criterion(8, "transfer of momentum", ok,
               f"polar momentum grows by {polar_gain:.4f} kg m^2/s; "
               f"final transverse envelope is {100 * envelope_ratio:.1f}% of "
               f"initial (must be < 25%)")
