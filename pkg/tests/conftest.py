"""Shared fixtures: reference parameter sets and the long trajectories reused
across analysis, experiments, and acceptance tests."""

import numpy as np
import pytest

from ringdamp import (CylinderBody, DamperParams, DistributedSlug, IntegratorConfig,
                      PointMassSlug, integrate, state_from_body_rates)

OMEGA0 = (100.0, 0.0, 400.0)


@pytest.fixture(scope="session")
def pm_params():
    return DamperParams(body=CylinderBody(mass=2.0, radius=0.05, length=0.05),
                        slug=PointMassSlug(mass=0.005),
                        ring_radius=0.05, drag_coeff=1.63)


@pytest.fixture(scope="session")
def dist_params():
    return DamperParams(body=CylinderBody(mass=2.0, radius=0.05, length=0.05),
                        slug=DistributedSlug(density=1000.0, tube_radius=0.005,
                                             fill_angle=np.deg2rad(135.0),
                                             vertical_offset=0.015),
                        ring_radius=0.025, drag_coeff=1.63)


@pytest.fixture(scope="session")
def free_params(pm_params):
    from dataclasses import replace
    return replace(pm_params, drag_coeff=0.0)


@pytest.fixture(scope="session")
def pm_traj_400(pm_params):
    """Reference point-mass run: 0-400 s, RK4 at dt = 1e-4 s."""
    s0 = state_from_body_rates(pm_params, np.array(OMEGA0))
    return integrate(pm_params, s0, 400.0, IntegratorConfig(dt=1e-4))


@pytest.fixture(scope="session")
def dist_traj_40(dist_params):
    """Reference distributed run: 0-40 s, RK4 at dt = 1e-4 s."""
    s0 = state_from_body_rates(dist_params, np.array(OMEGA0))
    return integrate(dist_params, s0, 40.0, IntegratorConfig(dt=1e-4))
