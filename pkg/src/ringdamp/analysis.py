"""Derived quantities and qualitative structure of the dynamics:
equilibrium enumeration and empirical stability classification, settling-time
metrics, and momentum-sphere phase portraits.
"""

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .bodies import assemble_inertia
from .dynamics import State, state_derivative
from .errors import ParameterDomainError
from .integrators import IntegratorConfig, Trajectory, integrate

DEFAULT_THRESHOLD = np.deg2rad(2.0)

_AXES = (("+x", np.array([1.0, 0.0, 0.0])),
         ("-x", np.array([-1.0, 0.0, 0.0])),
         ("+y", np.array([0.0, 1.0, 0.0])),
         ("-y", np.array([0.0, -1.0, 0.0])),
         ("+z", np.array([0.0, 0.0, 1.0])),
         ("-z", np.array([0.0, 0.0, -1.0])))


class Stability(enum.Enum):
    STABLE_SPIRAL = "stable-spiral"
    UNSTABLE = "unstable"
    CONDITIONALLY_STABLE = "conditionally-stable"


@dataclass(frozen=True)
class EquilibriumPoint:
    """Axis point on the momentum sphere with zero slug rate."""

    momentum: np.ndarray = field(repr=False)
    slug_rate: float
    axis: str                      # one of +x -x +y -y +z -z
    classification: Stability | None
    rhs_residual: float            # scaled |state_derivative| at the point


@dataclass(frozen=True)
class SettlingReport:
    """Settling statistics of a nutation-angle history.

    ``settling_time`` is the first sample time after which the nutation
    angle stays below ``threshold`` for the remainder of the run (None when
    it never does); the suffix criterion is used because the angle
    oscillates, so a first-crossing rule would under-report.  The residual
    is the mean angle over the final 10% of the run.
    """

    threshold: float               # rad
    settling_time: float | None    # s
    residual_nutation: float       # rad

    @property
    def settled(self):
        return self.settling_time is not None


def _scaled_residual(inertia, params, state, h_mag):
    """Norm of the state derivative with momentum and slug-rate channels
    nondimensionalized by the natural scales h^2/I and h^2/I^2."""
    deriv = state_derivative(inertia, params, state)
    i_char = float(np.median(np.diag(inertia.combined)))
    momentum_scale = h_mag**2 / i_char
    rate_scale = momentum_scale / i_char
    return float(np.linalg.norm(deriv.d_momentum) / momentum_scale
                 + abs(deriv.d_slug_rate) / rate_scale)


def _tangent_pair(axis_vec):
    seed = np.array([1.0, 0.0, 0.0]) if abs(axis_vec[0]) < 0.9 else np.array([0.0, 0.0, 1.0])
    u = seed - (seed @ axis_vec) * axis_vec
    u /= np.linalg.norm(u)
    return u, np.cross(axis_vec, u)


def _probe_angles(params, axis_vec, offset, h_mag, t_end, config):
    """Integrate one probe started ``offset`` rad from the axis; returns the
    angle-from-axis series in radians."""
    u, _ = _tangent_pair(axis_vec)
    seed = State(momentum=h_mag * (np.cos(offset) * axis_vec + np.sin(offset) * u))
    traj = integrate(params, seed, t_end, config)
    unit = traj.momentum / np.linalg.norm(traj.momentum, axis=1)[:, None]
    return np.arccos(np.clip(unit @ axis_vec, -1.0, 1.0))


def _classify(params, axis_vec, offset, h_mag, t_end, config, depart_angle):
    """Empirical stability of an axis point from two probe trajectories.

    Linearization is avoided on purpose; behavior is judged from a probe of
    the dissipationless system (slug frozen) and a probe of the dissipative
    system: departure beyond ``depart_angle`` in the dissipationless probe
    means unstable; staying put there but departing under dissipation means
    conditionally stable; convergence under dissipation is a stable spiral.
    """
    frozen = replace(params, drag_coeff=0.0)
    ang_frozen = _probe_angles(frozen, axis_vec, offset, h_mag,
                               min(t_end, 20.0), config)
    if ang_frozen.max() > depart_angle:
        return Stability.UNSTABLE
    ang_diss = _probe_angles(params, axis_vec, offset, h_mag, t_end, config)
    if ang_diss.max() > depart_angle:
        return Stability.CONDITIONALLY_STABLE
    return Stability.STABLE_SPIRAL


def equilibria(params, momentum_mag, classify=True, probe_offset=np.deg2rad(5.0),
               probe_t_end=60.0, config=None):
    """The six axis fixed points on the sphere of radius ``momentum_mag``.

    Each point is verified to annihilate the equations of motion (scaled
    residual below 1e-12); with a slug product of inertia the +-x/+-z axis
    points are no longer exact equilibria, so verification is skipped and the
    residual simply reported.
    """
    if not (momentum_mag > 0 and np.isfinite(momentum_mag)):
        raise ParameterDomainError(f"momentum magnitude must be positive, got {momentum_mag}")
    if config is None:
        config = IntegratorConfig()
    inertia = assemble_inertia(params)
    exact = inertia.slug[0, 2] == 0.0
    points = []
    for label, axis_vec in _AXES:
        state = State(momentum=momentum_mag * axis_vec, slug_rate=0.0)
        residual = _scaled_residual(inertia, params, state, momentum_mag)
        if exact and residual >= 1e-12:
            raise ParameterDomainError(
                f"axis point {label} fails the fixed-point check: residual {residual:.3e}")
        cls = None
        if classify:
            cls = _classify(params, axis_vec, probe_offset, momentum_mag,
                            probe_t_end, config, depart_angle=np.deg2rad(45.0))
        points.append(EquilibriumPoint(momentum=momentum_mag * axis_vec,
                                       slug_rate=0.0, axis=label,
                                       classification=cls, rhs_residual=residual))
    return points


def settling_time(traj, threshold=DEFAULT_THRESHOLD):
    """SettlingReport for a trajectory's nutation-angle history."""
    if traj.n_samples == 0:
        raise ParameterDomainError("settling_time needs a non-empty trajectory")
    gamma = traj.nutation
    tail = max(1, traj.n_samples // 10)
    residual = float(np.mean(gamma[-tail:]))
    above = gamma >= threshold
    if above[-1]:
        t_star = None
    else:
        crossings = np.nonzero(above)[0]
        t_star = float(traj.t[0]) if len(crossings) == 0 \
            else float(traj.t[crossings[-1] + 1])
    return SettlingReport(threshold=float(threshold), settling_time=t_star,
                          residual_nutation=residual)


def portrait_seeds(momentum_mag, offset=np.deg2rad(5.0)):
    """Probe states near each of the six axis points: for every axis, the
    equilibrium tipped by ``offset`` along each of two tangent directions."""
    if not (momentum_mag > 0):
        raise ParameterDomainError("momentum magnitude must be positive")
    if not (0 < offset < np.pi / 2):
        raise ParameterDomainError("offset must lie in (0, pi/2)")
    seeds = []
    for _, axis_vec in _AXES:
        for tangent in _tangent_pair(axis_vec):
            h = momentum_mag * (np.cos(offset) * axis_vec + np.sin(offset) * tangent)
            seeds.append(State(momentum=h, slug_rate=0.0))
    return seeds


def portrait(params, seeds, t_end, config=None):
    """One trajectory per seed, all confined to a common momentum sphere.

    Seeds must share the same |h| (a single sphere); mixed radii are
    rejected since the bundle would not be a portrait of one sphere.
    """
    if config is None:
        config = IntegratorConfig()
    if not seeds:
        raise ParameterDomainError("portrait needs at least one seed")
    mags = np.array([np.linalg.norm(s.momentum) for s in seeds])
    if mags.min() <= 0:
        raise ParameterDomainError("portrait seeds must have nonzero momentum")
    if (mags.max() - mags.min()) / mags.max() > 1e-9:
        raise ParameterDomainError(
            f"portrait seeds must share one momentum sphere; "
            f"|h| spans [{mags.min():g}, {mags.max():g}]")
    return [integrate(params, seed, t_end, config) for seed in seeds]


def nutation_series(traj):
    """(t, nutation angle) pairs, radians."""
    return np.column_stack([traj.t, traj.nutation])


def energy_series(traj):
    """(t, kinetic energy) pairs, joules."""
    return np.column_stack([traj.t, traj.kinetic_energy])


def momentum_series(traj):
    """(t, h_x, h_y, h_z, |h|) rows."""
    mags = np.linalg.norm(traj.momentum, axis=1)
    return np.column_stack([traj.t, traj.momentum, mags])
