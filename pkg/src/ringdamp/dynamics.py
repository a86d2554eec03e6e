"""Right-hand sides of the body-frame equations of motion.

State is the 4-vector (h, slug_rate): the body-frame angular momentum of the
whole system about its center of mass, plus the angular rate of the slug
relative to the ring about the spin axis.  The momentum magnitude |h| is a
conserved quantity of the continuous dynamics (even with friction), so every
trajectory lives on a sphere in momentum space.

The slug-rate acceleration closes the system through the friction torque pair
between slug and ring wall.  With zero drag the system degenerates to the
free gyrostat: the slug exchanges no torque with the ring, the slug rate is
constant, and the momentum equation alone evolves (see state_derivative).
"""

from dataclasses import dataclass, field

import numpy as np

from .bodies import DamperParams, DistributedSlug, InertiaSet, PointMassSlug, assemble_inertia
from .errors import NumericalDomainError, ParameterDomainError

_E3 = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class State:
    """Dynamical state: body-frame angular momentum (kg m^2/s) and slug rate
    relative to the ring (rad/s)."""

    momentum: np.ndarray = field(repr=False)
    slug_rate: float = 0.0

    def __post_init__(self):
        h = np.asarray(self.momentum, dtype=float)
        if h.shape != (3,):
            raise ParameterDomainError(f"momentum must be a 3-vector, got shape {h.shape}")
        if not (np.all(np.isfinite(h)) and np.isfinite(self.slug_rate)):
            raise ParameterDomainError("state must be finite")
        object.__setattr__(self, "momentum", h)
        object.__setattr__(self, "slug_rate", float(self.slug_rate))

    def as_array(self):
        return np.array([*self.momentum, self.slug_rate])


@dataclass(frozen=True)
class Derivative:
    """Time derivative of a State."""

    d_momentum: np.ndarray = field(repr=False)  # kg m^2/s^2
    d_slug_rate: float = 0.0                    # rad/s^2

    def as_array(self):
        return np.array([*self.d_momentum, self.d_slug_rate])


def _inverse_combined(inertia):
    combined = inertia.combined
    try:
        minv = np.linalg.inv(combined)
    except np.linalg.LinAlgError as exc:
        raise NumericalDomainError(f"combined inertia tensor is singular: {exc}") from exc
    if not np.all(np.isfinite(minv)):
        raise NumericalDomainError("combined inertia tensor is numerically singular")
    return minv


def angular_rates(inertia, state):
    """Recover the ring and slug angular velocities (rad/s) from the state.

    Inverts h = I_ring*w_ring + I_slug*w_slug with w_slug = w_ring +
    slug_rate*e3.  Feeding the result back through that identity reproduces
    h to machine precision.
    """
    minv = _inverse_combined(inertia)
    rel = state.slug_rate * _E3
    ring_rate = minv @ (state.momentum - inertia.slug @ rel)
    return ring_rate, ring_rate + rel


def momentum_rate(inertia, state):
    """dh/dt = h x [(I_ring + I_slug)^-1 (h + I_ring * slug_rate * e3)].

    Equivalent to -(w_slug x h); the cross-product form makes dh/dt . h = 0
    explicit, which is the differential statement that |h| is conserved.
    """
    minv = _inverse_combined(inertia)
    drive = minv @ (state.momentum + inertia.ring @ (state.slug_rate * _E3))
    return np.cross(state.momentum, drive)


def _diagonal_slug_accel(inertia, params, state):
    """Slug acceleration for diagonal slug tensors (friction + axis coupling)."""
    i_zs = inertia.slug[2, 2]
    i_zr = inertia.ring[2, 2]
    if i_zs <= 0 or i_zr <= 0:
        raise ParameterDomainError(
            "slug acceleration needs positive axial moments of inertia")
    arm = params.ring_radius - inertia.com_offset
    hx, hy = state.momentum[0], state.momentum[1]
    friction = -state.slug_rate * params.drag_coeff * arm**2 * (i_zs + i_zr) / (i_zs * i_zr)
    a_y = inertia.ring[1, 1] + inertia.slug[1, 1]
    a_x = inertia.ring[0, 0] + inertia.slug[0, 0]
    return friction + hx * hy / (a_y * i_zs) - hx * hy / (a_x * i_zs)


def point_slug_accel(inertia, params, state):
    """Relative angular acceleration of a point-mass slug.

    Friction decays the slug rate; the remaining terms couple the slug to
    the transverse momentum through the axial-momentum bookkeeping.
    """
    if not isinstance(params.slug, PointMassSlug):
        raise ParameterDomainError("point_slug_accel requires a point-mass slug")
    return _diagonal_slug_accel(inertia, params, state)


def distributed_slug_accel(inertia, params, state):
    """Relative angular acceleration of a distributed (torus-arc) slug.

    Derived by differentiating the axial component of h = I_ring*w_ring +
    I_slug*w_slug, applying the friction torque pair to the ring's axial
    momentum, eliminating the ring angular acceleration through
    dw/dt = (I_ring + I_slug)^-1 (dh/dt - I_slug * accel * e3), and solving
    the resulting linear equation for the slug acceleration.  With no
    product of inertia this reduces exactly to the diagonal closure above.
    """
    if not isinstance(params.slug, DistributedSlug):
        raise ParameterDomainError("distributed_slug_accel requires a distributed slug")
    i_xz = inertia.slug[0, 2]
    if i_xz == 0.0:
        return _diagonal_slug_accel(inertia, params, state)
    i_zs = inertia.slug[2, 2]
    i_zr = inertia.ring[2, 2]
    if i_zr <= 0:
        raise ParameterDomainError("ring axial moment of inertia must be positive")
    minv = _inverse_combined(inertia)
    dh = momentum_rate(inertia, state)
    coeff = i_zs - i_xz * (minv @ (inertia.slug @ _E3))[0]
    scale = max(abs(i_zs), abs(i_xz))
    if abs(coeff) < 1e-14 * scale:
        raise NumericalDomainError(
            "slug-acceleration solve is degenerate (coefficient ~ 0)")
    arm = params.ring_radius - inertia.com_offset
    friction = params.drag_coeff * arm**2 * (i_zr + i_zs) / i_zr
    return (dh[2] - friction * state.slug_rate - i_xz * (minv @ dh)[0]) / coeff


def slug_accel(inertia, params, state):
    """Model-appropriate slug acceleration."""
    if isinstance(params.slug, PointMassSlug):
        return point_slug_accel(inertia, params, state)
    return distributed_slug_accel(inertia, params, state)


def state_derivative(inertia, params, state):
    """Full right-hand side of the equations of motion.

    With drag_coeff == 0 the system is dissipationless: the slug exchanges
    no torque with the ring and its relative rate is frozen (d_slug_rate = 0),
    leaving the free-gyrostat momentum equation.  This matches the regime in
    which the classic rigid-body stability picture (stable major axis,
    unstable intermediate axis) applies.
    """
    dh = momentum_rate(inertia, state)
    if params.dissipationless:
        accel = 0.0
    else:
        accel = slug_accel(inertia, params, state)
    return Derivative(d_momentum=dh, d_slug_rate=accel)


def kinetic_energy(inertia, state):
    """Rotational kinetic energy of ring + slug (J)."""
    ring_rate, slug_rate_vec = angular_rates(inertia, state)
    return 0.5 * ring_rate @ inertia.ring @ ring_rate \
        + 0.5 * slug_rate_vec @ inertia.slug @ slug_rate_vec


def kinetic_energy_rate(inertia, params, state):
    """Analytic d(KE)/dt along the equations of motion.

    For the point-mass model this equals the friction-pair power
    -drag_coeff * (ring_radius - d)^2 * slug_rate^2 identically.
    """
    deriv = state_derivative(inertia, params, state)
    minv = _inverse_combined(inertia)
    ring_rate, slug_rate_vec = angular_rates(inertia, state)
    d_ring_rate = minv @ (deriv.d_momentum - inertia.slug @ (deriv.d_slug_rate * _E3))
    d_slug_rate_vec = d_ring_rate + deriv.d_slug_rate * _E3
    return ring_rate @ inertia.ring @ d_ring_rate \
        + slug_rate_vec @ inertia.slug @ d_slug_rate_vec


def nutation_angle(state):
    """Angle between the momentum vector and the spin axis, in [0, pi]."""
    h = state.momentum
    if h[0] == 0.0 and h[1] == 0.0 and h[2] == 0.0:
        raise ParameterDomainError("nutation angle is undefined for zero momentum")
    return float(np.arctan2(np.hypot(h[0], h[1]), h[2]))


def state_from_body_rates(params, ring_rate, slug_rate=0.0, inertia=None):
    """Build the initial State from angular velocities.

    Forward momentum map: h = I_ring*w_ring + I_slug*(w_ring + slug_rate*e3).
    """
    if inertia is None:
        inertia = assemble_inertia(params)
    w = np.asarray(ring_rate, dtype=float)
    if w.shape != (3,):
        raise ParameterDomainError(f"ring rate must be a 3-vector, got shape {w.shape}")
    h = inertia.ring @ w + inertia.slug @ (w + slug_rate * _E3)
    return State(momentum=h, slug_rate=slug_rate)
