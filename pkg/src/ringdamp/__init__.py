"""ringdamp: body-frame dynamics of a spinning satellite carrying a
fluid-ring nutation damper.

The satellite is a rigid cylinder; the damper is a circular ring holding a
viscous slug modeled either as a point mass or as a rigid torus arc.  With no
external torques the body-frame angular momentum magnitude is conserved even
while friction drains kinetic energy, so trajectories live on a momentum
sphere and passive damping transfers transverse momentum into the polar spin.
"""

__version__ = "0.1.0"

from .bodies import (CylinderBody, DamperParams, DistributedSlug, InertiaSet,
                     PointMassSlug, SlugModel, assemble_inertia,
                     center_of_mass_offset, distributed_slug_inertia,
                     point_slug_inertia, ring_inertia, slug_mass)
from .dynamics import (Derivative, State, angular_rates, distributed_slug_accel,
                       kinetic_energy, kinetic_energy_rate, momentum_rate,
                       nutation_angle, point_slug_accel, slug_accel,
                       state_derivative, state_from_body_rates)
from .errors import (ConfigError, NumericalDomainError, ParameterDomainError,
                     RingdampError, StiffnessError)
from .integrators import (CasimirPolicy, IntegratorConfig, Scheme, Trajectory,
                          integrate, step)
from .analysis import (EquilibriumPoint, SettlingReport, Stability, energy_series,
                       equilibria, momentum_series, nutation_series, portrait,
                       portrait_seeds, settling_time)
from .experiments import (OutputKind, RunConfig, RunResult, SweepSpec, run,
                          run_config_from_dict, run_config_to_dict, scenario,
                          scenario_dict, sweep, sweep_spec_from_dict)

__all__ = [
    "CylinderBody", "DamperParams", "DistributedSlug", "InertiaSet",
    "PointMassSlug", "SlugModel", "assemble_inertia", "center_of_mass_offset",
    "distributed_slug_inertia", "point_slug_inertia", "ring_inertia",
    "slug_mass",
    "Derivative", "State", "angular_rates", "distributed_slug_accel",
    "kinetic_energy", "kinetic_energy_rate", "momentum_rate", "nutation_angle",
    "point_slug_accel", "slug_accel", "state_derivative", "state_from_body_rates",
    "ConfigError", "NumericalDomainError", "ParameterDomainError",
    "RingdampError", "StiffnessError",
    "CasimirPolicy", "IntegratorConfig", "Scheme", "Trajectory", "integrate",
    "step",
    "EquilibriumPoint", "SettlingReport", "Stability", "energy_series",
    "equilibria", "momentum_series", "nutation_series", "portrait",
    "portrait_seeds", "settling_time",
    "OutputKind", "RunConfig", "RunResult", "SweepSpec", "run",
    "run_config_from_dict", "run_config_to_dict", "scenario", "scenario_dict",
    "sweep", "sweep_spec_from_dict",
    "__version__",
]
