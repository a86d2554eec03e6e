"""Config-driven experiment runner: named scenarios reproducing the two
reference setups, single runs with persisted series/reports, and parameter
sweeps with a metrics table.

All outputs are deterministic: no timestamps or random seeds enter the
artifacts, so re-running a scenario reproduces byte-identical files.
"""

import copy
import enum
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__ as _code_version
from . import configio
from .analysis import portrait, portrait_seeds, settling_time
from .bodies import (CylinderBody, DamperParams, DistributedSlug, PointMassSlug)
from .dynamics import state_from_body_rates
from .errors import ConfigError, NumericalDomainError, StiffnessError
from .integrators import CasimirPolicy, IntegratorConfig, Scheme, integrate

SERIES_HEADER = "t,h_x,h_y,h_z,h_mag,beta_dot,ke,gamma_deg,casimir_rel_err"


class OutputKind(enum.Enum):
    MOMENTUM = "momentum"
    ENERGY = "energy"
    NUTATION = "nutation"
    PORTRAIT = "portrait"
    SETTLING = "settling"


DEFAULT_OUTPUTS = (OutputKind.MOMENTUM, OutputKind.ENERGY,
                   OutputKind.NUTATION, OutputKind.SETTLING)


@dataclass(frozen=True)
class RunConfig:
    """One simulation: physical parameters, initial angular velocity of the
    body frame, and what to persist.  The initial state is derived from the
    angular velocity through the forward momentum map at load time."""

    params: DamperParams
    body_rate: tuple = (100.0, 0.0, 400.0)   # rad/s
    slug_rate: float = 0.0                   # rad/s
    t_end: float = 400.0                     # s
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    outputs: tuple = DEFAULT_OUTPUTS
    name: str = "run"

    def __post_init__(self):
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigError(f"t_end must be positive, got {self.t_end}")

    def initial_state(self):
        return state_from_body_rates(self.params, np.asarray(self.body_rate),
                                     self.slug_rate)


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian sweep over config-dict paths applied to a base run."""

    base: RunConfig
    axes: tuple                       # ((dotted path, (values...)), ...)
    metrics: tuple = ("settling_time", "residual_nutation", "final_ke")
    max_runs: int = 10_000

    def __post_init__(self):
        if len(self.axes) < 1:
            raise ConfigError("sweep needs at least one axis")
        known = {"settling_time", "residual_nutation", "final_ke"}
        bad = set(self.metrics) - known
        if bad:
            raise ConfigError(f"unknown metric(s) {sorted(bad)}; known: {sorted(known)}")


# --- scenario registry -------------------------------------------------

_CYLINDER = {"mass": 2.0, "radius": 0.05, "length": 0.05}

SCENARIOS = {
    # Point-mass slug on a 0.05 m ring; 25% transverse disturbance on a
    # 400 rad/s spin.  Nutation drops below 2 degrees around t ~ 300 s.
    "paper-point-mass": {
        "name": "paper-point-mass",
        "params": {
            "body": dict(_CYLINDER),
            "slug": {"kind": "point_mass", "mass": 0.005, "vertical_offset": 0.0},
            "ring_radius": 0.05,
            "drag_coeff": 1.63,
            "offset_mass_convention": "slug",
        },
        "body_rate": [100.0, 0.0, 400.0],
        "slug_rate": 0.0,
        "t_end": 400.0,
        "integrator": {"scheme": "rk4", "dt": 1e-4},
        "outputs": ["momentum", "energy", "nutation", "settling"],
    },
    # Distributed water slug: 0.025 m ring, 135-degree fill, 0.015 m
    # vertical offset.  Damps hard; nutation reaches its floor within
    # seconds and is essentially steady by ~10 s.
    "paper-distributed": {
        "name": "paper-distributed",
        "params": {
            "body": dict(_CYLINDER),
            "slug": {"kind": "distributed", "density": 1000.0,
                     "tube_radius": 0.005,
                     "fill_angle": math.radians(135.0),
                     "vertical_offset": 0.015},
            "ring_radius": 0.025,
            "drag_coeff": 1.63,
            "offset_mass_convention": "slug",
        },
        "body_rate": [100.0, 0.0, 400.0],
        "slug_rate": 0.0,
        "t_end": 40.0,
        "integrator": {"scheme": "rk4", "dt": 1e-4},
        "outputs": ["momentum", "energy", "nutation", "settling"],
    },
    # Zero drag: slug exchanges no torque with the ring, kinetic energy and
    # momentum magnitude are both conserved; probe orbits close on the sphere.
    "dissipationless": {
        "name": "dissipationless",
        "params": {
            "body": dict(_CYLINDER),
            "slug": {"kind": "point_mass", "mass": 0.005, "vertical_offset": 0.0},
            "ring_radius": 0.05,
            "drag_coeff": 0.0,
            "offset_mass_convention": "slug",
        },
        "body_rate": [100.0, 0.0, 400.0],
        "slug_rate": 0.0,
        "t_end": 100.0,
        "integrator": {"scheme": "rk4", "dt": 1e-4},
        "outputs": ["momentum", "energy", "nutation", "settling"],
    },
}


def scenario_dict(name):
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; "
                          f"available: {sorted(SCENARIOS)}")
    return copy.deepcopy(SCENARIOS[name])


def scenario(name):
    return run_config_from_dict(scenario_dict(name))


# --- dict <-> dataclass conversion -------------------------------------

def _slug_from_dict(doc):
    configio.require_keys(doc, ["kind"], "params.slug")
    kind = doc["kind"]
    if kind == "point_mass":
        configio.check_keys(doc, ["kind", "mass", "vertical_offset"], "params.slug")
        configio.require_keys(doc, ["mass"], "params.slug")
        return PointMassSlug(mass=doc["mass"],
                             vertical_offset=doc.get("vertical_offset", 0.0))
    if kind == "distributed":
        configio.check_keys(doc, ["kind", "density", "tube_radius",
                                  "fill_angle", "vertical_offset"], "params.slug")
        configio.require_keys(doc, ["density", "tube_radius", "fill_angle"],
                              "params.slug")
        return DistributedSlug(density=doc["density"],
                               tube_radius=doc["tube_radius"],
                               fill_angle=doc["fill_angle"],
                               vertical_offset=doc.get("vertical_offset", 0.0))
    raise ConfigError(f"params.slug.kind must be 'point_mass' or 'distributed', "
                      f"got {kind!r}")


def _params_from_dict(doc):
    configio.check_keys(doc, ["body", "slug", "ring_radius", "drag_coeff",
                              "offset_mass_convention"], "params")
    configio.require_keys(doc, ["body", "slug", "ring_radius"], "params")
    body_doc = doc["body"]
    configio.check_keys(body_doc, ["mass", "radius", "length"], "params.body")
    configio.require_keys(body_doc, ["mass", "radius", "length"], "params.body")
    return DamperParams(
        body=CylinderBody(**body_doc),
        slug=_slug_from_dict(doc["slug"]),
        ring_radius=doc["ring_radius"],
        drag_coeff=doc.get("drag_coeff", 1.63),
        offset_mass_convention=doc.get("offset_mass_convention", "slug"),
    )


def _integrator_from_dict(doc):
    configio.check_keys(doc, ["scheme", "dt", "rel_tol", "abs_tol", "dt_min",
                              "dt_max", "sample_stride", "casimir_policy",
                              "casimir_alarm"], "integrator")
    defaults = IntegratorConfig()
    try:
        scheme = Scheme(doc.get("scheme", defaults.scheme.value))
        policy = CasimirPolicy(doc.get("casimir_policy",
                                       defaults.casimir_policy.value))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return IntegratorConfig(
        scheme=scheme,
        dt=doc.get("dt", defaults.dt),
        rel_tol=doc.get("rel_tol", defaults.rel_tol),
        abs_tol=doc.get("abs_tol", defaults.abs_tol),
        dt_min=doc.get("dt_min", defaults.dt_min),
        dt_max=doc.get("dt_max", defaults.dt_max),
        sample_stride=doc.get("sample_stride", defaults.sample_stride),
        casimir_policy=policy,
        casimir_alarm=doc.get("casimir_alarm", defaults.casimir_alarm),
    )


def run_config_from_dict(doc):
    configio.check_keys(doc, ["name", "params", "body_rate", "slug_rate",
                              "t_end", "integrator", "outputs"], "run config")
    configio.require_keys(doc, ["params", "body_rate", "t_end"], "run config")
    body_rate = doc["body_rate"]
    if not (isinstance(body_rate, (list, tuple)) and len(body_rate) == 3):
        raise ConfigError("body_rate must be a 3-element list")
    try:
        outputs = tuple(OutputKind(k) for k in
                        doc.get("outputs", [k.value for k in DEFAULT_OUTPUTS]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(
        params=_params_from_dict(doc["params"]),
        body_rate=tuple(float(v) for v in body_rate),
        slug_rate=float(doc.get("slug_rate", 0.0)),
        t_end=float(doc["t_end"]),
        integrator=_integrator_from_dict(doc.get("integrator", {})),
        outputs=outputs,
        name=str(doc.get("name", "run")),
    )


def run_config_to_dict(cfg):
    p = cfg.params
    if isinstance(p.slug, PointMassSlug):
        slug = {"kind": "point_mass", "mass": p.slug.mass,
                "vertical_offset": p.slug.vertical_offset}
    else:
        slug = {"kind": "distributed", "density": p.slug.density,
                "tube_radius": p.slug.tube_radius,
                "fill_angle": p.slug.fill_angle,
                "vertical_offset": p.slug.vertical_offset}
    return {
        "name": cfg.name,
        "params": {
            "body": {"mass": p.body.mass, "radius": p.body.radius,
                     "length": p.body.length},
            "slug": slug,
            "ring_radius": p.ring_radius,
            "drag_coeff": p.drag_coeff,
            "offset_mass_convention": p.offset_mass_convention,
        },
        "body_rate": list(cfg.body_rate),
        "slug_rate": cfg.slug_rate,
        "t_end": cfg.t_end,
        "integrator": {
            "scheme": cfg.integrator.scheme.value,
            "dt": cfg.integrator.dt,
            "rel_tol": cfg.integrator.rel_tol,
            "abs_tol": cfg.integrator.abs_tol,
            "dt_min": cfg.integrator.dt_min,
            "dt_max": cfg.integrator.dt_max,
            "sample_stride": cfg.integrator.sample_stride,
            "casimir_policy": cfg.integrator.casimir_policy.value,
            "casimir_alarm": cfg.integrator.casimir_alarm,
        },
        "outputs": [k.value for k in cfg.outputs],
    }


def sweep_spec_from_dict(doc):
    configio.check_keys(doc, ["base", "scenario", "axes", "metrics", "max_runs"],
                        "sweep config")
    if ("base" in doc) == ("scenario" in doc):
        raise ConfigError("sweep config needs exactly one of 'base' or 'scenario'")
    base = run_config_from_dict(doc["base"]) if "base" in doc \
        else scenario(doc["scenario"])
    axes_doc = doc.get("axes", [])
    axes = []
    for i, axis in enumerate(axes_doc):
        configio.check_keys(axis, ["path", "values"], f"axes[{i}]")
        configio.require_keys(axis, ["path", "values"], f"axes[{i}]")
        values = axis["values"]
        if not (isinstance(values, (list, tuple)) and len(values) > 0):
            raise ConfigError(f"axes[{i}].values must be a non-empty list")
        axes.append((axis["path"], tuple(values)))
    spec = SweepSpec(base=base, axes=tuple(axes),
                     metrics=tuple(doc.get("metrics",
                                           ("settling_time", "residual_nutation",
                                            "final_ke"))),
                     max_runs=int(doc.get("max_runs", 10_000)))
    return spec


# --- persistence --------------------------------------------------------

def _fmt(x):
    """Full double-precision decimal (shortest round-trip repr)."""
    return repr(float(x))


def write_series_csv(traj, path):
    mags = np.linalg.norm(traj.momentum, axis=1)
    gamma_deg = np.degrees(traj.nutation)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(SERIES_HEADER + "\n")
        for k in range(traj.n_samples):
            row = (traj.t[k], traj.momentum[k, 0], traj.momentum[k, 1],
                   traj.momentum[k, 2], mags[k], traj.slug_rate[k],
                   traj.kinetic_energy[k], gamma_deg[k],
                   traj.casimir_rel_err[k])
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(doc, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def settling_report_dict(report):
    return {
        "settling_time_s": report.settling_time,
        "residual_nutation_deg": math.degrees(report.residual_nutation),
        "threshold_deg": math.degrees(report.threshold),
    }


@dataclass(frozen=True)
class RunResult:
    out_dir: Path
    trajectory: object            # Trajectory or None on early failure
    settling: object              # SettlingReport or None
    manifest: dict
    artifacts: tuple


def run(config, out_dir, settling_threshold=np.deg2rad(2.0),
        portrait_offset=np.deg2rad(5.0), render_figures=False):
    """Execute one RunConfig and persist its artifact set under ``out_dir``.

    Integration failures are recorded in the manifest and any partial series
    is preserved rather than raised.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []
    state0 = config.initial_state()

    traj = None
    failure = None
    try:
        traj = integrate(config.params, state0, config.t_end, config.integrator)
    except (NumericalDomainError, StiffnessError) as exc:
        failure = exc
        traj = getattr(exc, "partial", None)

    wants_series = any(k in config.outputs for k in
                       (OutputKind.MOMENTUM, OutputKind.ENERGY, OutputKind.NUTATION))
    report = None
    if traj is not None:
        if wants_series:
            series_path = out_dir / "series.csv"
            write_series_csv(traj, series_path)
            artifacts.append(series_path)
        if OutputKind.SETTLING in config.outputs and failure is None:
            report = settling_time(traj, settling_threshold)
            settling_path = out_dir / "settling.json"
            _write_json(settling_report_dict(report), settling_path)
            artifacts.append(settling_path)

    if OutputKind.PORTRAIT in config.outputs and failure is None:
        h_mag = float(np.linalg.norm(state0.momentum))
        seeds = portrait_seeds(h_mag, portrait_offset)
        bundle = portrait(config.params, seeds, config.t_end, config.integrator)
        portrait_dir = out_dir / "portrait"
        portrait_dir.mkdir(exist_ok=True)
        index = []
        for i, (seed, seed_traj) in enumerate(zip(seeds, bundle)):
            seed_path = portrait_dir / f"seed_{i:02d}.csv"
            write_series_csv(seed_traj, seed_path)
            index.append({"file": seed_path.name,
                          "momentum": [float(v) for v in seed.momentum],
                          "slug_rate": seed.slug_rate})
            artifacts.append(seed_path)
        index_path = portrait_dir / "index.json"
        _write_json(index, index_path)
        artifacts.append(index_path)
        if render_figures:
            from .plots import render_portrait_figures
            artifacts.extend(render_portrait_figures(bundle, out_dir / "figures"))

    if render_figures and traj is not None and wants_series:
        from .plots import render_run_figures
        artifacts.extend(render_run_figures(
            traj, out_dir / "figures",
            threshold_deg=math.degrees(settling_threshold)))

    manifest = {
        "config": run_config_to_dict(config),
        "code_version": _code_version,
        "terminated": f"error: {failure}" if failure is not None else traj.termination,
        "casimir_max_rel_err": traj.casimir_max_rel_err if traj is not None else None,
        "n_steps": traj.n_steps if traj is not None else 0,
        "max_renorm_rel": traj.max_renorm_rel if traj is not None else None,
        "settling": settling_report_dict(report) if report is not None else None,
        "artifacts": [p.name if p.parent == out_dir
                      else str(p.relative_to(out_dir)) for p in artifacts],
    }
    manifest_path = out_dir / "manifest.json"
    _write_json(manifest, manifest_path)
    artifacts.append(manifest_path)
    return RunResult(out_dir=out_dir, trajectory=traj, settling=report,
                     manifest=manifest, artifacts=tuple(artifacts))


# --- sweeps --------------------------------------------------------------

def _sweep_cell(args):
    """Metrics for one parameter combination (top-level for pickling)."""
    base_doc, axis_paths, values, threshold = args
    doc = copy.deepcopy(base_doc)
    row = {}
    for path, value in zip(axis_paths, values):
        row[path] = value
        configio.set_path(doc, path, value)
    try:
        cfg = run_config_from_dict(doc)
        traj = integrate(cfg.params, cfg.initial_state(), cfg.t_end, cfg.integrator)
        report = settling_time(traj, threshold)
        row.update({
            "settling_time_s": report.settling_time,
            "residual_nutation_deg": math.degrees(report.residual_nutation),
            "final_ke_j": float(traj.kinetic_energy[-1]),
            "error": "",
        })
    except Exception as exc:  # failed cells are recorded, sweep continues
        row.update({"settling_time_s": None, "residual_nutation_deg": None,
                    "final_ke_j": None, "error": f"{type(exc).__name__}: {exc}"})
    return row


_METRIC_COLUMNS = {"settling_time": "settling_time_s",
                   "residual_nutation": "residual_nutation_deg",
                   "final_ke": "final_ke_j"}


def sweep(spec, out_csv=None, settling_threshold=np.deg2rad(2.0), workers=1):
    """Run the Cartesian product of the sweep axes; one metrics row per
    combination, ordered lexicographically by axis position."""
    axis_paths = [path for path, _ in spec.axes]
    value_lists = [values for _, values in spec.axes]
    combos = list(itertools.product(*value_lists))
    if len(combos) > spec.max_runs:
        raise ConfigError(
            f"sweep would launch {len(combos)} runs, above the cap "
            f"{spec.max_runs}; raise max_runs to allow this")
    base_doc = run_config_to_dict(spec.base)
    # validate axis paths up front so typos fail before any run starts
    probe = copy.deepcopy(base_doc)
    for path in axis_paths:
        configio.get_path(probe, path)
    jobs = [(base_doc, axis_paths, values, settling_threshold)
            for values in combos]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(job) for job in jobs]

    metric_cols = [_METRIC_COLUMNS[m] for m in spec.metrics]
    columns = axis_paths + metric_cols + ["error"]
    if out_csv is not None:
        with open(out_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(columns) + "\n")
            for row in rows:
                cells = []
                for col in columns:
                    v = row.get(col)
                    if v is None or v == "":
                        cells.append("" if col != "error" else row["error"])
                    elif col == "error":
                        cells.append(str(v))
                    else:
                        cells.append(_fmt(v) if isinstance(v, float) else repr(v))
                fh.write(",".join(cells) + "\n")
    return rows
