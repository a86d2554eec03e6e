"""Report figures rendered to files next to the CSV output.

Uses the Agg backend; nothing here opens a window.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_DPI = 150


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def render_run_figures(traj, fig_dir, threshold_deg=2.0):
    """Time-series figures for one trajectory; returns the written paths."""
    fig_dir = Path(fig_dir)
    fig_dir.mkdir(parents=True, exist_ok=True)
    t = traj.t
    written = []

    fig, ax = plt.subplots(figsize=(7, 4))
    labels = ("$h_x$", "$h_y$", "$h_z$")
    for i in range(3):
        ax.plot(t, traj.momentum[:, i], lw=0.7, label=labels[i])
    ax.plot(t, np.linalg.norm(traj.momentum, axis=1), "k--", lw=1.2, label="$|h|$")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("angular momentum (kg m$^2$/s)")
    ax.legend(loc="center right")
    written.append(_save(fig, fig_dir / "momentum.png"))

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, traj.kinetic_energy, lw=0.9)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("kinetic energy (J)")
    written.append(_save(fig, fig_dir / "energy.png"))

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, np.degrees(traj.nutation), lw=0.9)
    ax.axhline(threshold_deg, color="tab:red", ls=":", lw=1,
               label=f"{threshold_deg:g}$^\\circ$ threshold")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("nutation angle (deg)")
    ax.legend()
    written.append(_save(fig, fig_dir / "nutation.png"))

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, traj.slug_rate, lw=0.7)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("slug rate relative to ring (rad/s)")
    written.append(_save(fig, fig_dir / "slug_rate.png"))

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(t, np.maximum(traj.casimir_rel_err, 1e-18), lw=0.9)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("relative drift of $|h|$")
    written.append(_save(fig, fig_dir / "casimir.png"))
    return written


def render_portrait_figures(trajectories, fig_dir):
    """Momentum-sphere views of a portrait bundle; returns the written paths."""
    fig_dir = Path(fig_dir)
    fig_dir.mkdir(parents=True, exist_ok=True)
    written = []
    radius = float(np.linalg.norm(trajectories[0].momentum[0]))

    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    u = np.linspace(0, 2 * np.pi, 36)
    v = np.linspace(0, np.pi, 18)
    xs = radius * np.outer(np.cos(u), np.sin(v))
    ys = radius * np.outer(np.sin(u), np.sin(v))
    zs = radius * np.outer(np.ones_like(u), np.cos(v))
    ax.plot_wireframe(xs, ys, zs, color="0.85", lw=0.3)
    for traj in trajectories:
        h = traj.momentum
        ax.plot(h[:, 0], h[:, 1], h[:, 2], lw=0.6)
        ax.scatter(*h[0], s=10)
    ax.set_xlabel("$h_x$")
    ax.set_ylabel("$h_y$")
    ax.set_zlabel("$h_z$")
    ax.set_box_aspect((1, 1, 1))
    written.append(_save(fig, fig_dir / "sphere3d.png"))

    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    for traj in trajectories:
        ax.plot(traj.momentum[:, 0], traj.momentum[:, 1], lw=0.6)
    ax.set_xlabel("$h_x$")
    ax.set_ylabel("$h_y$")
    ax.set_aspect("equal")
    written.append(_save(fig, fig_dir / "projection_xy.png"))
    return written
