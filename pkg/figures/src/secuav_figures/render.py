"""Figure builders: convergence trace, association chart, planar trajectory.

All builders are pure given their inputs and the fixed style below, so two
renders of the same files produce identical images.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import Geometry, Series  # noqa: E402

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "legend.framealpha": 0.9,
}
_SCHEME_COLORS = ["tab:blue", "tab:red", "tab:green", "tab:purple"]
_USER_COLORS = ["tab:orange", "tab:cyan", "tab:olive", "tab:pink"]


def build_trace_figure(series: list[Series]):
    """Penalized objective per iteration, one line per scheme."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for i, s in enumerate(series):
            color = _SCHEME_COLORS[i % len(_SCHEME_COLORS)]
            ax.plot(s.data[:, 0], s.data[:, 1], marker="o", ms=3,
                    color=color, label=s.label)
            ax.plot(s.data[:, 0], s.data[:, 2], ls="--", lw=1, color=color,
                    alpha=0.7, label=f"{s.label} (worst-user rate)")
        ax.set_xlabel("iteration")
        ax.set_ylabel("objective [bits/s/Hz]")
        ax.set_title("convergence")
        ax.legend()
        fig.tight_layout()
    return fig


def build_association_figure(series: list[Series]):
    """Stem chart of the schedule, one panel per scheme, one color per user."""
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(len(series), 1, sharex=True, squeeze=False,
                                 figsize=(6.4, 2.2 * len(series) + 1.0))
        for ax, s in zip(axes[:, 0], series):
            entries = s.data
            k_users, n = entries.shape
            slots = np.arange(1, n + 1)
            for k in range(k_users):
                color = _USER_COLORS[k % len(_USER_COLORS)]
                mask = entries[k] > 1e-9
                if mask.any():
                    ax.stem(slots[mask], entries[k, mask],
                            linefmt=color, markerfmt=color,
                            basefmt=" ", label=f"user {k + 1}")
                else:
                    # keep the legend entry even for a silent user
                    ax.plot([], [], color=color, label=f"user {k + 1}")
            ax.set_ylim(0, 1.15)
            ax.set_ylabel("e")
            ax.set_title(s.label)
            ax.legend(loc="upper right", ncols=k_users)
        axes[-1, 0].set_xlabel("slot")
        fig.tight_layout()
    return fig


def build_trajectory_figure(series: list[Series], geometry: Geometry):
    """Planar paths over user/Eve/start markers, one path per scheme."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 5.2))
        for i, s in enumerate(series):
            pts = s.data
            color = _SCHEME_COLORS[i % len(_SCHEME_COLORS)]
            ax.plot(pts[:, 0], pts[:, 1], "-", lw=1.4, color=color,
                    label=s.label)
            ax.plot(pts[:, 0], pts[:, 1], ".", ms=3, color=color, alpha=0.6)
        for k, u in enumerate(geometry.users):
            ax.plot(*u, marker="s", ms=9, ls="", color=_USER_COLORS[
                k % len(_USER_COLORS)], label=f"user {k + 1}")
        ax.plot(*geometry.eve, marker="X", ms=11, ls="", color="black",
                label="Eve")
        ax.plot(*geometry.start, marker="^", ms=10, ls="",
                color="tab:green", label="start")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        ax.set_title("trajectories")
        ax.set_aspect("equal", adjustable="datalim")
        ax.legend()
        fig.tight_layout()
    return fig


def save_figure(fig, out_path) -> None:
    """Write the image without volatile metadata so output is repeatable."""
    fig.savefig(out_path, metadata={"Software": None}
                if str(out_path).endswith(".png") else None)
    plt.close(fig)
