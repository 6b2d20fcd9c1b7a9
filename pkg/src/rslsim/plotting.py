"""Figure rendering for bound sweeps.

Everything here targets reproducible file output: the Agg backend, a
fixed SVG hash salt, and no embedded creation date, so rerunning a
scenario rewrites byte-identical figures.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SERIES = (
    ("T_M", "o"),
    ("T_tilde", "s"),
    ("T_qsl", "^"),
    ("T_g", "v"),
    ("T_d", "d"),
)

_LABELS = {
    "T_M": "resource bound",
    "T_tilde": "penalty-free bound",
    "T_qsl": "two-state QSL",
    "T_g": "generation bound",
    "T_d": "degradation bound",
}


def plot_bounds(reports, path, title: str | None = None) -> None:
    """Render bound-vs-tau curves for a list of BoundReport to an SVG file.

    Infinite or absent bounds are dropped per series; the diagonal tau
    line marks saturation. Axes are linear.
    """
    taus = [r.tau for r in reports]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(taus, taus, color="0.4", linestyle="--", linewidth=1.0, label="tau")
    for field, marker in _SERIES:
        pts = [
            (r.tau, getattr(r, field))
            for r in reports
            if getattr(r, field) is not None and math.isfinite(getattr(r, field))
        ]
        if not pts:
            continue
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker=marker, markersize=4, linewidth=1.2, label=_LABELS[field])
    ax.set_xlabel("duration tau")
    ax.set_ylabel("bound value")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    with plt.rc_context({"svg.hashsalt": "rslsim"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
