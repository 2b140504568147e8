"""Static matplotlib figures for the report path.

Rendered headless (Agg) and written next to the delimited outputs.
The SVG hash salt is pinned so repeated runs emit identical ids.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "horseshoe"

import matplotlib.pyplot as plt
import numpy as np

from .curves import Orientation, Strip

__all__ = ["save_margins_figure", "save_geometry_figure"]

_V_COLOR = "#3b6ea5"
_H_COLOR = "#b0413e"


def _save(fig, path: str) -> None:
    if path.endswith(".svg"):
        fig.savefig(path, metadata={"Date": None})
    else:
        fig.savefig(path)
    plt.close(fig)


def save_margins_figure(report, path: str) -> None:
    """Worst cone margins, stretch ratios, and the stable-side |y|
    floor across the scanned window."""
    steps = [s for s in report.steps if s.cone is not None]
    ns = [s.n for s in steps]
    fig, axes = plt.subplots(3, 1, figsize=(8, 9), sharex=True)

    ax = axes[0]
    ax.plot(ns, [s.cone.worst_sector_margin for s in steps], lw=1.0,
            color=_V_COLOR)
    ax.axhline(0.0, color="k", lw=0.8, ls="--")
    ax.set_ylabel("worst sector margin")

    ax = axes[1]
    ax.plot(ns, [s.cone.worst_expansion_ratio for s in steps], lw=1.0,
            color=_V_COLOR)
    ax.axhline(1.0, color="k", lw=0.8, ls="--")
    ax.set_ylabel("worst stretch ratio")

    ax = axes[2]
    ax.plot(ns, [s.cone.analytic_min_abs_y for s in steps], lw=1.0,
            color=_H_COLOR, label="min |y| on stable side")
    if steps:
        ax.axhline(steps[0].cone.threshold_y, color="k", lw=0.8, ls="--",
                   label="sufficient threshold")
    ax.set_ylabel("|y| floor")
    ax.set_xlabel("n")
    ax.legend(loc="best", fontsize=8)

    fig.suptitle("Cone verification margins across the time window")
    fig.tight_layout()
    _save(fig, path)


def _draw_strip(ax, strip: Strip, color: str, label: str | None = None) -> None:
    t = np.linspace(strip.interval[0], strip.interval[1], 400)
    lo = strip.lower(t)
    hi = strip.upper(t)
    if strip.orientation is Orientation.VERTICAL:
        ax.fill_betweenx(t, lo, hi, color=color, alpha=0.25, lw=0)
        ax.plot(lo, t, color=color, lw=1.0, label=label)
        ax.plot(hi, t, color=color, lw=1.0)
    else:
        ax.fill_between(t, lo, hi, color=color, alpha=0.25, lw=0)
        ax.plot(t, lo, color=color, lw=1.0, label=label)
        ax.plot(t, hi, color=color, lw=1.0)


def save_geometry_figure(geom, n: int, path: str, points: np.ndarray | None = None) -> None:
    """Strips and key points at time n, optionally with a point cloud."""
    fig, ax = plt.subplots(figsize=(7, 7))
    box = geom.box

    for idx, strip in enumerate(geom.v_strips(n), start=1):
        _draw_strip(ax, strip, _V_COLOR, label=f"V{idx} (time {n})" if idx == 1 else None)
    for idx, strip in enumerate(geom.h_strips(n - 1), start=1):
        _draw_strip(ax, strip, _H_COLOR, label=f"H{idx} (time {n})" if idx == 1 else None)

    kp = geom.key_points(n)
    for pts, marker in ((kp.p, "o"), (kp.q, "s")):
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        ax.plot(xs, ys, marker, color="k", ms=3, ls="none")

    if points is not None and len(points):
        points = np.asarray(points, dtype=float)
        ax.plot(points[:, 0], points[:, 1], ".", color="#222222", ms=1.0)

    ax.add_patch(
        plt.Rectangle(
            (box.xlo, box.ylo),
            box.xhi - box.xlo,
            box.yhi - box.ylo,
            fill=False,
            color="k",
            lw=1.0,
        )
    )
    pad = 0.6 * box.half_width
    ax.set_xlim(box.xlo - pad, box.xhi + pad)
    ax.set_ylim(box.ylo - pad, box.yhi + pad)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"Strip geometry at n = {n}")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    _save(fig, path)
