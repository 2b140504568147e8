"""Lipschitz curve and strip primitives for planar horseshoe verification.

A horizontal curve is the graph y = h(x) of a Lipschitz function over an
x-interval; a vertical curve is the graph x = v(y) over a y-interval.  A
strip is the region between two non-crossing curves of the same kind.
These are the building blocks for the Conley-Moser strip conditions: the
key facts used downstream are that a vertical and a horizontal curve with
Lipschitz bounds multiplying to less than one cross in exactly one point,
and that nested sequences of strips with shrinking widths pin down limit
curves.

Curves carry one of two representations: a named closed form with
parameters, or a sample table interpolated piecewise-linearly.  Both
serialize to JSON for the CLI plotters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

__all__ = [
    "Orientation",
    "Point2",
    "DomainBox",
    "LipschitzCurve",
    "Strip",
    "NestedLimit",
    "ConvergenceError",
    "strip_width",
    "intersects_fully",
    "curve_intersection",
    "nested_limit",
    "curve_to_json",
    "curve_from_json",
    "strip_to_json",
    "strip_from_json",
]


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed to converge within the iteration cap."""


class Orientation(enum.Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned rectangle, by default the square [-r, r]^2."""

    xlo: float
    xhi: float
    ylo: float
    yhi: float

    def __post_init__(self) -> None:
        if not (self.xlo < self.xhi and self.ylo < self.yhi):
            raise ValueError("domain box must have positive extent")

    @classmethod
    def square(cls, r: float) -> "DomainBox":
        if not (r > 0 and math.isfinite(r)):
            raise ValueError(f"square half-width must be positive and finite, got {r}")
        return cls(-r, r, -r, r)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.xhi - self.xlo)

    def contains(self, pts: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Vectorized membership test for points of shape (..., 2)."""
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        return (
            (x >= self.xlo - tol)
            & (x <= self.xhi + tol)
            & (y >= self.ylo - tol)
            & (y <= self.yhi + tol)
        )

    def corners(self) -> np.ndarray:
        return np.array(
            [
                [self.xlo, self.ylo],
                [self.xhi, self.ylo],
                [self.xhi, self.yhi],
                [self.xlo, self.yhi],
            ]
        )


def _clamp_slopes(t: np.ndarray, v: np.ndarray, bound: float) -> np.ndarray:
    """Clamp segment slopes of a sample table to +-bound.

    Tables that already satisfy the bound are returned unchanged, so the
    clamp is a no-op for consistent data.  Inconsistent tables (slope
    violations from numerical noise) are rebuilt from clamped increments
    and recentered to minimize drift from the original samples.
    """
    dt = np.diff(t)
    dv = np.diff(v)
    limit = bound * dt
    if np.all(np.abs(dv) <= limit):
        return v
    clipped = np.clip(dv, -limit, limit)
    rebuilt = np.concatenate([[v[0]], v[0] + np.cumsum(clipped)])
    return rebuilt + float(np.mean(v - rebuilt))


def _eval_sqrt_offset(params: dict, t: np.ndarray) -> np.ndarray:
    # sign * sqrt(offset - t); the argument is clamped at zero so that
    # roundoff at an interval endpoint cannot produce NaN.
    arg = np.maximum(params["offset"] - t, 0.0)
    return params["sign"] * np.sqrt(arg)


_CLOSED_FORMS: dict[str, Callable[[dict, np.ndarray], np.ndarray]] = {
    "constant": lambda p, t: np.full_like(t, p["value"], dtype=float),
    "affine": lambda p, t: p["intercept"] + p["slope"] * t,
    "sqrt_offset": _eval_sqrt_offset,
}


@dataclass(frozen=True, eq=False)
class LipschitzCurve:
    """Graph of a Lipschitz function over a parameter interval.

    Horizontal curves are graphs y = f(x), vertical curves x = f(y).
    Evaluation outside the interval clamps the parameter to the nearest
    endpoint, which keeps fixed-point iterations well defined while they
    converge back into the interval.
    """

    orientation: Orientation
    interval: tuple[float, float]
    lipschitz_bound: float
    form: str
    params: dict = field(default_factory=dict)
    table: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self) -> None:
        lo, hi = self.interval
        if not (lo < hi):
            raise ValueError(f"curve interval must be increasing, got {self.interval}")
        if self.lipschitz_bound < 0:
            raise ValueError("lipschitz_bound must be nonnegative")
        if self.form != "samples" and self.form not in _CLOSED_FORMS:
            raise ValueError(f"unknown closed form {self.form!r}")
        if self.form == "samples" and self.table is None:
            raise ValueError("sampled curve requires a table")

    @classmethod
    def from_samples(
        cls,
        orientation: Orientation,
        t: np.ndarray,
        v: np.ndarray,
        lipschitz_bound: float,
    ) -> "LipschitzCurve":
        """Build a piecewise-linear curve from samples, clamping slopes.

        Args:
            orientation: curve kind (graph over x or over y).
            t: parameter samples, strictly increasing after sorting.
            v: function values at t.
            lipschitz_bound: declared bound; segment slopes are clamped
                to it so the interpolant honors the declaration.
        """
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("need matching 1-d sample arrays with at least 2 points")
        order = np.argsort(t, kind="stable")
        t, v = t[order], v[order]
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample parameters must be distinct")
        v = _clamp_slopes(t, v, lipschitz_bound)
        return cls(
            orientation=orientation,
            interval=(float(t[0]), float(t[-1])),
            lipschitz_bound=lipschitz_bound,
            form="samples",
            table=(t, v),
        )

    @classmethod
    def closed_form(
        cls,
        orientation: Orientation,
        interval: tuple[float, float],
        lipschitz_bound: float,
        form: str,
        **params: float,
    ) -> "LipschitzCurve":
        curve = cls(
            orientation=orientation,
            interval=(float(interval[0]), float(interval[1])),
            lipschitz_bound=lipschitz_bound,
            form=form,
            params={k: float(v) for k, v in params.items()},
        )
        return curve

    @classmethod
    def constant(
        cls,
        orientation: Orientation,
        interval: tuple[float, float],
        value: float,
        lipschitz_bound: float = 0.0,
    ) -> "LipschitzCurve":
        return cls.closed_form(
            orientation, interval, lipschitz_bound, "constant", value=value
        )

    def __call__(self, t: np.ndarray | float) -> np.ndarray | float:
        scalar = np.isscalar(t)
        t = np.clip(np.asarray(t, dtype=float), self.interval[0], self.interval[1])
        if self.form == "samples":
            ts, vs = self.table
            out = np.interp(t, ts, vs)
        else:
            out = _CLOSED_FORMS[self.form](self.params, t)
        return float(out) if scalar else out

    def nodes(self, grid: int) -> np.ndarray:
        """Parameter values used for sampled checks: a uniform grid plus
        the interval endpoints, plus the table nodes for sampled curves
        (piecewise-linear extrema live at nodes)."""
        lo, hi = self.interval
        pts = np.linspace(lo, hi, max(int(grid), 2))
        if self.form == "samples":
            pts = np.union1d(pts, self.table[0])
        return pts

    def audit_lipschitz(self, grid: int = 1024) -> float:
        """Max sampled slope over consecutive node pairs."""
        t = self.nodes(grid)
        v = self(t)
        return float(np.max(np.abs(np.diff(v) / np.diff(t))))


def _shared_nodes(a: LipschitzCurve, b: LipschitzCurve, grid: int) -> np.ndarray:
    return np.union1d(a.nodes(grid), b.nodes(grid))


@dataclass(frozen=True, eq=False)
class Strip:
    """Region between two non-crossing curves of the same orientation.

    For a horizontal strip, lower/upper bound y; for a vertical strip
    they bound x (lower is the left curve).
    """

    lower: LipschitzCurve
    upper: LipschitzCurve

    def __post_init__(self) -> None:
        if self.lower.orientation is not self.upper.orientation:
            raise ValueError("strip boundary curves must share an orientation")
        lo0, hi0 = self.lower.interval
        lo1, hi1 = self.upper.interval
        if abs(lo0 - lo1) > 1e-9 or abs(hi0 - hi1) > 1e-9:
            raise ValueError("strip boundary curves must share their interval")
        t = _shared_nodes(self.lower, self.upper, 64)
        gap = self.upper(t) - self.lower(t)
        if np.any(gap < -1e-12):
            raise ValueError("strip boundary curves cross (upper < lower)")

    @property
    def orientation(self) -> Orientation:
        return self.lower.orientation

    @property
    def interval(self) -> tuple[float, float]:
        return self.lower.interval

    def width(self, grid: int = 1024) -> float:
        return strip_width(self, grid)

    def midline(self, grid: int = 1024) -> LipschitzCurve:
        """Curve halfway between the boundaries, as a sample table."""
        t = _shared_nodes(self.lower, self.upper, grid)
        v = 0.5 * (self.lower(t) + self.upper(t))
        bound = max(self.lower.lipschitz_bound, self.upper.lipschitz_bound)
        return LipschitzCurve.from_samples(self.orientation, t, v, bound)

    def contains(self, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Membership for points of shape (..., 2), with boundary slack."""
        pts = np.asarray(pts, dtype=float)
        if self.orientation is Orientation.HORIZONTAL:
            t, val = pts[..., 0], pts[..., 1]
        else:
            t, val = pts[..., 1], pts[..., 0]
        lo, hi = self.interval
        inside = (t >= lo - tol) & (t <= hi + tol)
        return inside & (val >= self.lower(t) - tol) & (val <= self.upper(t) + tol)

    def cap_segments(self) -> list[tuple[float, float, float]]:
        """The two end segments (t_end, value_lo, value_hi) of the strip.

        For a vertical strip these are its horizontal boundary pieces
        (the top and bottom edges); for a horizontal strip its vertical
        ones.  Complements the graph boundary given by lower/upper.
        """
        lo, hi = self.interval
        return [
            (lo, float(self.lower(lo)), float(self.upper(lo))),
            (hi, float(self.lower(hi)), float(self.upper(hi))),
        ]


@dataclass(frozen=True)
class NestedLimit:
    """Midline of the innermost strip of a nested family, with the final
    width attached as the approximation error bound."""

    curve: LipschitzCurve
    error_bound: float


def strip_width(strip: Strip, grid: int = 1024) -> float:
    """Max boundary gap over a sample grid plus interval endpoints.

    Exact for piecewise-linear boundaries since the node union is
    included in the samples.
    """
    t = _shared_nodes(strip.lower, strip.upper, grid)
    return float(np.max(strip.upper(t) - strip.lower(t)))


def intersects_fully(
    inner: Strip, outer: Strip, grid: int = 1024, tol: float = 1e-9
) -> bool:
    """Whether inner lies in outer with matching end segments.

    This is full intersection in the Conley-Moser sense: containment
    alone is not enough, the inner strip must span the same parameter
    interval so that its end segments land inside the outer strip's end
    segments (a strip shifted along the parameter direction fails even
    if it overlaps the outer one).

    Raises:
        ValueError: if the strips have different orientations.
    """
    if inner.orientation is not outer.orientation:
        raise ValueError("cannot compare strips of different orientations")
    ilo, ihi = inner.interval
    olo, ohi = outer.interval
    if abs(ilo - olo) > tol or abs(ihi - ohi) > tol:
        return False
    t = np.union1d(_shared_nodes(inner.lower, inner.upper, grid),
                   _shared_nodes(outer.lower, outer.upper, grid))
    if np.any(outer.lower(t) > inner.lower(t) + tol):
        return False
    if np.any(inner.upper(t) > outer.upper(t) + tol):
        return False
    return True


def curve_intersection(
    v: LipschitzCurve,
    h: LipschitzCurve,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> Point2:
    """Unique crossing of a vertical and a horizontal curve.

    Runs the contraction iteration y <- h(v(y)) from the midpoint of the
    vertical curve's interval.  Uniqueness and convergence hold because
    the product of the Lipschitz bounds is below one, which is checked
    up front.

    Args:
        v: vertical curve x = v(y).
        h: horizontal curve y = h(x).
        tol: absolute tolerance on successive y iterates.
        max_iter: iteration cap.

    Returns:
        The crossing point.

    Raises:
        ValueError: wrong orientations, no contraction (bound product
            >= 1), or a fixed point outside the parameter intervals.
        ConvergenceError: iteration cap reached, which signals curves
            violating their declared bounds.
    """
    if v.orientation is not Orientation.VERTICAL:
        raise ValueError("first curve must be vertical (a graph over y)")
    if h.orientation is not Orientation.HORIZONTAL:
        raise ValueError("second curve must be horizontal (a graph over x)")
    q = v.lipschitz_bound * h.lipschitz_bound
    if q >= 1.0:
        raise ValueError(
            f"Lipschitz bound product {q} >= 1, crossing not guaranteed unique"
        )
    y = 0.5 * (v.interval[0] + v.interval[1])
    for _ in range(max_iter):
        y_next = float(h(v(y)))
        if abs(y_next - y) <= tol:
            y = y_next
            break
        y = y_next
    else:
        raise ConvergenceError(
            f"no convergence after {max_iter} iterations; curves likely "
            "violate their declared Lipschitz bounds"
        )
    x = float(v(y))
    # Allow a little slack beyond the iteration tolerance: the fixed
    # point may sit exactly on an interval endpoint.
    slack = max(1e-8, 10 * tol)
    if not (v.interval[0] - slack <= y <= v.interval[1] + slack):
        raise ValueError(f"crossing y={y} outside vertical curve interval {v.interval}")
    if not (h.interval[0] - slack <= x <= h.interval[1] + slack):
        raise ValueError(f"crossing x={x} outside horizontal curve interval {h.interval}")
    return Point2(x, y)


def nested_limit(
    strips: list[Strip], grid: int = 1024, tol: float = 1e-9
) -> NestedLimit:
    """Limit curve approximation from a nested strip family.

    Checks that each strip fully contains the next and that widths are
    nonincreasing, then returns the midline of the innermost strip with
    its width as the error bound.  The returned curve declares the max
    of the input Lipschitz bounds.

    Raises:
        ValueError: empty input, non-nested strips, or widths that grow.
    """
    if not strips:
        raise ValueError("need at least one strip")
    widths = [strip_width(s, grid) for s in strips]
    for k in range(len(strips) - 1):
        if not intersects_fully(strips[k + 1], strips[k], grid=grid, tol=tol):
            raise ValueError(f"strip {k + 1} does not nest inside strip {k}")
        if widths[k + 1] > widths[k] + tol:
            raise ValueError(f"strip widths grow at step {k + 1}")
    bound = max(
        max(s.lower.lipschitz_bound, s.upper.lipschitz_bound) for s in strips
    )
    last = strips[-1]
    t = _shared_nodes(last.lower, last.upper, grid)
    mid = 0.5 * (last.lower(t) + last.upper(t))
    curve = LipschitzCurve.from_samples(last.orientation, t, mid, bound)
    return NestedLimit(curve=curve, error_bound=widths[-1])


def curve_to_json(curve: LipschitzCurve) -> dict:
    """JSON-ready dict: orientation, interval, bound, and either the
    closed form with parameters or the sample table."""
    out: dict = {
        "orientation": curve.orientation.value,
        "interval": [curve.interval[0], curve.interval[1]],
        "lipschitz_bound": curve.lipschitz_bound,
        "form": curve.form,
    }
    if curve.form == "samples":
        t, v = curve.table
        out["t"] = [float(x) for x in t]
        out["v"] = [float(x) for x in v]
    else:
        out["params"] = dict(curve.params)
    return out


def curve_from_json(data: dict) -> LipschitzCurve:
    orientation = Orientation(data["orientation"])
    bound = float(data["lipschitz_bound"])
    if data["form"] == "samples":
        return LipschitzCurve.from_samples(
            orientation, np.asarray(data["t"]), np.asarray(data["v"]), bound
        )
    return LipschitzCurve.closed_form(
        orientation,
        (data["interval"][0], data["interval"][1]),
        bound,
        data["form"],
        **data["params"],
    )


def strip_to_json(strip: Strip) -> dict:
    return {"lower": curve_to_json(strip.lower), "upper": curve_to_json(strip.upper)}


def strip_from_json(data: dict) -> Strip:
    return Strip(lower=curve_from_json(data["lower"]), upper=curve_from_json(data["upper"]))
