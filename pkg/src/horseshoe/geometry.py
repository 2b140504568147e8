"""Strip geometry of the modulated Henon family on its square domain.

The domain is D = [-r, r]^2 with r = 1 + sqrt(1 + sup a(n)).  The image
f_n(D) is a parabolic band; intersecting it with D and splitting at the
fold yields two horizontal strips that live at time n + 1, bounded by
the graphs y = +-sqrt(a(n) - r - x) and y = +-sqrt(a(n) + r - x).  The
preimage f_n^{-1}(D) gives the mirrored vertical strips at time n,
bounded by x = +-sqrt(a(n) - r - y) and x = +-sqrt(a(n) + r - y).  The
identity r^2 = sup_a + 2r keeps all four boundary curves inside D, with
equality (curves touching the corners of D) exactly at the time of the
modulation maximum.

Everything here reduces to closed-form arithmetic on the parameters, so
the inequality checks below are exact up to floating point and do not
depend on the sampled machinery in other modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import DomainBox, LipschitzCurve, Orientation, Point2, Strip
from .maps import HenonParams, HenonSequence, eval_a, henon_sequence

__all__ = [
    "DegenerateGeometryError",
    "KeyPoints",
    "HenonGeometry",
    "InequalityRow",
    "build_geometry",
    "check_domain_inequalities",
    "strip_separation_check",
    "sector_threshold",
]


class DegenerateGeometryError(ValueError):
    """Strip construction failed because a(n) - 2r <= 0 at the requested
    time: the inner and outer boundary parabolas would cross inside D."""


def sector_threshold(mu: float) -> float:
    """Threshold (mu + 1/mu) / 2 for the cone conditions.

    A point whose relevant coordinate exceeds this value in absolute
    value satisfies the sector invariance and stretch inequalities with
    cone parameter mu.
    """
    if not (0 < mu):
        raise ValueError("mu must be positive")
    return 0.5 * (mu + 1.0 / mu)


@dataclass(frozen=True)
class KeyPoints:
    """Anchor points of the image bands at time n.

    p holds the crossings of the forward image band f_n(D) with the
    x-axis and with the horizontal edges of D (in the order: outer and
    inner crossing on the axis, then the four band corners on y = -+r).
    q holds the mirrored points for the backward band f_n^{-1}(D).
    """

    p: tuple[Point2, ...]
    q: tuple[Point2, ...]


@dataclass(frozen=True)
class InequalityRow:
    """One inequality check: pass iff margin >= 0 (strict checks report
    margin > 0 and carry strict=True)."""

    n: int | None
    check: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    strict: bool = True

    def as_csv_row(self) -> list:
        return [
            "" if self.n is None else self.n,
            self.check,
            self.lhs,
            self.rhs,
            self.margin,
            self.passed,
        ]


@dataclass(frozen=True)
class HenonGeometry:
    """Strips, membership tests and key points for a Henon sequence.

    Horizontal strips indexed by h_strips(n) live at time n + 1 (they
    are the two pieces of f_n(D) inside D); vertical strips v_strips(n)
    live at time n.  Symbols are 1-based: strip 1 is the one on the
    positive side of the fold.
    """

    params: HenonParams
    mu_h: float = 0.615
    mu_v: float = 0.615
    seq: HenonSequence = field(init=False)

    def __post_init__(self) -> None:
        if not (0 < self.mu_h and 0 < self.mu_v):
            raise ValueError("cone slopes mu_h, mu_v must be positive")
        if self.mu_h * self.mu_v >= 1.0:
            raise ValueError(
                f"need mu_h * mu_v < 1, got {self.mu_h * self.mu_v}"
            )
        object.__setattr__(self, "seq", henon_sequence(self.params))

    @property
    def r(self) -> float:
        return self.params.domain_half_width

    @property
    def box(self) -> DomainBox:
        return DomainBox.square(self.r)

    @property
    def n_symbols(self) -> int:
        return 2

    def a(self, n: int | np.ndarray) -> float | np.ndarray:
        return eval_a(self.params, n)

    def _require_nondegenerate(self, n: int) -> float:
        a = self.a(n)
        if a - 2.0 * self.r <= 0:
            raise DegenerateGeometryError(
                f"a({n}) = {a} does not exceed 2r = {2 * self.r}; strip "
                "boundary parabolas cross inside the domain"
            )
        return a

    def v_strips(self, n: int) -> tuple[Strip, Strip]:
        """Vertical strips (V_1, V_2) at time n."""
        a = self._require_nondegenerate(n)
        r = self.r
        iv = (-r, r)

        def curve(offset: float, sign: float) -> LipschitzCurve:
            return LipschitzCurve.closed_form(
                Orientation.VERTICAL, iv, self.mu_v, "sqrt_offset",
                offset=offset, sign=sign,
            )

        v1 = Strip(lower=curve(a - r, 1.0), upper=curve(a + r, 1.0))
        v2 = Strip(lower=curve(a + r, -1.0), upper=curve(a - r, -1.0))
        return (v1, v2)

    def h_strips(self, n: int) -> tuple[Strip, Strip]:
        """Horizontal strips (H_1, H_2) at time n + 1, built from a(n)."""
        a = self._require_nondegenerate(n)
        r = self.r
        iv = (-r, r)

        def curve(offset: float, sign: float) -> LipschitzCurve:
            return LipschitzCurve.closed_form(
                Orientation.HORIZONTAL, iv, self.mu_h, "sqrt_offset",
                offset=offset, sign=sign,
            )

        h1 = Strip(lower=curve(a - r, 1.0), upper=curve(a + r, 1.0))
        h2 = Strip(lower=curve(a + r, -1.0), upper=curve(a - r, -1.0))
        return (h1, h2)

    def key_points(self, n: int) -> KeyPoints:
        a = self.a(n)
        r = self.r
        p = (
            Point2(a + r, 0.0),
            Point2(a - r, 0.0),
            Point2(a + r - r * r, -r),
            Point2(a - r - r * r, -r),
            Point2(a - r - r * r, r),
            Point2(a + r - r * r, r),
        )
        q = tuple(Point2(pt.y, pt.x) for pt in p)
        return KeyPoints(p=p, q=q)

    # Membership tests below use the parabola inequalities directly
    # rather than the Strip objects: a point is in the vertical strip
    # union iff a(n) - r <= x^2 + y <= a(n) + r, and in the horizontal
    # strip union at time n + 1 iff a(n) - r <= x + y^2 <= a(n) + r,
    # intersected with D in both cases.

    def in_v_union(self, n: int, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        a = self.a(n)
        s = x * x + y
        return (
            self.box.contains(pts, tol)
            & (s >= a - self.r - tol)
            & (s <= a + self.r + tol)
        )

    def in_h_union(self, n: int, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Membership in the union of h_strips(n), which live at n + 1."""
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        a = self.a(n)
        s = x + y * y
        return (
            self.box.contains(pts, tol)
            & (s >= a - self.r - tol)
            & (s <= a + self.r + tol)
        )

    def in_cal_v(self, n: int, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Membership in the union of the refined sets V_ji at time n,
        i.e. points of the vertical strip union whose image lies in the
        vertical strip union of time n + 1."""
        pts = np.asarray(pts, dtype=float)
        return self.in_v_union(n, pts, tol) & self.in_v_union(
            n + 1, self.seq.forward(n, pts), tol
        )

    def in_cal_h(self, n: int, pts: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Membership in the union of the intersections H_i n V_j at
        time n + 1 (the forward images of the V_ji sets)."""
        pts = np.asarray(pts, dtype=float)
        return self.in_h_union(n, pts, tol) & self.in_v_union(n + 1, pts, tol)


def build_geometry(
    params: HenonParams | None = None,
    mu_h: float = 0.615,
    mu_v: float = 0.615,
) -> HenonGeometry:
    """Construct the strip geometry for the given parameters.

    Construction itself succeeds for any admissible parameters; strip
    accessors raise DegenerateGeometryError at times where the boundary
    parabolas cross, and the inequality checks below report failures
    rather than raising.
    """
    return HenonGeometry(params=params if params is not None else HenonParams(),
                         mu_h=mu_h, mu_v=mu_v)


def check_domain_inequalities(
    geom: HenonGeometry, n_range: tuple[int, int]
) -> list[InequalityRow]:
    """Per-time inequality report for the strip construction.

    For each n in the inclusive window: a(n) must exceed 2r so the
    strips are nonempty with boundary curves inside D; the left edge of
    the forward image band must not re-enter D (equality allowed at the
    modulation maximum, where the band corners touch the corners of D);
    and the band anchor points must lie outside D on the expected sides.
    Two closed-form all-times rows bound the same quantities over every
    integer n at once via the modulation extremes.
    """
    rows: list[InequalityRow] = []
    r = geom.r
    a0 = geom.params.sup_a
    n_lo, n_hi = n_range
    if n_lo > n_hi:
        raise ValueError(f"empty time window {n_range}")
    for n in range(n_lo, n_hi + 1):
        a = geom.a(n)
        rows.append(
            InequalityRow(
                n=n, check="a_exceeds_2r", lhs=a, rhs=2 * r,
                margin=a - 2 * r, passed=a - 2 * r > 0,
            )
        )
        # Left edge of the forward band at x = a(n) + r - r^2; using
        # r^2 = a(0) + 2r this is at most -r, with equality iff
        # a(n) = a(0).
        lhs = a + r - r * r
        rows.append(
            InequalityRow(
                n=n, check="image_band_left_edge", lhs=lhs, rhs=-r,
                margin=-r - lhs, passed=-r - lhs >= -1e-12, strict=False,
            )
        )
        rows.append(
            InequalityRow(
                n=n, check="p1_q1_outside_domain", lhs=a + r, rhs=r,
                margin=a, passed=a > 0,
            )
        )
        rows.append(
            InequalityRow(
                n=n, check="p2_q2_outside_domain", lhs=a - r, rhs=r,
                margin=a - 2 * r, passed=a - 2 * r > 0,
            )
        )
        rows.append(
            InequalityRow(
                n=n, check="p4_q4_outside_domain", lhs=a - r - r * r, rhs=-r,
                margin=a0 + 2 * r - a, passed=a0 + 2 * r - a > 0,
            )
        )
    a_min = geom.params.a_star - geom.params.epsilon
    rows.append(
        InequalityRow(
            n=None, check="a_exceeds_2r_all_n", lhs=a_min, rhs=2 * r,
            margin=a_min - 2 * r, passed=a_min - 2 * r > 0,
        )
    )
    rows.append(
        InequalityRow(
            n=None, check="image_band_left_edge_all_n", lhs=a0 + r - r * r,
            rhs=-r, margin=0.0, passed=True, strict=False,
        )
    )
    return rows


def _separation_values(geom: HenonGeometry, n: int) -> tuple[float, float, float]:
    """(xbar1, xbar2, x2) for the band |y| <= threshold at time n + 1.

    xbar1/xbar2 are the crossings of the vertical strip boundaries at
    time n + 1 with the band edges, x2 = x1 is the crossing of the inner
    horizontal boundary parabola (from a(n)) with the same band.
    """
    t = sector_threshold(geom.mu_v)
    r = geom.r
    a_next = geom.a(n + 1)
    a_now = geom.a(n)
    xbar1 = math.sqrt(max(a_next + r - t, 0.0))
    xbar2 = math.sqrt(max(a_next + r + t, 0.0))
    x2 = a_now - r - t * t
    return xbar1, xbar2, x2


def strip_separation_check(geom: HenonGeometry, n: int) -> list[InequalityRow]:
    """Cone-condition separation report at time n.

    The stretch estimates need every point of the refined horizontal
    sets at time n + 1 to satisfy |y| > (mu_v + 1/mu_v) / 2.  Inside the
    band |y| below that threshold, the vertical strips live left of
    xbar2 while the horizontal strips live right of x2 = x1 < r, so a
    positive x2 - xbar2 margin empties the band.  The unstable-side
    condition |x| > (mu_h + 1/mu_h) / 2 on the refined vertical sets at
    time n follows by the coordinate swap of the inverse map when
    mu_h = mu_v; with distinct slopes the swapped threshold is checked
    against the same separation values.

    Also reports finite-difference derivatives of the critical
    quantities with respect to a_star against their closed-form bounds:
    the horizontal-set crossing x2 grows with a_star much faster than
    the vertical-set crossing xbar2, which is how the separation margin
    widens for larger a_star.
    """
    rows: list[InequalityRow] = []
    r = geom.r
    xbar1, xbar2, x2 = _separation_values(geom, n)
    rows.append(
        InequalityRow(
            n=n, check="xbar1_lt_xbar2", lhs=xbar1, rhs=xbar2,
            margin=xbar2 - xbar1, passed=xbar2 - xbar1 > 0,
        )
    )
    rows.append(
        InequalityRow(
            n=n, check="xbar2_lt_x2", lhs=xbar2, rhs=x2,
            margin=x2 - xbar2, passed=x2 - xbar2 > 0,
        )
    )
    rows.append(
        InequalityRow(
            n=n, check="x1_lt_r", lhs=x2, rhs=r, margin=r - x2,
            passed=r - x2 > 0,
        )
    )
    t_h = sector_threshold(geom.mu_h)
    t_v = sector_threshold(geom.mu_v)
    rows.append(
        InequalityRow(
            n=n, check="unstable_threshold_via_swap", lhs=t_h, rhs=t_v,
            margin=t_v - t_h, passed=t_v - t_h >= -1e-12, strict=False,
        )
    )

    # Worst-case separation over all times, from the modulation extremes.
    params = geom.params
    t = t_v
    xbar2_sup = math.sqrt(max(params.sup_a + r + t, 0.0))
    x2_inf = params.a_star - params.epsilon - r - t * t
    rows.append(
        InequalityRow(
            n=None, check="xbar2_lt_x2_all_n", lhs=xbar2_sup, rhs=x2_inf,
            margin=x2_inf - xbar2_sup, passed=x2_inf - xbar2_sup > 0,
        )
    )

    # Derivative of the crossings with respect to a_star (the domain
    # half-width varies with a_star as well), against closed-form bounds
    # evaluated at the modulation extremes.
    def crossings_at(a_star: float) -> tuple[float, float]:
        p = HenonParams(a_star=a_star, epsilon=params.epsilon)
        g = HenonGeometry(params=p, mu_h=geom.mu_h, mu_v=geom.mu_v)
        b1, b2, xx2 = _separation_values(g, n)
        return b2, xx2

    h = 1e-6
    up_b2, up_x2 = crossings_at(params.a_star + h)
    dn_b2, dn_x2 = crossings_at(params.a_star - h)
    d_xbar2 = (up_b2 - dn_b2) / (2 * h)
    d_x2 = (up_x2 - dn_x2) / (2 * h)
    # Worst-case slope of the square root term over the modulation,
    # 1 / (2 sqrt(1 + a_star - epsilon)), gives bounds that hold with
    # slack at every n; using the sup side instead would leave the x2
    # row with zero margin.
    a_inf = params.a_star - params.epsilon
    dr_sup = 1.0 / (2.0 * math.sqrt(1.0 + a_inf)) if a_inf > -1.0 else math.inf
    xbar2_inf = math.sqrt(max(a_inf + r + t, 0.0))
    d_xbar2_bound = (
        (1.0 + dr_sup) / (2.0 * xbar2_inf) if xbar2_inf > 0 else math.inf
    )
    d_x2_bound = 1.0 - dr_sup
    rows.append(
        InequalityRow(
            n=n, check="d_xbar2_da_star_bound", lhs=d_xbar2, rhs=d_xbar2_bound,
            margin=d_xbar2_bound - d_xbar2, passed=d_xbar2_bound - d_xbar2 >= 0,
            strict=False,
        )
    )
    rows.append(
        InequalityRow(
            n=n, check="d_x2_da_star_bound", lhs=d_x2_bound, rhs=d_x2,
            margin=d_x2 - d_x2_bound, passed=d_x2 - d_x2_bound >= 0,
            strict=False,
        )
    )
    rows.append(
        InequalityRow(
            n=n, check="separation_margin_grows_with_a_star", lhs=d_xbar2,
            rhs=d_x2, margin=d_x2 - d_xbar2, passed=d_x2 - d_xbar2 > 0,
        )
    )
    return rows
