"""Cone-field and strip-mapping verification for a map sequence.

The two Conley-Moser hypotheses checked here, on top of the strip
geometry, are:

  * A1: each chosen vertical strip maps homeomorphically onto the
    matching horizontal strip one step later, with horizontal boundaries
    going to horizontal boundaries.  Numerically this means the strip
    intersections are nonempty with the expected four boundary
    crossings, the map is injective on the strips, and sampled boundary
    points pull back onto the horizontal boundary of the source strip.

  * A3 (cone conditions): the unstable sector |eta| <= mu_h * |xi| is
    preserved by the forward Jacobian on the refined vertical sets with
    xi stretched by at least 1/mu, and the stable sector
    |xi| <= mu_v * |eta| is preserved by the inverse Jacobian on the
    refined horizontal sets with eta stretched by at least 1/mu.  It is
    enough to test the two extremal rays of each sector: the image
    margin is affine in the input ray parameter, so interior rays only
    do better.

With mu strictly between mu_v and 1 - mu_h * mu_v, the cone conditions
imply the strip-width contraction A2 with factor mu / (1 - mu_h * mu_v);
measure_contraction checks the implication empirically by running the
actual pullback refinement and recording width ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import Point2, Strip, curve_intersection, strip_width
from .geometry import sector_threshold
from .maps import MapSequence
from .refine import DEFAULT_REFIT_SAMPLES, RefinementError, pull_back_vertical

__all__ = [
    "ConeParams",
    "SectorCheck",
    "SectorFailure",
    "ConeReport",
    "A1PairReport",
    "A1Report",
    "ContractionBounds",
    "ContractionMeasurement",
    "check_sector_point",
    "check_a3_grid",
    "check_a1",
    "derive_contraction",
    "measure_contraction",
]

FORWARD_UNSTABLE = "forward-unstable"
BACKWARD_STABLE = "backward-stable"

_MAX_REPORTED_FAILURES = 20


@dataclass(frozen=True)
class ConeParams:
    """Cone slopes and the stretch parameter.

    mu_h bounds unstable sectors (|eta| <= mu_h |xi|), mu_v stable ones
    (|xi| <= mu_v |eta|), and 1/mu is the required stretch factor.
    """

    mu_h: float = 0.615
    mu_v: float = 0.615
    mu: float = 0.618

    def __post_init__(self) -> None:
        if not (self.mu_h > 0 and self.mu_v > 0 and self.mu > 0):
            raise ValueError("cone parameters must be positive")
        if self.mu_h * self.mu_v >= 1.0:
            raise ValueError(
                f"need mu_h * mu_v < 1, got {self.mu_h * self.mu_v}"
            )


@dataclass(frozen=True)
class SectorCheck:
    """Outcome of a single sector/stretch test at a point."""

    point: Point2
    vector: tuple[float, float]
    image_vector: tuple[float, float]
    direction: str
    sector_margin: float
    expansion_ratio: float

    @property
    def passed(self) -> bool:
        return self.sector_margin > 0 and self.expansion_ratio > 1


@dataclass(frozen=True)
class SectorFailure:
    point: Point2
    vector: tuple[float, float]
    inequality: str
    value: float


@dataclass(frozen=True)
class ConeReport:
    """Grid sweep of the cone conditions at one time step.

    Sector margins are mu_target * |denominator component| minus
    |numerator component| of the image vector; expansion ratios are
    |grown component out| / (|component in| / mu).  Both sweeps (forward
    on the refined vertical sets, backward on the refined horizontal
    sets) are aggregated.  analytic_min_abs_y is the smallest |y| seen
    on the refined horizontal sets, to compare against the sufficient
    threshold (mu_v + 1/mu_v)/2; analytic_min_abs_x mirrors it on the
    vertical side.
    """

    n: int
    grid: int
    worst_sector_margin: float
    worst_expansion_ratio: float
    analytic_min_abs_y: float
    analytic_min_abs_x: float
    threshold_y: float
    threshold_x: float
    analytic_ok: bool
    points_unstable: int
    points_stable: int
    failures: tuple[SectorFailure, ...]
    failure_count: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "grid": self.grid,
            "worst_sector_margin": self.worst_sector_margin,
            "worst_expansion_ratio": self.worst_expansion_ratio,
            "analytic_min_abs_y": self.analytic_min_abs_y,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class A1PairReport:
    """Strip-mapping diagnostics for one (horizontal, vertical) pair."""

    i: int
    j: int
    crossings_found: bool
    crossing_points: tuple[Point2, ...]
    center_inside: bool
    boundary_max_dist: float
    passed: bool


@dataclass(frozen=True)
class A1Report:
    n: int
    pairs: tuple[A1PairReport, ...]
    injectivity_guarantee: str
    injectivity_ok: bool
    boundary_tol: float
    passed: bool


@dataclass(frozen=True)
class ContractionBounds:
    """Strip-width contraction factors implied by the cone conditions."""

    nu_v: float
    nu_h: float


@dataclass(frozen=True)
class ContractionMeasurement:
    """Width ratios observed along pullback refinement chains.

    Each record is (start symbol, path symbol, round, ratio) where the
    ratio compares the refined strip width to its parent's.
    """

    n: int
    depth: int
    records: tuple[tuple[int, int, int, float], ...]
    max_ratio: float


def _sector_quantities(
    image: np.ndarray, vector: np.ndarray, params: ConeParams, direction: str
) -> tuple[float, float]:
    """(sector margin, expansion ratio) for one mapped tangent vector."""
    if direction == FORWARD_UNSTABLE:
        margin = params.mu_h * abs(image[0]) - abs(image[1])
        ratio = params.mu * abs(image[0]) / abs(vector[0])
    else:
        margin = params.mu_v * abs(image[1]) - abs(image[0])
        ratio = params.mu * abs(image[1]) / abs(vector[1])
    return float(margin), float(ratio)


def check_sector_point(
    seq: MapSequence,
    n: int,
    z0: Point2 | np.ndarray,
    v: tuple[float, float] | np.ndarray,
    params: ConeParams,
    direction: str = BACKWARD_STABLE,
    geom=None,
) -> SectorCheck:
    """Test sector invariance and stretch for one tangent vector.

    Forward-unstable: v must lie in the unstable sector at z0; the
    image under the Jacobian of f_n must lie in the unstable sector
    with its first component stretched by 1/mu.  Backward-stable
    mirrors this through the inverse Jacobian at a point of the refined
    horizontal sets at time n + 1.

    Args:
        seq: map sequence.
        n: time index of the map f_n.
        z0: base point.
        v: tangent vector, nonzero.
        params: cone parameters.
        direction: one of "forward-unstable", "backward-stable".
        geom: optional strip geometry; when given, z0 must lie in the
            relevant refined strip union.

    Raises:
        ValueError: zero vector, vector outside the source sector,
            unknown direction, or z0 outside the strip union when geom
            is supplied.
    """
    z0 = np.asarray(z0, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.any(v != 0):
        raise ValueError("tangent vector must be nonzero")
    if direction == FORWARD_UNSTABLE:
        if abs(v[1]) > params.mu_h * abs(v[0]):
            raise ValueError(
                f"vector {tuple(v)} is outside the unstable sector "
                f"|eta| <= {params.mu_h} * |xi|"
            )
        if geom is not None and not bool(geom.in_cal_v(n, z0)):
            raise ValueError(
                f"point {tuple(z0)} is outside the refined vertical sets "
                f"at time {n}"
            )
        image = seq.jacobian(n, z0) @ v
    elif direction == BACKWARD_STABLE:
        if abs(v[0]) > params.mu_v * abs(v[1]):
            raise ValueError(
                f"vector {tuple(v)} is outside the stable sector "
                f"|xi| <= {params.mu_v} * |eta|"
            )
        if geom is not None and not bool(geom.in_cal_h(n, z0)):
            raise ValueError(
                f"point {tuple(z0)} is outside the refined horizontal "
                f"sets at time {n + 1}"
            )
        image = seq.jacobian_inverse(n, z0) @ v
    else:
        raise ValueError(f"unknown direction {direction!r}")
    margin, ratio = _sector_quantities(image, v, params, direction)
    return SectorCheck(
        point=Point2(float(z0[0]), float(z0[1])),
        vector=(float(v[0]), float(v[1])),
        image_vector=(float(image[0]), float(image[1])),
        direction=direction,
        sector_margin=margin,
        expansion_ratio=ratio,
    )


def _sweep(
    pts: np.ndarray,
    jac: np.ndarray,
    rays: list[tuple[float, float]],
    params: ConeParams,
    direction: str,
    failures: list[SectorFailure],
) -> tuple[float, float]:
    """Extremal-ray margins over a point set with precomputed Jacobians."""
    worst_margin = math.inf
    worst_ratio = math.inf
    for ray in rays:
        v = np.asarray(ray)
        image = np.einsum("nij,j->ni", jac, v)
        if direction == FORWARD_UNSTABLE:
            margins = params.mu_h * np.abs(image[:, 0]) - np.abs(image[:, 1])
            ratios = params.mu * np.abs(image[:, 0]) / abs(v[0])
        else:
            margins = params.mu_v * np.abs(image[:, 1]) - np.abs(image[:, 0])
            ratios = params.mu * np.abs(image[:, 1]) / abs(v[1])
        if margins.size:
            worst_margin = min(worst_margin, float(margins.min()))
            worst_ratio = min(worst_ratio, float(ratios.min()))
            bad = np.flatnonzero((margins <= 0) | (ratios <= 1))
            for idx in bad:
                if len(failures) < _MAX_REPORTED_FAILURES:
                    name = (
                        "sector margin <= 0"
                        if margins[idx] <= 0
                        else "expansion ratio <= 1"
                    )
                    value = float(
                        margins[idx] if margins[idx] <= 0 else ratios[idx]
                    )
                    failures.append(
                        SectorFailure(
                            point=Point2(*map(float, pts[idx])),
                            vector=ray,
                            inequality=f"{direction}: {name}",
                            value=value,
                        )
                    )
    return worst_margin, worst_ratio


def check_a3_grid(
    seq: MapSequence,
    geom,
    n: int,
    grid: int = 256,
    params: ConeParams | None = None,
) -> ConeReport:
    """Sweep the cone conditions over a lattice at time step n.

    Lays a grid x grid lattice over the domain box, keeps the points in
    the refined vertical sets (forward sweep) and refined horizontal
    sets (backward sweep), and evaluates the extremal sector rays at
    every kept point.  Interior rays are implied by the extremal ones.

    Args:
        seq: map sequence.
        geom: strip geometry with membership predicates.
        n: time of the map f_n.
        grid: lattice resolution per axis, at least 2.
        params: cone parameters; defaults match the geometry slopes.

    Returns:
        ConeReport with worst margins; pass iff every sampled margin is
        positive and every stretch ratio exceeds one.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    if params is None:
        params = ConeParams(mu_h=geom.mu_h, mu_v=geom.mu_v)
    box = geom.box
    xs = np.linspace(box.xlo, box.xhi, grid)
    ys = np.linspace(box.ylo, box.yhi, grid)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    lattice = np.stack([gx.ravel(), gy.ravel()], axis=-1)

    failures: list[SectorFailure] = []

    pts_v = lattice[geom.in_cal_v(n, lattice)]
    jac_v = seq.jacobian(n, pts_v)
    rays_u = [(1.0, params.mu_h), (1.0, -params.mu_h)]
    margin_u, ratio_u = _sweep(
        pts_v, jac_v, rays_u, params, FORWARD_UNSTABLE, failures
    )

    pts_h = lattice[geom.in_cal_h(n, lattice)]
    jac_h = seq.jacobian_inverse(n, pts_h)
    rays_s = [(params.mu_v, 1.0), (-params.mu_v, 1.0)]
    margin_s, ratio_s = _sweep(
        pts_h, jac_h, rays_s, params, BACKWARD_STABLE, failures
    )

    min_abs_y = float(np.min(np.abs(pts_h[:, 1]))) if pts_h.size else math.inf
    min_abs_x = float(np.min(np.abs(pts_v[:, 0]))) if pts_v.size else math.inf
    thr_y = sector_threshold(params.mu_v)
    thr_x = sector_threshold(params.mu_h)
    worst_margin = min(margin_u, margin_s)
    worst_ratio = min(ratio_u, ratio_s)
    return ConeReport(
        n=n,
        grid=grid,
        worst_sector_margin=worst_margin,
        worst_expansion_ratio=worst_ratio,
        analytic_min_abs_y=min_abs_y,
        analytic_min_abs_x=min_abs_x,
        threshold_y=thr_y,
        threshold_x=thr_x,
        analytic_ok=(min_abs_y > thr_y) and (min_abs_x > thr_x),
        points_unstable=int(pts_v.shape[0]),
        points_stable=int(pts_h.shape[0]),
        failures=tuple(failures),
        failure_count=len(failures),
        passed=(worst_margin > 0) and (worst_ratio > 1),
    )


def _distance_to_caps(pts: np.ndarray, strip: Strip) -> np.ndarray:
    """Distance from points to the end segments of a vertical strip."""
    best = np.full(pts.shape[0], math.inf)
    for t_end, v_lo, v_hi in strip.cap_segments():
        dx = np.maximum(
            np.maximum(v_lo - pts[:, 0], pts[:, 0] - v_hi), 0.0
        )
        dy = np.abs(pts[:, 1] - t_end)
        best = np.minimum(best, np.hypot(dx, dy))
    return best


def check_a1(
    seq: MapSequence,
    geom,
    n: int,
    samples: int = 1024,
    boundary_samples: int = 1000,
    boundary_tol: float = 1e-8,
    rng_seed: int = 1234,
) -> A1Report:
    """Strip-mapping (A1) diagnostics at time n.

    For every pair (i, j): locate the four crossings of the boundary
    curves of the time-(n+1) horizontal strip i with those of the
    time-(n+1) vertical strip j, certify the intersection is nonempty
    through its midline center, and pull sampled points of the
    intersection's graph boundary back through f_n^{-1}, which must land
    on the horizontal boundary (the end segments) of vertical strip i at
    time n within boundary_tol.  Injectivity of f_n on the strips is
    checked on random sample pairs unless the sequence carries a
    closed-form guarantee.
    """
    h_strips = geom.h_strips(n)
    v_strips_next = geom.v_strips(n + 1)
    v_strips_now = geom.v_strips(n)
    pairs = []
    for i, h_strip in enumerate(h_strips, start=1):
        for j, v_strip in enumerate(v_strips_next, start=1):
            crossings = []
            ok = True
            for h_curve in (h_strip.lower, h_strip.upper):
                for v_curve in (v_strip.lower, v_strip.upper):
                    try:
                        crossings.append(curve_intersection(v_curve, h_curve))
                    except (ValueError, RuntimeError):
                        ok = False
            center_inside = False
            if ok:
                center = curve_intersection(v_strip.midline(), h_strip.midline())
                center_inside = bool(
                    h_strip.contains(np.asarray(center))
                ) and bool(v_strip.contains(np.asarray(center)))
            boundary_max = math.inf
            if ok:
                boundary_max = 0.0
                source = v_strips_now[i - 1]
                for h_curve in (h_strip.lower, h_strip.upper):
                    x_cross = sorted(
                        curve_intersection(v_curve, h_curve).x
                        for v_curve in (v_strip.lower, v_strip.upper)
                    )
                    xs = np.linspace(x_cross[0], x_cross[1], boundary_samples)
                    arc = np.stack([xs, h_curve(xs)], axis=-1)
                    pre = seq.inverse(n, arc)
                    boundary_max = max(
                        boundary_max, float(np.max(_distance_to_caps(pre, source)))
                    )
            passed = ok and center_inside and boundary_max <= boundary_tol
            pairs.append(
                A1PairReport(
                    i=i,
                    j=j,
                    crossings_found=ok,
                    crossing_points=tuple(crossings),
                    center_inside=center_inside,
                    boundary_max_dist=boundary_max,
                    passed=passed,
                )
            )

    guarantee = getattr(seq, "injectivity_guarantee", "sampled")
    injectivity_ok = True
    if guarantee != "closed-form":
        rng = np.random.default_rng(rng_seed + 7919 * n)
        box = geom.box
        cand = rng.uniform(
            [box.xlo, box.ylo], [box.xhi, box.yhi], size=(8 * samples, 2)
        )
        keep = np.zeros(len(cand), dtype=bool)
        for strip in v_strips_now:
            keep |= strip.contains(cand)
        pts = cand[keep][:samples]
        if pts.shape[0] >= 2:
            img = seq.forward(n, pts)
            d_img = np.linalg.norm(img[:, None, :] - img[None, :, :], axis=-1)
            d_src = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
            iu = np.triu_indices(pts.shape[0], k=1)
            collide = (d_img[iu] < 1e-9) & (d_src[iu] > 1e-6)
            injectivity_ok = not bool(np.any(collide))

    passed = injectivity_ok and all(p.passed for p in pairs)
    return A1Report(
        n=n,
        pairs=tuple(pairs),
        injectivity_guarantee=guarantee,
        injectivity_ok=injectivity_ok,
        boundary_tol=boundary_tol,
        passed=passed,
    )


def derive_contraction(params: ConeParams) -> ContractionBounds:
    """Strip-width contraction factors from the cone parameters.

    Requires mu_v < mu < 1 - mu_h * mu_v: the upper bound makes the
    cone-implied contraction factor mu / (1 - mu_h * mu_v) less than
    one, and the lower bound is what the stretch estimates on the
    built-in geometry can actually deliver (the sufficient coordinate
    threshold (mu_v + 1/mu_v)/2 only certifies stretch 1/mu for
    mu > mu_v).

    Raises:
        ValueError: mu outside the open interval, naming the violated
            inequality.
    """
    upper = 1.0 - params.mu_h * params.mu_v
    if params.mu <= params.mu_v:
        raise ValueError(
            f"mu must exceed mu_v: mu = {params.mu} <= mu_v = {params.mu_v}"
        )
    if params.mu >= upper:
        raise ValueError(
            f"mu must stay below 1 - mu_h * mu_v: mu = {params.mu} >= {upper}"
        )
    nu = params.mu / upper
    return ContractionBounds(nu_v=nu, nu_h=nu)


def measure_contraction(
    seq: MapSequence,
    geom,
    n: int,
    depth: int,
    samples: int = DEFAULT_REFIT_SAMPLES,
) -> ContractionMeasurement:
    """Observed width ratios along pullback refinement chains.

    Starting from each vertical strip at time n + 1, performs depth
    rounds of pullback through the maps f_n, f_{n-1}, ... with a fixed
    path symbol, recording after each round the ratio of the refined
    width to its parent's width.  Under the cone conditions every ratio
    stays at or below the derived contraction factor.

    Args:
        seq: map sequence.
        geom: strip geometry (assumes the strip mapping checks pass).
        n: the first pullback runs through f_n.
        depth: number of pullback rounds, at least 1.

    Raises:
        ValueError: depth < 1.
        RefinementError: a pullback escaped the strip family.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    records: list[tuple[int, int, int, float]] = []
    n_sym = geom.n_symbols
    for j in range(1, n_sym + 1):
        for i in range(1, n_sym + 1):
            strip = geom.v_strips(n + 1)[j - 1]
            width = strip_width(strip)
            for k in range(1, depth + 1):
                m = n + 1 - k
                strip = pull_back_vertical(
                    seq,
                    m,
                    strip=strip,
                    via_h=geom.h_strips(m)[i - 1],
                    target_v=geom.v_strips(m)[i - 1],
                    samples=samples,
                )
                new_width = strip_width(strip)
                records.append((j, i, k, new_width / width))
                width = new_width
    max_ratio = max(r[3] for r in records)
    return ContractionMeasurement(
        n=n, depth=depth, records=tuple(records), max_ratio=max_ratio
    )
