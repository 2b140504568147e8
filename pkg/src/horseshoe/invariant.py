"""Approximation of the time-n invariant set.

Two independent routes to the same object:

* iter_lambda_points / approximate_lambda walk the admissible-word
  tree at a given depth and refine every word to a point with a
  per-point error bound.  Pullback and push-forward chains are shared
  across words through suffix and prefix trees, so the strip work grows
  with the number of admissible subwords rather than words times depth,
  and points stream out in lexicographic word order without
  materializing the whole cloud.

* brute_force_survivors iterates a lattice forward and backward
  through the map sequence and keeps the points whose finite orbit
  segment stays inside the strip unions.  No symbolic structure is
  used, which makes it a useful cross-check for the word route.

directed_hausdorff compares the two clouds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.spatial import cKDTree

from .curves import LipschitzCurve, Strip, curve_intersection, strip_width
from .maps import MapSequence
from .refine import DEFAULT_REFIT_SAMPLES, pull_back_vertical, push_forward_horizontal
from .symbolic import Itinerary, TransitionMatrixSeq, compute_transition_matrix

__all__ = [
    "LambdaPoint",
    "LambdaApproximation",
    "SurvivorCloud",
    "iter_lambda_points",
    "approximate_lambda",
    "brute_force_survivors",
    "directed_hausdorff",
]

# Keeps escaped orbits finite during survivor iteration; anything this
# far out has long since left the domain box and failed its mask.
_ESCAPE_CLIP = 1.0e6


@dataclass(frozen=True)
class LambdaPoint:
    """One refined word: serialized form, base time, location, bound."""

    word: str
    n: int
    x: float
    y: float
    err_bound: float


@dataclass(frozen=True)
class LambdaApproximation:
    """Point cloud for the time-n invariant set at a fixed word depth."""

    n: int
    depth: int
    points: tuple[LambdaPoint, ...]

    def coords(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.points], dtype=float)

    @property
    def max_err_bound(self) -> float:
        return max(p.err_bound for p in self.points) if self.points else 0.0


@dataclass(frozen=True)
class SurvivorCloud:
    """Lattice points whose +-k orbit segment stays in the strip unions."""

    n: int
    k: int
    grid: int
    extent: float
    points: np.ndarray

    @property
    def spacing(self) -> float:
        # Lattice pitch, the resolution term in cloud comparisons.
        return self.extent / (self.grid - 1)


def _default_matrices(geom) -> TransitionMatrixSeq:
    return TransitionMatrixSeq(
        lambda m: compute_transition_matrix(geom, m), geom.n_symbols
    )


def _compact_midline(strip: Strip, samples: int) -> tuple[LipschitzCurve, float]:
    """Midline resampled on a uniform grid, with the strip width.

    Refined strip boundaries carry large sample tables; caching their
    exact midlines at every tree leaf would dominate memory.  The
    resampling error is quadratic in the grid pitch and sits well below
    the strip width the midline is paired with.
    """
    lo, hi = strip.interval
    t = np.linspace(lo, hi, samples)
    v = 0.5 * (strip.lower(t) + strip.upper(t))
    bound = max(strip.lower.lipschitz_bound, strip.upper.lipschitz_bound)
    curve = LipschitzCurve.from_samples(strip.orientation, t, v, bound)
    return curve, strip_width(strip)


def _future_midlines(
    geom,
    seq: MapSequence,
    matrices: TransitionMatrixSeq,
    n: int,
    future_len: int,
    samples: int,
) -> dict[tuple[int, ...], tuple[LipschitzCurve, float]]:
    """Midline and width of the refined vertical strip at time n for
    every admissible future word, sharing pullbacks along the suffix
    tree.  Only leaf midlines are kept; path strips live on the stack."""
    out: dict[tuple[int, ...], tuple[LipschitzCurve, float]] = {}
    symbols = range(1, geom.n_symbols + 1)

    def grow(m: int, word: tuple[int, ...], strip: Strip) -> None:
        # strip realizes word, whose first symbol sits at time m.
        if m == n:
            out[word] = _compact_midline(strip, samples)
            return
        for s in symbols:
            if not matrices.allows(m - 1, s, word[0]):
                continue
            pulled = pull_back_vertical(
                seq,
                m - 1,
                strip=strip,
                via_h=geom.h_strips(m - 1)[s - 1],
                target_v=geom.v_strips(m - 1)[s - 1],
                samples=samples,
            )
            grow(m - 1, (s,) + word, pulled)

    deepest = n + future_len - 1
    for s in symbols:
        grow(deepest, (s,), geom.v_strips(deepest)[s - 1])
    return out


def iter_lambda_points(
    geom,
    seq: MapSequence,
    n: int,
    depth: int,
    matrices: TransitionMatrixSeq | None = None,
    samples: int = DEFAULT_REFIT_SAMPLES,
    tol: float = 1e-10,
) -> Iterator[LambdaPoint]:
    """Refined points for every admissible word of length 2 * depth + 1
    centered at time n, in lexicographic order of the symbol string.

    Words carry depth past symbols and depth + 1 future symbols.  The
    walk streams: horizontal refinement follows a depth-first pass over
    the past prefix tree (one strip per level on the stack), vertical
    refinement is shared through cached future midlines.

    Raises:
        ValueError: depth < 1.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if matrices is None:
        matrices = _default_matrices(geom)
    futures = _future_midlines(geom, seq, matrices, n, depth + 1, samples)
    future_words = sorted(futures)
    symbols = range(1, geom.n_symbols + 1)

    def emit(past: tuple[int, ...], strip: Strip) -> Iterator[LambdaPoint]:
        h_mid, h_width = _compact_midline(strip, samples)
        for future in future_words:
            if not matrices.allows(n - 1, past[-1], future[0]):
                continue
            v_mid, v_width = futures[future]
            pt = curve_intersection(v_mid, h_mid, tol=tol)
            word = Itinerary(base_time=n, past=past, future=future).word
            yield LambdaPoint(
                word=word,
                n=n,
                x=pt.x,
                y=pt.y,
                err_bound=max(v_width, h_width),
            )

    def walk(m: int, word: tuple[int, ...], strip: Strip) -> Iterator[LambdaPoint]:
        # strip lives at time m and realizes word, whose last symbol
        # sits at time m - 1.
        if m == n:
            yield from emit(word, strip)
            return
        for s in symbols:
            if not matrices.allows(m - 1, word[-1], s):
                continue
            pushed = push_forward_horizontal(
                seq,
                m,
                strip=strip,
                via_v=geom.v_strips(m)[s - 1],
                target_h=geom.h_strips(m)[s - 1],
                samples=samples,
            )
            yield from walk(m + 1, word + (s,), pushed)

    earliest = n - depth
    for s in symbols:
        yield from walk(earliest + 1, (s,), geom.h_strips(earliest)[s - 1])


def approximate_lambda(
    geom,
    seq: MapSequence,
    n: int,
    depth: int,
    matrices: TransitionMatrixSeq | None = None,
    samples: int = DEFAULT_REFIT_SAMPLES,
    tol: float = 1e-10,
) -> LambdaApproximation:
    """Materialized point cloud from iter_lambda_points."""
    points = tuple(
        iter_lambda_points(
            geom, seq, n, depth, matrices=matrices, samples=samples, tol=tol
        )
    )
    return LambdaApproximation(n=n, depth=depth, points=points)


def _excess(s: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """How far s sits outside [lo, hi] (zero inside)."""
    return np.maximum(np.maximum(lo - s, s - hi), 0.0)


def _seed_distance(viol: np.ndarray, g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    """First-order distance in seed space: violation over gradient norm."""
    nrm = np.hypot(g1, g2)
    return viol / np.where(nrm > 0.0, nrm, 1.0)


def _survivor_distance(geom, seq: MapSequence, n: int, k: int, pts: np.ndarray):
    """Worst seed-space distance to the orbit-survival constraints.

    Walks the orbit of each seed k steps forward and backward while
    chaining the Jacobian, and converts every violated membership
    (strip-union inequality or domain box, at every intermediate time)
    into a first-order distance back at the seed: violation divided by
    the gradient norm of the constraint as a function of the seed.  The
    forward and backward families are combined in quadrature since
    vertical and horizontal constraints cross transversally.

    Seeds inside the true survivor set come back as 0.  The first-order
    model is accurate at lattice scale because the constraint functions
    are quadratic with slowly varying gradients.
    """
    r = geom.r
    worst = [np.zeros(len(pts)), np.zeros(len(pts))]
    for side in (0, 1):
        x = pts[:, 0].copy()
        y = pts[:, 1].copy()
        # Jacobian of the orbit map as a function of the seed.
        j11 = np.ones_like(x)
        j12 = np.zeros_like(x)
        j21 = np.zeros_like(x)
        j22 = np.ones_like(x)
        for j in range(k + 1):
            if side == 0:
                a = geom.a(n + j)
                s = x * x + y
                g1 = 2.0 * x * j11 + j21
                g2 = 2.0 * x * j12 + j22
            else:
                # Horizontal union at time n - j is indexed by the map
                # one step earlier.
                a = geom.a(n - j - 1)
                s = x + y * y
                g1 = j11 + 2.0 * y * j21
                g2 = j12 + 2.0 * y * j22
            d = _seed_distance(_excess(s, a - r, a + r), g1, g2)
            d = np.maximum(d, _seed_distance(_excess(x, -r, r), j11, j12))
            d = np.maximum(d, _seed_distance(_excess(y, -r, r), j21, j22))
            worst[side] = np.maximum(worst[side], d)
            if j == k:
                break
            m = n + j if side == 0 else n - j - 1
            z = np.stack([x, y], axis=-1)
            jac = seq.jacobian(m, z) if side == 0 else seq.jacobian_inverse(m, z)
            n11 = jac[:, 0, 0] * j11 + jac[:, 0, 1] * j21
            n12 = jac[:, 0, 0] * j12 + jac[:, 0, 1] * j22
            n21 = jac[:, 1, 0] * j11 + jac[:, 1, 1] * j21
            n22 = jac[:, 1, 0] * j12 + jac[:, 1, 1] * j22
            j11, j12, j21, j22 = n11, n12, n21, n22
            z = seq.forward(m, z) if side == 0 else seq.inverse(m, z)
            z = np.clip(z, -_ESCAPE_CLIP, _ESCAPE_CLIP)
            x, y = z[:, 0], z[:, 1]
    return np.hypot(worst[0], worst[1])


_SEED_BLOCK = 1 << 19


def brute_force_survivors(
    geom,
    seq: MapSequence,
    n: int,
    k: int,
    grid: int = 2048,
    slack: float | None = None,
) -> SurvivorCloud:
    """Lattice points at time n surviving k steps both ways.

    A point survives if its forward orbit stays in the vertical strip
    union at times n .. n + k and its backward orbit stays in the
    horizontal strip union at times n .. n - k, with every membership
    resolved at lattice resolution: the point is kept when its
    first-order distance to the constraint set (violation over the
    seed-space gradient norm, Jacobians chained along the orbit) is at
    most `slack`.  Pure orbit iteration plus closed-form memberships,
    nothing symbolic.

    `slack` defaults to the lattice spacing, so the cloud approximates
    the invariant set from the outside: the deep refinement cells are
    far thinner than the lattice pitch and a strict point test would
    miss nearly all of them.  Pass slack=0.0 for the strict test.

    Raises:
        ValueError: k < 0 or grid < 2.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    box = geom.box
    xs = np.linspace(box.xlo, box.xhi, grid)
    ys = np.linspace(box.ylo, box.yhi, grid)
    if slack is None:
        slack = (box.xhi - box.xlo) / (grid - 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    lattice = np.stack([gx.ravel(), gy.ravel()], axis=-1)

    kept = []
    for start in range(0, len(lattice), _SEED_BLOCK):
        block = lattice[start : start + _SEED_BLOCK]
        dist = _survivor_distance(geom, seq, n, k, block)
        kept.append(block[dist <= slack])

    return SurvivorCloud(
        n=n,
        k=k,
        grid=grid,
        extent=box.xhi - box.xlo,
        points=np.concatenate(kept, axis=0),
    )


def directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """sup over a of the distance to the nearest point of b.

    Raises:
        ValueError: either cloud is empty.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("cannot compare empty point clouds")
    dists, _ = cKDTree(b).query(a)
    return float(np.max(dists))
