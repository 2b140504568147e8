"""Strip refinement by pulling back and pushing forward boundary curves.

The Conley-Moser construction refines strips through the map sequence:
a vertical strip at time n + 1 pulls back through f_n^{-1} to a thinner
vertical strip at time n inside a chosen preimage strip, and a
horizontal strip at time m pushes forward through f_m to a thinner
horizontal strip at time m + 1 inside a chosen image strip.  Both
operations act on the boundary curves: restrict the curve to the
relevant strip (its crossings with that strip's boundary delimit the
restriction), map the restricted arc pointwise, and refit the image as
a piecewise-linear Lipschitz curve over the full parameter interval.

Refitting at a fixed sample count each step keeps the representation
from starving as widths contract; the fit nodes lie exactly on the
mapped arc, so each step only contributes the between-node interpolation
error, which subsequent pullbacks contract along with everything else.
"""

from __future__ import annotations

import numpy as np

from .curves import LipschitzCurve, Orientation, Strip, curve_intersection
from .maps import MapSequence

__all__ = [
    "RefinementError",
    "DEFAULT_REFIT_SAMPLES",
    "pull_back_vertical",
    "push_forward_horizontal",
]

DEFAULT_REFIT_SAMPLES = 4097

# A mapped arc must reach both ends of the target interval; this is the
# slack allowed on each end before the refinement is declared broken.
_SPAN_TOL = 1e-6


class RefinementError(RuntimeError):
    """Refinement escaped the strip family, which signals a geometry or
    strip-mapping (A1) failure upstream."""


def _refit(
    orientation: Orientation,
    param: np.ndarray,
    value: np.ndarray,
    interval: tuple[float, float],
    bound: float,
) -> LipschitzCurve:
    """Sort a mapped arc into a table over exactly the target interval."""
    order = np.argsort(param, kind="stable")
    param, value = param[order], value[order]
    lo, hi = interval
    if param[0] > lo + _SPAN_TOL or param[-1] < hi - _SPAN_TOL:
        raise RefinementError(
            f"mapped arc spans [{param[0]}, {param[-1]}], short of the "
            f"target interval [{lo}, {hi}]"
        )
    param = np.clip(param, lo, hi)
    param, idx = np.unique(param, return_index=True)
    value = value[idx]
    if param.size < 2:
        raise RefinementError("mapped arc collapsed to a point")
    param[0], param[-1] = lo, hi
    return LipschitzCurve.from_samples(orientation, param, value, bound)


def _restriction_params_vertical(
    curve: LipschitzCurve, via: Strip
) -> tuple[float, float]:
    """Parameter range of a vertical curve inside a horizontal strip,
    delimited by its crossings with the strip's boundary curves."""
    a = curve_intersection(curve, via.lower)
    b = curve_intersection(curve, via.upper)
    t0, t1 = sorted((a.y, b.y))
    if not t1 > t0:
        raise RefinementError("curve crossings coincide; restriction is empty")
    return t0, t1


def _restriction_params_horizontal(
    curve: LipschitzCurve, via: Strip
) -> tuple[float, float]:
    """Parameter range of a horizontal curve inside a vertical strip."""
    a = curve_intersection(via.lower, curve)
    b = curve_intersection(via.upper, curve)
    t0, t1 = sorted((a.x, b.x))
    if not t1 > t0:
        raise RefinementError("curve crossings coincide; restriction is empty")
    return t0, t1


def _ordered_strip(c0: LipschitzCurve, c1: LipschitzCurve) -> Strip:
    mid = 0.5 * (c0.interval[0] + c0.interval[1])
    lower, upper = (c0, c1) if c0(mid) <= c1(mid) else (c1, c0)
    try:
        return Strip(lower=lower, upper=upper)
    except ValueError as exc:
        raise RefinementError(f"mapped boundary curves cross: {exc}") from exc


def pull_back_vertical(
    seq: MapSequence,
    n: int,
    strip: Strip,
    via_h: Strip,
    target_v: Strip,
    samples: int = DEFAULT_REFIT_SAMPLES,
) -> Strip:
    """Pull a vertical strip at time n + 1 back to one at time n.

    Args:
        seq: the map sequence.
        n: time of the resulting strip; the input lives at n + 1.
        strip: vertical strip at time n + 1 to refine.
        via_h: horizontal strip at time n + 1 that is the image of
            target_v under f_n; the pullback restricts to it.
        target_v: vertical strip at time n receiving the refinement.
        samples: arc sample count for the refit.

    Returns:
        The refined vertical strip, spanning target_v's interval.

    Raises:
        RefinementError: the mapped arcs do not span the target
            interval or their curves cross.
    """
    if strip.orientation is not Orientation.VERTICAL:
        raise ValueError("strip to pull back must be vertical")
    if via_h.orientation is not Orientation.HORIZONTAL:
        raise ValueError("restriction strip must be horizontal")
    bound = max(target_v.lower.lipschitz_bound, target_v.upper.lipschitz_bound)
    new_curves = []
    for curve in (strip.lower, strip.upper):
        t0, t1 = _restriction_params_vertical(curve, via_h)
        t = np.linspace(t0, t1, max(int(samples), 2))
        pts = np.stack([curve(t), t], axis=-1)
        pre = seq.inverse(n, pts)
        new_curves.append(
            _refit(Orientation.VERTICAL, pre[:, 1], pre[:, 0],
                   target_v.interval, bound)
        )
    return _ordered_strip(*new_curves)


def push_forward_horizontal(
    seq: MapSequence,
    n: int,
    strip: Strip,
    via_v: Strip,
    target_h: Strip,
    samples: int = DEFAULT_REFIT_SAMPLES,
) -> Strip:
    """Push a horizontal strip at time n forward to one at time n + 1.

    Args:
        seq: the map sequence.
        n: time of the input strip; the result lives at n + 1.
        strip: horizontal strip at time n to refine.
        via_v: vertical strip at time n whose image under f_n is
            target_h; the push-forward restricts to it.
        target_h: horizontal strip at time n + 1 receiving the
            refinement.
        samples: arc sample count for the refit.
    """
    if strip.orientation is not Orientation.HORIZONTAL:
        raise ValueError("strip to push forward must be horizontal")
    if via_v.orientation is not Orientation.VERTICAL:
        raise ValueError("restriction strip must be vertical")
    bound = max(target_h.lower.lipschitz_bound, target_h.upper.lipschitz_bound)
    new_curves = []
    for curve in (strip.lower, strip.upper):
        t0, t1 = _restriction_params_horizontal(curve, via_v)
        t = np.linspace(t0, t1, max(int(samples), 2))
        pts = np.stack([t, curve(t)], axis=-1)
        img = seq.forward(n, pts)
        new_curves.append(
            _refit(Orientation.HORIZONTAL, img[:, 0], img[:, 1],
                   target_h.interval, bound)
        )
    return _ordered_strip(*new_curves)
