"""Planar map sequences and the modulated Henon family.

A map sequence assigns to each integer time n an invertible planar map
f_n together with its Jacobians.  The built-in family is the
area-preserving Henon map with a time-dependent coefficient,

    f_n(x, y) = (a(n) - y - x^2, x),      a(n) = a_star + epsilon * cos(n),

whose inverse is f_n^{-1}(x, y) = (y, a(n) - x - y^2).  The second Henon
coefficient is fixed at -1, so every map in the sequence has Jacobian
determinant one.  All point operations accept arrays of shape (..., 2)
and broadcast over the leading axes.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass

import numpy as np

from .curves import DomainBox, Point2

__all__ = [
    "MapSequence",
    "HenonParams",
    "HenonSequence",
    "henon_sequence",
    "eval_a",
    "jacobian_fd",
]


class MapSequence(abc.ABC):
    """Sequence of invertible planar maps indexed by integer time."""

    # How injectivity of f_n on the strips is certified: "sampled" means
    # the strip-mapping check draws random pairs; subclasses with an
    # algebraic argument may override with "closed-form".
    injectivity_guarantee = "sampled"

    @abc.abstractmethod
    def forward(self, n: int, pts: np.ndarray) -> np.ndarray:
        """Apply f_n to points of shape (..., 2)."""

    @abc.abstractmethod
    def inverse(self, n: int, pts: np.ndarray) -> np.ndarray:
        """Apply f_n^{-1} to points of shape (..., 2)."""

    @abc.abstractmethod
    def jacobian(self, n: int, pts: np.ndarray) -> np.ndarray:
        """Jacobian of f_n at points of shape (..., 2); returns (..., 2, 2)."""

    @abc.abstractmethod
    def jacobian_inverse(self, n: int, pts: np.ndarray) -> np.ndarray:
        """Jacobian of f_n^{-1} at points of shape (..., 2)."""

    @abc.abstractmethod
    def domain(self, n: int) -> DomainBox:
        """Square domain D on which the time-n strips are built."""


@dataclass(frozen=True)
class HenonParams:
    """Parameters of the modulated Henon family.

    Attributes:
        a_star: mean value of the modulated coefficient.
        epsilon: modulation amplitude; a(n) = a_star + epsilon * cos(n)
            with n in radians, so a(n) is bounded between a_star - epsilon
            and a_star + epsilon and attains its supremum at n = 0.
    """

    a_star: float = 9.5
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if not math.isfinite(self.a_star):
            raise ValueError("a_star must be finite")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValueError("epsilon must be finite and nonnegative")
        if 1.0 + self.a_star + self.epsilon <= 0:
            raise ValueError(
                "need 1 + a_star + epsilon > 0 for the domain half-width"
            )

    @property
    def sup_a(self) -> float:
        """Supremum of a(n) over integer n, attained at n = 0."""
        return self.a_star + self.epsilon

    @property
    def domain_half_width(self) -> float:
        """Half-width r = 1 + sqrt(1 + sup a) of the square domain."""
        return 1.0 + math.sqrt(1.0 + self.sup_a)


def eval_a(params: HenonParams, n: int | np.ndarray) -> float | np.ndarray:
    """Modulated coefficient a(n) = a_star + epsilon * cos(n).

    The cosine takes n in radians.  Accepts scalar or array n; a(-n)
    equals a(n) since cos is even.
    """
    out = params.a_star + params.epsilon * np.cos(n)
    return float(out) if np.isscalar(n) or np.ndim(out) == 0 else out


class HenonSequence(MapSequence):
    """The modulated Henon family as a map sequence."""

    # The second image component is the source x, so equal images force
    # equal x and then equal y: injective everywhere, not just on strips.
    injectivity_guarantee = "closed-form"

    def __init__(self, params: HenonParams):
        self.params = params
        self._box = DomainBox.square(params.domain_half_width)

    def a(self, n: int | np.ndarray) -> float | np.ndarray:
        return eval_a(self.params, n)

    def forward(self, n: int, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        return np.stack([self.a(n) - y - x * x, x], axis=-1)

    def inverse(self, n: int, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        return np.stack([y, self.a(n) - x - y * y], axis=-1)

    def jacobian(self, n: int, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        x = pts[..., 0]
        jac = np.empty(pts.shape[:-1] + (2, 2))
        jac[..., 0, 0] = -2.0 * x
        jac[..., 0, 1] = -1.0
        jac[..., 1, 0] = 1.0
        jac[..., 1, 1] = 0.0
        return jac

    def jacobian_inverse(self, n: int, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        y = pts[..., 1]
        jac = np.empty(pts.shape[:-1] + (2, 2))
        jac[..., 0, 0] = 0.0
        jac[..., 0, 1] = 1.0
        jac[..., 1, 0] = -1.0
        jac[..., 1, 1] = -2.0 * y
        return jac

    def domain(self, n: int) -> DomainBox:
        return self._box


def henon_sequence(params: HenonParams | None = None) -> HenonSequence:
    """Construct the modulated Henon map sequence."""
    return HenonSequence(params if params is not None else HenonParams())


def jacobian_fd(
    seq: MapSequence,
    n: int,
    p: Point2 | np.ndarray,
    h: float = 1e-6,
    inverse: bool = False,
) -> np.ndarray:
    """Central-difference Jacobian oracle, O(h^2) accurate.

    Independent of the closed-form Jacobians, for cross-checking them.

    Args:
        seq: map sequence.
        n: time index.
        p: single point (2,).
        h: step size, must be positive and finite.
        inverse: differentiate f_n^{-1} instead of f_n.

    Raises:
        ValueError: nonpositive or non-finite h.
    """
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"finite positive step required, got h={h}")
    p = np.asarray(p, dtype=float)
    fn = seq.inverse if inverse else seq.forward
    jac = np.empty((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        jac[:, k] = (fn(n, p + e) - fn(n, p - e)) / (2.0 * h)
    return jac
