"""Symbolic dynamics for the verified horseshoe.

Itineraries are finite windows of a bi-infinite symbol sequence,
anchored at a base time n: the future part lists the strip symbols at
times n, n+1, ... and the past part those at n-k, ..., n-1.  Words
serialize as digit strings with a dot before the base-time symbol
("112.121").  The extended shift moves the anchor one step forward,
which is the symbolic counterpart of applying f_n.

Refinement turns words into strips: the future part selects a nested
vertical strip at time n (each extra symbol adds one pullback), the
past part a nested horizontal strip, and their crossing approximates
the unique orbit point with that itinerary, with the larger of the two
final strip widths as the error bound.  The conjugacy residual measures
how far the refinement is from intertwining the map with the shift.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .curves import Point2, Strip, curve_intersection, strip_width
from .maps import MapSequence
from .refine import (
    DEFAULT_REFIT_SAMPLES,
    pull_back_vertical,
    push_forward_horizontal,
)

__all__ = [
    "Itinerary",
    "TransitionMatrixSeq",
    "compute_transition_matrix",
    "shift_word",
    "unshift_word",
    "is_admissible",
    "enumerate_words",
    "refine_vertical",
    "refine_horizontal",
    "itinerary_to_point",
    "conjugacy_residual",
]

_WORD_RE = re.compile(r"^([1-9]*)\.([1-9]+)$")


@dataclass(frozen=True)
class Itinerary:
    """Finite symbol window anchored at a base time.

    past[k] is the symbol at time base_time - len(past) + k, future[k]
    the symbol at base_time + k.  Symbols are 1-based strip indices.
    """

    base_time: int
    past: tuple[int, ...]
    future: tuple[int, ...]

    def __post_init__(self) -> None:
        for s in self.past + self.future:
            if not (isinstance(s, int) and 1 <= s <= 9):
                raise ValueError(f"symbols must be integers in 1..9, got {s!r}")

    @property
    def word(self) -> str:
        """Digit string with a dot before the base-time symbol."""
        return (
            "".join(str(s) for s in self.past)
            + "."
            + "".join(str(s) for s in self.future)
        )

    @classmethod
    def from_word(cls, word: str, base_time: int = 0) -> "Itinerary":
        m = _WORD_RE.match(word)
        if m is None:
            raise ValueError(
                f"malformed word {word!r}; expected digits with a dot "
                "before the base-time symbol, e.g. '112.121'"
            )
        past = tuple(int(c) for c in m.group(1))
        future = tuple(int(c) for c in m.group(2))
        return cls(base_time=base_time, past=past, future=future)

    def symbol_at(self, m: int) -> int:
        """Symbol at time m, which must lie in the covered window."""
        k = m - (self.base_time - len(self.past))
        seq = self.past + self.future
        if not (0 <= k < len(seq)):
            raise ValueError(f"time {m} outside the itinerary window")
        return seq[k]

    @property
    def times(self) -> range:
        return range(
            self.base_time - len(self.past),
            self.base_time + len(self.future),
        )


class TransitionMatrixSeq:
    """Time-indexed 0/1 transition matrices.

    matrix(n)[i-1][j-1] is 1 iff symbol i at time n may be followed by
    symbol j at time n + 1.  Backed by a callable so nonautonomous
    families (different matrix at each time) cost nothing up front;
    results are cached.
    """

    def __init__(self, fn: Callable[[int], np.ndarray], n_symbols: int):
        if n_symbols < 1:
            raise ValueError("need at least one symbol")
        self._fn = fn
        self.n_symbols = n_symbols
        self._cache: dict[int, np.ndarray] = {}

    @classmethod
    def constant(cls, matrix: np.ndarray) -> "TransitionMatrixSeq":
        matrix = np.asarray(matrix, dtype=int)
        return cls(lambda n: matrix, matrix.shape[0])

    @classmethod
    def full(cls, n_symbols: int) -> "TransitionMatrixSeq":
        return cls.constant(np.ones((n_symbols, n_symbols), dtype=int))

    def matrix(self, n: int) -> np.ndarray:
        if n not in self._cache:
            m = np.asarray(self._fn(n), dtype=int)
            if m.shape != (self.n_symbols, self.n_symbols):
                raise ValueError(
                    f"transition matrix at {n} has shape {m.shape}, "
                    f"expected {(self.n_symbols, self.n_symbols)}"
                )
            if not np.isin(m, (0, 1)).all():
                raise ValueError("transition matrix entries must be 0 or 1")
            self._cache[n] = m
        return self._cache[n]

    def allows(self, n: int, i: int, j: int) -> bool:
        """Whether symbol i at time n may precede symbol j at n + 1."""
        return bool(self.matrix(n)[i - 1, j - 1])


def compute_transition_matrix(geom, n: int, certify_grid: int = 256) -> np.ndarray:
    """Transition matrix at time n from strip intersections.

    Entry (i, j) is 1 iff horizontal strip i at time n + 1 meets
    vertical strip j at time n + 1.  Nonemptiness is certified by a
    point: first the crossing of the two strip midlines, then (if that
    crossing escapes either strip) a lattice sweep at certify_grid
    resolution.  Absence of a certificate yields 0, so a reported 1 is
    always backed by an explicit point.
    """
    h_strips = geom.h_strips(n)
    v_strips = geom.v_strips(n + 1)
    n_sym = geom.n_symbols
    out = np.zeros((n_sym, n_sym), dtype=int)
    lattice = None
    for i, hs in enumerate(h_strips):
        for j, vs in enumerate(v_strips):
            found = False
            try:
                center = np.asarray(
                    curve_intersection(vs.midline(), hs.midline())
                )
                found = bool(hs.contains(center)) and bool(vs.contains(center))
            except (ValueError, RuntimeError):
                found = False
            if not found:
                if lattice is None:
                    box = geom.box
                    xs = np.linspace(box.xlo, box.xhi, certify_grid)
                    ys = np.linspace(box.ylo, box.yhi, certify_grid)
                    gx, gy = np.meshgrid(xs, ys, indexing="ij")
                    lattice = np.stack([gx.ravel(), gy.ravel()], axis=-1)
                found = bool(np.any(hs.contains(lattice) & vs.contains(lattice)))
            out[i, j] = 1 if found else 0
    return out


def shift_word(it: Itinerary) -> Itinerary:
    """Extended shift: advance the anchor, moving one future symbol
    into the past.

    Raises:
        ValueError: empty future (nothing to shift through).
    """
    if not it.future:
        raise ValueError("cannot shift an itinerary with an empty future")
    return Itinerary(
        base_time=it.base_time + 1,
        past=it.past + (it.future[0],),
        future=it.future[1:],
    )


def unshift_word(it: Itinerary) -> Itinerary:
    """Inverse of shift_word.

    Raises:
        ValueError: empty past.
    """
    if not it.past:
        raise ValueError("cannot unshift an itinerary with an empty past")
    return Itinerary(
        base_time=it.base_time - 1,
        past=it.past[:-1],
        future=(it.past[-1],) + it.future,
    )


def is_admissible(it: Itinerary, matrices: TransitionMatrixSeq) -> bool:
    """Whether every adjacent symbol pair is allowed by the matrices."""
    symbols = it.past + it.future
    start = it.base_time - len(it.past)
    for k in range(len(symbols) - 1):
        if not matrices.allows(start + k, symbols[k], symbols[k + 1]):
            return False
    return True


def enumerate_words(
    matrices: TransitionMatrixSeq,
    base_time: int,
    past_len: int,
    future_len: int,
) -> Iterator[Itinerary]:
    """Admissible itineraries with the given window lengths, in
    lexicographic order of the full symbol tuple."""
    if future_len < 1 or past_len < 0:
        raise ValueError("need future_len >= 1 and past_len >= 0")
    n_sym = matrices.n_symbols
    start = base_time - past_len
    total = past_len + future_len
    for symbols in itertools.product(range(1, n_sym + 1), repeat=total):
        ok = all(
            matrices.allows(start + k, symbols[k], symbols[k + 1])
            for k in range(total - 1)
        )
        if ok:
            yield Itinerary(
                base_time=base_time,
                past=symbols[:past_len],
                future=symbols[past_len:],
            )


def refine_vertical(
    geom,
    seq: MapSequence,
    it: Itinerary,
    samples: int = DEFAULT_REFIT_SAMPLES,
) -> Strip:
    """Vertical strip at the base time selected by the future symbols.

    One future symbol returns the bare strip; each additional symbol
    adds a pullback through the corresponding map.

    Raises:
        ValueError: empty future.
    """
    w = it.future
    if not w:
        raise ValueError("refinement needs at least one future symbol")
    n = it.base_time
    k = len(w) - 1
    strip = geom.v_strips(n + k)[w[k] - 1]
    for m in range(k - 1, -1, -1):
        i = w[m]
        strip = pull_back_vertical(
            seq,
            n + m,
            strip=strip,
            via_h=geom.h_strips(n + m)[i - 1],
            target_v=geom.v_strips(n + m)[i - 1],
            samples=samples,
        )
    return strip


def refine_horizontal(
    geom,
    seq: MapSequence,
    it: Itinerary,
    samples: int = DEFAULT_REFIT_SAMPLES,
) -> Strip:
    """Horizontal strip at the base time selected by the past symbols.

    One past symbol returns the bare strip at the base time; each
    additional symbol adds a push-forward.

    Raises:
        ValueError: empty past.
    """
    p = it.past
    if not p:
        raise ValueError("refinement needs at least one past symbol")
    n = it.base_time
    k = len(p)
    strip = geom.h_strips(n - k)[p[0] - 1]
    for m in range(n - k + 1, n):
        i = p[m - (n - k)]
        strip = push_forward_horizontal(
            seq,
            m,
            strip=strip,
            via_v=geom.v_strips(m)[i - 1],
            target_h=geom.h_strips(m)[i - 1],
            samples=samples,
        )
    return strip


def itinerary_to_point(
    geom,
    seq: MapSequence,
    it: Itinerary,
    samples: int = DEFAULT_REFIT_SAMPLES,
    tol: float = 1e-10,
) -> tuple[Point2, float]:
    """Approximate the orbit point with the given itinerary.

    Refines the vertical strip from the future symbols and the
    horizontal strip from the past symbols, then crosses their
    midlines.  The error bound is the larger of the two final strip
    widths.

    Raises:
        ValueError: past or future empty.
    """
    if not it.past or not it.future:
        raise ValueError(
            "itinerary needs at least one symbol on each side of the anchor"
        )
    v_cell = refine_vertical(geom, seq, it, samples=samples)
    h_cell = refine_horizontal(geom, seq, it, samples=samples)
    point = curve_intersection(v_cell.midline(), h_cell.midline(), tol=tol)
    err = max(strip_width(v_cell), strip_width(h_cell))
    return point, err


def conjugacy_residual(
    geom,
    seq: MapSequence,
    it: Itinerary,
    depth: int,
    samples: int = DEFAULT_REFIT_SAMPLES,
) -> float:
    """Distance between f_n of a word's point and its shifted word's point.

    Truncates the itinerary to depth past symbols and depth + 1 future
    symbols, locates its point, applies f_n, and compares against the
    point of the shifted truncation.  The residual shrinks with the
    refinement cell sizes, which is the numerical trace of the
    conjugacy between the map sequence and the extended shift.

    Raises:
        ValueError: itinerary margins smaller than depth on either side.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if len(it.past) < depth or len(it.future) < depth + 1:
        raise ValueError(
            f"need at least {depth} past and {depth + 1} future symbols, "
            f"got {len(it.past)} and {len(it.future)}"
        )
    trimmed = Itinerary(
        base_time=it.base_time,
        past=it.past[-depth:],
        future=it.future[: depth + 1],
    )
    p1, _ = itinerary_to_point(geom, seq, trimmed, samples=samples)
    p2, _ = itinerary_to_point(geom, seq, shift_word(trimmed), samples=samples)
    image = seq.forward(it.base_time, np.asarray(p1))
    return float(np.hypot(image[0] - p2.x, image[1] - p2.y))
