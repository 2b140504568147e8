"""Tests for the invariant-set approximation: word-tree point clouds,
lattice survivor clouds, and the Hausdorff comparison between them."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.spatial.distance import pdist

from horseshoe import (
    Itinerary,
    LambdaApproximation,
    TransitionMatrixSeq,
    approximate_lambda,
    brute_force_survivors,
    directed_hausdorff,
    itinerary_to_point,
    shift_word,
)
from horseshoe.invariant import iter_lambda_points


class TestApproximateLambda:
    def test_word_count_at_depth(self, geom, seq):
        # depth past symbols, depth + 1 future symbols, 2 symbols each.
        for depth in (1, 2, 3):
            lam = approximate_lambda(geom, seq, 0, depth)
            assert len(lam.points) == 2 ** (2 * depth + 1)
            assert lam.depth == depth and lam.n == 0

    def test_points_inside_strip_unions(self, geom, seq):
        lam = approximate_lambda(geom, seq, 0, 3)
        c = lam.coords()
        assert np.all(np.abs(c) < geom.r)
        assert np.all(geom.in_v_union(0, c))
        assert np.all(geom.in_h_union(-1, c))
        assert np.all(geom.in_cal_v(0, c))

    def test_words_lexicographic_and_anchored(self, geom, seq):
        lam = approximate_lambda(geom, seq, 0, 2)
        words = [p.word for p in lam.points]
        assert words == sorted(words)
        assert words[0] == "11.111"
        assert words[-1] == "22.222"
        assert all(p.n == 0 for p in lam.points)

    def test_max_err_bound_shrinks_with_depth(self, geom, seq):
        errs = [
            approximate_lambda(geom, seq, 0, d).max_err_bound
            for d in (1, 2, 3, 4)
        ]
        assert errs == sorted(errs, reverse=True)
        # The depth-1 bound is the bare horizontal strip width; deeper
        # words contract hard.
        assert errs[0] == pytest.approx(2.069929566895338, rel=1e-9)
        assert errs[1] == pytest.approx(0.5289439669845986, rel=1e-9)
        assert errs[2] == pytest.approx(0.11977937370871294, rel=1e-9)
        assert errs[3] == pytest.approx(0.028787763199457972, rel=1e-6)

    def test_points_pairwise_distinct(self, geom, seq):
        # Distinct words resolve to distinct points at every depth the
        # cloud is small enough to compare exhaustively.
        for depth, floor in ((2, 0.09), (3, 0.012)):
            lam = approximate_lambda(geom, seq, 0, depth)
            assert float(pdist(lam.coords()).min()) > floor

    def test_streaming_matches_materialized(self, geom, seq):
        streamed = list(iter_lambda_points(geom, seq, 0, 2))
        lam = approximate_lambda(geom, seq, 0, 2)
        assert tuple(streamed) == lam.points

    def test_depth_validated(self, geom, seq):
        with pytest.raises(ValueError):
            approximate_lambda(geom, seq, 0, 0)

    def test_empty_cloud_err_bound(self):
        lam = LambdaApproximation(n=0, depth=1, points=())
        assert lam.max_err_bound == 0.0


class TestEquivariance:
    def test_forward_map_matches_shifted_words(self, geom, seq):
        # f_0 of each depth-2 point lands within the summed error
        # bounds of its shifted word's point at time 1.
        lam = approximate_lambda(geom, seq, 0, 2)
        for p in lam.points:
            shifted = shift_word(Itinerary.from_word(p.word))
            q, err_q = itinerary_to_point(geom, seq, shifted)
            img = seq.forward(0, np.array([p.x, p.y]))
            dist = float(np.hypot(img[0] - q.x, img[1] - q.y))
            assert dist <= p.err_bound + err_q


class TestRestrictedMatrices:
    def test_golden_mean_counts(self, geom, seq):
        # Forbidding 2 -> 1 keeps the words 1^a 2^b: word length + 1.
        gm = TransitionMatrixSeq.constant(np.array([[1, 1], [0, 1]]))
        for depth in (2, 3, 4):
            lam = approximate_lambda(geom, seq, 0, depth, matrices=gm)
            assert len(lam.points) == 2 * depth + 2

    def test_restriction_only_prunes(self, geom, seq):
        # Surviving words must resolve to exactly the same coordinates
        # as in the unrestricted run.
        gm = TransitionMatrixSeq.constant(np.array([[1, 1], [0, 1]]))
        full = {p.word: p for p in approximate_lambda(geom, seq, 0, 2).points}
        for p in approximate_lambda(geom, seq, 0, 2, matrices=gm).points:
            assert (full[p.word].x, full[p.word].y) == (p.x, p.y)


class TestBruteForceSurvivors:
    def test_strict_slack_matches_closed_form_membership(self, geom, seq):
        # k = 0 with zero slack is exactly the lattice restricted to
        # the vertical union at time 0 and the horizontal union coming
        # from the time -1 map.
        cloud = brute_force_survivors(geom, seq, 0, 0, grid=256, slack=0.0)
        xs = np.linspace(geom.box.xlo, geom.box.xhi, 256)
        gx, gy = np.meshgrid(xs, xs, indexing="ij")
        pts = np.stack([gx.ravel(), gy.ravel()], axis=-1)
        mask = geom.in_v_union(0, pts) & geom.in_h_union(-1, pts)
        assert int(mask.sum()) == 8013
        assert np.array_equal(cloud.points, pts[mask])

    def test_counts_fall_with_k(self, geom, seq):
        counts = [
            len(brute_force_survivors(geom, seq, 0, k, grid=256).points)
            for k in (0, 1, 2, 3)
        ]
        assert counts == [8767, 1674, 698, 603]
        assert counts == sorted(counts, reverse=True)

    def test_spacing(self, geom, seq):
        cloud = brute_force_survivors(geom, seq, 0, 0, grid=128)
        assert cloud.spacing == (geom.box.xhi - geom.box.xlo) / 127

    def test_validation(self, geom, seq):
        with pytest.raises(ValueError):
            brute_force_survivors(geom, seq, 0, -1)
        with pytest.raises(ValueError):
            brute_force_survivors(geom, seq, 0, 1, grid=1)


class TestDirectedHausdorff:
    def test_identical_clouds(self):
        pts = np.array([[0.0, 0.0], [1.0, 2.0], [-3.0, 0.5]])
        assert directed_hausdorff(pts, pts) == 0.0

    def test_single_points(self):
        a = np.array([[0.0, 0.0]])
        b = np.array([[3.0, 4.0]])
        assert directed_hausdorff(a, b) == 5.0

    def test_asymmetry(self):
        a = np.array([[0.0, 0.0]])
        b = np.array([[0.0, 0.0], [10.0, 0.0]])
        assert directed_hausdorff(a, b) == 0.0
        assert directed_hausdorff(b, a) == 10.0

    def test_empty_rejected(self):
        pts = np.array([[0.0, 0.0]])
        with pytest.raises(ValueError):
            directed_hausdorff(pts, np.empty((0, 2)))
        with pytest.raises(ValueError):
            directed_hausdorff(np.empty((0, 2)), pts)


class TestTwoRouteAgreement:
    def test_word_cloud_near_survivor_cloud(self, geom, seq):
        # Small-scale version of the oracle comparison: both routes
        # approximate the same set, so each directed distance stays
        # below lattice resolution plus the word error bound.
        lam = approximate_lambda(geom, seq, 0, 3)
        sur = brute_force_survivors(geom, seq, 0, 2, grid=512)
        thr = 2.0 * (geom.box.xhi - geom.box.xlo) / 512 + lam.max_err_bound
        assert directed_hausdorff(lam.coords(), sur.points) < thr
        assert directed_hausdorff(sur.points, lam.coords()) < thr
