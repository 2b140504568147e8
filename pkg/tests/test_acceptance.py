"""Acceptance gate: eight end-to-end criteria, one test each.

Every test prints a single pass/fail summary line straight to the
terminal (bypassing capture) so the gate's outcome reads off the run
log even when all tests pass.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from horseshoe import (
    ConeParams,
    Itinerary,
    LipschitzCurve,
    Orientation,
    TransitionMatrixSeq,
    brute_force_survivors,
    build_geometry,
    conjugacy_residual,
    derive_contraction,
    directed_hausdorff,
    enumerate_words,
    intersects_fully,
    measure_contraction,
    refine_vertical,
    sector_threshold,
    strip_separation_check,
    strip_width,
)
from horseshoe.config import RunConfig
from horseshoe.invariant import iter_lambda_points
from horseshoe.report import CLASSICAL_THRESHOLD, run_verification

REL_TOL = 5e-3  # shared tolerance against the rounded reference figures

NU_V = 0.9939286719472479


def _announce(capsys, label: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n{label}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def full_run():
    """Default-parameter verification over the full window, timed."""
    t0 = time.monotonic()
    report = run_verification(RunConfig())
    return report, time.monotonic() - t0


def test_criterion_1_reference_constants(capsys):
    t0 = time.monotonic()
    geom = build_geometry()
    rows = {r.check: r for r in strip_separation_check(geom, 0)}
    mu = 0.615
    # (computed value, rounded reference figure)
    constants = {
        "domain half-width": (geom.r, 4.25),
        "boundary slope bound": (1.0 / (2.0 * math.sqrt(0.9)), 0.527),
        "slope product": (mu * mu, 0.378225),
        "sector threshold": (sector_threshold(mu), 1.1205),
        "outer crossing sup": (rows["xbar2_lt_x2_all_n"].lhs, 3.8699),
        "image corner inf": (rows["xbar2_lt_x2_all_n"].rhs, 3.8887),
        "crossing derivative bound": (rows["d_xbar2_da_star_bound"].rhs, 0.1504),
        "corner derivative bound": (rows["d_x2_da_star_bound"].lhs, 0.8450),
        "contraction headroom": (1.0 - mu * mu, 0.621775),
    }
    bad = [
        name
        for name, (value, ref) in constants.items()
        if abs(value - ref) / abs(ref) > REL_TOL
    ]
    elapsed = time.monotonic() - t0
    ok = not bad and elapsed < 1.0
    _announce(
        capsys, "criterion 1", ok,
        f"{len(constants)} reference constants within {REL_TOL:g} relative "
        f"in {elapsed:.2f} s" + (f"; out of tolerance: {bad}" if bad else ""),
    )
    assert not bad, f"constants out of tolerance: {bad}"
    assert elapsed < 1.0


def test_criterion_2_full_window_verification(full_run, capsys):
    report, elapsed = full_run
    ok = (
        report.overall_pass
        and report.failures == ()
        and all(s.a1 is not None and s.a1.passed for s in report.steps)
        and report.min_sector_margin() > 0.0
        and report.min_expansion_ratio() > 1.0
        and report.nu_v is not None
        and report.nu_v < 1.0
        and elapsed < 60.0
    )
    _announce(
        capsys, "criterion 2", ok,
        f"window [-100, 100] at grid 256 in {elapsed:.1f} s; "
        f"min sector margin {report.min_sector_margin():.6f}, "
        f"min stretch ratio {report.min_expansion_ratio():.6f}, "
        f"nu_v {report.nu_v:.6f}" if report.nu_v is not None else "nu_v missing",
    )
    assert report.overall_pass
    assert report.failures == ()
    assert all(s.a1 is not None and s.a1.passed for s in report.steps)
    assert report.min_sector_margin() > 0.0
    assert report.min_expansion_ratio() > 1.0
    assert report.nu_v is not None and report.nu_v < 1.0
    assert elapsed < 60.0


def test_criterion_3_below_classical_threshold_remark(full_run, capsys):
    report, _ = full_run
    geom = build_geometry()
    ok = (
        report.overall_pass
        and report.min_a < CLASSICAL_THRESHOLD
        and float(geom.a(3)) < CLASSICAL_THRESHOLD
        and report.remark_flag
    )
    _announce(
        capsys, "criterion 3", ok,
        f"min A(n) = {report.min_a:.9f} at n = {report.min_a_arg} lies "
        f"below 5 + 2*sqrt(5) = {CLASSICAL_THRESHOLD:.9f} while every "
        "check passes",
    )
    assert report.min_a < CLASSICAL_THRESHOLD
    assert float(geom.a(3)) < CLASSICAL_THRESHOLD
    assert report.overall_pass
    assert report.remark_flag


def test_criterion_4_transition_matrices_all_ones(full_run, capsys):
    report, _ = full_run
    all_ones = report.transition_all_ones()
    explicit = all(s.matrix == ((1, 1), (1, 1)) for s in report.steps)
    ok = all_ones and explicit
    _announce(
        capsys, "criterion 4", ok,
        f"all {len(report.steps)} scanned transition matrices equal "
        "[[1,1],[1,1]] by crossing certification",
    )
    assert all_ones and explicit


def test_criterion_5_conjugacy_residuals(capsys):
    geom = build_geometry()
    seq = geom.seq
    rng = np.random.default_rng(20260814)
    t0 = time.monotonic()
    worst = 0.0
    for _ in range(100):
        symbols = rng.integers(1, 3, size=17)
        it = Itinerary(
            0,
            tuple(int(s) for s in symbols[:8]),
            tuple(int(s) for s in symbols[8:]),
        )
        worst = max(worst, conjugacy_residual(geom, seq, it, depth=8))
    elapsed = time.monotonic() - t0

    threshold = 1e-6
    detail = (
        f"100 random depth-8 words, max residual {worst:.3e} < "
        f"{threshold:g} in {elapsed:.1f} s"
    )
    if worst >= threshold:
        # Fallback clause: rescale to the measured per-level width
        # contraction and report it.
        ratio = max(
            measure_contraction(seq, geom, n, depth=2).max_ratio
            for n in (-2, -1, 0, 1, 2)
        )
        threshold = ratio**8 * 2.0 * geom.r
        detail = (
            f"100 random depth-8 words, max residual {worst:.3e}; "
            f"measured contraction {ratio:.4f} gives fallback tolerance "
            f"{threshold:.3e}; elapsed {elapsed:.1f} s"
        )
    ok = worst < threshold and elapsed < 120.0
    _announce(capsys, "criterion 5", ok, detail)
    assert worst < threshold
    assert elapsed < 120.0


def test_criterion_6_brute_force_oracle(capsys):
    geom = build_geometry()
    seq = geom.seq
    survivor_grid = 2048
    t0 = time.monotonic()
    coords = []
    max_err = 0.0
    for pt in iter_lambda_points(geom, seq, 0, 6):
        coords.append((pt.x, pt.y))
        max_err = max(max_err, pt.err_bound)
    coords = np.array(coords)
    cloud = brute_force_survivors(geom, seq, 0, 6, grid=survivor_grid)
    d_sym = directed_hausdorff(coords, cloud.points)
    d_sur = directed_hausdorff(cloud.points, coords)
    elapsed = time.monotonic() - t0
    threshold = 2.0 * (cloud.extent / survivor_grid) + max_err
    ok = d_sym < threshold and d_sur < threshold and elapsed < 300.0
    _announce(
        capsys, "criterion 6", ok,
        f"depth-6 cloud ({len(coords)} points) vs k=6 survivors "
        f"({len(cloud.points)} points): {d_sym:.6f} / {d_sur:.6f} both "
        f"below {threshold:.6f} in {elapsed:.1f} s",
    )
    assert d_sym < threshold
    assert d_sur < threshold
    assert elapsed < 300.0


def test_criterion_7_randomized_property_volume(capsys):
    geom = build_geometry()
    seq = geom.seq
    rng = np.random.default_rng(7)
    cases = 0

    # Forward/inverse round-trips across the window.
    pts = rng.uniform(-geom.r, geom.r, size=(4000, 2))
    ns = rng.integers(-50, 51, size=40)
    for i, n in enumerate(ns):
        block = pts[i * 100 : (i + 1) * 100]
        back = seq.inverse(int(n), seq.forward(int(n), block))
        assert np.max(np.abs(back - block)) < 1e-9
    cases += 4000

    # Area preservation of the differential.
    pts = rng.uniform(-geom.r, geom.r, size=(4000, 2))
    jac = seq.jacobian(0, pts)
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    assert np.max(np.abs(det - 1.0)) < 1e-11
    cases += 4000

    # Membership consistency both ways, on strict-interior points.
    pts = rng.uniform(-geom.r, geom.r, size=(3000, 2))
    fwd = pts[geom.in_cal_v(0, pts, tol=-1e-6)]
    assert fwd.size > 0
    assert np.all(geom.in_cal_h(0, seq.forward(0, fwd)))
    bwd = pts[geom.in_cal_h(0, pts, tol=-1e-6)]
    assert bwd.size > 0
    assert np.all(geom.in_cal_v(0, seq.inverse(0, bwd)))
    cases += 3000

    # Lipschitz audits of random piecewise-linear curves never exceed
    # the declared bound when it is set to the true maximum slope.
    for _ in range(200):
        t = np.sort(rng.uniform(-1.0, 1.0, size=8))
        t[0], t[-1] = -1.0, 1.0
        v = rng.uniform(-1.0, 1.0, size=8)
        bound = float(np.max(np.abs(np.diff(v) / np.diff(t))))
        curve = LipschitzCurve.from_samples(
            Orientation.VERTICAL, t, v, max(bound, 1e-9)
        )
        assert curve.audit_lipschitz() <= max(bound, 1e-9) + 1e-9
    cases += 200

    # Random-word refinements nest and contract by at least nu_v.
    for _ in range(24):
        word = tuple(int(s) for s in rng.integers(1, 3, size=4))
        n = int(rng.integers(-20, 21))
        strips = [
            refine_vertical(geom, seq, Itinerary(n, (), word[: k + 1]))
            for k in range(4)
        ]
        for inner, outer in zip(strips[1:], strips):
            assert intersects_fully(inner, outer)
            assert strip_width(inner) / strip_width(outer) <= NU_V
    cases += 24

    # Word counts for the full shift (deterministic, not counted).
    m = TransitionMatrixSeq.full(2)
    for total in range(1, 13):
        assert sum(1 for _ in enumerate_words(m, 0, 0, total)) == 2**total

    ok = cases >= 10_000
    _announce(
        capsys, "criterion 7", ok,
        f"{cases} randomized property evaluations green (round-trips, "
        "det = 1, membership, slope audits, nesting / contraction), "
        "plus exhaustive word counts to length 12",
    )
    assert cases >= 10_000


def test_criterion_8_negative_controls(capsys):
    # Control 1: a_star = 8.0 breaks the strip separation inequalities
    # and degenerates the strip geometry.
    rep_a = run_verification(RunConfig(a_star=8.0, n_min=2, n_max=2))
    ctrl_a = (
        not rep_a.overall_pass
        and any(f.startswith("inequality xbar2_lt_x2 at n=2:") for f in rep_a.failures)
        and any(f.startswith("inequality a_exceeds_2r at n=2:") for f in rep_a.failures)
        and any(
            f.startswith("step n=2: DegenerateGeometryError:")
            for f in rep_a.failures
        )
    )

    # Control 2: mu_h = mu_v = 0.5 is too narrow for the cone sweep at
    # the default lattice resolution.
    rep_b = run_verification(RunConfig(mu_h=0.5, mu_v=0.5, n_min=0, n_max=0))
    ctrl_b = (
        not rep_b.overall_pass
        and any(f.startswith("cone sweep (A3) failed at n=0:") for f in rep_b.failures)
        and any(
            f.startswith("sector threshold failed at n=0:")
            for f in rep_b.failures
        )
    )

    # Control 3: mu = 0.615 leaves no contraction headroom.
    with pytest.raises(ValueError, match="mu must exceed mu_v"):
        derive_contraction(ConeParams(mu=0.615))
    rep_c = run_verification(RunConfig(mu=0.615, n_min=0, n_max=0))
    ctrl_c = not rep_c.overall_pass and rep_c.failures == (
        "contraction bound: mu must exceed mu_v: mu = 0.615 <= mu_v = 0.615",
    )

    ok = ctrl_a and ctrl_b and ctrl_c
    _announce(
        capsys, "criterion 8", ok,
        "negative controls rejected with named inequalities: "
        f"a_star=8.0 {'ok' if ctrl_a else 'MISSED'}, "
        f"mu_h=mu_v=0.5 {'ok' if ctrl_b else 'MISSED'}, "
        f"mu=0.615 {'ok' if ctrl_c else 'MISSED'}",
    )
    assert ctrl_a, rep_a.failures
    assert ctrl_b, rep_b.failures
    assert ctrl_c, rep_c.failures
