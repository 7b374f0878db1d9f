#!/usr/bin/env python3
"""
Tests for limit fitting, trend classification and the content estimators.
"""

import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from minkowski_content.convex_bodies import StructuringElement
from minkowski_content.errors import ConfigError
from minkowski_content.estimators import (
    CONVERGING,
    DIVERGING,
    INCONCLUSIVE,
    REPORT_COLUMNS,
    EstimatorSettings,
    RSchedule,
    afp_check,
    afp_samples,
    build_report,
    classify_trend,
    fit_limit,
    isotropic_afp_sequence,
    lower_bound_holds,
    minkowski_content,
    oracle_agreement,
    outer_content,
    packing_content,
    packing_excess,
    packing_excess_hit_or_miss,
    segment_outer_exact,
)
from minkowski_content.generators import DEFAULT_COUNT_CAP, DESK_LAWS, BallPacking, gen_packing, packing_summary, predicted_count
from minkowski_content.oracles import analytic_excess
from minkowski_content.shapes import BoxShape, PolygonShape, SheetShape
from minkowski_content.surface_measures import polygon_surface_measure
from minkowski_content.voxel_sets import rasterize

H = 1.0 / 256
B2 = StructuringElement.unit_ball(2)
B3 = StructuringElement.unit_ball(3)
DISK_XY = StructuringElement.planar_disk([[1, 0, 0], [0, 1, 0]])
PLANE_XY = [[1, 0, 0], [0, 1, 0]]


@pytest.fixture(scope="module")
def planar_packing():
    return gen_packing(2, DESK_LAWS[2], 0.7, seed=0, max_rejections=5000, audit_probes=1000)


@pytest.fixture(scope="module")
def spatial_packing():
    return gen_packing(3, DESK_LAWS[3], 0.75, seed=0, max_rejections=2000, audit_probes=500)


# ----------------------------------------------------------------------
# Schedules, fits and trends
# ----------------------------------------------------------------------


def test_schedule_validation():
    with pytest.raises(ConfigError):
        RSchedule(())
    with pytest.raises(ConfigError):
        RSchedule((0.1, 0.2))
    with pytest.raises(ConfigError):
        RSchedule((0.1, -0.1))
    sched = RSchedule.geometric(0.3, 0.05, 12)
    assert len(sched) == 12
    assert sched.r_max == pytest.approx(0.3)
    assert sched.r_min == pytest.approx(0.05)
    assert RSchedule.geometric(1.0, count=3, ratio=0.5).r_values == (1.0, 0.5, 0.25)


def test_schedule_resolution_and_snapping():
    sched = RSchedule((0.1, 0.099, 0.05))
    assert sched.snapped(0.01).r_values == pytest.approx((0.1, 0.05))
    with pytest.raises(ConfigError, match="8·h"):
        sched.check_resolution(0.01)
    RSchedule((0.1, 0.08)).check_resolution(0.01)


def test_fit_limit_recovers_affine_data():
    rs = np.array([0.4, 0.2, 0.1, 0.05])
    c0, c1, c2, residual = fit_limit(rs, 2.0 + 3.0 * rs)
    assert c0 == pytest.approx(2.0)
    assert c1 == pytest.approx(3.0)
    assert c2 == 0.0
    assert residual == pytest.approx(0.0, abs=1e-12)
    c0, c1, c2, _ = fit_limit(rs, 1.0 - rs + 5 * rs**2, model="quadratic")
    assert (c0, c1, c2) == pytest.approx((1.0, -1.0, 5.0))
    assert fit_limit([0.1], [7.0])[0] == 7.0


def test_classify_trend():
    settings = EstimatorSettings()
    trend, reason, growth = classify_trend([1, 2, 3, 4, 5, 6], 0.0, 1.0, settings)
    assert (trend, reason, growth) == (DIVERGING, "monotone growth", 6.0)
    assert classify_trend([4.1, 4.05, 4.02, 4.01], 4.0, 0.01, settings)[0] == CONVERGING
    assert classify_trend([1, 3, 1, 3, 1, 3], 2.0, 1.0, settings)[:2] == (INCONCLUSIVE, "oscillating")
    # growth below growth_min is not divergence
    assert classify_trend([1.0, 1.1, 1.2, 1.3, 1.4, 1.5], 1.6, 0.5, settings)[:2] == (INCONCLUSIVE, "unresolved")
    assert classify_trend([0.0, 1.0], 0.0, 0.0, settings)[2] == math.inf


def test_settings_validation():
    with pytest.raises(ConfigError):
        EstimatorSettings(model="cubic")
    with pytest.raises(ConfigError):
        EstimatorSettings(monotone_window=1)
    assert EstimatorSettings().to_dict()["growth_min"] == 2.0


def test_report_rows_and_dict():
    report = build_report([0.2, 0.1], [0.4, 0.2], [2.0, 2.0], EstimatorSettings(), {"note": "x"})
    assert list(report.rows()[0]) == REPORT_COLUMNS
    as_dict = report.to_dict()
    assert as_dict["note"] == "x"
    assert as_dict["fit"]["c0"] == pytest.approx(2.0)
    assert report.trend == CONVERGING


# ----------------------------------------------------------------------
# Grid estimators
# ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def square_report():
    A = rasterize(BoxShape([0, 0], [1, 1]), ([-0.5, -0.5], [1.5, 1.5]), H)
    sched = RSchedule.geometric(0.25, 1 / 32, 6).snapped(H)
    return outer_content(A, B2, sched)


def test_outer_content_of_square(square_report):
    assert square_report.trend == CONVERGING
    assert square_report.c0 == pytest.approx(4.0, rel=0.02)
    assert lower_bound_holds(square_report, 4.0, H)
    ok, worst = oracle_agreement(square_report, lambda r: analytic_excess("square", "ball", r), H)
    assert ok
    assert worst < 0.02


def test_outer_content_along_segment():
    A = rasterize(BoxShape([0, 0], [1, 1]), ([-0.5, -0.5], [1.5, 1.5]), H)
    sched = RSchedule.geometric(0.25, 1 / 32, 5).snapped(H)
    report = outer_content(A, StructuringElement.segment([0, 0], [1, 0]), sched)
    assert np.allclose(report.fs, 1.0)
    assert report.c0 == pytest.approx(1.0)
    exact = segment_outer_exact(polygon_surface_measure([[0, 0], [1, 0], [1, 1], [0, 1]]), [1, 0])
    assert exact == pytest.approx(1.0)


def test_outer_content_along_oblique_segments():
    h = 1.0 / 512
    rng = np.random.default_rng(5)
    sched = RSchedule.geometric(1 / 8, 1 / 16, 3).snapped(h)
    for _ in range(3):
        points = rng.uniform(0.2, 0.8, size=(12, 2))
        shape = PolygonShape(points[ConvexHull(points).vertices])
        angle = rng.uniform(0.0, 2.0 * math.pi)
        u = np.array([math.cos(angle), math.sin(angle)])
        grid = rasterize(shape, ([-0.2, -0.2], [1.2, 1.2]), h)
        report = outer_content(grid, StructuringElement.segment([0, 0], u), sched)
        exact = segment_outer_exact(shape.surface_measure(), u)
        assert report.c0 == pytest.approx(exact, rel=0.02)


def test_outer_content_rejects_coarse_grid():
    A = rasterize(BoxShape([0, 0], [1, 1]), ([-0.5, -0.5], [1.5, 1.5]), 1 / 64)
    with pytest.raises(ConfigError):
        outer_content(A, B2, RSchedule((0.25, 0.1)))


def test_minkowski_content_of_circle():
    h = 1.0 / 512
    E = rasterize(SheetShape("circle", center=[0, 0], radius=0.5), ([-0.75, -0.75], [0.75, 0.75]), h)
    sched = RSchedule.geometric(0.25, 1 / 16, 5).snapped(h)
    report = minkowski_content(E, B2, sched)
    assert report.trend == CONVERGING
    assert report.c0 == pytest.approx(math.pi, rel=0.03)
    assert report.extra["sheet_volume"] == pytest.approx(E.volume())


def test_minkowski_content_rejects_solids():
    A = rasterize(BoxShape([0, 0], [1, 1]), ([-0.1, -0.1], [1.1, 1.1]), 1 / 64)
    with pytest.raises(ValueError, match="sheet"):
        minkowski_content(A, B2, RSchedule((0.25, 0.125)))


CIRCLE_BOX = ([-0.75, -0.75], [0.75, 0.75])
LATTICE_RADII = RSchedule((16 * H, 12 * H, 8 * H))


def test_minkowski_content_of_a_translate_is_zero():
    E = rasterize(SheetShape("circle", center=[0, 0], radius=0.5), CIRCLE_BOX, H)
    report = minkowski_content(E, StructuringElement.singleton([0.5, 0.0]), LATTICE_RADII)
    assert np.all(report.fs == 0.0)
    assert all(s["excess"] == 0.0 for s in report.samples)


def test_minkowski_content_is_translation_invariant_in_q():
    E = rasterize(SheetShape("circle", center=[0, 0], radius=0.5), CIRCLE_BOX, H)
    centered = minkowski_content(E, B2, LATTICE_RADII)
    shifted = minkowski_content(E, StructuringElement.ball([0.5, 0.0], 1.0), LATTICE_RADII)
    assert shifted.fs == pytest.approx(centered.fs, rel=1e-12)
    assert np.all(centered.fs > 0)


def test_outer_content_is_thread_deterministic():
    A = rasterize(BoxShape([0, 0], [1, 1]), ([-0.5, -0.5], [1.5, 1.5]), 1 / 128)
    sched = RSchedule.geometric(0.25, 1 / 16, 4).snapped(1 / 128)
    serial = outer_content(A, B2, sched)
    threaded = outer_content(A, B2, sched, EstimatorSettings(threads=4))
    assert serial.samples == threaded.samples


# ----------------------------------------------------------------------
# Packings
# ----------------------------------------------------------------------


def test_packing_excess_of_isolated_bodies():
    P = BallPacking([[0.5, 0, 0]], [0.2], [0.05], 3)
    r = 0.1
    assert packing_excess(P, B3, r) == pytest.approx(4 * math.pi / 3 * (0.15**3 - 0.05**3))
    assert packing_excess(P, DISK_XY, r) == pytest.approx(math.pi**2 * 0.05**2 * r + 2 * math.pi * 0.05 * r**2)
    assert packing_excess(P, B3, 0.0) == 0.0
    assert packing_excess(BallPacking.empty(3), B3, r) == 0.0


def test_packing_excess_of_overlapping_bodies():
    P = BallPacking([[0.3, 0.0], [0.4, 0.0]], [0.04, 0.04], [0.01, 0.01], 2)
    r = 0.1
    R, d = 0.11, 0.1
    lens = 2 * R**2 * math.acos(d / (2 * R)) - (d / 2) * math.sqrt(4 * R**2 - d**2)
    exact = 2 * math.pi * R**2 - lens - 2 * math.pi * 0.01**2
    estimate = packing_excess(P, B2, r, samples_per_ball=20_000, seed=1)
    assert estimate == pytest.approx(exact, rel=0.02)
    assert packing_excess(P, B2, r, samples_per_ball=64, seed=3) == packing_excess(P, B2, r, samples_per_ball=64, seed=3)


def test_hit_or_miss_for_a_centered_ball():
    P = BallPacking([[0.0, 0.0, 0.0]], [0.2], [0.05], 3)
    r = 0.1
    exact = 4 * math.pi / 3 * (0.15**3 - 0.05**3)
    assert packing_excess_hit_or_miss(P, B3, r, samples=10_000) == pytest.approx(exact, rel=1e-3)
    assert packing_excess_hit_or_miss(P, B3, 0.0) == 0.0
    with pytest.raises(ValueError, match="full ball"):
        packing_excess_hit_or_miss(P, DISK_XY, r)


def test_hit_or_miss_matches_lens_area():
    P = BallPacking([[0.3, 0.0], [0.4, 0.0]], [0.04, 0.04], [0.01, 0.01], 2)
    R, d = 0.11, 0.1
    lens = 2 * R**2 * math.acos(d / (2 * R)) - (d / 2) * math.sqrt(4 * R**2 - d**2)
    exact = 2 * math.pi * R**2 - lens - 2 * math.pi * 0.01**2
    estimate = packing_excess_hit_or_miss(P, B2, 0.1, samples=400_000, seed=2)
    assert estimate == pytest.approx(exact, rel=0.03)


def test_packing_estimator_rejects_other_elements():
    P = BallPacking([[0.5, 0, 0]], [0.2], [0.05], 3)
    with pytest.raises(ValueError):
        packing_excess(P, StructuringElement.segment([0, 0, 0], [1, 0, 0]), 0.1)
    with pytest.raises(ValueError):
        packing_excess(P, B2, 0.1)


def test_planar_packing_diverges(planar_packing):
    sched = RSchedule.geometric(0.3, 0.05, 12)
    report = packing_content(planar_packing, B2, sched, samples_per_ball=8, seed=0)
    assert report.trend == DIVERGING
    assert report.growth_ratio >= 2.0
    assert np.all(np.diff(report.fs) > 0)


def test_planar_packing_diverges_by_hit_or_miss(planar_packing):
    sched = RSchedule.geometric(0.3, 0.05, 12)
    report = packing_content(planar_packing, B2, sched, method="hit_or_miss", samples=200_000)
    assert report.trend == DIVERGING
    assert report.extra["estimator"] == "hit_or_miss"
    with pytest.raises(ValueError):
        packing_content(planar_packing, B2, sched, method="voxels")


def test_spatial_packing_converges_under_planar_disk(spatial_packing):
    sched = RSchedule.geometric(0.025, 0.001, 8)
    report = packing_content(spatial_packing, DISK_XY, sched)
    expected = packing_summary(spatial_packing).P_disk
    assert expected == pytest.approx(math.pi**2 * math.fsum(spatial_packing.rhos**2))
    assert report.trend == CONVERGING
    assert report.c0 == pytest.approx(expected, rel=1e-6)


# ----------------------------------------------------------------------
# AFP condition
# ----------------------------------------------------------------------


def test_afp_for_a_lone_sphere():
    P = BallPacking([[0.5, 0, 0]], [0.2], [0.1], 3)
    r = 0.05
    iso = afp_check(P, PLANE_XY, [([0.6, 0, 0], r)], isotropic=True)
    assert iso.samples[0]["nu"] == pytest.approx(math.pi * r**2 / 0.1)
    assert iso.gamma_hat == pytest.approx(math.pi / 0.1)
    rel = afp_check(P, PLANE_XY, [([0.6, 0, 0], r)])
    assert rel.samples[0]["proj"] == pytest.approx(2 * r)
    assert rel.gamma_hat == pytest.approx(math.pi / (2 * 0.1))
    assert rel.passed
    assert rel.to_dict()["pass"] is True


def test_afp_input_errors():
    P = BallPacking([[0.5, 0, 0]], [0.2], [0.1], 3)
    with pytest.raises(ValueError, match="not on any sphere"):
        afp_check(P, PLANE_XY, [([0.55, 0, 0], 0.1)])
    with pytest.raises(ValueError):
        afp_check(P, PLANE_XY, [([0.6, 0, 0], 1.5)])
    with pytest.raises(ValueError):
        afp_check(P, [[1, 0, 0], [2, 0, 0]], [([0.6, 0, 0], 0.1)])
    with pytest.raises(ValueError):
        afp_check(BallPacking.empty(3), PLANE_XY, [])
    with pytest.raises(ValueError):
        isotropic_afp_sequence(BallPacking.empty(3))


def test_isotropic_afp_ratio_decays_toward_origin():
    j = np.arange(5)
    centers = np.column_stack([4.0**-j, np.zeros(5), np.zeros(5)])
    P = BallPacking(centers, 4.0**-j / 4, 4.0 ** (-3 * j) / 8, 3, None, 0.001, 1.0)
    samples = isotropic_afp_sequence(P, 5)
    assert len(samples) == 5
    report = afp_check(P, PLANE_XY, samples, isotropic=True)
    ratios = [row["ratio"] for row in report.samples]
    assert np.all(np.diff(ratios) < 0)
    assert ratios[-1] < ratios[0] / 5


def test_isotropic_afp_drop_is_bounded_by_the_packed_span(spatial_packing):
    # ν(B(a, r))/r² ≈ 4π·(packing fraction)·r for ρ = δ³, so the drop along
    # a → 0 is at most the span of ‖a‖ the packing covers
    samples = isotropic_afp_sequence(spatial_packing, 8)
    report = afp_check(spatial_packing, PLANE_XY, samples, isotropic=True)
    ratios = np.array([row["ratio"] for row in report.samples])
    norms = np.array([2.0 * r for _, r in samples])
    assert norms.max() / norms.min() < 1.01 / spatial_packing.t_min
    assert ratios[0] / ratios[-1] < 5
    # a ×5 span below t_min = 0.75 needs more balls than the generator accepts
    assert predicted_count(3, DESK_LAWS[3], spatial_packing.t_min / 5) > DEFAULT_COUNT_CAP


def test_afp_on_generated_packing(spatial_packing):
    samples = afp_samples(spatial_packing, 200, seed=0)
    assert len(samples) >= 200
    assert all(0 < r < 1 for _, r in samples)
    report = afp_check(spatial_packing, PLANE_XY, samples)
    assert report.passed
    assert report.gamma_hat > 0
