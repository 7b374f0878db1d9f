#!/usr/bin/env python3
"""
Tests for δ laws, ball packings and the product / three-copies scenes.
"""

import math

import numpy as np
import pytest

from minkowski_content.errors import ResourceCapError
from minkowski_content.estimators import CONVERGING, RSchedule
from minkowski_content.generators import (
    DESK_LAWS,
    BallPacking,
    DeltaLaw,
    ThreeCopiesScene,
    check_packing,
    disk_perimeter_via_measures,
    gen_example1,
    gen_example2,
    gen_packing,
    load_packing,
    packing_summary,
    predicted_count,
    save_packing,
)
from minkowski_content.voxel_sets import rasterize

PLANAR = BallPacking([[0.5, 0.0], [0.0, 0.6], [-0.7, 0.0]], [0.05] * 3, [0.0025] * 3, 2)
SPATIAL = BallPacking([[0.5, 0, 0], [0, 0.5, 0], [0, 0, -0.8]], [0.1, 0.1, 0.1], [0.01, 0.02, 0.03], 3)


@pytest.fixture(scope="module")
def small_packing():
    return gen_packing(2, DESK_LAWS[2], 0.8, seed=0, max_rejections=2000, audit_probes=500)


# ----------------------------------------------------------------------
# δ laws
# ----------------------------------------------------------------------


def test_power_law():
    law = DeltaLaw.power(4)
    assert law.delta(1.0) == pytest.approx(1 / 128)
    assert law.delta(0.5) == pytest.approx(0.5**4 / 128)
    # linear continuation past t = 1 stays continuous
    assert law.delta(1.0 + 1e-9) == pytest.approx(law.delta(1.0), abs=1e-9)
    assert law.inverse(law.delta(0.3)) == pytest.approx(0.3)
    assert law.inverse(1.0) == 1.0
    assert law.lipschitz() == pytest.approx(1 / 32)
    assert law.delta(np.array([0.0, 1.0])).tolist() == pytest.approx([0.0, 1 / 128])


def test_exp_law():
    law = DeltaLaw.exp(0.05)
    assert law.delta(0.0) == 0.0
    assert law.delta(0.5) == pytest.approx(0.05 * math.exp(-2))
    assert law.inverse(law.delta(0.4)) == pytest.approx(0.4, rel=1e-6)
    law.check(3)


def test_law_round_trip_and_checks(caplog):
    for law in (DeltaLaw.power(5, 2.0), DeltaLaw.exp(0.1)):
        assert DeltaLaw.from_dict(law.to_dict()) == law
    with pytest.raises(ValueError):
        DeltaLaw("cubic")
    with pytest.raises(ValueError):
        DeltaLaw.power(3).check(3)
    with pytest.raises(ValueError):
        DeltaLaw.power(5).check(4)
    DESK_LAWS[2].check(2)
    assert "Lipschitz" in caplog.text
    assert DESK_LAWS[2].lipschitz() == pytest.approx(0.06)
    assert DESK_LAWS[3].lipschitz() == pytest.approx(0.4)


def test_predicted_count():
    law = DeltaLaw.power(4)
    assert predicted_count(3, law, 0.5, 0.5) == 0.0
    assert predicted_count(3, law, 0.5) > predicted_count(3, law, 0.8) > 0


# ----------------------------------------------------------------------
# Packings
# ----------------------------------------------------------------------


def test_generated_packing_invariants(small_packing):
    P = small_packing
    assert len(P) > 100
    check_packing(P)
    assert np.all(P.norms >= 0.8 - 1e-12) and np.all(P.norms <= 1.0 + 1e-12)
    assert np.allclose(P.rhos, P.deltas**2)
    assert P.meta["audit"]["probes"] == 500
    assert P.meta["predicted_count"] > len(P)


def test_generation_is_seeded():
    kw = dict(max_rejections=500, audit_probes=0)
    a = gen_packing(2, DESK_LAWS[2], 0.85, seed=7, **kw)
    b = gen_packing(2, DESK_LAWS[2], 0.85, seed=7, **kw)
    c = gen_packing(2, DESK_LAWS[2], 0.85, seed=8, **kw)
    assert np.array_equal(a.centers, b.centers)
    assert len(a) != len(c) or not np.array_equal(a.centers, c.centers)
    assert a.meta["audit"] == {"probes": 0, "failures": 0, "passed": True}


def test_generation_edge_cases():
    empty = gen_packing(2, DESK_LAWS[2], 1.0)
    assert len(empty) == 0
    assert empty.meta["audit"]["passed"]
    with pytest.raises(ValueError):
        gen_packing(2, DESK_LAWS[2], 0.0)
    with pytest.raises(ValueError):
        gen_packing(2, DeltaLaw.power(2), 0.5)
    with pytest.raises(ResourceCapError) as info:
        gen_packing(3, DeltaLaw.power(4), 0.2)
    assert info.value.estimate > info.value.cap


def test_check_packing_rejects_bad_atoms():
    check_packing(PLANAR)
    touching = BallPacking([[0.5, 0.0], [0.55, 0.0]], [0.05, 0.05], [0.001, 0.001], 2)
    with pytest.raises(ValueError, match="intersect"):
        check_packing(touching)
    with pytest.raises(ValueError, match="ρ > δ"):
        check_packing(BallPacking([[0.5, 0.0]], [0.01], [0.02], 2))
    with pytest.raises(ValueError, match="annulus"):
        check_packing(BallPacking([[0.1, 0.0]], [0.01], [0.001], 2, None, 0.5, 1.0))
    with pytest.raises(ValueError, match="law"):
        check_packing(BallPacking([[0.5, 0.0]], [0.01], [0.0001], 2, DESK_LAWS[2], 0.1, 1.0))


def test_save_and_load(tmp_path, small_packing):
    path = tmp_path / "packing.jsonl"
    save_packing(small_packing, path)
    loaded = load_packing(path)
    assert np.array_equal(loaded.centers, small_packing.centers)
    assert np.array_equal(loaded.rhos, small_packing.rhos)
    assert loaded.law == small_packing.law
    assert loaded.meta["seed"] == 0
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"x": [0, 0], "delta": 0.1, "rho": 0.01}\n')
    with pytest.raises(ValueError, match="meta header"):
        load_packing(bad)


def test_empty_packing_round_trip(tmp_path):
    path = tmp_path / "empty.jsonl"
    save_packing(BallPacking.empty(3, DESK_LAWS[3], 0.5), path)
    loaded = load_packing(path)
    assert len(loaded) == 0
    assert loaded.dim == 3
    assert loaded.t_min == 0.5


def test_packing_summary():
    summary = packing_summary(SPATIAL, t_grid=[0.0, 0.6, 2.0], cross_check=True, level=3)
    rho2 = 0.01**2 + 0.02**2 + 0.03**2
    assert summary.count == 3
    assert summary.P_iso == pytest.approx(4 * math.pi * rho2)
    assert summary.P_disk == pytest.approx(math.pi**2 * rho2)
    assert summary.P_disk_measures == pytest.approx(summary.P_disk, rel=1e-3)
    assert summary.volume == pytest.approx(4 * math.pi / 3 * (0.01**3 + 0.02**3 + 0.03**3))
    assert summary.b == pytest.approx([0.0, 0.03, 0.06])
    planar = packing_summary(PLANAR)
    assert planar.P_disk is None
    assert planar.P_iso == pytest.approx(2 * math.pi * 0.0075)
    with pytest.raises(ValueError):
        disk_perimeter_via_measures(PLANAR)


def test_from_law():
    law = DeltaLaw.power(4)
    P = BallPacking.from_law([[0.5, 0.0, 0.0], [0.0, 0.0, 1.0]], law, 3, t_min=0.5)
    assert P.deltas == pytest.approx([0.5**4 / 128, 1 / 128])
    assert P.rhos == pytest.approx(P.deltas**3)
    assert P.law == law
    check_packing(P)


def test_concat():
    both = PLANAR.concat(PLANAR)
    assert len(both) == 6
    with pytest.raises(ValueError):
        PLANAR.concat(SPATIAL)


# ----------------------------------------------------------------------
# Products and three copies
# ----------------------------------------------------------------------


def test_product_example():
    example = gen_example1(k=2, n=4, C="square", D=PLANAR)
    D_volume = math.pi * 3 * 0.0025**2
    assert example.D_volume == pytest.approx(D_volume)
    assert example.anisotropic_content() == pytest.approx(4 * D_volume)
    assert example.perimeter() == pytest.approx(4 * D_volume + 2 * math.pi * 0.0075)
    assert example.to_dict()["D"]["count"] == 3

    h = 1.0 / 256
    C_grid = rasterize(example.C, ([-0.3, -0.3], [1.3, 1.3]), h)
    sched = RSchedule.geometric(0.25, 1 / 16, 5).snapped(h)
    report = example.anisotropic_report(C_grid, sched)
    assert report.trend == CONVERGING
    assert report.c0 == pytest.approx(example.anisotropic_content(), rel=0.01)
    assert example.isotropic_lower_bound(0.1) > 0


def test_product_example_validation():
    with pytest.raises(ValueError):
        gen_example1(k=2, n=3, D=PLANAR)
    with pytest.raises(ValueError):
        gen_example1(k=2, n=4, C="torus", D=PLANAR)
    with pytest.raises(ValueError):
        gen_example1(k=2, n=5, D=PLANAR)
    disk = gen_example1(k=3, n=5, C="disk", D=PLANAR)
    assert disk.C_perimeter() == pytest.approx(4 * math.pi, rel=1e-3)


def test_three_copies_scene():
    scene = gen_example2(D=PLANAR, gap=0.5)
    assert [c["axis"] for c in scene.copies] == [0, 1, 2]
    assert min(scene.bbox_gaps()) >= 0.5 - 1e-12
    assert scene.witness_copy([[1, 0, 0], [0, 1, 0]]) == 2
    assert scene.witness_copy([[1, 0, 0], [0, 0, 1]]) == 1
    assert scene.witness_copy([[1, 1, 0], [0, 0, 1]]) == 0
    union = scene.shapes()
    assert union.volume() == pytest.approx(3 * math.pi * 3 * 0.0025**2)
    assert scene.to_dict()["D"]["count"] == 3
    with pytest.raises(ValueError):
        ThreeCopiesScene(BallPacking.empty(2))
    with pytest.raises(ValueError):
        ThreeCopiesScene(SPATIAL)


def test_three_copies_witness_follows_l():
    scene = gen_example2(D=PLANAR, gap=0.5)
    rho, r = 0.0025, 0.1
    shell = lambda s: 3 * math.pi * ((rho + s) ** 2 - rho**2)

    side_plane = [[1, 0, 0], [0, 0, 1]]
    index, cos_alpha, sin_alpha = scene.witness_angle(side_plane)
    assert scene.copies[index]["axis"] == 1
    assert (cos_alpha, sin_alpha) == pytest.approx((1.0, 0.0))
    assert scene.witness_excess(side_plane, r) == pytest.approx(shell(r))

    oblique = [[1, 0, 0], [0, 1, 1]]
    index, cos_alpha, sin_alpha = scene.witness_angle(oblique)
    assert scene.copies[index]["axis"] == 1
    assert cos_alpha == pytest.approx(1 / math.sqrt(2))
    s = r / math.sqrt(2)
    assert scene.witness_excess(oblique, r) == pytest.approx(shell(s) * (1 - 2 * s))

    sched = RSchedule((0.2, 0.1, 0.05))
    report = scene.witness_report(oblique, sched)
    assert report.extra["axis"] == 1
    assert [x["excess"] for x in report.samples] == pytest.approx([scene.witness_excess(oblique, q) for q in sched])


def test_three_copies_isotropic_scene_report():
    scene = gen_example2(D=PLANAR, gap=0.5)
    rho, r = 0.0025, 0.1
    side = 3 * math.pi * ((rho + r) ** 2 - rho**2)
    cap = 3 * math.pi * (rho**2 * r + rho * math.pi * r**2 / 2 + 2 * r**3 / 3)
    assert scene.prism_excess(r) == pytest.approx(side + 2 * cap, rel=1e-4)
    report = scene.isotropic_report(RSchedule((0.2, 0.1, 0.05)))
    assert report.samples[1]["excess"] == pytest.approx(3 * (side + 2 * cap), rel=1e-4)
    with pytest.raises(ValueError):
        scene.isotropic_report(RSchedule((0.3, 0.1)))
