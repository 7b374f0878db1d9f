#!/usr/bin/env python3
"""
Tests for discrete surface measures and anisotropic perimeters.
"""

import math

import numpy as np
import pytest

from minkowski_content.convex_bodies import StructuringElement, direction_net, scale, support
from minkowski_content.surface_measures import (
    DiscreteSurfaceMeasure,
    anisotropic_perimeter,
    box_surface_measure,
    circle_surface_measure,
    convex_hull_surface_measure,
    disjoint_union_measure,
    icosphere_triangles,
    mesh_surface_measure,
    perimeter_triple,
    polygon_surface_measure,
    reflect_measure,
    scale_measure,
    segment_integral,
    sheet_content_exact,
    sphere_surface_measure,
    unit_cube_triangles,
)
from minkowski_content.verification import Verifier

UNIT_SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]
DISK_XY = StructuringElement.planar_disk([[1, 0, 0], [0, 1, 0]])


def _random_polygon(rng, m=9):
    """Star-shaped polygon around the origin (always simple)."""
    angles = np.sort(rng.uniform(0, 2 * math.pi, m))
    radii = rng.uniform(0.5, 1.5, m)
    return np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])


def test_unit_square_atoms():
    S = polygon_surface_measure(UNIT_SQUARE)
    assert len(S) == 4
    assert S.total_mass == pytest.approx(4.0)
    got = sorted((tuple(np.round(n, 12)), w) for n, w in zip(S.normals, S.weights))
    assert got == sorted([((1.0, 0.0), 1.0), ((-1.0, 0.0), 1.0), ((0.0, 1.0), 1.0), ((0.0, -1.0), 1.0)])
    assert S.closed


def test_triangle_atoms():
    S = polygon_surface_measure([[0, 0], [1, 0], [0, 1]])
    atoms = {tuple(np.round(n, 12)): w for n, w in zip(S.normals, S.weights)}
    assert atoms[(0.0, -1.0)] == pytest.approx(1.0)
    assert atoms[(-1.0, 0.0)] == pytest.approx(1.0)
    s = round(1 / math.sqrt(2), 12)
    assert atoms[(s, s)] == pytest.approx(math.sqrt(2))
    assert S.closedness_defect <= 1e-12


def test_polygon_errors_and_reversal(caplog):
    with pytest.raises(ValueError):
        polygon_surface_measure([[0, 0], [1, 1], [2, 2]])
    with pytest.raises(ValueError):
        polygon_surface_measure([[0, 0], [1, 1], [1, 0], [0, 1]])
    with pytest.raises(ValueError):
        polygon_surface_measure([[0, 0], [0, 0], [1, 0], [0, 1]])
    clockwise = polygon_surface_measure(UNIT_SQUARE[::-1])
    assert clockwise.reoriented
    assert "clockwise" in caplog.text
    assert anisotropic_perimeter(clockwise, StructuringElement.segment([0, 0], [1, 0])) == pytest.approx(1.0)


def test_unit_cube_mesh():
    S = mesh_surface_measure(unit_cube_triangles())
    assert S.total_mass == pytest.approx(6.0)
    assert S.closed
    masses = {}
    for n, w in zip(S.normals, S.weights):
        key = tuple(np.round(n, 9) + 0.0)
        masses[key] = masses.get(key, 0.0) + w
    assert len(masses) == 6
    assert all(m == pytest.approx(1.0) for m in masses.values())


def test_open_mesh_is_flagged():
    S = mesh_surface_measure([[[0, 0, 0], [1, 0, 0], [0, 1, 0]]])
    assert len(S) == 1
    assert not S.closed


def test_degenerate_triangles_are_dropped():
    tris = np.concatenate([unit_cube_triangles(), [[[0, 0, 0], [1, 1, 1], [2, 2, 2]]]])
    S = mesh_surface_measure(tris)
    assert S.dropped == 1
    assert len(S) == 12


def test_icosphere_area():
    S = mesh_surface_measure(icosphere_triangles(1.0, 4))
    assert abs(S.total_mass - 4 * math.pi) <= 0.005 * 4 * math.pi
    assert S.closed


def test_sphere_quadrature():
    for level in (1, 2, 3):
        S = sphere_surface_measure(1.0, level)
        assert S.total_mass == pytest.approx(4 * math.pi, rel=1e-14)
        assert S.kind == "quadrature"
    S = sphere_surface_measure(1.0, 3)
    assert anisotropic_perimeter(S, DISK_XY) == pytest.approx(math.pi**2, abs=1e-4)
    assert segment_integral(S, [0, 0, 1]) == pytest.approx(math.pi, abs=1e-4)
    assert segment_integral(S, [1, 0, 0]) == pytest.approx(math.pi, abs=1e-3)
    big = sphere_surface_measure(2.0, 3)
    assert big.total_mass == pytest.approx(16 * math.pi)


def test_sphere_rejects_bad_radius():
    with pytest.raises(ValueError):
        sphere_surface_measure(0.0)


def test_disjoint_union():
    square = polygon_surface_measure(UNIT_SQUARE)
    assert disjoint_union_measure([square, square]).total_mass == pytest.approx(8.0)
    empty = disjoint_union_measure([])
    assert len(empty) == 0
    assert empty.total_mass == 0.0
    spheres = [sphere_surface_measure(r, 1) for r in (1, 2, 3)]
    assert disjoint_union_measure(spheres).total_mass == pytest.approx(4 * math.pi * 14)
    with pytest.raises(ValueError):
        disjoint_union_measure([square, spheres[0]])


def test_anisotropic_perimeter_examples():
    square = polygon_surface_measure(UNIT_SQUARE)
    assert anisotropic_perimeter(square, StructuringElement.unit_ball(2)) == pytest.approx(4.0)
    assert anisotropic_perimeter(square, StructuringElement.segment([0, 0], [1, 0])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        anisotropic_perimeter(square, StructuringElement.unit_ball(3))
    empty = disjoint_union_measure([], dim=2)
    assert anisotropic_perimeter(empty, StructuringElement.unit_ball(2)) == 0.0


def test_reflect_measure():
    square = polygon_surface_measure(UNIT_SQUARE)
    flipped = reflect_measure(square)
    e1 = StructuringElement.segment([0, 0], [1, 0])
    assert anisotropic_perimeter(flipped, e1) == pytest.approx(1.0)
    brute = math.fsum(w * max(0.0, -n[0]) for n, w in zip(square.normals, square.weights))
    assert anisotropic_perimeter(flipped, e1) == pytest.approx(brute)
    assert anisotropic_perimeter(flipped, StructuringElement.unit_ball(2)) == pytest.approx(4.0)
    twice = reflect_measure(flipped)
    assert np.array_equal(twice.normals, square.normals)
    assert np.array_equal(twice.weights, square.weights)


def test_monotonicity_under_inclusion():
    S = polygon_surface_measure([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]])
    small = StructuringElement.polytope([[0, 0], [0.5, 0], [0, 0.5]])
    large = StructuringElement.polytope([[-0.1, -0.1], [1, 0], [0, 1]])
    net = direction_net(2)
    assert np.all(support(small, net) <= support(large, net) + 1e-12)
    assert anisotropic_perimeter(S, small) <= anisotropic_perimeter(S, large)


def test_homogeneity_and_split_on_random_polygons():
    rng = np.random.default_rng(5)
    verifier = Verifier()
    Q = StructuringElement.polytope([[-0.2, -0.1], [1.0, 0.3], [0.1, 0.8]])
    for _ in range(10):
        S = polygon_surface_measure(_random_polygon(rng))
        P = anisotropic_perimeter(S, Q)
        for r in (0.25, 3.0):
            assert anisotropic_perimeter(S, scale(Q, r)) == pytest.approx(r * P, rel=1e-12)
        assert verifier.verify_symmetral_split(S, Q, verbose=False)


def test_segment_formula():
    verifier = Verifier()
    S = convex_hull_surface_measure(np.random.default_rng(2).normal(size=(20, 3)))
    assert S.closed
    for u in ([1, 0, 0], [0.3, -0.2, 0.9], [0, 0, -2]):
        assert verifier.verify_segment_formula(S, u, verbose=False)


def test_scale_measure_and_box():
    unit = sphere_surface_measure(1.0, 2)
    assert scale_measure(unit, 0.5).total_mass == pytest.approx(math.pi)
    box = box_surface_measure([0, 0, 0], [1, 2, 3])
    assert box.total_mass == pytest.approx(22.0)
    assert box.closed


def test_perimeter_triple_and_sheet_content():
    S = polygon_surface_measure(UNIT_SQUARE)
    values = perimeter_triple(S, StructuringElement.segment([0, 0], [1, 0]))
    assert values["P_Q"] == pytest.approx(1.0)
    assert values["P_symmetral"] == pytest.approx(1.0)
    assert values["P_iso"] == pytest.approx(4.0)
    circle = circle_surface_measure(1.0)
    assert sheet_content_exact(circle, StructuringElement.unit_ball(2)) == pytest.approx(2 * math.pi)


def test_measure_validation():
    with pytest.raises(ValueError):
        DiscreteSurfaceMeasure(np.array([[1.0, 0.0]]), np.array([-1.0]))
    with pytest.raises(ValueError):
        DiscreteSurfaceMeasure(np.array([[2.0, 0.0]]), np.array([1.0]))
    summary = polygon_surface_measure(UNIT_SQUARE).summary()
    assert summary["total_mass"] == pytest.approx(4.0)
    assert summary["closed"] is True
