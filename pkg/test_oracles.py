#!/usr/bin/env python3
"""
Tests for the closed-form parallel volumes and packing bounds.
"""

import math

import numpy as np
import pytest

from minkowski_content.convex_bodies import StructuringElement
from minkowski_content.generators import DESK_LAWS
from minkowski_content.oracles import (
    SteinerOracle,
    analytic_excess,
    cap_area,
    isotropic_lower_bound,
    lower_bound_sequence,
    oracle_content,
    q_tag,
    shape_oracle,
)
from minkowski_content.shapes import BallShape, BoxShape, PolygonShape
from minkowski_content.surface_measures import polygon_surface_measure

DISK_XY = StructuringElement.planar_disk([[1, 0, 0], [0, 1, 0]])
E1 = StructuringElement.segment([0, 0], [1, 0])


def test_solid_excess_formulas():
    assert analytic_excess("square", "ball", 0.1) == pytest.approx(0.4 + math.pi * 0.01)
    assert analytic_excess("disk", "ball", 0.2, rho=2.0) == pytest.approx(2 * math.pi * 2 * 0.2 + math.pi * 0.04)
    r = 0.3
    expected = 4 * math.pi / 3 * ((1 + r) ** 3 - 1)
    assert analytic_excess("ball3", "ball3", r) == pytest.approx(expected)
    box = analytic_excess("box3", "ball3", r, a=1, b=2, c=3)
    assert box == pytest.approx(22 * r + 6 * math.pi * r**2 + 4 * math.pi / 3 * r**3)
    assert analytic_excess("ball3", DISK_XY, 0.1) == pytest.approx(math.pi**2 * 0.1 + 2 * math.pi * 0.01)


def test_contents_are_derivatives_at_zero():
    assert oracle_content("square", "ball", a=2, b=2) == pytest.approx(8.0)
    assert oracle_content("ball3", DISK_XY) == pytest.approx(math.pi**2)
    assert oracle_content("ball3", "ball3", rho=0.5) == pytest.approx(math.pi)
    assert oracle_content("box3", "ball3", a=1, b=2, c=3) == pytest.approx(22.0)


def test_sheet_contents_are_halved():
    assert oracle_content("circle", "ball", rho=1.5) == pytest.approx(3 * math.pi)
    assert oracle_content("sphere_shell", "ball3", rho=1.0) == pytest.approx(4 * math.pi)
    assert oracle_content("segment_curve", "ball", length=2.0) == pytest.approx(2.0)
    assert analytic_excess("sphere_shell", "ball3", 0.25) == pytest.approx(
        4 * math.pi / 3 * (1.25**3 - 0.75**3)
    )


def test_ball_radius_scales_r():
    big = StructuringElement.ball([0, 0, 0], 2.0)
    assert oracle_content("ball3", big) == pytest.approx(8 * math.pi)
    assert analytic_excess("ball3", big, 0.1) == pytest.approx(analytic_excess("ball3", "ball3", 0.2))


def test_segment_oracle():
    square = polygon_surface_measure([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert oracle_content("polygon", E1, measure=square) == pytest.approx(1.0)
    assert analytic_excess("polygon", E1, 0.25, measure=square) == pytest.approx(0.25)
    up = StructuringElement.segment([0, 0], [0, 1])
    assert oracle_content("box", up, a=2.0, b=3.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        oracle_content("polygon", E1)


def test_unsupported_pairs():
    with pytest.raises(ValueError, match="no closed form"):
        oracle_content("disk", DISK_XY)
    with pytest.raises(ValueError, match="measure"):
        oracle_content("disk", E1)
    with pytest.raises(ValueError):
        q_tag(StructuringElement.ball([0.5, 0, 0], 1.0))
    with pytest.raises(ValueError):
        analytic_excess("square", "ball", -0.1)


def test_q_tags():
    assert q_tag(StructuringElement.unit_ball(2))[0] == "ball"
    assert q_tag(StructuringElement.unit_ball(3))[0] == "ball3"
    assert q_tag(DISK_XY)[:2] == ("disk", 1.0)
    tag, factor, extra = q_tag(StructuringElement.segment([0, 0, 0], [0, 0, 2]))
    assert tag == "segment"
    assert extra["u"].tolist() == [0, 0, 2]


def test_shape_oracle():
    excess, content = shape_oracle(BallShape([0, 0], 1.0), StructuringElement.unit_ball(2))
    assert content == pytest.approx(2 * math.pi)
    assert excess(0.1) == pytest.approx(2 * math.pi * 0.1 + math.pi * 0.01)
    _, content = shape_oracle(BoxShape([0, 0], [2, 1]), E1)
    assert content == pytest.approx(1.0)
    L = PolygonShape([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]])
    _, content = shape_oracle(L, E1)
    assert content == pytest.approx(2.0)
    assert shape_oracle(L, StructuringElement.unit_ball(2)) is None


def test_symbolic_content_expression():
    oracle = SteinerOracle()
    expr = oracle.content_expression("disk", "ball")
    assert oracle.evaluate(expr, rho=3.0) == pytest.approx(6 * math.pi)
    assert ("ball3", "disk") in oracle.supported()


def test_isotropic_lower_bound_grows():
    law = DESK_LAWS[3]
    r, bound = isotropic_lower_bound(0.5, law)
    assert r == pytest.approx(3 * law.delta(0.5))
    assert bound == pytest.approx(4 * math.pi / 9 * (1 - 32.0**-6) * 0.125 / law.delta(0.5))
    bounds = [b for _, b in lower_bound_sequence(law, [0.8, 0.4, 0.2, 0.1])]
    assert bounds == sorted(bounds)
    assert bounds[-1] > 4 * bounds[0]
    _, planar = isotropic_lower_bound(0.5, DESK_LAWS[2], dim=2)
    assert planar == pytest.approx(math.pi / 3 * (1 - 32.0**-2) * 0.25 / DESK_LAWS[2].delta(0.5))
    with pytest.raises(ValueError):
        isotropic_lower_bound(0.5, law, dim=4)


def test_cap_area():
    assert cap_area(0.1, 0.0, 0.5) == pytest.approx(4 * math.pi * 0.01)
    assert cap_area(0.1, 1.0, 0.5) == 0.0
    # r inside the ball and the sphere out of reach
    assert cap_area(1.0, 0.0, 0.5) == 0.0
    assert cap_area(0.1, 0.1, 0.05) == pytest.approx(math.pi * 0.05**2)
    areas = cap_area(np.array([0.1, 0.1]), np.array([0.1, 1.0]), 0.05)
    assert areas.shape == (2,)
    assert areas[1] == 0.0
