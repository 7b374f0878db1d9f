"""
Analytic Shapes

Compact sets with an analytic description, used as rasterization input and
as the source of exact surface measures:

    BallShape         disk (2D) or ball (3D)
    BoxShape          axis-aligned box
    PolygonShape      simple planar polygon
    PolyhedronShape   convex hull of points in R^3
    BallUnionShape    disjoint union of balls (a ball packing)
    PrismShape        planar base × [0, length] along a coordinate axis
    UnionShape        disjoint union of other shapes
    SheetShape        measure-zero curve or surface (circle, sphere,
                      polygon boundary, segment), rasterized by distance

Every solid shape answers `contains(points)`; sheets answer
`distance(points)`. Shapes are parsed from and written to the JSON scene
format with `shape_from_dict` / `to_dict`.
"""

import logging
import math
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .surface_measures import (
    DiscreteSurfaceMeasure,
    box_surface_measure,
    circle_surface_measure,
    convex_hull_surface_measure,
    disjoint_union_measure,
    polygon_surface_measure,
    signed_area,
    sphere_surface_measure,
)

logger = logging.getLogger(__name__)


def ball_volume(dim, radius):
    """κ_n ρ^n."""
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0) * radius**dim


class Shape:
    """Base class; subclasses set `dim` and implement the geometry."""

    kind = None
    sheet = False

    def bounding_box(self):
        raise NotImplementedError

    def contains(self, points):
        raise NotImplementedError

    def volume(self):
        raise NotImplementedError

    def surface_measure(self):
        """Exact (or quadrature) surface measure, when one is available."""
        raise NotImplementedError(f"no surface measure for shape {self.kind!r}")

    def oracle(self):
        """(shape tag, parameters) for the Steiner oracle table, or None."""
        return None

    def to_dict(self):
        raise NotImplementedError


class BallShape(Shape):
    kind = "ball"

    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.dim = len(self.center)
        if self.radius <= 0:
            raise ValueError(f"ball radius must be positive, got {radius}")

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def contains(self, points):
        d = points - self.center
        return np.einsum("ij,ij->i", d, d) <= self.radius**2

    def volume(self):
        return ball_volume(self.dim, self.radius)

    def surface_measure(self, level=3):
        if self.dim == 2:
            return circle_surface_measure(self.radius)
        return sphere_surface_measure(self.radius, level)

    def oracle(self):
        return ("disk" if self.dim == 2 else "ball3"), {"rho": self.radius}

    def to_dict(self):
        return {"type": "ball", "center": self.center.tolist(), "radius": self.radius}


class BoxShape(Shape):
    kind = "box"

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.dim = len(self.lo)
        if np.any(self.hi <= self.lo):
            raise ValueError(f"box needs lo < hi, got {self.lo.tolist()} / {self.hi.tolist()}")

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def contains(self, points):
        return np.all((points >= self.lo) & (points <= self.hi), axis=1)

    def volume(self):
        return float(np.prod(self.hi - self.lo))

    def surface_measure(self):
        return box_surface_measure(self.lo, self.hi)

    def oracle(self):
        sides = (self.hi - self.lo).tolist()
        if self.dim == 2:
            return "box", {"a": sides[0], "b": sides[1]}
        return "box3", {"a": sides[0], "b": sides[1], "c": sides[2]}

    def to_dict(self):
        return {"type": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


class PolygonShape(Shape):
    kind = "polygon"
    dim = 2

    def __init__(self, vertices):
        self.vertices = np.asarray(vertices, dtype=float)
        # validates simplicity and orientation
        self._measure = polygon_surface_measure(self.vertices)

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def contains(self, points):
        """Vectorized crossing-number test (boundary points count as inside)."""
        x, y = points[:, 0], points[:, 1]
        inside = np.zeros(len(points), dtype=bool)
        v = self.vertices
        for (x1, y1), (x2, y2) in zip(v, np.roll(v, -1, axis=0)):
            if y1 == y2:
                continue
            straddles = (y1 > y) != (y2 > y)
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= straddles & (x < x_cross)
        return inside

    def volume(self):
        return abs(signed_area(self.vertices))

    def surface_measure(self):
        return self._measure

    def oracle(self):
        return "polygon", {"measure": self._measure}

    def to_dict(self):
        return {"type": "polygon", "vertices": self.vertices.tolist()}


class PolyhedronShape(Shape):
    kind = "polyhedron"
    dim = 3

    def __init__(self, points):
        self.points = np.asarray(points, dtype=float)
        self.hull = ConvexHull(self.points)

    def bounding_box(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def contains(self, points):
        eq = self.hull.equations
        return np.all(points @ eq[:, :-1].T + eq[:, -1] <= 1e-12, axis=1)

    def volume(self):
        return float(self.hull.volume)

    def surface_measure(self):
        return convex_hull_surface_measure(self.points)

    def to_dict(self):
        return {"type": "polyhedron", "points": self.points.tolist()}


class BallUnionShape(Shape):
    """Union of pairwise disjoint balls B(x_i, ρ_i)."""

    kind = "packing"

    def __init__(self, centers, radii, source=None):
        self.centers = np.asarray(centers, dtype=float)
        self.radii = np.asarray(radii, dtype=float)
        self.source = source
        if self.centers.ndim != 2:
            raise ValueError("ball union needs an (m, n) array of centers")
        self.dim = self.centers.shape[1]
        self._tree = cKDTree(self.centers) if len(self.centers) else None

    @classmethod
    def from_packing(cls, packing, source=None):
        return cls(packing.centers, packing.rhos, source=source)

    def bounding_box(self):
        if not len(self.centers):
            return None
        return (self.centers - self.radii[:, None]).min(axis=0), (self.centers + self.radii[:, None]).max(axis=0)

    def contains(self, points):
        if self._tree is None:
            return np.zeros(len(points), dtype=bool)
        k = min(16, len(self.centers))
        dist, idx = self._tree.query(points, k=k, distance_upper_bound=float(self.radii.max()))
        dist = dist.reshape(len(points), k)
        idx = idx.reshape(len(points), k)
        valid = idx < len(self.centers)
        radii = np.where(valid, self.radii[np.minimum(idx, len(self.centers) - 1)], -1.0)
        return np.any(valid & (dist <= radii), axis=1)

    def volume(self):
        return float(sum(ball_volume(self.dim, r) for r in self.radii))

    def surface_measure(self, level=2):
        if self.dim == 2:
            parts = [circle_surface_measure(r, count=90) for r in self.radii]
        else:
            parts = [sphere_surface_measure(r, level) for r in self.radii]
        return disjoint_union_measure(parts, dim=self.dim)

    def to_dict(self):
        if self.source is not None:
            return {"type": "packing", "path": str(self.source)}
        return {"type": "packing", "centers": self.centers.tolist(), "radii": self.radii.tolist()}


class PrismShape(Shape):
    """
    base × [0, length] along coordinate axis `axis`, translated by `offset`.

    The base lives in the remaining two coordinates, in increasing index order.
    """

    kind = "prism"
    dim = 3

    def __init__(self, base, axis=2, offset=(0.0, 0.0, 0.0), length=1.0):
        if base.dim != 2:
            raise ValueError("prism base must be planar")
        if axis not in (0, 1, 2):
            raise ValueError(f"prism axis must be 0, 1 or 2, got {axis}")
        self.base = base
        self.axis = int(axis)
        self.offset = np.asarray(offset, dtype=float)
        self.length = float(length)
        self.plane = [i for i in range(3) if i != self.axis]

    def bounding_box(self):
        blo, bhi = self.base.bounding_box()
        lo, hi = np.zeros(3), np.zeros(3)
        lo[self.plane], hi[self.plane] = blo, bhi
        hi[self.axis] = self.length
        return lo + self.offset, hi + self.offset

    def contains(self, points):
        local = points - self.offset
        t = local[:, self.axis]
        inside = (t >= 0.0) & (t <= self.length)
        if np.any(inside):
            inner = np.zeros(len(points), dtype=bool)
            inner[inside] = self.base.contains(local[inside][:, self.plane])
            return inner
        return inside

    def volume(self):
        return self.base.volume() * self.length

    def to_dict(self):
        return {
            "type": "prism",
            "base": self.base.to_dict(),
            "axis": self.axis,
            "offset": self.offset.tolist(),
            "length": self.length,
        }


class UnionShape(Shape):
    kind = "union"

    def __init__(self, parts):
        self.parts = list(parts)
        if not self.parts:
            raise ValueError("a union needs at least one part")
        dims = {p.dim for p in self.parts}
        if len(dims) != 1:
            raise ValueError(f"union parts have dimensions {sorted(dims)}")
        self.dim = dims.pop()

    def bounding_box(self):
        boxes = [p.bounding_box() for p in self.parts]
        return np.min([b[0] for b in boxes], axis=0), np.max([b[1] for b in boxes], axis=0)

    def contains(self, points):
        result = np.zeros(len(points), dtype=bool)
        for part in self.parts:
            result |= part.contains(points)
        return result

    def volume(self):
        return sum(p.volume() for p in self.parts)

    def to_dict(self):
        return {"type": "union", "parts": [p.to_dict() for p in self.parts]}


class SheetShape(Shape):
    """
    A measure-zero set E given by its distance function.

    Surfaces:
        circle            {‖x − c‖ = ρ} in R^2
        sphere            {‖x − c‖ = ρ} in R^3
        polygon_boundary  boundary of a planar polygon
        segment           [a, b] in R^2 or R^3
    """

    kind = "sheet"
    sheet = True
    SURFACES = ("circle", "sphere", "polygon_boundary", "segment")

    def __init__(self, surface, center=None, radius=None, vertices=None, a=None, b=None):
        if surface not in self.SURFACES:
            raise ValueError(f"unknown sheet surface {surface!r}")
        self.surface = surface
        if surface in ("circle", "sphere"):
            self.center = np.asarray(center, dtype=float)
            self.radius = float(radius)
            self.dim = 2 if surface == "circle" else 3
            if len(self.center) != self.dim:
                raise ValueError(f"{surface} center must have {self.dim} coordinates")
        elif surface == "polygon_boundary":
            self.vertices = np.asarray(vertices, dtype=float)
            self.dim = 2
        else:
            self.a = np.asarray(a, dtype=float)
            self.b = np.asarray(b, dtype=float)
            self.dim = len(self.a)

    def _segments(self):
        if self.surface == "segment":
            return self.a[None, :], self.b[None, :]
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def bounding_box(self):
        if self.surface in ("circle", "sphere"):
            return self.center - self.radius, self.center + self.radius
        start, end = self._segments()
        pts = np.vstack([start, end])
        return pts.min(axis=0), pts.max(axis=0)

    def distance(self, points):
        if self.surface in ("circle", "sphere"):
            return np.abs(np.linalg.norm(points - self.center, axis=1) - self.radius)
        best = np.full(len(points), np.inf)
        for a, b in zip(*self._segments()):
            ab = b - a
            t = np.clip((points - a) @ ab / float(ab @ ab), 0.0, 1.0)
            best = np.minimum(best, np.linalg.norm(points - (a + t[:, None] * ab), axis=1))
        return best

    def contains(self, points):
        return self.distance(points) == 0.0

    def volume(self):
        return 0.0

    def area(self):
        """(n−1)-dimensional measure of E."""
        if self.surface == "circle":
            return 2.0 * math.pi * self.radius
        if self.surface == "sphere":
            return 4.0 * math.pi * self.radius**2
        start, end = self._segments()
        return float(np.sum(np.linalg.norm(end - start, axis=1)))

    def surface_measure(self):
        """Unit normals up to sign, weighted by the area of E."""
        if self.surface == "circle":
            return circle_surface_measure(self.radius)
        if self.surface == "sphere":
            return sphere_surface_measure(self.radius)
        if self.surface == "polygon_boundary":
            return polygon_surface_measure(self.vertices)
        if self.dim != 2:
            raise NotImplementedError("segment sheets have a normal measure only in the plane")
        d = self.b - self.a
        length = float(np.linalg.norm(d))
        return DiscreteSurfaceMeasure(np.array([[d[1], -d[0]]]) / length, [length], dim=2)

    def oracle(self):
        if self.surface == "circle":
            return "circle", {"rho": self.radius}
        if self.surface == "sphere":
            return "sphere_shell", {"rho": self.radius}
        if self.surface == "segment":
            return "segment_curve", {"length": self.area()}
        return None

    def to_dict(self):
        spec = {"type": "sheet", "surface": self.surface}
        if self.surface in ("circle", "sphere"):
            spec.update(center=self.center.tolist(), radius=self.radius)
        elif self.surface == "polygon_boundary":
            spec["vertices"] = self.vertices.tolist()
        else:
            spec.update(a=self.a.tolist(), b=self.b.tolist())
        return spec


def shape_from_dict(spec, base_dir=None):
    """
    Parse a JSON shape description.

    Args:
        spec: dict with a "type" key
        base_dir: directory that relative packing paths are resolved against

    Returns:
        Shape
    """
    kind = spec.get("type")
    if kind == "ball":
        return BallShape(spec["center"], spec["radius"])
    if kind in ("box", "square"):
        if kind == "square":
            side = spec.get("side", 1.0)
            lo = spec.get("lo", [0.0, 0.0])
            return BoxShape(lo, np.asarray(lo, dtype=float) + side)
        return BoxShape(spec["lo"], spec["hi"])
    if kind == "polygon":
        return PolygonShape(spec["vertices"])
    if kind == "polyhedron":
        return PolyhedronShape(spec["points"])
    if kind == "packing":
        if "path" in spec:
            from .generators import load_packing

            path = Path(spec["path"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            return BallUnionShape.from_packing(load_packing(path), source=spec["path"])
        return BallUnionShape(spec["centers"], spec["radii"])
    if kind == "prism":
        return PrismShape(
            shape_from_dict(spec["base"], base_dir),
            spec.get("axis", 2),
            spec.get("offset", [0.0, 0.0, 0.0]),
            spec.get("length", 1.0),
        )
    if kind == "union":
        return UnionShape([shape_from_dict(p, base_dir) for p in spec["parts"]])
    if kind == "sheet":
        fields = {k: v for k, v in spec.items() if k in ("center", "radius", "vertices", "a", "b")}
        return SheetShape(spec["surface"], **fields)
    raise ValueError(f"unknown shape type {kind!r}; known: ball, box, square, polygon, polyhedron, packing, prism, union, sheet")
