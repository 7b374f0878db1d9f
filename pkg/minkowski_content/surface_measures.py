"""
Discrete Surface Area Measures

A DiscreteSurfaceMeasure is a finite list of atoms (ν_i, w_i): unit outer
normals with (n−1)-dimensional weights. It stands in for the generalized
surface area measure S*_{n−1}(A, ·) of a set A with finite perimeter.

Key formulas:
    P(A)       = Σ w_i
    P_Q(A)     = Σ w_i · max(0, h_Q(ν_i))
    P_Q(A^C)   = P_{−Q}(A)          (the complement has normals −ν_i)
    closedness = ‖Σ w_i ν_i‖ = 0    for boundaries of bounded sets

Exact measures come from polygons, triangle meshes and convex hulls. Spheres
and circles use quadrature with weights rescaled to the exact total mass.
Sums are compensated (math.fsum) over the atoms in index order.
"""

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.spatial import ConvexHull

from .convex_bodies import StructuringElement, support, support_star, symmetral

logger = logging.getLogger(__name__)

EXACT = "exact-polytopal"
QUADRATURE = "quadrature"

CLOSED_TOL = 1e-8
UNIT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DiscreteSurfaceMeasure:
    """
    Weighted unit normals representing S*_{n−1}(A, ·).

    Attributes:
        normals: (m, n) unit normals
        weights: (m,) positive weights
        kind: "exact-polytopal" or "quadrature"
        dropped: number of degenerate atoms removed at construction
        reoriented: True when clockwise input was reversed
    """

    normals: np.ndarray
    weights: np.ndarray
    kind: str = EXACT
    dim: int = None
    dropped: int = 0
    reoriented: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        normals = np.asarray(self.normals, dtype=float)
        weights = np.asarray(self.weights, dtype=float).ravel()
        dim = self.dim if self.dim is not None else (normals.shape[1] if normals.ndim == 2 and normals.size else None)
        if dim is None:
            raise ValueError("an empty surface measure needs an explicit dim")
        normals = normals.reshape(-1, dim)
        if len(normals) != len(weights):
            raise ValueError(f"{len(normals)} normals but {len(weights)} weights")
        if np.any(weights <= 0):
            raise ValueError("surface measure weights must be positive")
        if len(normals) and np.max(np.abs(np.linalg.norm(normals, axis=1) - 1.0)) > UNIT_TOL:
            raise ValueError("surface measure normals must be unit to 1e-10")
        normals.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "dim", int(dim))

    def __len__(self):
        return len(self.weights)

    @property
    def total_mass(self):
        return math.fsum(self.weights)

    @property
    def closedness_defect(self):
        """‖Σ w_i ν_i‖ relative to the total mass (0 for the empty measure)."""
        mass = self.total_mass
        if mass == 0.0:
            return 0.0
        resultant = [math.fsum(self.weights * self.normals[:, j]) for j in range(self.dim)]
        return float(np.linalg.norm(resultant)) / mass

    @property
    def closed(self):
        return self.closedness_defect <= CLOSED_TOL

    def integrate(self, values):
        """Σ w_i f(ν_i) for precomputed values f(ν_i)."""
        return math.fsum(self.weights * np.asarray(values, dtype=float))

    def summary(self):
        return {
            "kind": self.kind,
            "atoms": len(self),
            "total_mass": self.total_mass,
            "closedness_defect": self.closedness_defect,
            "closed": self.closed,
            "dropped": self.dropped,
            "reoriented": self.reoriented,
        }

    def to_csv(self):
        """CSV atom dump with columns nx, ny[, nz], weight."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["nx", "ny", "nz"][: self.dim] + ["weight"])
        for normal, weight in zip(self.normals, self.weights):
            writer.writerow([f"{c:.17g}" for c in normal] + [f"{weight:.17g}"])
        return buffer.getvalue()


# ----------------------------------------------------------------------
# Polygons
# ----------------------------------------------------------------------


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 and ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True
    # collinear touching
    for a, b, c, d in ((q1, q2, p1, d1), (q1, q2, p2, d2), (p1, p2, q1, d3), (p1, p2, q2, d4)):
        if d == 0 and min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]):
            return True
    return False


def is_simple_polygon(vertices):
    """True when no two non-adjacent edges of the closed polygon meet."""
    v = np.asarray(vertices, dtype=float)
    m = len(v)
    for i in range(m):
        for j in range(i + 1, m):
            if j == i + 1 or (i == 0 and j == m - 1):
                continue
            if _segments_cross(v[i], v[(i + 1) % m], v[j], v[(j + 1) % m]):
                return False
    return True


def signed_area(vertices):
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * math.fsum(x * np.roll(y, -1) - np.roll(x, -1) * y)


def polygon_surface_measure(vertices):
    """
    Exact surface measure of a simple polygon: one atom per edge.

    For a counterclockwise edge with direction (dx, dy) the outward normal is
    (dy, −dx)/ℓ and the weight is the edge length ℓ.

    Args:
        vertices: ordered (m, 2) vertices, m >= 3

    Returns:
        DiscreteSurfaceMeasure of kind exact-polytopal

    Raises:
        ValueError: fewer than 3 vertices, zero-length edges, collinear or
            self-intersecting input
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise ValueError(f"a polygon needs at least 3 planar vertices, got shape {v.shape}")
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(edges, axis=1)
    if np.any(lengths == 0.0):
        raise ValueError("polygon has a zero-length edge")
    area = signed_area(v)
    if abs(area) <= 1e-14 * float(np.max(lengths)) ** 2:
        raise ValueError("polygon vertices are collinear")
    if not is_simple_polygon(v):
        raise ValueError("polygon is self-intersecting")

    reoriented = False
    if area < 0:
        logger.warning("clockwise polygon reversed to counterclockwise orientation")
        v = v[::-1]
        edges = np.roll(v, -1, axis=0) - v
        lengths = np.linalg.norm(edges, axis=1)
        reoriented = True

    normals = np.column_stack([edges[:, 1], -edges[:, 0]]) / lengths[:, None]
    return DiscreteSurfaceMeasure(normals, lengths, EXACT, dim=2, reoriented=reoriented)


# ----------------------------------------------------------------------
# Triangle meshes
# ----------------------------------------------------------------------


def mesh_surface_measure(triangles):
    """
    Exact surface measure of an oriented triangle mesh in R^3.

    Each triangle (a, b, c) contributes the normal of (b − a) × (c − a) with
    weight equal to its area. Zero-area triangles are dropped and counted.
    Open meshes are flagged through `closed`, not rejected.

    Args:
        triangles: (m, 3, 3) array of vertex triples, outward orientation

    Returns:
        DiscreteSurfaceMeasure of kind exact-polytopal
    """
    tri = np.asarray(triangles, dtype=float).reshape(-1, 3, 3)
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    doubled = np.linalg.norm(cross, axis=1)
    scale = float(np.max(doubled)) if len(doubled) else 0.0
    keep = doubled > 1e-14 * max(scale, 1e-300)
    dropped = int(np.count_nonzero(~keep))
    if dropped:
        logger.warning("dropped %d degenerate triangles", dropped)
    normals = cross[keep] / doubled[keep, None]
    measure = DiscreteSurfaceMeasure(normals, 0.5 * doubled[keep], EXACT, dim=3, dropped=dropped)
    if not measure.closed:
        logger.warning("triangle mesh is not closed (defect %.3g)", measure.closedness_defect)
    return measure


def box_triangles(lo, hi):
    """12 outward oriented triangles of the box [lo, hi] ⊂ R^3."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    corners = np.array([[hi[i] if (k >> i) & 1 else lo[i] for i in range(3)] for k in range(8)])
    # quads listed counterclockwise seen from outside
    quads = [(0, 2, 3, 1), (4, 5, 7, 6), (0, 1, 5, 4), (2, 6, 7, 3), (0, 4, 6, 2), (1, 3, 7, 5)]
    tris = []
    for a, b, c, d in quads:
        tris.append(corners[[a, b, c]])
        tris.append(corners[[a, c, d]])
    return np.array(tris)


def unit_cube_triangles():
    return box_triangles([0, 0, 0], [1, 1, 1])


def icosphere_triangles(radius=1.0, subdivisions=3):
    """
    Outward oriented icosphere mesh with vertices on the sphere of given radius.

    Args:
        radius: sphere radius
        subdivisions: number of 4-to-1 refinement passes

    Returns:
        (20·4^s, 3, 3) array of triangles
    """
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.array(p, dtype=float) / np.linalg.norm(p) for p in verts]

    for _ in range(subdivisions):
        midpoint_cache = {}

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint_cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                midpoint_cache[key] = len(verts) - 1
            return midpoint_cache[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined

    vertices = radius * np.array(verts)
    return vertices[np.array(faces)]


def convex_hull_surface_measure(points):
    """Exact surface measure of conv(points) ⊂ R^2 or R^3 from hull facets."""
    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    normals = hull.equations[:, :-1]
    normals = normals / np.linalg.norm(normals, axis=1)[:, None]
    if pts.shape[1] == 2:
        a, b = pts[hull.simplices[:, 0]], pts[hull.simplices[:, 1]]
        weights = np.linalg.norm(b - a, axis=1)
    else:
        tri = pts[hull.simplices]
        weights = 0.5 * np.linalg.norm(np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1)
    keep = weights > 0
    return DiscreteSurfaceMeasure(normals[keep], weights[keep], EXACT, dim=pts.shape[1])


def box_surface_measure(lo, hi):
    """Exact measure of an axis box in R^2 or R^3: atoms ±e_i with facet areas."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    sides = hi - lo
    if np.any(sides <= 0):
        raise ValueError(f"box must have positive side lengths, got {sides.tolist()}")
    n = len(sides)
    normals, weights = [], []
    for i in range(n):
        facet = float(np.prod(np.delete(sides, i)))
        for sign in (1.0, -1.0):
            e = np.zeros(n)
            e[i] = sign
            normals.append(e)
            weights.append(facet)
    return DiscreteSurfaceMeasure(np.array(normals), np.array(weights), EXACT, dim=n)


# ----------------------------------------------------------------------
# Quadrature measures
# ----------------------------------------------------------------------


def sphere_surface_measure(radius, level=3):
    """
    Quadrature representation of S*_2(ρB^3, ·).

    Product rule: Gauss-Legendre nodes in z = cos θ on each hemisphere
    separately (2^(level+3) nodes per hemisphere) times 2^(level+4) uniform
    azimuths offset by half a step. Splitting at the equator keeps integrands
    with a kink at z = 0, such as ⟨e_3, v⟩⁺ or ‖p_L v‖, resolved to ~1e-6
    at level 3. Weights are rescaled to total exactly 4πρ².

    Args:
        radius: ρ > 0
        level: positive integer refinement level

    Returns:
        DiscreteSurfaceMeasure of kind quadrature
    """
    if not radius > 0:
        raise ValueError(f"sphere radius must be positive, got {radius}")
    if level < 1:
        raise ValueError(f"level must be a positive integer, got {level}")
    nz = 2 ** (level + 3)
    nphi = 2 ** (level + 4)
    x, w = leggauss(nz)
    z = np.concatenate([0.5 * (x - 1.0), 0.5 * (x + 1.0)])
    wz = np.concatenate([0.5 * w, 0.5 * w])
    phi = 2.0 * np.pi * (np.arange(nphi) + 0.5) / nphi

    zz, pp = np.meshgrid(z, phi, indexing="ij")
    s = np.sqrt(np.maximum(0.0, 1.0 - zz**2))
    normals = np.column_stack([(s * np.cos(pp)).ravel(), (s * np.sin(pp)).ravel(), zz.ravel()])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    weights = np.repeat(wz, nphi) * (2.0 * np.pi / nphi)
    weights *= 4.0 * np.pi * radius**2 / math.fsum(weights)
    return DiscreteSurfaceMeasure(normals, weights, QUADRATURE, dim=3, meta={"radius": radius, "level": level})


def circle_surface_measure(radius, count=720):
    """Equal-weight quadrature of S*_1(ρB^2, ·) with total exactly 2πρ."""
    if not radius > 0:
        raise ValueError(f"circle radius must be positive, got {radius}")
    angles = 2.0 * np.pi * (np.arange(count) + 0.5) / count
    normals = np.column_stack([np.cos(angles), np.sin(angles)])
    weights = np.full(count, 2.0 * np.pi * radius / count)
    return DiscreteSurfaceMeasure(normals, weights, QUADRATURE, dim=2, meta={"radius": radius})


# ----------------------------------------------------------------------
# Measure arithmetic
# ----------------------------------------------------------------------


def disjoint_union_measure(parts, dim=None):
    """
    Concatenate the atoms of measures of pairwise disjoint sets.

    An empty list gives the empty measure in dimension `dim` (default 3).
    """
    parts = list(parts)
    if not parts:
        return DiscreteSurfaceMeasure(np.zeros((0, dim or 3)), np.zeros(0), EXACT, dim=dim or 3)
    dims = {p.dim for p in parts}
    if len(dims) != 1:
        raise ValueError(f"cannot join surface measures of dimensions {sorted(dims)}")
    kind = EXACT if all(p.kind == EXACT for p in parts) else QUADRATURE
    return DiscreteSurfaceMeasure(
        np.vstack([p.normals for p in parts]),
        np.concatenate([p.weights for p in parts]),
        kind,
        dim=dims.pop(),
        dropped=sum(p.dropped for p in parts),
    )


def reflect_measure(S):
    """Surface measure of the complement: every normal negated."""
    return DiscreteSurfaceMeasure(-S.normals, S.weights, S.kind, dim=S.dim, dropped=S.dropped)


def scale_measure(S, factor):
    """Surface measure of the dilate factor·A: weights times factor^(n−1)."""
    if not factor > 0:
        raise ValueError(f"scale factor must be positive, got {factor}")
    return DiscreteSurfaceMeasure(S.normals, S.weights * factor ** (S.dim - 1), S.kind, dim=S.dim)


def _check_dims(S, Q):
    if S.dim != Q.dim:
        raise ValueError(f"surface measure dimension {S.dim} != structuring element dimension {Q.dim}")


def anisotropic_perimeter(S, Q):
    """
    P_Q(A) = Σ w_i · max(0, h_Q(ν_i)).

    With Q = B^n this is the ordinary perimeter P(A).
    """
    _check_dims(S, Q)
    if len(S) == 0:
        return 0.0
    return S.integrate(support_star(Q, S.normals))


def segment_integral(S, u):
    """Σ w_i ⟨u, ν_i⟩⁺, computed directly from the atoms."""
    u = np.asarray(u, dtype=float)
    if len(u) != S.dim:
        raise ValueError(f"direction dimension {len(u)} != surface measure dimension {S.dim}")
    if len(S) == 0:
        return 0.0
    return S.integrate(np.maximum(0.0, S.normals @ u))


def sheet_content_exact(S, Q):
    """
    ∫ h(◊Q, ν) dH^{n−1}, the Q-Minkowski content of a surface whose
    normals are known up to sign (the weights are surface areas).
    """
    _check_dims(S, Q)
    if len(S) == 0:
        return 0.0
    return S.integrate(support(symmetral(Q), S.normals))


def perimeter_triple(S, Q):
    """(P_Q, P_◊Q, P) as reported by the perimeter command."""
    return {
        "P_Q": anisotropic_perimeter(S, Q),
        "P_symmetral": anisotropic_perimeter(S, symmetral(Q)),
        "P_iso": anisotropic_perimeter(S, StructuringElement.unit_ball(S.dim)),
    }


if __name__ == "__main__":
    square = polygon_surface_measure([[0, 0], [1, 0], [1, 1], [0, 1]])
    sphere = sphere_surface_measure(1.0, level=3)
    disk = StructuringElement.planar_disk([[1, 0, 0], [0, 1, 0]])

    print("Anisotropic perimeters")
    print("-" * 40)
    print(f"P(square)            = {anisotropic_perimeter(square, StructuringElement.unit_ball(2))}")
    print(f"P_[0,e1](square)     = {anisotropic_perimeter(square, StructuringElement.segment([0, 0], [1, 0]))}")
    print(f"P_disk(sphere)       = {anisotropic_perimeter(sphere, disk):.10f}  (π² = {math.pi**2:.10f})")
    print(f"∫⟨e3,v⟩⁺ dS(sphere)  = {segment_integral(sphere, [0, 0, 1]):.10f}  (π = {math.pi:.10f})")
