"""
Structuring Elements and Support Functions

This module represents the compact convex structuring elements Q used as
dilation kernels and evaluates their support functions exactly.

Supported variants:
    Singleton(p)                   Q = {p}
    Segment(a, b)                  Q = [a, b]
    PolytopeHull(v_1, ..., v_m)    Q = conv{v_i}        (redundant points allowed)
    BallInSubspace(c, ρ, L)        Q = c + ρ·(B^n ∩ L),  L = span(basis)

Key formulas:
    h_Q(v)      = max_{x ∈ Q} ⟨x, v⟩
    h*_Q(v)     = h(Q ∪ {0}, v) = max(0, h_Q(v))
    h_{c+ρB_L}  = ⟨c, v⟩ + ρ·‖p_L v‖
    ◊Q          = (Q ⊕ (−Q)) / 2,   h_{◊Q}(v) = ½(h_Q(v) + h_Q(−v))
    dist(x, Q)  = max(0, max_{‖v‖=1} ⟨x, v⟩ − h_Q(v))

Point-set variants are never pruned to their hull: every support evaluation
is a max over the stored points, which is unaffected by redundant ones.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull
from scipy.spatial.distance import pdist

logger = logging.getLogger(__name__)

SINGLETON = "singleton"
SEGMENT = "segment"
POLYTOPE = "polytope"
BALL = "ball"

KINDS = (SINGLETON, SEGMENT, POLYTOPE, BALL)
POINT_KINDS = (SINGLETON, SEGMENT, POLYTOPE)

ORTHONORMAL_TOL = 1e-12
SYMMETRY_TOL = 1e-10


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def orthonormalize(vectors, dim):
    """
    Stabilized (two pass modified) Gram-Schmidt.

    Args:
        vectors: k vectors of length dim
        dim: ambient dimension n

    Returns:
        (k, n) array with orthonormal rows

    Raises:
        ValueError: if the vectors are linearly dependent
    """
    rows = np.asarray(vectors, dtype=float).reshape(-1, dim)
    basis = []
    for row in rows:
        w = row.copy()
        for _ in range(2):
            for b in basis:
                w -= np.dot(w, b) * b
        norm = np.linalg.norm(w)
        if norm <= 1e-9 * max(1.0, np.linalg.norm(row)):
            raise ValueError(f"basis vectors are linearly dependent: {rows.tolist()}")
        basis.append(w / norm)
    return np.array(basis).reshape(len(basis), dim)


@dataclass(frozen=True, eq=False)
class StructuringElement:
    """
    A compact convex body Q in R^n.

    Attributes:
        kind: one of "singleton", "segment", "polytope", "ball"
        points: (m, n) array; the point for a singleton, the endpoints of a
            segment, the generating points of a hull, the center of a ball
        radius: ball radius ρ (0 for the point-set variants)
        basis: (k, n) orthonormal rows spanning L for a ball, else None
    """

    kind: str
    points: np.ndarray
    radius: float = 0.0
    basis: np.ndarray = None

    symmetric = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown structuring element kind {self.kind!r}")
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if points.size == 0:
            raise ValueError(f"{self.kind} needs at least one point")
        if not np.all(np.isfinite(points)):
            raise ValueError("structuring element points must be finite")
        if self.kind == SEGMENT and len(points) != 2:
            raise ValueError(f"segment needs exactly 2 endpoints, got {len(points)}")
        if self.kind in (SINGLETON, BALL) and len(points) != 1:
            raise ValueError(f"{self.kind} needs exactly one point")
        object.__setattr__(self, "points", _frozen(points))

        if self.kind == BALL:
            if not self.radius >= 0 or not math.isfinite(self.radius):
                raise ValueError(f"ball radius must be finite and >= 0, got {self.radius}")
            n = points.shape[1]
            basis = np.eye(n) if self.basis is None else np.asarray(self.basis, dtype=float).reshape(-1, n)
            gram = basis @ basis.T
            if len(basis) > n or not np.allclose(gram, np.eye(len(basis)), rtol=0.0, atol=ORTHONORMAL_TOL):
                raise ValueError("ball basis must be orthonormal to 1e-12")
            object.__setattr__(self, "basis", _frozen(basis))
            object.__setattr__(self, "radius", float(self.radius))
        else:
            object.__setattr__(self, "basis", None)
            object.__setattr__(self, "radius", 0.0)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def singleton(cls, point):
        return cls(SINGLETON, [point])

    @classmethod
    def segment(cls, a, b):
        """The segment [a, b]; [0, u] is segment(0, u)."""
        return cls(SEGMENT, [a, b])

    @classmethod
    def polytope(cls, vertices):
        return cls(POLYTOPE, vertices)

    @classmethod
    def ball(cls, center, radius=1.0, basis=None):
        """
        Ball of radius ρ around center inside the affine subspace center + L.

        Args:
            center: n-vector
            radius: ρ >= 0
            basis: spanning vectors of L (re-orthonormalized); None means R^n

        Returns:
            StructuringElement of kind "ball"
        """
        center = np.asarray(center, dtype=float).ravel()
        if basis is not None:
            basis = orthonormalize(basis, len(center))
        return cls(BALL, [center], radius, basis)

    @classmethod
    def unit_ball(cls, dim):
        return cls.ball(np.zeros(dim), 1.0)

    @classmethod
    def planar_disk(cls, basis, radius=1.0):
        """Centered disk ρ·(B^n ∩ L) for a 2-subspace L of R^n."""
        basis = np.asarray(basis, dtype=float)
        return cls.ball(np.zeros(basis.shape[-1]), radius, basis)

    # ------------------------------------------------------------------

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def subspace_dim(self):
        """Dimension k of L for balls, None for point sets."""
        return None if self.basis is None else len(self.basis)

    def to_dict(self):
        if self.kind == SINGLETON:
            return {"type": SINGLETON, "point": self.points[0].tolist()}
        if self.kind == SEGMENT:
            return {"type": SEGMENT, "a": self.points[0].tolist(), "b": self.points[1].tolist()}
        if self.kind == POLYTOPE:
            return {"type": POLYTOPE, "vertices": self.points.tolist()}
        return {
            "type": BALL,
            "center": self.points[0].tolist(),
            "radius": self.radius,
            "basis": self.basis.tolist(),
        }

    def __repr__(self):
        if self.kind == BALL:
            return f"{type(self).__name__}(ball, center={self.points[0].tolist()}, radius={self.radius}, k={len(self.basis)})"
        return f"{type(self).__name__}({self.kind}, points={self.points.tolist()})"


class SymmetricBody(StructuringElement):
    """
    An origin-symmetric structuring element, such as the symmetral ◊Q.

    Construction checks h(v) = h(−v) on the direction net.
    """

    symmetric = True

    def __post_init__(self):
        super().__post_init__()
        if self.dim in (2, 3):
            net = direction_net(self.dim)
            plus = support(self, net)
            minus = support(self, -net)
            scale = max(1.0, float(np.max(np.abs(plus))))
            if np.max(np.abs(plus - minus)) > SYMMETRY_TOL * scale:
                raise ValueError("body is not origin-symmetric")

    @classmethod
    def from_element(cls, Q):
        return cls(Q.kind, Q.points, Q.radius, Q.basis)


def element_from_dict(spec):
    """
    Parse a JSON structuring element descriptor.

    Examples:
        {"type": "segment", "a": [0, 0, 0], "b": [0, 0, 1]}
        {"type": "ball", "center": [0, 0, 0], "radius": 1.0, "basis": [[1, 0, 0], [0, 1, 0]]}
        {"type": "polytope", "vertices": [[0, 0], [1, 0], [0, 1]]}
        {"type": "singleton", "point": [0, 0]}
    """
    kind = spec.get("type")
    if kind == SINGLETON:
        return StructuringElement.singleton(spec["point"])
    if kind == SEGMENT:
        return StructuringElement.segment(spec["a"], spec["b"])
    if kind == POLYTOPE:
        return StructuringElement.polytope(spec["vertices"])
    if kind == BALL:
        return StructuringElement.ball(spec["center"], spec.get("radius", 1.0), spec.get("basis"))
    raise ValueError(f"unknown structuring element type {kind!r}")


# ----------------------------------------------------------------------
# Support functions
# ----------------------------------------------------------------------


def support(Q, v):
    """
    Support function h_Q(v) = max_{x ∈ Q} ⟨x, v⟩.

    Args:
        Q: StructuringElement
        v: an n-vector or an (m, n) array of directions (need not be unit)

    Returns:
        float for a single direction, (m,) array otherwise
    """
    v = np.asarray(v, dtype=float)
    single = v.ndim == 1
    directions = np.atleast_2d(v)
    if directions.shape[1] != Q.dim:
        raise ValueError(f"direction dimension {directions.shape[1]} != body dimension {Q.dim}")
    if Q.kind == BALL:
        values = directions @ Q.points[0]
        if Q.radius > 0 and len(Q.basis):
            values = values + Q.radius * np.linalg.norm(directions @ Q.basis.T, axis=1)
    else:
        values = np.max(directions @ Q.points.T, axis=1)
    return float(values[0]) if single else values


def support_star(Q, v):
    """h(Q ∪ {0}, v) = max(0, h_Q(v)), the integrand of P_Q."""
    value = support(Q, v)
    return max(0.0, value) if np.ndim(value) == 0 else np.maximum(0.0, value)


def symmetral(Q):
    """
    The symmetral ◊Q = (Q ⊕ (−Q)) / 2.

    Polytope:  all pairwise half differences (v_i − v_j)/2
    Segment:   [−(b−a)/2, (b−a)/2]
    Ball:      same radius and subspace, centered at 0
    Singleton: {0}
    """
    if Q.kind == SINGLETON:
        return SymmetricBody(SINGLETON, [np.zeros(Q.dim)])
    if Q.kind == SEGMENT:
        half = 0.5 * (Q.points[1] - Q.points[0])
        return SymmetricBody(SEGMENT, [-half, half])
    if Q.kind == BALL:
        return SymmetricBody(BALL, [np.zeros(Q.dim)], Q.radius, Q.basis)
    differences = 0.5 * (Q.points[:, None, :] - Q.points[None, :, :])
    return SymmetricBody(POLYTOPE, differences.reshape(-1, Q.dim))


def scale(Q, r):
    """
    The dilate rQ; h_{rQ} = r·h_Q.

    Raises:
        ValueError: if r < 0
    """
    r = float(r)
    if r < 0 or not math.isfinite(r):
        raise ValueError(f"scale factor must be finite and >= 0, got {r}")
    cls = SymmetricBody if Q.symmetric else StructuringElement
    if r == 0.0:
        # 0·Q = {0}
        return cls(SINGLETON, [np.zeros(Q.dim)])
    return cls(Q.kind, Q.points * r, Q.radius * r, Q.basis)


def translate(Q, t):
    t = np.asarray(t, dtype=float).ravel()
    if len(t) != Q.dim:
        raise ValueError(f"translation dimension {len(t)} != body dimension {Q.dim}")
    return StructuringElement(Q.kind, Q.points + t, Q.radius, Q.basis)


def reflect(Q):
    """−Q; h_{−Q}(v) = h_Q(−v)."""
    cls = SymmetricBody if Q.symmetric else StructuringElement
    return cls(Q.kind, -Q.points, Q.radius, Q.basis)


def minkowski_sum_hull(P1, P2):
    """
    Minkowski sum of two point-set bodies as the hull of all pairwise sums.

    Raises:
        TypeError: for ball arguments (no finite vertex description)
    """
    for P in (P1, P2):
        if P.kind not in POINT_KINDS:
            raise TypeError(f"minkowski_sum_hull needs point-set bodies, got {P.kind}")
    if P1.dim != P2.dim:
        raise ValueError(f"dimension mismatch: {P1.dim} vs {P2.dim}")
    sums = P1.points[:, None, :] + P2.points[None, :, :]
    return StructuringElement(POLYTOPE, sums.reshape(-1, P1.dim))


def with_origin(Q):
    """conv(Q ∪ {0}) for point-set bodies."""
    if Q.kind not in POINT_KINDS:
        raise TypeError(f"with_origin needs a point-set body, got {Q.kind}")
    return StructuringElement(POLYTOPE, np.vstack([Q.points, np.zeros(Q.dim)]))


# ----------------------------------------------------------------------
# Geometry helpers
# ----------------------------------------------------------------------


def direction_net(dim, count=None):
    """
    Deterministic unit direction net.

    2D: `count` (default 360) uniform angles.
    3D: `count` (default 1024) Fibonacci sphere points.
    """
    if dim == 2:
        count = 360 if count is None else count
        angles = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if dim == 3:
        count = 1024 if count is None else count
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        phi = np.pi * (1.0 + math.sqrt(5.0)) * i
        s = np.sqrt(1.0 - z * z)
        return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    raise ValueError(f"direction nets exist for dimensions 2 and 3, got {dim}")


def bounding_box(Q):
    """Axis-aligned bounding box (lo, hi) from coordinate support values."""
    axes = np.eye(Q.dim)
    return -support(Q, -axes), support(Q, axes)


def diameter(Q):
    if Q.kind == BALL:
        return 2.0 * Q.radius if len(Q.basis) else 0.0
    if len(Q.points) < 2:
        return 0.0
    return float(np.max(pdist(Q.points)))


def vertex_points(Q):
    if Q.kind not in POINT_KINDS:
        raise TypeError("a ball has no finite vertex description")
    return np.array(Q.points)


def _segment_distances(p, a, b):
    """(m, e) distances from points p to the segments [a_j, b_j]."""
    ab = b - a
    length2 = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    ap = p[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("mej,ej->me", ap, ab) / length2, 0.0, 1.0)
    return np.linalg.norm(ap - t[:, :, None] * ab[None, :, :], axis=2)


def _triangle_distances(p, a, b, c):
    """(m, f) distances from 3D points p to the triangles (a_j, b_j, c_j)."""
    normal = np.cross(b - a, c - a)
    normal = normal / np.maximum(np.linalg.norm(normal, axis=1), 1e-300)[:, None]
    ap = p[:, None, :] - a[None, :, :]
    height = np.einsum("mfj,fj->mf", ap, normal)
    foot = p[:, None, :] - height[:, :, None] * normal[None, :, :]
    inside = np.ones(height.shape, dtype=bool)
    for u, v in ((a, b), (b, c), (c, a)):
        edge_side = np.einsum("mfj,fj->mf", np.cross(v - u, foot - u[None, :, :]), normal)
        inside &= edge_side >= 0.0
    edges = np.minimum.reduce([_segment_distances(p, u, v) for u, v in ((a, b), (b, c), (c, a))])
    return np.where(inside, np.abs(height), edges)


def _hull_distance(points, x, chunk=8192):
    """
    Exact distance from x to conv(points).

    Works in an orthonormal frame of the affine hull, so flat hulls (a
    polygon in R³, collinear points) are handled by their own dimension.
    """
    center = points.mean(axis=0)
    _, sv, vt = np.linalg.svd(points - center)
    rank = int(np.sum(sv > 1e-12 * max(1.0, float(sv[0])))) if len(sv) else 0
    frame = vt[:rank]
    local_points = (points - center) @ frame.T
    hull = ConvexHull(local_points) if rank >= 2 else None
    out = np.empty(len(x))
    for start in range(0, len(x), chunk):
        w = x[start : start + chunk] - center
        local = w @ frame.T
        if rank == points.shape[1]:
            across2 = np.zeros(len(w))
        else:
            across = w - local @ frame
            across2 = np.einsum("ij,ij->i", across, across)
        if rank == 0:
            within = np.zeros(len(w))
        elif rank == 1:
            lo, hi = local_points[:, 0].min(), local_points[:, 0].max()
            within = np.maximum(lo - local[:, 0], 0.0) + np.maximum(local[:, 0] - hi, 0.0)
        else:
            gaps = local @ hull.equations[:, :-1].T + hull.equations[:, -1]
            outside = gaps.max(axis=1) > 0.0
            faces = local_points[hull.simplices]
            if rank == 2:
                nearest = _segment_distances(local, faces[:, 0], faces[:, 1]).min(axis=1)
            else:
                nearest = _triangle_distances(local, faces[:, 0], faces[:, 1], faces[:, 2]).min(axis=1)
            within = np.where(outside, nearest, 0.0)
        out[start : start + chunk] = np.sqrt(within**2 + across2)
    return out


def distance(Q, x):
    """
    Euclidean distance from points to Q.

    Exact for singletons, segments and balls in subspaces:
        dist(x, c + ρB_L)² = max(‖p_L w‖ − ρ, 0)² + ‖p_{L⊥} w‖²,  w = x − c
    Hulls use the facets of scipy.spatial.ConvexHull in the affine span of
    the points: distance to the nearest edge (2D) or triangle (3D) outside
    the hull, 0 inside, combined with the offset from the span.

    Args:
        Q: StructuringElement
        x: (m, n) array of points or a single n-vector

    Returns:
        (m,) array of distances, or a float for a single point
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if Q.kind == SINGLETON:
        d = np.linalg.norm(pts - Q.points[0], axis=1)
    elif Q.kind == SEGMENT:
        a, b = Q.points
        ab = b - a
        length2 = float(ab @ ab)
        if length2 == 0.0:
            d = np.linalg.norm(pts - a, axis=1)
        else:
            t = np.clip((pts - a) @ ab / length2, 0.0, 1.0)
            d = np.linalg.norm(pts - (a + t[:, None] * ab), axis=1)
    elif Q.kind == BALL:
        w = pts - Q.points[0]
        coefficients = w @ Q.basis.T
        parallel = np.linalg.norm(coefficients, axis=1)
        perpendicular2 = np.maximum(np.einsum("ij,ij->i", w, w) - parallel**2, 0.0)
        d = np.sqrt(np.maximum(parallel - Q.radius, 0.0) ** 2 + perpendicular2)
    else:
        d = _hull_distance(Q.points, pts)
    return float(d[0]) if single else d


def contains_origin(Q, tol=1e-12):
    """0 ∈ Q, by exact formulas or by a linear feasibility problem for hulls."""
    if Q.kind != POLYTOPE:
        return distance(Q, np.zeros(Q.dim)) <= tol
    m = len(Q.points)
    # λ >= 0, Σλ = 1, Σλ_i v_i = 0
    a_eq = np.vstack([Q.points.T, np.ones((1, m))])
    b_eq = np.concatenate([np.zeros(Q.dim), [1.0]])
    result = linprog(np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return bool(result.status == 0)


if __name__ == "__main__":
    square = StructuringElement.polytope([[0, 0], [1, 0], [1, 1], [0, 1]])
    u = StructuringElement.segment([0, 0], [1, 0])
    disk = StructuringElement.planar_disk([[1, 0, 0], [0, 1, 0]])

    print("Support functions")
    print("-" * 40)
    print(f"h_square((1,0))        = {support(square, [1, 0])}")
    print(f"h*_[0,e1]((-1,0))      = {support_star(u, [-1, 0])}")
    print(f"h_disk((0,0,1))        = {support(disk, [0, 0, 1])}")
    print(f"◊square                = {symmetral(square)}")
    print(f"square ⊕ (−square) at e1 = {support(minkowski_sum_hull(square, reflect(square)), [1, 0])}")
