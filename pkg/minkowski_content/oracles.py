"""
Closed-Form Parallel Volumes

Exact dilation volumes for the test shapes, kept as Symbolica expressions in
the dilation radius r so that their derivatives at r = 0 (the exact
Minkowski contents) come out symbolically.

Excess volumes λ_n((A ⊕ rQ) ∖ A):
    box a×b       ⊕ B²        2(a + b)·r + π·r²
    disk ρ        ⊕ B²        2πρ·r + π·r²
    ball ρ        ⊕ B³        4πρ²·r + 4πρ·r² + (4π/3)·r³
    box a×b×c     ⊕ B³        2(ab + bc + ca)·r + π(a + b + c)·r² + (4π/3)·r³
    ball ρ        ⊕ disk      π²ρ²·r + 2πρ·r²       (disk = B³ ∩ L, dim L = 2)
    polygon       ⊕ [0, u]    r·Σ ℓ_i ⟨u, ν_i⟩⁺

Sheet volumes λ_n(E ⊕ rQ), r ≤ ρ:
    circle ρ      ⊕ B²        4πρ·r
    segment ℓ     ⊕ B²        2ℓ·r + π·r²
    sphere ρ      ⊕ B³        8πρ²·r + (8π/3)·r³

Divergence bound for the isotropic excess of a ball packing, evaluated at
r = 3δ(t):
    3D   f(r) ≥ (4π/9)(1 − 32⁻⁶)·t³/δ(t)
    2D   f(r) ≥ (π/3)(1 − 32⁻²)·t²/δ(t)
"""

import logging
import math

import numpy as np
from symbolica import Expression, S

from .convex_bodies import BALL, SEGMENT, StructuringElement
from .surface_measures import box_surface_measure, segment_integral

logger = logging.getLogger(__name__)

SHEET_TAGS = ("circle", "segment_curve", "sphere_shell")


class SteinerOracle:
    """
    Table of exact parallel-volume polynomials in r.

    Expressions use the symbols r, rho, a, b, c, width, length and a
    symbol for π that is bound to math.pi at evaluation time.
    """

    def __init__(self):
        """Initialize symbols and the expression table."""
        self.r = S("r")
        self.rho = S("rho")
        self.a = S("a")
        self.b = S("b")
        self.c = S("c")
        self.width = S("width")
        self.length = S("length")
        self.pi = S("piconst")

        r, rho, a, b, c, pi = self.r, self.rho, self.a, self.b, self.c, self.pi
        four_thirds = Expression.num(4) / 3
        self._table = {
            ("box", "ball"): 2 * (a + b) * r + pi * r**2,
            ("disk", "ball"): 2 * pi * rho * r + pi * r**2,
            ("ball3", "ball3"): 4 * pi * rho**2 * r + 4 * pi * rho * r**2 + four_thirds * pi * r**3,
            ("box3", "ball3"): 2 * (a * b + b * c + c * a) * r + pi * (a + b + c) * r**2 + four_thirds * pi * r**3,
            ("ball3", "disk"): pi**2 * rho**2 * r + 2 * pi * rho * r**2,
            ("polygon", "segment"): self.width * r,
            ("box", "segment"): self.width * r,
            ("circle", "ball"): 4 * pi * rho * r,
            ("segment_curve", "ball"): 2 * self.length * r + pi * r**2,
            ("sphere_shell", "ball3"): 8 * pi * rho**2 * r + 2 * four_thirds * pi * r**3,
        }
        self._content_cache = {}

    def supported(self):
        return sorted(self._table)

    def expression(self, shape, q):
        """Symbolic volume for the pair (shape tag, Q tag)."""
        if shape == "square":
            shape = "box"
        try:
            return self._table[(shape, q)]
        except KeyError:
            raise ValueError(f"no closed form for shape {shape!r} with Q {q!r}; supported: {self.supported()}") from None

    def content_expression(self, shape, q):
        """d/dr of the volume at r = 0 (halved for sheets)."""
        key = (shape, q)
        if key not in self._content_cache:
            expr = self.expression(shape, q).derivative(self.r)
            expr = expr.replace(self.r, Expression.num(0)).expand()
            if shape in SHEET_TAGS:
                expr = expr / 2
            self._content_cache[key] = expr
        return self._content_cache[key]

    def _bindings(self, params):
        values = {self.pi: math.pi}
        defaults = {"a": 1.0, "b": 1.0, "c": 1.0, "rho": 1.0, "width": 0.0, "length": 1.0}
        for name, default in defaults.items():
            values[getattr(self, name)] = float(params.get(name, default))
        return values

    def evaluate(self, expr, r=0.0, **params):
        values = self._bindings(params)
        values[self.r] = float(r)
        return float(expr.evaluate(values, {}))

    def volume(self, shape, q, r, **params):
        return self.evaluate(self.expression(shape, q), r, **params)

    def content(self, shape, q, **params):
        return self.evaluate(self.content_expression(shape, q), **params)


_ORACLE = None


def default_oracle():
    global _ORACLE
    if _ORACLE is None:
        _ORACLE = SteinerOracle()
    return _ORACLE


def q_tag(Q):
    """
    (tag, scale, extra params) for a structuring element in the table.

    Balls centered at 0 map to "ball" (2D, full), "ball3" (3D, full) or
    "disk" (3D, 2-subspace); their radius becomes a scale on r. Segments
    [0, u] map to "segment" with u in the extra parameters.
    """
    if isinstance(Q, str):
        return Q, 1.0, {}
    if Q.kind == BALL and np.allclose(Q.points[0], 0.0):
        k = len(Q.basis)
        if Q.dim == 2 and k == 2:
            return "ball", Q.radius, {}
        if Q.dim == 3 and k == 3:
            return "ball3", Q.radius, {}
        if Q.dim == 3 and k == 2:
            return "disk", Q.radius, {}
    if Q.kind == SEGMENT and np.allclose(Q.points[0], 0.0):
        return "segment", 1.0, {"u": np.array(Q.points[1])}
    raise ValueError(f"structuring element {Q!r} has no closed-form oracle")


def _resolve(shape, Q, params):
    tag, factor, extra = q_tag(Q)
    params = dict(params)
    if tag == "segment" and "width" not in params:
        measure = params.pop("measure", None)
        if measure is None:
            if shape in ("box", "square"):
                measure = box_surface_measure([0.0, 0.0], [params.get("a", 1.0), params.get("b", 1.0)])
            else:
                raise ValueError("segment oracle needs a 'measure' or a 'width' parameter")
        params["width"] = segment_integral(measure, extra["u"])
    params.pop("measure", None)
    return tag, factor, params


def analytic_excess(shape, Q, r, **params):
    """
    Exact λ_n((A ⊕ rQ) ∖ A) (or λ_n(E ⊕ rQ) for sheet tags).

    Args:
        shape: tag such as "square", "box", "disk", "ball3", "box3",
            "polygon", "circle", "segment_curve", "sphere_shell"
        Q: tag ("ball", "ball3", "disk", "segment") or a StructuringElement
        r: radius >= 0
        params: shape parameters (rho, a, b, c, length, width, measure)

    Returns:
        float

    Raises:
        ValueError: unsupported pair
    """
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    tag, factor, params = _resolve(shape, Q, params)
    return default_oracle().volume(shape, tag, r * factor, **params)


def oracle_content(shape, Q, **params):
    """Exact outer content SM_Q(A), or M_Q(E) for sheet tags."""
    tag, factor, params = _resolve(shape, Q, params)
    return factor * default_oracle().content(shape, tag, **params)


def shape_oracle(shape, Q):
    """Oracle callables (excess(r), content) for a shapes.Shape, or None."""
    described = shape.oracle()
    if described is None:
        return None
    tag, params = described
    try:
        content = oracle_content(tag, Q, **params)
    except ValueError:
        return None
    return (lambda r: analytic_excess(tag, Q, r, **params)), content


# ----------------------------------------------------------------------
# Ball packings
# ----------------------------------------------------------------------


def isotropic_lower_bound(t, law, dim=3):
    """
    Lower bound for the isotropic f(r) = λ((A ⊕ rB) ∖ A)/r of a packing at
    r = 3δ(t).

    Returns:
        (r, bound)
    """
    delta = law.delta(t)
    if dim == 3:
        bound = 4.0 * math.pi / 9.0 * (1.0 - 32.0**-6) * t**3 / delta
    elif dim == 2:
        bound = math.pi / 3.0 * (1.0 - 32.0**-2) * t**2 / delta
    else:
        raise ValueError(f"packings exist in dimensions 2 and 3, got {dim}")
    return 3.0 * delta, bound


def lower_bound_sequence(law, ts, dim=3):
    """[(r, bound)] for each t, in the given order."""
    return [isotropic_lower_bound(t, law, dim) for t in ts]


def cap_area(rho, d, r):
    """
    Area of ∂B(x, ρ) ∩ B(a, r) with d = ‖a − x‖.

        4πρ²                      if r ≥ d + ρ
        πρ(r² − (ρ − d)²)/d       if |ρ − d| < r < d + ρ
        0                         otherwise

    Vectorized over all arguments.
    """
    rho, d, r = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (rho, d, r)))
    full = r >= d + rho
    partial = ~full & (r > np.abs(rho - d))
    safe_d = np.where(d > 0, d, 1.0)
    area = np.where(partial, math.pi * rho * (r**2 - (rho - d) ** 2) / safe_d, 0.0)
    area = np.where(full, 4.0 * math.pi * rho**2, area)
    return float(area) if area.ndim == 0 else area


if __name__ == "__main__":
    oracle = SteinerOracle()
    print("Closed-form contents")
    print("-" * 40)
    for shape, q in oracle.supported():
        print(f"{shape:>14} ⊕ {q:<8} content = {oracle.content_expression(shape, q)}")
    disk = StructuringElement.planar_disk([[1, 0, 0], [0, 1, 0]])
    print(f"\nball ⊕ 0.1·disk excess = {analytic_excess('ball3', disk, 0.1):.12f}")
    print(f"π²·0.1 + 2π·0.01       = {math.pi**2 * 0.1 + 2 * math.pi * 0.01:.12f}")
