"""
Pathological Example Generators

Ball packings
-------------
A strictly increasing δ with δ(0) = 0 and δ(t) = o(tⁿ) fixes a greedy maximal
set S ⊂ B(0,1) ∖ B(0, t_min) with pairwise disjoint balls B(x, δ(‖x‖)):

    ‖x − y‖ > δ(x) + δ(y)        for x ≠ y in S

The set A is the union of the much smaller balls B(x, ρ(x)), ρ = δⁿ
(ρ = δ³ in R³, ρ = δ² for the planar analogue). Its perimeter is finite,

    P(A)      = Σ 4πρ²     (3D)      Σ 2πρ     (2D)
    P_disk(A) = Σ π²ρ²     (Q = planar unit disk in R³)

while its isotropic outer content diverges: at r = 3δ(t) the dilation covers
the packing inside B(0, t), giving f(r) ≥ (4π/9)(1 − 32⁻⁶)·t³/δ(t).

δ laws:
    power(k, scale)   δ(t) = scale·tᵏ/(32k) for t ≤ 1, continued linearly
    exp(δ₀)           δ(t) = δ₀·e^{−1/t}

Candidates are processed outside-in in radial bands over which δ changes by
at most `band_ratio`; inside a band they come from a scrambled Halton
sequence mapped uniformly onto the band.

Products and three copies
-------------------------
    A = C × D ⊂ R^k × R^{n−k}
    λ_n((A ⊕ r(B^k × {0})) ∖ A) = λ_k((C ⊕ rB^k) ∖ C)·λ_{n−k}(D)

Three copies of D × [0,1] with axes e₁, e₂, e₃: every plane L misses one
of the axes, and the copy along that axis carries the divergence of D.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.spatial import cKDTree
from scipy.stats import qmc
from tqdm import tqdm

from .convex_bodies import StructuringElement
from .errors import ResourceCapError
from .estimators import EstimatorSettings, build_report, packing_content, packing_excess
from .reports import to_jsonable, write_text_atomic
from .shapes import BallShape, BallUnionShape, BoxShape, PrismShape, UnionShape, ball_volume
from .surface_measures import (
    anisotropic_perimeter,
    disjoint_union_measure,
    scale_measure,
    sphere_surface_measure,
)
from .voxel_sets import product_excess

logger = logging.getLogger(__name__)

LIPSCHITZ_MAX = 1.0 / 32.0
DEFAULT_MAX_REJECTIONS = 100_000
DEFAULT_AUDIT_PROBES = 10_000
DEFAULT_COUNT_CAP = 10**7


# ----------------------------------------------------------------------
# δ laws
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class DeltaLaw:
    """
    Radius law δ(t) of the packing.

    Attributes:
        family: "power" or "exp"
        k: exponent of the power law
        scale: factor on the power law (1 gives δ(t) = tᵏ/(32k))
        delta0: prefactor of the exponential law
    """

    family: str
    k: float = 4.0
    scale: float = 1.0
    delta0: float = 0.05

    def __post_init__(self):
        if self.family not in ("power", "exp"):
            raise ValueError(f"delta law family must be 'power' or 'exp', got {self.family!r}")
        if self.family == "power" and not (self.k > 0 and self.scale > 0):
            raise ValueError(f"power law needs k > 0 and scale > 0, got k={self.k}, scale={self.scale}")
        if self.family == "exp" and not self.delta0 > 0:
            raise ValueError(f"exp law needs delta0 > 0, got {self.delta0}")

    @classmethod
    def power(cls, k=4, scale=1.0):
        return cls("power", k=float(k), scale=float(scale))

    @classmethod
    def exp(cls, delta0=0.05):
        return cls("exp", delta0=float(delta0))

    @classmethod
    def from_dict(cls, spec):
        family = spec.get("family", "power")
        if family == "power":
            return cls.power(spec.get("k", 4), spec.get("scale", 1.0))
        if family == "exp":
            return cls.exp(spec.get("delta0", 0.05))
        raise ValueError(f"unknown delta law family {family!r}")

    def to_dict(self):
        if self.family == "power":
            return {"family": "power", "k": self.k, "scale": self.scale}
        return {"family": "exp", "delta0": self.delta0}

    def delta(self, t):
        """δ(t), vectorized."""
        t = np.asarray(t, dtype=float)
        if self.family == "power":
            c = self.scale / (32.0 * self.k)
            inner = c * np.abs(t) ** self.k
            outer = self.scale / 32.0 * (1.0 / self.k - 1.0 + t)
            value = np.where(t <= 1.0, inner, outer)
        else:
            safe = np.where(t > 0, t, 1.0)
            value = np.where(t > 0, self.delta0 * np.exp(-1.0 / safe), 0.0)
        return float(value) if value.ndim == 0 else value

    def inverse(self, d, t_hi=1.0):
        """t with δ(t) = d, searched in (0, t_hi]."""
        if d >= self.delta(t_hi):
            return t_hi
        if self.family == "power":
            return (d * 32.0 * self.k / self.scale) ** (1.0 / self.k)
        return brentq(lambda t: self.delta(t) - d, 1e-6, t_hi)

    def lipschitz(self):
        """sup δ′ over (0, 1]."""
        if self.family == "power":
            return self.scale / 32.0
        return 4.0 * math.exp(-2.0) * self.delta0

    def rho_exponent(self, dim):
        return dim

    def check(self, dim):
        """Reject laws that are not o(tⁿ); warn when δ′ exceeds 1/32."""
        if dim not in (2, 3):
            raise ValueError(f"packings exist in dimensions 2 and 3, got {dim}")
        if self.family == "power" and self.k <= dim:
            raise ValueError(f"power law needs k > {dim} so that δ(t) = o(t^{dim}), got k={self.k}")
        if self.lipschitz() > LIPSCHITZ_MAX * (1 + 1e-12):
            logger.warning("delta law %s has Lipschitz constant %.4g > 1/32 (scaled desk law)", self.to_dict(), self.lipschitz())


# ----------------------------------------------------------------------
# Packings
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BallPacking:
    """
    Atoms (center x_i, δ_i, ρ_i) of a ball packing.

    `law` is None for hand-made packings, which then skip the law check.
    """

    centers: np.ndarray
    deltas: np.ndarray
    rhos: np.ndarray
    dim: int
    law: DeltaLaw = None
    t_min: float = 0.0
    t_max: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float).reshape(-1, self.dim)
        deltas = np.asarray(self.deltas, dtype=float).reshape(-1)
        rhos = np.asarray(self.rhos, dtype=float).reshape(-1)
        if not len(centers) == len(deltas) == len(rhos):
            raise ValueError(f"packing arrays disagree: {len(centers)} centers, {len(deltas)} deltas, {len(rhos)} rhos")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "rhos", rhos)

    @classmethod
    def empty(cls, dim, law=None, t_min=0.0, t_max=1.0, meta=None):
        return cls(np.zeros((0, dim)), np.zeros(0), np.zeros(0), dim, law, t_min, t_max, dict(meta or {}))

    @classmethod
    def from_law(cls, centers, law, dim, t_min=0.0, t_max=1.0, meta=None):
        """Atoms at the given centers with δ and ρ taken from the law."""
        centers = np.asarray(centers, dtype=float).reshape(-1, dim)
        deltas = np.atleast_1d(law.delta(np.linalg.norm(centers, axis=1)))
        return cls(centers, deltas, deltas ** law.rho_exponent(dim), dim, law, t_min, t_max, dict(meta or {}))

    def __len__(self):
        return len(self.centers)

    @property
    def norms(self):
        return np.linalg.norm(self.centers, axis=1)

    def concat(self, other):
        if other.dim != self.dim:
            raise ValueError(f"cannot concatenate packings of dimensions {self.dim} and {other.dim}")
        law = self.law if self.law == other.law else None
        return BallPacking(
            np.vstack([self.centers, other.centers]),
            np.concatenate([self.deltas, other.deltas]),
            np.concatenate([self.rhos, other.rhos]),
            self.dim,
            law,
            min(self.t_min, other.t_min),
            max(self.t_max, other.t_max),
            {"concat": [self.meta, other.meta]},
        )

    def shape(self, source=None):
        return BallUnionShape.from_packing(self, source=source)

    def __repr__(self):
        law = self.law.to_dict() if self.law else None
        return f"BallPacking(dim={self.dim}, count={len(self)}, law={law}, t_min={self.t_min})"


def check_packing(P, tol=1e-12):
    """
    Verify disjointness of the δ-balls, law conformance and annulus membership.

    Returns:
        P

    Raises:
        ValueError: naming the first violated invariant
    """
    if len(P) == 0:
        return P
    if np.any(P.deltas <= 0) or np.any(P.rhos <= 0):
        raise ValueError("packing radii must be positive")
    if np.any(P.rhos > P.deltas * (1 + tol)):
        raise ValueError("packing has ρ > δ for some atom")
    tree = cKDTree(P.centers)
    pairs = tree.query_pairs(2.0 * float(P.deltas.max()), output_type="ndarray")
    if len(pairs):
        i, j = pairs[:, 0], pairs[:, 1]
        gap = np.linalg.norm(P.centers[i] - P.centers[j], axis=1) - P.deltas[i] - P.deltas[j]
        if np.any(gap <= 0):
            bad = int(np.argmin(gap))
            raise ValueError(f"δ-balls {int(i[bad])} and {int(j[bad])} intersect (gap {gap[bad]:.3g})")
    norms = P.norms
    slack = 1e-12
    if np.any(norms < P.t_min * (1 - slack)) or np.any(norms > P.t_max * (1 + slack)):
        raise ValueError(f"packing centers leave the annulus [{P.t_min}, {P.t_max}]")
    if P.law is not None:
        expected = np.atleast_1d(P.law.delta(norms))
        if not np.allclose(P.deltas, expected, rtol=tol, atol=0.0):
            raise ValueError("packing deltas do not follow the δ law")
        if not np.allclose(P.rhos, P.deltas ** P.law.rho_exponent(P.dim), rtol=tol, atol=0.0):
            raise ValueError("packing rhos do not follow ρ = δⁿ")
    return P


def _surface(dim, t):
    return 2.0 * math.pi * t if dim == 2 else 4.0 * math.pi * t * t


def predicted_count(dim, law, t_min, t_max=1.0):
    """∫ surface(t) / λ_n(B(0, δ(t))) dt over [t_min, t_max]."""
    if t_min >= t_max:
        return 0.0
    kappa = ball_volume(dim, 1.0)

    def integrand(s):
        t = math.exp(s)
        return _surface(dim, t) / (kappa * law.delta(t) ** dim) * t

    value, _ = quad(integrand, math.log(t_min), math.log(t_max), limit=200)
    return value


def _band_edges(law, t_min, t_max, band_ratio):
    edges = [t_max]
    while edges[-1] > t_min:
        lo = law.inverse(law.delta(edges[-1]) / band_ratio, edges[-1])
        lo = max(t_min, min(lo, edges[-1] * (1 - 1e-9)))
        edges.append(lo)
    return edges


def _annulus_points(u, lo, hi, dim):
    """Map points of [0,1)^n uniformly onto the annulus lo ≤ ‖x‖ ≤ hi."""
    t = (lo**dim + u[:, 0] * (hi**dim - lo**dim)) ** (1.0 / dim)
    if dim == 2:
        angle = 2.0 * math.pi * u[:, 1]
        direction = np.column_stack([np.cos(angle), np.sin(angle)])
    else:
        z = 1.0 - 2.0 * u[:, 1]
        phi = 2.0 * math.pi * u[:, 2]
        s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        direction = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    return direction * t[:, None]


class _CellHash:
    """Accepted in-band balls bucketed by cells of side `cell`."""

    def __init__(self, cell, dim):
        self.cell = cell
        self.cells = {}
        self.neighbours = np.array(np.meshgrid(*[[-1, 0, 1]] * dim, indexing="ij")).reshape(dim, -1).T

    def key(self, x):
        return tuple(np.floor(x / self.cell).astype(int))

    def conflicts(self, x, d):
        base = np.floor(x / self.cell).astype(int)
        for offset in self.neighbours:
            for y, e in self.cells.get(tuple(base + offset), ()):
                if math.dist(x, y) <= d + e:
                    return True
        return False

    def add(self, x, d):
        self.cells.setdefault(self.key(x), []).append((x, d))


def _blocked_by(tree, points, deltas, cand, d):
    """Candidates whose δ-ball meets one of the balls in `tree`."""
    blocked = np.zeros(len(cand), dtype=bool)
    if tree is None:
        return blocked
    near = tree.query_ball_point(cand, d + float(deltas.max()))
    for i, idx in enumerate(near):
        if idx:
            gaps = np.linalg.norm(points[idx] - cand[i], axis=1) - deltas[idx]
            blocked[i] = bool(np.any(gaps <= d[i]))
    return blocked


def audit_packing(P, probes=DEFAULT_AUDIT_PROBES, seed=0):
    """
    Near-maximality audit: fresh uniform probes y in the annulus whose ball
    B(y, δ(y)) meets no accepted δ-ball.

    Returns:
        dict(probes, failures, passed)
    """
    if P.law is None or probes <= 0 or P.t_min >= P.t_max:
        return {"probes": 0, "failures": 0, "passed": True}
    rng = np.random.default_rng([seed, 1])
    y = _annulus_points(rng.random((probes, P.dim)), P.t_min, P.t_max, P.dim)
    d = np.atleast_1d(P.law.delta(np.linalg.norm(y, axis=1)))
    if len(P) == 0:
        failures = probes
    else:
        tree = cKDTree(P.centers)
        failures = int(np.count_nonzero(~_blocked_by(tree, P.centers, P.deltas, y, d)))
    if failures:
        logger.warning("packing audit: %d of %d probes fit a further δ-ball", failures, probes)
    return {"probes": probes, "failures": failures, "passed": failures == 0}


def gen_packing(
    dim,
    law,
    t_min,
    t_max=1.0,
    seed=0,
    max_rejections=DEFAULT_MAX_REJECTIONS,
    audit_probes=DEFAULT_AUDIT_PROBES,
    count_cap=DEFAULT_COUNT_CAP,
    band_ratio=2.0,
    batch=4096,
    progress=False,
):
    """
    Greedy maximal packing of δ-balls with centers in B(0, t_max) ∖ B(0, t_min).

    Args:
        dim: 2 or 3
        law: DeltaLaw
        t_min: inner truncation radius > 0
        t_max: outer radius <= 1
        seed: seeds the Halton scrambling and the audit probes
        max_rejections: a band ends after this many consecutive rejections
        audit_probes: size of the near-maximality audit
        count_cap: largest predicted ball count accepted
        band_ratio: largest ratio δ(hi)/δ(lo) inside a radial band
        progress: show a tqdm bar over the bands

    Returns:
        BallPacking with the audit result in `meta`

    Raises:
        ValueError: invalid law or radii
        ResourceCapError: predicted count above count_cap
    """
    law.check(dim)
    if not t_min > 0:
        raise ValueError(f"t_min must be positive, got {t_min}")
    if not 0 < t_max <= 1:
        raise ValueError(f"t_max must lie in (0, 1], got {t_max}")
    meta = {"seed": seed, "max_rejections": max_rejections, "band_ratio": band_ratio}
    if t_min >= t_max:
        logger.info("t_min=%g >= t_max=%g: empty packing", t_min, t_max)
        meta["audit"] = {"probes": 0, "failures": 0, "passed": True}
        return BallPacking.empty(dim, law, t_min, t_max, meta)

    estimate = predicted_count(dim, law, t_min, t_max)
    if estimate > count_cap:
        raise ResourceCapError(
            f"predicted ball count {estimate:.3g} exceeds the cap {count_cap:.3g}; raise t_min or scale the law",
            estimate=estimate,
            cap=count_cap,
        )
    logger.info("generating %dD packing, predicted count %.0f", dim, estimate)

    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    points, deltas = np.zeros((0, dim)), np.zeros(0)
    candidates = 0
    edges = _band_edges(law, t_min, t_max, band_ratio)
    for hi, lo in tqdm(list(zip(edges, edges[1:])), desc="bands", disable=not progress):
        prior = cKDTree(points) if len(points) else None
        cells = _CellHash(2.0 * law.delta(hi), dim)
        accepted, accepted_d = [], []
        rejections = 0
        while rejections < max_rejections:
            cand = _annulus_points(sampler.random(batch), lo, hi, dim)
            d = np.atleast_1d(law.delta(np.linalg.norm(cand, axis=1)))
            blocked = _blocked_by(prior, points, deltas, cand, d)
            for x, dx, hit in zip(cand, d, blocked):
                candidates += 1
                if hit or cells.conflicts(x, dx):
                    rejections += 1
                    if rejections >= max_rejections:
                        break
                    continue
                cells.add(x, dx)
                accepted.append(x)
                accepted_d.append(dx)
                rejections = 0
        if accepted:
            points = np.vstack([points, np.array(accepted)])
            deltas = np.concatenate([deltas, np.array(accepted_d)])
        logger.debug("band [%.4g, %.4g]: %d balls", lo, hi, len(accepted))

    meta["candidates"] = candidates
    meta["predicted_count"] = estimate
    packing = BallPacking(points, deltas, deltas ** law.rho_exponent(dim), dim, law, t_min, t_max, meta)
    meta["audit"] = audit_packing(packing, audit_probes, seed)
    return packing


# ----------------------------------------------------------------------
# Summaries
# ----------------------------------------------------------------------


@dataclass
class PackingSummary:
    count: int
    P_iso: float
    P_disk: float
    volume: float
    t_grid: list
    b: list
    P_disk_measures: float = None

    def to_dict(self):
        return asdict(self)


def packing_summary(P, t_grid=None, cross_check=False, level=2):
    """
    Closed-form sums of a packing.

        P_iso   Σ 4πρ² (3D), Σ 2πρ (2D)
        P_disk  Σ π²ρ² (3D only, None in 2D)
        volume  Σ κ_n ρⁿ
        b(t)    Σ_{‖x‖ < t} ρ on the t grid

    With cross_check, P_disk is recomputed from sphere quadratures.
    """
    if t_grid is None:
        t_grid = np.linspace(0.0, 1.0, 33)
    t_grid = np.asarray(t_grid, dtype=float)
    rho = P.rhos
    if P.dim == 3:
        P_iso = 4.0 * math.pi * math.fsum(rho**2)
        P_disk = math.pi**2 * math.fsum(rho**2)
    else:
        P_iso = 2.0 * math.pi * math.fsum(rho)
        P_disk = None
    volume = ball_volume(P.dim, 1.0) * math.fsum(rho**P.dim)
    order = np.argsort(P.norms)
    partial = np.concatenate([[0.0], np.cumsum(rho[order])])
    b = partial[np.searchsorted(P.norms[order], t_grid, side="left")]
    summary = PackingSummary(len(P), P_iso, P_disk, volume, t_grid.tolist(), b.tolist())
    if cross_check and P.dim == 3:
        summary.P_disk_measures = disk_perimeter_via_measures(P, level=level)
        if P_disk > 0 and abs(summary.P_disk_measures - P_disk) > 1e-3 * P_disk:
            logger.warning("P_disk quadrature %.8g differs from closed form %.8g", summary.P_disk_measures, P_disk)
    return summary


def disk_perimeter_via_measures(P, L=((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)), level=2):
    """P_disk through the union of scaled unit-sphere quadratures."""
    if P.dim != 3:
        raise ValueError("the planar-disk perimeter is defined for 3D packings")
    if len(P) == 0:
        return 0.0
    unit = sphere_surface_measure(1.0, level)
    union = disjoint_union_measure([scale_measure(unit, rho) for rho in P.rhos], dim=3)
    return anisotropic_perimeter(union, StructuringElement.planar_disk(L))


# ----------------------------------------------------------------------
# Packing files
# ----------------------------------------------------------------------


def _line(obj):
    return json.dumps(to_jsonable(obj), sort_keys=True)


def packing_text(P):
    """JSON lines: a {"meta": ...} header, then one {x, delta, rho} per ball."""
    header = {
        "meta": {
            "dim": P.dim,
            "law": P.law.to_dict() if P.law else None,
            "t_min": P.t_min,
            "t_max": P.t_max,
            **P.meta,
        }
    }
    lines = [_line(header)]
    lines.extend(_line({"x": x, "delta": d, "rho": r}) for x, d, r in zip(P.centers, P.deltas, P.rhos))
    return "\n".join(lines) + "\n"


def save_packing(P, path):
    write_text_atomic(path, packing_text(P))


def load_packing(path):
    """Read a packing file and re-check its invariants."""
    with open(path, encoding="utf-8") as fh:
        rows = [json.loads(line) for line in fh if line.strip()]
    if not rows or "meta" not in rows[0]:
        raise ValueError(f"{path}: packing file must start with a meta header")
    meta = dict(rows[0]["meta"])
    dim = int(meta.pop("dim"))
    law_spec = meta.pop("law", None)
    law = DeltaLaw.from_dict(law_spec) if law_spec else None
    t_min = float(meta.pop("t_min", 0.0))
    t_max = float(meta.pop("t_max", 1.0))
    atoms = rows[1:]
    if atoms:
        centers = np.array([a["x"] for a in atoms], dtype=float)
        deltas = np.array([a["delta"] for a in atoms], dtype=float)
        rhos = np.array([a["rho"] for a in atoms], dtype=float)
        packing = BallPacking(centers, deltas, rhos, dim, law, t_min, t_max, meta)
    else:
        packing = BallPacking.empty(dim, law, t_min, t_max, meta)
    return check_packing(packing)


# ----------------------------------------------------------------------
# Products C × D
# ----------------------------------------------------------------------

# Desk-scale laws. Their Lipschitz constants (0.06 and 0.4) exceed the
# δ′ ≤ 1/32 hypothesis under which the divergence argument is proved, so
# DeltaLaw.check logs a warning for them.
DESK_LAWS = {2: DeltaLaw.power(3, scale=1.92), 3: DeltaLaw.power(4, scale=12.8)}


@dataclass(frozen=True, eq=False)
class ProductExample:
    """A = C × D with C a disk/square (or ball/cube) and D a packing."""

    k: int
    n: int
    C: object
    D: BallPacking

    @property
    def D_volume(self):
        return ball_volume(self.D.dim, 1.0) * math.fsum(self.D.rhos**self.D.dim)

    @property
    def D_perimeter(self):
        return packing_summary(self.D).P_iso

    def C_perimeter(self):
        return self.C.surface_measure().total_mass

    def perimeter(self):
        """P(C × D) = P(C)λ(D) + λ(C)P(D)."""
        return self.C_perimeter() * self.D_volume + self.C.volume() * self.D_perimeter

    def anisotropic_content(self):
        """SM along B^k × {0}: P(C)·λ(D)."""
        return self.C_perimeter() * self.D_volume

    def anisotropic_excess(self, r, C_grid):
        return product_excess(C_grid, self.D_volume, r)

    def anisotropic_report(self, C_grid, sched, settings=None):
        settings = settings or EstimatorSettings()
        rs = list(sched)
        excesses = [self.anisotropic_excess(r, C_grid) for r in rs]
        fs = [e / r for e, r in zip(excesses, rs)]
        return build_report(rs, excesses, fs, settings, {"factor": "C"})

    def isotropic_lower_bound(self, r, samples_per_ball=16, seed=0):
        """λ(C)·λ((D ⊕ rB) ∖ D) ≤ λ((A ⊕ rB^n) ∖ A)."""
        Q = StructuringElement.unit_ball(self.D.dim)
        return self.C.volume() * packing_excess(self.D, Q, r, samples_per_ball, seed)

    def isotropic_D_report(self, sched, settings=None, samples_per_ball=16, seed=0):
        Q = StructuringElement.unit_ball(self.D.dim)
        return packing_content(self.D, Q, sched, settings, samples_per_ball, seed)

    def to_dict(self):
        return {
            "k": self.k,
            "n": self.n,
            "C": self.C.to_dict(),
            "D": {"dim": self.D.dim, "count": len(self.D), "volume": self.D_volume, "perimeter": self.D_perimeter},
            "perimeter": self.perimeter(),
            "anisotropic_content": self.anisotropic_content(),
        }


def gen_example1(k=2, n=4, C="disk", D=None, law=None, t_min=0.5, seed=0, **packing_kw):
    """
    Product example A = C × D ⊂ R^k × R^{n−k}.

    Args:
        k: dimension of the regular factor C (2 or 3)
        n: ambient dimension, 2 ≤ k ≤ n − 2 and n − k ∈ {2, 3}
        C: "disk" (unit ball of R^k centered at 0) or "square" ([0,1]^k)
        D: BallPacking in R^{n−k}; generated from `law` when None
        law: DeltaLaw for D (desk-scale default per dimension)
        t_min, seed, packing_kw: forwarded to gen_packing

    Returns:
        ProductExample
    """
    if not 2 <= k <= n - 2:
        raise ValueError(f"need 2 <= k <= n - 2, got k={k}, n={n}")
    if k not in (2, 3) or n - k not in (2, 3):
        raise ValueError(f"factors must have dimension 2 or 3, got k={k}, n-k={n - k}")
    if C == "disk":
        C_shape = BallShape(np.zeros(k), 1.0)
    elif C == "square":
        C_shape = BoxShape(np.zeros(k), np.ones(k))
    else:
        raise ValueError(f"C must be 'disk' or 'square', got {C!r}")
    if D is None:
        D = gen_packing(n - k, law or DESK_LAWS[n - k], t_min, seed=seed, **packing_kw)
    elif D.dim != n - k:
        raise ValueError(f"D has dimension {D.dim}, expected {n - k}")
    return ProductExample(k, n, C_shape, D)


# ----------------------------------------------------------------------
# Three copies of D × [0,1]
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ThreeCopiesScene:
    """Copies of D × [0,1] along e₁, e₂, e₃, laid out along x with `gap` between boxes."""

    D: BallPacking
    gap: float = 1.0
    copies: tuple = ()

    def __post_init__(self):
        if self.D.dim != 2:
            raise ValueError("the three-copies scene needs a planar D")
        if len(self.D) == 0:
            raise ValueError("the three-copies scene needs a nonempty D")
        if not self.copies:
            base = self.D.shape()
            placed, cursor = [], 0.0
            for axis in range(3):
                lo, hi = PrismShape(base, axis).bounding_box()
                offset = np.zeros(3)
                offset[0] = cursor - lo[0]
                placed.append({"axis": axis, "offset": offset.tolist()})
                cursor += hi[0] - lo[0] + self.gap
            object.__setattr__(self, "copies", tuple(placed))

    def prisms(self):
        base = self.D.shape()
        return [PrismShape(base, c["axis"], c["offset"], 1.0) for c in self.copies]

    def shapes(self):
        return UnionShape(self.prisms())

    def bbox_gaps(self):
        """Smallest per-pair distance between copy bounding boxes."""
        boxes = [p.bounding_box() for p in self.prisms()]
        gaps = []
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                (lo1, hi1), (lo2, hi2) = boxes[i], boxes[j]
                separation = np.maximum(np.maximum(lo2 - hi1, lo1 - hi2), 0.0)
                gaps.append(float(np.linalg.norm(separation)))
        return gaps

    def witness_copy(self, L):
        """Index of a copy whose axis is not contained in span(L)."""
        basis = np.linalg.qr(np.asarray(L, dtype=float).T)[0].T
        in_plane = [np.linalg.norm(basis @ np.eye(3)[c["axis"]]) for c in self.copies]
        index = int(np.argmin(in_plane))
        if in_plane[index] > 1.0 - 1e-9:
            raise ValueError("every copy axis lies in L")
        return index

    def witness_angle(self, L):
        """(index, cos α, sin α) with α the angle between L⊥ and the witness copy's axis."""
        L = np.asarray(L, dtype=float)
        index = self.witness_copy(L)
        normal = np.cross(L[0], L[1])
        normal = normal / np.linalg.norm(normal)
        cos_alpha = min(1.0, abs(float(normal[self.copies[index]["axis"]])))
        return index, cos_alpha, math.sqrt(max(0.0, 1.0 - cos_alpha**2))

    def witness_excess(self, L, r, samples_per_ball=16, seed=0):
        """
        Lower bound of the witness copy's excess under r(B³ ∩ L).

        A' ⊕ r(B³ ∩ L) contains (D ⊕ r cos α B²) × [r sin α, 1 − r sin α] in
        the copy's frame, so the excess is at least
        λ₂((D ⊕ r cos α B²) ∖ D)·(1 − 2r sin α)⁺.
        """
        _, cos_alpha, sin_alpha = self.witness_angle(L)
        height = max(0.0, 1.0 - 2.0 * r * sin_alpha)
        planar = packing_excess(self.D, StructuringElement.unit_ball(2), r * cos_alpha, samples_per_ball, seed)
        return planar * height

    def witness_report(self, L, sched, settings=None, samples_per_ball=16, seed=0):
        """f(r) for the witness copy of L under B³ ∩ L (lower bound, diverges)."""
        settings = settings or EstimatorSettings()
        index, cos_alpha, sin_alpha = self.witness_angle(L)
        rs = list(sched)
        excesses = [self.witness_excess(L, r, samples_per_ball, [seed, i]) for i, r in enumerate(rs)]
        fs = [e / r for e, r in zip(excesses, rs)]
        extra = {"witness": index, "axis": self.copies[index]["axis"], "cos_alpha": cos_alpha, "sin_alpha": sin_alpha}
        return build_report(rs, excesses, fs, settings, extra)

    def prism_excess(self, r, samples_per_ball=16, seed=0, nodes=8):
        """
        λ₃((A' ⊕ rB³) ∖ A') for one copy A' = D × [0, 1].

        The side shell is λ₂((D ⊕ rB²) ∖ D); each end cap is
        ∫₀ʳ λ₂(D ⊕ √(r² − z²)B²) dz, integrated with Gauss-Legendre nodes.
        """
        disk = StructuringElement.unit_ball(2)
        side = packing_excess(self.D, disk, r, samples_per_ball, seed)
        if r == 0:
            return side
        area = packing_summary(self.D).volume
        x, w = leggauss(nodes)
        z = 0.5 * r * (x + 1.0)
        caps = sum(
            wk * (packing_excess(self.D, disk, math.sqrt(max(0.0, r * r - zk * zk)), samples_per_ball, seed) + area)
            for zk, wk in zip(z, w)
        )
        return side + r * caps

    def isotropic_report(self, sched, settings=None, samples_per_ball=16, seed=0, nodes=8):
        """f(r) of the assembled scene under B³: three disjoint prism dilations while 2r < gap."""
        settings = settings or EstimatorSettings()
        rs = list(sched)
        if rs and 2.0 * max(rs) >= self.gap:
            raise ValueError(f"isotropic scene report needs 2r < gap={self.gap}")
        excesses = [len(self.copies) * self.prism_excess(r, samples_per_ball, [seed, i], nodes) for i, r in enumerate(rs)]
        fs = [e / r for e, r in zip(excesses, rs)]
        return build_report(rs, excesses, fs, settings, {"scene": "three_copies", "Q": "B3"})

    def to_dict(self):
        return {
            "copies": [dict(c) for c in self.copies],
            "gap": self.gap,
            "D": {"dim": 2, "count": len(self.D), "t_min": self.D.t_min},
        }


def gen_example2(D=None, law=None, t_min=0.5, seed=0, gap=1.0, **packing_kw):
    """Three-copies scene over a planar packing D (generated when None)."""
    if D is None:
        D = gen_packing(2, law or DESK_LAWS[2], t_min, seed=seed, **packing_kw)
    return ThreeCopiesScene(D, gap)


if __name__ == "__main__":
    law = DESK_LAWS[2]
    print("Planar packing demo")
    print("-" * 40)
    packing = gen_packing(2, law, 0.7, seed=0, max_rejections=2000, audit_probes=1000)
    summary = packing_summary(packing)
    print(packing)
    print(f"P_iso  = {summary.P_iso:.6g}")
    print(f"volume = {summary.volume:.6g}")
    print(f"audit  = {packing.meta['audit']}")
