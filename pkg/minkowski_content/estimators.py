"""
Minkowski Content Estimators

Limit estimation over a decreasing radius schedule r_1 > ... > r_m:

    outer content   f(r) = λ_n((A ⊕ rQ) ∖ A) / r            → SM_Q(A)
    content         f(r) = (λ_n(E ⊕ rQ) − λ_n(E)) / (2r)     → M_Q(E)

The samples are fitted by f(r) = c₀ + c₁r (or c₀ + c₁r + c₂r²) and
classified:

    diverging     f strictly increases as r decreases over the last
                  `monotone_window` samples and f(r_min)/f(r_max) ≥ growth_min
    converging    c₀ > 0 and rms residual ≤ residual_tol·c₀
    inconclusive  otherwise ("oscillating" when successive differences
                  change sign at least twice)

Exact paths:
    segment_outer_exact(S, u) = Σ w_i ⟨u, ν_i⟩⁺

Ball packings (far below voxel resolution) have their own grid-free
estimator: the union volume of the bodies B(x_i, ρ_i) ⊕ rQ is Σ_i vol_i·E[1/m]
with m the number of bodies covering a uniform point of body i. It is exact
when no two bodies overlap. Where the dilated bodies cover the packing
the hit-or-miss estimator samples the enclosing shell instead.

AFP relative to a plane L (normal w):
    ν(B(a, r)) = Σ_i capArea(∂B(x_i, ρ_i) ∩ B(a, r)) / ρ_i
    proj       = λ_1(∪_i [⟨x_i, w⟩ − ρ_i, ⟨x_i, w⟩ + ρ_i] ∩ [⟨a, w⟩ − r, ⟨a, w⟩ + r])
    ratio      = ν / (r·proj)
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .convex_bodies import BALL, StructuringElement
from .errors import ConfigError
from .oracles import cap_area
from .shapes import ball_volume
from .surface_measures import segment_integral
from .voxel_sets import dilated_volume, effective_radius, excess_volume

logger = logging.getLogger(__name__)

CONVERGING = "converging"
DIVERGING = "diverging"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class EstimatorSettings:
    """Thresholds for fitting and trend classification."""

    residual_tol: float = 0.05
    monotone_window: int = 6
    growth_min: float = 2.0
    oracle_C: float = 4.0
    model: str = "affine"
    thickness_correction: bool = True
    sheet_threshold: float = 0.2
    digital_radius: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.model not in ("affine", "quadratic"):
            raise ConfigError(f"model must be 'affine' or 'quadratic', got {self.model!r}")
        if self.monotone_window < 2:
            raise ConfigError(f"monotone_window must be >= 2, got {self.monotone_window}")
        if not 0 < self.residual_tol < 1:
            raise ConfigError(f"residual_tol must lie in (0, 1), got {self.residual_tol}")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class RSchedule:
    """Strictly decreasing positive radii."""

    r_values: tuple

    def __post_init__(self):
        values = tuple(float(r) for r in self.r_values)
        if not values:
            raise ConfigError("an r-schedule needs at least one radius")
        if any(not r > 0 for r in values):
            raise ConfigError(f"r-schedule radii must be positive, got {values}")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise ConfigError(f"r-schedule must be strictly decreasing, got {values}")
        object.__setattr__(self, "r_values", values)

    @classmethod
    def geometric(cls, r_max, r_min=None, count=12, ratio=2**-0.5):
        """
        Geometric schedule from r_max down.

        With r_min given, `count` radii spaced geometrically in [r_min, r_max];
        otherwise r_max·ratio^i for i < count.
        """
        if count < 1:
            raise ConfigError(f"schedule count must be >= 1, got {count}")
        if r_min is None:
            return cls(tuple(r_max * ratio**i for i in range(count)))
        if count == 1:
            return cls((float(r_max),))
        if not 0 < r_min < r_max:
            raise ConfigError(f"need 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}")
        return cls(tuple(np.geomspace(r_max, r_min, count).tolist()))

    def __len__(self):
        return len(self.r_values)

    def __iter__(self):
        return iter(self.r_values)

    @property
    def r_max(self):
        return self.r_values[0]

    @property
    def r_min(self):
        return self.r_values[-1]

    def check_resolution(self, h, factor=8.0):
        if self.r_min < factor * h * (1 - 1e-12):
            raise ConfigError(f"r_min = {self.r_min:g} is below {factor:g}·h = {factor * h:g}; refine the grid or raise r_min")

    def snapped(self, h):
        """Radii rounded to nonzero multiples of h, duplicates dropped."""
        snapped = []
        for r in self.r_values:
            value = max(1, round(r / h)) * h
            if not snapped or value < snapped[-1]:
                snapped.append(value)
        return RSchedule(tuple(snapped))

    def to_dict(self):
        return {"r_values": list(self.r_values), "r_max": self.r_max, "r_min": self.r_min, "count": len(self)}


@dataclass
class ConvergenceReport:
    """Samples (r, excess, f) in schedule order, fit and trend."""

    samples: list
    c0: float
    c1: float
    c2: float
    residual: float
    trend: str
    growth_ratio: float
    reason: str = ""
    model: str = "affine"
    extra: dict = field(default_factory=dict)

    @property
    def rs(self):
        return np.array([s["r"] for s in self.samples])

    @property
    def fs(self):
        return np.array([s["f"] for s in self.samples])

    def rows(self):
        return [
            {
                "r": s["r"],
                "excess": s["excess"],
                "f": s["f"],
                "fit_c0": self.c0,
                "fit_c1": self.c1,
                "residual": self.residual,
                "trend": self.trend,
            }
            for s in self.samples
        ]

    def to_dict(self):
        return {
            "samples": self.samples,
            "fit": {"c0": self.c0, "c1": self.c1, "c2": self.c2, "residual": self.residual, "model": self.model},
            "trend": self.trend,
            "reason": self.reason,
            "growth_ratio": self.growth_ratio,
            **self.extra,
        }


REPORT_COLUMNS = ["r", "excess", "f", "fit_c0", "fit_c1", "residual", "trend"]


def fit_limit(rs, fs, model="affine"):
    """
    Least-squares fit of f(r) = c₀ + c₁r (+ c₂r²).

    Returns:
        (c0, c1, c2, rms residual)
    """
    rs = np.asarray(rs, dtype=float)
    fs = np.asarray(fs, dtype=float)
    degree = 2 if model == "quadratic" else 1
    if len(rs) <= degree:
        c0 = float(fs[-1]) if len(fs) else 0.0
        return c0, 0.0, 0.0, 0.0
    coeffs = np.polynomial.polynomial.polyfit(rs, fs, degree)
    fitted = np.polynomial.polynomial.polyval(rs, coeffs)
    residual = float(np.sqrt(np.mean((fs - fitted) ** 2)))
    c2 = float(coeffs[2]) if degree == 2 else 0.0
    return float(coeffs[0]), float(coeffs[1]), c2, residual


def classify_trend(fs, c0, residual, settings):
    """
    (trend, reason, growth_ratio) for samples ordered by decreasing r.
    """
    fs = np.asarray(fs, dtype=float)
    growth = float(fs[-1] / fs[0]) if fs[0] > 0 else (math.inf if fs[-1] > 0 else 1.0)
    window = fs[-settings.monotone_window :]
    if len(window) == settings.monotone_window and np.all(np.diff(window) > 0) and growth >= settings.growth_min:
        return DIVERGING, "monotone growth", growth
    if c0 > 0 and residual <= settings.residual_tol * c0:
        return CONVERGING, "fit residual within tolerance", growth
    signs = np.sign(np.diff(fs))
    signs = signs[signs != 0]
    changes = int(np.count_nonzero(np.diff(signs))) if len(signs) > 1 else 0
    if changes >= 2:
        return INCONCLUSIVE, "oscillating", growth
    return INCONCLUSIVE, "unresolved", growth


def build_report(rs, excesses, fs, settings, extra=None):
    c0, c1, c2, residual = fit_limit(rs, fs, settings.model)
    trend, reason, growth = classify_trend(fs, c0, residual, settings)
    samples = [{"r": float(r), "excess": float(e), "f": float(f)} for r, e, f in zip(rs, excesses, fs)]
    logger.info("trend %s (%s): c0=%.6g residual=%.3g growth=%.3g", trend, reason, c0, residual, growth)
    return ConvergenceReport(samples, c0, c1, c2, residual, trend, growth, reason, settings.model, extra or {})


def _map(fn, items, threads):
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def outer_content(A, Q, sched, settings=None, check_resolution=True):
    """
    Estimate SM_Q(A) from f(r) = excess_volume(A, Q, r)/r over the schedule.

    With settings.digital_radius the samples are indexed by the effective
    radius of each digital kernel instead of the nominal r, which removes
    the h/r bias of the covering rule from the fitted limit.

    Args:
        A: VoxelGrid
        Q: StructuringElement
        sched: RSchedule
        settings: EstimatorSettings

    Returns:
        ConvergenceReport

    Raises:
        ConfigError: when r_min < 8h
    """
    settings = settings or EstimatorSettings()
    if check_resolution:
        sched.check_resolution(A.spacing)
    rs = list(sched)
    excesses = _map(lambda r: excess_volume(A, Q, r), rs, settings.threads)
    extra = None
    if settings.digital_radius:
        rs = [effective_radius(Q, r, A.spacing) for r in rs]
        extra = {"radius": "digital"}
    fs = [e / r for e, r in zip(excesses, rs)]
    return build_report(rs, excesses, fs, settings, extra)


def minkowski_content(E, Q, sched, settings=None, check_resolution=True):
    """
    Estimate M_Q(E) for a one-voxel sheet E.

    f(r) = λ(E ⊕ rQ)/(2r), minus λ(E)/(2r) with the thickness correction.
    The sample "excess" is λ(E ⊕ rQ) − λ(E), which stays translation
    invariant in Q even when 0 ∉ Q.

    Raises:
        ValueError: if E occupies more than `sheet_threshold` of its grid
    """
    settings = settings or EstimatorSettings()
    fraction = E.volume_fraction()
    if fraction > settings.sheet_threshold:
        raise ValueError(
            f"sheet occupies {fraction:.3f} of its grid (> {settings.sheet_threshold}); not a measure-zero surrogate"
        )
    if check_resolution:
        sched.check_resolution(E.spacing)
    rs = list(sched)
    base = E.volume()
    excesses = _map(lambda r: dilated_volume(E, Q, r) - base, rs, settings.threads)
    if settings.thickness_correction:
        fs = [e / (2.0 * r) for e, r in zip(excesses, rs)]
    else:
        fs = [(e + base) / (2.0 * r) for e, r in zip(excesses, rs)]
    return build_report(rs, excesses, fs, settings, {"sheet_volume": base})


def lower_bound_holds(report, P_Q, h):
    """Every sample satisfies f(r) ≥ P_Q·(1 − 3h/r)."""
    return all(s["f"] >= P_Q * (1.0 - 3.0 * h / s["r"]) for s in report.samples)


def oracle_agreement(report, excess_fn, h, C=4.0):
    """
    |f(r) − excess(r)/r| ≤ C·(h/r)·f(r) for every sample.

    Returns:
        (all_ok, worst relative deviation)
    """
    ok, worst = True, 0.0
    for s in report.samples:
        exact = excess_fn(s["r"]) / s["r"]
        deviation = abs(s["f"] - exact)
        ok &= deviation <= C * (h / s["r"]) * s["f"]
        worst = max(worst, deviation / exact if exact else math.inf)
    return ok, worst


def segment_outer_exact(S, u):
    """SM_{[0,u]}(A) = ∫⟨u, v⟩⁺ S*(A, dv)."""
    return segment_integral(S, u)


# ----------------------------------------------------------------------
# Grid-free estimation for ball packings
# ----------------------------------------------------------------------


def _body_geometry(P, Q):
    """(basis rows spanning the dilation plane, Q radius) for a centered ball Q."""
    if Q.kind != BALL or not np.allclose(Q.points[0], 0.0):
        raise ValueError("packing estimators need Q to be a ball centered at 0")
    if Q.dim != P.dim:
        raise ValueError(f"Q dimension {Q.dim} != packing dimension {P.dim}")
    k = len(Q.basis)
    if k not in (P.dim, 2):
        raise ValueError(f"packing estimators support full balls and planar disks, got a {k}-dimensional ball")
    return np.array(Q.basis), Q.radius


def _body_volumes(rho, R, dim, k):
    """(vol(B(ρ) ⊕ R·Q), vol of the excess) per body."""
    if k == dim:
        if dim == 3:
            excess = 4.0 * math.pi / 3.0 * (3 * rho**2 * R + 3 * rho * R**2 + R**3)
        else:
            excess = math.pi * (2 * rho * R + R**2)
        return ball_volume(dim, 1.0) * rho**dim + excess, excess
    excess = math.pi**2 * rho**2 * R + 2.0 * math.pi * rho * R**2
    return 4.0 * math.pi / 3.0 * rho**3 + excess, excess


def _sample_bodies(rng, centers, rho, R, basis, count):
    """`count` uniform points in each body B(x_i, ρ_i) ⊕ R·(B ∩ L)."""
    m, dim = centers.shape
    k = len(basis)
    if k == dim:
        g = rng.standard_normal((m, count, dim))
        g /= np.linalg.norm(g, axis=2, keepdims=True)
        radius = (rho + R)[:, None] * rng.random((m, count)) ** (1.0 / dim)
        return centers[:, None, :] + g * radius[:, :, None]
    normal = np.cross(basis[0], basis[1])
    frame = np.vstack([basis, normal])
    out = np.empty((m, count, dim))
    filled = np.zeros(m, dtype=int)
    while np.any(filled < count):
        todo = np.nonzero(filled < count)[0]
        batch = 2 * count
        angle = 2.0 * np.pi * rng.random((len(todo), batch))
        radial = (rho[todo] + R)[:, None] * np.sqrt(rng.random((len(todo), batch)))
        height = rho[todo][:, None] * (2.0 * rng.random((len(todo), batch)) - 1.0)
        ok = np.maximum(radial - R, 0.0) ** 2 + height**2 <= rho[todo][:, None] ** 2
        local = np.stack([radial * np.cos(angle), radial * np.sin(angle), height], axis=2)
        for row, i in enumerate(todo):
            take = local[row][ok[row]][: count - filled[i]]
            out[i, filled[i] : filled[i] + len(take)] = centers[i] + take @ frame
            filled[i] += len(take)
    return out


def _inside_bodies(points, centers, rho, R, basis):
    """Membership of points (q, n) in bodies j (q, k) given as center/rho arrays."""
    w = points[:, None, :] - centers
    parallel = np.linalg.norm(w @ basis.T, axis=2)
    perpendicular2 = np.maximum(np.einsum("qkn,qkn->qk", w, w) - parallel**2, 0.0)
    return np.maximum(parallel - R, 0.0) ** 2 + perpendicular2 <= rho**2


def packing_excess(P, Q, r, samples_per_ball=16, seed=0, chunk=4096):
    """
    λ_n((A ⊕ rQ) ∖ A) for the ball union A of a packing, without a grid.

    Bodies without a neighbor closer than the sum of their bounding radii
    contribute their exact excess volume. Every other body i contributes its
    exact excess plus vol_i·(E[1/m] − 1), the expectation estimated from
    `samples_per_ball` uniform points drawn with default_rng(seed).

    Args:
        P: BallPacking
        Q: centered full ball or planar disk (3D)
        r: radius >= 0
        samples_per_ball: Monte-Carlo points per overlapping body
        seed: seed or seed sequence entropy

    Returns:
        float
    """
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if r == 0 or len(P) == 0:
        return 0.0
    basis, q_radius = _body_geometry(P, Q)
    R = r * q_radius
    centers, rho = P.centers, P.rhos
    volumes, excesses = _body_volumes(rho, R, P.dim, len(basis))

    tree = cKDTree(centers)
    reach = 2.0 * (float(rho.max()) + R)
    pairs = tree.query_pairs(reach, output_type="ndarray")
    if len(pairs) == 0:
        return math.fsum(excesses)
    crowded = np.zeros(len(P), dtype=bool)
    crowded[pairs.ravel()] = True
    # pairs within `reach` may still be disjoint; the sampling settles it
    index = np.nonzero(crowded)[0]

    rng = np.random.default_rng(seed)
    bound = R + float(rho.max())
    corrections = np.zeros(len(P))
    per_chunk = max(1, chunk // samples_per_ball)
    for start in range(0, len(index), per_chunk):
        ids = index[start : start + per_chunk]
        pts = _sample_bodies(rng, centers[ids], rho[ids], R, basis, samples_per_ball)
        owner = np.repeat(ids, samples_per_ball)
        flat = pts.reshape(-1, P.dim)
        k = 8
        while True:
            k = min(k, len(P))
            dist, idx = tree.query(flat, k=k, distance_upper_bound=bound)
            dist = dist.reshape(len(flat), k)
            idx = idx.reshape(len(flat), k)
            if k == len(P) or not np.any(np.isfinite(dist[:, -1])):
                break
            k *= 2
        valid = (idx < len(P)) & (idx != owner[:, None])
        safe = np.where(valid, idx, 0)
        inside = _inside_bodies(flat, centers[safe], rho[safe], R, basis) & valid
        multiplicity = 1 + inside.sum(axis=1)
        mean_inverse = (1.0 / multiplicity).reshape(len(ids), samples_per_ball).mean(axis=1)
        corrections[ids] = volumes[ids] * (mean_inverse - 1.0)
    return math.fsum(excesses) + math.fsum(corrections)


def _shell_points(rng, lo, hi, dim, count):
    g = rng.standard_normal((count, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radius = (lo**dim + rng.random(count) * (hi**dim - lo**dim)) ** (1.0 / dim)
    return g * radius[:, None]


def packing_excess_hit_or_miss(P, Q, r, samples=10**6, seed=0, chunk=65536):
    """
    λ_n((A ⊕ rB) ∖ A) by hit-or-miss sampling of the shell that holds A ⊕ rB.

    A point y is a hit when min_i (‖y − x_i‖ − ρ_i) ≤ r. The cost does not
    depend on how many bodies overlap, so this is the estimator for radii
    where the dilated balls cover the packing; for sparse radii prefer
    `packing_excess`.

    Args:
        P: BallPacking
        Q: centered full ball
        r: radius >= 0
        samples: uniform points in the shell
        seed: seed or seed sequence entropy

    Returns:
        float
    """
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if r == 0 or len(P) == 0:
        return 0.0
    basis, q_radius = _body_geometry(P, Q)
    if len(basis) != P.dim:
        raise ValueError("hit-or-miss estimation needs a full ball Q")
    R = r * q_radius
    centers, rho = P.centers, P.rhos
    rho_max = float(rho.max())
    norms = np.linalg.norm(centers, axis=1)
    lo = max(float(norms.min()) - R - rho_max, 0.0)
    hi = float(norms.max()) + R + rho_max
    shell = ball_volume(P.dim, 1.0) * (hi**P.dim - lo**P.dim)

    tree = cKDTree(centers)
    rng = np.random.default_rng(seed)
    hits = 0
    for start in range(0, samples, chunk):
        pts = _shell_points(rng, lo, hi, P.dim, min(chunk, samples - start))
        k = min(8, len(P))
        dist, idx = tree.query(pts, k=k)
        dist, idx = dist.reshape(len(pts), k), idx.reshape(len(pts), k)
        gap = np.min(dist - rho[idx], axis=1)
        # a farther center can only win when its distance minus ρ_max beats the best gap
        open_ = (dist[:, -1] - rho_max < gap) & (gap > R) & (k < len(P))
        if np.any(open_):
            near = tree.query_ball_point(pts[open_], gap[open_] + rho_max)
            for row, ids in zip(np.nonzero(open_)[0], near):
                ids = np.asarray(ids, dtype=int)
                gap[row] = np.min(np.linalg.norm(pts[row] - centers[ids], axis=1) - rho[ids])
        hits += int(np.count_nonzero(gap <= R))
    union = shell * hits / samples
    return union - ball_volume(P.dim, 1.0) * math.fsum(rho**P.dim)


def packing_content(P, Q, sched, settings=None, samples_per_ball=16, seed=0, method="bodies", samples=10**6):
    """
    ConvergenceReport of f(r) = excess(r)/r over the schedule.

    `method` is "bodies" (packing_excess) or "hit_or_miss"
    (packing_excess_hit_or_miss with `samples` points). Sample i is
    seeded with default_rng([seed, i]).
    """
    settings = settings or EstimatorSettings()
    rs = list(sched)
    work = [(i, r) for i, r in enumerate(rs)]
    if method == "bodies":
        excess = lambda item: packing_excess(P, Q, item[1], samples_per_ball, [seed, item[0]])
        extra = {"estimator": "packing", "samples_per_ball": samples_per_ball}
    elif method == "hit_or_miss":
        excess = lambda item: packing_excess_hit_or_miss(P, Q, item[1], samples, [seed, item[0]])
        extra = {"estimator": "hit_or_miss", "samples": samples}
    else:
        raise ValueError(f"unknown packing method {method!r}")
    excesses = _map(excess, work, settings.threads)
    fs = [e / r for e, r in zip(excesses, rs)]
    return build_report(rs, excesses, fs, settings, extra)


# ----------------------------------------------------------------------
# AFP condition
# ----------------------------------------------------------------------


@dataclass
class AFPReport:
    samples: list
    gamma_hat: float
    passed: bool
    mode: str = "relative"

    def to_dict(self):
        return {"gamma_hat": self.gamma_hat, "pass": self.passed, "mode": self.mode, "samples": self.samples}


def _normal_of_plane(basis):
    basis = np.asarray(basis, dtype=float)
    if basis.shape != (2, 3):
        raise ValueError(f"L must be given by two vectors in R^3, got shape {basis.shape}")
    w = np.cross(basis[0], basis[1])
    norm = np.linalg.norm(w)
    if norm < 1e-12:
        raise ValueError("L basis vectors are parallel")
    return w / norm


def _merged_length(intervals):
    total, current_lo, current_hi = 0.0, None, None
    for lo, hi in sorted(intervals):
        if current_hi is None or lo > current_hi:
            if current_hi is not None:
                total += current_hi - current_lo
            current_lo, current_hi = lo, hi
        else:
            current_hi = max(current_hi, hi)
    if current_hi is not None:
        total += current_hi - current_lo
    return total


def afp_check(P, L, samples, isotropic=False, snap_tol=1e-6):
    """
    Empirical AFP condition of the sphere union ∂A of a 3D packing.

    Args:
        P: BallPacking (3D)
        L: two vectors spanning the plane L
        samples: iterable of (a, r) with a on some sphere and 0 < r < 1
        isotropic: report ν(B(a, r))/r² instead of the ratio relative to L
        snap_tol: largest accepted distance from a to the nearest sphere,
            relative to max(1, ρ)

    Returns:
        AFPReport

    Raises:
        ValueError: empty packing, a off every sphere, r outside (0, 1)
    """
    if len(P) == 0:
        raise ValueError("empty packing: no boundary to sample")
    if P.dim != 3:
        raise ValueError("afp_check works on 3D packings")
    w = _normal_of_plane(L)
    tree = cKDTree(P.centers)
    rho_max = float(P.rhos.max())
    rows = []
    for a, r in samples:
        a = np.asarray(a, dtype=float)
        r = float(r)
        if not 0.0 < r < 1.0:
            raise ValueError(f"AFP radius must lie in (0, 1), got {r}")
        k = min(8, len(P))
        dist, idx = tree.query(a, k=k)
        dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)
        gaps = np.abs(dist - P.rhos[idx])
        j = int(idx[np.argmin(gaps)])
        if gaps.min() > snap_tol * max(1.0, P.rhos[j]):
            raise ValueError(f"sample point {a.tolist()} is not on any sphere of the packing")
        direction = a - P.centers[j]
        a = P.centers[j] + P.rhos[j] * direction / np.linalg.norm(direction)

        near = np.array(tree.query_ball_point(a, r + rho_max), dtype=int)
        d = np.linalg.norm(P.centers[near] - a, axis=1)
        caps = cap_area(P.rhos[near], d, r)
        nu = math.fsum(np.atleast_1d(caps) / P.rhos[near])
        meeting = near[np.atleast_1d(caps) > 0]
        centre = float(a @ w)
        intervals = []
        for i in meeting:
            c = float(P.centers[i] @ w)
            lo, hi = max(c - P.rhos[i], centre - r), min(c + P.rhos[i], centre + r)
            if hi > lo:
                intervals.append((lo, hi))
        proj = _merged_length(intervals)
        if isotropic:
            ratio = nu / r**2
        else:
            ratio = nu / (r * proj) if proj > 0 else math.inf
        rows.append({"a": a.tolist(), "r": r, "nu": nu, "proj": proj, "ratio": ratio})
    ratios = [row["ratio"] for row in rows]
    gamma = min(ratios) if ratios else 0.0
    passed = bool(ratios) and gamma > 0 and all(math.isfinite(x) for x in ratios)
    return AFPReport(rows, gamma, passed, "isotropic" if isotropic else "relative")


def afp_samples(P, count=1000, seed=0):
    """
    Stratified AFP samples: points on spheres grouped by dyadic bands of ‖a‖,
    radii r ∈ {‖a‖/4, ‖a‖, 4‖a‖} ∩ (0, 1), topped up with uniform radii.
    """
    if len(P) == 0:
        raise ValueError("empty packing: no boundary to sample")
    rng = np.random.default_rng(seed)
    norms = np.linalg.norm(P.centers, axis=1)
    bands = np.floor(-np.log2(np.maximum(norms, 1e-300))).astype(int)
    out = []
    per_band = max(1, count // (3 * len(np.unique(bands))))
    for band in np.unique(bands):
        members = np.nonzero(bands == band)[0]
        chosen = rng.choice(members, size=min(per_band, len(members)), replace=False)
        for i in np.sort(chosen):
            v = rng.standard_normal(P.dim)
            a = P.centers[i] + P.rhos[i] * v / np.linalg.norm(v)
            size = float(np.linalg.norm(a))
            for r in (size / 4.0, size, 4.0 * size):
                if 0.0 < r < 1.0:
                    out.append((a, r))
    while len(out) < count:
        i = int(rng.integers(len(P)))
        v = rng.standard_normal(P.dim)
        a = P.centers[i] + P.rhos[i] * v / np.linalg.norm(v)
        r = float(rng.uniform(1e-3, 1.0 - 1e-9))
        out.append((a, r))
    return out


def isotropic_afp_sequence(P, count=8):
    """
    Samples with a → 0 and r = ‖a‖/2: for geometrically decreasing target
    norms, the sphere whose center norm is closest, at its point nearest 0.
    """
    if len(P) == 0:
        raise ValueError("empty packing: no boundary to sample")
    norms = np.linalg.norm(P.centers, axis=1)
    targets = np.geomspace(norms.max(), norms.min(), count)
    seen, out = set(), []
    for t in targets:
        i = int(np.argmin(np.abs(norms - t)))
        if i in seen:
            continue
        seen.add(i)
        x = P.centers[i]
        a = x - P.rhos[i] * x / np.linalg.norm(x)
        out.append((a, float(np.linalg.norm(a)) / 2.0))
    return out
