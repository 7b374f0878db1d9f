"""
Scene configuration.

One JSON document per command line invocation:

    {
      "shape":      {"type": "square", "side": 1.0},
      "Q":          {"type": "ball", "center": [0, 0], "radius": 1.0},
      "grid":       {"h": 0.0009765625, "bbox": [[-0.1, -0.1], [1.1, 1.1]]},
      "schedule":   {"r_max": 0.0625, "r_min": 0.0078125, "count": 12},
      "regularize": {"enabled": false, "window": null, "threshold": null},
      "estimator":  {"residual_tol": 0.05, ...},
      "generate":   {"kind": "packing3", "law": {"family": "power", "k": 4}, ...},
      "afp":        {"packing": "packing.jsonl", "L": [[1,0,0],[0,1,0]], ...},
      "covariogram": {"u": [1, 0], "steps": [1, 2, 3, 4, 5, 6, 7, 8]},
      "samples_per_ball": 16, "packing_method": "bodies", "hit_or_miss_samples": 1000000,
      "seed": 0, "threads": 1, "out": "out"
    }

Every section is optional; missing keys take the dataclass defaults, and
`SceneConfig.to_dict()` echoes the resolved values into every output file.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .convex_bodies import bounding_box, element_from_dict
from .errors import ConfigError
from .estimators import EstimatorSettings, RSchedule
from .generators import DESK_LAWS, DeltaLaw
from .shapes import shape_from_dict

logger = logging.getLogger(__name__)

PACKING_METHODS = ("bodies", "hit_or_miss")


def _section(cls, data, name):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown keys in '{name}': {unknown}; allowed: {sorted(known)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"invalid '{name}' section: {exc}") from None


@dataclass(frozen=True)
class GridSettings:
    h: float = None
    bbox: list = None

    def bounds(self):
        lo, hi = (np.asarray(b, dtype=float) for b in self.bbox)
        return lo, hi


@dataclass(frozen=True)
class ScheduleSettings:
    r_max: float = None
    r_min: float = None
    count: int = 12
    ratio: float = 2**-0.5
    snap: bool = False

    def build(self):
        if self.r_max is None:
            raise ConfigError("schedule.r_max is required")
        return RSchedule.geometric(self.r_max, self.r_min, self.count, self.ratio)


@dataclass(frozen=True)
class RegularizeSettings:
    enabled: bool = False
    window: int = None
    threshold: float = None


@dataclass(frozen=True)
class GenerateSettings:
    kind: str = "packing3"
    law: dict = None
    t_min: float = 0.5
    t_max: float = 1.0
    max_rejections: int = 100_000
    audit_probes: int = 10_000
    count_cap: float = 1e7
    k: int = 2
    n: int = 4
    C: str = "disk"
    gap: float = 1.0

    def delta_law(self, dim):
        return DeltaLaw.from_dict(self.law) if self.law else DESK_LAWS[dim]


@dataclass(frozen=True)
class AFPSettings:
    packing: str = None
    L: list = field(default_factory=lambda: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    samples: int = 1000
    isotropic: bool = False


@dataclass(frozen=True)
class CovariogramSettings:
    u: list = None
    steps: list = field(default_factory=lambda: list(range(1, 9)))


@dataclass(frozen=True)
class SceneConfig:
    shape: dict = None
    Q: dict = None
    grid: GridSettings = field(default_factory=GridSettings)
    schedule: ScheduleSettings = field(default_factory=ScheduleSettings)
    regularize: RegularizeSettings = field(default_factory=RegularizeSettings)
    estimator: EstimatorSettings = field(default_factory=EstimatorSettings)
    generate: GenerateSettings = field(default_factory=GenerateSettings)
    afp: AFPSettings = field(default_factory=AFPSettings)
    covariogram: CovariogramSettings = field(default_factory=CovariogramSettings)
    samples_per_ball: int = 16
    packing_method: str = "bodies"
    hit_or_miss_samples: int = 1_000_000
    seed: int = 0
    threads: int = 1
    out: str = "out"
    base_dir: str = "."

    @classmethod
    def from_dict(cls, doc, base_dir="."):
        doc = dict(doc)
        sections = {
            "grid": GridSettings,
            "schedule": ScheduleSettings,
            "regularize": RegularizeSettings,
            "estimator": EstimatorSettings,
            "generate": GenerateSettings,
            "afp": AFPSettings,
            "covariogram": CovariogramSettings,
        }
        kwargs = {name: _section(kind, doc.pop(name, None), name) for name, kind in sections.items()}
        scalars = {"shape", "Q", "samples_per_ball", "packing_method", "hit_or_miss_samples", "seed", "threads", "out"}
        unknown = sorted(set(doc) - scalars)
        if unknown:
            raise ConfigError(f"unknown top-level keys: {unknown}")
        kwargs.update({k: doc[k] for k in scalars if k in doc})
        if kwargs.get("packing_method", "bodies") not in PACKING_METHODS:
            raise ConfigError(f"packing_method must be one of {PACKING_METHODS}, got {kwargs['packing_method']!r}")
        return cls(base_dir=str(base_dir), **kwargs)

    def with_overrides(self, seed=None, out=None, threads=None):
        changes = {k: v for k, v in (("seed", seed), ("out", out), ("threads", threads)) if v is not None}
        if "threads" in changes:
            changes["estimator"] = replace(self.estimator, threads=changes["threads"])
        return replace(self, **changes)

    def to_dict(self):
        data = asdict(self)
        data.pop("base_dir")
        return data

    # -- parsed objects -------------------------------------------------

    def element(self):
        if self.Q is None:
            raise ConfigError("config needs a 'Q' structuring element")
        try:
            return element_from_dict(self.Q)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid Q: {exc}") from None

    def shape_obj(self):
        if self.shape is None:
            raise ConfigError("config needs a 'shape'")
        try:
            return shape_from_dict(self.shape, self.base_dir)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"invalid shape: {exc}") from None

    def is_packing(self):
        return bool(self.shape) and self.shape.get("type") == "packing" and "path" in self.shape

    def packing_path(self, path=None):
        path = Path(path or self.shape["path"])
        return path if path.is_absolute() else Path(self.base_dir) / path

    # -- validation -----------------------------------------------------

    def required_bbox(self, shape, Q, r_max):
        """Box of shape ⊕ r_max·Q."""
        slo, shi = shape.bounding_box()
        qlo, qhi = bounding_box(Q)
        return slo + r_max * qlo, shi + r_max * qhi

    def validate(self, grid=True):
        """
        Check the scene before any grid is allocated.

        Returns:
            (shape, Q, schedule)

        Raises:
            ConfigError: naming the first failed condition
        """
        Q = self.element()
        shape = self.shape_obj()
        if shape.dim != Q.dim:
            raise ConfigError(f"shape dimension {shape.dim} != Q dimension {Q.dim}")
        sched = self.schedule.build()
        if not grid:
            return shape, Q, sched
        if self.grid.h is None or not self.grid.h > 0:
            raise ConfigError(f"grid.h must be a positive number, got {self.grid.h}")
        if self.grid.bbox is None:
            raise ConfigError("grid.bbox is required")
        h = float(self.grid.h)
        if self.schedule.snap:
            sched = sched.snapped(h)
        sched.check_resolution(h)
        lo, hi = self.grid.bounds()
        if len(lo) != shape.dim or len(hi) != shape.dim:
            raise ConfigError(f"grid.bbox must have dimension {shape.dim}")
        need_lo, need_hi = self.required_bbox(shape, Q, sched.r_max)
        if np.any(lo > need_lo + 1e-12) or np.any(hi < need_hi - 1e-12):
            raise ConfigError(
                f"grid.bbox {lo.tolist()}..{hi.tolist()} does not cover shape ⊕ r_max·Q; "
                f"required bbox {need_lo.tolist()}..{need_hi.tolist()}"
            )
        return shape, Q, sched


def load_config(path):
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    logger.debug("loaded config %s", path)
    return SceneConfig.from_dict(doc, base_dir=path.parent)
