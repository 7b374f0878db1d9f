"""
Command line front end.

    minkowski-content estimate    --config scene.json
    minkowski-content content     --config sheet.json
    minkowski-content perimeter   --config scene.json
    minkowski-content generate    --config gen.json [--kind packing3]
    minkowski-content afp         --config afp.json [--isotropic]
    minkowski-content covariogram --config scene.json

Each command writes `<out>/<command>.json` (and `.csv` where it has rows)
and prints a one-line JSON summary on stdout. `perimeter` also dumps the
surface measure atoms to `<out>/perimeter_atoms.csv`.

Exit codes: 0 ok, 2 invalid configuration or input, 3 resource cap.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, ResourceCapError
from .estimators import (
    REPORT_COLUMNS,
    afp_check,
    afp_samples,
    isotropic_afp_sequence,
    lower_bound_holds,
    minkowski_content,
    oracle_agreement,
    outer_content,
    packing_content,
)
from .generators import gen_example1, gen_example2, gen_packing, load_packing, packing_summary, packing_text
from .oracles import shape_oracle
from .reports import OutputSet
from .surface_measures import perimeter_triple
from .voxel_sets import covariogram_derivative, covariogram_profile, density_regularize, rasterize

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOURCE = 3

AFP_COLUMNS = ["a", "r", "nu", "proj", "ratio"]
COVARIOGRAM_COLUMNS = ["t", "offset", "g", "in_extent"]


def _emit(summary):
    print(json.dumps(summary, sort_keys=True))


def _outputs(cfg, command):
    out = Path(cfg.out)
    return out / f"{command}.json", out / f"{command}.csv"


def _oracle_block(shape, Q, report, h, C):
    oracle = shape_oracle(shape, Q)
    if oracle is None:
        return None
    excess_fn, content = oracle
    agree, worst = oracle_agreement(report, excess_fn, h, C)
    perimeter = None
    try:
        perimeter = perimeter_triple(shape.surface_measure(), Q)["P_Q"]
    except (NotImplementedError, AttributeError, TypeError):
        pass
    return {
        "content": content,
        "agreement": agree,
        "worst_relative_deviation": worst,
        "lower_bound_holds": lower_bound_holds(report, perimeter, h) if perimeter is not None else None,
        "c0_relative_error": abs(report.c0 - content) / content if content else None,
    }


def cmd_estimate(cfg):
    """rasterize → (regularize) → outer_content, or the packing estimator for packing scenes."""
    if cfg.is_packing():
        Q = cfg.element()
        sched = cfg.schedule.build()
        packing = load_packing(cfg.packing_path())
        if packing.dim != Q.dim:
            raise ConfigError(f"packing dimension {packing.dim} != Q dimension {Q.dim}")
        report = packing_content(
            packing,
            Q,
            sched,
            cfg.estimator,
            cfg.samples_per_ball,
            cfg.seed,
            cfg.packing_method,
            cfg.hit_or_miss_samples,
        )
        extra = {"summary": packing_summary(packing).to_dict()}
    else:
        shape, Q, sched = cfg.validate()
        h = float(cfg.grid.h)
        A = rasterize(shape, cfg.grid.bounds(), h)
        if cfg.regularize.enabled:
            A = density_regularize(A, cfg.regularize.window, cfg.regularize.threshold)
        report = outer_content(A, Q, sched, cfg.estimator)
        extra = {"oracle": _oracle_block(shape, Q, report, h, cfg.estimator.oracle_C), "grid": A.header()}
    json_path, csv_path = _outputs(cfg, "estimate")
    with OutputSet() as files:
        files.add_csv(csv_path, report.rows(), REPORT_COLUMNS)
        files.add_json(json_path, {"command": "estimate", "config": cfg.to_dict(), "report": report.to_dict(), **extra})
    return {"command": "estimate", "trend": report.trend, "c0": report.c0, "out": str(json_path)}


def cmd_content(cfg):
    """Q-Minkowski content of a rasterized sheet."""
    shape, Q, sched = cfg.validate()
    if not shape.sheet:
        raise ConfigError(f"content needs a sheet shape, got {shape.kind!r}")
    E = rasterize(shape, cfg.grid.bounds(), float(cfg.grid.h))
    report = minkowski_content(E, Q, sched, cfg.estimator)
    extra = {}
    oracle = shape_oracle(shape, Q)
    if oracle is not None:
        extra["oracle"] = {"content": oracle[1], "c0_relative_error": abs(report.c0 - oracle[1]) / oracle[1]}
    json_path, csv_path = _outputs(cfg, "content")
    with OutputSet() as files:
        files.add_csv(csv_path, report.rows(), REPORT_COLUMNS)
        files.add_json(json_path, {"command": "content", "config": cfg.to_dict(), "report": report.to_dict(), **extra})
    return {"command": "content", "trend": report.trend, "c0": report.c0, "out": str(json_path)}


def cmd_perimeter(cfg):
    """{P_Q, P_symmetral, P_iso} from the exact surface measure of the shape."""
    shape = cfg.shape_obj()
    Q = cfg.element()
    if shape.dim != Q.dim:
        raise ConfigError(f"shape dimension {shape.dim} != Q dimension {Q.dim}")
    try:
        S = shape.surface_measure()
    except NotImplementedError:
        raise ValueError(f"shape {shape.kind!r} has no exact surface measure") from None
    values = perimeter_triple(S, Q)
    json_path, csv_path = _outputs(cfg, "perimeter")
    with OutputSet() as files:
        files.add_csv(csv_path, [values], ["P_Q", "P_symmetral", "P_iso"])
        files.add_text(csv_path.with_name("perimeter_atoms.csv"), S.to_csv())
        files.add_json(json_path, {"command": "perimeter", "config": cfg.to_dict(), "measure": S.summary(), **values})
    return {"command": "perimeter", **values, "out": str(json_path)}


def cmd_generate(cfg, kind=None):
    """Packings and example scenes."""
    gen = cfg.generate
    kind = kind or gen.kind
    out = Path(cfg.out)
    packing_kw = {
        "max_rejections": gen.max_rejections,
        "audit_probes": gen.audit_probes,
        "count_cap": gen.count_cap,
    }
    payload = {"command": "generate", "kind": kind, "config": cfg.to_dict()}
    if kind in ("packing2", "packing3"):
        dim = int(kind[-1])
        packing = gen_packing(dim, gen.delta_law(dim), gen.t_min, gen.t_max, cfg.seed, **packing_kw)
        path = out / f"{kind}.jsonl"
        payload.update(packing=path.name, summary=packing_summary(packing).to_dict(), meta=packing.meta)
    elif kind == "example1":
        law = gen.delta_law(gen.n - gen.k)
        example = gen_example1(gen.k, gen.n, gen.C, law=law, t_min=gen.t_min, seed=cfg.seed, t_max=gen.t_max, **packing_kw)
        packing = example.D
        path = out / "example1_D.jsonl"
        payload.update(scene=example.to_dict(), packing=path.name)
    elif kind == "example2":
        scene = gen_example2(law=gen.delta_law(2), t_min=gen.t_min, seed=cfg.seed, gap=gen.gap, t_max=gen.t_max, **packing_kw)
        packing = scene.D
        path = out / "example2_D.jsonl"
        description = scene.to_dict()
        description["D"] = {"type": "packing", "path": path.name}
        payload.update(scene=description, packing=path.name, gaps=scene.bbox_gaps())
    else:
        raise ConfigError(f"unknown generate kind {kind!r}; choose packing2, packing3, example1 or example2")
    json_path = out / "generate.json"
    with OutputSet() as files:
        files.add_text(path, packing_text(packing))
        files.add_json(json_path, payload)
    return {"command": "generate", "kind": kind, "out": str(json_path)}


def cmd_afp(cfg, isotropic=None):
    """Empirical AFP check on a packing file."""
    settings = cfg.afp
    if settings.packing is None:
        raise ConfigError("afp.packing (path of a packing file) is required")
    isotropic = settings.isotropic if isotropic is None else isotropic
    packing = load_packing(cfg.packing_path(settings.packing))
    if len(packing) == 0:
        raise ValueError("empty packing: no boundary to sample")
    if isotropic:
        samples = isotropic_afp_sequence(packing, min(settings.samples, len(packing)))
    else:
        samples = afp_samples(packing, settings.samples, cfg.seed)
    report = afp_check(packing, settings.L, samples, isotropic=isotropic)
    json_path, csv_path = _outputs(cfg, "afp")
    with OutputSet() as files:
        files.add_csv(csv_path, report.samples, AFP_COLUMNS)
        files.add_json(json_path, {"command": "afp", "config": cfg.to_dict(), **report.to_dict()})
    return {"command": "afp", "pass": report.passed, "gamma_hat": report.gamma_hat, "out": str(json_path)}


def cmd_covariogram(cfg):
    """Covariogram profile along u and its slope at 0."""
    shape = cfg.shape_obj()
    if cfg.grid.h is None or cfg.grid.bbox is None:
        raise ConfigError("covariogram needs grid.h and grid.bbox")
    u = cfg.covariogram.u
    if u is None:
        u = [1.0] + [0.0] * (shape.dim - 1)
    if len(u) != shape.dim:
        raise ConfigError(f"covariogram.u must have dimension {shape.dim}")
    A = rasterize(shape, cfg.grid.bounds(), float(cfg.grid.h))
    rows = covariogram_profile(A, u, cfg.covariogram.steps)
    slope = covariogram_derivative(A, u, cfg.covariogram.steps)
    json_path, csv_path = _outputs(cfg, "covariogram")
    with OutputSet() as files:
        files.add_csv(csv_path, rows, COVARIOGRAM_COLUMNS)
        files.add_json(
            json_path,
            {"command": "covariogram", "config": cfg.to_dict(), "derivative": slope, "volume": A.volume(), "profile": rows},
        )
    return {"command": "covariogram", "derivative": slope, "out": str(json_path)}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="scene configuration (JSON)")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, help="worker threads, 0 = one per CPU")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="minkowski-content", description="Anisotropic Minkowski content estimation")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("estimate", parents=[common], help="outer Q-Minkowski content of a solid or packing")
    sub.add_parser("content", parents=[common], help="Q-Minkowski content of a sheet")
    sub.add_parser("perimeter", parents=[common], help="exact anisotropic perimeters")
    generate = sub.add_parser("generate", parents=[common], help="packings and example scenes")
    generate.add_argument("--kind", choices=["packing2", "packing3", "example1", "example2"])
    afp = sub.add_parser("afp", parents=[common], help="empirical AFP condition on a packing")
    afp.add_argument("--isotropic", action="store_true", default=None, help="report ν(B(a,r))/r²")
    sub.add_parser("covariogram", parents=[common], help="covariogram profile and derivative")
    return parser


def run(args):
    cfg = load_config(args.config)
    threads = args.threads
    if threads == 0:
        threads = os.cpu_count() or 1
    cfg = cfg.with_overrides(seed=args.seed, out=args.out, threads=threads)
    if args.command == "estimate":
        return cmd_estimate(cfg)
    if args.command == "content":
        return cmd_content(cfg)
    if args.command == "perimeter":
        return cmd_perimeter(cfg)
    if args.command == "generate":
        return cmd_generate(cfg, args.kind)
    if args.command == "afp":
        return cmd_afp(cfg, args.isotropic)
    return cmd_covariogram(cfg)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        _emit(run(args))
    except ResourceCapError as exc:
        logger.error("%s", exc)
        return EXIT_RESOURCE
    except (ConfigError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
