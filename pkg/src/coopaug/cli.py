"""Command-line interface: simulate, augment, gate-stats, project, cfc-check."""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import BadMagic, CoopaugError, IoFailure, TruncatedFile
from .gate import (TABLE_DISTRIBUTIONS, comprehensive_from_tables, gate_responses)
from .io import load_cloud, load_manifest, save_manifest, save_range_image_pgm
from .model import AGENT_TYPES, CmagConfig, CountDistribution, RngStream
from .pipeline import cmag, early_fuse, fuse_grids, occupancy, cfc_l1
from .rangeview import project as project_cloud
from .sim import make_group, make_scene


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _load_source_dist(name: str, dist_file: str | None) -> CountDistribution:
    if name in TABLE_DISTRIBUTIONS:
        return TABLE_DISTRIBUTIONS[name]
    if name == "file":
        if not dist_file:
            raise _UsageError("--source-dist file requires --dist-file")
        try:
            doc = json.loads(Path(dist_file).read_text())
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        return CountDistribution({int(k): float(v) for k, v in doc.items()})
    raise _UsageError(f"unknown source distribution {name!r}")


def _cmd_simulate(args) -> int:
    type_names = [t.strip().upper() for t in args.types.split(",") if t.strip()]
    if len(type_names) != args.agents:
        raise _UsageError(f"--types lists {len(type_names)} types for {args.agents} agents")
    try:
        types = [AGENT_TYPES[t] for t in type_names]
    except KeyError as exc:
        raise _UsageError(f"unknown agent type {exc}") from exc
    rng = RngStream(args.seed, "simulate")
    scene = make_scene(args.boxes, args.agents, types, rng.derive("scene"))
    group = make_group(scene, ego_index=0, rng=rng.derive("lidar"))
    manifest = save_manifest(group, args.out, ground_z=scene.ground_z, boxes=scene.boxes)
    print(f"wrote {manifest} ({group.n} agents, {args.boxes} boxes)")
    return 0


def _cmd_augment(args) -> int:
    group, meta = load_manifest(args.manifest)
    phi_s = _load_source_dist(args.source_dist, args.dist_file)
    phi_c = comprehensive_from_tables()
    cfg = CmagConfig(seed=args.seed)
    out = cmag(group, phi_s, phi_c, cfg, RngStream(args.seed, "augment"))
    boxes = np.array([b["center"] + b["half_extents"] for b in meta["boxes"]]).reshape(-1, 6)
    manifest = save_manifest(out, args.out, ground_z=meta["ground_z"], boxes=boxes)
    print(f"wrote {manifest} (N {group.n} -> {out.n})")
    return 0


def _cmd_gate_stats(args) -> int:
    phi_s = _load_source_dist(args.source_dist, args.dist_file)
    phi_c = comprehensive_from_tables()
    counts = sorted(set(phi_s.pmf) | set(phi_c.pmf))
    print("count  phi_s     phi_c     r_plus       r_minus      L_plus   L_keep   L_minus")
    for n in counts:
        resp = gate_responses(phi_s, phi_c, n, args.epsilon)
        lp, lk, lm = resp.likelihoods
        print(f"{n:5d}  {phi_s.prob(n):.6f}  {phi_c.prob(n):.6f}  "
              f"{resp.r_plus:<11.5g}  {resp.r_minus:<11.5g}  "
              f"{lp:.4f}   {lk:.4f}   {lm:.4f}")
    rng = RngStream(args.seed, "gate-stats")
    support = np.array(sorted(phi_s.pmf))
    probs = np.array([phi_s.pmf[k] for k in support])
    draws = support[np.searchsorted(np.cumsum(probs),
                                    rng.uniform(size=args.iterations), side="right")]
    out = draws.copy()
    for n in np.unique(draws):
        resp = gate_responses(phi_s, phi_c, int(n), args.epsilon)
        lp, lk, _ = resp.likelihoods
        sel = draws == n
        u = rng.uniform(size=int(sel.sum()))
        step = np.where(u < lp, 1, np.where(u < lp + lk, 0, -1))
        out[sel] = n + step
    emp_pre = CountDistribution({int(k): float(c) / len(draws)
                                 for k, c in zip(*np.unique(draws, return_counts=True))})
    emp_post = CountDistribution({int(k): float(c) / len(out)
                                  for k, c in zip(*np.unique(out, return_counts=True))})
    print(f"TV(pre, phi_c)  = {emp_pre.tv_distance(phi_c):.6f}")
    print(f"TV(post, phi_c) = {emp_post.tv_distance(phi_c):.6f}")
    return 0


def _cmd_project(args) -> int:
    type_name = args.type.strip().upper()
    if type_name not in AGENT_TYPES:
        raise _UsageError(f"unknown agent type {args.type!r}")
    agent_type = AGENT_TYPES[type_name]
    cloud = load_cloud(args.cloud)
    img = project_cloud(cloud, agent_type.fov_deg, agent_type.beams, args.width)
    save_range_image_pgm(img, args.out)
    print(f"wrote {args.out} ({img.H}x{img.W})")
    return 0


def _cmd_cfc_check(args) -> int:
    group, _ = load_manifest(args.manifest)
    early_grid = occupancy(early_fuse(group))
    if args.no_aug:
        generalized = group
    else:
        phi_s = _load_source_dist(args.source_dist, args.dist_file)
        generalized = cmag(group, phi_s, comprehensive_from_tables(),
                           CmagConfig(seed=args.seed), RngStream(args.seed, "augment"))
    fused = fuse_grids([occupancy(a.cloud) for a in generalized.agents])
    print(f"{cfc_l1(fused, early_grid):.1f}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="coopaug",
                     description="Cooperative LiDAR mixup augmentation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic scene manifest")
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--types", required=True, help="comma-separated agent types, e.g. A,B")
    p.add_argument("--boxes", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("augment", help="run the augmentation pipeline on a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--source-dist", default="opv2v")
    p.add_argument("--dist-file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1,
                   help="worker bound; output is identical for any value")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("gate-stats", help="print gate responses and Monte-Carlo drift")
    p.add_argument("--source-dist", default="opv2v")
    p.add_argument("--dist-file")
    p.add_argument("--iterations", type=int, default=100000)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_gate_stats)

    p = sub.add_parser("project", help="write a range-image PGM for a cloud")
    p.add_argument("--cloud", required=True)
    p.add_argument("--type", required=True)
    p.add_argument("--width", type=int, default=2048)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("cfc-check", help="print the occupancy-consistency L1 value")
    p.add_argument("--manifest", required=True)
    p.add_argument("--source-dist", default="opv2v")
    p.add_argument("--dist-file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-aug", action="store_true")
    p.set_defaults(func=_cmd_cfc_check)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IoFailure, BadMagic, TruncatedFile) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except (CoopaugError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
