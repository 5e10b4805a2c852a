"""Mixup agent construction: half-plane cut between the two nearest agents."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCenters, GroupTooSmall
from .model import (EGO_FRAME, Agent, CmagConfig, CooperativeGroup, PointCloud,
                    RngStream)


@dataclass(frozen=True)
class SplitLine:
    """BEV line through `anchor` with unit `direction`; signs of the 2D cross
    product against the direction partition the plane."""

    anchor: np.ndarray     # (2,)
    direction: np.ndarray  # (2,), unit norm

    def side(self, xy: np.ndarray) -> np.ndarray:
        """Signed side of BEV points (N, 2): cross(direction, p - anchor)."""
        rel = xy - self.anchor
        return self.direction[0] * rel[:, 1] - self.direction[1] * rel[:, 0]


def bev_center(agent: Agent, use_centroid: bool = False) -> np.ndarray:
    """BEV position of an agent: sensor origin by default, cloud centroid on request."""
    if use_centroid and len(agent.cloud) > 0:
        return agent.cloud.xyz[:, :2].mean(axis=0)
    return agent.pose.translation[:2].copy()


def nearest_pair(group: CooperativeGroup, use_centroid: bool = False) -> tuple[int, int]:
    """Index pair with minimum BEV distance; lexicographic tie-break."""
    if group.n < 2:
        raise GroupTooSmall(f"need at least 2 agents, got {group.n}")
    centers = [bev_center(a, use_centroid) for a in group.agents]
    best = None
    best_d = math.inf
    for i in range(group.n):
        for j in range(i + 1, group.n):
            d = float(np.hypot(*(centers[i] - centers[j])))
            if d < best_d - 1e-15:
                best_d = d
                best = (i, j)
    return best


def split_line(c1: np.ndarray, c2: np.ndarray, rotation_rad: float) -> SplitLine:
    """Perpendicular bisector of (c1, c2) rotated by rotation_rad in the plane."""
    c1 = np.asarray(c1, dtype=np.float64)
    c2 = np.asarray(c2, dtype=np.float64)
    delta = c2 - c1
    norm = float(np.hypot(*delta))
    if norm < 1e-9:
        raise DegenerateCenters("split centers coincide")
    # base direction: +90 degree rotation of the center-to-center direction
    base = np.array([-delta[1], delta[0]]) / norm
    c, s = math.cos(rotation_rad), math.sin(rotation_rad)
    direction = np.array([c * base[0] - s * base[1], s * base[0] + c * base[1]])
    return SplitLine((c1 + c2) / 2.0, direction)


def cut_and_combine(p1: PointCloud, p2: PointCloud, line: SplitLine) -> PointCloud:
    """Keep p1's points with side >= 0 and p2's with side < 0, in input order."""
    keep1 = line.side(p1.xyz[:, :2]) >= 0.0 if len(p1) else np.zeros(0, dtype=bool)
    keep2 = line.side(p2.xyz[:, :2]) < 0.0 if len(p2) else np.zeros(0, dtype=bool)
    xyz = np.concatenate([p1.xyz[keep1], p2.xyz[keep2]])
    intensity = np.concatenate([p1.intensity[keep1], p2.intensity[keep2]])
    return PointCloud(xyz, intensity, EGO_FRAME)


def _fresh_id(group: CooperativeGroup) -> str:
    taken = {a.id for a in group.agents}
    k = 0
    while f"mixup-{k}" in taken:
        k += 1
    return f"mixup-{k}"


def make_mixup_agent(group: CooperativeGroup, cfg: CmagConfig, rng: RngStream,
                     pair: tuple[int, int] | None = None) -> Agent:
    """Build the mixup agent from the nearest pair's half-plane combination.

    Pose and sensor type are inherited from the pair member that contributed
    more points to the cut (ties go to the first member).
    """
    use_centroid = cfg.mixup_center == "centroid"
    if pair is None:
        pair = nearest_pair(group, use_centroid)
    a1, a2 = group.agents[pair[0]], group.agents[pair[1]]
    rot = float(rng.uniform(-cfg.split_rotation_range_rad, cfg.split_rotation_range_rad))
    line = split_line(bev_center(a1, use_centroid), bev_center(a2, use_centroid), rot)
    keep1 = line.side(a1.cloud.xyz[:, :2]) >= 0.0 if len(a1.cloud) else np.zeros(0, dtype=bool)
    keep2 = line.side(a2.cloud.xyz[:, :2]) < 0.0 if len(a2.cloud) else np.zeros(0, dtype=bool)
    xyz = np.concatenate([a1.cloud.xyz[keep1], a2.cloud.xyz[keep2]])
    intensity = np.concatenate([a1.cloud.intensity[keep1], a2.cloud.intensity[keep2]])
    donor = a1 if int(keep1.sum()) >= int(keep2.sum()) else a2
    return Agent(id=_fresh_id(group), pose=donor.pose,
                 cloud=PointCloud(xyz, intensity, EGO_FRAME),
                 agent_type=donor.agent_type, is_ego=False)
