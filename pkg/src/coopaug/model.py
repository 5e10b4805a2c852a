"""Core domain types: point clouds, rigid transforms, agents, groups, distributions."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

EGO_FRAME = "ego"


@dataclass(frozen=True)
class PointCloud:
    """Ordered 3D points with intensity, tagged with a coordinate frame.

    xyz is an (N, 3) float64 array, intensity an (N,) float64 array in [0, 1].
    """

    xyz: np.ndarray
    intensity: np.ndarray
    frame: str

    @staticmethod
    def empty(frame: str) -> "PointCloud":
        return PointCloud(np.zeros((0, 3)), np.zeros(0), frame)

    @staticmethod
    def from_arrays(xyz, intensity=None, frame: str = EGO_FRAME) -> "PointCloud":
        xyz = np.asarray(xyz, dtype=np.float64).reshape(-1, 3)
        if intensity is None:
            intensity = np.ones(len(xyz))
        intensity = np.asarray(intensity, dtype=np.float64).reshape(-1)
        if len(intensity) != len(xyz):
            raise ValueError("xyz and intensity length mismatch")
        return PointCloud(xyz, intensity, frame)

    def __len__(self) -> int:
        return len(self.xyz)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.xyz).all() and np.isfinite(self.intensity).all())


@dataclass(frozen=True)
class RigidTransform:
    """Rotation (3x3, det +1) plus translation (3,), both float64."""

    rotation: np.ndarray
    translation: np.ndarray

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))

    @staticmethod
    def from_ypr(yaw: float, pitch: float = 0.0, roll: float = 0.0,
                 translation=(0.0, 0.0, 0.0)) -> "RigidTransform":
        cy, sy = math.cos(yaw), math.sin(yaw)
        cp, sp = math.cos(pitch), math.sin(pitch)
        cr, sr = math.cos(roll), math.sin(roll)
        rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
        ry = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
        rx = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
        return RigidTransform(rz @ ry @ rx, np.asarray(translation, dtype=np.float64))

    def to_ypr(self) -> tuple[float, float, float]:
        """Inverse of from_ypr (Z-Y-X convention)."""
        r = self.rotation
        pitch = math.asin(max(-1.0, min(1.0, -r[2, 0])))
        yaw = math.atan2(r[1, 0], r[0, 0])
        roll = math.atan2(r[2, 1], r[2, 2])
        return yaw, pitch, roll

    def is_valid(self, tol: float = 1e-9) -> bool:
        r = self.rotation
        return (np.abs(r @ r.T - np.eye(3)).max() < tol
                and abs(np.linalg.det(r) - 1.0) < tol)

    def inverse(self) -> "RigidTransform":
        rt = self.rotation.T
        return RigidTransform(rt, -rt @ self.translation)

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self after other: (self ∘ other)(p) = self(other(p))."""
        return RigidTransform(self.rotation @ other.rotation,
                              self.rotation @ other.translation + self.translation)


@dataclass(frozen=True)
class AgentType:
    """LiDAR sensor/platform configuration of one agent class."""

    name: str
    beams: int
    range_m: float
    fov_deg: tuple[float, float]
    range_error_m: float
    realism: str          # "Sim" | "Real"
    agent_class: str      # "Vehicle" | "Infrastructure"

    def __post_init__(self):
        if self.beams < 1 or self.range_m <= 0 or self.range_error_m < 0:
            raise ValueError("invalid agent type parameters")
        if not self.fov_deg[0] < self.fov_deg[1]:
            raise ValueError("fov min must be < max")


# Built-in sensor setups for agent types A..E. Type D's error is unpublished
# and stored as 0 rather than inventing noise.
AGENT_TYPES: dict[str, AgentType] = {
    "A": AgentType("A", 64, 120.0, (-25.0, 5.0), 0.02, "Sim", "Vehicle"),
    "B": AgentType("B", 32, 120.0, (-25.0, 5.0), 0.02, "Sim", "Infrastructure"),
    "C": AgentType("C", 32, 200.0, (-25.0, 15.0), 0.03, "Real", "Vehicle"),
    "D": AgentType("D", 40, 200.0, (-30.0, 10.0), 0.0, "Real", "Vehicle"),
    "E": AgentType("E", 300, 280.0, (-30.0, 10.0), 0.03, "Real", "Infrastructure"),
}


@dataclass(frozen=True)
class Agent:
    id: str
    pose: RigidTransform          # agent sensor frame -> ego frame
    cloud: PointCloud             # in ego frame
    agent_type: AgentType
    is_ego: bool = False


@dataclass(frozen=True)
class CooperativeGroup:
    agents: tuple[Agent, ...]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def ego_index(self) -> int:
        for i, a in enumerate(self.agents):
            if a.is_ego:
                return i
        raise ValueError("group has no ego agent")


@dataclass(frozen=True)
class CountDistribution:
    """Probability mass function over agent counts; queries off support return 0."""

    pmf: dict[int, float]

    def __post_init__(self):
        object.__setattr__(self, "pmf", dict(self.pmf))
        total = sum(self.pmf.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"pmf sums to {total}, not 1")
        for k, p in self.pmf.items():
            if k < 1 or not (0.0 <= p <= 1.0 + 1e-12):
                raise ValueError(f"bad pmf entry {k}: {p}")

    def prob(self, count: int) -> float:
        return self.pmf.get(count, 0.0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.pmf))

    def tv_distance(self, other: "CountDistribution") -> float:
        keys = set(self.pmf) | set(other.pmf)
        return 0.5 * sum(abs(self.prob(k) - other.prob(k)) for k in keys)


@dataclass(frozen=True)
class CmagConfig:
    """Tunable parameters of the augmentation pipeline.

    All magnitudes are configuration, not physics: the split rotation keeps
    both source agents contributing, the setup perturbations are at the scale
    of typical sensor error, and the gate epsilon only guards division by zero.
    """

    split_rotation_range_rad: float = math.pi / 4
    pa_density_targets: tuple[int, ...] = (16, 32, 40, 64, 128)
    pa_rotation_range_rad: float = 0.0175
    pa_scale_range: tuple[float, float] = (0.98, 1.02)
    pa_translation_bound_m: float = 0.05
    pa_azimuth_bins: int = 2048
    gate_epsilon: float = 1e-6
    w1: float = 1.0
    w2: float = 1.0
    seed: int = 0
    # "origin": split centers are sensor origins; "centroid": BEV cloud centroids.
    mixup_center: str = "origin"
    # "replace": Keep gate swaps the mixup agent in; "discard": group unchanged.
    keep_mode: str = "replace"

    def __post_init__(self):
        object.__setattr__(self, "pa_density_targets",
                           tuple(sorted(set(int(t) for t in self.pa_density_targets))))
        if self.gate_epsilon <= 0:
            raise ValueError("gate_epsilon must be positive")
        if min(self.pa_scale_range) <= 0:
            raise ValueError("pa_scale_range must be strictly positive")
        if min(self.split_rotation_range_rad, self.pa_rotation_range_rad,
               self.pa_translation_bound_m) < 0:
            raise ValueError("ranges must be nonnegative")


class RngStream:
    """Deterministic random stream keyed by (seed, label).

    The same seed, label, and call sequence always reproduce the same values.
    Streams are single-owner; derive() creates independent child streams.
    """

    def __init__(self, seed: int, label: str = "root"):
        self.seed = int(seed)
        self.label = label
        key = [self.seed & 0xFFFFFFFFFFFFFFFF] + list(label.encode("utf-8"))
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))

    def derive(self, label: str) -> "RngStream":
        return RngStream(self.seed, f"{self.label}/{label}")

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size)

    def integers(self, low: int, high: int, size=None):
        return self._gen.integers(low, high, size)

    def choice(self, seq):
        return seq[int(self._gen.integers(0, len(seq)))]


def transform_cloud(cloud: PointCloud, t: RigidTransform, target_frame: str) -> PointCloud:
    """Apply a rigid transform to every point; intensity and order preserved."""
    xyz = cloud.xyz @ t.rotation.T + t.translation
    return PointCloud(xyz, cloud.intensity.copy(), target_frame)


def validate_group(group: CooperativeGroup) -> str | None:
    """Return None if the group satisfies all invariants, else a violation message."""
    if group.n < 1:
        return "empty group"
    n_ego = sum(a.is_ego for a in group.agents)
    if n_ego != 1:
        return f"ego count = {n_ego}"
    ids = [a.id for a in group.agents]
    if len(set(ids)) != len(ids):
        return "duplicate agent ids"
    for a in group.agents:
        if a.cloud.frame != EGO_FRAME:
            return f"agent {a.id}: cloud frame {a.cloud.frame!r} is not ego"
        if not a.cloud.is_finite():
            return f"agent {a.id}: non-finite point"
        if not a.pose.is_valid():
            return f"agent {a.id}: invalid pose"
    return None


def replace_agent(agent: Agent, **kwargs) -> Agent:
    return replace(agent, **kwargs)
