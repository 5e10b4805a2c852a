"""Deterministic cooperative-mixup augmentation for multi-agent LiDAR clouds."""

from .errors import (BadMagic, BadTarget, CoopaugError, DegenerateCenters,
                     EmptyInput, GroupTooSmall, InvalidPair, IoFailure,
                     MismatchedGrids, PlacementFailure, TruncatedFile)
from .gate import (GateChoice, GateResponses, TABLE_DISTRIBUTIONS, apply_gate,
                   comprehensive_distribution, comprehensive_from_tables,
                   estimate_source_distribution, gate_responses, sample_gate)
from .io import (CLOUD_MAGIC, MANIFEST_VERSION, load_cloud, load_manifest,
                 save_cloud, save_manifest, save_range_image_pgm)
from .kernels import NUMBA_ENABLED, ray_cast, scatter_nearest
from .mixup import (SplitLine, bev_center, cut_and_combine, make_mixup_agent,
                    nearest_pair, split_line)
from .model import (AGENT_TYPES, EGO_FRAME, Agent, AgentType, CmagConfig,
                    CooperativeGroup, CountDistribution, PointCloud,
                    RigidTransform, RngStream, transform_cloud, validate_group)
from .pipeline import (DEFAULT_CELL_M, DEFAULT_EXTENT, OccupancyGrid, cfc_l1,
                       cmag, early_fuse, fuse_grids, occupancy, total_loss)
from .rangeview import (NO_RETURN, RangeImage, density_augment, project,
                        resample_beams, unproject)
from .setupaug import SetupAugParams, apply_setup_aug, sample_setup_params
from .sim import Scene, make_group, make_scene, simulate_lidar

__version__ = "0.1.0"
