"""Range-view projection, unprojection, and beam-count resampling."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadTarget
from .kernels import scatter_nearest
from .model import AgentType, CmagConfig, PointCloud, RngStream

NO_RETURN = 0.0


@dataclass(frozen=True)
class RangeImage:
    """Beam-by-azimuth grid of ranges (0 marks no return) with intensities."""

    ranges: np.ndarray       # (H, W) float64, 0 where no return
    intensities: np.ndarray  # (H, W) float64
    fov_deg: tuple[float, float]
    frame: str

    @property
    def H(self) -> int:
        return self.ranges.shape[0]

    @property
    def W(self) -> int:
        return self.ranges.shape[1]

    def valid_mask(self) -> np.ndarray:
        return self.ranges > NO_RETURN


def project(cloud: PointCloud, fov_deg: tuple[float, float], H: int, W: int) -> RangeImage:
    """Spherical projection into an H x W range image.

    Azimuth theta maps to columns with theta = pi at column 0; elevation phi
    maps the FOV upper bound to row 0 and the lower bound to row H-1. Points
    outside the vertical FOV are dropped; pixel collisions keep the nearest
    return (first-return behavior).
    """
    f_min = math.radians(fov_deg[0])
    f_max = math.radians(fov_deg[1])
    f = f_max - f_min
    if len(cloud) == 0:
        return RangeImage(np.zeros((H, W)), np.zeros((H, W)), fov_deg, cloud.frame)
    x, y, z = cloud.xyz[:, 0], cloud.xyz[:, 1], cloud.xyz[:, 2]
    horiz = np.hypot(x, y)
    theta = np.arctan2(y, x)
    phi = np.arctan2(z, horiz)
    rng = np.sqrt(x * x + y * y + z * z)
    keep = (phi >= f_min) & (phi <= f_max) & (rng > 0)
    rx = 0.5 * (1.0 - theta[keep] / math.pi) * W
    ry = (f_max - phi[keep]) / f * H
    cols = np.floor(rx).astype(np.int64) % W
    rows = np.clip(np.floor(ry).astype(np.int64), 0, H - 1)
    rimg, iimg = scatter_nearest(rows, cols, rng[keep], cloud.intensity[keep], H, W)
    return RangeImage(rimg, iimg, fov_deg, cloud.frame)


def unproject(img: RangeImage) -> PointCloud:
    """One point per valid pixel, along the pixel-center ray, range preserved."""
    f_min = math.radians(img.fov_deg[0])
    f_max = math.radians(img.fov_deg[1])
    f = f_max - f_min
    rows, cols = np.nonzero(img.valid_mask())
    if len(rows) == 0:
        return PointCloud.empty(img.frame)
    theta = math.pi * (1.0 - 2.0 * (cols + 0.5) / img.W)
    phi = f_max - f * (rows + 0.5) / img.H
    r = img.ranges[rows, cols]
    cos_phi = np.cos(phi)
    xyz = np.stack([r * cos_phi * np.cos(theta),
                    r * cos_phi * np.sin(theta),
                    r * np.sin(phi)], axis=1)
    return PointCloud(xyz, img.intensities[rows, cols].copy(), img.frame)


def resample_beams(img: RangeImage, target_H: int) -> RangeImage:
    """Change the beam (row) count: strided selection down, linear ranges up."""
    if target_H < 1:
        raise BadTarget(f"target beam count {target_H} < 1")
    H = img.H
    if target_H == H:
        return RangeImage(img.ranges.copy(), img.intensities.copy(), img.fov_deg, img.frame)
    if target_H < H:
        rows = (np.arange(target_H) * H) // target_H
        return RangeImage(img.ranges[rows].copy(), img.intensities[rows].copy(),
                          img.fov_deg, img.frame)
    # upsampling: interpolate ranges between valid neighbor rows per column
    s = np.arange(target_H) * H / target_H
    lo = np.minimum(np.floor(s).astype(np.int64), H - 1)
    hi = np.minimum(np.ceil(s).astype(np.int64), H - 1)
    w = (s - lo)[:, None]
    r_lo, r_hi = img.ranges[lo], img.ranges[hi]
    i_lo, i_hi = img.intensities[lo], img.intensities[hi]
    v_lo, v_hi = r_lo > NO_RETURN, r_hi > NO_RETURN
    both = v_lo & v_hi
    ranges = np.where(both, (1.0 - w) * r_lo + w * r_hi,
                      np.where(v_lo, r_lo, np.where(v_hi, r_hi, NO_RETURN)))
    near_lo = w <= 0.5
    intens = np.where(both, np.where(near_lo, i_lo, i_hi),
                      np.where(v_lo, i_lo, np.where(v_hi, i_hi, 0.0)))
    return RangeImage(ranges, intens, img.fov_deg, img.frame)


def density_augment(cloud: PointCloud, agent_type: AgentType, cfg: CmagConfig,
                    rng: RngStream) -> PointCloud:
    """Re-beam a cloud to a randomly chosen target beam count.

    Always goes through the range image, so the azimuth/elevation quantization
    is applied uniformly even when the target equals the native beam count.
    """
    target = int(rng.choice(cfg.pa_density_targets))
    img = project(cloud, agent_type.fov_deg, agent_type.beams, cfg.pa_azimuth_bins)
    return unproject(resample_beams(img, target))
