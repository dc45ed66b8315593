"""Depth-based view warping with quarter-pel interpolation and hole marking.

The warp is backward and purely horizontal (rectified stereo): every target
pixel [u, v] samples the source view at u' = u +- scale * disparity[u, v],
quantized to the quarter-pel grid.  Fractional positions use the standard
H.265/HEVC 8-tap (half-pel) and 7-tap (quarter-pel) luma kernels.  A target
pixel becomes a hole when its source position leaves the image or when a
pixel with sufficiently larger disparity lands on (almost) the same source
position -- a simple deterministic z-ordering proxy for occlusion.

Hole pixels are excluded from graph construction entirely; after filtering
they are patched by a 3x3 median over their available non-hole neighbors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, FileFormatError
from .image import HoleMask, ImageGray, _frozen, read_pgm, write_pgm

# H.265/HEVC luma interpolation taps (sum to 64 each, normalized by 1/64).
# Half-pel uses 8 taps on offsets -3..+4; quarter-pel kernels use 7 taps on
# offsets -3..+3 (phase 1/4) and -2..+4 (phase 3/4, the mirror).
HALF_TAPS = np.array([-1, 4, -11, 40, 40, -11, 4, -1], dtype=np.int64)
QUARTER_TAPS = np.array([-1, 4, -10, 58, 17, -5, 1], dtype=np.int64)
THREE_QUARTER_TAPS = QUARTER_TAPS[::-1].copy()

PHASES = (0.0, 0.25, 0.5, 0.75)

# Occlusion proxy: a pixel is covered when another pixel maps within this
# horizontal distance of its source position with disparity larger by more
# than the protrusion threshold.
OCCLUSION_RADIUS_PX = 0.75
OCCLUSION_DISPARITY_STEP_PX = 1.0


@dataclass(frozen=True)
class DepthMap:
    """Per-pixel horizontal disparity, in pixels, for the target view."""

    width: int
    height: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.width * self.height,):
            raise DimensionMismatchError("depth size mismatch")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("disparities must be finite and >= 0")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def from_array(cls, a) -> "DepthMap":
        a = np.asarray(a, dtype=np.float64)
        return cls(width=a.shape[1], height=a.shape[0], values=a.ravel())

    def to_array(self) -> np.ndarray:
        return self.values.reshape(self.height, self.width)


@dataclass(frozen=True)
class WarpParams:
    disparity_scale: float = 1.0
    direction: str = "left_to_right"

    def __post_init__(self):
        if not np.isfinite(self.disparity_scale):
            raise ValueError("disparity_scale must be finite")
        if self.direction not in ("left_to_right", "right_to_left"):
            raise ValueError(f"unknown warp direction {self.direction!r}")


@dataclass(frozen=True)
class WarpResult:
    guide: ImageGray
    mask: HoleMask
    phase_counts: np.ndarray  # interpolations performed per quarter-pel phase

    def __post_init__(self):
        object.__setattr__(self, "phase_counts",
                           _frozen(np.asarray(self.phase_counts, np.int64)))


def interp_subpel(samples: np.ndarray, phase: float) -> float:
    """Interpolate at a quarter-pel phase from 8 consecutive samples.

    samples[3] is the integer-position sample; callers replicate boundary
    pixels.  Phase 0 returns samples[3] exactly.  No intermediate clipping.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (8,):
        raise DimensionMismatchError("interp_subpel needs exactly 8 samples")
    if phase == 0.0:
        return float(samples[3])
    if phase == 0.5:
        return float(HALF_TAPS @ samples) / 64.0
    if phase == 0.25:
        return float(QUARTER_TAPS @ samples[0:7]) / 64.0
    if phase == 0.75:
        return float(THREE_QUARTER_TAPS @ samples[1:8]) / 64.0
    raise ValueError(f"phase must be one of {PHASES}, got {phase}")


def _quantize_quarter(u: np.ndarray) -> np.ndarray:
    """Nearest quarter-pel position in units of 1/4 pel (ties round up)."""
    return np.floor(4.0 * u + 0.5).astype(np.int64)


def warp_guide(source: ImageGray, depth: DepthMap, params: WarpParams) -> WarpResult:
    """Backward-warp the source view to the depth map's perspective."""
    if (source.width, source.height) != (depth.width, depth.height):
        raise DimensionMismatchError("source/depth size mismatch")
    h, w = source.height, source.width
    src = source.to_array()
    disp = params.disparity_scale * depth.to_array()
    sign = 1.0 if params.direction == "left_to_right" else -1.0

    guide = np.zeros((h, w), dtype=np.float64)
    hole = np.zeros((h, w), dtype=bool)
    phase_counts = np.zeros(4, dtype=np.int64)
    u = np.arange(w, dtype=np.float64)

    for row in range(h):
        d = disp[row]
        up = u + sign * d
        q4 = _quantize_quarter(up)
        oob = (q4 < 0) | (q4 > 4 * (w - 1))
        # z-ordering occlusion test on the unquantized positions
        covered = (
            (np.abs(up[None, :] - up[:, None]) <= OCCLUSION_RADIUS_PX)
            & (d[None, :] - d[:, None] > OCCLUSION_DISPARITY_STEP_PX)
        ).any(axis=1)
        bad = oob | covered
        hole[row] = bad

        base = q4 // 4
        ph = q4 % 4
        vis = ~bad
        line = src[row]
        # phase 0 is an exact integer copy
        sel = vis & (ph == 0)
        if np.any(sel):
            guide[row, sel] = line[base[sel]]
            phase_counts[0] += int(sel.sum())
        # fractional phases sample through the tap kernels, with boundary
        # replication for windows that leave the row
        for col in np.nonzero(vis & (ph != 0))[0]:
            window = np.clip(np.arange(base[col] - 3, base[col] + 5), 0, w - 1)
            guide[row, col] = interp_subpel(line[window], PHASES[ph[col]])
            phase_counts[ph[col]] += 1

    return WarpResult(
        guide=ImageGray.from_array(guide),
        mask=HoleMask.from_array(hole),
        phase_counts=phase_counts,
    )


def median_fill(img: ImageGray, mask: HoleMask) -> ImageGray:
    """Replace each hole pixel by the median of its available neighbors.

    "Available" means in-bounds, non-hole pixels of the 3x3 neighborhood
    (center excluded).  Medians are taken from the input image, so the
    pass is order-free and idempotent; even-sized neighbor sets use the
    lower-middle order statistic; a hole with no available neighbor keeps
    its input value.  Non-hole pixels are untouched.
    """
    if (img.width, img.height) != (mask.width, mask.height):
        raise DimensionMismatchError("image/mask size mismatch")
    h, w = img.height, img.width
    src = img.to_array()
    hole = mask.to_array()
    out = src.copy()
    for y, x in zip(*np.nonzero(hole)):
        vals = []
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and not hole[yy, xx]:
                    vals.append(src[yy, xx])
        if vals:
            vals.sort()
            out[y, x] = vals[(len(vals) - 1) // 2]
    return ImageGray.from_array(out)


# ---------------------------------------------------------------------------
# 16-bit depth containers

def save_depth(path, depth: DepthMap, disparity_scale: float) -> None:
    """Store disparity / disparity_scale as 16-bit PGM."""
    raw = depth.to_array() / disparity_scale
    q = np.rint(raw)
    if np.any(q < 0) or np.any(q > 65535):
        raise FileFormatError("scaled disparity does not fit a 16-bit PGM")
    write_pgm(path, q.astype(np.int64), maxval=65535)


def load_depth(path, disparity_scale: float) -> DepthMap:
    """Read a 16-bit (or 8-bit) PGM and map stored integers to disparity."""
    arr, _maxval = read_pgm(path)
    return DepthMap.from_array(arr.astype(np.float64) * disparity_scale)
