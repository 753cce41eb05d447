"""Skeleton control representation: geometry, rasterization, token indices."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .chart import ChartType, NormalizedSpec, polar_point

RED = (255, 0, 0)
GREEN = (0, 255, 0)
DEFAULT_STROKE_PX = 4

Point = tuple[float, float]


class StrokeRole(str, enum.Enum):
    BAR_LINE = "bar_line"
    TREND_LINE = "trend_line"
    SLICE_START = "slice_start"
    SLICE_END = "slice_end"


@dataclass(frozen=True)
class Stroke:
    polyline: tuple[Point, ...]
    color: tuple[int, int, int]
    role: StrokeRole


@dataclass(frozen=True)
class SkeletonGeometry:
    canvas: tuple[int, int]
    primitives: tuple[Stroke, ...]


@dataclass(frozen=True)
class RasterConfig:
    stroke_px: int = DEFAULT_STROKE_PX
    background: str = "transparent"

    def __post_init__(self):
        if int(self.stroke_px) < 1:
            raise ValueError(f"stroke_px must be >= 1, got {self.stroke_px}")
        if self.background not in ("transparent", "white"):
            raise ValueError(f"background must be 'transparent' or 'white', got {self.background!r}")


@dataclass(frozen=True)
class RasterImage:
    pixels: NDArray[np.uint8]  # (height, width, 4) RGBA

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def foreground(self) -> NDArray[np.bool_]:
        return foreground_mask(self.pixels)


@dataclass(frozen=True)
class IndexSet:
    indices: NDArray[np.int64]
    grid_dims: tuple[int, int]

    def __post_init__(self):
        idx = np.unique(np.asarray(self.indices, dtype=np.int64))
        rows, cols = self.grid_dims
        if idx.size and (idx[0] < 0 or idx[-1] >= rows * cols):
            raise ValueError(f"indices out of range for grid {self.grid_dims}")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return int(self.indices.size)


def foreground_mask(rgba: NDArray[np.uint8]) -> NDArray[np.bool_]:
    """Colored pixels: any alpha, excluding pure white."""
    rgba = np.asarray(rgba)
    white = np.all(rgba[..., :3] == 255, axis=-1)
    return (rgba[..., 3] > 0) & ~white


def build_skeleton_geometry(nspec: NormalizedSpec) -> SkeletonGeometry:
    strokes: list[Stroke] = []
    if nspec.chart_type is ChartType.BAR:
        base = float(nspec.baseline)
        for bar in nspec.bars:
            strokes.append(
                Stroke(((bar.x_center, base), (bar.x_center, base - bar.height)), RED, StrokeRole.BAR_LINE)
            )
    elif nspec.chart_type is ChartType.LINE:
        strokes.append(Stroke(tuple(nspec.vertices), RED, StrokeRole.TREND_LINE))
    else:
        c, r = nspec.center, nspec.radius
        for start, end in nspec.slices:
            strokes.append(Stroke((c, polar_point(c, r, start)), RED, StrokeRole.SLICE_START))
            strokes.append(Stroke((c, polar_point(c, r, end)), GREEN, StrokeRole.SLICE_END))
    return SkeletonGeometry(nspec.canvas, tuple(strokes))


def stroke_coverage(polyline, width: float, shape: tuple[int, int]) -> NDArray[np.bool_]:
    """Boolean coverage of a thick polyline, no anti-aliasing.

    A pixel is covered when its center projects onto a segment within
    ``[0, length)`` and lies within ``[-width/2, width/2)`` across it.
    Interior vertices get round joins. Zero-length segments cover nothing.
    """
    h, w = shape
    out = np.zeros(shape, dtype=bool)
    pts = [tuple(map(float, p)) for p in polyline]
    half = width / 2.0
    for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
        dx, dy = x1 - x0, y1 - y0
        length = float(np.hypot(dx, dy))
        if length == 0.0:
            continue
        ux, uy = dx / length, dy / length
        window = _window(min(x0, x1) - half, max(x0, x1) + half, min(y0, y1) - half, max(y0, y1) + half, shape)
        if window is None:
            continue
        rs, cs = window
        cy, cx = np.meshgrid(rs + 0.5, cs + 0.5, indexing="ij")
        t = (cx - x0) * ux + (cy - y0) * uy
        n = (cx - x0) * uy - (cy - y0) * ux
        hit = (t >= 0) & (t < length) & (n >= -half) & (n < half)
        out[rs[0] : rs[-1] + 1, cs[0] : cs[-1] + 1] |= hit
    for x, y in pts[1:-1]:
        window = _window(x - half, x + half, y - half, y + half, shape)
        if window is None:
            continue
        rs, cs = window
        cy, cx = np.meshgrid(rs + 0.5, cs + 0.5, indexing="ij")
        out[rs[0] : rs[-1] + 1, cs[0] : cs[-1] + 1] |= (cx - x) ** 2 + (cy - y) ** 2 < half * half
    return out


def _window(xlo, xhi, ylo, yhi, shape):
    h, w = shape
    c0, c1 = max(int(np.floor(xlo)) - 1, 0), min(int(np.ceil(xhi)) + 1, w)
    r0, r1 = max(int(np.floor(ylo)) - 1, 0), min(int(np.ceil(yhi)) + 1, h)
    if c0 >= c1 or r0 >= r1:
        return None
    return np.arange(r0, r1), np.arange(c0, c1)


def rasterize_skeleton(geom: SkeletonGeometry, cfg: RasterConfig = RasterConfig()) -> RasterImage:
    """Draw strokes in order onto an RGBA canvas; later strokes paint over earlier ones."""
    width, height = geom.canvas
    pixels = np.zeros((height, width, 4), dtype=np.uint8)
    if cfg.background == "white":
        pixels[...] = 255
    for stroke in geom.primitives:
        cov = stroke_coverage(stroke.polyline, cfg.stroke_px, (height, width))
        pixels[cov] = (*stroke.color, 255)
    return RasterImage(pixels)


def skeleton_token_indices(raster: RasterImage | NDArray, latent_dims: tuple[int, int]) -> IndexSet:
    """Latent cells hit by at least one foreground pixel, flattened row-major.

    Pixel ``(r, c)`` maps to cell ``(r * rows // H, c * cols // W)``.
    """
    pixels = raster.pixels if isinstance(raster, RasterImage) else np.asarray(raster)
    rows, cols = latent_dims
    h, w = pixels.shape[:2]
    r, c = np.nonzero(foreground_mask(pixels))
    flat = (r * rows // h) * cols + (c * cols // w)
    return IndexSet(np.unique(flat), (rows, cols))
