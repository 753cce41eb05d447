"""Distance fields along a chart's data-encoding dimension, and banded regions.

Fields are sampled at pixel centers ``(col + 0.5, row + 0.5)``.

* Line: vertical distance to the polyline inside its x-range, Euclidean
  distance to the nearer end vertex outside it.
* Bar: inside a bar's column band, vertical distance to the bar's extent
  ``[top, baseline]``; outside every band, a finite far value.
* Pie: Euclidean distance to the nearest radial slice boundary segment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .chart import ChartType, NormalizedSpec, polar_point

REFERENCE_SIZE = 512
DEFAULT_EDGES = (8.0, 24.0, 64.0)
DEFAULT_WEIGHTS = (1.0, 0.5, 0.2, 0.05)


@dataclass(frozen=True)
class RegionWeights:
    band_edges: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        edges = tuple(float(e) for e in self.band_edges)
        weights = tuple(float(w) for w in self.weights)
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError(f"band_edges must be strictly increasing, got {edges}")
        if edges and edges[0] <= 0:
            raise ValueError("band_edges must be positive")
        if len(weights) != len(edges) + 1:
            raise ValueError(f"need {len(edges) + 1} weights for {len(edges)} edges, got {len(weights)}")
        if not all(w > 0 and np.isfinite(w) for w in weights):
            raise ValueError(f"weights must be positive, got {weights}")
        object.__setattr__(self, "band_edges", edges)
        object.__setattr__(self, "weights", weights)

    @property
    def n_bands(self) -> int:
        return len(self.weights)

    def credits(self) -> NDArray[np.float64]:
        """Per-band credit in (0, 1]: each weight relative to the largest."""
        w = np.asarray(self.weights)
        return w / w.max()

    def to_dict(self) -> dict:
        return {"band_edges": list(self.band_edges), "weights": list(self.weights)}


def default_region_weights(chart_type: ChartType | str, canvas: tuple[int, int] = (512, 512)) -> RegionWeights:
    """Default bands, with edges scaled by ``min(canvas) / 512``.

    All chart types share the band structure; only the field they are
    measured on differs.
    """
    ChartType(chart_type)
    scale = min(canvas) / REFERENCE_SIZE
    return RegionWeights(tuple(e * scale for e in DEFAULT_EDGES), DEFAULT_WEIGHTS)


@dataclass(frozen=True)
class DistanceField:
    values: NDArray[np.float64]
    chart_type: ChartType
    nspec: NormalizedSpec

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class RegionMasks:
    labels: NDArray[np.intp]  # band id per pixel
    n_bands: int

    @property
    def masks(self) -> tuple[NDArray[np.bool_], ...]:
        return tuple(self.labels == i for i in range(self.n_bands))

    def counts(self) -> NDArray[np.int64]:
        return np.bincount(self.labels.ravel(), minlength=self.n_bands)


def far_distance(canvas: tuple[int, int]) -> float:
    return float(canvas[0] + canvas[1])


def pixel_centers(shape: tuple[int, int]) -> tuple[NDArray, NDArray]:
    h, w = shape
    ys, xs = np.meshgrid(np.arange(h) + 0.5, np.arange(w) + 0.5, indexing="ij")
    return xs, ys


def line_distance(vertices, xs, ys) -> NDArray[np.float64]:
    vx = np.array([v[0] for v in vertices], dtype=float)
    vy = np.array([v[1] for v in vertices], dtype=float)
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    inside = (xs >= vx[0]) & (xs <= vx[-1])
    left = np.hypot(xs - vx[0], ys - vy[0])
    right = np.hypot(xs - vx[-1], ys - vy[-1])
    d = np.where(xs < vx[0], left, right)
    if len(vx) > 1:
        d = np.where(inside, np.abs(ys - np.interp(xs, vx, vy)), d)
    return d


def bar_distance(nspec: NormalizedSpec, xs, ys) -> NDArray[np.float64]:
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    d = np.full(np.broadcast(xs, ys).shape, far_distance(nspec.canvas))
    half = nspec.bar_width / 2
    base = float(nspec.baseline)
    for bar in nspec.bars:
        top = base - bar.height
        in_band = (xs >= bar.x_center - half) & (xs < bar.x_center + half)
        vertical = np.maximum(np.maximum(top - ys, ys - base), 0.0)
        d = np.where(in_band, np.minimum(d, vertical), d)
    return d


def segment_distance(px, py, ax, ay, bx, by) -> NDArray[np.float64]:
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0:
        return np.hypot(px - ax, py - ay)
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / denom, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def pie_distance(nspec: NormalizedSpec, xs, ys) -> NDArray[np.float64]:
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    cx, cy = nspec.center
    d = np.full(np.broadcast(xs, ys).shape, np.inf)
    for angle in nspec.boundary_angles():
        ex, ey = polar_point(nspec.center, nspec.radius, angle)
        d = np.minimum(d, segment_distance(xs, ys, cx, cy, ex, ey))
    return d


def target_distance(nspec: NormalizedSpec, xs, ys) -> NDArray[np.float64]:
    """Distance from arbitrary canvas points to the chart's target set."""
    if nspec.chart_type is ChartType.LINE:
        return line_distance(nspec.vertices, xs, ys)
    if nspec.chart_type is ChartType.BAR:
        return bar_distance(nspec, xs, ys)
    return pie_distance(nspec, xs, ys)


def build_distance_field(nspec: NormalizedSpec, dims: tuple[int, int] | None = None) -> DistanceField:
    """Evaluate the target distance at every pixel center; ``dims`` is (height, width)."""
    if dims is None:
        dims = (nspec.canvas[1], nspec.canvas[0])
    xs, ys = pixel_centers(dims)
    values = np.minimum(target_distance(nspec, xs, ys), far_distance(nspec.canvas))
    return DistanceField(values, nspec.chart_type, nspec)


def band_labels(distances, edges) -> NDArray[np.intp]:
    """Band ``i`` holds ``edges[i-1] <= d < edges[i]``."""
    return np.searchsorted(np.asarray(edges, dtype=float), distances, side="right")


def band_partition(field: DistanceField | NDArray, rw: RegionWeights) -> RegionMasks:
    values = field.values if isinstance(field, DistanceField) else np.asarray(field)
    return RegionMasks(band_labels(values, rw.band_edges), rw.n_bands)
