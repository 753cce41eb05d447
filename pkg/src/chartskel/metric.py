"""Structure-aware weighted F1 between a generated chart and its skeleton.

Both sides are scored with the same banded credit. Every band carries a
weight and a point in band ``i`` earns ``w_i / max(w)``:

* precision: points of the generated foreground, banded by their distance
  to the chart target (the target field);
* recall: points of the target's band-0 neighborhood, banded by their
  distance to the generated foreground along the same data-encoding
  dimension (the foreground field).

Each side is estimated by stratified sampling: a fixed number of points is
drawn uniformly inside every band region, the fraction landing in the other
set scales the region's area into an overlap estimate, and the weighted
ratio of overlaps gives the score. :func:`exhaustive_f1` evaluates the same
quantities by enumerating every pixel.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy import ndimage

from .chart import ChartType, NormalizedSpec
from .exceptions import DimensionMismatch, NoAlphaChannel, SizeLimit
from .fields import DistanceField, RegionWeights, band_labels, far_distance

DEFAULT_EPSILON = 1e-8
DEFAULT_POINTS_PER_BAND = 10_000
DEFAULT_BLUR_SIGMA = 2.0
BLUR_TRUNCATE = 3.0
EXHAUSTIVE_MAX_PIXELS = 1024 * 1024


class Derivation(str, enum.Enum):
    ALPHA_THRESHOLD = "alpha_threshold"
    BAR_BOUNDING_BOX = "bar_bounding_box"


class Method(str, enum.Enum):
    SAMPLED = "sampled"
    EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class ForegroundMask:
    mask: NDArray[np.bool_]
    derivation: Derivation


@dataclass(frozen=True)
class SamplingConfig:
    points_per_band: int = DEFAULT_POINTS_PER_BAND
    rng_seed: int = 0
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.points_per_band < 100:
            raise ValueError(f"points_per_band must be >= 100, got {self.points_per_band}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class BandStat:
    side: str  # "precision" or "recall"
    band: int
    region_px: int
    samples: int
    hits: int
    weight: float


@dataclass(frozen=True)
class FidelityReport:
    weighted_precision: float
    weighted_recall: float
    f1: float
    per_band: tuple[BandStat, ...]
    method: Method
    seed: int | None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["method"] = self.method.value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _as_mask(mask) -> NDArray[np.bool_]:
    return np.asarray(mask.mask if isinstance(mask, ForegroundMask) else mask, dtype=bool)


def blur_alpha(alpha: NDArray, sigma: float = DEFAULT_BLUR_SIGMA) -> NDArray[np.uint8]:
    """Gaussian blur of an 8-bit alpha channel, requantized to 8 bits."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if sigma <= 0:
        return alpha.astype(np.uint8)
    blurred = ndimage.gaussian_filter(alpha, sigma, mode="constant", cval=0.0, truncate=BLUR_TRUNCATE)
    return np.clip(np.rint(blurred), 0, 255).astype(np.uint8)


def slot_columns(nspec: NormalizedSpec, k: int) -> NDArray[np.bool_]:
    left, right = nspec.slot_bounds(k)
    centers = np.arange(nspec.canvas[0]) + 0.5
    return (centers >= left) & (centers < right)


def preprocess_chart(
    image: NDArray,
    chart_type: ChartType | str,
    nspec: NormalizedSpec,
    blur_sigma: float = DEFAULT_BLUR_SIGMA,
) -> ForegroundMask:
    """Foreground of a matted RGBA chart image.

    The alpha channel is blurred and every pixel with nonzero 8-bit alpha is
    foreground. For bar charts each bar slot is replaced by the bounding box
    of its foreground.
    """
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 4:
        raise NoAlphaChannel(
            f"expected an RGBA image, got shape {image.shape}; remove the background (matting) first"
        )
    width, height = nspec.canvas
    if image.shape[:2] != (height, width):
        raise DimensionMismatch(f"image is {image.shape[1]}x{image.shape[0]}, spec canvas is {width}x{height}")
    mask = blur_alpha(image[..., 3], blur_sigma) > 0
    if ChartType(chart_type) is not ChartType.BAR:
        return ForegroundMask(mask, Derivation.ALPHA_THRESHOLD)

    out = mask.copy()
    for k in range(len(nspec.bars)):
        cols = slot_columns(nspec, k)
        out[:, cols] = False
        sub = mask[:, cols]
        if not sub.any():
            continue
        rows = np.flatnonzero(sub.any(axis=1))
        col_idx = np.flatnonzero(cols)[np.flatnonzero(sub.any(axis=0))]
        out[rows[0] : rows[-1] + 1, col_idx[0] : col_idx[-1] + 1] = True
    return ForegroundMask(out, Derivation.BAR_BOUNDING_BOX)


def _vertical_distance(occupied: NDArray[np.bool_]) -> NDArray[np.float64]:
    """Per column, row distance to the nearest occupied row (inf if none)."""
    n = occupied.shape[0]
    rows = np.arange(n, dtype=float).reshape((n,) + (1,) * (occupied.ndim - 1))
    rows = np.broadcast_to(rows, occupied.shape)
    above = np.maximum.accumulate(np.where(occupied, rows, -np.inf), axis=0)
    below = np.flip(np.minimum.accumulate(np.flip(np.where(occupied, rows, np.inf), axis=0), axis=0), axis=0)
    return np.minimum(rows - above, below - rows)


def foreground_distance(mask, nspec: NormalizedSpec) -> NDArray[np.float64]:
    """Distance from each pixel to the generated foreground.

    Measured the same way as the target field: vertically within a column
    for line charts, vertically within a bar slot for bar charts, and
    Euclidean for pies. Capped at the far value.
    """
    mask = _as_mask(mask)
    far = far_distance(nspec.canvas)
    if nspec.chart_type is ChartType.LINE:
        d = _vertical_distance(mask)
    elif nspec.chart_type is ChartType.BAR:
        d = np.full(mask.shape, np.inf)
        for k in range(len(nspec.bars)):
            cols = slot_columns(nspec, k)
            occupied = mask[:, cols].any(axis=1)
            d[:, cols] = _vertical_distance(occupied)[:, None]
    else:
        d = ndimage.distance_transform_edt(~mask) if mask.any() else np.full(mask.shape, np.inf)
    return np.minimum(d, far)


def sample_band_points(region, n: int, rng: np.random.Generator) -> NDArray[np.intp]:
    """``n`` (row, col) points drawn uniformly with replacement from the true cells."""
    region = np.asarray(region, dtype=bool)
    flat = np.flatnonzero(region)
    if flat.size == 0:
        return np.empty((0, 2), dtype=np.intp)
    picks = flat[rng.integers(0, flat.size, size=n)]
    return np.stack(np.unravel_index(picks, region.shape), axis=1)


def _weighted_ratio(overlaps: NDArray[np.float64], credits: NDArray[np.float64]) -> float:
    total = overlaps.sum()
    return float((credits * overlaps).sum() / total) if total > 0 else 0.0


def _f1(p: float, r: float, epsilon: float) -> float:
    return 2 * p * r / ((p + r) + epsilon)


def _check_dims(mask: NDArray, field: DistanceField):
    if mask.shape != field.shape:
        raise DimensionMismatch(f"mask shape {mask.shape} != field shape {field.shape}")


def _config_echo(rw: RegionWeights, **extra) -> dict:
    return {**rw.to_dict(), **extra}


def _empty_report(method: Method, seed, config) -> FidelityReport:
    return FidelityReport(0.0, 0.0, 0.0, (), method, seed, config)


def weighted_f1(mask, field: DistanceField, rw: RegionWeights, cfg: SamplingConfig = SamplingConfig()) -> FidelityReport:
    mask = _as_mask(mask)
    _check_dims(mask, field)
    config = _config_echo(rw, points_per_band=cfg.points_per_band, seed=cfg.rng_seed, epsilon=cfg.epsilon)
    if not mask.any():
        return _empty_report(Method.SAMPLED, cfg.rng_seed, config)

    rng = np.random.default_rng(cfg.rng_seed & 0xFFFFFFFFFFFFFFFF)
    credits = rw.credits()
    target_labels = band_labels(field.values, rw.band_edges)
    fg_labels = band_labels(foreground_distance(mask, field.nspec), rw.band_edges)
    target_core = target_labels == 0
    n = cfg.points_per_band

    stats = []
    sides = {}
    for side, labels, other in (("precision", target_labels, mask), ("recall", fg_labels, target_core)):
        overlaps = np.zeros(rw.n_bands)
        for i in range(rw.n_bands):
            region = labels == i
            area = int(region.sum())
            pts = sample_band_points(region, n, rng)
            hits = int(other[pts[:, 0], pts[:, 1]].sum())
            samples = len(pts)
            overlaps[i] = area * hits / samples if samples else 0.0
            stats.append(BandStat(side, i, area, samples, hits, rw.weights[i]))
        sides[side] = _weighted_ratio(overlaps, credits)

    p, r = sides["precision"], sides["recall"]
    return FidelityReport(p, r, _f1(p, r, cfg.epsilon), tuple(stats), Method.SAMPLED, cfg.rng_seed, config)


def exhaustive_f1(mask, field: DistanceField, rw: RegionWeights, epsilon: float = DEFAULT_EPSILON) -> FidelityReport:
    """Full-enumeration counterpart of :func:`weighted_f1`; seed-free."""
    mask = _as_mask(mask)
    _check_dims(mask, field)
    if mask.size > EXHAUSTIVE_MAX_PIXELS:
        raise SizeLimit(f"exhaustive scoring is limited to {EXHAUSTIVE_MAX_PIXELS} pixels, got {mask.size}")
    config = _config_echo(rw, epsilon=epsilon)
    if not mask.any():
        return _empty_report(Method.EXHAUSTIVE, None, config)

    credits = rw.credits()
    target_labels = band_labels(field.values, rw.band_edges)
    fg_labels = band_labels(foreground_distance(mask, field.nspec), rw.band_edges)
    target_core = target_labels == 0

    stats = []
    sides = {}
    for side, labels, other in (("precision", target_labels, mask), ("recall", fg_labels, target_core)):
        region_px = np.bincount(labels.ravel(), minlength=rw.n_bands)
        overlaps = np.bincount(labels[other], minlength=rw.n_bands).astype(float)
        for i in range(rw.n_bands):
            stats.append(BandStat(side, i, int(region_px[i]), int(region_px[i]), int(overlaps[i]), rw.weights[i]))
        sides[side] = _weighted_ratio(overlaps, credits)

    p, r = sides["precision"], sides["recall"]
    return FidelityReport(p, r, _f1(p, r, epsilon), tuple(stats), Method.EXHAUSTIVE, None, config)
