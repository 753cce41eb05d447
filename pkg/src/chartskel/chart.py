"""Chart specifications and their mapping to canvas geometry.

Coordinates are continuous canvas pixels: pixel ``(row, col)`` covers the
square ``[col, col + 1) x [row, row + 1)``, x grows right and y grows down.
The plot area is the canvas inset by ``plot_margin_px`` on every side.

Ratios between series values are computed with exact rational arithmetic and
rounded once, so scaling every value by a factor that is itself exact in
floating point yields a bit-identical :class:`NormalizedSpec`.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .exceptions import SchemaError

DEFAULT_CANVAS = (512, 512)
DEFAULT_MARGIN = 32
MIN_CANVAS_PX = 64
BAR_FILL = Fraction(7, 10)

_TWO_PI = Fraction(2 * math.pi)
_REQUIRED_KEYS = {"chart_type", "series"}
_OPTIONAL_KEYS = {"canvas", "plot_margin_px"}


class ChartType(str, enum.Enum):
    BAR = "bar"
    LINE = "line"
    PIE = "pie"


@dataclass(frozen=True)
class ChartSpec:
    chart_type: ChartType
    series: tuple[tuple[str, float], ...]
    canvas: tuple[int, int] = DEFAULT_CANVAS
    plot_margin_px: int = DEFAULT_MARGIN

    def __post_init__(self):
        object.__setattr__(self, "chart_type", ChartType(self.chart_type))
        object.__setattr__(
            self, "series", tuple((str(lbl), _check_value(v)) for lbl, v in self.series)
        )
        object.__setattr__(self, "canvas", tuple(int(d) for d in self.canvas))
        if not self.series:
            raise ValueError("series must not be empty")
        if not any(v > 0 for _, v in self.series):
            raise ValueError(f"zero-sum {self.chart_type.value} series: at least one value must be > 0")
        width, height = self.canvas
        if width < MIN_CANVAS_PX or height < MIN_CANVAS_PX:
            raise ValueError(f"canvas must be at least {MIN_CANVAS_PX}px per side, got {self.canvas}")
        if self.plot_margin_px < 0 or 2 * self.plot_margin_px >= min(width, height):
            raise ValueError(f"plot_margin_px={self.plot_margin_px} leaves no plot area")

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.series)

    def to_dict(self) -> dict[str, Any]:
        return {
            "chart_type": self.chart_type.value,
            "series": [[lbl, v] for lbl, v in self.series],
            "canvas": list(self.canvas),
            "plot_margin_px": self.plot_margin_px,
        }


def _check_value(v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"series value must be a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"series value must be finite, got {v}")
    if v < 0:
        raise ValueError(f"negative value {v} in series")
    return v


def parse_spec(text: str | bytes) -> ChartSpec:
    """Parse and validate a chart-spec JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("chart spec must be a JSON object")
    missing = _REQUIRED_KEYS - doc.keys()
    extra = doc.keys() - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if missing:
        raise SchemaError(f"missing field(s): {sorted(missing)}")
    if extra:
        raise SchemaError(f"unknown field(s): {sorted(extra)}")

    try:
        chart_type = ChartType(str(doc["chart_type"]).lower())
    except ValueError:
        raise SchemaError(f"chart_type must be one of bar/line/pie, got {doc['chart_type']!r}") from None

    series = doc["series"]
    if not isinstance(series, list):
        raise SchemaError("series must be an array of [label, value] pairs")
    pairs = []
    for item in series:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise SchemaError(f"series entry must be a [label, value] pair, got {item!r}")
        pairs.append((str(item[0]), _check_value(item[1])))

    canvas = doc.get("canvas", list(DEFAULT_CANVAS))
    if (
        not isinstance(canvas, list)
        or len(canvas) != 2
        or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in canvas)
    ):
        raise SchemaError(f"canvas must be [width, height] positive integers, got {canvas!r}")
    margin = doc.get("plot_margin_px", DEFAULT_MARGIN)
    if not isinstance(margin, int) or isinstance(margin, bool):
        raise SchemaError(f"plot_margin_px must be an integer, got {margin!r}")

    return ChartSpec(chart_type, tuple(pairs), (canvas[0], canvas[1]), margin)


@dataclass(frozen=True)
class Bar:
    x_center: float
    height: float


@dataclass(frozen=True)
class NormalizedSpec:
    """Chart geometry on the canvas.

    Only the member matching ``chart_type`` is populated: ``bars`` for bar
    charts, ``vertices`` for line charts, and ``center``/``radius``/``slices``
    for pies. Slice angles are radians clockwise from 12 o'clock.
    """

    chart_type: ChartType
    canvas: tuple[int, int]
    plot_box: tuple[int, int, int, int]  # left, top, right, bottom
    bars: tuple[Bar, ...] = ()
    vertices: tuple[tuple[float, float], ...] = ()
    center: tuple[float, float] | None = None
    radius: float = 0.0
    slices: tuple[tuple[float, float], ...] = ()

    @property
    def plot_width(self) -> int:
        return self.plot_box[2] - self.plot_box[0]

    @property
    def plot_height(self) -> int:
        return self.plot_box[3] - self.plot_box[1]

    @property
    def baseline(self) -> int:
        return self.plot_box[3]

    @property
    def slot_width(self) -> float:
        return self.plot_width / max(len(self.bars), 1)

    @property
    def bar_width(self) -> float:
        return float(BAR_FILL) * self.slot_width

    def slot_bounds(self, k: int) -> tuple[float, float]:
        left = self.plot_box[0]
        return left + k * self.slot_width, left + (k + 1) * self.slot_width

    def boundary_angles(self) -> tuple[float, ...]:
        """Distinct start/end angles of all slices, 2*pi folded onto 0."""
        seen = []
        for start, end in self.slices:
            for a in (start, end):
                a = math.fmod(a, 2 * math.pi)
                if not any(abs(a - b) < 1e-12 for b in seen):
                    seen.append(a)
        return tuple(seen)


def normalize(spec: ChartSpec) -> NormalizedSpec:
    """Map a chart spec onto canvas geometry.

    Bars sit at the centers of equal slots spanning the plot width, and the
    maximum value reaches the full plot height. Line vertices are spaced
    evenly from the left to the right edge of the plot. Pies are centered in
    the plot with radius half its shorter side.
    """
    width, height = spec.canvas
    m = spec.plot_margin_px
    box = (m, m, width - m, height - m)
    plot_w, plot_h = box[2] - box[0], box[3] - box[1]
    values = [Fraction(v) for v in spec.values]
    n = len(values)

    if spec.chart_type is ChartType.BAR:
        vmax = max(values)
        bars = tuple(
            Bar(
                x_center=float(box[0] + Fraction(2 * i + 1, 2 * n) * plot_w),
                height=float(v / vmax * plot_h),
            )
            for i, v in enumerate(values)
        )
        return NormalizedSpec(spec.chart_type, spec.canvas, box, bars=bars)

    if spec.chart_type is ChartType.LINE:
        vmax = max(values)
        vertices = []
        for i, v in enumerate(values):
            frac_x = Fraction(i, n - 1) if n > 1 else Fraction(1, 2)
            x = float(box[0] + frac_x * plot_w)
            y = float(box[3] - v / vmax * plot_h)
            vertices.append((x, y))
        return NormalizedSpec(spec.chart_type, spec.canvas, box, vertices=tuple(vertices))

    total = sum(values)
    cum = [Fraction(0)]
    for v in values:
        cum.append(cum[-1] + v / total)
    angles = [float(c * _TWO_PI) for c in cum]
    slices = tuple((angles[i], angles[i + 1]) for i in range(n))
    center = (float(Fraction(box[0] + box[2], 2)), float(Fraction(box[1] + box[3], 2)))
    return NormalizedSpec(
        spec.chart_type,
        spec.canvas,
        box,
        center=center,
        radius=min(plot_w, plot_h) / 2,
        slices=slices,
    )


def polar_point(center: tuple[float, float], radius: float, angle: float) -> tuple[float, float]:
    """Point at ``radius`` along the ray ``angle`` clockwise from 12 o'clock."""
    return center[0] + radius * math.sin(angle), center[1] - radius * math.cos(angle)
