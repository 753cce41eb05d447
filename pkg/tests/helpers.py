from __future__ import annotations

import json

import numpy as np

from chartskel import io as cio

from chartskel.chart import ChartSpec, normalize
from chartskel.fields import build_distance_field, default_region_weights


def make_spec(chart_type, values, canvas=(512, 512), margin=32):
    return ChartSpec(chart_type, tuple((f"s{i}", v) for i, v in enumerate(values)), canvas, margin)


def band0_mask(nspec, rw=None):
    """Foreground equal to the band-0 neighborhood of the chart's own skeleton."""
    field = build_distance_field(nspec)
    rw = rw or default_region_weights(nspec.chart_type, nspec.canvas)
    return field.values < rw.band_edges[0]


def random_fixture(i: int, size: int = 64):
    """Procedural chart and a plausible imperfect foreground for it."""
    rng = np.random.default_rng(1000 + i)
    chart_type = ("bar", "line", "pie")[i % 3]
    values = rng.integers(1, 10, size=rng.integers(2, 6)).astype(float)
    spec = make_spec(chart_type, values, (size, size), 4)
    nspec = normalize(spec)
    jitter = np.clip(values + rng.normal(0, 1.0, size=values.size), 0.2, None)
    other = normalize(make_spec(chart_type, jitter, (size, size), 4))
    rw = default_region_weights(chart_type, (size, size))
    tol = rw.band_edges[rng.integers(0, 3)]
    mask = build_distance_field(other).values < tol
    if rng.random() < 0.5:
        r0, c0 = rng.integers(0, size - 8, size=2)
        h, w = rng.integers(3, 12, size=2)
        mask[r0 : r0 + h, c0 : c0 + w] = True
    mask &= rng.random(mask.shape) > rng.uniform(0, 0.3)
    if not mask.any():
        mask[size // 2, size // 2] = True
    return spec, nspec, mask


def rgba_from_mask(mask, color=(30, 90, 200)):
    img = np.zeros(mask.shape + (4,), dtype=np.uint8)
    img[mask] = (*color, 255)
    return img


def write_batch(tmp_path, n, missing=()):
    rows = []
    rng = np.random.default_rng(5)
    for i in range(n):
        chart_type = ("bar", "line", "pie")[i % 3]
        values = rng.integers(1, 9, size=3).astype(float).tolist()
        spec = make_spec(chart_type, values, (64, 64), 4)
        doc = {"chart_type": chart_type, "series": [[f"s{j}", v] for j, v in enumerate(values)],
               "canvas": [64, 64], "plot_margin_px": 4}
        (tmp_path / f"s{i}.json").write_text(json.dumps(doc))
        mask = band0_mask(normalize(spec))
        mask &= rng.random(mask.shape) > 0.2
        if i not in missing:
            cio.write_png(tmp_path / f"i{i}.png", rgba_from_mask(mask))
        rows.append(f"i{i}.png,s{i}.json")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("image_path,spec_path\n" + "\n".join(rows) + "\n")
    return manifest
