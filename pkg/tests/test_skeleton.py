import numpy as np
import pytest

from chartskel.chart import normalize
from chartskel.skeleton import (
    GREEN,
    RED,
    IndexSet,
    RasterConfig,
    RasterImage,
    SkeletonGeometry,
    Stroke,
    StrokeRole,
    build_skeleton_geometry,
    rasterize_skeleton,
    skeleton_token_indices,
    stroke_coverage,
)

from .helpers import make_spec


def reference_segment_pixels(p0, p1, width, shape):
    """Per-pixel loop over the same coverage rule, for one segment."""
    (x0, y0), (x1, y1) = p0, p1
    length = np.hypot(x1 - x0, y1 - y0)
    ux, uy = (x1 - x0) / length, (y1 - y0) / length
    hits = set()
    for r in range(shape[0]):
        for c in range(shape[1]):
            cx, cy = c + 0.5, r + 0.5
            t = (cx - x0) * ux + (cy - y0) * uy
            n = (cx - x0) * uy - (cy - y0) * ux
            if 0 <= t < length and -width / 2 <= n < width / 2:
                hits.add((r, c))
    return hits


def test_bar_geometry_one_line_per_bar():
    geom = build_skeleton_geometry(normalize(make_spec("bar", [1, 2, 3])))
    assert len(geom.primitives) == 3
    assert all(s.role is StrokeRole.BAR_LINE for s in geom.primitives)
    for s in geom.primitives:
        (xa, _), (xb, _) = s.polyline
        assert xa == xb


def test_pie_geometry_two_colored_radials_per_slice():
    geom = build_skeleton_geometry(normalize(make_spec("pie", [1, 2, 3, 4])))
    roles = [s.role for s in geom.primitives]
    assert len(roles) == 8
    assert roles.count(StrokeRole.SLICE_START) == 4
    assert all(s.color == RED for s in geom.primitives if s.role is StrokeRole.SLICE_START)
    assert all(s.color == GREEN for s in geom.primitives if s.role is StrokeRole.SLICE_END)


def test_pie_adjacent_boundaries_coincide():
    geom = build_skeleton_geometry(normalize(make_spec("pie", [1, 2, 3, 4])))
    strokes = geom.primitives
    for k in range(3):
        end_k, start_next = strokes[2 * k + 1], strokes[2 * k + 2]
        assert end_k.polyline == start_next.polyline
        assert end_k.color != start_next.color


def test_line_geometry_passes_vertices_through():
    nspec = normalize(make_spec("line", [1, 3, 2]))
    geom = build_skeleton_geometry(nspec)
    assert len(geom.primitives) == 1
    assert geom.primitives[0].polyline == nspec.vertices


def test_zero_height_bar_draws_nothing():
    geom = SkeletonGeometry((512, 512), (Stroke(((100.0, 480.0), (100.0, 480.0)), RED, StrokeRole.BAR_LINE),))
    assert rasterize_skeleton(geom).foreground().sum() == 0


def test_vertical_stroke_pixel_count():
    shape = (512, 512)
    p0, p1 = (256.0, 480.0), (256.0, 380.0)
    expected = reference_segment_pixels(p0, p1, 4, (shape[0], 300))
    assert len(expected) == 400
    cov = stroke_coverage((p0, p1), 4, shape)
    assert cov.sum() == 400
    assert set(zip(*np.nonzero(cov))) == expected


@pytest.mark.parametrize("p0, p1, width", [((10.3, 5.2), (50.7, 40.1), 3), ((60.0, 10.0), (5.5, 12.25), 5)])
def test_oblique_stroke_matches_reference(p0, p1, width):
    cov = stroke_coverage((p0, p1), width, (64, 64))
    assert set(zip(*np.nonzero(cov))) == reference_segment_pixels(p0, p1, width, (64, 64))


def test_default_canvas_size():
    raster = rasterize_skeleton(build_skeleton_geometry(normalize(make_spec("bar", [1, 2]))))
    assert raster.pixels.shape == (512, 512, 4)
    assert raster.pixels.dtype == np.uint8


def test_white_background():
    geom = build_skeleton_geometry(normalize(make_spec("line", [1, 2])))
    raster = rasterize_skeleton(geom, RasterConfig(background="white"))
    assert (raster.pixels[0, 0] == 255).all()
    assert raster.foreground().sum() == rasterize_skeleton(geom).foreground().sum()


def test_rasterization_is_deterministic():
    geom = build_skeleton_geometry(normalize(make_spec("pie", [3, 1, 2])))
    assert rasterize_skeleton(geom).pixels.tobytes() == rasterize_skeleton(geom).pixels.tobytes()


def test_stroke_px_validation():
    with pytest.raises(ValueError):
        RasterConfig(stroke_px=0)


def test_tokens_blank_raster():
    assert len(skeleton_token_indices(np.zeros((512, 512, 4), np.uint8), (32, 32))) == 0


def test_tokens_single_pixel():
    img = np.zeros((512, 512, 4), np.uint8)
    img[0, 0] = (255, 0, 0, 255)
    assert skeleton_token_indices(img, (32, 32)).indices.tolist() == [0]


def test_tokens_vertical_line():
    img = np.zeros((512, 512, 4), np.uint8)
    img[:, 256] = (255, 0, 0, 255)
    got = skeleton_token_indices(RasterImage(img), (32, 32))
    brute = sorted({(r // 16) * 32 + 256 // 16 for r in range(512)})
    assert len(got) == 32
    assert got.indices.tolist() == brute


def test_tokens_identity_grid_equals_foreground_pixels():
    geom = build_skeleton_geometry(normalize(make_spec("pie", [1, 2, 3], canvas=(96, 64), margin=4)))
    raster = rasterize_skeleton(geom, RasterConfig(stroke_px=2))
    got = skeleton_token_indices(raster, (64, 96))
    assert got.indices.tolist() == np.flatnonzero(raster.foreground()).tolist()


def test_index_set_range_check():
    with pytest.raises(ValueError):
        IndexSet([0, 16], (4, 4))
