import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from skimage.metrics import structural_similarity

from chartskel.assembly import (
    Remove,
    Replicate,
    Resize,
    assemble_to_height,
    editability_ranking,
    plan_grids,
    resize_height,
    split_grids,
)
from chartskel.exceptions import TargetTooSmall, TooSmall
from chartskel.ssim import to_luma


def periodic_texture(height=500, width=48, seed=0):
    """Opaque RGBA whose middle three grids repeat one stripe tile; first and last are noise."""
    rng = np.random.default_rng(seed)
    g = height // 5
    img = np.zeros((height, width, 4), np.uint8)
    img[..., 3] = 255
    tile = np.zeros((g, width, 3), np.uint8)
    tile[(np.arange(g) // 5) % 2 == 0] = (200, 120, 40)
    tile[(np.arange(g) // 5) % 2 == 1] = (30, 60, 90)
    for k in (1, 2, 3):
        img[k * g : (k + 1) * g, :, :3] = tile
    img[:g, :, :3] = rng.integers(0, 256, (g, width, 3))
    img[4 * g :, :, :3] = rng.integers(0, 256, (height - 4 * g, width, 3))
    return img


def test_split_even():
    grids = split_grids(np.zeros((500, 8, 4), np.uint8), 5)
    assert [g.shape[0] for g in grids] == [100] * 5


def test_split_remainder_to_bottom():
    grids = split_grids(np.zeros((503, 8, 4), np.uint8), 5)
    assert [g.shape[0] for g in grids] == [100, 100, 100, 100, 103]


def test_split_identity_k1():
    img = np.arange(30, dtype=np.uint8).reshape(10, 3)
    (only,) = split_grids(img, 1)
    np.testing.assert_array_equal(only, img)


def test_split_too_small():
    with pytest.raises(TooSmall):
        split_grids(np.zeros((4, 4)), 5)


def test_identical_grids_rank_by_id():
    img = np.tile(periodic_texture()[100:200], (5, 1, 1))
    plan = plan_grids(img)
    assert plan.mean_ssim == (1.0,) * 5
    assert plan.ranking == (0, 1, 2, 3, 4)


def test_periodic_ranking_against_brute_force():
    img = periodic_texture()
    plan = plan_grids(img)
    luma = [to_luma(g) for g in split_grids(img, 5)]
    ref = np.array(
        [
            [np.mean([structural_similarity(luma[i], luma[j], gaussian_weights=True, sigma=1.5,
                                            use_sample_covariance=False, data_range=255)
                      for j in range(5) if j != i])]
            for i in range(5)
        ]
    ).ravel()
    np.testing.assert_allclose(plan.mean_ssim, ref, atol=1e-6)
    assert plan.ranking[0] in {1, 2, 3}
    assert plan.ranking[0] == int(np.argmax(ref))


def test_two_grids_equal_means():
    rng = np.random.default_rng(2)
    plan = editability_ranking([rng.random((20, 20)) * 255, rng.random((20, 20)) * 255])
    assert plan.mean_ssim[0] == plan.mean_ssim[1]


def test_target_equal_is_identity():
    img = periodic_texture()
    result = assemble_to_height(img, plan_grids(img), 500)
    assert result.ops_log == ()
    assert result.image.tobytes() == img.tobytes()


def test_replicate_to_700():
    img = periodic_texture()
    plan = plan_grids(img)
    result = assemble_to_height(img, plan, 700)
    top = plan.ranking[0]
    assert result.ops_log == (Replicate(top, 2),)
    assert result.image.shape == (700, 48, 4)
    # grids stay in vertical order with the copies right after the original
    expected = np.concatenate([img[:(top + 1) * 100]] + [img[top * 100 : (top + 1) * 100]] * 2 + [img[(top + 1) * 100 :]])
    np.testing.assert_array_equal(result.image, expected)


def test_remove_to_350():
    img = periodic_texture()
    plan = plan_grids(img)
    result = assemble_to_height(img, plan, 350)
    assert result.ops_log == (Remove(plan.ranking[4]), Remove(plan.ranking[3]), Resize(300, 350))
    assert result.achieved_height_px == 350


def test_small_difference_resizes_only():
    img = periodic_texture()
    result = assemble_to_height(img, plan_grids(img), 530)
    assert result.ops_log == (Resize(500, 530),)
    assert result.image.shape[0] == 530


def test_target_below_grid():
    img = periodic_texture()
    with pytest.raises(TargetTooSmall):
        assemble_to_height(img, plan_grids(img), 99)


def test_resize_constant_preserved():
    img = np.full((10, 3, 4), 77, np.uint8)
    assert (resize_height(img, 17) == 77).all()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), height=st.integers(60, 240), target=st.integers(60, 600))
def test_exact_height_and_rank0_rules(seed, height, target):
    rng = np.random.default_rng(seed)
    img = rng.integers(0, 256, (height, 16, 4)).astype(np.uint8)
    plan = plan_grids(img)
    if target < plan.grid_height_px:
        return
    result = assemble_to_height(img, plan, target)
    assert result.achieved_height_px == target == result.image.shape[0]
    for op in result.ops_log:
        if isinstance(op, Replicate):
            assert op.grid_id == plan.ranking[0]
        if isinstance(op, Remove):
            assert op.grid_id != plan.ranking[0]
    again = assemble_to_height(img, plan, target)
    assert again.ops_log == result.ops_log
    assert again.image.tobytes() == result.image.tobytes()
