"""Structural similarity on 8-bit luma.

Gaussian-weighted SSIM with an 11x11 window (sigma 1.5), constants
``C1 = (0.01 * 255)**2`` and ``C2 = (0.03 * 255)**2``, population
statistics, averaged over every window that fits inside the image.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import NDArray

from .exceptions import DimensionMismatch

WINDOW_SIZE = 11
SIGMA = 1.5
DATA_RANGE = 255.0
K1, K2 = 0.01, 0.03

_LUMA = np.array([0.299, 0.587, 0.114])


def to_luma(image: NDArray) -> NDArray[np.float64]:
    """Rec.601 luma; RGBA inputs are premultiplied by alpha."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        return image
    if image.ndim == 3 and image.shape[2] in (3, 4):
        luma = image[..., :3] @ _LUMA
        if image.shape[2] == 4:
            luma = luma * (image[..., 3] / 255.0)
        return luma
    raise ValueError(f"expected a 2-D, RGB or RGBA image, got shape {image.shape}")


def gaussian_kernel(size: int = WINDOW_SIZE, sigma: float = SIGMA) -> NDArray[np.float64]:
    x = np.arange(size) - (size - 1) / 2
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _filter_valid(img: NDArray, k: NDArray) -> NDArray:
    out = sliding_window_view(img, k.size, axis=0) @ k
    return sliding_window_view(out, k.size, axis=1) @ k


def ssim(a: NDArray, b: NDArray, data_range: float = DATA_RANGE) -> float:
    x, y = to_luma(a), to_luma(b)
    if x.shape != y.shape:
        raise DimensionMismatch(f"ssim needs equal shapes, got {x.shape} and {y.shape}")
    size = min(WINDOW_SIZE, *x.shape)
    if size % 2 == 0:
        size -= 1
    k = gaussian_kernel(size)
    c1, c2 = (K1 * data_range) ** 2, (K2 * data_range) ** 2

    mu_x, mu_y = _filter_valid(x, k), _filter_valid(y, k)
    var_x = _filter_valid(x * x, k) - mu_x * mu_x
    var_y = _filter_valid(y * y, k) - mu_y * mu_y
    cov = _filter_valid(x * y, k) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))
