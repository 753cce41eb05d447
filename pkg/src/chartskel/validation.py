"""Input checks shared by the functional API and the estimators."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .exceptions import NoAlphaChannel, NonFiniteInput


def check_matrix(a, name: str = "matrix") -> NDArray[np.float64]:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput(f"{name} contains NaN or infinite entries")
    return a


def check_rgba(image, name: str = "image") -> NDArray[np.uint8]:
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 4:
        raise NoAlphaChannel(f"{name} must be RGBA (H, W, 4), got shape {image.shape}")
    if image.dtype != np.uint8:
        if not np.issubdtype(image.dtype, np.integer) or image.min() < 0 or image.max() > 255:
            raise ValueError(f"{name} must hold 8-bit channel values")
        image = image.astype(np.uint8)
    return image


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    return beta
