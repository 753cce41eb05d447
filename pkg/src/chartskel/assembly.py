"""Height assembly of a reference object from horizontal grids.

The image is cut into ``K`` horizontal slabs, slabs are ranked by how
similar they are to the others (repetitive texture ranks high), and the
object is stretched by repeating the top slab or shortened by dropping the
lowest-ranked ones. A final vertical resize lands on the exact target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

from .exceptions import TargetTooSmall, TooSmall
from .ssim import ssim

DEFAULT_K = 5


@dataclass(frozen=True)
class Replicate:
    grid_id: int
    count: int

    def to_dict(self):
        return {"op": "replicate", "grid_id": self.grid_id, "count": self.count}


@dataclass(frozen=True)
class Remove:
    grid_id: int

    def to_dict(self):
        return {"op": "remove", "grid_id": self.grid_id}


@dataclass(frozen=True)
class Resize:
    from_px: int
    to_px: int

    def to_dict(self):
        return {"op": "resize", "from_px": self.from_px, "to_px": self.to_px}


Op = Union[Replicate, Remove, Resize]


@dataclass(frozen=True)
class GridPlan:
    k: int
    grid_height_px: int
    bounds: tuple[tuple[int, int], ...]
    ranking: tuple[int, ...]
    mean_ssim: tuple[float, ...]

    def to_dict(self):
        return {
            "k": self.k,
            "grid_height_px": self.grid_height_px,
            "bounds": [list(b) for b in self.bounds],
            "ranking": list(self.ranking),
            "mean_ssim": list(self.mean_ssim),
        }


@dataclass(frozen=True)
class AssemblyResult:
    image: NDArray[np.uint8]
    ops_log: tuple[Op, ...]
    achieved_height_px: int


def grid_bounds(height: int, k: int) -> tuple[tuple[int, int], ...]:
    if k < 1 or height < k:
        raise TooSmall(f"cannot split {height}px into {k} grids")
    g = height // k
    return tuple((i * g, (i + 1) * g if i < k - 1 else height) for i in range(k))


def split_grids(image: NDArray, k: int = DEFAULT_K) -> list[NDArray]:
    """``k`` horizontal slabs of ``height // k`` rows, remainder on the bottom slab."""
    image = np.asarray(image)
    return [image[a:b] for a, b in grid_bounds(image.shape[0], k)]


def ssim_matrix(grids) -> NDArray[np.float64]:
    k = len(grids)
    out = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            h = min(grids[i].shape[0], grids[j].shape[0])  # remainder slab is taller
            out[i, j] = out[j, i] = ssim(grids[i][:h], grids[j][:h])
    return out


def editability_ranking(grids, bounds=None) -> GridPlan:
    """Rank grids by mean SSIM against all other grids, descending, ties by id."""
    k = len(grids)
    if k < 2:
        raise ValueError("editability ranking needs at least 2 grids")
    sim = ssim_matrix(grids)
    mean = [float(np.mean([sim[g, j] for j in range(k) if j != g])) for g in range(k)]
    ranking = tuple(sorted(range(k), key=lambda g: (-mean[g], g)))
    if bounds is None:
        edges = np.cumsum([0] + [g.shape[0] for g in grids])
        bounds = tuple((int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]))
    return GridPlan(k, int(grids[0].shape[0]), tuple(bounds), ranking, tuple(mean))


def plan_grids(image: NDArray, k: int = DEFAULT_K) -> GridPlan:
    image = np.asarray(image)
    bounds = grid_bounds(image.shape[0], k)
    return editability_ranking([image[a:b] for a, b in bounds], bounds)


def resize_height(image: NDArray, target: int) -> NDArray[np.uint8]:
    """Bilinear resize along rows only, half-pixel aligned."""
    image = np.asarray(image)
    h = image.shape[0]
    if h == target:
        return image.copy()
    src = np.clip((np.arange(target) + 0.5) * h / target - 0.5, 0, h - 1)
    lo = np.floor(src).astype(int)
    hi = np.minimum(lo + 1, h - 1)
    frac = (src - lo).reshape((-1,) + (1,) * (image.ndim - 1))
    out = (1 - frac) * image[lo].astype(np.float64) + frac * image[hi].astype(np.float64)
    return np.clip(np.rint(out), 0, 255).astype(image.dtype)


def assemble_to_height(image: NDArray, plan: GridPlan, target_height_px: int) -> AssemblyResult:
    image = np.asarray(image)
    height = image.shape[0]
    target = int(target_height_px)
    if target < plan.grid_height_px:
        raise TargetTooSmall(f"target {target}px is below one grid ({plan.grid_height_px}px)")
    if target == height:
        return AssemblyResult(image.copy(), (), height)

    order = list(range(plan.k))  # grid ids in vertical order
    slab_h = {g: b - a for g, (a, b) in enumerate(plan.bounds)}
    ops: list[Op] = []
    if abs(target - height) * 2 >= plan.grid_height_px:
        top = plan.ranking[0]
        if target > height:
            count = math.ceil((target - height) / slab_h[top])
            pos = order.index(top)
            order[pos + 1 : pos + 1] = [top] * count
            ops.append(Replicate(top, count))
        else:
            current = height
            for g in reversed(plan.ranking[1:]):
                if current <= target:
                    break
                order.remove(g)
                current -= slab_h[g]
                ops.append(Remove(g))

    out = np.concatenate([image[slice(*plan.bounds[g])] for g in order], axis=0)
    if out.shape[0] != target:
        ops.append(Resize(out.shape[0], target))
        out = resize_height(out, target)
    return AssemblyResult(out, tuple(ops), out.shape[0])
