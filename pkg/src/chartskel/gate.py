"""Spatially-gated attention.

Skeleton queries attend over latent keys; summing the attention rows of
the skeleton tokens that carry chart pixels gives a per-latent-token mask.
The mask scales every latent token's attention to the subject reference by
``M_j + beta * (1 - M_j)``, after which rows are renormalized.

Because the gate is one scalar per row, renormalization restores any row
whose scalar is nonzero: on its own the gated matrix differs from the input
only for ``beta == 0`` rows with ``M_j == 0``. The pre-renormalization
matrix (:func:`gate_subject_attention`) keeps the suppressed mass, which is
what a caller mixing this block with other attention branches consumes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .skeleton import IndexSet
from .validation import check_beta, check_matrix

DEFAULT_BETA = 0.6


class MaskNorm(str, enum.Enum):
    MAX = "max"
    CLAMP = "clamp"


@dataclass(frozen=True)
class AttentionBlock:
    q_s: NDArray[np.float64]
    k_x: NDArray[np.float64]
    q_x: NDArray[np.float64] | None = None
    k_r: NDArray[np.float64] | None = None

    def __post_init__(self):
        for name in ("q_s", "k_x", "q_x", "k_r"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, check_matrix(value, name))
        dims = {getattr(self, n).shape[1] for n in ("q_s", "k_x", "q_x", "k_r") if getattr(self, n) is not None}
        if len(dims) != 1:
            raise ValueError(f"all matrices must share d_k, got {sorted(dims)}")

    @property
    def d_k(self) -> int:
        return self.q_s.shape[1]


@dataclass(frozen=True)
class GateConfig:
    beta: float = DEFAULT_BETA
    index_set: tuple[int, ...] = ()
    mask_normalization: MaskNorm = MaskNorm.MAX

    def __post_init__(self):
        object.__setattr__(self, "beta", check_beta(self.beta))
        idx = self.index_set.indices if isinstance(self.index_set, IndexSet) else self.index_set
        object.__setattr__(self, "index_set", tuple(sorted({int(i) for i in np.asarray(idx).ravel()})))
        object.__setattr__(self, "mask_normalization", MaskNorm(self.mask_normalization))


@dataclass(frozen=True)
class GatedWeights:
    mask: NDArray[np.float64]
    weights: NDArray[np.float64]


def softmax_rows(logits: NDArray) -> NDArray[np.float64]:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def attention(q, k) -> NDArray[np.float64]:
    q, k = check_matrix(q, "queries"), check_matrix(k, "keys")
    return softmax_rows(q @ k.T / np.sqrt(q.shape[1]))


def skeleton_to_latent_attention(block: AttentionBlock) -> NDArray[np.float64]:
    return attention(block.q_s, block.k_x)


def subject_attention(block: AttentionBlock) -> NDArray[np.float64]:
    if block.q_x is None or block.k_r is None:
        raise ValueError("block needs q_x and k_r for subject attention")
    return attention(block.q_x, block.k_r)


def spatial_mask(w_sx, cfg: GateConfig) -> NDArray[np.float64]:
    """Column sums of the skeleton-token rows, normalized into [0, 1]."""
    w_sx = check_matrix(w_sx, "skeleton attention")
    idx = np.asarray(cfg.index_set, dtype=np.intp)
    if idx.size and idx[-1] >= w_sx.shape[0]:
        raise ValueError(f"index {idx[-1]} out of range for {w_sx.shape[0]} skeleton tokens")
    raw = w_sx[idx].sum(axis=0) if idx.size else np.zeros(w_sx.shape[1])
    if cfg.mask_normalization is MaskNorm.MAX:
        peak = raw.max()
        return raw / peak if peak > 0 else raw
    return np.minimum(raw, 1.0)


def gate_subject_attention(w_xr, mask, beta: float) -> NDArray[np.float64]:
    w_xr = check_matrix(w_xr, "subject attention")
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape != (w_xr.shape[0],):
        raise ValueError(f"mask length {mask.shape} does not match {w_xr.shape[0]} latent tokens")
    beta = check_beta(beta)
    return mask[:, None] * w_xr + beta * (1.0 - mask[:, None]) * w_xr


def renormalize(w) -> NDArray[np.float64]:
    """Rows divided by their sums; all-zero rows become uniform."""
    w = np.asarray(w, dtype=np.float64)
    sums = w.sum(axis=1, keepdims=True)
    uniform = np.full_like(w, 1.0 / w.shape[1])
    safe = np.where(sums > 0, sums, 1.0)
    return np.where(sums > 0, w / safe, uniform)


def spatially_gated_attention(block: AttentionBlock, cfg: GateConfig, mode: str = "probs") -> GatedWeights:
    """Full pipeline: mask from skeleton attention, gated subject attention.

    ``mode="logit_bias"`` adds ``log(gate)`` to the subject logits before the
    softmax instead of scaling probabilities.
    """
    mask = spatial_mask(skeleton_to_latent_attention(block), cfg)
    if mode == "probs":
        gated = gate_subject_attention(subject_attention(block), mask, cfg.beta)
        return GatedWeights(mask, renormalize(gated))
    if mode == "logit_bias":
        logits = block.q_x @ block.k_r.T / np.sqrt(block.d_k)
        scale = mask + cfg.beta * (1.0 - mask)
        with np.errstate(divide="ignore"):
            bias = np.log(scale)[:, None]
        dead = ~np.isfinite(bias[:, 0])
        probs = softmax_rows(logits + np.where(np.isfinite(bias), bias, 0.0))
        probs[dead] = 1.0 / probs.shape[1]
        return GatedWeights(mask, probs)
    raise ValueError(f"unknown gate mode {mode!r}")
