"""scikit-learn style wrappers around the functional API.

Every estimator takes its configuration in ``__init__`` only, so
``get_params``/``set_params``/``clone`` work as usual, and learns its
state in ``fit`` under trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .assembly import DEFAULT_K, assemble_to_height, plan_grids
from .chart import ChartSpec, normalize, parse_spec
from .fields import RegionWeights, build_distance_field, default_region_weights
from .gate import (
    DEFAULT_BETA,
    AttentionBlock,
    GateConfig,
    gate_subject_attention,
    renormalize,
    skeleton_to_latent_attention,
    spatial_mask,
)
from .metric import (
    DEFAULT_BLUR_SIGMA,
    DEFAULT_EPSILON,
    DEFAULT_POINTS_PER_BAND,
    SamplingConfig,
    exhaustive_f1,
    preprocess_chart,
    weighted_f1,
)
from .skeleton import DEFAULT_STROKE_PX, RasterConfig, build_skeleton_geometry, rasterize_skeleton
from .validation import check_rgba


def _as_spec(spec) -> ChartSpec:
    if isinstance(spec, ChartSpec):
        return spec
    if isinstance(spec, dict):
        import json

        return parse_spec(json.dumps(spec))
    return parse_spec(spec)


class SkeletonRenderer(TransformerMixin, BaseEstimator):
    """Stateless transformer: chart specs in, RGBA skeleton rasters out."""

    def __init__(self, stroke_px=DEFAULT_STROKE_PX, background="transparent"):
        self.stroke_px = stroke_px
        self.background = background

    def fit(self, X=None, y=None):
        self.config_ = RasterConfig(self.stroke_px, self.background)
        return self

    def transform(self, X):
        cfg = RasterConfig(self.stroke_px, self.background)
        specs = [X] if isinstance(X, (ChartSpec, dict, str, bytes)) else list(X)
        return [rasterize_skeleton(build_skeleton_geometry(normalize(_as_spec(s))), cfg).pixels for s in specs]


class FidelityScorer(BaseEstimator):
    """Data-faithfulness scorer for generated charts of one spec.

    ``fit`` takes the chart spec and builds its distance field; ``evaluate``
    and ``score`` take matted RGBA images of that chart.
    """

    def __init__(
        self,
        band_edges=None,
        weights=None,
        points_per_band=DEFAULT_POINTS_PER_BAND,
        seed=0,
        epsilon=DEFAULT_EPSILON,
        blur_sigma=DEFAULT_BLUR_SIGMA,
        method="sampled",
    ):
        self.band_edges = band_edges
        self.weights = weights
        self.points_per_band = points_per_band
        self.seed = seed
        self.epsilon = epsilon
        self.blur_sigma = blur_sigma
        self.method = method

    def fit(self, X, y=None):
        spec = _as_spec(X)
        self.spec_ = spec
        self.nspec_ = normalize(spec)
        self.field_ = build_distance_field(self.nspec_)
        defaults = default_region_weights(spec.chart_type, spec.canvas)
        self.region_weights_ = RegionWeights(
            defaults.band_edges if self.band_edges is None else tuple(self.band_edges),
            defaults.weights if self.weights is None else tuple(self.weights),
        )
        return self

    def foreground(self, image):
        check_is_fitted(self, "field_")
        return preprocess_chart(image, self.spec_.chart_type, self.nspec_, self.blur_sigma)

    def evaluate_mask(self, mask, seed=None):
        check_is_fitted(self, "field_")
        if self.method == "exhaustive":
            report = exhaustive_f1(mask, self.field_, self.region_weights_, self.epsilon)
        elif self.method == "sampled":
            cfg = SamplingConfig(self.points_per_band, self.seed if seed is None else seed, self.epsilon)
            report = weighted_f1(mask, self.field_, self.region_weights_, cfg)
        else:
            raise ValueError(f"method must be 'sampled' or 'exhaustive', got {self.method!r}")
        report.config["blur_sigma"] = self.blur_sigma
        return report

    def evaluate(self, image, seed=None):
        image = check_rgba(image)
        return self.evaluate_mask(self.foreground(image).mask, seed)

    def score(self, X, y=None):
        return self.evaluate(X).f1


class SpatialGate(TransformerMixin, BaseEstimator):
    """Gate subject attention with a mask learned from skeleton attention.

    ``fit(block, index_set)`` computes ``mask_`` from the skeleton queries and
    latent keys; ``transform(W)`` gates and renormalizes a subject attention
    matrix whose rows are latent tokens.
    """

    def __init__(self, beta=DEFAULT_BETA, mask_normalization="max", renormalize=True):
        self.beta = beta
        self.mask_normalization = mask_normalization
        self.renormalize = renormalize

    def fit(self, X, y=None):
        block = X if isinstance(X, AttentionBlock) else AttentionBlock(*X)
        cfg = GateConfig(self.beta, () if y is None else y, self.mask_normalization)
        self.attention_ = skeleton_to_latent_attention(block)
        self.mask_ = spatial_mask(self.attention_, cfg)
        return self

    def transform(self, X):
        check_is_fitted(self, "mask_")
        gated = gate_subject_attention(X, self.mask_, self.beta)
        return renormalize(gated) if self.renormalize else gated


class GridAssembler(BaseEstimator):
    """Learns the editability ranking of an image's grids, then re-heights it."""

    def __init__(self, n_grids=DEFAULT_K, target_height=None):
        self.n_grids = n_grids
        self.target_height = target_height

    def fit(self, X, y=None):
        image = np.asarray(X)
        self.plan_ = plan_grids(image, self.n_grids)
        self.input_shape_ = image.shape
        return self

    def assemble(self, X, target_height=None):
        check_is_fitted(self, "plan_")
        image = np.asarray(X)
        if image.shape != self.input_shape_:
            raise ValueError(f"image shape {image.shape} differs from fitted shape {self.input_shape_}")
        target = self.target_height if target_height is None else target_height
        if target is None:
            raise ValueError("no target height given")
        return assemble_to_height(image, self.plan_, target)

    def transform(self, X):
        return self.assemble(X).image

    def fit_transform(self, X, y=None):
        return self.fit(X).transform(X)
