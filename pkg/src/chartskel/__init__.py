"""Chart skeletons, structure-aware chart fidelity scoring, spatially-gated
attention and SSIM-ranked grid assembly."""

from .assembly import GridPlan, assemble_to_height, editability_ranking, plan_grids, split_grids
from .chart import ChartSpec, ChartType, NormalizedSpec, normalize, parse_spec
from .estimators import FidelityScorer, GridAssembler, SkeletonRenderer, SpatialGate
from .fields import (
    DistanceField,
    RegionWeights,
    band_partition,
    build_distance_field,
    default_region_weights,
)
from .gate import (
    AttentionBlock,
    GateConfig,
    gate_subject_attention,
    renormalize,
    skeleton_to_latent_attention,
    spatial_mask,
    spatially_gated_attention,
)
from .metric import (
    FidelityReport,
    SamplingConfig,
    exhaustive_f1,
    preprocess_chart,
    sample_band_points,
    weighted_f1,
)
from .skeleton import (
    RasterConfig,
    build_skeleton_geometry,
    rasterize_skeleton,
    skeleton_token_indices,
)
from .ssim import ssim

__version__ = "0.1.0"
