"""Store-or-transcode placement of VOD GOPs across AWS storage tiers."""
from .clustering import ClusterResult, KMeansConfig, kmeans_1d, map_clusters_to_tiers
from .costmodel import (
    DecayModel,
    GopCost,
    PricingCatalog,
    effective_storage_price,
    gop_ratio,
    gop_storage_cost,
    gop_transcode_cost,
    gop_views,
    video_ratio,
    video_storage_cost,
    video_transcode_cost,
)
from .errors import CalibrationError, ConfigurationError
from .policy import (
    TRANSCODE,
    CostBreakdown,
    PlacementPlan,
    find_threshold,
    gop_ratios,
    plan_clustered,
    plan_full_store,
    plan_full_transcode,
    plan_partial_store,
    plan_store_or_transcode,
    repo_total_cost,
)
from .workload import (
    Gop,
    GopStats,
    TranscodeTimeModel,
    Video,
    ViewModel,
    assign_views,
    fav_fraction,
    sample_gop_count,
    sample_gop_size,
    synthesize_repository,
    transcode_time,
)

__version__ = "0.1.0"
