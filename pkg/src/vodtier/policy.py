"""Placement strategies for one video: what to store, where, and what it costs.

Five planners share one output type:

* ``plan_full_store``          every GOP in S3 Standard
* ``plan_full_transcode``      delete everything, transcode on each view
* ``plan_store_or_transcode``  whole-video decision from the video ratio
* ``plan_partial_store``       store the leading GOPs whose ratio is <= 1
* ``plan_clustered``           same stored prefix, spread over four tiers
                               by 1-D k-means on estimated GOP views
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .clustering import KMeansConfig, kmeans_1d, map_clusters_to_tiers
from .costmodel import (
    TIERS,
    DecayModel,
    PricingCatalog,
    decay_factors,
    effective_storage_price,
    gop_ratio,
    gop_storage_cost,
    gop_transcode_costs,
    video_ratio,
)

TRANSCODE = 0

POLICIES = ("full_store", "full_transcode", "store_or_transcode", "partial_store", "clustered")


@dataclass(frozen=True)
class CostBreakdown:
    sc_tier1: float = 0.0
    sc_tier2: float = 0.0
    sc_tier3: float = 0.0
    sc_tier4: float = 0.0
    tc_remaining: float = 0.0

    @property
    def sc_tiers(self) -> tuple[float, float, float, float]:
        return (self.sc_tier1, self.sc_tier2, self.sc_tier3, self.sc_tier4)

    @property
    def sc_stored_total(self) -> float:
        return self.sc_tier1 + self.sc_tier2 + self.sc_tier3 + self.sc_tier4

    @property
    def total(self) -> float:
        return self.sc_stored_total + self.tc_remaining


@dataclass(frozen=True, eq=False)
class PlacementPlan:
    """Per-GOP decisions for one video.

    ``decisions[j - 1]`` is the storage tier (1-4) of GOP ``j``, or
    ``TRANSCODE`` (0).  ``gop_sc``/``gop_tc`` hold the monthly cost each GOP
    actually incurs under the plan; one of the two is zero for every GOP.
    """

    video_id: int
    policy: str
    decisions: np.ndarray
    threshold_index: int | None
    cost: CostBreakdown
    gop_sc: np.ndarray
    gop_tc: np.ndarray

    @property
    def total(self) -> float:
        return self.cost.total

    @property
    def stored(self) -> np.ndarray:
        return self.decisions != TRANSCODE


def _build(video, policy, decisions, threshold, pricing, decay):
    decisions = np.asarray(decisions, dtype=np.int8)
    stored = decisions != TRANSCODE
    prices = np.array([0.0] + [effective_storage_price(pricing, t) for t in TIERS])
    gop_sc = np.where(stored, gop_storage_cost(video.sizes, prices[decisions]), 0.0)
    if stored.all():
        gop_tc = np.zeros(video.gop_count)
    else:
        gop_tc = np.where(stored, 0.0, gop_transcode_costs(video, decay, pricing.p_transcode))
    sc_tiers = np.bincount(decisions, weights=gop_sc, minlength=len(TIERS) + 1)[1:]
    cost = CostBreakdown(*map(float, sc_tiers), tc_remaining=float(np.sum(gop_tc)))
    return PlacementPlan(video.id, policy, decisions, threshold, cost, gop_sc, gop_tc)


def gop_ratios(video, pricing: PricingCatalog, decay: DecayModel = DecayModel(),
               tier: int = 1) -> np.ndarray:
    sc = gop_storage_cost(video.sizes, effective_storage_price(pricing, tier))
    tc = gop_transcode_costs(video, decay, pricing.p_transcode)
    return gop_ratio(sc, tc)


def threshold_from_ratios(ratios) -> int | None:
    """Last 1-based index of the leading run of ratios <= 1, or None."""
    over = np.flatnonzero(np.asarray(ratios) > 1.0)
    t = over[0] if over.size else len(ratios)
    return int(t) if t > 0 else None


def find_threshold(video, pricing: PricingCatalog, decay: DecayModel = DecayModel()) -> int | None:
    """Index of the threshold GOP, priced at the S3 Standard rate.

    Only the leading run counts: a later GOP whose ratio dips back to <= 1
    (possible when GOP sizes vary) is still transcoded.
    """
    return threshold_from_ratios(gop_ratios(video, pricing, decay, tier=1))


def plan_full_store(video, pricing: PricingCatalog, decay: DecayModel = DecayModel()) -> PlacementPlan:
    return _build(video, "full_store", np.ones(video.gop_count), video.gop_count, pricing, decay)


def plan_full_transcode(video, pricing: PricingCatalog,
                        decay: DecayModel = DecayModel()) -> PlacementPlan:
    return _build(video, "full_transcode", np.zeros(video.gop_count), None, pricing, decay)


def plan_store_or_transcode(video, pricing: PricingCatalog,
                            decay: DecayModel = DecayModel()) -> PlacementPlan:
    if video_ratio(video, pricing, decay) <= 1.0:
        plan = plan_full_store(video, pricing, decay)
    else:
        plan = plan_full_transcode(video, pricing, decay)
    return _relabel(plan, "store_or_transcode")


def plan_partial_store(video, pricing: PricingCatalog,
                       decay: DecayModel = DecayModel()) -> PlacementPlan:
    t = find_threshold(video, pricing, decay)
    decisions = np.zeros(video.gop_count)
    if t is not None:
        decisions[:t] = 1
    return _build(video, "partial_store", decisions, t, pricing, decay)


def cluster_tiers(values, cfg: KMeansConfig = KMeansConfig()) -> np.ndarray:
    """Storage tier for each value: k-means clusters ranked hottest-first."""
    result = kmeans_1d(values, cfg.k, cfg.seed, cfg.tol, cfg.max_iter, cfg.n_init)
    return map_clusters_to_tiers(result)[result.assignments]


@lru_cache(maxsize=4096)
def _profile_tiers(t: int, alpha: float, cfg: KMeansConfig) -> np.ndarray:
    tiers = cluster_tiers(decay_factors(t, DecayModel(alpha)), cfg)
    tiers.flags.writeable = False
    return tiers


def stored_prefix_tiers(video, threshold: int, decay: DecayModel = DecayModel(),
                        cfg: KMeansConfig = KMeansConfig()) -> np.ndarray:
    """Tiers for GOPs 1..threshold, clustered on their estimated views.

    The estimates are ``views * j**-alpha``; k-means is scale-equivariant,
    so for positive views the partition depends only on the prefix length
    and is cached on it.
    """
    if video.views > 0:
        return _profile_tiers(threshold, decay.alpha, cfg)
    return cluster_tiers(video.views * decay_factors(threshold, decay), cfg)


def plan_clustered(video, pricing: PricingCatalog, decay: DecayModel = DecayModel(),
                   kmeans_cfg: KMeansConfig | None = None) -> PlacementPlan:
    cfg = KMeansConfig() if kmeans_cfg is None else kmeans_cfg
    t = find_threshold(video, pricing, decay)
    decisions = np.zeros(video.gop_count)
    if t is not None:
        decisions[:t] = stored_prefix_tiers(video, t, decay, cfg)
    return _build(video, "clustered", decisions, t, pricing, decay)


def plan_clustered_global(repo: Sequence, pricing: PricingCatalog,
                          decay: DecayModel = DecayModel(),
                          kmeans_cfg: KMeansConfig | None = None) -> list[PlacementPlan]:
    """Clustered planning with one k-means over every stored GOP in ``repo``."""
    cfg = KMeansConfig() if kmeans_cfg is None else kmeans_cfg
    videos = sorted(repo, key=lambda v: v.id)
    thresholds = [find_threshold(v, pricing, decay) for v in videos]
    xi = [v.views * decay_factors(t, decay) for v, t in zip(videos, thresholds) if t]
    tiers = cluster_tiers(np.concatenate(xi), cfg) if xi else np.empty(0, dtype=np.int64)
    plans = []
    offset = 0
    for v, t in zip(videos, thresholds):
        decisions = np.zeros(v.gop_count)
        if t:
            decisions[:t] = tiers[offset:offset + t]
            offset += t
        plans.append(_build(v, "clustered", decisions, t, pricing, decay))
    return plans


def _relabel(plan: PlacementPlan, policy: str) -> PlacementPlan:
    return PlacementPlan(plan.video_id, policy, plan.decisions, plan.threshold_index,
                         plan.cost, plan.gop_sc, plan.gop_tc)


PLANNERS: dict[str, Callable] = {
    "full_store": plan_full_store,
    "full_transcode": plan_full_transcode,
    "store_or_transcode": plan_store_or_transcode,
    "partial_store": plan_partial_store,
    "clustered": plan_clustered,
}


def repo_total_cost(repo: Sequence, plan_fn: Callable, pricing: PricingCatalog, **kwargs) -> float:
    """Monthly cost of ``repo`` under ``plan_fn``.

    Videos are visited in id order and summed with ``math.fsum``, so the
    result does not depend on how the repository was built or split.
    """
    totals = [plan_fn(v, pricing, **kwargs).total for v in sorted(repo, key=lambda v: v.id)]
    return math.fsum(totals)
