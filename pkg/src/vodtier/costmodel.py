"""Monthly storage and on-demand transcoding costs of GOPs and videos.

Prices are AWS list prices: storage in $/GB-month, transcoding VM in
$/hour, CloudFront CDN in $/GB-month.  A GOP of ``S`` MB stored at price
``P`` costs ``S * P / 1024`` per month; transcoding it once takes ``tau``
seconds of VM time, billed at ``tau * P_vm / 3600``, and happens once per
view.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError

MB_PER_GB = 2 ** 10
SECONDS_PER_HOUR = 3600.0
TIERS = (1, 2, 3, 4)
TIER_NAMES = {
    1: "S3 Standard",
    2: "S3 Standard-IA",
    3: "S3 One Zone-IA",
    4: "S3 Glacier",
}
# tiers fronted by the CDN; Glacier is never served through it
CDN_TIERS = frozenset({1, 2, 3})


@dataclass(frozen=True)
class PricingCatalog:
    p_storage_tier1: float = 0.023
    p_storage_tier2: float = 0.0125
    p_storage_tier3: float = 0.01
    p_storage_tier4: float = 0.001
    p_transcode: float = 0.026  # t2.small, $/hour
    p_cdn: float = 0.085
    cdn_enabled: bool = False
    cdn_replication: float = 1.0

    def __post_init__(self):
        p = self.tier_prices
        if not (p[0] > p[1] > p[2] > p[3] > 0):
            raise ConfigurationError("storage tier prices must be strictly decreasing and positive")
        if self.p_transcode <= 0:
            raise ConfigurationError("p_transcode must be positive")
        if self.p_cdn < 0 or self.cdn_replication < 0:
            raise ConfigurationError("CDN price and replication must be non-negative")

    @property
    def tier_prices(self) -> tuple[float, float, float, float]:
        return (self.p_storage_tier1, self.p_storage_tier2,
                self.p_storage_tier3, self.p_storage_tier4)

    def effective_price(self, tier: int) -> float:
        return effective_storage_price(self, tier)

    def scaled(self, c: float) -> "PricingCatalog":
        """Every price multiplied by ``c``."""
        return PricingCatalog(*(x * c for x in self.tier_prices), self.p_transcode * c,
                              self.p_cdn * c, self.cdn_enabled, self.cdn_replication)


@dataclass(frozen=True)
class DecayModel:
    """Power-law decay of views along a video: GOP ``j`` gets ``views / j**alpha``."""

    alpha: float = 0.1

    def __post_init__(self):
        if self.alpha <= 0:
            raise ConfigurationError("decay exponent must be positive")


@dataclass(frozen=True)
class GopCost:
    storage: float
    transcode: float

    @property
    def ratio(self) -> float:
        return gop_ratio(self.storage, self.transcode)


def effective_storage_price(pricing: PricingCatalog, tier: int) -> float:
    """Tier price plus the CDN surcharge when the CDN fronts that tier."""
    if tier not in TIERS:
        raise ValueError(f"tier must be one of {TIERS}, got {tier!r}")
    price = pricing.tier_prices[tier - 1]
    if pricing.cdn_enabled and tier in CDN_TIERS:
        price += pricing.p_cdn * pricing.cdn_replication
    return price


def gop_views(gamma, j, decay: DecayModel = DecayModel()):
    """Estimated monthly views of GOP ``j`` (1-based) in a video with ``gamma`` views."""
    j_arr = np.asarray(j)
    if np.any(j_arr < 1):
        raise IndexError("GOP index j starts at 1")
    if np.any(np.asarray(gamma) < 0):
        raise ValueError("gamma must be non-negative")
    out = gamma / j_arr.astype(np.float64) ** decay.alpha
    return float(out) if np.ndim(out) == 0 else out


def decay_factors(m: int, decay: DecayModel = DecayModel()) -> np.ndarray:
    """``j ** -alpha`` for j = 1..m (read-only, cached)."""
    return _decay_factors(int(m), float(decay.alpha))


@lru_cache(maxsize=8192)
def _decay_factors(m, alpha):
    out = np.arange(1, m + 1, dtype=np.float64) ** -alpha
    out.flags.writeable = False
    return out


def gop_storage_cost(size, price):
    return size * price / MB_PER_GB


def video_storage_cost(video, price: float) -> float:
    return float(np.sum(gop_storage_cost(video.sizes, price)))


def gop_transcode_cost(est_views, tau, p_transcode):
    return est_views * tau * p_transcode / SECONDS_PER_HOUR


def estimated_views(video, decay: DecayModel = DecayModel()) -> np.ndarray:
    return video.views * decay_factors(video.gop_count, decay)


def annotate_views(video, decay: DecayModel = DecayModel()):
    """GOP records of ``video`` with ``est_views`` filled in."""
    from .workload import Gop

    xi = estimated_views(video, decay)
    return tuple(Gop(g.index, g.size, g.transcode_time, float(x))
                 for g, x in zip(video.gops, xi))


def gop_transcode_costs(video, decay: DecayModel, p_transcode: float) -> np.ndarray:
    return gop_transcode_cost(estimated_views(video, decay), video.taus, p_transcode)


def video_transcode_cost(video, decay: DecayModel, p_transcode: float) -> float:
    return float(np.sum(gop_transcode_costs(video, decay, p_transcode)))


def gop_ratio(storage, transcode):
    """Storage-to-transcoding cost ratio with the degenerate cases pinned.

    Zero transcoding cost gives ``inf`` (nobody watches, so delete), unless
    storage is free too, in which case the tie rule returns 1 (store).
    Works elementwise on arrays.
    """
    sc = np.asarray(storage, dtype=np.float64)
    tc = np.asarray(transcode, dtype=np.float64)
    if np.any(sc < 0) or np.any(tc < 0):
        raise ValueError("costs must be non-negative")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = np.where(tc > 0, sc / np.where(tc > 0, tc, 1.0), np.where(sc > 0, np.inf, 1.0))
    return float(r) if r.ndim == 0 else r


def video_ratio(video, pricing: PricingCatalog, decay: DecayModel = DecayModel(),
                tier: int = 1) -> float:
    """Whole-video ratio: summed storage over summed transcoding cost."""
    sc = video_storage_cost(video, effective_storage_price(pricing, tier))
    tc = video_transcode_cost(video, decay, pricing.p_transcode)
    return gop_ratio(sc, tc)
