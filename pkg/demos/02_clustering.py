"""
Spreading the stored prefix over four tiers
===========================================

The GOPs a video keeps are not equally hot: GOP 1 is watched by every
viewer, GOP 900 by fewer.  One-dimensional k-means on their estimated
views splits the prefix into four groups, and the hotter the group the
more expensive (and faster) the tier it lands in.
"""
import numpy as np

from vodtier import DecayModel, PricingCatalog, kmeans_1d, map_clusters_to_tiers
from vodtier.costmodel import TIER_NAMES, decay_factors

views = 300
xi = views * decay_factors(900, DecayModel(0.1))  # estimated views of GOPs 1..900

res = kmeans_1d(xi, k=4)
tiers = map_clusters_to_tiers(res)[res.assignments]
print("centroids (views/month):", np.round(res.centroids, 2))
for t in (1, 2, 3, 4):
    idx = np.flatnonzero(tiers == t) + 1
    print(f"tier {t} ({TIER_NAMES[t]}): GOPs {idx.min()}-{idx.max()} ({idx.size} GOPs)")

# price the same 900 GOPs (0.64 MB each) all in S3 Standard vs spread out
pricing = PricingCatalog()
size = 655.08 / 1024
flat = 900 * size * pricing.p_storage_tier1 / 1024
spread = sum(size * pricing.tier_prices[t - 1] / 1024 for t in tiers)
print(f"all in tier 1: ${flat:.5f}/month, clustered: ${spread:.5f}/month "
      f"({100 * (flat - spread) / flat:.0f}% less)")
