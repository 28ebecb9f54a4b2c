"""
One video, five policies
========================

Walks a single synthetic video through the cost model: what its GOPs
cost to keep versus re-create, where the store/transcode threshold falls,
and what each placement policy charges per month.
"""
import numpy as np

from vodtier import (
    DecayModel,
    PricingCatalog,
    find_threshold,
    gop_ratios,
    synthesize_repository,
)
from vodtier.policy import PLANNERS

pricing = PricingCatalog()
decay = DecayModel(alpha=0.1)

# one video drawn from the default GOP statistics; sizes in MB, times in seconds
(video,) = synthesize_repository(2024, 1)
print(f"{video.gop_count} GOPs, mean size {video.sizes.mean() * 1024:.1f} KB, "
      f"mean transcode time {video.taus.mean():.3f} s")

# a lukewarm video: 6 views this month
video = video.with_views(6)

# storage/transcode ratio per GOP; views fall off as j**-0.1 so the ratio climbs
r = gop_ratios(video, pricing, decay)
print("ratio at GOP 1, 10, 100, 900:", np.round(r[[0, 9, 99, 899]], 3))

t = find_threshold(video, pricing, decay)
print(f"GOPs 1..{t} are cheaper to keep than to re-create on demand")

for name, plan in ((n, fn(video, pricing, decay)) for n, fn in PLANNERS.items()):
    tiers = np.bincount(plan.decisions, minlength=5)
    print(f"{name:<20s} ${plan.total:.5f}/month   GOPs per tier (transcode, 1-4): {tiers.tolist()}")

# with the CDN surcharge, storing the hot tiers costs more and the threshold moves left
cdn = PricingCatalog(cdn_enabled=True)
print("threshold without / with CDN:", t, find_threshold(video, cdn, decay))
