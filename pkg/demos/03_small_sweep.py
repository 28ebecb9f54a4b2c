"""
A small FAV sweep
=================

Calibrates the view scale so the share of frequently accessed videos
tracks 30% ... 5% as the Weibull shape grows, then prices a 300-video
repository under every policy.  The full harness is the ``simulate``
command; this is the same pipeline at toy size.
"""
from dataclasses import replace

from vodtier.experiments import ScenarioConfig, calibrate, run_fav_sweep
from vodtier.policy import POLICIES

cfg = replace(ScenarioConfig(), n_videos=300, seeds=(1,), calibration_tolerance=0.05)

cal = calibrate(cfg)
print("shared view scale:", round(next(iter(cal.scales.values())), 4))
for a in cfg.weibull_shapes:
    print(f"  shape {a}: FAV {100 * cal.achieved[a]:.1f}% (target {100 * cal.targets[a]:.0f}%)")

rows = run_fav_sweep(cfg, cal)
print("\nnormalized to full_store")
print("FAV%  " + "  ".join(f"{p:>18s}" for p in POLICIES))
for x in sorted({r.x for r in rows}, reverse=True):
    per = {r.policy: r.normalized for r in rows if r.x == x}
    print(f"{x:4g}  " + "  ".join(f"{per[p]:18.3f}" for p in POLICIES))
