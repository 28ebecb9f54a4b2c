"""CSV files for repositories and placement plans.

A repository is two files: ``videos.csv`` (``id,views,gop_count``, one
video per line) and a GOP sidecar ``gops.csv`` (``video_id,j,size_mb,tau_s``).
Floats are written with ``repr`` so a round trip is exact.
"""
from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Sequence

from .costmodel import TIERS
from .policy import TRANSCODE, PlacementPlan
from .workload import Video

VIDEO_COLUMNS = ("id", "views", "gop_count")
GOP_COLUMNS = ("video_id", "j", "size_mb", "tau_s")
PLAN_COLUMNS = ("video_id", "j", "decision", "tier", "sc", "tc")


def save_repository(repo: Sequence[Video], directory) -> tuple[Path, Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    vpath, gpath = d / "videos.csv", d / "gops.csv"
    with open(vpath, "w", newline="") as vf, open(gpath, "w", newline="") as gf:
        vw = csv.writer(vf, lineterminator="\n")
        gw = csv.writer(gf, lineterminator="\n")
        vw.writerow(VIDEO_COLUMNS)
        gw.writerow(GOP_COLUMNS)
        for v in repo:
            vw.writerow([v.id, repr(float(v.views)), v.gop_count])
            gw.writerows([v.id, j, repr(float(s)), repr(float(t))]
                         for j, (s, t) in enumerate(zip(v.sizes, v.taus), start=1))
    return vpath, gpath


def load_repository(directory) -> list[Video]:
    d = Path(directory)
    gops = defaultdict(list)
    with open(d / "gops.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            gops[int(row["video_id"])].append((int(row["j"]), float(row["size_mb"]), float(row["tau_s"])))
    repo = []
    with open(d / "videos.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            vid = int(row["id"])
            rows = sorted(gops.pop(vid, []))
            if len(rows) != int(row["gop_count"]):
                raise ValueError(f"video {vid}: gop_count {row['gop_count']} but {len(rows)} GOP rows")
            if [j for j, _, _ in rows] != list(range(1, len(rows) + 1)):
                raise ValueError(f"video {vid}: GOP indices are not 1..{len(rows)}")
            repo.append(Video(vid, [s for _, s, _ in rows], [t for _, _, t in rows], float(row["views"])))
    if gops:
        raise ValueError(f"GOP rows for unknown videos: {sorted(gops)[:5]}")
    return repo


def write_plans_csv(plans: Iterable[PlacementPlan], path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PLAN_COLUMNS)
        for plan in plans:
            for j, (d, sc, tc) in enumerate(zip(plan.decisions, plan.gop_sc, plan.gop_tc), start=1):
                d = int(d)
                if d == TRANSCODE:
                    w.writerow([plan.video_id, j, "transcode", "", repr(0.0), repr(float(tc))])
                else:
                    w.writerow([plan.video_id, j, "store", d, repr(float(sc)), repr(0.0)])
    return path


def read_plans_csv(path) -> list[dict]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            tier = int(row["tier"]) if row["tier"] else None
            if tier is not None and tier not in TIERS:
                raise ValueError(f"bad tier {tier}")
            out.append({"video_id": int(row["video_id"]), "j": int(row["j"]),
                        "decision": row["decision"], "tier": tier,
                        "sc": float(row["sc"]), "tc": float(row["tc"])})
    return out
