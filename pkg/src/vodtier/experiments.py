"""Cost sweeps over synthetic repositories.

Three scenarios, each evaluated for every seed and all five policies:

``fav``    Weibull shape swept over FAV_TARGETS; x is the FAV percentage
``cdn``    the same repositories priced with the CDN surcharge
``views``  shape 1.0 repository with every video's views multiplied up;
           x is the growth step

Views are ``round(view_scale * w)`` with ``w ~ Weibull(shape, 1)``.  By
default one view scale is shared by all shapes and fitted once on a
dedicated calibration repository so the FAV fractions land as close as
possible to their targets; ``view_scale_mode="per_shape"`` instead fits
one scale per shape.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .clustering import KMeansConfig
from .costmodel import DecayModel, PricingCatalog
from .errors import CalibrationError
from .policy import PLANNERS, POLICIES, plan_clustered
from .workload import (
    GopStats,
    TranscodeTimeModel,
    ViewModel,
    assign_views,
    break_even_views,
    scale_views,
    synthesize_repository,
    weibull_draws,
)

log = logging.getLogger(__name__)

PAPER_SCALE = 50_000
DESK_SCALE = 2_000

# Weibull shape -> share of frequently accessed videos
FAV_TARGETS = {0.4: 0.30, 0.6: 0.25, 1.0: 0.20, 1.4: 0.15, 1.8: 0.10, 2.4: 0.05}

CSV_COLUMNS = ("scenario", "x", "policy", "seed", "total_usd", "normalized")
SCENARIOS = ("fav", "cdn", "views")


@dataclass(frozen=True)
class ScenarioConfig:
    n_videos: int = DESK_SCALE
    weibull_shapes: tuple[float, ...] = tuple(FAV_TARGETS)
    fav_targets: tuple[float, ...] = tuple(FAV_TARGETS.values())
    weibull_scale: float = 1.0
    view_scale: float | None = None  # None: calibrate
    view_scale_mode: str = "shared"
    calibration_seed: int = 0
    calibration_tolerance: float = 0.03
    views_shape: float = 1.0
    view_growth_steps: tuple[float, ...] = (1, 2, 3, 4, 5)
    view_growth_per_step: float = 0.34
    cdn_enabled: bool = False
    seeds: tuple[int, ...] = (1, 2, 3)
    pricing: PricingCatalog = field(default_factory=PricingCatalog)
    gop_stats: GopStats = field(default_factory=GopStats)
    time_model: TranscodeTimeModel = field(default_factory=TranscodeTimeModel)
    decay: DecayModel = field(default_factory=DecayModel)
    kmeans: KMeansConfig = field(default_factory=KMeansConfig)
    workers: int = 1

    def __post_init__(self):
        if self.n_videos < 1:
            raise ValueError("n_videos must be >= 1")
        if any(a <= 0 for a in self.weibull_shapes):
            raise ValueError("Weibull shapes must be positive")
        if len(self.fav_targets) != len(self.weibull_shapes):
            raise ValueError("need one FAV target per Weibull shape")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.view_scale_mode not in ("shared", "per_shape"):
            raise ValueError("view_scale_mode must be 'shared' or 'per_shape'")
        if self.views_shape not in self.weibull_shapes and self.view_scale is None \
                and self.view_scale_mode == "per_shape":
            raise ValueError("per_shape calibration needs views_shape among weibull_shapes")

    @property
    def targets(self) -> dict[float, float]:
        return dict(zip(self.weibull_shapes, self.fav_targets))

    def paper_scale(self) -> "ScenarioConfig":
        return replace(self, n_videos=PAPER_SCALE)


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    x: float
    policy: str
    seed: int
    total_usd: float
    normalized: float

    def sort_key(self):
        return (self.scenario, self.x, POLICIES.index(self.policy), self.seed)


@dataclass(frozen=True)
class Calibration:
    scales: dict[float, float]
    achieved: dict[float, float]
    targets: dict[float, float]

    def error(self, shape: float) -> float:
        return abs(self.achieved[shape] - self.targets[shape])


def reduction_pct(a: float, b: float) -> float:
    """Percentage saved going from cost ``a`` to cost ``b``."""
    return (a - b) / a * 100.0


def growth_multiplier(step: float, cfg: ScenarioConfig) -> float:
    """View multiplier applied at a growth step.

    The first step is the reference repository; each further step adds
    ``view_growth_per_step`` of the reference views.
    """
    return 1.0 + cfg.view_growth_per_step * (step - cfg.view_growth_steps[0])


# --------------------------------------------------------------- calibration

def _fav_for_scale(scale, w, break_even):
    return float(np.mean(np.rint(scale * w) > break_even))


def _bisect_scale(w, break_even, target, iters=200):
    lo, hi = 1e-9, 1.0
    while _fav_for_scale(hi, w, break_even) < target:
        hi *= 2.0
        if hi > 1e12:
            raise CalibrationError(f"no view scale reaches FAV fraction {target}")
    for _ in range(iters):
        mid = math.sqrt(lo * hi)
        if mid in (lo, hi):
            break
        if _fav_for_scale(mid, w, break_even) < target:
            lo = mid
        else:
            hi = mid
    # the FAV fraction is a step function of the scale: take the closer side
    if abs(_fav_for_scale(lo, w, break_even) - target) < abs(_fav_for_scale(hi, w, break_even) - target):
        return lo
    return hi


def calibrate_view_scale(repo, shape: float, target: float, pricing: PricingCatalog = PricingCatalog(),
                         decay: DecayModel = DecayModel(), weibull_scale: float = 1.0,
                         seed: int = 0) -> float:
    """View scale whose FAV fraction on ``repo`` is closest to ``target`` for one shape."""
    w = weibull_draws(seed, [v.id for v in repo], shape, weibull_scale)
    return _bisect_scale(w, break_even_views(repo, pricing, decay), target)


def calibrate_shared_view_scale(repo, targets: dict[float, float],
                                pricing: PricingCatalog = PricingCatalog(),
                                decay: DecayModel = DecayModel(), weibull_scale: float = 1.0,
                                seed: int = 0, grid: int = 2001) -> float:
    """One view scale for every shape, minimising the worst FAV miss.

    The optimum lies between the smallest and largest single-shape scales;
    that interval is scanned on a log grid.
    """
    be = break_even_views(repo, pricing, decay)
    ids = [v.id for v in repo]
    ws = {a: weibull_draws(seed, ids, a, weibull_scale) for a in targets}
    single = [_bisect_scale(ws[a], be, p) for a, p in targets.items()]
    lo, hi = min(single), max(single)
    if lo == hi:
        return lo
    candidates = np.exp(np.linspace(math.log(lo), math.log(hi), grid))
    worst = [max(abs(_fav_for_scale(s, ws[a], be) - p) for a, p in targets.items())
             for s in candidates]
    return float(candidates[int(np.argmin(worst))])


def calibrate(cfg: ScenarioConfig) -> Calibration:
    """Fit view scales on the calibration repository (seed ``cfg.calibration_seed``)."""
    targets = cfg.targets
    repo = _repository(cfg.calibration_seed, cfg.n_videos, cfg.gop_stats, cfg.time_model)
    base = replace(cfg.pricing, cdn_enabled=False)
    if cfg.view_scale is not None:
        scales = {a: cfg.view_scale for a in targets}
    elif cfg.view_scale_mode == "shared":
        s = calibrate_shared_view_scale(repo, targets, base, cfg.decay, cfg.weibull_scale,
                                        cfg.calibration_seed)
        scales = {a: s for a in targets}
    else:
        scales = {a: calibrate_view_scale(repo, a, p, base, cfg.decay, cfg.weibull_scale,
                                          cfg.calibration_seed) for a, p in targets.items()}
    be = break_even_views(repo, base, cfg.decay)
    ids = [v.id for v in repo]
    achieved = {a: _fav_for_scale(scales[a], weibull_draws(cfg.calibration_seed, ids, a, cfg.weibull_scale), be)
                for a in targets}
    return Calibration(scales, achieved, targets)


# ------------------------------------------------------------------ sweeps

@lru_cache(maxsize=1)
def _repository(seed, n_videos, stats, time_model):
    return tuple(synthesize_repository(seed, n_videos, stats, time_model))


def evaluate_policies(repo, pricing: PricingCatalog, decay: DecayModel,
                      kmeans: KMeansConfig) -> dict[str, float]:
    """Repository total per policy, videos summed in id order with ``fsum``."""
    videos = sorted(repo, key=lambda v: v.id)
    totals = {}
    for name in POLICIES:
        fn = PLANNERS[name]
        if fn is plan_clustered:
            costs = [fn(v, pricing, decay, kmeans).total for v in videos]
        else:
            costs = [fn(v, pricing, decay).total for v in videos]
        totals[name] = math.fsum(costs)
    return totals


def _rows(scenario, x, seed, totals):
    ref = totals["full_store"]
    return [SweepRow(scenario, x, p, seed, totals[p], totals[p] / ref if ref > 0 else math.nan)
            for p in POLICIES]


def _run_point(task):
    scenario, cfg, seed, shape, scale, x = task
    repo = _repository(seed, cfg.n_videos, cfg.gop_stats, cfg.time_model)
    viewed = assign_views(seed, repo, ViewModel(shape, cfg.weibull_scale, scale))
    pricing = replace(cfg.pricing, cdn_enabled=(scenario == "cdn") or cfg.cdn_enabled)
    if scenario == "views":
        viewed = scale_views(viewed, growth_multiplier(x, cfg))
    return _rows(scenario, x, seed, evaluate_policies(viewed, pricing, cfg.decay, cfg.kmeans))


def _tasks(scenario, cfg, calibration):
    tasks = []
    skipped = []
    if scenario in ("fav", "cdn"):
        for a, p in cfg.targets.items():
            if calibration.error(a) > cfg.calibration_tolerance:
                skipped.append((scenario, a, calibration.achieved[a], p))
                continue
            x = round(p * 100, 6)
            tasks += [(scenario, cfg, s, a, calibration.scales[a], x) for s in cfg.seeds]
    else:
        a = cfg.views_shape
        scale = calibration.scales.get(a)
        if scale is None:
            scale = next(iter(calibration.scales.values()))
        for g in cfg.view_growth_steps:
            tasks += [(scenario, cfg, s, a, scale, g) for s in cfg.seeds]
    for sc, a, got, want in skipped:
        log.warning("%s: shape %g calibrated to FAV %.4f, target %.4f; point skipped", sc, a, got, want)
    # group by seed so the per-process repository cache is reused
    tasks.sort(key=lambda t: (t[2], t[3], t[5]))
    return tasks, skipped


@dataclass
class SweepResult:
    rows: list[SweepRow]
    calibration: Calibration
    skipped: list[tuple] = field(default_factory=list)
    config: ScenarioConfig | None = None


def run_scenarios(cfg: ScenarioConfig, scenarios: Sequence[str] = SCENARIOS,
                  calibration: Calibration | None = None) -> SweepResult:
    calibration = calibrate(cfg) if calibration is None else calibration
    tasks, skipped = [], []
    for sc in scenarios:
        if sc not in SCENARIOS:
            raise ValueError(f"unknown scenario {sc!r}")
        t, s = _tasks(sc, cfg, calibration)
        tasks += t
        skipped += s
    tasks.sort(key=lambda t: (t[2], t[3], t[5], t[0]))
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_run_point, tasks))
    else:
        chunks = [_run_point(t) for t in tasks]
    rows = sorted((r for chunk in chunks for r in chunk), key=SweepRow.sort_key)
    return SweepResult(rows, calibration, skipped, cfg)


def run_fav_sweep(cfg: ScenarioConfig, calibration: Calibration | None = None) -> list[SweepRow]:
    return run_scenarios(cfg, ("fav",), calibration).rows


def run_cdn_sweep(cfg: ScenarioConfig, calibration: Calibration | None = None) -> list[SweepRow]:
    return run_scenarios(cfg, ("cdn",), calibration).rows


def run_views_sweep(cfg: ScenarioConfig, calibration: Calibration | None = None) -> list[SweepRow]:
    return run_scenarios(cfg, ("views",), calibration).rows


# ----------------------------------------------------------------- reports

def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(rows, key=SweepRow.sort_key):
        w.writerow([r.scenario, f"{r.x:g}", r.policy, r.seed, f"{r.total_usd:.2f}",
                    f"{r.normalized:.6f}"])
    return buf.getvalue()


def read_sweep_csv(path) -> list[SweepRow]:
    with open(path, newline="") as fh:
        return [SweepRow(d["scenario"], float(d["x"]), d["policy"], int(d["seed"]),
                         float(d["total_usd"]), float(d["normalized"]))
                for d in csv.DictReader(fh)]


def _table(rows):
    table = {}
    for r in rows:
        table.setdefault((r.scenario, r.x), {}).setdefault(r.policy, {})[r.seed] = r.total_usd
    return table


def _mean_std(values):
    values = list(values)
    if len(values) < 2:
        return values[0], 0.0
    return statistics.fmean(values), statistics.stdev(values)


def summary_text(rows: Sequence[SweepRow], result: SweepResult | None = None) -> str:
    out = []
    if result is not None and result.config is not None:
        cfg = result.config
        out.append(f"videos per repository: {cfg.n_videos}; seeds: {', '.join(map(str, cfg.seeds))}")
        out.append(f"view scale mode: {cfg.view_scale_mode}")
        for a, s in result.calibration.scales.items():
            out.append(f"  shape {a:g}: view_scale {s:.6f}, calibration FAV "
                       f"{100 * result.calibration.achieved[a]:.2f}% "
                       f"(target {100 * result.calibration.targets[a]:.0f}%)")
        mult = ", ".join(f"{g:g}->x{growth_multiplier(g, cfg):.2f}" for g in cfg.view_growth_steps)
        out.append(f"views scenario multipliers: {mult}")
        for sc, a, got, want in result.skipped:
            out.append(f"SKIPPED {sc} shape {a:g}: FAV {100 * got:.2f}% vs target {100 * want:.0f}%")
        out.append("")
    for (scenario, x), per in sorted(_table(rows).items()):
        out.append(f"[{scenario}] x={x:g}")
        for p in POLICIES:
            if p in per:
                m, s = _mean_std(per[p].values())
                out.append(f"  {p:<20s} {m:12.2f} +- {s:.2f} USD/month")
        if {"clustered", "partial_store", "full_store"} <= per.keys():
            seeds = sorted(per["clustered"])
            vs_partial = [reduction_pct(per["partial_store"][k], per["clustered"][k])
                          for k in seeds if per["partial_store"][k] > 0]
            vs_store = [reduction_pct(per["full_store"][k], per["clustered"][k]) for k in seeds]
            if vs_partial:
                m, s = _mean_std(vs_partial)
                out.append(f"  clustered vs partial_store: {m:.1f}% +- {s:.1f}% reduction")
            m, s = _mean_std(vs_store)
            out.append(f"  clustered vs full_store:    {m:.1f}% +- {s:.1f}% reduction")
    return "\n".join(out) + "\n"


def emit_report(rows: Sequence[SweepRow], path, result: SweepResult | None = None) -> tuple[Path, Path]:
    """Write ``sweep.csv`` and ``summary.txt`` into directory ``path``."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "sweep.csv"
    summary_path = out / "summary.txt"
    csv_path.write_text(rows_to_csv(rows))
    summary_path.write_text(summary_text(rows, result))
    return csv_path, summary_path
