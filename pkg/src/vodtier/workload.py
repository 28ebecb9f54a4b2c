"""Synthetic VOD repositories: GOP counts and sizes, transcode times, views.

GOP statistics come from a YouTube sample (sizes in kilobytes); sizes are
converted to megabytes at the synthesis boundary because every cost
formula downstream works in MB.  Views per video follow a Weibull law and
are read as views per month.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError

KB_PER_MB = 2 ** 10
MAX_REDRAWS = 10_000

# stream tags mixed into per-video seed sequences
_GOP_STREAM = 0
_VIEW_STREAM = 1


@dataclass(frozen=True)
class GopStats:
    """Gaussian fit of GOP size (KB) and GOP count per video."""

    size_mean: float = 655.08
    size_std: float = 201.44
    size_min: float = 1.91
    size_max: float = 2192.65
    count_mean: float = 1262.79
    count_std: float = 271.46
    count_min: int = 580
    count_max: int = 2018

    def __post_init__(self):
        if not self.size_min <= self.size_mean <= self.size_max:
            raise ConfigurationError("size_mean must lie within [size_min, size_max]")
        if not self.count_min <= self.count_mean <= self.count_max:
            raise ConfigurationError("count_mean must lie within [count_min, count_max]")
        if self.size_std < 0 or self.count_std < 0:
            raise ConfigurationError("standard deviations must be non-negative")
        if self.count_min < 1:
            raise ConfigurationError("count_min must be at least 1")


@dataclass(frozen=True)
class TranscodeTimeModel:
    """Linear fit ``tau = slope * size_kb + intercept``."""

    slope: float = 7.5e-4  # s/KB
    intercept: float = 0.0  # s

    def __post_init__(self):
        if self.slope < 0 or self.intercept < 0:
            raise ConfigurationError("slope and intercept must be non-negative")


@dataclass(frozen=True)
class ViewModel:
    weibull_shape: float = 1.0
    weibull_scale: float = 1.0
    view_scale: float = 1.0

    def __post_init__(self):
        if self.weibull_shape <= 0 or self.weibull_scale <= 0:
            raise ConfigurationError("Weibull shape and scale must be positive")
        if self.view_scale < 0:
            raise ConfigurationError("view_scale must be non-negative")


@dataclass(frozen=True)
class Gop:
    index: int
    size: float  # MB
    transcode_time: float  # s
    est_views: float | None = None


@dataclass(frozen=True, eq=False)
class Video:
    """A video as columnar GOP data.

    ``sizes[j - 1]`` and ``taus[j - 1]`` belong to GOP ``j``; storing columns
    instead of one object per GOP keeps paper-scale repositories (tens of
    millions of GOPs) in memory.
    """

    id: int
    sizes: np.ndarray
    taus: np.ndarray
    views: float = 0.0

    def __post_init__(self):
        sizes = _frozen(self.sizes)
        taus = _frozen(self.taus)
        if sizes.ndim != 1 or sizes.size == 0:
            raise ValueError("a video needs at least one GOP")
        if taus.shape != sizes.shape:
            raise ValueError("sizes and taus must have the same length")
        if self.views < 0:
            raise ValueError("views must be non-negative")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "taus", taus)

    @property
    def gop_count(self) -> int:
        return self.sizes.size

    @property
    def gops(self) -> tuple[Gop, ...]:
        return tuple(
            Gop(j, float(s), float(t))
            for j, (s, t) in enumerate(zip(self.sizes, self.taus), start=1)
        )

    def with_views(self, views: float) -> "Video":
        return replace(self, views=float(views))

    def __eq__(self, other):
        if not isinstance(other, Video):
            return NotImplemented
        return (
            self.id == other.id
            and self.views == other.views
            and np.array_equal(self.sizes, other.sizes)
            and np.array_equal(self.taus, other.taus)
        )

    __hash__ = None


def _frozen(a) -> np.ndarray:
    # read-only float arrays are shared, so with_views() does not copy GOP data
    if isinstance(a, np.ndarray) and a.dtype == np.float64 and not a.flags.writeable:
        return a
    out = np.array(a, dtype=np.float64)
    out.flags.writeable = False
    return out


def video_rng(seed: int, video_id: int, stream: int = _GOP_STREAM) -> np.random.Generator:
    """Independent generator for one video, so results do not depend on scheduling."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(video_id, stream)))


def _as_rng(rng_state) -> np.random.Generator:
    if isinstance(rng_state, np.random.Generator):
        return rng_state
    return np.random.default_rng(rng_state)


def _truncated_normal(rng, mean, std, lo, hi, n, rounding=False):
    # rejection, not clamping: clamping puts atoms at the bounds
    if std == 0:
        value = np.rint(mean) if rounding else mean
        if not lo <= value <= hi:
            raise ConfigurationError(f"degenerate value {value} outside [{lo}, {hi}]")
        return np.full(n, value, dtype=np.float64)
    out = np.empty(n, dtype=np.float64)
    todo = np.arange(n)
    for _ in range(MAX_REDRAWS):
        draw = rng.normal(mean, std, todo.size)
        if rounding:
            draw = np.rint(draw)
        ok = (draw >= lo) & (draw <= hi)
        out[todo[ok]] = draw[ok]
        todo = todo[~ok]
        if todo.size == 0:
            return out
    raise ConfigurationError(
        f"truncated normal N({mean}, {std}) on [{lo}, {hi}] still rejecting after {MAX_REDRAWS} redraws"
    )


def sample_gop_count(rng_state, stats: GopStats = GopStats(), n: int | None = None):
    """GOP count per video: rounded Gaussian, redrawn until inside [count_min, count_max]."""
    rng = _as_rng(rng_state)
    draws = _truncated_normal(
        rng, stats.count_mean, stats.count_std, stats.count_min, stats.count_max,
        1 if n is None else n, rounding=True,
    ).astype(np.int64)
    return int(draws[0]) if n is None else draws


def sample_gop_size(rng_state, stats: GopStats = GopStats(), n: int | None = None):
    """GOP size in MB drawn from the truncated Gaussian fit in KB."""
    rng = _as_rng(rng_state)
    kb = _truncated_normal(
        rng, stats.size_mean, stats.size_std, stats.size_min, stats.size_max,
        1 if n is None else n,
    )
    mb = kb / KB_PER_MB
    return float(mb[0]) if n is None else mb


def transcode_time(size, model: TranscodeTimeModel = TranscodeTimeModel()):
    """Seconds to transcode a GOP of ``size`` MB (scalar or array)."""
    size = np.asarray(size, dtype=np.float64)
    if np.any(size <= 0):
        raise ConfigurationError("GOP size must be positive")
    tau = model.slope * size * KB_PER_MB + model.intercept
    if np.any(tau <= 0):
        raise ConfigurationError("transcode-time model yields a non-positive time")
    return float(tau) if tau.ndim == 0 else tau


def synthesize_video(seed: int, video_id: int, stats: GopStats = GopStats(),
                     time_model: TranscodeTimeModel = TranscodeTimeModel()) -> Video:
    rng = video_rng(seed, video_id, _GOP_STREAM)
    m = sample_gop_count(rng, stats)
    sizes = sample_gop_size(rng, stats, n=m)
    return Video(video_id, sizes, transcode_time(sizes, time_model))


def synthesize_repository(rng_state: int, n_videos: int, stats: GopStats = GopStats(),
                          time_model: TranscodeTimeModel = TranscodeTimeModel()) -> list[Video]:
    """Build ``n_videos`` videos with ids ``0..n_videos-1``; views start at 0.

    ``rng_state`` is an integer master seed.  Each video draws from its own
    stream derived from (seed, video id).
    """
    if n_videos < 1:
        raise ValueError("n_videos must be >= 1")
    seed = int(rng_state)
    return [synthesize_video(seed, i, stats, time_model) for i in range(n_videos)]


def weibull_draws(rng_state: int, video_ids: Iterable[int], shape: float,
                  scale: float = 1.0) -> np.ndarray:
    """One Weibull variate per video id.

    Every shape reuses the same underlying exponential variate for a given
    (seed, video id), so sweeps over the shape compare like with like.
    """
    seed = int(rng_state)
    e = np.array([video_rng(seed, vid, _VIEW_STREAM).standard_exponential() for vid in video_ids])
    return scale * e ** (1.0 / shape)


def assign_views(rng_state: int, repo: Sequence[Video], model: ViewModel) -> list[Video]:
    """Return a copy of ``repo`` with ``views = round(view_scale * w)``, w ~ Weibull."""
    if len(repo) == 0:
        raise ValueError("repository is empty")
    w = weibull_draws(rng_state, [v.id for v in repo], model.weibull_shape, model.weibull_scale)
    views = np.rint(model.view_scale * w)
    return [v.with_views(x) for v, x in zip(repo, views)]


def scale_views(repo: Sequence[Video], factor: float) -> list[Video]:
    if factor < 0:
        raise ValueError("factor must be non-negative")
    return [v.with_views(v.views * factor) for v in repo]


def fav_fraction(repo: Sequence[Video], pricing=None, decay=None) -> float:
    """Fraction of videos whose whole-video storage/transcode ratio is below 1."""
    from .costmodel import DecayModel, PricingCatalog, video_ratio

    pricing = PricingCatalog() if pricing is None else pricing
    decay = DecayModel() if decay is None else decay
    if len(repo) == 0:
        return 0.0
    favs = sum(1 for v in repo if video_ratio(v, pricing, decay) < 1.0)
    return favs / len(repo)


def break_even_views(repo: Sequence[Video], pricing=None, decay=None) -> np.ndarray:
    """Per-video view count at which storing and transcoding cost the same.

    A video is frequently accessed exactly when ``views > break_even``.
    """
    from .costmodel import DecayModel, PricingCatalog, video_storage_cost, video_transcode_cost

    pricing = PricingCatalog() if pricing is None else pricing
    decay = DecayModel() if decay is None else decay
    out = np.empty(len(repo))
    for i, v in enumerate(repo):
        unit = v.with_views(1.0)
        sc = video_storage_cost(unit, pricing.effective_price(1))
        out[i] = sc / video_transcode_cost(unit, decay, pricing.p_transcode)
    return out
