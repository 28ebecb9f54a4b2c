"""Small worked examples with hand-computed answers."""
import math

import numpy as np
import pytest

from vodtier.clustering import ClusterResult, kmeans_1d, map_clusters_to_tiers
from vodtier.costmodel import (
    PricingCatalog,
    gop_ratio,
    gop_storage_cost,
    gop_transcode_cost,
    gop_views,
    video_ratio,
    video_storage_cost,
    video_transcode_cost,
    DecayModel,
)
from vodtier.policy import (
    cluster_tiers,
    find_threshold,
    plan_clustered,
    plan_full_store,
    plan_full_transcode,
    plan_partial_store,
    plan_store_or_transcode,
    repo_total_cost,
    threshold_from_ratios,
)
from vodtier.workload import Video, transcode_time

from oracles import brute_force_partition, sheet_gop_views, sheet_storage, sheet_transcode

PRICING = PricingCatalog()
D = DecayModel()


def video(sizes, taus=None, views=0.0, vid=0):
    sizes = np.asarray(sizes, dtype=float)
    taus = transcode_time(sizes) if taus is None else taus
    return Video(vid, sizes, taus, views)


class TestViewsAndCosts:
    def test_gop_views(self):
        assert gop_views(1000, 1) == 1000
        assert gop_views(1000, 1024) == 500
        assert gop_views(0, 77) == 0

    def test_storage(self):
        assert gop_storage_cost(1024, 0.023) == 0.023
        assert gop_storage_cost(0, 0.023) == 0

    def test_video_storage(self):
        one = video([0.7])
        assert video_storage_cost(one, 0.023) == gop_storage_cost(0.7, 0.023)
        v = video([0.3, 0.9, 1.2])
        vv = video([0.3, 0.9, 1.2, 0.3, 0.9, 1.2])
        assert video_storage_cost(vv, 0.023) == pytest.approx(2 * video_storage_cost(v, 0.023))
        assert video_storage_cost(video([1024.0] * 3), 0.023) == pytest.approx(0.069)

    def test_transcode(self):
        assert gop_transcode_cost(1, 3600, 0.026) == pytest.approx(0.026, rel=1e-15)
        assert gop_transcode_cost(0, 3600, 0.026) == 0
        assert gop_transcode_cost(500, 0.4915, 0.026) == pytest.approx(1.775e-3, abs=5e-7)

    def test_video_transcode(self):
        sizes = [0.5, 0.8, 0.6]
        v = video(sizes, views=40.0)
        hand = sum(sheet_transcode(sheet_gop_views(40.0, j), 7.5e-4 * s * 1024, 0.026)
                   for j, s in enumerate(sizes, start=1))
        assert video_transcode_cost(v, D, 0.026) == pytest.approx(hand)
        one = video([0.5], views=40.0)
        assert video_transcode_cost(one, D, 0.026) == pytest.approx(gop_transcode_cost(40.0, one.taus[0], 0.026))
        assert video_transcode_cost(v.with_views(80.0), D, 0.026) == pytest.approx(
            2 * video_transcode_cost(v, D, 0.026))

    def test_ratios(self):
        assert gop_ratio(0.01, 0.01) == 1.0
        assert gop_ratio(0.02, 0.01) == 2.0
        assert gop_ratio(0.02, 0.0) == math.inf

    def test_video_ratio_two_gops(self):
        v = video([0.5, 1.0], views=10.0)
        sc = sheet_storage(0.5, 0.023) + sheet_storage(1.0, 0.023)
        tc = sheet_transcode(10.0, v.taus[0], 0.026) + sheet_transcode(10.0 * 2 ** -0.1, v.taus[1], 0.026)
        assert video_ratio(v, PRICING) == pytest.approx(sc / tc)

    def test_cdn_prices(self):
        assert PRICING.effective_price(1) == 0.023
        cdn = PricingCatalog(cdn_enabled=True)
        assert cdn.effective_price(1) == pytest.approx(0.108)
        assert cdn.effective_price(4) == 0.001


class TestPolicies:
    def test_full_store(self):
        v = video([0.4, 0.9, 1.1], views=0.0)
        hand = sum(sheet_storage(s, 0.023) for s in (0.4, 0.9, 1.1))
        assert plan_full_store(v, PRICING).total == pytest.approx(hand)
        assert plan_full_store(v.with_views(1e5), PRICING).total == plan_full_store(v, PRICING).total
        assert plan_full_store(video([1024.0]), PRICING).total == 0.023

    def test_full_transcode(self):
        assert plan_full_transcode(video([0.5, 0.6], views=0.0), PRICING).total == 0
        v = video([0.5, 0.6], views=9.0)
        hand = sheet_transcode(9.0, v.taus[0], 0.026) + sheet_transcode(9.0 * 2 ** -0.1, v.taus[1], 0.026)
        assert plan_full_transcode(v, PRICING).total == pytest.approx(hand)
        assert plan_full_transcode(v.with_views(18.0), PRICING).total == pytest.approx(2 * hand)

    def test_store_or_transcode_tie_stores(self):
        # SC = 1024 MB at 0.5 $/GB = 0.5; TC = 1 view * 3600 s at 0.5 $/h = 0.5
        pricing = PricingCatalog(0.5, 0.0125, 0.01, 0.001, p_transcode=0.5)
        v = video([1024.0], taus=[3600.0], views=1.0)
        assert video_ratio(v, pricing) == 1.0
        assert plan_store_or_transcode(v, pricing).stored.all()

    def test_store_or_transcode_zero_views(self):
        plan = plan_store_or_transcode(video([0.5, 0.5]), PRICING)
        assert plan.total == 0 and not plan.stored.any()

    def test_store_or_transcode_transcodes_when_storage_is_double(self):
        v = video([0.6, 0.6])
        sc = video_storage_cost(v, 0.023)
        unit_tc = video_transcode_cost(v.with_views(1.0), D, 0.026)
        v = v.with_views(sc / (2 * unit_tc))
        assert video_ratio(v, PRICING) == pytest.approx(2.0)
        plan = plan_store_or_transcode(v, PRICING)
        assert not plan.stored.any()
        assert plan.total == pytest.approx(video_transcode_cost(v, D, 0.026))

    def test_partial_extremes(self):
        cold = video([0.5] * 6, views=0.5)
        assert plan_partial_store(cold, PRICING).total == plan_full_transcode(cold, PRICING).total
        hot = video([0.5] * 6, views=1e5)
        assert plan_partial_store(hot, PRICING).total == plan_full_store(hot, PRICING).total

    def test_threshold_crossing_at_ten(self):
        # uniform GOPs: R_j = c * j**0.1 / views with c the j=1 break-even
        size = 0.6
        c = sheet_storage(size, 0.023) / sheet_transcode(1.0, 7.5e-4 * size * 1024, 0.026)
        v = video([size] * 50, views=c * 10.5 ** 0.1)
        assert find_threshold(v, PRICING) == 10
        assert plan_partial_store(v, PRICING).threshold_index == 10

    def test_threshold_sequences(self):
        assert threshold_from_ratios([0.5, 0.9, 1.0, 1.2]) == 3
        assert threshold_from_ratios([2.0, 0.5, 0.5]) is None

    def test_closed_form_gamma_500(self):
        size, m = 0.6397, 20000
        v = video([size] * m, views=500.0)
        tau = 7.5e-4 * size * 1024
        j = (500.0 * tau * 0.026 * 2 ** 10 / (3600 * size * 0.023)) ** 10
        assert find_threshold(v, PRICING) == min(m, math.floor(j))

    def test_clustered_nothing_stored(self):
        v = video([0.5] * 5, views=0.2)
        assert plan_clustered(v, PRICING).total == plan_full_transcode(v, PRICING).total

    def test_clustered_equal_values_collapse(self):
        assert cluster_tiers([3.0] * 6).tolist() == [1] * 6
        v = video([0.5], views=1e4)
        assert plan_clustered(v, PRICING).total == plan_partial_store(v, PRICING).total

    def test_clustered_pattern_tiers(self):
        xi = [1, 2, 10, 11, 100, 101, 1000, 1001]
        tiers = cluster_tiers(xi)
        assert tiers.tolist() == [4, 4, 3, 3, 2, 2, 1, 1]
        prices = np.array(PRICING.tier_prices)[tiers - 1]
        sc = gop_storage_cost(np.full(8, 0.5), prices).sum()
        hand = 2 * sheet_storage(0.5, 0.001) + 2 * sheet_storage(0.5, 0.01) \
            + 2 * sheet_storage(0.5, 0.0125) + 2 * sheet_storage(0.5, 0.023)
        assert sc == pytest.approx(hand)


class TestClustering:
    def test_all_equal(self):
        res = kmeans_1d([5, 5, 5, 5], k=4)
        assert res.k == 1 and res.centroids.tolist() == [5.0]

    def test_pattern(self):
        vals = [1, 2, 10, 11, 100, 101, 1000, 1001]
        res = kmeans_1d(vals, k=4)
        groups = sorted(sorted(np.asarray(vals)[res.assignments == c].tolist()) for c in range(4))
        assert groups == sorted(brute_force_partition(vals, 4))
        assert groups == [[1, 2], [10, 11], [100, 101], [1000, 1001]]

    def test_k1_mean(self):
        assert kmeans_1d([1.0, 2.0, 6.0], k=1).centroids.tolist() == [3.0]

    def test_tier_map(self):
        res = ClusterResult(np.arange(4), np.array([10.0, 1000.0, 50.0, 2.0]), 1, 0.0)
        assert map_clusters_to_tiers(res).tolist() == [3, 1, 2, 4]
        one = kmeans_1d([4.0, 4.0], k=4)
        assert map_clusters_to_tiers(one).tolist() == [1]

    def test_tier_map_tie_by_cardinality(self):
        assign = np.array([0, 0] + [1] * 8 + [2, 3])
        res = ClusterResult(assign, np.array([5.0, 5.0, 3.0, 1.0]), 1, 0.0)
        assert map_clusters_to_tiers(res).tolist() == [2, 1, 3, 4]


def test_repo_totals():
    a = video([0.5, 0.6], views=30.0, vid=0)
    b = video([0.7], views=3.0, vid=1)
    c = video([0.4, 0.4, 0.4], views=100.0, vid=2)
    assert repo_total_cost([a], plan_partial_store, PRICING) == plan_partial_store(a, PRICING).total
    whole = repo_total_cost([a, b, c], plan_partial_store, PRICING)
    assert whole == pytest.approx(repo_total_cost([a, b], plan_partial_store, PRICING)
                                  + repo_total_cost([c], plan_partial_store, PRICING))
    assert whole == pytest.approx(sum(plan_partial_store(v, PRICING).total for v in (a, b, c)))
