import math
from dataclasses import replace

import pytest

from vodtier.cli import main
from vodtier.config import default_config_path, dump_config, load_config
from vodtier.costmodel import PricingCatalog
from vodtier.errors import CalibrationError
from vodtier.experiments import (
    CSV_COLUMNS,
    FAV_TARGETS,
    ScenarioConfig,
    SweepRow,
    calibrate,
    calibrate_view_scale,
    emit_report,
    growth_multiplier,
    read_sweep_csv,
    reduction_pct,
    rows_to_csv,
    run_fav_sweep,
    run_scenarios,
    run_views_sweep,
)
from vodtier.policy import POLICIES
from vodtier.workload import fav_fraction, ViewModel, assign_views, synthesize_repository

SMALL = ScenarioConfig(n_videos=40, weibull_shapes=(0.4, 1.0, 2.4), fav_targets=(0.30, 0.20, 0.05),
                       seeds=(1, 2), calibration_tolerance=0.1)


def test_reduction_example():
    assert reduction_pct(533, 330) == pytest.approx(38.09, abs=0.01)


def test_growth_multiplier():
    cfg = ScenarioConfig()
    assert [growth_multiplier(g, cfg) for g in cfg.view_growth_steps] == pytest.approx(
        [1.0, 1.34, 1.68, 2.02, 2.36])


def test_fav_targets():
    assert FAV_TARGETS == {0.4: 0.30, 0.6: 0.25, 1.0: 0.20, 1.4: 0.15, 1.8: 0.10, 2.4: 0.05}


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ScenarioConfig(fav_targets=(0.3,))
        with pytest.raises(ValueError):
            ScenarioConfig(seeds=())
        with pytest.raises(ValueError):
            ScenarioConfig(view_scale_mode="magic")

    def test_default_ini_matches_defaults(self):
        assert load_config(default_config_path()) == ScenarioConfig()

    def test_round_trip(self, tmp_path):
        cfg = replace(SMALL, view_scale=3.5, pricing=PricingCatalog(cdn_enabled=True, cdn_replication=2.0))
        p = tmp_path / "c.ini"
        p.write_text(dump_config(cfg))
        assert load_config(p) == cfg

    def test_partial_file_keeps_defaults(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text("[experiment]\nseeds = 7, 8\n[pricing]\np_cdn = 0.1\n")
        cfg = load_config(p)
        assert cfg.seeds == (7, 8)
        assert cfg.pricing.p_cdn == 0.1
        assert cfg.n_videos == ScenarioConfig().n_videos

    @pytest.mark.parametrize("text", ["[bogus]\nx = 1\n", "[pricing]\nnope = 1\n", "[experiment]\nzzz = 2\n"])
    def test_unknown_keys_rejected(self, tmp_path, text):
        p = tmp_path / "c.ini"
        p.write_text(text)
        with pytest.raises(KeyError):
            load_config(p)


class TestCalibration:
    def test_single_shape_hits_target(self):
        repo = synthesize_repository(0, 400)
        s = calibrate_view_scale(repo, 1.0, 0.20)
        got = fav_fraction(assign_views(0, repo, ViewModel(1.0, 1.0, s)))
        assert got == pytest.approx(0.20, abs=0.01)

    def test_unreachable_target(self):
        repo = synthesize_repository(0, 10)
        with pytest.raises(CalibrationError):
            calibrate_view_scale(repo, 1.0, 1.5)

    def test_shared_scale_is_common(self):
        cal = calibrate(SMALL)
        assert len(set(cal.scales.values())) == 1
        per = calibrate(replace(SMALL, view_scale_mode="per_shape"))
        assert max(per.error(a) for a in per.scales) <= max(cal.error(a) for a in cal.scales) + 1e-12

    def test_fixed_scale(self):
        cal = calibrate(replace(SMALL, view_scale=4.0))
        assert set(cal.scales.values()) == {4.0}


@pytest.fixture(scope="module")
def result():
    return run_scenarios(SMALL)


class TestSweeps:
    def test_row_grid(self, result):
        rows = result.rows
        fav = [r for r in rows if r.scenario == "fav"]
        assert len(fav) == 3 * len(POLICIES) * 2
        assert {r.x for r in fav} == {30.0, 20.0, 5.0}
        views = [r for r in rows if r.scenario == "views"]
        assert {r.x for r in views} == {1.0, 2.0, 3.0, 4.0, 5.0}
        assert all(r.normalized == 1.0 for r in rows if r.policy == "full_store")

    def test_policy_ordering(self, result):
        table = {(r.scenario, r.x, r.seed, r.policy): r.total_usd for r in result.rows}
        for (sc, x, seed, p), v in table.items():
            if p == "clustered":
                assert v <= table[(sc, x, seed, "partial_store")] * (1 + 1e-12)
                assert table[(sc, x, seed, "partial_store")] <= \
                    table[(sc, x, seed, "store_or_transcode")] * (1 + 1e-12)

    def test_cdn_raises_full_store(self, result):
        fs = {(r.scenario, r.x, r.seed): r.total_usd for r in result.rows if r.policy == "full_store"}
        for (sc, x, seed), v in fs.items():
            if sc == "cdn":
                assert v > fs[("fav", x, seed)]

    def test_views_grow_transcode_cost(self, result):
        ft = sorted((r.x, r.total_usd) for r in result.rows
                    if r.scenario == "views" and r.policy == "full_transcode" and r.seed == 1)
        assert [a[1] for a in ft] == sorted(a[1] for a in ft)
        assert ft[-1][1] == pytest.approx(2.36 * ft[0][1], rel=0.01)

    def test_wrappers(self, result):
        assert run_fav_sweep(SMALL, result.calibration) == [r for r in result.rows if r.scenario == "fav"]
        assert run_views_sweep(SMALL, result.calibration) == [r for r in result.rows if r.scenario == "views"]

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            run_scenarios(SMALL, ("nope",))

    def test_skip_on_bad_calibration(self):
        res = run_scenarios(replace(SMALL, view_scale=0.001, calibration_tolerance=0.06), ("fav",))
        assert {s[1] for s in res.skipped} == {0.4, 1.0}
        assert {r.x for r in res.rows} == {5.0}

    def test_workers_identical(self, result):
        par = run_scenarios(replace(SMALL, workers=3), calibration=result.calibration)
        assert rows_to_csv(par.rows) == rows_to_csv(result.rows)


class TestReport:
    def test_header_only(self, tmp_path):
        csv_path, summary = emit_report([], tmp_path / "out")
        assert csv_path.read_text() == ",".join(CSV_COLUMNS) + "\n"
        assert summary.exists()

    def test_round_trip(self, tmp_path):
        rows = [SweepRow("fav", 30.0, p, 1, 100.0 + i, (100.0 + i) / 100.0) for i, p in enumerate(POLICIES)]
        csv_path, summary = emit_report(rows, tmp_path)
        back = read_sweep_csv(csv_path)
        assert [(r.policy, r.total_usd) for r in back] == [(r.policy, r.total_usd) for r in rows]
        assert "clustered vs partial_store" in summary.read_text()

    def test_nan_normalized(self):
        text = rows_to_csv([SweepRow("fav", 5.0, "full_store", 1, 0.0, math.nan)])
        assert text.splitlines()[1] == "fav,5,full_store,1,0.00,nan"


class TestCli:
    def _ini(self, tmp_path, extra="calibration_tolerance = 0.2\n"):
        p = tmp_path / "small.ini"
        p.write_text("[experiment]\nn_videos = 20\nweibull_shapes = 0.4, 2.4\nfav_targets = 0.3, 0.05\n"
                     "seeds = 1\nview_growth_steps = 1, 2\n" + extra)
        return p

    def test_success(self, tmp_path):
        out = tmp_path / "out"
        assert main(["--config", str(self._ini(tmp_path)), "--scenario", "fav", "--out", str(out)]) == 0
        assert (out / "sweep.csv").read_text().startswith(",".join(CSV_COLUMNS))
        assert "view scale" in (out / "summary.txt").read_text()

    def test_seed_override(self, tmp_path):
        out = tmp_path / "out"
        assert main(["--config", str(self._ini(tmp_path)), "--scenario", "views", "--out", str(out),
                     "--seeds", "3,4"]) == 0
        assert {r.seed for r in read_sweep_csv(out / "sweep.csv")} == {3, 4}

    def test_bad_config_exit_2(self, tmp_path, capsys):
        p = tmp_path / "bad.ini"
        p.write_text("[pricing]\np_storage_tier2 = 1.0\n")
        assert main(["--config", str(p), "--out", str(tmp_path / "o")]) == 2
        assert "error" in capsys.readouterr().err

    def test_calibration_skip_exit_2(self, tmp_path):
        ini = self._ini(tmp_path, "view_scale = 0.001\ncalibration_tolerance = 0.01\n")
        assert main(["--config", str(ini), "--scenario", "fav", "--out", str(tmp_path / "o")]) == 2

    def test_malformed_ini_exit_2(self, tmp_path):
        ini = self._ini(tmp_path, "seeds = 2\n")
        assert main(["--config", str(ini), "--out", str(tmp_path / "o")]) == 2

    def test_unwritable_out_exit_3(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["--config", str(self._ini(tmp_path)), "--scenario", "views",
                     "--out", str(blocker / "sub")]) == 3

    def test_missing_out_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["--scenario", "fav"])
        assert exc.value.code == 2
