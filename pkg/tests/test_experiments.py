import json
import math

import numpy as np
import pytest

from nblifts.graphs import bouquet, complete_graph, graph_to_json
from nblifts.lifts import ModelSpec
from nblifts.experiments import (
    ConfigError,
    ExperimentConfig,
    conditioned_nonalon,
    fit_scaling,
    run_experiment,
    run_trial,
    trial_seed,
    wilson_center,
    wilson_interval,
)
from nblifts.tangles import TangleQuery


def small_config(**overrides):
    params = dict(
        base=complete_graph(4),
        model=ModelSpec(),
        degrees=(2, 3),
        trials=5,
        epsilon=0.2,
        seed=7,
    )
    params.update(overrides)
    return ExperimentConfig(**params)


def test_config_validation():
    with pytest.raises(ConfigError):
        small_config(trials=0)
    with pytest.raises(ConfigError):
        small_config(epsilon=0.0)
    with pytest.raises(ConfigError):
        small_config(degrees=())
    with pytest.raises(ConfigError):
        ExperimentConfig(base=bouquet(0, 3),
                         model=ModelSpec("permutation", "near_matching"),
                         degrees=(4,), trials=2, epsilon=0.1, seed=0)


def test_config_json_roundtrip():
    cfg = small_config(tangle=TangleQuery(nu=1.8, r=2), magnifier={"gamma": 0.2})
    data = cfg.to_json()
    again = ExperimentConfig.from_json(json.loads(json.dumps(data)))
    assert again.degrees == cfg.degrees
    assert again.tangle.nu == pytest.approx(1.8)
    assert again.model == cfg.model


def test_wilson_interval_properties():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)
    assert 0 < wilson_center(0, 100) < 0.02


def test_trial_seed_stable():
    assert trial_seed(1, 10, 3) == trial_seed(1, 10, 3)
    assert trial_seed(1, 10, 3) != trial_seed(1, 10, 4)
    assert trial_seed(1, 10, 3) != trial_seed(2, 10, 3)


def test_run_trial_n_one_has_no_new_spectrum():
    cfg = small_config(degrees=(1,), trials=1)
    rec = run_trial(cfg, 1, 0)
    assert rec.non_alon == 0
    assert rec.max_new_abs is None


def test_run_experiment_counts_consistent():
    cfg = small_config(degrees=(2, 4), trials=8,
                       tangle=TangleQuery(nu=1.2, r=3))
    report = run_experiment(cfg)
    for row in report.rows:
        assert row["trials"] == 8 and row["failed"] == 0
        assert row["nonalon_and_tanglefree_count"] <= min(
            row["nonalon_positive_count"],
            row["trials"] - row["hastangles_count"])
        assert row["mean_lambda2"] is not None
    # d=3 and eps=0.2 puts the threshold above d, so nothing can exceed it
    assert any("below detection" in note for note in report.notes)


def test_disconnected_trials_are_flagged():
    # permutation lifts of the bouquet with 2 whole-loops disconnect often
    cfg = ExperimentConfig(base=bouquet(2), model=ModelSpec(),
                           degrees=(4,), trials=40, epsilon=0.1, seed=3)
    report = run_experiment(cfg)
    row = report.rows[0]
    if row["disconnected_count"]:
        assert row["disconnected_with_eigenvalue_at_d"] == row["disconnected_count"]


def test_fit_scaling_planted_decay():
    rows = [{"n": n, "nonalon_positive_count": round(2000 / n), "trials": 2000}
            for n in (10, 20, 40, 80)]
    fit = fit_scaling(rows)
    assert fit["status"] == "ok"
    assert fit["slope"] == pytest.approx(-1.0, abs=0.12)


def test_fit_scaling_constant():
    rows = [{"n": n, "nonalon_positive_count": 200, "trials": 2000}
            for n in (10, 20, 40, 80)]
    fit = fit_scaling(rows)
    assert abs(fit["slope"]) < 0.05


def test_fit_scaling_indeterminate():
    rows = [{"n": n, "nonalon_positive_count": 0, "trials": 100}
            for n in (10, 20, 40)]
    assert fit_scaling(rows)["status"] == "indeterminate"


def test_determinism_byte_identical(tmp_path):
    cfg = small_config(trials=4, tangle=TangleQuery(nu=1.2, r=3),
                       magnifier={"gamma": 0.05, "mode": "sampled", "trials": 10})
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    c1, c2 = tmp_path / "a.csv", tmp_path / "b.csv"
    run_experiment(cfg).dump(p1, c1)
    run_experiment(cfg).dump(p2, c2)
    assert p1.read_bytes() == p2.read_bytes()
    assert c1.read_bytes() == c2.read_bytes()


def test_conditioned_nonalon_rows():
    cfg = small_config(degrees=(2, 3), trials=6,
                       tangle=TangleQuery(nu=1.2, r=3))
    rows = conditioned_nonalon(cfg)
    assert len(rows) == 2
    for row in rows:
        assert row["tanglefree_trials"] <= 6
        if not row["empty"]:
            assert 0.0 <= row["frequency"] <= 1.0
    with pytest.raises(ConfigError):
        conditioned_nonalon(small_config())


def test_hastangles_frequency_decays_like_inverse_degree():
    # permutation lifts of the 2-whole-loop bouquet (d=4): the smallest
    # obstruction has order 1, so the tangle-hit rate should fall off
    # roughly like 1/n; deterministic given the seed
    cfg = ExperimentConfig(
        base=bouquet(2), model=ModelSpec(), degrees=(24, 48, 96),
        trials=250, epsilon=0.1, seed=123,
        tangle=TangleQuery(nu=math.sqrt(3), r=2, strict=True),
        tangle_max_vertices=3, tangle_max_subgraphs=4000,
    )
    report = run_experiment(cfg)
    counts = [row["hastangles_count"] for row in report.rows]
    assert counts[0] > counts[1] > counts[2] > 0
    proxy = [{"n": row["n"], "nonalon_positive_count": row["hastangles_count"],
              "trials": row["trials"]} for row in report.rows]
    fit = fit_scaling(proxy)
    assert fit["status"] == "ok"
    assert -1.3 < fit["slope"] < -0.5


def test_report_json_schema(tmp_path):
    cfg = small_config(trials=3)
    report = run_experiment(cfg)
    data = report.to_json()
    assert set(data) == {"config", "rows", "slope_fit", "notes", "errors",
                         "environment"}
    out = tmp_path / "rep.json"
    report.dump(out)
    parsed = json.loads(out.read_text())
    assert parsed["rows"][0]["n"] == 2
