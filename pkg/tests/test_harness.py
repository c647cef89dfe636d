import json
import math
import warnings
from pathlib import Path

import pytest

from condwalk import (CensoringExcess, ExperimentConfig, IngredientCache,
                      InsufficientSweep, UnknownTheorem, band_pass,
                      convergence_sweep, emit_report, parse_report,
                      run_experiment)
from condwalk.harness import row_record

EXPERIMENTS = sorted(Path(__file__).resolve().parents[1].glob("experiments/*.json"))


def _fast_cfg(**over):
    base = dict(name="t", law="gaussian:0,1", theorem_id="ICLT-S", x=0.0,
                n_list=(100,), samples=10 ** 5, seed=7,
                v_source="supplied", v_value=2 ** -0.5, band=(0.9, 1.1))
    base.update(over)
    return ExperimentConfig(**base)


def test_run_experiment_basic_row():
    rows = run_experiment(_fast_cfg())
    r = rows[0]
    assert r.n == 100 and r.predicted > 0
    assert r.ratio_lo <= r.ratio <= r.ratio_hi
    assert 0.9 <= r.ratio <= 1.1


def test_run_experiment_zero_count_event_no_crash():
    cfg = _fast_cfg(theorem_id="BB001D", x=20.0, y=200.0, delta=1.0,
                    samples=10 ** 3, n_list=(50,), band=(0.0, math.inf))
    rows = run_experiment(cfg)
    assert rows[0].mc.mean == 0.0
    assert rows[0].ratio_lo <= 0.0 <= rows[0].ratio_hi


def test_unknown_theorem_rejected():
    with pytest.raises(UnknownTheorem):
        run_experiment(_fast_cfg(theorem_id="AA317"))


def test_sweep_needs_two_horizons():
    with pytest.raises(InsufficientSweep):
        convergence_sweep(_fast_cfg(n_list=(100,)))


def test_sweep_trend():
    out = convergence_sweep(_fast_cfg(), n_list=(25, 100, 400))
    assert len(out["rows"]) == 3
    assert out["trend_ok"]


def test_reproducible_across_thread_counts(tmp_path):
    cfg = _fast_cfg()
    rows1 = run_experiment(cfg, threads=1)
    rows3 = run_experiment(cfg, threads=3)
    emit_report(rows1, "json", tmp_path / "a.json")
    emit_report(rows3, "json", tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_report_round_trip(tmp_path):
    rows = run_experiment(_fast_cfg())
    emit_report(rows, "json", tmp_path / "r.json")
    back = parse_report(tmp_path / "r.json")
    assert len(back) == len(rows)
    assert back[0].ratio == rows[0].ratio
    assert back[0].mc == rows[0].mc


def test_csv_json_numeric_equivalence(tmp_path):
    rows = run_experiment(_fast_cfg())
    emit_report(rows, "csv", tmp_path / "r.csv")
    emit_report(rows, "json", tmp_path / "r.json")
    csv_lines = (tmp_path / "r.csv").read_text().splitlines()
    header = csv_lines[0].split(",")
    assert header == ["name", "theorem", "n", "mc_mean", "mc_stderr", "samples",
                      "seed", "predicted", "ratio", "ratio_lo", "ratio_hi"]
    recs = json.loads((tmp_path / "r.json").read_text())
    for line, rec in zip(csv_lines[1:], recs):
        for field, cell in zip(header, line.split(",")):
            assert str(rec[field]) == cell


def test_emit_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_report([], "csv", tmp_path / "never.csv")


def test_config_validation():
    with pytest.raises(ValueError):
        _fast_cfg(n_list=(400, 100))
    with pytest.raises(ValueError):
        _fast_cfg(samples=10)


def test_cache_round_trip(tmp_path):
    cache = IngredientCache(tmp_path)
    calls = []

    def compute():
        calls.append(1)
        return {"v": 1.25}

    key = {"kind": "demo", "x": 1}
    assert cache.get_or_compute(key, compute) == {"v": 1.25}
    assert cache.get_or_compute(key, compute) == {"v": 1.25}
    assert len(calls) == 1


def test_config_from_json_round_trip(tmp_path):
    raw = {"name": "n", "law": "gaussian:0,1", "theorem_id": "ICLT-S",
           "n_list": [100], "samples": 1000, "seed": 3,
           "ingredient_policy": {"v_source": {"supplied": 0.70710678}},
           "band": [0.9, 1.1]}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(raw))
    cfg = ExperimentConfig.from_json(p)
    assert cfg.v_source == "supplied" and cfg.v_value == 0.70710678
    assert cfg.band == (0.9, 1.1)


@pytest.mark.parametrize("path", EXPERIMENTS, ids=lambda p: p.stem)
def test_bundled_experiments_pass_their_bands(path, tmp_path):
    cfg = ExperimentConfig.from_json(path)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CensoringExcess)
        rows = run_experiment(cfg, threads=2, cache=IngredientCache(tmp_path))
    assert rows, path
    assert band_pass(cfg, rows), [row_record(r) for r in rows]
