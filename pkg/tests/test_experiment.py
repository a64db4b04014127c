import math

import numpy as np
import pytest

from hbrsim.experiment import (
    CSV_COLUMNS,
    ExperimentConfig,
    coarsening_models,
    coarsening_study,
    density_label,
    density_sweep,
    emit,
    evaluate_network,
    flood_study,
    overhead,
    run_experiment,
    sample_pairs,
    seed_for,
)
from hbrsim.geometry import WeightModel
from hbrsim.masks import load_mask

SMALL = dict(width=300.0, height=300.0, networks=3, routes=20)


def test_overhead_examples():
    assert overhead(10.0, 10.0) == 0.0
    assert overhead(15.0, 10.0) == 50.0
    with pytest.raises(ValueError):
        overhead(1.0, 0.0)


def test_density_sweep_labels():
    sweep = density_sweep()
    assert len(sweep) == 17
    labels = [density_label(d) for d in sweep]
    assert labels[0] == "0.5" and labels[10] == "3.1" and labels[-1] == "9.2"
    assert labels == ["0.5", "0.6", "0.7", "0.9", "1.0", "1.2", "1.5", "1.8", "2.1", "2.6", "3.1", "3.7",
                      "4.5", "5.3", "6.4", "7.7", "9.2"]


def test_seed_streams_are_independent_and_stable():
    a = seed_for(1, 2e-3, 4, 0)
    assert a == seed_for(1, 2e-3, 4, 0)
    assert len({a, seed_for(1, 2e-3, 4, 1), seed_for(1, 2e-3, 5, 0), seed_for(2, 2e-3, 4, 0),
                seed_for(1, 2e-3, 4, 0, attempt=1)}) == 5


def test_sample_pairs_never_equal():
    pairs = sample_pairs(3, 500, np.random.default_rng(0))
    assert all(s != t for s, t in pairs)
    assert {p for p in pairs} == {(s, t) for s in range(3) for t in range(3) if s != t}


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(densities=(2e-3, 1e-3))
    with pytest.raises(ValueError):
        ExperimentConfig(protocols=("HBR", "FACE"))
    with pytest.raises(ValueError):
        ExperimentConfig(networks=0)


def test_single_route_table():
    cfg = ExperimentConfig(densities=(2e-3,), networks=1, routes=1, width=200.0, height=200.0)
    table = run_experiment(cfg)
    row = table.rows[0]
    assert row.networks == 1 and not row.flagged
    assert all(math.isfinite(v) and v >= -1e-9 for v in row.overhead.values())
    lines = table.to_csv().splitlines()
    assert lines[0] == CSV_COLUMNS and len(lines) == 1 + len(cfg.protocols)


def test_empty_protocol_list_gives_header_only_csv():
    cfg = ExperimentConfig(densities=(2e-3,), protocols=(), **SMALL)
    assert run_experiment(cfg).to_csv() == CSV_COLUMNS + "\n"


def test_network_result_bookkeeping():
    cfg = ExperimentConfig(densities=(1.5e-3,), keep_routes=True, **SMALL)
    res = evaluate_network(cfg, 1.5e-3, 0)
    assert res.routes == cfg.routes and res.undelivered == 0
    assert len(res.records) == cfg.routes * len(cfg.protocols)
    # stand-alone HBR and greedy-with-recovery never beat the shortest paths
    for cost in res.costs.values():
        assert cost >= res.sp_cost * (1 - 1e-12)
    assert 0 <= res.dead_geo <= res.routes


def test_csv_and_markdown_are_deterministic(tmp_path):
    cfg = ExperimentConfig(densities=(1e-3, 2e-3), **SMALL)
    first = run_experiment(cfg)
    again = run_experiment(cfg)
    assert first.to_csv() == again.to_csv()
    emit(first, "csv", tmp_path / "a.csv")
    assert (tmp_path / "a.csv").read_text() == first.to_csv()
    md = emit(first, "md")
    assert "| δ" in md and "γ GEO" in md
    with pytest.raises(ValueError):
        emit(first, "xml")


def test_parallel_matches_serial():
    cfg = ExperimentConfig(densities=(1e-3, 2e-3), **SMALL)
    serial = run_experiment(cfg).to_csv()
    parallel = run_experiment(ExperimentConfig(densities=(1e-3, 2e-3), workers=2, **SMALL)).to_csv()
    assert serial == parallel


def test_rejections_flag_the_row():
    # a tiny acceptance-heavy config: nearly empty field, everything rejected
    cfg = ExperimentConfig(densities=(1e-4,), networks=2, routes=5, width=300.0, height=300.0,
                           acceptance=1.0, retry_budget=2)
    table = run_experiment(cfg)
    assert table.flagged and "(!)" in table.to_markdown()


def test_coarsening_models():
    models = coarsening_models(WeightModel.energy())
    assert list(models) == ["w", "w16", "w8", "w4", "w2", "w1"]
    assert models["w4"] == WeightModel.coarsened(4)


def test_coarsening_study_small():
    cfg = ExperimentConfig(densities=(1.5e-3,), **SMALL)
    table = coarsening_study(cfg, ks=(4, 1))
    assert table.columns == ("w", "w4", "w1")
    d, values = table.rows[0]
    assert values["w"] >= 0 and values["w1"] >= values["w"] - 5
    csv = table.to_csv().splitlines()
    assert csv[0] == "delta,weights,overhead_pct" and len(csv) == 4
    assert "ω1" in table.to_markdown()


def test_flood_study_small():
    study = flood_study(2.5e-3, seed=3, width=300.0, height=300.0)
    stats = study.stats
    assert stats.anchor == 2 * study.network.num_edges - (study.network.n - 1)
    assert study.to_csv().startswith("level,transmissions,subnetworks\n0,")


def test_masked_experiment_runs():
    cfg = ExperimentConfig(densities=(2.5e-3,), mask=load_mask("lakes"), **SMALL)
    row = run_experiment(cfg).rows[0]
    assert row.undelivered == 0 and row.networks == SMALL["networks"]
