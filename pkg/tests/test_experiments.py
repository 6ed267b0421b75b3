import math

import numpy as np
import pytest

from hetsnet.dynamics import BrdConfig, brd_run
from hetsnet.experiments import (
    CSV_HEADER,
    EXPERIMENTS,
    ExperimentConfig,
    default_config,
    run_algo_comparison,
    run_brd_vs_q,
    run_experiment,
    run_pne_percentage,
    run_poa_pos,
)
from hetsnet.games import GameKind, associated_count, make_oracle
from hetsnet.instance import Seed, generate_instance

SMALL = dict(realizations=4, master_seed=3)


@pytest.mark.parametrize("exp", EXPERIMENTS)
def test_every_experiment_runs(exp):
    grids = dict(n_values=(2, 3), q_values=(1, 3), tau_values=(0.1, 0.3), epsilon_values=(0.01,), iterations=20)
    if exp in ("pne_percentage", "algo_comparison"):
        grids["m_offset"] = 2
    else:
        grids["m_values"] = (4,)
    res = run_experiment(default_config(exp, **SMALL, **grids))
    assert res.rows
    for row in res.rows:
        assert row.realizations == 4 or math.isnan(row.mean)
    lines = res.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == len(res.rows) + 1


def test_csv_matches_across_workers(tmp_path):
    cfg = default_config("algo_comparison", n_values=(2, 3), realizations=6, master_seed=5, restarts=4)
    serial = run_experiment(cfg).to_csv()
    parallel = run_experiment(default_config("algo_comparison", n_values=(2, 3), realizations=6, master_seed=5,
                                             restarts=4, workers=2)).to_csv(tmp_path / "p.csv")
    assert serial == parallel
    assert (tmp_path / "p.csv").read_text() == serial


def test_seed_changes_output():
    a = run_experiment(default_config("poa_pos", n_values=(2,), m_values=(3,), realizations=5, master_seed=1))
    b = run_experiment(default_config("poa_pos", n_values=(2,), m_values=(3,), realizations=5, master_seed=2))
    assert a.to_csv() != b.to_csv()


def test_cap_violation_becomes_error_row():
    cfg = default_config("poa_pos", n_values=(2, 6), m_values=(6,), realizations=2, enumeration_cap=1000)
    res = run_poa_pos(cfg)
    assert res.row("error:enumeration_cap", 6, 6).realizations == 0
    assert res.mean("pne_exists", 2, 6) >= 0


def test_counterexample_injected_gives_zero_pne_play(cx):
    cfg = default_config("pne_percentage", n_values=(3,), realizations=3, fixed_instance=cx)
    res = run_pne_percentage(cfg)
    assert res.mean("pne_fraction_full", 3, 3) == 0.0
    assert res.mean("pne_fraction_last_half", 3, 3) == 0.0


def test_q_one_is_plain_brd():
    cfg = default_config("brd_vs_q", n_values=(4,), m_values=(5,), q_values=(1, 4), realizations=3, master_seed=7)
    res = run_brd_vs_q(cfg)
    code = EXPERIMENTS.index("brd_vs_q")
    for r in range(3):
        key = Seed(7, (code, 4, 5, r))
        inst = generate_instance(cfg.geometry, 4, 5, seed=key)
        g = make_oracle(GameKind.G, inst)
        plain = brd_run(g, BrdConfig(), key.spawn(1, 0))
        assert res.sample("brd_associated", 4, 5, 1)[r] == associated_count(g, plain.profile)
    assert np.all(res.sample("brd_associated", 4, 5, 4) >= res.sample("brd_associated", 4, 5, 1))


def test_optimum_dominates_per_realization():
    res = run_algo_comparison(default_config("algo_comparison", n_values=(3, 4), realizations=10, restarts=5))
    for n in (3, 4):
        opt = res.sample("optimal", n, n + 2)
        assert np.all(opt >= res.sample("brd_associated", n, n + 2))
        assert np.all(opt >= res.sample("mwsls_associated", n, n + 2))
        both_zero = opt == 0
        assert np.all(res.sample("mwsls_associated", n, n + 2)[both_zero] == 0)


def test_paired_standard_error():
    res = run_algo_comparison(default_config("algo_comparison", n_values=(3,), realizations=8, restarts=3))
    diff = res.sample("optimal", 3, 5) - res.sample("brd_associated", 3, 5)
    assert res.paired_se(("optimal", 3, 5), ("brd_associated", 3, 5)) == pytest.approx(
        np.std(diff, ddof=1) / math.sqrt(8)
    )


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="fig99", n_values=(2,), m_values=(3,))
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="poa_pos", n_values=(), m_values=(3,))
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="poa_pos", n_values=(2,), m_values=(3,), realizations=0)
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="brd_vs_q", n_values=(2,), m_values=(3,))
    with pytest.raises(ValueError):
        run_poa_pos(default_config("brd_vs_q"))


def test_grid_points():
    assert default_config("pne_percentage", n_values=(2, 5)).points() == [(2, 4), (5, 7)]
    assert default_config("poa_pos", n_values=(2, 3), m_values=(6, 8)).points() == [(2, 6), (3, 6), (2, 8), (3, 8)]
