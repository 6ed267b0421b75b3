"""Seeded Monte-Carlo sweeps, one per simulation study.

Every realization draws its instance from the stream
``(experiment, N, M, r)``, so all algorithms and all parameter values at a
grid point see the same channels. Algorithms get their own child streams
of that key. Realizations may run in worker processes; results are merged in
realization order, so serial and parallel runs emit identical CSV bytes.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .dynamics import BrdConfig, brd_restarts, brd_run, select_best
from .equilibria import DEFAULT_CAP, is_pne, poa_pos
from .games import GameKind, associated_count, make_oracle
from .instance import GeometryConfig, Instance, Seed, generate_instance
from .learning import LearningConfig, mwsls_run
from .optimal import solve_optimal

EXPERIMENTS = (
    "poa_pos",
    "brd_g1_g2",
    "brd_vs_q",
    "tau_sweep",
    "iter_trace",
    "epsilon_sweep",
    "pne_percentage",
    "algo_comparison",
)

CSV_HEADER = ("experiment", "N", "M", "param_name", "param_value", "metric", "mean", "stddev", "realizations", "seed")

_PARAM_GRID = {"brd_vs_q": "q_values", "tau_sweep": "tau_values", "iter_trace": "tau_values",
               "epsilon_sweep": "epsilon_values"}

# child stream tags under a realization key
_BRD, _MWSLS, _BRD_G1, _BRD_G2 = 1, 2, 3, 4


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n_values: tuple[int, ...]
    m_values: tuple[int, ...] = ()
    m_offset: int | None = None  # when set, M = N + m_offset and m_values is ignored
    q_values: tuple[int, ...] = ()
    tau_values: tuple[float, ...] = ()
    epsilon_values: tuple[float, ...] = ()
    realizations: int = 200
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    master_seed: int = 0
    power_db: float = 10.0
    threshold_db: float = 0.0
    tau: float = 0.1
    epsilon: float = 0.01
    iterations: int = 100
    max_rounds: int = 10
    restarts: int = 30
    include_optimal: bool = True
    enumeration_cap: int = DEFAULT_CAP
    workers: int = 1
    fixed_instance: Instance | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if not self.n_values or (self.m_offset is None and not self.m_values):
            raise ValueError("N and M grids must be non-empty")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        grid = _PARAM_GRID.get(self.experiment)
        if grid and not getattr(self, grid):
            raise ValueError(f"{self.experiment} needs a non-empty {grid} grid")

    def points(self) -> list[tuple[int, int]]:
        if self.fixed_instance is not None:
            return [(self.fixed_instance.num_sbs, self.fixed_instance.num_su)]
        if self.m_offset is not None:
            return [(n, n + self.m_offset) for n in self.n_values]
        return [(n, m) for m in self.m_values for n in self.n_values]


DEFAULTS = {
    "poa_pos": dict(n_values=(2, 3, 4, 5), m_values=(6, 8)),
    "brd_g1_g2": dict(n_values=(2, 4, 6, 8, 10), m_values=(10,)),
    "brd_vs_q": dict(n_values=(10,), m_values=(6, 10), q_values=(1, 2, 5, 10, 20, 30, 50, 75, 100)),
    "tau_sweep": dict(n_values=(4, 7, 10), m_values=(10,), tau_values=(0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5)),
    "iter_trace": dict(n_values=(6,), m_values=(10,), tau_values=(0.1, 0.3)),
    "epsilon_sweep": dict(n_values=(4, 7, 10), m_values=(10,),
                          epsilon_values=(0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2)),
    "pne_percentage": dict(n_values=tuple(range(2, 11)), m_offset=2),
    "algo_comparison": dict(n_values=tuple(range(2, 9)), m_offset=2, restarts=30),
}

DEFAULT_GEOMETRY = GeometryConfig()


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    if experiment not in DEFAULTS:
        raise ValueError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    kwargs = dict(DEFAULTS[experiment], experiment=experiment, geometry=DEFAULT_GEOMETRY)
    kwargs.update(overrides)
    return ExperimentConfig(**kwargs)


@dataclass(frozen=True)
class SweepRow:
    experiment: str
    n: int
    m: int
    param_name: str
    param_value: float | None
    metric: str
    mean: float
    stddev: float
    realizations: int
    seed: int

    def cells(self) -> list[str]:
        return [
            self.experiment, str(self.n), str(self.m), self.param_name,
            "" if self.param_value is None else _fmt(self.param_value),
            self.metric, _fmt(self.mean), _fmt(self.stddev), str(self.realizations), str(self.seed),
        ]


def _fmt(x: float) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.9g}"


@dataclass
class SweepResult:
    rows: list[SweepRow]
    # per-realization values keyed by (N, M, param_name, param_value, metric); NaN where undefined
    samples: dict = field(default_factory=dict, repr=False)

    def row(self, metric: str, n: int, m: int, param_value=None) -> SweepRow:
        for r in self.rows:
            if r.metric == metric and r.n == n and r.m == m and r.param_value == param_value:
                return r
        raise KeyError((metric, n, m, param_value))

    def mean(self, metric: str, n: int, m: int, param_value=None) -> float:
        return self.row(metric, n, m, param_value).mean

    def sample(self, metric: str, n: int, m: int, param_value=None) -> np.ndarray:
        for (sn, sm, _, pv, met), vals in self.samples.items():
            if met == metric and sn == n and sm == m and pv == param_value:
                return vals
        raise KeyError((metric, n, m, param_value))

    def paired_se(self, a: tuple, b: tuple) -> float:
        """Standard error of the mean of per-realization differences ``a - b``."""
        diff = self.sample(*a) - self.sample(*b)
        diff = diff[~np.isnan(diff)]
        if len(diff) < 2:
            return 0.0
        return float(np.std(diff, ddof=1) / math.sqrt(len(diff)))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow(r.cells())
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _instance(cfg: ExperimentConfig, code: int, n: int, m: int, r: int) -> tuple[Instance, Seed]:
    key = Seed(cfg.master_seed, (code, n, m, r))
    if cfg.fixed_instance is not None:
        return cfg.fixed_instance, key
    return generate_instance(cfg.geometry, n, m, cfg.power_db, cfg.threshold_db, key), key


def _mwsls(cfg, inst, key, tau=None, epsilon=None, track=False):
    lc = LearningConfig(tau=cfg.tau if tau is None else tau,
                        epsilon=cfg.epsilon if epsilon is None else epsilon,
                        iterations=cfg.iterations, seed=key.spawn(_MWSLS))
    return mwsls_run(inst, lc, track_pne=track)


def _realize(cfg: ExperimentConfig, n: int, m: int, r: int) -> dict:
    """Metrics of one realization at one grid point: {(param_name, value, metric): x}."""
    exp = cfg.experiment
    code = EXPERIMENTS.index(exp)
    inst, key = _instance(cfg, code, n, m, r)
    out: dict = {}
    g = make_oracle(GameKind.G, inst)

    if exp == "poa_pos":
        rep = poa_pos(g, cfg.enumeration_cap)
        exists = rep.poa is not None
        out[("", None, "pne_exists")] = float(exists)
        out[("", None, "num_pne")] = float(rep.num_pne)
        out[("", None, "poa")] = rep.poa if exists else math.nan
        out[("", None, "pos")] = rep.pos if exists else math.nan
        out[("", None, "optimal")] = float(rep.max_welfare)

    elif exp == "brd_g1_g2":
        rounds = max(cfg.max_rounds, n * m)
        for kind, tag, name in ((GameKind.G1, _BRD_G1, "g1"), (GameKind.G2, _BRD_G2, "g2")):
            oracle = make_oracle(kind, inst)
            res = brd_run(oracle, BrdConfig(max_rounds=rounds), key.spawn(tag))
            out[("", None, f"{name}_associated")] = float(associated_count(oracle, res.profile))
            out[("", None, f"{name}_converged")] = float(res.converged)
        if cfg.include_optimal:
            out[("", None, "optimal")] = float(solve_optimal(inst).count)

    elif exp == "brd_vs_q":
        bc = BrdConfig(max_rounds=cfg.max_rounds, restarts=max(cfg.q_values), seed=key.spawn(_BRD))
        runs = brd_restarts(g, bc)
        for q in cfg.q_values:
            best = select_best(runs[:q])
            out[("Q", q, "brd_associated")] = float(associated_count(g, best.profile))
        out[("", None, "mwsls_associated")] = float(associated_count(g, _mwsls(cfg, inst, key).final_profile))
        if cfg.include_optimal:
            out[("", None, "optimal")] = float(solve_optimal(inst).count)

    elif exp in ("tau_sweep", "epsilon_sweep"):
        name, values = ("tau", cfg.tau_values) if exp == "tau_sweep" else ("epsilon", cfg.epsilon_values)
        for v in values:
            tr = _mwsls(cfg, inst, key, **{name: v})
            out[(name, v, "mwsls_associated")] = float(associated_count(g, tr.final_profile))

    elif exp == "iter_trace":
        for tau in cfg.tau_values:
            assoc = _mwsls(cfg, inst, key, tau=tau).associated
            for t, a in enumerate(assoc, start=1):
                out[("tau", tau, f"associated_t{t:03d}")] = float(a)

    elif exp == "pne_percentage":
        tr = _mwsls(cfg, inst, key, track=True)
        out[("", None, "pne_fraction_full")] = tr.pne_fraction("full")
        out[("", None, "pne_fraction_last_half")] = tr.pne_fraction("last_half")
        out[("", None, "final_is_pne")] = float(is_pne(g, tr.final_profile))

    elif exp == "algo_comparison":
        bc = BrdConfig(max_rounds=cfg.max_rounds, restarts=cfg.restarts, seed=key.spawn(_BRD))
        out[("", None, "brd_associated")] = float(associated_count(g, select_best(brd_restarts(g, bc)).profile))
        out[("", None, "mwsls_associated")] = float(associated_count(g, _mwsls(cfg, inst, key).final_profile))
        out[("", None, "optimal")] = float(solve_optimal(inst).count)

    return out


def _task(args):
    cfg, n, m, r = args
    return _realize(cfg, n, m, r)


def _over_cap(cfg: ExperimentConfig, n: int, m: int) -> bool:
    return cfg.experiment == "poa_pos" and (m + 1) ** n > cfg.enumeration_cap


def run_experiment(cfg: ExperimentConfig) -> SweepResult:
    tasks = []
    points = []
    for n, m in cfg.points():
        if _over_cap(cfg, n, m):
            points.append((n, m, None))
            continue
        start = len(tasks)
        tasks.extend((cfg, n, m, r) for r in range(cfg.realizations))
        points.append((n, m, (start, len(tasks))))

    if cfg.workers > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (4 * cfg.workers))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=chunk))
    else:
        results = [_task(t) for t in tasks]

    rows: list[SweepRow] = []
    samples: dict = {}
    for n, m, span in points:
        if span is None:
            rows.append(SweepRow(cfg.experiment, n, m, "", None, "error:enumeration_cap", math.nan, math.nan, 0,
                                 cfg.master_seed))
            continue
        block = results[span[0] : span[1]]
        for pname, pval, metric in _ordered_keys(block):
            vals = np.array([res[(pname, pval, metric)] for res in block], dtype=float)
            samples[(n, m, pname, pval, metric)] = vals
            good = vals[~np.isnan(vals)]
            mean = float(good.mean()) if len(good) else math.nan
            sd = float(good.std(ddof=1)) if len(good) > 1 else 0.0
            rows.append(SweepRow(cfg.experiment, n, m, pname, pval, metric, mean, sd, len(good), cfg.master_seed))
    return SweepResult(rows, samples)


def _ordered_keys(block: Iterable[dict]) -> list:
    seen: dict = {}
    for res in block:
        for k in res:
            seen.setdefault(k, None)
    return list(seen)


def run_poa_pos(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_as(cfg, "poa_pos"))


def run_brd_games(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_as(cfg, "brd_g1_g2"))


def run_brd_vs_q(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_as(cfg, "brd_vs_q"))


def run_tau_sweep(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_as(cfg, "tau_sweep"))


def run_epsilon_sweep(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_as(cfg, "epsilon_sweep"))


def run_iter_trace(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_as(cfg, "iter_trace"))


def run_pne_percentage(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_as(cfg, "pne_percentage"))


def run_algo_comparison(cfg: ExperimentConfig) -> SweepResult:
    return run_experiment(_as(cfg, "algo_comparison"))


def _as(cfg: ExperimentConfig, experiment: str) -> ExperimentConfig:
    if cfg.experiment != experiment:
        raise ValueError(f"config is for {cfg.experiment!r}, not {experiment!r}")
    return cfg
