"""Sequential best response dynamics with random restarts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .equilibria import is_pne, social_welfare
from .games import PayoffOracle
from .instance import ConfigurationError, Seed


@dataclass(frozen=True)
class BrdConfig:
    max_rounds: int = 10
    restarts: int = 1
    # one probability vector per player, or a single vector shared by all;
    # None means uniform over each player's actions
    first_round_distribution: Sequence | None = None
    seed: Seed = field(default_factory=lambda: Seed(0))

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ConfigurationError("max_rounds must be >= 1")
        if self.restarts < 1:
            raise ConfigurationError("restarts must be >= 1")

    def distributions(self, oracle: PayoffOracle) -> list[np.ndarray]:
        counts = oracle.action_counts
        dist = self.first_round_distribution
        if dist is None:
            return [np.full(k, 1.0 / k) for k in counts]
        dist = [np.asarray(d, dtype=float) for d in dist]
        if dist and dist[0].ndim == 0:
            dist = [np.asarray(self.first_round_distribution, dtype=float)] * len(counts)
        if len(dist) != len(counts):
            raise ConfigurationError("need one first-round distribution per player")
        for d, k in zip(dist, counts):
            if d.shape != (k,) or np.any(d < 0) or abs(d.sum() - 1.0) > 1e-12:
                raise ConfigurationError("first-round distributions must be probability vectors over each action set")
        return dist


@dataclass(frozen=True)
class BrdOutcome:
    profile: tuple
    converged: bool
    rounds_used: int
    welfare: int


def best_responses(oracle: PayoffOracle, profile, n: int) -> list:
    pay = oracle.deviation_payoffs(profile, n)
    return [oracle.labels[n][k] for k in np.flatnonzero(pay == pay.max())]


def _as_rng(stream) -> np.random.Generator:
    if isinstance(stream, Seed):
        return stream.rng()
    if isinstance(stream, np.random.Generator):
        return stream
    raise TypeError("stream must be a Seed or a numpy Generator")


def first_round(oracle: PayoffOracle, config: BrdConfig, rng: np.random.Generator) -> tuple:
    return tuple(
        oracle.labels[n][int(rng.choice(len(d), p=d))]
        for n, d in enumerate(config.distributions(oracle))
    )


def brd_run(oracle: PayoffOracle, config: BrdConfig, stream, start=None) -> BrdOutcome:
    """One BRD execution.

    Players move in index order. A player whose current action is already a
    best response keeps it; otherwise it jumps to a uniformly random member of
    its best-response set. Stops after a round without moves or after
    ``max_rounds`` rounds. ``start`` overrides the random first round.
    """
    rng = _as_rng(stream)
    profile = list(first_round(oracle, config, rng) if start is None else start)
    oracle.validate_profile(profile)
    rounds = 0
    while rounds < config.max_rounds:
        moved = False
        for n in range(oracle.num_players):
            pay = oracle.deviation_payoffs(profile, n)
            top = pay.max()
            if pay[oracle.index_of(n, profile[n])] == top:
                continue
            best = np.flatnonzero(pay == top)
            profile[n] = oracle.labels[n][int(best[rng.integers(len(best))])]
            moved = True
        rounds += 1
        if not moved:
            break
    profile = tuple(profile)
    return BrdOutcome(profile, is_pne(oracle, profile), rounds, social_welfare(oracle, profile))


def brd_restarts(oracle: PayoffOracle, config: BrdConfig) -> list[BrdOutcome]:
    return [brd_run(oracle, config, config.seed.spawn(q)) for q in range(config.restarts)]


def select_best(outcomes: Sequence[BrdOutcome]) -> BrdOutcome:
    """Highest welfare among converged runs, else among all; earliest on ties."""
    pool = [o for o in outcomes if o.converged] or list(outcomes)
    return max(pool, key=lambda o: o.welfare)


def brd_multi(oracle: PayoffOracle, config: BrdConfig) -> BrdOutcome:
    return select_best(brd_restarts(oracle, config))
