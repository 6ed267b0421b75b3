"""Modified win-stay-lose-shift learning for the game with silence.

The learner never touches the channel. Each iteration the radio environment
hands every SBS an :class:`Observation` holding its own action, the one-bit
SINR feedback of the SU it served, and the broadcast list of all chosen
actions. Rewards and policy updates are computed from that record alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .equilibria import is_pne
from .games import GameKind, make_oracle
from .instance import ConfigurationError, Instance, Seed
from .sinr import SILENT, ContractError, sinr_of_player

ROW_TOL = 1e-9


@dataclass(frozen=True)
class LearningConfig:
    tau: float = 0.1
    epsilon: float = 0.01
    iterations: int = 100
    seed: Seed = field(default_factory=lambda: Seed(0))

    def __post_init__(self):
        if not 0 < self.tau < 1:
            raise ConfigurationError("tau must lie in (0, 1)")
        if not 0 < self.epsilon < 1:
            raise ConfigurationError("epsilon must lie in (0, 1)")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")


@dataclass(frozen=True)
class Observation:
    action: int
    feedback: int | None  # 1 if the served SU met the threshold, 0 if not, None when silent
    broadcast: tuple


class RadioEnvironment:
    """Plays a joint profile over the channel and returns per-SBS observations."""

    def __init__(self, instance: Instance):
        self._instance = instance

    @property
    def num_sbs(self) -> int:
        return self._instance.num_sbs

    @property
    def num_su(self) -> int:
        return self._instance.num_su

    def observe(self, profile) -> list[Observation]:
        profile = tuple(int(a) for a in profile)
        beta = self._instance.threshold
        out = []
        for n, a in enumerate(profile):
            if a == SILENT:
                bit = None
            else:
                bit = int(sinr_of_player(self._instance, profile, n) >= beta)
            out.append(Observation(a, bit, profile))
        return out


def reward_from_observation(obs: Observation) -> int:
    if obs.action == SILENT:
        return 0
    if obs.broadcast.count(obs.action) > 1:
        return -1
    return 1 if obs.feedback == 1 else -1


def reward(instance: Instance, profile, n: int) -> int:
    return reward_from_observation(RadioEnvironment(instance).observe(profile)[n])


def _check_row(row: np.ndarray) -> None:
    if row.ndim != 1 or np.any(row < -ROW_TOL) or np.any(row > 1 + ROW_TOL) or abs(row.sum() - 1.0) > ROW_TOL:
        raise ContractError("policy row is not a probability vector")


def update_policy(row, action: int, reward: int, tau: float, epsilon: float) -> np.ndarray:
    """One win/lose update of a probability row whose last entry is silence.

    ``action`` is a column index. A losing action hands at most its own mass
    (and at most ``epsilon``) to the silence entry.
    """
    row = np.array(row, dtype=float)
    _check_row(row)
    if not 0 <= action < len(row):
        raise ContractError(f"action index {action} out of range")
    if reward == 1:
        new = row * (1.0 - tau)
        new[action] = row[action] + tau * (1.0 - row[action])
    elif reward == -1:
        silent = len(row) - 1
        if action == silent:
            raise ContractError("silence cannot lose")
        moved = min(epsilon, row[action])
        new = row.copy()
        new[action] = row[action] - moved
        new[silent] = row[silent] + moved
    elif reward == 0:
        return row
    else:
        raise ContractError(f"reward must be -1, 0 or 1, got {reward}")
    return np.clip(new, 0.0, 1.0)


def sample_actions(policy: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Column index drawn independently from every row."""
    cum = np.cumsum(policy, axis=1)
    target = rng.random(policy.shape[0])[:, None] * cum[:, -1:]
    return (cum <= target).sum(axis=1)


@dataclass
class LearningTrace:
    profiles: np.ndarray  # (T, N) with SILENT for silence
    rewards: np.ndarray  # (T, N)
    welfare: np.ndarray  # (T,)
    is_pne: np.ndarray  # (T,) bool, against game G
    policy: np.ndarray  # final (N, M+1)
    final_profile: tuple

    @property
    def associated(self) -> np.ndarray:
        """Per-iteration number of SBSs that won."""
        return (self.rewards == 1).sum(axis=1)

    def pne_fraction(self, window: str = "full") -> float:
        flags = self.is_pne
        if window == "last_half":
            flags = flags[len(flags) // 2 :]
        elif window != "full":
            raise ValueError(f"unknown window {window!r}")
        return float(flags.mean())


def mwsls_run(instance: Instance, config: LearningConfig, track_pne: bool = True) -> LearningTrace:
    env = RadioEnvironment(instance)
    oracle = make_oracle(GameKind.G, instance) if track_pne else None
    rng = config.seed.rng()
    n_sbs, n_su = env.num_sbs, env.num_su
    policy = np.full((n_sbs, n_su + 1), 1.0 / (n_su + 1))
    steps = config.iterations
    profiles = np.empty((steps, n_sbs), dtype=np.int64)
    rewards = np.empty((steps, n_sbs), dtype=np.int64)
    flags = np.zeros(steps, dtype=bool)
    for t in range(steps):
        cols = sample_actions(policy, rng)
        profile = tuple(SILENT if c == n_su else int(c) for c in cols)
        obs = env.observe(profile)
        r = [reward_from_observation(o) for o in obs]
        for n in range(n_sbs):
            if r[n] != 0:
                policy[n] = update_policy(policy[n], int(cols[n]), r[n], config.tau, config.epsilon)
        profiles[t] = profile
        rewards[t] = r
        if oracle is not None:
            flags[t] = is_pne(oracle, profile)
    return LearningTrace(
        profiles=profiles,
        rewards=rewards,
        welfare=rewards.sum(axis=1),
        is_pne=flags,
        policy=policy,
        final_profile=extract_assignment(policy, instance),
    )


def extract_assignment(policy, instance: Instance | None = None) -> tuple:
    """Row-wise argmax (silence is the last column), then collision silencing.

    Among SBSs that picked the same SU, the one with the largest row maximum
    keeps it (lowest index on ties); the others go silent.
    """
    policy = np.asarray(policy, dtype=float)
    n_su = policy.shape[1] - 1
    if instance is not None and (policy.shape != (instance.num_sbs, n_su + 1) or instance.num_su != n_su):
        raise ContractError("policy shape does not match the instance")
    for row in policy:
        _check_row(row)
    choice = policy.argmax(axis=1)
    peak = policy.max(axis=1)
    profile = [SILENT if c == n_su else int(c) for c in choice]
    for m in set(a for a in profile if a != SILENT):
        owners = [n for n, a in enumerate(profile) if a == m]
        if len(owners) > 1:
            keep = max(owners, key=lambda n: (peak[n], -n))
            for n in owners:
                if n != keep:
                    profile[n] = SILENT
    return tuple(profile)
