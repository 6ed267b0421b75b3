"""Payoffs of the three association games behind a common oracle interface.

An oracle works on profiles expressed in *labels*: user indices (plus
``SILENT`` for game G) for instance-backed oracles, arbitrary hashables for
table-backed ones. ``payoff_tensor`` and the enumeration helpers work in
*index* space, where the k-th label of a player has index k.
"""

from __future__ import annotations

import enum
from typing import Hashable, Sequence

import numpy as np

from .instance import Instance
from .sinr import SILENT, ContractError, check_profile, deviation_sinrs, player_deviation_sinrs, profile_sinrs, sinr_of_player


class GameKind(enum.Enum):
    G1 = "g1"
    G2 = "g2"
    G = "g"


def _no_silent(profile: Sequence[int]) -> None:
    if any(a == SILENT for a in profile):
        raise ContractError("games G1 and G2 have no silence action")


def _collides(profile: Sequence[int], n: int) -> bool:
    a = profile[n]
    return any(j != n and b == a for j, b in enumerate(profile))


def payoff_g1(instance: Instance, profile: Sequence[int], n: int) -> int:
    _no_silent(profile)
    return 1 if sinr_of_player(instance, profile, n) >= instance.threshold else -1


def payoff_g2(instance: Instance, profile: Sequence[int], n: int) -> int:
    _no_silent(profile)
    if _collides(profile, n):
        return -2
    return 1 if sinr_of_player(instance, profile, n) >= instance.threshold else -1


def payoff_g(instance: Instance, profile: Sequence[int], n: int) -> int:
    check_profile(instance, profile)
    if profile[n] == SILENT:
        return 0
    if _collides(profile, n):
        return -1
    return 1 if sinr_of_player(instance, profile, n) >= instance.threshold else -1


def potential_g1(instance: Instance, profile: Sequence[int]) -> int:
    return sum(payoff_g1(instance, profile, n) for n in range(instance.num_sbs))


_PAYOFF = {GameKind.G1: payoff_g1, GameKind.G2: payoff_g2, GameKind.G: payoff_g}


class PayoffOracle:
    """Maps (profile, player) to an integer payoff."""

    num_players: int
    labels: list[list[Hashable]]

    @property
    def action_counts(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.labels)

    @property
    def num_profiles(self) -> int:
        return int(np.prod(self.action_counts, dtype=object))

    def index_of(self, n: int, label) -> int:
        return self._index[n][label]

    def to_indices(self, profile) -> tuple[int, ...]:
        return tuple(self._index[n][a] for n, a in enumerate(profile))

    def to_labels(self, indices) -> tuple:
        return tuple(self.labels[n][int(k)] for n, k in enumerate(indices))

    def validate_profile(self, profile) -> None:
        if len(profile) != self.num_players:
            raise ContractError(f"profile has {len(profile)} entries, game has {self.num_players} players")
        for n, a in enumerate(profile):
            if a not in self._index[n]:
                raise ContractError(f"player {n} has no action {a!r}")

    def payoff(self, profile, n: int) -> int:
        raise NotImplementedError

    def payoffs(self, profile) -> list[int]:
        return [self.payoff(profile, n) for n in range(self.num_players)]

    def deviation_payoffs(self, profile, n: int) -> np.ndarray:
        """Payoff of player ``n`` for each of its actions (index order), others fixed."""
        out = []
        profile = list(profile)
        for label in self.labels[n]:
            profile_n = profile.copy()
            profile_n[n] = label
            out.append(self.payoff(tuple(profile_n), n))
        return np.array(out, dtype=np.int64)

    def payoff_tensor(self) -> np.ndarray:
        """Array of shape ``(*action_counts, N)`` holding every payoff."""
        raise NotImplementedError

    def _build_index(self) -> None:
        self._index = [{a: k for k, a in enumerate(acts)} for acts in self.labels]


class InstanceOracle(PayoffOracle):
    def __init__(self, kind: GameKind, instance: Instance, chunk: int = 1 << 16):
        self.kind = GameKind(kind)
        self.instance = instance
        self.num_players = instance.num_sbs
        users = list(range(instance.num_su))
        acts = users + [SILENT] if self.kind is GameKind.G else users
        self.labels = [list(acts) for _ in range(self.num_players)]
        self._chunk = chunk
        self._build_index()

    def payoff(self, profile, n: int) -> int:
        return _PAYOFF[self.kind](self.instance, profile, n)

    def deviation_payoffs(self, profile, n: int) -> np.ndarray:
        inst = self.instance
        g = self.kind is GameKind.G
        if not g:
            _no_silent(profile)
        sinr = player_deviation_sinrs(inst, profile, n, everyone_interferes=not g)
        out = np.where(sinr >= inst.threshold, 1, -1).astype(np.int64)
        if self.kind is not GameKind.G1:
            others = [a for j, a in enumerate(profile) if j != n and a != SILENT]
            out[others] = -2 if self.kind is GameKind.G2 else -1
        if g:
            out = np.append(out, 0)
        return out

    def all_deviation_payoffs(self, profile) -> np.ndarray:
        """``(N, |A|)`` payoffs for every player and every own action, others fixed."""
        inst = self.instance
        g = self.kind is GameKind.G
        if not g:
            _no_silent(profile)
        sinr = deviation_sinrs(inst, profile, everyone_interferes=not g)
        ok = sinr >= inst.threshold
        out = np.where(ok, 1, -1).astype(np.int64)
        if self.kind is not GameKind.G1:
            # taken[n, k]: some player other than n already serves SU k
            own = np.zeros((self.num_players, inst.num_su), dtype=np.int64)
            for j, a in enumerate(profile):
                if a != SILENT:
                    own[j, a] = 1
            taken = own.sum(axis=0)[None, :] - own > 0
            out = np.where(taken, -2 if self.kind is GameKind.G2 else -1, out)
        if g:
            out = np.concatenate([out, np.zeros((self.num_players, 1), dtype=np.int64)], axis=1)
        return out

    def payoffs_many(self, profiles: np.ndarray) -> np.ndarray:
        """Payoffs for a ``(K, N)`` array of label profiles."""
        inst = self.instance
        profiles = np.asarray(profiles)
        g = self.kind is GameKind.G
        sinr = profile_sinrs(inst, profiles, everyone_interferes=not g)
        out = np.where(sinr >= inst.threshold, 1, -1).astype(np.int8)
        if self.kind is not GameKind.G1:
            k, n_sbs = profiles.shape
            for n in range(n_sbs):
                hit = np.zeros(k, dtype=bool)
                for j in range(n_sbs):
                    if j != n:
                        hit |= profiles[:, j] == profiles[:, n]
                if g:
                    hit &= profiles[:, n] != SILENT
                out[hit, n] = -2 if self.kind is GameKind.G2 else -1
        if g:
            out[profiles == SILENT] = 0
        return out

    def payoff_tensor(self) -> np.ndarray:
        counts = self.action_counts
        total = self.num_profiles
        lookup = np.array(self.labels[0])
        flat = np.empty((total, self.num_players), dtype=np.int8)
        for start in range(0, total, self._chunk):
            idx = np.arange(start, min(total, start + self._chunk))
            ind = np.stack(np.unravel_index(idx, counts), axis=1)
            flat[start : start + len(idx)] = self.payoffs_many(lookup[ind])
        return flat.reshape(*counts, self.num_players)


class TableOracle(PayoffOracle):
    def __init__(self, tensor, labels: Sequence[Sequence[Hashable]] | None = None):
        tensor = np.asarray(tensor)
        if tensor.ndim < 2:
            raise ContractError("payoff table needs one axis per player plus a payoff axis")
        if not np.issubdtype(tensor.dtype, np.integer):
            if not np.array_equal(tensor, np.round(tensor)):
                raise ContractError("payoff table entries must be integers")
            tensor = tensor.astype(np.int64)
        n = tensor.ndim - 1
        if tensor.shape[-1] != n:
            raise ContractError(f"payoff axis has length {tensor.shape[-1]}, expected {n} players")
        if labels is None:
            labels = [list(range(k)) for k in tensor.shape[:-1]]
        labels = [list(a) for a in labels]
        if len(labels) != n or tuple(len(a) for a in labels) != tensor.shape[:-1]:
            raise ContractError("action labels do not match the table shape")
        if any(len(set(a)) != len(a) for a in labels):
            raise ContractError("action labels must be distinct per player")
        self.num_players = n
        self.labels = labels
        self._tensor = tensor
        self._tensor.setflags(write=False)
        self._build_index()

    def payoff(self, profile, n: int) -> int:
        self.validate_profile(profile)
        return int(self._tensor[self.to_indices(profile)][n])

    def payoff_tensor(self) -> np.ndarray:
        return self._tensor


def make_oracle(kind: GameKind | str, instance: Instance) -> InstanceOracle:
    return InstanceOracle(GameKind(kind), instance)


def table_oracle(tensor, labels=None) -> TableOracle:
    return TableOracle(tensor, labels)


def bimatrix_example() -> TableOracle:
    """Two SBSs, two SUs: PoS 1, PoA 1/2, and BRD can still end at the bad PNE."""
    rows = {
        ("u1", "u1"): (-1, -1), ("u1", "u2"): (1, 1), ("u1", "s"): (1, 0),
        ("u2", "u1"): (1, -1), ("u2", "u2"): (-1, -1), ("u2", "s"): (1, 0),
        ("s", "u1"): (0, 1), ("s", "u2"): (0, 1), ("s", "s"): (0, 0),
    }
    acts = ["u1", "u2", "s"]
    tensor = np.zeros((3, 3, 2), dtype=np.int64)
    for (a, b), pay in rows.items():
        tensor[acts.index(a), acts.index(b)] = pay
    return TableOracle(tensor, [acts, acts])


def associated_count(oracle: PayoffOracle, profile) -> int:
    """Distinct SUs served by players whose payoff is 1."""
    served = {profile[n] for n, u in enumerate(oracle.payoffs(profile)) if u == 1}
    return len(served)
