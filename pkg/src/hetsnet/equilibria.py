"""Exhaustive pure-equilibrium search, social welfare, and PoA/PoS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import InstanceOracle, PayoffOracle

DEFAULT_CAP = 10**7


class EnumerationCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class EquilibriumReport:
    pne_profiles: list
    welfare_per_pne: list[int]
    max_welfare: int
    argmax_profile: tuple
    poa: float | None
    pos: float | None

    @property
    def num_pne(self) -> int:
        return len(self.pne_profiles)


def _deviations(oracle: PayoffOracle, profile) -> list[np.ndarray]:
    if isinstance(oracle, InstanceOracle):
        return list(oracle.all_deviation_payoffs(profile))
    return [oracle.deviation_payoffs(profile, n) for n in range(oracle.num_players)]


def is_pne(oracle: PayoffOracle, profile) -> bool:
    oracle.validate_profile(profile)
    for n, dev in enumerate(_deviations(oracle, profile)):
        if dev.max() > dev[oracle.index_of(n, profile[n])]:
            return False
    return True


def social_welfare(oracle: PayoffOracle, profile) -> int:
    return int(sum(oracle.payoffs(profile)))


def _check_cap(oracle: PayoffOracle, cap: int) -> None:
    if oracle.num_profiles > cap:
        raise EnumerationCapError(
            f"instance too large for enumeration: {oracle.num_profiles} profiles exceed the cap of {cap}"
        )


def _pne_mask(tensor: np.ndarray) -> np.ndarray:
    n_players = tensor.shape[-1]
    mask = np.ones(tensor.shape[:-1], dtype=bool)
    for n in range(n_players):
        pay = tensor[..., n]
        mask &= pay == pay.max(axis=n, keepdims=True)
    return mask


def find_all_pne(oracle: PayoffOracle, cap: int = DEFAULT_CAP) -> list:
    """Every pure Nash equilibrium, in lexicographic order of action indices."""
    _check_cap(oracle, cap)
    mask = _pne_mask(oracle.payoff_tensor())
    return [oracle.to_labels(ind) for ind in zip(*np.nonzero(mask))]


def poa_pos(oracle: PayoffOracle, cap: int = DEFAULT_CAP) -> EquilibriumReport:
    _check_cap(oracle, cap)
    tensor = oracle.payoff_tensor()
    welfare = tensor.sum(axis=-1, dtype=np.int64)
    best = int(welfare.max())
    argmax = oracle.to_labels(np.unravel_index(int(np.argmax(welfare)), welfare.shape))
    idx = list(zip(*np.nonzero(_pne_mask(tensor))))
    profiles = [oracle.to_labels(i) for i in idx]
    values = [int(welfare[i]) for i in idx]
    if not profiles:
        poa = pos = None
    elif best == 0:
        # every profile ties at zero welfare, so any PNE is optimal
        poa = pos = 1.0
    else:
        poa, pos = min(values) / best, max(values) / best
    return EquilibriumReport(profiles, values, best, argmax, poa, pos)
