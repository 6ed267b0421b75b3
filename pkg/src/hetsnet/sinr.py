"""SINR evaluation in the profile (game) view and the matrix (optimization) view.

Interference is always accumulated in increasing SBS index, starting from
0.0, and the noise is added last. Every code path here, scalar or
vectorized, follows that order, so the two views agree bit-for-bit.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .instance import Instance

SILENT = -1

ActionProfile = tuple  # tuple[int, ...]; SILENT marks a non-transmitting SBS


class ContractError(ValueError):
    pass


class CollisionError(ValueError):
    def __init__(self, first: int, second: int, user: int):
        self.pair = (first, second)
        self.user = user
        super().__init__(f"SBSs {first} and {second} both choose SU {user}")


def check_profile(instance: Instance, profile: Sequence[int]) -> None:
    if len(profile) != instance.num_sbs:
        raise ContractError(f"profile has {len(profile)} entries, instance has {instance.num_sbs} SBSs")
    for n, a in enumerate(profile):
        if a != SILENT and not 0 <= a < instance.num_su:
            raise ContractError(f"SBS {n} plays invalid user index {a}")


def sinr_of_player(instance: Instance, profile: Sequence[int], n: int) -> float:
    """SINR of SBS ``n`` at its chosen SU; only non-silent SBSs interfere."""
    check_profile(instance, profile)
    m = profile[n]
    if m == SILENT:
        raise ContractError(f"SBS {n} is silent and has no SINR")
    p, s, h = instance._p, instance._s, instance._h
    row = h[m]
    interference = 0.0
    for j, a in enumerate(profile):
        if j != n and a != SILENT:
            interference += p[j] * row[j]
    return p[n] * row[n] / (s[n] + interference)


def _check_matrix(instance: Instance, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (instance.num_su, instance.num_sbs):
        raise ContractError(f"association matrix has shape {x.shape}, expected {(instance.num_su, instance.num_sbs)}")
    return x.astype(bool)


def sinr_of_link(instance: Instance, x, m: int, n: int) -> float:
    x = _check_matrix(instance, x)
    if not (0 <= m < instance.num_su and 0 <= n < instance.num_sbs):
        raise ContractError(f"link ({m}, {n}) out of range")
    if not x[m, n]:
        return 0.0
    p, s, h = instance._p, instance._s, instance._h
    interference = 0.0
    # outer loop over SBSs keeps the profile-view summation order
    for j in range(instance.num_sbs):
        if j == n:
            continue
        for i in range(instance.num_su):
            if i != m and x[i, j]:
                interference += p[j] * h[m][j]
    return p[n] * h[m][n] / (s[n] + interference)


def matrix_is_valid(x) -> bool:
    x = np.asarray(x).astype(bool)
    return bool(np.all(x.sum(axis=0) <= 1) and np.all(x.sum(axis=1) <= 1))


def is_feasible(instance: Instance, x) -> bool:
    x = _check_matrix(instance, x)
    if not matrix_is_valid(x):
        return False
    beta = instance.threshold
    for m, n in zip(*np.nonzero(x)):
        if sinr_of_link(instance, x, int(m), int(n)) < beta:
            return False
    return True


def profile_to_matrix(profile: Sequence[int], num_su: int) -> np.ndarray:
    x = np.zeros((num_su, len(profile)), dtype=bool)
    owner: dict[int, int] = {}
    for n, m in enumerate(profile):
        if m == SILENT:
            continue
        if m in owner:
            raise CollisionError(owner[m], n, m)
        owner[m] = n
        x[m, n] = True
    return x


def matrix_to_profile(x) -> ActionProfile:
    x = np.asarray(x).astype(bool)
    if not matrix_is_valid(x):
        raise ContractError("association matrix violates the one-to-one constraints")
    profile = [SILENT] * x.shape[1]
    for m, n in zip(*np.nonzero(x)):
        profile[int(n)] = int(m)
    return tuple(profile)


def profile_sinrs(instance: Instance, profiles: np.ndarray, everyone_interferes: bool = False) -> np.ndarray:
    """SINR of every player in every profile of a ``(K, N)`` integer array.

    Silent players get 0. With ``everyone_interferes`` all other SBSs count as
    interferers regardless of their action (the G1/G2 convention).
    """
    profiles = np.asarray(profiles)
    k, n_sbs = profiles.shape
    p, s, gain = instance.power, instance.noise, instance.gain
    active = profiles != SILENT
    users = np.where(active, profiles, 0)
    out = np.zeros((k, n_sbs))
    for n in range(n_sbs):
        rows = gain[users[:, n]]
        interference = np.zeros(k)
        for j in range(n_sbs):
            if j == n:
                continue
            term = p[j] * rows[:, j]
            if everyone_interferes:
                interference += term
            else:
                interference += np.where(active[:, j], term, 0.0)
        out[:, n] = np.where(active[:, n], p[n] * rows[:, n] / (s[n] + interference), 0.0)
    return out


def deviation_sinrs(instance: Instance, profile: Sequence[int], everyone_interferes: bool = False) -> np.ndarray:
    """``(N, M)`` array: SINR player ``n`` would get by serving SU ``k``, others fixed."""
    n_sbs = instance.num_sbs
    p, s, gain = instance.power, instance.noise, instance.gain
    active = np.array([a != SILENT for a in profile])
    if everyone_interferes:
        active[:] = True
    include = np.logical_and(active[None, :], ~np.eye(n_sbs, dtype=bool))
    interference = np.zeros((n_sbs, instance.num_su))
    for j in range(n_sbs):
        term = p[j] * gain[:, j]
        interference += np.where(include[:, j, None], term[None, :], 0.0)
    return (p[:, None] * gain.T) / (s[:, None] + interference)


def player_deviation_sinrs(instance: Instance, profile: Sequence[int], n: int, everyone_interferes: bool = False) -> np.ndarray:
    """Row ``n`` of :func:`deviation_sinrs`, computed alone."""
    p, s, gain = instance.power, instance.noise, instance.gain
    interference = np.zeros(instance.num_su)
    for j, a in enumerate(profile):
        if j != n and (everyone_interferes or a != SILENT):
            interference += p[j] * gain[:, j]
    return p[n] * gain[:, n] / (s[n] + interference)
