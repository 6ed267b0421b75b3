"""Exact maximum association: branch-and-bound and a brute-force reference."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .equilibria import EnumerationCapError
from .instance import Instance
from .sinr import SILENT, is_feasible, matrix_to_profile, profile_to_matrix


@dataclass(frozen=True)
class OptimalSolution:
    count: int
    assignment: np.ndarray  # (M, N) association matrix

    @property
    def profile(self) -> tuple:
        return matrix_to_profile(self.assignment)


def solve_optimal(instance: Instance) -> OptimalSolution:
    """Depth-first branch-and-bound over SBSs in index order.

    Each SBS either serves an unused SU (lowest index first) or stays silent.
    A node is cut when even switching on every remaining SBS that has a usable
    SU cannot beat the incumbent, or when a committed link drops below the
    threshold. Interference only grows as SBSs are added, so the second cut
    never discards a feasible completion.
    """
    n_sbs, n_su = instance.num_sbs, instance.num_su
    p, s, h, beta = instance._p, instance._s, instance._h, instance.threshold

    # links that fail even without interference can never be used
    candidates = [[m for m in range(n_su) if p[n] * h[m][n] / s[n] >= beta] for n in range(n_sbs)]
    reachable_after = [0] * (n_sbs + 1)
    for n in range(n_sbs - 1, -1, -1):
        reachable_after[n] = reachable_after[n + 1] + (1 if candidates[n] else 0)

    assign = [SILENT] * n_sbs
    used = [False] * n_su
    interference = [0.0] * n_sbs  # per committed SBS, summed in index order
    links: list[int] = []  # committed SBS indices, ascending
    best = {"count": 0, "profile": tuple(assign)}

    def descend(k: int, count: int) -> None:
        if count + reachable_after[k] <= best["count"]:
            return
        if k == n_sbs:
            x = profile_to_matrix(assign, n_su)
            if is_feasible(instance, x):
                best["count"], best["profile"] = count, tuple(assign)
            return
        for m in candidates[k]:
            if used[m]:
                continue
            row = h[m]
            own = 0.0
            for j in links:
                own += p[j] * row[j]
            if p[k] * row[k] / (s[k] + own) < beta:
                continue
            extra = [interference[j] + p[k] * h[assign[j]][k] for j in links]
            if any(p[j] * h[assign[j]][j] / (s[j] + extra[i]) < beta for i, j in enumerate(links)):
                continue
            saved = [interference[j] for j in links]
            for i, j in enumerate(links):
                interference[j] = extra[i]
            interference[k] = own
            assign[k] = m
            used[m] = True
            links.append(k)
            descend(k + 1, count + 1)
            links.pop()
            used[m] = False
            assign[k] = SILENT
            for i, j in enumerate(links):
                interference[j] = saved[i]
        descend(k + 1, count)

    descend(0, 0)
    return OptimalSolution(best["count"], profile_to_matrix(best["profile"], n_su))


def exhaustive_optimal(instance: Instance, cap: int = 10**6) -> OptimalSolution:
    n_sbs, n_su = instance.num_sbs, instance.num_su
    total = (n_su + 1) ** n_sbs
    if total > cap:
        raise EnumerationCapError(f"instance too large for enumeration: {total} profiles exceed the cap of {cap}")
    best_count, best_x = 0, np.zeros((n_su, n_sbs), dtype=bool)
    for profile in itertools.product(list(range(n_su)) + [SILENT], repeat=n_sbs):
        active = [a for a in profile if a != SILENT]
        if len(active) <= best_count or len(set(active)) != len(active):
            continue
        x = profile_to_matrix(profile, n_su)
        if is_feasible(instance, x):
            best_count, best_x = len(active), x
    return OptimalSolution(best_count, best_x)
