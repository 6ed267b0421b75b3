import numpy as np
import pytest
from hypothesis import given, strategies as st

from hetsnet.equilibria import EnumerationCapError, poa_pos
from hetsnet.games import GameKind, make_oracle
from hetsnet.instance import from_gain_matrix, generate_instance, GeometryConfig, Seed
from hetsnet.optimal import exhaustive_optimal, solve_optimal
from hetsnet.sinr import is_feasible

from conftest import instances, random_instances


def test_counterexample_optimum(cx):
    assert solve_optimal(cx).count == 1
    assert exhaustive_optimal(cx).count == 1


@pytest.mark.parametrize("gain,count", [(4.0, 1), (1.0, 0)])
def test_single_link(gain, count):
    inst = from_gain_matrix([[gain]], [1.0], [1.0], 2.0)
    assert solve_optimal(inst).count == count
    assert exhaustive_optimal(inst).count == count


def test_zero_gains():
    inst = from_gain_matrix(np.zeros((3, 2)), [1.0, 1.0], [1.0, 1.0], 1.0)
    assert exhaustive_optimal(inst).count == 0
    assert solve_optimal(inst).count == 0


def test_tiny_threshold_serves_everyone():
    inst = generate_instance(GeometryConfig(), 3, 4, threshold_db=-200, seed=Seed(2))
    assert exhaustive_optimal(inst).count == 3
    assert solve_optimal(inst).count == 3


def test_exhaustive_cap():
    inst = generate_instance(GeometryConfig(), 8, 8, seed=Seed(0))
    with pytest.raises(EnumerationCapError):
        exhaustive_optimal(inst)


def test_random_4x4_agree():
    for inst in random_instances(40, 4, 4, master=4, n_min=4, m_min=4):
        assert solve_optimal(inst).count == exhaustive_optimal(inst).count


@given(instances(max_sbs=5, max_su=5))
def test_solution_is_feasible_and_counted(inst):
    sol = solve_optimal(inst)
    assert is_feasible(inst, sol.assignment)
    assert int(sol.assignment.sum()) == sol.count
    assert sol.count == exhaustive_optimal(inst).count


@given(instances(max_sbs=4, max_su=4), st.floats(0.1, 10.0))
def test_threshold_anti_monotone(inst, factor):
    stricter = from_gain_matrix(inst.gain, inst.power, inst.noise, inst.threshold * (1 + factor))
    assert solve_optimal(stricter).count <= solve_optimal(inst).count


@given(instances(max_sbs=4, max_su=4))
def test_best_equilibrium_below_optimum(inst):
    rep = poa_pos(make_oracle(GameKind.G, inst))
    opt = solve_optimal(inst).count
    assert rep.max_welfare == opt
    if rep.num_pne:
        assert max(rep.welfare_per_pne) <= opt
        if rep.pos == 1.0:
            assert max(rep.welfare_per_pne) == opt
