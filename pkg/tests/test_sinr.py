import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hetsnet.instance import from_gain_matrix
from hetsnet.sinr import (
    SILENT,
    CollisionError,
    ContractError,
    deviation_sinrs,
    is_feasible,
    matrix_to_profile,
    player_deviation_sinrs,
    profile_sinrs,
    profile_to_matrix,
    sinr_of_link,
    sinr_of_player,
)

from conftest import instances

S = SILENT


def test_lone_transmitter(cx):
    assert sinr_of_player(cx, (0, S, S), 0) == 4.0


def test_two_diagonal_links(cx):
    assert sinr_of_player(cx, (0, 1, S), 1) == 2.0
    assert sinr_of_player(cx, (0, 1, S), 0) == pytest.approx(4 / 2.2, abs=1e-15)


def test_silent_player_has_no_sinr(cx):
    with pytest.raises(ContractError):
        sinr_of_player(cx, (S, 1, S), 0)


@pytest.mark.parametrize("profile", [(0, 1), (0, 1, 3), (0, 1, -2)])
def test_invalid_profile(cx, profile):
    with pytest.raises(ContractError):
        sinr_of_player(cx, profile, 0)


def test_link_view(cx):
    x = np.zeros((3, 3), dtype=bool)
    assert all(sinr_of_link(cx, x, m, n) == 0.0 for m in range(3) for n in range(3))
    x[0, 0] = True
    assert sinr_of_link(cx, x, 0, 0) == 4.0
    x[1, 1] = True
    assert sinr_of_link(cx, x, 1, 1) == 2.0
    with pytest.raises(ContractError):
        sinr_of_link(cx, x, 3, 0)


def test_feasibility(cx):
    assert is_feasible(cx, np.zeros((3, 3)))
    assert not is_feasible(cx, np.eye(3))
    single = np.zeros((3, 3))
    single[0, 0] = 1
    assert is_feasible(cx, single)
    double_row = np.zeros((3, 3))
    double_row[0, 0] = double_row[0, 1] = 1
    assert not is_feasible(cx, double_row)


def test_sole_transmitter_formula():
    inst = from_gain_matrix([[0.3, 0.7], [0.2, 0.5]], [3.0, 5.0], [0.5, 2.0], 1.0)
    assert sinr_of_player(inst, (S, 1), 1) == 5.0 * 0.5 / 2.0


def test_matrix_conversion():
    assert not profile_to_matrix((S, S, S), 4).any()
    x = profile_to_matrix((2, S, 0), 3)
    assert matrix_to_profile(x) == (2, S, 0)
    with pytest.raises(CollisionError) as err:
        profile_to_matrix((0, 0), 2)
    assert err.value.pair == (0, 1)


@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_matrix_profile_bijection(n, m, data):
    users = data.draw(st.permutations(list(range(m)) + [S] * n))
    profile = tuple(users[:n])
    assert matrix_to_profile(profile_to_matrix(profile, m)) == profile


def _collision_free(n, m):
    for prof in itertools.product(list(range(m)) + [S], repeat=n):
        active = [a for a in prof if a != S]
        if len(set(active)) == len(active):
            yield prof


@given(instances(max_sbs=3, max_su=4))
def test_profile_and_link_views_agree_exactly(inst):
    for prof in _collision_free(inst.num_sbs, inst.num_su):
        x = profile_to_matrix(prof, inst.num_su)
        for n, a in enumerate(prof):
            if a != S:
                assert sinr_of_player(inst, prof, n) == sinr_of_link(inst, x, a, n)


@given(instances(max_sbs=4, max_su=4), st.data())
def test_vectorized_matches_scalar(inst, data):
    n, m = inst.num_sbs, inst.num_su
    prof = tuple(data.draw(st.lists(st.integers(-1, m - 1), min_size=n, max_size=n)))
    batch = profile_sinrs(inst, np.array([prof]))[0]
    for k, a in enumerate(prof):
        if a == S:
            assert batch[k] == 0.0
        else:
            assert batch[k] == sinr_of_player(inst, prof, k)
    dev = deviation_sinrs(inst, prof)
    for k in range(n):
        assert np.array_equal(dev[k], player_deviation_sinrs(inst, prof, k))
        for u in range(m):
            alt = list(prof)
            alt[k] = u
            assert dev[k, u] == sinr_of_player(inst, tuple(alt), k)


@given(instances(min_sbs=2, max_sbs=4, max_su=4), st.data())
def test_extra_transmitter_never_helps(inst, data):
    n, m = inst.num_sbs, inst.num_su
    prof = list(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)))
    j = data.draw(st.integers(0, n - 1))
    quiet = prof.copy()
    quiet[j] = S
    for k in range(n):
        if k != j:
            assert sinr_of_player(inst, tuple(prof), k) <= sinr_of_player(inst, tuple(quiet), k)


@given(instances(max_sbs=4, max_su=4), st.floats(1e-3, 1e3), st.data())
def test_joint_power_noise_scaling(inst, c, data):
    n, m = inst.num_sbs, inst.num_su
    prof = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)))
    scaled = from_gain_matrix(inst.gain, inst.power * c, inst.noise * c, inst.threshold)
    for k in range(n):
        a, b = sinr_of_player(inst, prof, k), sinr_of_player(scaled, prof, k)
        assert abs(a - b) <= 1e-12 * abs(a)
