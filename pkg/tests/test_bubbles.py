import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bubbletower import (
    Bubble,
    Partition,
    PartitionError,
    TowerConfig,
    project_bubble,
    project_dbubble,
    rate_schedule,
    validate_partition,
)
from bubbletower.bubbles import projection_expansion_error

import oracles


def test_bubble_values():
    u = Bubble(0.5)
    r = np.array([0.0, 0.5, 2.0])
    expected = oracles.ALPHA4 * 0.5 / (0.25 + r * r)
    assert np.allclose(u(r), expected, rtol=1e-15)


def test_bubble_rejects_nonpositive_scale():
    with pytest.raises(ValueError):
        Bubble(0.0)


def test_deriv_delta_matches_central_differences():
    u = Bubble(0.3)
    r = np.geomspace(1e-3, 10.0, 50)
    h = 1e-6
    fd = (Bubble(0.3 + h)(r) - Bubble(0.3 - h)(r)) / (2 * h)
    assert np.allclose(u.deriv_delta(r), fd, rtol=1e-8, atol=1e-12)


def test_projection_zero_trace():
    for delta, eps, outer in [(0.05, 1e-4, 1.0), (1e-3, 1e-6, 2.0), (0.3, 1e-2, 1.0)]:
        pu = project_bubble(delta, eps, outer)
        peak = oracles.ALPHA4 / delta
        assert abs(pu(eps)) < 1e-12 * peak
        assert abs(pu(outer)) < 1e-12 * peak


def test_projection_correction_is_harmonic_match():
    delta, eps, outer = 0.02, 1e-5, 1.0
    u = oracles.bubble(delta)
    c1, c2 = oracles.harmonic_match(eps, outer, u(eps), u(outer))
    pu = project_bubble(delta, eps, outer)
    r = np.geomspace(2 * eps, outer / 2, 40)
    assert np.allclose(pu(r), u(r) - c1 - c2 / r**2, rtol=1e-13)


def test_projection_below_bubble():
    # maximum principle: the subtracted harmonic part is nonnegative
    pu = project_bubble(0.05, 1e-4, 1.0)
    r = np.geomspace(1e-4, 1.0, 200)
    assert np.all(pu(r) <= Bubble(0.05)(r) + 1e-15)


@given(
    delta=st.floats(1e-3, 0.3),
    eps=st.floats(1e-7, 1e-5),
    outer=st.floats(0.5, 3.0),
)
@settings(max_examples=25, deadline=None)
def test_projection_trace_property(delta, eps, outer):
    pu = project_bubble(delta, eps, outer)
    peak = oracles.ALPHA4 / delta
    assert abs(pu(eps)) <= 1e-12 * peak
    assert abs(pu(outer)) <= 1e-12 * peak


def test_project_dbubble_is_scale_derivative():
    delta, eps, outer = 0.05, 1e-4, 1.0
    dpu = project_dbubble(delta, eps, outer)
    r = np.geomspace(2e-4, 0.9, 60)
    h1, h2 = 1e-4 * delta, 2e-4 * delta
    fd1 = (project_bubble(delta + h1, eps, outer)(r) - project_bubble(delta - h1, eps, outer)(r)) / (2 * h1)
    fd2 = (project_bubble(delta + h2, eps, outer)(r) - project_bubble(delta - h2, eps, outer)(r)) / (2 * h2)
    err1 = np.max(np.abs(dpu(r) - fd1))
    err2 = np.max(np.abs(dpu(r) - fd2))
    # second order in the step: quartering the error when halving h
    assert err2 > 3.0 * err1
    assert np.allclose(dpu(r), fd1, rtol=1e-6, atol=1e-9)


def test_rate_schedule_matches_formula():
    eps, k, d = 1e-5, 2, (1.1, 0.9)
    got = rate_schedule(eps, k, d)
    assert np.allclose(got, oracles.schedule(eps, k, d), rtol=1e-14)


def test_rate_schedule_k3():
    eps, k, d = 1e-6, 3, (1.0, 1.2, 0.8)
    assert np.allclose(rate_schedule(eps, k, d), oracles.schedule(eps, k, d), rtol=1e-14)


@given(loge=st.floats(-8, -3), k=st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_schedule_ratios_below_one(loge, k):
    # scale separation: eps < delta_k < ... < delta_1 once eps is small
    eps = 10.0**loge
    deltas = rate_schedule(eps, k, (1.0,) * k)
    ratios = np.append(deltas[1:] / deltas[:-1], eps / deltas[-1])
    assert np.all(ratios < 1.0)
    sharper = rate_schedule(eps / 10, k, (1.0,) * k)
    ratios2 = np.append(sharper[1:] / sharper[:-1], eps / 10 / sharper[-1])
    assert np.all(ratios2 < ratios)


def test_partition_conditions_each_rejected():
    ok = validate_partition(3, [[1, 3], [2]])
    assert ok == (frozenset({1, 3}), frozenset({2}))
    with pytest.raises(PartitionError) as e1:
        validate_partition(2, [[2], [1]])
    assert e1.value.condition == 1
    with pytest.raises(PartitionError) as e2:
        validate_partition(2, [[1, 2], []])
    assert e2.value.condition == 2
    with pytest.raises(PartitionError) as e3:
        validate_partition(3, [[1, 3], [2, 3]])
    assert e3.value.condition == 3
    with pytest.raises(PartitionError) as e4:
        validate_partition(3, [[1], [3]])
    assert e4.value.condition == 4
    with pytest.raises(PartitionError) as e5:
        validate_partition(2, [[1, 2]])
    assert e5.value.condition == 5


@given(k=st.integers(1, 6), m=st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_alternating_partition_always_valid(k, m):
    m = min(m, k) if k > 1 else 1
    if m == 1 and k > 1:
        m = 2
    p = Partition.alternating(k, m)
    assert p.k == k
    assert p.m == m
    for j in range(1, k + 1):
        assert j in p.groups[p.component_of(j)]


def test_tower_config_rejects_bad_inputs():
    part = Partition.alternating(2, 2)
    good = dict(outer=1.0, eps=1e-5, partition=part, beta=-1.0, mu=(1.0, 1.0), d=(1.0, 1.0))
    TowerConfig(**good)
    with pytest.raises(ValueError):
        TowerConfig(**{**good, "beta": 0.5})
    with pytest.raises(ValueError):
        TowerConfig(**{**good, "eps": 2.0})
    with pytest.raises(ValueError):
        TowerConfig(**{**good, "mu": (1.0, -1.0)})
    with pytest.raises(ValueError):
        TowerConfig(**{**good, "d": (1.0, 100.0)})


def test_component_callable_sums_group_bubbles():
    part = Partition.of(3, [[1, 3], [2]])
    cfg = TowerConfig(
        outer=1.0, eps=1e-6, partition=part, beta=-1.0,
        mu=(1.0, 1.0), d=(1.0, 1.0, 1.0),
    )
    deltas = cfg.deltas()
    r = np.geomspace(1e-5, 0.5, 30)
    w0 = cfg.component_callable(0)(r)
    expected = project_bubble(deltas[0], 1e-6, 1.0)(r) + project_bubble(deltas[2], 1e-6, 1.0)(r)
    assert np.allclose(w0, expected, rtol=1e-13)


def test_expansion_error_small_in_expected_window():
    # residual of the projection expansion stays under the stated envelope
    out = projection_expansion_error(0.05, 1e-4, 1.0)
    delta, eps = 0.05, 1e-4
    assert out["max_abs_far"] <= 10.0 * delta * (delta**2 + (eps / delta) ** 2)
