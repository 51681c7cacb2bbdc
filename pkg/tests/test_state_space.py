"""State spaces, profiles, distributions, capacities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starrisk.state_space import (
    Capacity,
    DimensionError,
    DomainError,
    LossDistribution,
    LossProfile,
    StateSpace,
    distribution_of,
    pointwise_leq,
    quantile_breakpoints,
)


def test_state_space_validation():
    with pytest.raises(DomainError):
        StateSpace([0.5, 0.5, 0.1])  # mass 1.1
    with pytest.raises(DomainError):
        StateSpace([1.0, 0.0])  # zero weight
    with pytest.raises(DomainError):
        StateSpace([-0.5, 1.5])
    s = StateSpace.uniform(4)
    assert s.n == 4
    assert math.isclose(float(s.probs.sum()), 1.0, abs_tol=1e-12)


def test_profile_validation_and_arithmetic():
    s = StateSpace.uniform(3)
    with pytest.raises(DimensionError):
        LossProfile(s, [1.0, 2.0])
    with pytest.raises(DomainError):
        LossProfile(s, [1.0, float("nan"), 0.0])
    x = LossProfile(s, [1.0, -2.0, 3.0])
    y = 2.0 * x - 1.0
    assert np.allclose(y.values, [1.0, -5.0, 5.0])
    z = x + (-x)
    assert np.allclose(z.values, 0.0)


def test_pointwise_leq():
    s = StateSpace.uniform(2)
    a = LossProfile(s, [1.0, 2.0])
    assert pointwise_leq(a, a), "reflexivity"
    assert not pointwise_leq(LossProfile(s, [0.0, 3.0]), LossProfile(s, [1.0, 2.0]))
    assert pointwise_leq(LossProfile(s, [-1.0, 2.0]), LossProfile(s, [0.0, 2.0]))
    other = StateSpace.uniform(3)
    with pytest.raises(DimensionError):
        pointwise_leq(a, LossProfile(other, [0.0, 0.0, 0.0]))


def test_distribution_merges_equal_values():
    s = StateSpace([0.25, 0.25, 0.5])
    d = distribution_of(LossProfile(s, [2.0, 2.0, 5.0]))
    assert list(d.values) == [2.0, 5.0]
    assert np.allclose(d.probs, [0.5, 0.5])


def test_distribution_constant_law():
    s = StateSpace.uniform(5)
    d = distribution_of(LossProfile(s, [3.0] * 5))
    assert list(d.values) == [3.0]
    assert np.allclose(d.probs, [1.0])


def test_distribution_uniform_identity():
    s = StateSpace.uniform(4)
    d = distribution_of(LossProfile(s, [1.0, 2.0, 3.0, 4.0]))
    assert list(d.values) == [1.0, 2.0, 3.0, 4.0]
    assert np.allclose(d.probs, 0.25)


def test_quantile_breakpoints():
    d = LossDistribution([(1, 0.25), (2, 0.25), (3, 0.25), (4, 0.25)])
    assert np.allclose(quantile_breakpoints(d), [0.25, 0.5, 0.75])
    assert quantile_breakpoints(LossDistribution([(7.0, 1.0)])) == []
    d2 = LossDistribution([(0.0, 0.1), (10.0, 0.9)])
    assert np.allclose(quantile_breakpoints(d2), [0.1])


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-50, 50), min_size=1, max_size=6),
    st.randoms(use_true_random=False),
)
def test_distribution_permutation_invariant(values, rnd):
    n = len(values)
    s = StateSpace.uniform(n)
    perm = list(range(n))
    rnd.shuffle(perm)
    d1 = distribution_of(LossProfile(s, values))
    d2 = distribution_of(LossProfile(s, [values[i] for i in perm]))
    assert np.array_equal(d1.values, d2.values)
    assert np.allclose(d1.probs, d2.probs, atol=1e-12)
    assert math.isclose(float(d1.probs.sum()), 1.0, abs_tol=1e-12)


def test_capacity_validation_and_lookup():
    # k=2 additive capacity with weights (0.3, 0.7); masks 0b01, 0b10, 0b11.
    cap = Capacity(2, {0: 0.0, 1: 0.3, 2: 0.7, 3: 1.0})
    assert cap.of(0b01) == 0.3
    assert cap.of(0b11) == 1.0
    with pytest.raises(DomainError):
        Capacity(2, {0: 0.0, 1: 0.5, 2: 0.7, 3: 0.9})  # full set not 1
    with pytest.raises(DomainError):
        # {1} has larger capacity than {1,2}: not monotone.
        Capacity(3, {0: 0.0, 1: 0.8, 2: 0.1, 3: 0.5, 4: 0.1, 5: 0.9, 6: 0.2, 7: 1.0})
    with pytest.raises(DomainError):
        Capacity(0, {})
