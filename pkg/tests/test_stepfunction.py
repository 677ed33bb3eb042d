import numpy as np
import pytest
from hypothesis import given, strategies as st

from recurrent_mean.stepfunction import StepFunction


def test_right_continuity_and_left_limit():
    f = StepFunction([1.0, 2.0], [0.5, 0.75], initial=0.1)
    assert f(0) == 0.1
    assert f(1.0) == 0.5
    assert f.left_limit(1.0) == 0.1
    assert f(1.999) == 0.5
    assert f(2.0) == 0.75
    assert f.left_limit(2.0) == 0.5
    assert f(100) == 0.75
    assert f(np.array([0.5, 1.5, 2.5])).tolist() == [0.1, 0.5, 0.75]


def test_constant_and_empty():
    f = StepFunction.constant(0.0)
    assert f(5.0) == 0.0
    assert f.left_limit(5.0) == 0.0
    assert len(f) == 0


def test_rejects_unsorted_breakpoints():
    with pytest.raises(ValueError):
        StepFunction([2.0, 1.0], [0, 0])
    with pytest.raises(ValueError):
        StepFunction([1.0, 1.0], [0, 0])
    with pytest.raises(ValueError):
        StepFunction([1.0], [0, 0])


def test_immutable():
    f = StepFunction([1.0], [1.0])
    with pytest.raises(AttributeError):
        f.initial = 3
    with pytest.raises(ValueError):
        f.values[0] = 2.0


@given(
    st.lists(st.floats(0.01, 100), min_size=1, max_size=20, unique=True),
    st.floats(-5, 5),
)
def test_left_limit_matches_small_offset(points, initial):
    bp = sorted(points)
    vals = np.arange(len(bp), dtype=float)
    f = StepFunction(bp, vals, initial)
    gap = min(np.diff(bp)) if len(bp) > 1 else 1.0
    eps = min(gap, bp[0]) / 4
    for t in bp:
        assert f.left_limit(t) == f(t - eps)


def test_addition():
    f = StepFunction([1.0], [1.0]) + StepFunction([2.0], [2.0], 0.5)
    assert f.breakpoints.tolist() == [1.0, 2.0]
    assert f(0) == 0.5 and f(1) == 1.5 and f(2) == 3.0
