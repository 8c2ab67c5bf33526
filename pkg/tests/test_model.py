import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from privcomm import (
    CorrelationBoundError,
    NegativeCorrelationError,
    NonPositiveVarianceError,
    gaussian_conditional_entropy,
    privacy_bounds,
    validate_model,
)

from conftest import source_models


def test_valid_model():
    m = validate_model(1.0, 0.6, 1.0)
    assert (m.sigma_x2, m.rho, m.r) == (1.0, 0.6, 1.0)


def test_rejects_rho_squared_above_r():
    with pytest.raises(CorrelationBoundError):
        validate_model(1.0, 0.5, 0.2)


def test_rejects_nonpositive_variance():
    with pytest.raises(NonPositiveVarianceError):
        validate_model(0.0, 0.0, 1.0)


def test_rejects_negative_rho():
    with pytest.raises(NegativeCorrelationError):
        validate_model(1.0, -0.1, 1.0)


def test_boundary_model_allowed():
    # theta a deterministic function of X is legitimate
    m = validate_model(2.0, 0.7, 0.49)
    assert privacy_bounds(m).dp_min == pytest.approx(0.0, abs=1e-12)


@given(
    st.floats(-5, 5, allow_nan=False),
    st.floats(-2, 2, allow_nan=False),
    st.floats(-2, 5, allow_nan=False),
)
def test_validation_is_total(sigma_x2, rho, r):
    # every triple either validates or raises exactly one model error; no clamping
    try:
        m = validate_model(sigma_x2, rho, r)
    except (NonPositiveVarianceError, NegativeCorrelationError, CorrelationBoundError):
        return
    assert m.sigma_x2 == sigma_x2 and m.rho == rho and m.r == r


def test_privacy_bounds_examples():
    for params, expected in [
        ((1, 0.6, 1), (0.64, 1.0)),
        ((1, 0.0, 1), (1.0, 1.0)),
        ((2, 0.5, 0.5), (0.5, 1.0)),
    ]:
        b = privacy_bounds(validate_model(*params))
        assert (b.dp_min, b.dp_max) == pytest.approx(expected)


def test_dp_min_matches_regression_oracle():
    # empirical Var(theta - E[theta|X]) for sigma_x2=2, rho=0.5, r=0.5
    m = validate_model(2.0, 0.5, 0.5)
    rng = np.random.default_rng(7)
    z = rng.standard_normal((2, 400_000))
    sx = math.sqrt(m.sigma_x2)
    x = sx * z[0]
    theta = sx * (m.rho * z[0] + math.sqrt(m.r - m.rho**2) * z[1])
    coef = np.dot(theta, x) / np.dot(x, x)
    resid = theta - coef * x
    assert np.mean(resid**2) == pytest.approx(privacy_bounds(m).dp_min, rel=2e-2)


@given(source_models())
def test_bounds_ordered(m):
    b = privacy_bounds(m)
    assert 0.0 <= b.dp_min <= b.dp_max
    if m.rho == 0.0:
        assert b.dp_min == b.dp_max
    elif m.rho**2 * m.sigma_x2 > 1e-12 * b.dp_max:
        assert b.dp_min < b.dp_max


def test_entropy_values():
    assert gaussian_conditional_entropy(1.0 / (2 * math.pi * math.e)) == pytest.approx(
        0.0, abs=1e-15
    )
    assert gaussian_conditional_entropy(1.0) == pytest.approx(
        0.5 * math.log(2 * math.pi * math.e), abs=1e-15
    )


def test_entropy_rejects_nonpositive():
    with pytest.raises(ValueError):
        gaussian_conditional_entropy(0.0)
    with pytest.raises(ValueError):
        gaussian_conditional_entropy(-1.0)


@given(st.floats(1e-12, 1e6), st.floats(1e-12, 1e6))
def test_entropy_strictly_monotone(m1, m2):
    lo, hi = sorted((m1, m2))
    if hi <= lo * (1.0 + 1e-9):  # log resolution floor
        return
    assert gaussian_conditional_entropy(lo) < gaussian_conditional_entropy(hi)
