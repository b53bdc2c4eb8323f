import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rindler_entanglement.errors import DomainError
from rindler_entanglement.geometry import Detector
from rindler_entanglement.response import (
    DURATION,
    excitation_rate_per_lambda,
    excitation_rate_per_proper_time,
    response_rate,
)


def test_unit_example():
    assert excitation_rate_per_proper_time(Detector(1.0, 1.0)) == pytest.approx(2.97769e-4, rel=1e-5)
    assert excitation_rate_per_lambda(1.0) == pytest.approx(2.97769e-4, rel=1e-5)


def test_x_two():
    expected = (1 / math.pi) / math.expm1(4 * math.pi)
    assert excitation_rate_per_lambda(2.0) == pytest.approx(expected, rel=1e-13)
    assert excitation_rate_per_lambda(2.0) == pytest.approx(1.11006e-6, rel=1e-5)


def test_small_gap_limit():
    k = 1.7
    det = Detector(1e-6 * k, k)
    assert excitation_rate_per_proper_time(det) == pytest.approx(k / (4 * math.pi ** 2), rel=1e-5)


def test_large_gap_vanishes():
    vals = [excitation_rate_per_lambda(x) for x in (5, 20, 80, 200)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert excitation_rate_per_lambda(500.0) == 0.0


@pytest.mark.parametrize("x", [1e-4, 0.01, 0.3, 1.0, 3.0, 10.0])
def test_planck_identity(x):
    r = excitation_rate_per_lambda(x)
    assert r * math.expm1(2 * math.pi * x) * 2 * math.pi / x == pytest.approx(1.0, abs=1e-14)


def test_monotone_decrease():
    xs = np.linspace(0.2, 8, 400)
    vals = np.array([excitation_rate_per_lambda(x) for x in xs])
    assert np.all(np.diff(vals) < 0)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 20), st.floats(1e-3, 1e3))
def test_per_lambda_consistency(x, kappa):
    det = Detector(x * kappa, kappa)
    assert excitation_rate_per_lambda(det.x) * kappa == pytest.approx(
        excitation_rate_per_proper_time(det), rel=1e-12)


def test_response_rate_record():
    r = response_rate(Detector(2.0, 2.0))
    assert r.per_proper_time == pytest.approx(2 * r.per_lambda)
    assert r.temperature == pytest.approx(1 / math.pi)
    assert repr(DURATION) == "DURATION"


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_domain(x):
    with pytest.raises(DomainError):
        excitation_rate_per_lambda(x)
