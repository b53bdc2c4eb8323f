import math

import numpy as np
import pytest
from scipy import integrate

from rindler_entanglement.errors import BranchBoundary, DomainError, WrongScenario
from rindler_entanglement.geometry import (
    AntiParallelLongitudinal,
    AntiParallelTransverse,
    BoostedPair,
    Detector,
    Oriented,
    ParallelDifferentAcceleration,
    ParallelLongitudinal,
    ParallelTransverse,
)
from rindler_entanglement.crossterm import (
    BoundedOnly,
    DeltaTerm,
    FiniteValue,
    InertialLimitParams,
    cross_term,
    cross_term_upper_bound,
    delta_coefficient,
    delta_frequency,
    generalized_sigma,
    inertial_limit_cross_term,
    inertial_limit_from_scenario,
    p_factor,
    p_integral,
    residue_reduced_integrand,
    sin_ratio,
    swap_detectors,
)
from rindler_entanglement.numerics import bessel_k0
from rindler_entanglement.oracle import k0_identity_integral


def det(x, kappa=1.0):
    return Detector(x * kappa, kappa)


@pytest.mark.parametrize("scenario, xa, xb", [
    (ParallelTransverse(1.0, 1.0), 1.0, 1.0),
    (ParallelTransverse(0.5, 0.3), 0.7, 2.0),
    (ParallelDifferentAcceleration(2.0, 1.0), 0.8, 1.3),
    (AntiParallelTransverse(1.0, 1.0, 0.0), 1.0, 1.0),
    (AntiParallelTransverse(1.5, 0.7, 0.4), 0.6, 1.1),
])
def test_delta_family_constancy(scenario, xa, xb):
    da, db = det(xa, scenario.kappa_alice), det(xb, scenario.kappa_bob)
    omega = delta_frequency(scenario, da, db)
    taus = np.linspace(-2.5, 2.5, 20)
    vals = residue_reduced_integrand(scenario, da, db, taus) * np.exp(-1j * omega * taus)
    assert np.max(np.abs(vals - vals[0])) <= 1e-9 * abs(vals[0])


def test_parallel_transverse_constant_phase():
    s, d = ParallelTransverse(1.0, 1.0), det(1.0)
    vals = [residue_reduced_integrand(s, d, d, t) * np.exp(-2j * t) for t in (-2.0, 0.0, 1.3)]
    assert max(abs(v - vals[0]) for v in vals) <= 1e-10 * abs(vals[0])


def test_antiparallel_integrand_value():
    s, d = AntiParallelTransverse(1.0, 1.0, 0.0), det(1.0)
    # per unit lambda_B equals per unit tau_B at kappa = 1
    v = residue_reduced_integrand(s, d, d, 0.37)
    assert v.imag == 0
    assert v.real == pytest.approx(-1 / (4 * math.pi * math.sinh(math.pi)), rel=1e-12)
    assert v.real == pytest.approx(-6.891e-3, rel=1e-3)


def test_antiparallel_delta_coefficient():
    s, d = AntiParallelTransverse(1.0, 1.0, 0.0), det(1.0)
    r = cross_term(s, d, d)
    assert isinstance(r, DeltaTerm)
    assert r.omega == 0 and not r.vanishes
    assert r.coefficient == pytest.approx(-0.5 / math.sinh(math.pi), rel=1e-12)
    assert r.coefficient.real == pytest.approx(-0.043296, rel=1e-4)


def test_delta_coefficient_consistent_with_integrand():
    # 2 pi delta(omega) per unit lambda: coefficient = 2 pi * per-lambda integrand / 2 pi
    for s in (ParallelTransverse(1.0, 0.8), ParallelDifferentAcceleration(3.0, 1.0),
              AntiParallelTransverse(1.0, 2.0, 0.5)):
        da, db = det(0.9, s.kappa_alice), det(0.9, s.kappa_bob)
        per_lambda = residue_reduced_integrand(s, da, db, 0.0) / s.kappa_bob
        assert delta_coefficient(s, da, db).coefficient == pytest.approx(
            2 * math.pi * per_lambda, rel=1e-10)


def test_delta_omegas():
    assert delta_coefficient(ParallelTransverse(1, 1), det(1.0), det(2.0)).omega == 3.0
    pda = ParallelDifferentAcceleration(2.0, 1.0)
    r = delta_coefficient(pda, det(0.5, 2.0), det(0.25))
    assert r.omega == pytest.approx(0.75) and r.vanishes
    r = delta_coefficient(AntiParallelTransverse(1, 1, 0), det(1.0), det(1.5))
    assert r.omega == pytest.approx(-0.5) and r.vanishes
    with pytest.raises(WrongScenario):
        delta_coefficient(Oriented(1.0, 1.0), det(1.0), det(1.0))
    with pytest.raises(WrongScenario):
        delta_frequency(ParallelLongitudinal(1.0, 1.0), det(1.0), det(1.0))


def test_generalized_sigma():
    assert generalized_sigma(1, 1, 0) == 0
    assert generalized_sigma(2, 1, 0) == pytest.approx(math.log(2), abs=1e-14)
    assert generalized_sigma(1, 1, math.sqrt(2)) == pytest.approx(math.log(2 + math.sqrt(3)), abs=1e-14)
    assert generalized_sigma(2, 1, 0) == pytest.approx(ParallelDifferentAcceleration(2, 1).sigma)
    with pytest.raises(DomainError):
        generalized_sigma(0, 1, 0)


def test_sin_ratio_taylor_branch_continuous():
    for x in (0.3, 1.0, 4.0):
        a = sin_ratio(x, 0.999e-6)
        b = sin_ratio(x, 1.001e-6)
        assert a == pytest.approx(b, rel=1e-10)
        assert sin_ratio(x, 0.0) == x


@pytest.mark.parametrize("a", [-1.9, -1.0, 0.0, 0.5, 1.0, 1.999, 2.0, 2.001, 4.0, 10.0])
def test_p_integral_matches_quadrature(a):
    # even integrand, written without overflow at large t
    f = lambda t: math.exp(-t) / (1 + math.exp(-2 * t) + a * math.exp(-t))
    ref = 2 * integrate.quad(f, 0, 60, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    assert abs(p_integral(a) - ref) <= 1e-8


def test_p_factor_examples():
    assert p_factor(ParallelLongitudinal(1.0, 2.0)) == 1.0
    assert p_factor(ParallelLongitudinal(1.0, 4.0)) == pytest.approx(
        math.log(2 + math.sqrt(3)) / math.sqrt(3), rel=1e-14)
    assert p_factor(ParallelLongitudinal(1.0, 4.0)) == pytest.approx(0.7603, abs=1e-4)
    # both P definitions share the integral; only the shift differs
    assert p_factor(AntiParallelLongitudinal(1.0, 1.0)) == p_factor(ParallelLongitudinal(1.0, 1.0))
    assert p_factor(AntiParallelLongitudinal(2.0, -1.0)) == p_factor(ParallelLongitudinal(2.0, 1.0))
    with pytest.raises(WrongScenario):
        p_factor(Oriented(1.0, 1.0))
    with pytest.raises(DomainError):
        p_integral(-2.0)


def test_bound_examples():
    b = cross_term_upper_bound(Oriented(1.0, math.pi / 2), det(1.0), det(1.0))
    expected = 0.25 / math.tanh(math.pi) * (1 - 0.5 * math.tanh(math.pi) * math.tanh(math.pi / 2))
    assert b == pytest.approx(expected, rel=1e-14)
    assert b == pytest.approx(0.1363, abs=1e-4)
    b = cross_term_upper_bound(ParallelLongitudinal(1.0, 2.0), det(1.0), det(1.0))
    assert b == pytest.approx(1 / (4 * math.pi * math.tanh(math.pi)), rel=1e-14)
    assert b == pytest.approx(0.0799, abs=1e-4)
    with pytest.raises(WrongScenario):
        cross_term_upper_bound(BoostedPair(1.0, 0.5, 1.0), det(1.0), det(1.0))


GRID = ([ParallelLongitudinal(1.0, v) for v in (0.5, 1, 2, 4)]
        + [AntiParallelLongitudinal(1.0, v) for v in (-3, -1, 0.5, 1.5)]
        + [Oriented(1.0, v) for v in (math.pi / 6, math.pi / 2, 5 * math.pi / 6)])


@pytest.mark.parametrize("scenario", GRID, ids=repr)
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_bound_dominance(scenario, x):
    r = cross_term(scenario, det(x), det(x))
    assert isinstance(r, BoundedOnly)
    assert r.holds
    assert r.upper_bound - abs(r.value) >= -r.numeric_value.error_estimate


def test_finite_scenarios_dispatch():
    r = cross_term(BoostedPair(1.0, 0.5, 1.0), det(1.0), det(1.0))
    assert isinstance(r, FiniteValue)
    assert r.error_estimate < 1e-6


def test_detector_mismatch():
    with pytest.raises(DomainError):
        cross_term(Oriented(1.0, 1.0), det(1.0, 2.0), det(1.0))


def test_strict_integrand_raises_on_boundary():
    s = Oriented(1.0, math.pi / 3)
    tb = s.boundaries()[0]
    with pytest.raises(BranchBoundary):
        residue_reduced_integrand(s, det(1.0), det(1.0), tb)
    assert residue_reduced_integrand(s, det(1.0), det(1.0), tb, strict=False) == 0


SWAP = [
    (ParallelLongitudinal(1.0, 2.0), 1.0, 1.0),
    (ParallelLongitudinal(1.0, 1.0), 0.6, 1.7),
    (AntiParallelLongitudinal(1.0, 1.0), 1.0, 1.0),
    (AntiParallelLongitudinal(1.0, -1.5), 0.8, 1.4),
    (Oriented(1.0, math.pi / 2), 1.0, 1.0),
    (Oriented(1.0, 2.2), 0.5, 1.2),
    (BoostedPair(1.0, 0.5, 1.0), 1.0, 1.0),
    (BoostedPair(1.0, -0.7, 0.8), 0.9, 1.3),
]


@pytest.mark.parametrize("scenario, xa, xb", SWAP, ids=lambda v: repr(v))
def test_exchange_symmetry(scenario, xa, xb):
    da, db = det(xa), det(xb)
    r1 = cross_term(scenario, da, db)
    r2 = cross_term(*swap_detectors(scenario, da, db))
    tol = 1e-7 + 10 * (_err(r1) + _err(r2))
    assert abs(r1.value - r2.value) <= tol


def _err(r):
    return r.numeric_value.error_estimate if isinstance(r, BoundedOnly) else r.error_estimate


def test_inertial_limit_params():
    p = InertialLimitParams(0.6, 1.0, 1.0, 1.0)
    assert p.ell == pytest.approx(4 / 3)
    assert p.epsilon_eff == pytest.approx(2.25)
    assert p.p == pytest.approx(0.75)
    v = inertial_limit_cross_term(p)
    assert v.real == 0 and v.imag > 0
    assert v.imag == pytest.approx(4 / 3 / (2 * math.pi) * bessel_k0(4 / 3 * math.sqrt(4.5)))
    assert abs(inertial_limit_cross_term(InertialLimitParams(1 - 1e-12, 1.0, 1.0, 1.0))) < 1e-5
    with pytest.raises(DomainError):
        InertialLimitParams(1.0, 1.0, 1.0, 1.0)


def test_inertial_limit():
    k = 1e-3
    s = BoostedPair(k, math.atanh(0.6), 1.0)
    da, db = Detector(1.0, k), Detector(1.0, k)
    r = cross_term(s, da, db)
    ref = inertial_limit_from_scenario(s, da, db)
    assert abs(r.value - ref) <= 1e-2 * abs(ref)
    with pytest.raises(WrongScenario):
        inertial_limit_from_scenario(Oriented(1.0, 1.0), da, db)


@pytest.mark.parametrize("ell, e, p", [(4 / 3, 2.25, 0.75), (1.0, 1.5, -0.5)])
def test_k0_identity(ell, e, p):
    damping = 0.2
    lhs = k0_identity_integral(ell, e, p, damping)
    from scipy.special import kv
    rhs = 2 * kv(0, ell * np.sqrt(e * e - (p + 1j * damping) ** 2))
    assert abs(lhs - rhs) <= 1e-6 * abs(rhs)
