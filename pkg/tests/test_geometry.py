import math

import numpy as np
import pytest

from rindler_entanglement.errors import BranchBoundary, DomainError
from rindler_entanglement.geometry import (
    SCENARIOS,
    AntiParallelLongitudinal,
    AntiParallelTransverse,
    BoostedPair,
    Detector,
    Event,
    Oriented,
    ParallelDifferentAcceleration,
    ParallelLongitudinal,
    ParallelTransverse,
    PoleClass,
    Role,
    branch_boundaries,
    d_of_tau_b,
    eta_roots,
    interval_between,
    interval_decomposition,
    interval_squared,
    poles_upper_half,
    worldline_position,
)

ALL = [
    ParallelTransverse(1.0, 1.0),
    ParallelTransverse(0.7, 2.5),
    ParallelDifferentAcceleration(2.0, 1.0),
    ParallelLongitudinal(1.0, 2.0),
    ParallelLongitudinal(1.3, 0.4),
    ParallelLongitudinal(1.0, -1.5),
    AntiParallelTransverse(1.0, 1.0, 0.0),
    AntiParallelTransverse(2.0, 0.5, 1.2),
    AntiParallelLongitudinal(1.0, 1.0),
    AntiParallelLongitudinal(1.0, -2.0),
    Oriented(1.0, math.pi / 2),
    Oriented(0.8, 2.4),
    BoostedPair(1.0, 0.5, 1.0),
    BoostedPair(1.5, -0.8, 0.6),
]
IDS = [repr(s) for s in ALL]


def _direct(s, ta, tb):
    a = worldline_position(s, Role.ALICE, ta)
    b = worldline_position(s, Role.BOB, tb)
    return interval_squared(a, b)


def test_detector_validation():
    with pytest.raises(DomainError):
        Detector(0.0, 1.0)
    with pytest.raises(DomainError):
        Detector(1.0, -1.0)
    with pytest.raises(DomainError):
        Detector(1.0, 1.0, -0.1)
    assert Detector(3.0, 1.5).x == 2.0


@pytest.mark.parametrize("build", [
    lambda: ParallelTransverse(1.0, 0.0),
    lambda: ParallelDifferentAcceleration(1.0, 2.0),
    lambda: ParallelLongitudinal(1.0, 0.0),
    lambda: AntiParallelTransverse(1.0, 1.0, -1.0),
    lambda: AntiParallelLongitudinal(1.0, 2.0),
    lambda: AntiParallelLongitudinal(1.0, 0.0),
    lambda: Oriented(1.0, 0.0),
    lambda: Oriented(1.0, math.pi),
    lambda: BoostedPair(1.0, 0.0, 1.0),
    lambda: BoostedPair(1.0, 0.3, 0.0),
])
def test_invalid_scenarios(build):
    with pytest.raises(DomainError):
        build()


def test_catalog_complete():
    assert set(SCENARIOS) == {
        "ParallelTransverse", "ParallelDifferentAcceleration", "ParallelLongitudinal",
        "AntiParallelTransverse", "AntiParallelLongitudinal", "Oriented", "BoostedPair"}


def test_worldline_examples():
    e = worldline_position(ParallelTransverse(1, 1), "Alice", 0.0)
    assert (e.t, e.x, e.y, e.z) == (0, 1, 0, 0)
    e = worldline_position(AntiParallelTransverse(1, 1, 0), Role.BOB, 0.0)
    assert (e.t, e.x, e.y, e.z) == (0, -1, 0, 0)
    e = worldline_position(BoostedPair(1, 0.5, 1), Role.ALICE, 0.0)
    assert (e.t, e.x, e.y, e.z) == (0, 0, 0, 0)


def test_worldlines_have_unit_proper_acceleration():
    for s in ALL:
        for role, k in ((Role.ALICE, s.kappa_alice), (Role.BOB, s.kappa_bob)):
            h = 1e-4
            pts = [worldline_position(s, role, t) for t in (0.3 - h, 0.3, 0.3 + h)]
            vel = np.array([(pts[2].t - pts[0].t), (pts[2].x - pts[0].x),
                            (pts[2].y - pts[0].y), (pts[2].z - pts[0].z)]) / (2 * h)
            acc = np.array([(p2 - 2 * p1 + p0) for p0, p1, p2 in zip(
                *[(p.t, p.x, p.y, p.z) for p in pts])]) / h ** 2
            assert vel[0] ** 2 - vel[1:] @ vel[1:] == pytest.approx(1, abs=1e-7)
            assert math.sqrt(acc[1:] @ acc[1:] - acc[0] ** 2) == pytest.approx(k, rel=1e-5)


def test_interval_examples():
    z = Event(0, 0, 0, 0)
    assert interval_squared(z, z) == 0
    assert interval_squared(Event(1, 0, 0, 0), z) == 1
    assert interval_squared(Event(0, 1, 1, 0), z) == -2
    with pytest.raises(DomainError):
        Event(math.nan, 0)


@pytest.mark.parametrize("s", ALL, ids=IDS)
def test_decomposition_identity(s):
    rng = np.random.default_rng(1)
    dec = interval_decomposition(s)
    for ta, tb in rng.uniform(-3, 3, size=(100, 2)):
        direct = _direct(s, ta, tb)
        dec_val = float(dec.interval(ta, tb))
        stable = float(interval_between(s, ta, tb))
        scale = max(abs(direct), 1e-300)
        assert abs(dec_val - direct) <= 1e-10 * scale + 1e-13
        assert abs(stable - direct) <= 1e-10 * scale + 1e-13


@pytest.mark.parametrize("s", ALL, ids=IDS)
def test_d_squared_identity(s):
    rng = np.random.default_rng(2)
    for tb in rng.uniform(-3, 3, size=100):
        a, b, c = s.abc(tb)
        d = d_of_tau_b(s, tb)
        assert abs(d * d - (b * b - a * c)) <= 1e-10 * max(abs(b * b), abs(a * c), 1.0)


def test_decomposition_examples():
    s = ParallelDifferentAcceleration(2.0, 1.0)
    dec = interval_decomposition(s)
    assert dec.k == 0.5
    assert float(dec.eval_b(0.7)) == pytest.approx(1.25, abs=1e-14)
    assert d_of_tau_b(s, 1.3) == pytest.approx(0.75, abs=1e-14)
    o = interval_decomposition(Oriented(1.0, 1.1))
    assert np.allclose(o.eval_b(np.linspace(-2, 2, 5)), 1.0)
    assert d_of_tau_b(Oriented(1.0, math.pi / 2), 0.0) == pytest.approx(1.0)
    ap = interval_decomposition(AntiParallelTransverse(1.0, 1.0, 0.0))
    assert ap.k == -1.0
    assert float(ap.eval_b(0.3)) == -1.0


def test_vanishing_shift_limit():
    s = ParallelTransverse(1.0, 1e-8)
    for ta, tb in [(0.1, 0.4), (-1.0, 0.5), (2.0, -0.3)]:
        alice = worldline_position(s, Role.ALICE, ta)
        alice_b = worldline_position(s, Role.ALICE, tb)
        assert _direct(s, ta, tb) == pytest.approx(interval_squared(alice, alice_b),
                                                   rel=1e-6, abs=1e-15)


def test_boosted_pair_inertial_limit():
    k, v, rho = 1e-6, 0.6, 1.0
    s = BoostedPair(k, math.atanh(v), rho)
    g = 1 / math.sqrt(1 - v * v)
    for ta, tb in [(0.3, 1.2), (-2.0, 0.7), (5.0, -4.0)]:
        inertial = (g * tb - ta) ** 2 - (g * v * tb) ** 2 - rho ** 2
        assert float(interval_between(s, ta, tb)) == pytest.approx(inertial, rel=1e-4)


def test_stable_interval_near_boundary():
    # close to a branch boundary the light-cone root sits at large |tau_A|
    s = AntiParallelLongitudinal(1.0, 1.0)
    tb = 1e-9
    roots = [math.log(float(e)) for e in eta_roots(s, tb) if float(e) > 0]
    for r in roots:
        du, dv, _, _ = s.null_separation(r, tb)
        assert abs(du * dv) < 1e-6 * max(abs(du), abs(dv))


@pytest.mark.parametrize("s", ALL, ids=IDS)
def test_pole_residuals(s):
    dec = interval_decomposition(s)
    for tb in (-1.7, -0.35, 0.45, 1.9):
        if any(abs(tb - b) < 1e-9 for b in branch_boundaries(s)):
            continue
        poles = poles_upper_half(s, tb, n_max=3)
        assert poles
        for p in poles:
            assert p.imag_part > 0 or (p.n == 0 and p.imag_offset_class is PoleClass.EVEN_PI)
            ea = np.exp(s.kappa_alice * p.value)
            resid = dec.k * (dec.eval_a(tb) * ea - 2 * dec.eval_b(tb) + dec.eval_c(tb) / ea)
            scale = abs(dec.k) * (abs(dec.eval_a(tb) * ea) + abs(2 * dec.eval_b(tb)))
            assert abs(resid) <= 1e-8 * max(scale, 1.0)


def test_pole_examples():
    poles = poles_upper_half(ParallelTransverse(1.0, 1.0), 0.4)
    reals = sorted({round(p.real_part, 12) for p in poles})
    expected = sorted(0.4 + math.log(1.5 + s * math.sqrt(1.25)) for s in (1, -1))
    assert np.allclose(reals, expected, atol=1e-12)
    poles = poles_upper_half(AntiParallelTransverse(1.0, 1.0, 0.0), 0.8)
    assert all(p.imag_offset_class is PoleClass.ODD_PI for p in poles)
    assert all(p.real_part == pytest.approx(-0.8) for p in poles)


def test_branch_boundary_raises():
    s = Oriented(1.0, math.pi / 3)
    b = branch_boundaries(s)
    assert b == pytest.approx(sorted([math.log(1 / math.tan(math.pi / 6)),
                                      math.log(math.tan(math.pi / 6))]))
    with pytest.raises(BranchBoundary):
        poles_upper_half(s, b[0])
    assert ParallelLongitudinal(1.0, 2.0).boundaries() == ()
    assert len(AntiParallelLongitudinal(1.0, 0.5).boundaries()) == 2
    assert AntiParallelLongitudinal(1.0, -0.5).boundaries() == ()


def test_mirror_preserves_geometry():
    # exchanging the roles maps the pair onto the mirrored scenario up to a
    # Poincare transformation, so the interval is role-symmetric
    for s in ALL:
        try:
            m = s.mirror()
        except DomainError:
            continue
        for ta, tb in [(0.2, -0.7), (1.1, 0.4)]:
            assert float(interval_between(m, tb, ta)) == pytest.approx(
                float(interval_between(s, ta, tb)), rel=1e-10, abs=1e-12)
