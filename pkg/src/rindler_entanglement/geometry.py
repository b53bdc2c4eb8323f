"""Worldlines of the detector pairs and the structure of their interval.

Every scenario puts Alice on a hyperbola accelerated along +x and Bob on a
second worldline. The squared interval between the two detectors factors as

    K [A(tau_B) exp(kappa_A tau_A) - 2 B(tau_B) + C(tau_B) exp(-kappa_A tau_A)]

so that, at fixed tau_B, its zeros in exp(kappa_A tau_A) are the two roots
eta_pm = (B pm D) / A with D^2 = B^2 - A C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import BranchBoundary, DomainError

__all__ = [
    "Detector",
    "Event",
    "Role",
    "Scenario",
    "ParallelTransverse",
    "ParallelDifferentAcceleration",
    "ParallelLongitudinal",
    "AntiParallelTransverse",
    "AntiParallelLongitudinal",
    "Oriented",
    "BoostedPair",
    "SCENARIOS",
    "IntervalDecomposition",
    "PoleClass",
    "PoleBranch",
    "worldline_position",
    "interval_squared",
    "interval_between",
    "interval_decomposition",
    "d_of_tau_b",
    "eta_roots",
    "branch_boundaries",
    "poles_upper_half",
]


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite positive number, got {value}")
    return value


@dataclass(frozen=True)
class Detector:
    """Two-level detector: gap ``delta_e``, acceleration ``kappa``, |<E1|m|E0>|^2."""

    delta_e: float
    kappa: float
    m_squared: float = 1.0
    label: str = ""

    def __post_init__(self):
        _positive("delta_e", self.delta_e)
        _positive("kappa", self.kappa)
        if not (math.isfinite(self.m_squared) and self.m_squared >= 0):
            raise DomainError(f"m_squared must be >= 0, got {self.m_squared}")

    @property
    def x(self) -> float:
        """Dimensionless gap delta_e / kappa."""
        return self.delta_e / self.kappa


@dataclass(frozen=True)
class Event:
    t: float
    x: float
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.t, self.x, self.y, self.z)):
            raise DomainError("event coordinates must be finite")


class Role(str, Enum):
    ALICE = "alice"
    BOB = "bob"


class PoleClass(str, Enum):
    """Imaginary offset of a pole tower: 2n pi / kappa_A or (2n+1) pi / kappa_A."""

    EVEN_PI = "EvenPi"
    ODD_PI = "OddPi"


def _expdiff(p, q):
    """exp(p) - exp(q) without cancellation when p is close to q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    hi = np.maximum(p, q)
    lo = np.minimum(p, q)
    mag = -np.exp(hi) * np.expm1(lo - hi)
    return np.where(p >= q, mag, -mag)


@dataclass(frozen=True)
class Scenario:
    """Base class; concrete scenarios are the frozen dataclasses below."""

    name = "Scenario"
    delta_family = False

    @property
    def kappa_alice(self) -> float:
        return self.kappa

    @property
    def kappa_bob(self) -> float:
        return self.kappa

    # Each scenario implements the pieces below.
    def alice(self, tau):
        a = self.kappa_alice * np.asarray(tau, dtype=float)
        k = self.kappa_alice
        return np.sinh(a) / k, np.cosh(a) / k, np.zeros_like(a), np.zeros_like(a)

    def bob(self, tau):  # pragma: no cover - abstract
        raise NotImplementedError

    def null_separation(self, tau_a, tau_b):
        """(Delta u, Delta v, Delta y, Delta z) with u = t - x, v = t + x."""
        raise NotImplementedError  # pragma: no cover

    def abc(self, tau_b):
        raise NotImplementedError  # pragma: no cover

    def k_constant(self) -> float:
        raise NotImplementedError  # pragma: no cover

    def d(self, tau_b):
        raise NotImplementedError  # pragma: no cover

    def boundaries(self) -> tuple:
        return ()

    def mirror(self) -> "Scenario":
        """Scenario obtained by exchanging the roles of Alice and Bob."""
        raise NotImplementedError  # pragma: no cover

    def params(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _standard_alice_null(k, a):
    """Null coordinates of the standard Alice hyperbola times kappa."""
    return -np.exp(-k * a), np.exp(k * a)


@dataclass(frozen=True)
class ParallelTransverse(Scenario):
    """Same acceleration, Bob shifted by rho0 transverse to the acceleration."""

    kappa: float
    rho0: float
    name = "ParallelTransverse"
    delta_family = True

    def __post_init__(self):
        _positive("kappa", self.kappa)
        _positive("rho0", self.rho0)

    def bob(self, tau):
        b = self.kappa * np.asarray(tau, dtype=float)
        return (np.sinh(b) / self.kappa, np.cosh(b) / self.kappa,
                np.full_like(b, self.rho0), np.zeros_like(b))

    def null_separation(self, tau_a, tau_b):
        k = self.kappa
        a, b = k * np.asarray(tau_a, float), k * np.asarray(tau_b, float)
        du = _expdiff(-a, -b) / k
        dv = _expdiff(b, a) / k
        return du, dv, np.full(np.broadcast(a, b).shape, self.rho0), 0.0

    def abc(self, tau_b):
        b = self.kappa * np.asarray(tau_b, float)
        return np.exp(-b), np.full_like(b, 1 + 0.5 * (self.kappa * self.rho0) ** 2), np.exp(b)

    def k_constant(self):
        return 1.0 / self.kappa ** 2

    def d(self, tau_b):
        kr = self.kappa * self.rho0
        return np.full_like(np.asarray(tau_b, float), kr * math.sqrt(1 + 0.25 * kr * kr))

    def mirror(self):
        return self


@dataclass(frozen=True)
class ParallelDifferentAcceleration(Scenario):
    """Parallel acceleration along the same axis, kappa_a > kappa_b."""

    kappa_a: float
    kappa_b: float
    name = "ParallelDifferentAcceleration"
    delta_family = True

    def __post_init__(self):
        _positive("kappa_a", self.kappa_a)
        _positive("kappa_b", self.kappa_b)
        if not self.kappa_a > self.kappa_b:
            raise DomainError("ParallelDifferentAcceleration needs kappa_a > kappa_b")

    @property
    def kappa(self):
        return self.kappa_a

    @property
    def kappa_bob(self):
        return self.kappa_b

    @property
    def sigma(self):
        return math.log(self.kappa_a / self.kappa_b)

    def bob(self, tau):
        b = self.kappa_b * np.asarray(tau, dtype=float)
        z = np.zeros_like(b)
        return np.sinh(b) / self.kappa_b, np.cosh(b) / self.kappa_b, z, z

    def null_separation(self, tau_a, tau_b):
        ka, kb = self.kappa_a, self.kappa_b
        ua, va = _standard_alice_null(ka, np.asarray(tau_a, float))
        ub, vb = _standard_alice_null(kb, np.asarray(tau_b, float))
        return ub / kb - ua / ka, vb / kb - va / ka, 0.0, 0.0

    def abc(self, tau_b):
        b = self.kappa_b * np.asarray(tau_b, float)
        return np.exp(-b), np.full_like(b, math.cosh(self.sigma)), np.exp(b)

    def k_constant(self):
        return 1.0 / (self.kappa_a * self.kappa_b)

    def d(self, tau_b):
        return np.full_like(np.asarray(tau_b, float), math.sinh(self.sigma))

    def mirror(self):
        raise DomainError("the exchanged configuration has kappa_a < kappa_b, "
                          "which this scenario does not represent")


@dataclass(frozen=True)
class ParallelLongitudinal(Scenario):
    """Same acceleration, Bob shifted by x0 along the acceleration.

    The closed-form bound needs x0 > 0; negative x0 is accepted as the image
    of the positive case under exchange of the detectors.
    """

    kappa: float
    x0: float
    name = "ParallelLongitudinal"

    def __post_init__(self):
        _positive("kappa", self.kappa)
        if not (math.isfinite(self.x0) and self.x0 != 0):
            raise DomainError("x0 must be finite and non-zero")

    def bob(self, tau):
        b = self.kappa * np.asarray(tau, dtype=float)
        z = np.zeros_like(b)
        return np.sinh(b) / self.kappa, np.cosh(b) / self.kappa + self.x0, z, z

    def null_separation(self, tau_a, tau_b):
        k = self.kappa
        a, b = k * np.asarray(tau_a, float), k * np.asarray(tau_b, float)
        du = _expdiff(-a, -b) / k - self.x0
        dv = _expdiff(b, a) / k + self.x0
        return du, dv, 0.0, 0.0

    def abc(self, tau_b):
        b = self.kappa * np.asarray(tau_b, float)
        kx = self.kappa * self.x0
        return np.exp(-b) + kx, kx * np.cosh(b) + 0.5 * kx * kx + 1, np.exp(b) + kx

    def k_constant(self):
        return 1.0 / self.kappa ** 2

    def d(self, tau_b):
        kx = self.kappa * self.x0
        return kx * np.cosh(self.kappa * np.asarray(tau_b, float)) + 0.5 * kx * kx

    def boundaries(self):
        kx = self.kappa * self.x0
        if kx > 0:
            return ()
        s = math.log(-kx) / self.kappa
        return tuple(sorted({-s, s}))

    def mirror(self):
        return ParallelLongitudinal(self.kappa, -self.x0)


@dataclass(frozen=True)
class AntiParallelTransverse(Scenario):
    """Bob accelerated along -x with its own kappa_b, shifted transversely by rho0."""

    kappa_a: float
    kappa_b: float
    rho0: float = 0.0
    name = "AntiParallelTransverse"
    delta_family = True

    def __post_init__(self):
        _positive("kappa_a", self.kappa_a)
        _positive("kappa_b", self.kappa_b)
        if not (math.isfinite(self.rho0) and self.rho0 >= 0):
            raise DomainError("rho0 must be >= 0")

    @property
    def kappa(self):
        return self.kappa_a

    @property
    def kappa_bob(self):
        return self.kappa_b

    @property
    def m_parameter(self):
        ka, kb = self.kappa_a, self.kappa_b
        return 0.5 * (ka / kb + kb / ka + ka * kb * self.rho0 ** 2)

    @property
    def sigma(self):
        m = self.m_parameter
        return math.log(m + math.sqrt(max(m * m - 1, 0.0)))

    def bob(self, tau):
        b = self.kappa_b * np.asarray(tau, dtype=float)
        return (np.sinh(b) / self.kappa_b, -np.cosh(b) / self.kappa_b,
                np.full_like(b, self.rho0), np.zeros_like(b))

    def null_separation(self, tau_a, tau_b):
        ka, kb = self.kappa_a, self.kappa_b
        a, b = np.asarray(tau_a, float), np.asarray(tau_b, float)
        du = np.exp(kb * b) / kb + np.exp(-ka * a) / ka
        dv = -np.exp(-kb * b) / kb - np.exp(ka * a) / ka
        return du, dv, np.full(np.broadcast(a, b).shape, self.rho0), 0.0

    def abc(self, tau_b):
        b = self.kappa_b * np.asarray(tau_b, float)
        return np.exp(b), np.full_like(b, -self.m_parameter), np.exp(-b)

    def k_constant(self):
        return -1.0 / (self.kappa_a * self.kappa_b)

    def d(self, tau_b):
        m = self.m_parameter
        return np.full_like(np.asarray(tau_b, float), math.sqrt(max(m * m - 1, 0.0)))

    def mirror(self):
        return AntiParallelTransverse(self.kappa_b, self.kappa_a, self.rho0)


@dataclass(frozen=True)
class AntiParallelLongitudinal(Scenario):
    """Same |kappa|, Bob accelerated along -x and shifted by x1 along x."""

    kappa: float
    x1: float
    name = "AntiParallelLongitudinal"

    def __post_init__(self):
        _positive("kappa", self.kappa)
        if not (math.isfinite(self.x1) and self.x1 != 0):
            raise DomainError("x1 must be finite and non-zero")
        if not self.kappa * self.x1 < 2:
            raise DomainError("worldlines intersect unless x1 < 2 / kappa")

    def bob(self, tau):
        b = self.kappa * np.asarray(tau, dtype=float)
        z = np.zeros_like(b)
        return np.sinh(b) / self.kappa, -np.cosh(b) / self.kappa + self.x1, z, z

    def null_separation(self, tau_a, tau_b):
        k = self.kappa
        a, b = k * np.asarray(tau_a, float), k * np.asarray(tau_b, float)
        kx = k * self.x1
        if kx > 0:
            lx = math.log(kx)
            du = (_expdiff(b, lx) + np.exp(-a)) / k
            dv = (_expdiff(lx, -b) - np.exp(a)) / k
        else:
            du = (np.exp(b) + np.exp(-a)) / k - self.x1
            dv = self.x1 - (np.exp(-b) + np.exp(a)) / k
        return du, dv, 0.0, 0.0

    def abc(self, tau_b):
        b = self.kappa * np.asarray(tau_b, float)
        kx = self.kappa * self.x1
        return np.exp(b) - kx, kx * np.cosh(b) - 0.5 * kx * kx - 1, np.exp(-b) - kx

    def k_constant(self):
        return -1.0 / self.kappa ** 2

    def d(self, tau_b):
        kx = self.kappa * self.x1
        return kx * np.cosh(self.kappa * np.asarray(tau_b, float)) - 0.5 * kx * kx

    def boundaries(self):
        kx = self.kappa * self.x1
        if kx < 0:
            return ()
        s = math.log(kx) / self.kappa
        return tuple(sorted({-s, s}))

    def mirror(self):
        return self


@dataclass(frozen=True)
class Oriented(Scenario):
    """Same kappa, Bob's acceleration rotated by phi in the x-y plane."""

    kappa: float
    phi: float
    name = "Oriented"

    def __post_init__(self):
        _positive("kappa", self.kappa)
        if not 0 < self.phi < math.pi:
            raise DomainError("phi must lie in the open interval (0, pi)")

    def bob(self, tau):
        b = self.kappa * np.asarray(tau, dtype=float)
        ch = np.cosh(b) / self.kappa
        return np.sinh(b) / self.kappa, ch * math.cos(self.phi), ch * math.sin(self.phi), np.zeros_like(b)

    def null_separation(self, tau_a, tau_b):
        k = self.kappa
        a, b = k * np.asarray(tau_a, float), k * np.asarray(tau_b, float)
        lc2 = 2 * math.log(math.cos(0.5 * self.phi))
        ls2 = 2 * math.log(math.sin(0.5 * self.phi))
        # A and C of tau_B first: they vanish on the branch boundaries
        du = (np.exp(-a) - _expdiff(lc2 - b, ls2 + b)) / k
        dv = (_expdiff(lc2 + b, ls2 - b) - np.exp(a)) / k
        dy = np.cosh(b) * math.sin(self.phi) / k
        return du, dv, dy, 0.0

    def abc(self, tau_b):
        b = self.kappa * np.asarray(tau_b, float)
        c2 = math.cos(0.5 * self.phi) ** 2
        s2 = math.sin(0.5 * self.phi) ** 2
        return c2 * np.exp(-b) - s2 * np.exp(b), np.ones_like(b), c2 * np.exp(b) - s2 * np.exp(-b)

    def k_constant(self):
        return 1.0 / self.kappa ** 2

    def d(self, tau_b):
        return math.sin(self.phi) * np.cosh(self.kappa * np.asarray(tau_b, float))

    def boundaries(self):
        h = 0.5 * self.phi
        t = math.log(math.tan(h)) / self.kappa
        return tuple(sorted({-t, t}))

    def mirror(self):
        return self


@dataclass(frozen=True)
class BoostedPair(Scenario):
    """Both hyperbolae pass through the origin; Bob is boosted by rapidity alpha.

    Reduces to inertial relative motion with v = tanh(alpha) as kappa -> 0.
    """

    kappa: float
    alpha: float
    rho0: float
    name = "BoostedPair"

    def __post_init__(self):
        _positive("kappa", self.kappa)
        _positive("rho0", self.rho0)
        if not (math.isfinite(self.alpha) and self.alpha != 0):
            raise DomainError("alpha must be finite and non-zero")

    def alice(self, tau):
        a = self.kappa * np.asarray(tau, dtype=float)
        z = np.zeros_like(a)
        return np.sinh(a) / self.kappa, (np.cosh(a) - 1) / self.kappa, z, z

    def bob(self, tau):
        b = self.kappa * np.asarray(tau, dtype=float)
        al = self.alpha
        return ((np.sinh(b + al) - math.sinh(al)) / self.kappa,
                (np.cosh(b + al) - math.cosh(al)) / self.kappa,
                np.full_like(b, self.rho0), np.zeros_like(b))

    def null_separation(self, tau_a, tau_b):
        k = self.kappa
        a, b = k * np.asarray(tau_a, float), k * np.asarray(tau_b, float)
        al = self.alpha
        du = (np.expm1(-a) - math.exp(-al) * np.expm1(-b)) / k
        dv = (math.exp(al) * np.expm1(b) - np.expm1(a)) / k
        # Past the branch boundary side C (alpha > 0) or A (alpha < 0) is small
        # and the grouping above cancels; use e^{alpha+b} - (e^alpha - 1) instead.
        if al > 0:
            far = b < 0
            c = _expdiff(al + b, math.log(math.expm1(al)))
            dv = np.where(far, (c - np.exp(a)) / k, dv)
        else:
            far = b > 0
            c = _expdiff(-al - b, math.log(math.expm1(-al)))
            du = np.where(far, (np.exp(-a) - c) / k, du)
        return du, dv, np.full(np.broadcast(a, b).shape, self.rho0), 0.0

    def _shear(self, b):
        return 4 * np.cosh(0.5 * (b + self.alpha)) * np.sinh(0.5 * b) * math.sinh(0.5 * self.alpha)

    def abc(self, tau_b):
        b = self.kappa * np.asarray(tau_b, float)
        kr2 = (self.kappa * self.rho0) ** 2
        return (np.expm1(-b) * math.exp(-self.alpha) + 1,
                1 + 0.5 * kr2 + self._shear(b),
                np.expm1(b) * math.exp(self.alpha) + 1)

    def k_constant(self):
        return 1.0 / self.kappa ** 2

    def d(self, tau_b):
        b = self.kappa * np.asarray(tau_b, float)
        kr2 = (self.kappa * self.rho0) ** 2
        return np.sqrt(kr2 + (0.5 * kr2 + self._shear(b)) ** 2)

    def boundaries(self):
        if self.alpha > 0:
            return (math.log(-math.expm1(-self.alpha)) / self.kappa,)
        return (-math.log(-math.expm1(self.alpha)) / self.kappa,)

    def mirror(self):
        return BoostedPair(self.kappa, -self.alpha, self.rho0)


SCENARIOS: dict[str, type] = {
    cls.name: cls
    for cls in (ParallelTransverse, ParallelDifferentAcceleration, ParallelLongitudinal,
                AntiParallelTransverse, AntiParallelLongitudinal, Oriented, BoostedPair)
}


def worldline_position(scenario: Scenario, role: Role | str, tau: float) -> Event:
    """Inertial coordinates of Alice or Bob at proper time ``tau``."""
    role = Role(role.lower() if isinstance(role, str) else role)
    coords = scenario.alice(tau) if role is Role.ALICE else scenario.bob(tau)
    return Event(*(float(c) for c in coords))


def interval_squared(e1: Event, e2: Event) -> float:
    """(t1 - t2)^2 - |x1 - x2|^2."""
    return ((e1.t - e2.t) ** 2 - (e1.x - e2.x) ** 2
            - (e1.y - e2.y) ** 2 - (e1.z - e2.z) ** 2)


def interval_between(scenario: Scenario, tau_a, tau_b):
    """Squared interval between Alice at ``tau_a`` and Bob at ``tau_b`` (vectorized).

    Evaluated as du dv - dy^2 - dz^2 in null coordinates, with the large
    exponentials grouped so that the result keeps its relative accuracy
    away from the light cone even at large proper times.
    """
    du, dv, dy, dz = scenario.null_separation(tau_a, tau_b)
    return du * dv - np.square(dy) - np.square(dz)


@dataclass(frozen=True)
class IntervalDecomposition:
    """Callables A, B, C of tau_B and the constants K, kappa_A."""

    eval_a: Callable
    eval_b: Callable
    eval_c: Callable
    k: float
    kappa_a: float

    def interval(self, tau_a, tau_b):
        ea = np.exp(self.kappa_a * np.asarray(tau_a, float))
        return self.k * (self.eval_a(tau_b) * ea - 2 * self.eval_b(tau_b)
                         + self.eval_c(tau_b) / ea)


def interval_decomposition(scenario: Scenario) -> IntervalDecomposition:
    return IntervalDecomposition(
        eval_a=lambda t: scenario.abc(t)[0],
        eval_b=lambda t: scenario.abc(t)[1],
        eval_c=lambda t: scenario.abc(t)[2],
        k=scenario.k_constant(),
        kappa_a=scenario.kappa_alice,
    )


def d_of_tau_b(scenario: Scenario, tau_b):
    """D(tau_B) with the sign convention of each scenario's closed form."""
    d = scenario.d(tau_b)
    return float(d) if np.ndim(d) == 0 else d


def eta_roots(scenario: Scenario, tau_b):
    """Roots eta_pm = (B pm D)/A of A eta^2 - 2 B eta + C (vectorized).

    The root with the larger |B pm D| is formed directly and its partner
    from eta_+ eta_- = C/A, which avoids cancellation and keeps the finite
    root finite when A vanishes.
    """
    a, b, c = scenario.abc(tau_b)
    d = scenario.d(tau_b)
    bp, bm = b + d, b - d
    use_plus = np.abs(bp) >= np.abs(bm)
    with np.errstate(divide="ignore", invalid="ignore"):
        eta_p = np.where(use_plus, bp / a, c / bm)
        eta_m = np.where(use_plus, c / bp, bm / a)
    return eta_p, eta_m


def branch_boundaries(scenario: Scenario) -> tuple:
    """Proper times tau_B where A or C vanishes (a pole runs to infinity or to zero)."""
    return scenario.boundaries()


@dataclass(frozen=True)
class PoleBranch:
    """One pole tau_A of the integrand in the upper half plane at a given tau_B.

    ``imag_part`` is the epsilon-free imaginary part, (2n or 2n+1) pi / kappa_A.
    ``validity_region`` is the open tau_B interval between branch boundaries
    within which the pole keeps its class.
    """

    root: str
    n: int
    real_part: float
    imag_part: float
    imag_offset_class: PoleClass
    epsilon_sign: int
    validity_region: tuple = field(default=(-math.inf, math.inf))

    @property
    def value(self) -> complex:
        return complex(self.real_part, self.imag_part)


def poles_upper_half(scenario: Scenario, tau_b: float, n_max: int = 3) -> list:
    """Poles tau_{A pm n} in the upper half plane for n <= n_max.

    A pole with an even multiple of pi/kappa_A in its imaginary part is kept
    at n = 0 only when its epsilon shift points upward, i.e. sign(+-K D) > 0.
    """
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    tau_b = float(tau_b)
    bounds = branch_boundaries(scenario)
    if tau_b in bounds:
        raise BranchBoundary(f"tau_B = {tau_b} is a branch boundary", bounds)
    eta_p, eta_m = (float(e) for e in eta_roots(scenario, tau_b))
    if not (math.isfinite(eta_p) and math.isfinite(eta_m)) or eta_p == 0 or eta_m == 0:
        raise BranchBoundary(f"a pole degenerates at tau_B = {tau_b}", bounds)
    lo = max([b for b in bounds if b < tau_b], default=-math.inf)
    hi = min([b for b in bounds if b > tau_b], default=math.inf)
    kd = scenario.k_constant() * float(scenario.d(tau_b))
    ka = scenario.kappa_alice
    out = []
    for root, eta, sign in (("+", eta_p, 1), ("-", eta_m, -1)):
        eps_sign = 1 if sign * kd > 0 else -1
        re = math.log(abs(eta)) / ka
        if eta > 0:
            start = 0 if eps_sign > 0 else 1
            for n in range(start, n_max + 1):
                out.append(PoleBranch(root, n, re, 2 * n * math.pi / ka,
                                      PoleClass.EVEN_PI, eps_sign, (lo, hi)))
        else:
            for n in range(0, n_max + 1):
                out.append(PoleBranch(root, n, re, (2 * n + 1) * math.pi / ka,
                                      PoleClass.ODD_PI, eps_sign, (lo, hi)))
    return out
