"""The correlation integral I_E between the two detectors.

I_E = (1/4 pi^2) int int dtau_A dtau_B exp(i dE_A tau_A + i dE_B tau_B) / (Delta^2 - i eps).

The tau_A integral is done by residues: the contour closes in the upper
half plane, where the poles form towers spaced by 2 pi i / kappa_A, and each
tower sums geometrically. What remains is a one-dimensional integral over
tau_B, evaluated numerically, or a delta function when the integrand is a
pure phase in tau_B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import BranchBoundary, DomainError, WrongScenario
from .geometry import (
    AntiParallelLongitudinal,
    AntiParallelTransverse,
    BoostedPair,
    Detector,
    Oriented,
    ParallelDifferentAcceleration,
    ParallelLongitudinal,
    ParallelTransverse,
    Scenario,
    branch_boundaries,
    eta_roots,
)
from .numerics import QuadratureConfig, bessel_k0, oscillatory_tail_integral

__all__ = [
    "DeltaTerm",
    "FiniteValue",
    "BoundedOnly",
    "CrossTermResult",
    "InertialLimitParams",
    "check_detectors",
    "residue_reduced_integrand",
    "delta_coefficient",
    "delta_frequency",
    "generalized_sigma",
    "sin_ratio",
    "cross_term",
    "cross_term_upper_bound",
    "p_integral",
    "p_factor",
    "inertial_limit_cross_term",
    "inertial_limit_from_scenario",
    "swap_detectors",
]

_SIGMA_TAYLOR = 1e-6


@dataclass(frozen=True)
class DeltaTerm:
    """I_E = coefficient * delta(omega), delta taken in lambda_B = kappa_B tau_B."""

    coefficient: complex
    omega: float
    expression: str

    @property
    def vanishes(self) -> bool:
        return self.omega != 0.0


@dataclass(frozen=True)
class FiniteValue:
    value: complex
    error_estimate: float


@dataclass(frozen=True)
class BoundedOnly:
    upper_bound: float
    numeric_value: Optional[FiniteValue] = None

    @property
    def holds(self) -> bool:
        """Whether the bound covers the numeric value within its error."""
        nv = self.numeric_value
        return nv is None or self.upper_bound >= abs(nv.value) - nv.error_estimate

    @property
    def value(self) -> complex:
        return self.numeric_value.value if self.numeric_value else complex("nan")


CrossTermResult = Union[DeltaTerm, FiniteValue, BoundedOnly]


def check_detectors(scenario: Scenario, det_a: Detector, det_b: Detector) -> None:
    """Detector accelerations must match the scenario's worldlines."""
    for det, k, who in ((det_a, scenario.kappa_alice, "Alice"),
                        (det_b, scenario.kappa_bob, "Bob")):
        if not math.isclose(det.kappa, k, rel_tol=1e-12):
            raise DomainError(f"{who}'s detector has kappa={det.kappa} but the "
                              f"scenario requires {k}")


def _planck_denominator(x):
    return -math.expm1(-2 * math.pi * x)


def residue_reduced_integrand(scenario: Scenario, det_a: Detector, det_b: Detector, tau_b,
                              strict: bool = True):
    """Integrand f(tau_B) with I_E = int f dtau_B, poles in tau_A summed exactly.

    f = i/(4 pi K kappa_A D) e^{i dE_B tau_B} / (1 - e^{-2 pi x_A})
        * [W(eta_+) e^{i x_A ln|eta_+|} - W(eta_-) e^{i x_A ln|eta_-|}]

    with W = 1 for a positive root whose n = 0 pole lies in the upper half
    plane, exp(-2 pi x_A) for a positive root without it, and exp(-pi x_A)
    for a negative root.

    With ``strict`` false, points where a root degenerates (branch
    boundaries, a null set) evaluate to 0 instead of raising.
    """
    check_detectors(scenario, det_a, det_b)
    scalar = np.ndim(tau_b) == 0
    tau = np.atleast_1d(np.asarray(tau_b, dtype=float))
    ka = scenario.kappa_alice
    k = scenario.k_constant()
    x = det_a.delta_e / ka
    if isinstance(scenario, AntiParallelTransverse):
        # Both roots are negative with equal weights; D = sinh(sigma) may vanish.
        kb = scenario.kappa_bob
        amp = -kb * sin_ratio(x, scenario.sigma) / (4 * math.pi * math.sinh(math.pi * x))
        out = amp * np.exp(1j * delta_frequency(scenario, det_a, det_b) * tau)
        return complex(out[0]) if scalar else out

    d = np.asarray(scenario.d(tau), dtype=float)
    # D = 0 is a removable point (both roots negative and equal there).
    tiny = np.abs(d) < 1e-300
    if tiny.any():
        tau = np.where(tiny, tau + 1e-9 / scenario.kappa_bob, tau)
        d = np.asarray(scenario.d(tau), dtype=float)
    eta_p, eta_m = eta_roots(scenario, tau)
    bad = ~(np.isfinite(eta_p) & np.isfinite(eta_m)) | (eta_p == 0) | (eta_m == 0)
    bounds = branch_boundaries(scenario)
    if bounds:
        bad |= np.isin(tau, bounds)
    if bad.any():
        if strict:
            raise BranchBoundary("integrand evaluated on a branch boundary", bounds)
        eta_p = np.where(bad, 1.0, eta_p)
        eta_m = np.where(bad, 1.0, eta_m)

    w_skip = math.exp(-2 * math.pi * x)
    w_odd = math.exp(-math.pi * x)
    plus_in = k * d > 0
    w_p = np.where(eta_p > 0, np.where(plus_in, 1.0, w_skip), w_odd)
    w_m = np.where(eta_m > 0, np.where(plus_in, w_skip, 1.0), w_odd)
    bracket = (w_p * np.exp(1j * x * np.log(np.abs(eta_p)))
               - w_m * np.exp(1j * x * np.log(np.abs(eta_m))))
    pref = 1j / (4 * math.pi * k * ka * _planck_denominator(x))
    out = pref * np.exp(1j * det_b.delta_e * tau) * bracket / d
    if bad.any():
        out = np.where(bad, 0.0, out)
    return complex(out[0]) if scalar else out


def generalized_sigma(kappa_a: float, kappa_b: float, rho0: float) -> float:
    """sigma = arccosh M with M = (kA/kB + kB/kA + kA kB rho0^2)/2."""
    if not (kappa_a > 0 and kappa_b > 0 and rho0 >= 0):
        raise DomainError("need kappa_a, kappa_b > 0 and rho0 >= 0")
    return AntiParallelTransverse(kappa_a, kappa_b, rho0).sigma


def sin_ratio(x: float, sigma: float) -> float:
    """sin(x sigma)/sinh(sigma), with its sigma -> 0 limit x."""
    if sigma < _SIGMA_TAYLOR:
        return x * (1 - sigma * sigma * (x * x + 1) / 6)
    return math.sin(x * sigma) / math.sinh(sigma)


def delta_frequency(scenario: Scenario, det_a: Detector, det_b: Detector) -> float:
    """Omega with residue_reduced_integrand proportional to exp(i Omega tau_B)."""
    kb = scenario.kappa_bob
    if isinstance(scenario, AntiParallelTransverse):
        return det_b.delta_e - det_a.x * kb
    if isinstance(scenario, (ParallelTransverse, ParallelDifferentAcceleration)):
        return det_b.delta_e + det_a.x * kb
    raise WrongScenario(f"{scenario.name} has no delta-function cross term")


def delta_coefficient(scenario: Scenario, det_a: Detector, det_b: Detector) -> DeltaTerm:
    """Coefficient of delta(omega) for the three delta-function scenarios."""
    check_detectors(scenario, det_a, det_b)
    xa, xb = det_a.x, det_b.x
    planck = _planck_denominator(xa)
    if isinstance(scenario, ParallelTransverse):
        kr = scenario.kappa * scenario.rho0
        half = 0.5 * kr * kr
        root = kr * math.sqrt(1 + 0.25 * kr * kr)
        wp, wm = 1 + half + root, 1 + half - root
        # wm = 1/wp; form it that way to avoid cancellation at small shifts
        wm = 1 / wp
        num = wp ** (1j * xa) - math.exp(-2 * math.pi * xa) * wm ** (1j * xa)
        coef = 1j / (wp - wm) * num / planck
        return DeltaTerm(complex(coef), xa + xb, "parallel-transverse")
    if isinstance(scenario, ParallelDifferentAcceleration):
        s = scenario.sigma
        num = np.exp(1j * xa * s) - np.exp(-1j * xa * s) * math.exp(-2 * math.pi * xa)
        coef = 1j / (2 * math.sinh(s)) * num / planck
        return DeltaTerm(complex(coef), xa + xb, "parallel-different-acceleration")
    if isinstance(scenario, AntiParallelTransverse):
        s = scenario.sigma
        coef = -0.5 * sin_ratio(xa, s) / math.sinh(math.pi * xa)
        return DeltaTerm(complex(coef), xa - xb, "anti-parallel-transverse")
    raise WrongScenario(f"{scenario.name} has no delta-function cross term")


def _finite_integral(scenario, det_a, det_b, cfg):
    bounds = list(branch_boundaries(scenario))
    f = lambda t: residue_reduced_integrand(scenario, det_a, det_b, t, strict=False)
    # Boundaries sit within a few 1/kappa of the origin; start the tail there.
    t0 = max([abs(b) for b in bounds], default=0.0)
    res = oscillatory_tail_integral(f, scenario.kappa_bob, cfg, t0=t0,
                                    points=bounds, singular=bounds)
    return FiniteValue(res.value, res.error_estimate)


def cross_term(scenario: Scenario, det_a: Detector, det_b: Detector,
               cfg: QuadratureConfig | None = None) -> CrossTermResult:
    """Dispatch: DeltaTerm, BoundedOnly (with numeric value) or FiniteValue."""
    cfg = cfg or QuadratureConfig()
    check_detectors(scenario, det_a, det_b)
    if scenario.delta_family:
        return delta_coefficient(scenario, det_a, det_b)
    value = _finite_integral(scenario, det_a, det_b, cfg)
    try:
        bound = cross_term_upper_bound(scenario, det_a, det_b)
    except (WrongScenario, DomainError):
        return value
    return BoundedOnly(bound, value)


def p_integral(a: float) -> float:
    """int_R kappa dtau / (2 cosh(kappa tau) + a) in closed form, a > -2."""
    if not a > -2:
        raise DomainError("the integral diverges for a <= -2")
    h = 0.5 * a
    if h == 1:
        return 1.0
    if h > 1:
        r = math.sqrt(h * h - 1)
        return math.log(h + r) / r
    r = math.sqrt(1 - h * h)
    return math.atan2(r, h) / r


def p_factor(scenario: Scenario) -> float:
    """P for the longitudinally shifted scenarios (argument kappa |shift|)."""
    if isinstance(scenario, ParallelLongitudinal):
        return p_integral(scenario.kappa * abs(scenario.x0))
    if isinstance(scenario, AntiParallelLongitudinal):
        return p_integral(scenario.kappa * abs(scenario.x1))
    raise WrongScenario(f"no P factor for {scenario.name}")


def cross_term_upper_bound(scenario: Scenario, det_a: Detector, det_b: Detector) -> float:
    """Closed-form bound on |I_E| from the triangle and integral inequalities."""
    check_detectors(scenario, det_a, det_b)
    x = det_a.x
    if isinstance(scenario, ParallelLongitudinal):
        if scenario.x0 < 0:
            raise DomainError("the closed-form bound is stated for x0 > 0")
        kx = scenario.kappa * scenario.x0
        return p_factor(scenario) / (2 * math.pi * kx * math.tanh(math.pi * x))
    if isinstance(scenario, AntiParallelLongitudinal):
        kx = scenario.kappa * scenario.x1
        if kx < 0:
            return p_factor(scenario) / (2 * math.pi * abs(kx) * math.sinh(math.pi * x))
        return p_factor(scenario) / (math.pi * kx * _planck_denominator(x))
    if isinstance(scenario, Oriented):
        phi = scenario.phi
        t1, t2 = math.tanh(math.pi * x), math.tanh(0.5 * math.pi * x)
        return (1 - phi / math.pi * t1 * t2) / (4 * math.sin(phi) * t1)
    raise WrongScenario(f"no closed-form bound for {scenario.name}")


@dataclass(frozen=True)
class InertialLimitParams:
    """Relative speed v, transverse separation rho0 and the two gaps."""

    v: float
    rho0: float
    delta_e_a: float
    delta_e_b: float

    def __post_init__(self):
        if not 0 < self.v < 1:
            raise DomainError("v must lie in (0, 1)")
        for name in ("rho0", "delta_e_a", "delta_e_b"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    @property
    def gamma_inv(self) -> float:
        return math.sqrt(1 - self.v * self.v)

    @property
    def ell(self) -> float:
        return self.gamma_inv / self.v * self.rho0

    @property
    def epsilon_eff(self) -> float:
        return self.delta_e_b + self.delta_e_a / self.gamma_inv

    @property
    def p(self) -> float:
        return self.v * self.delta_e_a / self.gamma_inv


def inertial_limit_cross_term(params: InertialLimitParams) -> complex:
    """(i/2 pi)(sqrt(1-v^2)/v) K0(ell sqrt(eps^2 - p^2)), the kappa -> 0 limit."""
    e, p = params.epsilon_eff, params.p
    if not e > p:
        raise DomainError("need epsilon_eff > p")
    z = params.ell * math.sqrt((e - p) * (e + p))
    return 1j / (2 * math.pi) * params.gamma_inv / params.v * bessel_k0(z)


def inertial_limit_from_scenario(scenario: BoostedPair, det_a: Detector,
                                 det_b: Detector) -> complex:
    if not isinstance(scenario, BoostedPair):
        raise WrongScenario("the inertial limit belongs to BoostedPair")
    v = math.tanh(abs(scenario.alpha))
    return inertial_limit_cross_term(
        InertialLimitParams(v, scenario.rho0, det_a.delta_e, det_b.delta_e))


def swap_detectors(scenario: Scenario, det_a: Detector, det_b: Detector):
    """(scenario', det_a', det_b') with Alice and Bob exchanged."""
    return scenario.mirror(), det_b, det_a
