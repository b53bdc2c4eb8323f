"""Brute-force validators that avoid the residue machinery entirely.

The cross term is integrated directly in both proper times with the
Feynman prescription Delta^2 - i eps, the response rate from the Wightman
function on the accelerated worldline with a small imaginary shift of the
proper-time difference. Results at several eps are extrapolated to eps -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateSamples, DeltaScenario, DomainError
from .geometry import Detector, Scenario, branch_boundaries, eta_roots, interval_between
from .numerics import QuadratureConfig, adaptive_quadrature, oscillatory_tail_integral

__all__ = [
    "BOUNDARY_GAP",
    "OracleConfig",
    "Extrapolation",
    "epsilon_extrapolate",
    "brute_force_cross_term",
    "cross_term_samples",
    "brute_force_response_rate",
    "response_rate_samples",
    "k0_integral_representation",
    "k0_identity_integral",
]


BOUNDARY_GAP = 1e-6
# required ratio of the regulator to the rounding error of Delta^2
RESOLUTION = 1e-4


@dataclass(frozen=True)
class OracleConfig:
    """Settings of the brute-force integrals.

    ``window`` is the half-width L of the proper-time window; None means
    40/kappa. ``epsilon_values`` are dimensionless: with s the largest of
    kappa and the gaps, the regulator is eps/s for a proper time and eps/s^2
    for an interval. ``grid_density`` sets the number of initial panels of
    the outer pass per unit of s * tau.
    """

    window: Optional[float] = None
    epsilon_values: tuple = (1e-3, 5e-4)
    grid_density: float = 1.0
    cfg: QuadratureConfig = field(
        default_factory=lambda: QuadratureConfig(abs_tol=1e-7, rel_tol=1e-5,
                                                 max_subdivisions=100_000))

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilon_values)
        if len(eps) < 2:
            raise DomainError("at least two epsilon values are needed")
        if any(e <= 0 for e in eps):
            raise DomainError("epsilon values must be positive")
        if list(eps) != sorted(eps, reverse=True) or len(set(eps)) != len(eps):
            raise DomainError("epsilon values must be distinct and descending")
        object.__setattr__(self, "epsilon_values", eps)
        if self.window is not None and not self.window > 0:
            raise DomainError("window must be positive")
        if not self.grid_density > 0:
            raise DomainError("grid_density must be positive")

    def half_width(self, kappa: float) -> float:
        return self.window if self.window is not None else 40.0 / kappa


@dataclass(frozen=True)
class Extrapolation:
    value: complex
    discrepancy: float


def epsilon_extrapolate(samples: Sequence) -> Extrapolation:
    """Polynomial (Richardson) extrapolation of f(eps) to eps = 0.

    With two samples this is the linear rule
    (eps1 f2 - eps2 f1)/(eps1 - eps2). The discrepancy is the change from
    the extrapolation that drops the largest eps (or from the smallest-eps
    sample when only two are given).
    """
    pts = [(float(e), complex(v)) for e, v in samples]
    if len(pts) < 2:
        raise DegenerateSamples("need at least two samples")
    eps = [e for e, _ in pts]
    if len(set(eps)) != len(eps):
        raise DegenerateSamples("epsilon values must be distinct")

    def neville(sub):
        xs = [e for e, _ in sub]
        p = [v for _, v in sub]
        n = len(sub)
        for m in range(1, n):
            for i in range(n - m):
                p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i])
        return p[0]

    pts.sort(key=lambda s: -s[0])
    value = neville(pts)
    coarse = neville(pts[1:]) if len(pts) > 2 else pts[-1][1]
    return Extrapolation(complex(value), float(abs(value - coarse)))


def _real_roots(scenario, tau_b, lo, hi):
    ka = scenario.kappa_alice
    out = []
    for eta in eta_roots(scenario, tau_b):
        eta = float(eta)
        if math.isfinite(eta) and eta > 0:
            r = math.log(eta) / ka
            if lo < r < hi:
                out.append(r)
    return sorted(set(out))


def _unresolved(scenario, roots, tau_b, eps):
    """True if rounding in Delta^2 near a light-cone root swamps the regulator.

    This happens only far out in tau_B, where the worldlines are separated by
    e^{kappa |tau_B|} and the integrand has already decayed; the oracle drops
    those points.
    """
    du, dv, dy, dz = scenario.null_separation(np.asarray(roots), tau_b)
    scale = np.abs(du * dv) + np.asarray(dy) ** 2 + np.asarray(dz) ** 2
    return bool(np.any(np.finfo(float).eps * scale > RESOLUTION * eps))


def _check_family(scenario):
    if scenario.delta_family:
        raise DeltaScenario(f"{scenario.name}: the double integral grows with the "
                            "window; only the distributional limit is meaningful")


def cross_term_samples(scenario: Scenario, det_a: Detector, det_b: Detector,
                       oc: OracleConfig | None = None) -> list:
    """[(eps, I_E(eps))] from the windowed double integral."""
    oc = oc or OracleConfig()
    _check_family(scenario)
    kappa = min(scenario.kappa_alice, scenario.kappa_bob)
    L = oc.half_width(kappa)
    # the regulator and panel scale follow the fastest rate in the integrand,
    # which is a gap rather than kappa near the inertial limit
    rate = max(kappa, det_a.delta_e, det_b.delta_e)
    cfg = oc.cfg
    inner_cfg = QuadratureConfig(abs_tol=cfg.abs_tol * 0.1 / (2 * L) * (4 * math.pi ** 2),
                                 rel_tol=cfg.rel_tol * 1e-4,
                                 max_subdivisions=cfg.max_subdivisions)
    ka = scenario.kappa_alice
    bounds = []
    for b in sorted(branch_boundaries(scenario)):
        if -L < b < L and not (bounds and b - bounds[-1] < 2 * BOUNDARY_GAP / kappa):
            bounds.append(b)
    n_panels = max(1, int(math.ceil(oc.grid_density * 2 * L * rate / max(len(bounds) + 1, 1))))
    eps_floor = oc.epsilon_values[-1] / rate ** 2
    out = []
    for e in oc.epsilon_values:
        eps = e / rate ** 2

        def inner(tau_b):
            roots = _real_roots(scenario, tau_b, -L, L)
            if roots and _unresolved(scenario, roots, tau_b, eps_floor):
                return 0j
            f = lambda ta: np.exp(1j * det_a.delta_e * ta) / (
                interval_between(scenario, ta, tau_b) - 1j * eps)
            # log substitution only next to each root; e^{i dE tau_A} is
            # resolved better on plain panels further out
            near = [r + s / ka for r in roots for s in (-1.0, 1.0) if -L < r + s / ka < L]
            return adaptive_quadrature(f, -L, L, inner_cfg, points=roots + near,
                                       singular=roots, initial_panels=4).value

        def outer(tb):
            vals = np.array([inner(t) for t in np.ravel(tb)])
            return np.exp(1j * det_b.delta_e * np.ravel(tb)) * vals / (4 * math.pi ** 2)

        # Within BOUNDARY_GAP of a branch boundary a light-cone root runs off to
        # |tau_A| ~ log(1/gap) and the directly evaluated interval loses
        # precision; the bounded integrand there is dropped.
        res = adaptive_quadrature(outer, -L, L, cfg, points=bounds, singular=bounds,
                                  initial_panels=n_panels,
                                  min_offset=BOUNDARY_GAP / rate)
        out.append((e, res.value))
    return out


def brute_force_cross_term(scenario: Scenario, det_a: Detector, det_b: Detector,
                           oc: OracleConfig | None = None) -> complex:
    """I_E from (1/4 pi^2) int int e^{i dE_A tau_A + i dE_B tau_B}/(Delta^2 - i eps), eps -> 0."""
    return epsilon_extrapolate(cross_term_samples(scenario, det_a, det_b, oc)).value


def _wightman(s, kappa, eps):
    """G_W on the hyperbola as a function of s = tau - tau', shifted s -> s + i eps."""
    return -(kappa ** 2 / (16 * math.pi ** 2)) / np.sinh(0.5 * kappa * (s + 1j * eps)) ** 2


def _window_weight(s, L):
    """(2L - |s|)_+ - (L - |s|)_+: the window difference after integrating out tau + tau'."""
    a = np.abs(s)
    return np.clip(2 * L - a, 0.0, None) - np.clip(L - a, 0.0, None)


def response_rate_samples(det: Detector, oc: OracleConfig | None = None) -> list:
    """[(eps, rate(eps))], rate = [J(L) - J(L/2)] / L with J the window integral.

    J(L) = int int_{[-L, L]^2} e^{i dE (tau - tau')} G_W(tau - tau') reduces
    exactly to int (2L - |s|)_+ e^{i dE s} G_W(s) ds. The difference of two
    windows cancels the edge term of order log(L/eps)/L that a plain J(L)/2L
    would carry and leaves a weight that is flat across s = 0.
    """
    oc = oc or OracleConfig()
    k, de = det.kappa, det.delta_e
    rate = max(k, de)
    L = oc.half_width(k)
    cfg = QuadratureConfig(abs_tol=1e-12, rel_tol=1e-10,
                           max_subdivisions=oc.cfg.max_subdivisions)
    n_panels = max(1, int(math.ceil(oc.grid_density * 4 * L * rate)))
    out = []
    for e in oc.epsilon_values:
        eps = e / rate
        f = lambda s: _window_weight(s, L) * np.exp(1j * de * s) * _wightman(s, k, eps)
        res = adaptive_quadrature(f, -2 * L, 2 * L, cfg, points=(-L, 0.0, L),
                                  initial_panels=n_panels)
        out.append((e, res.value.real / L))
    return out


def brute_force_response_rate(det: Detector, oc: OracleConfig | None = None) -> float:
    """Excitation rate per unit proper time from the Wightman function, eps -> 0."""
    return float(epsilon_extrapolate(response_rate_samples(det, oc)).value.real)


def k0_integral_representation(z: float, cfg: QuadratureConfig | None = None) -> float:
    """K0(z) = int_0^inf exp(-z cosh t) dt."""
    if not z > 0:
        raise DomainError(f"z must be positive, got {z}")
    cfg = cfg or QuadratureConfig(abs_tol=1e-14, rel_tol=1e-13)
    # e^{-z cosh t} < 1e-300 beyond this point
    t_max = math.acosh(max(700.0 / z, 1.0)) + 1.0
    f = lambda t: np.exp(-z * np.cosh(t))
    return float(adaptive_quadrature(f, 0.0, t_max, cfg, initial_panels=8).value.real)


def k0_identity_integral(ell: float, eps_eff: float, p: float, damping: float,
                         cfg: QuadratureConfig | None = None) -> complex:
    """int dtau e^{i eps tau} e^{i (p + i damping) r}/r with r = sqrt(tau^2 + ell^2).

    The damping makes the integral absolutely convergent; its closed form is
    2 K0(ell sqrt(eps^2 - (p + i damping)^2)) on the principal branch.
    """
    if not (ell > 0 and damping > 0 and eps_eff > abs(p)):
        raise DomainError("need ell > 0, damping > 0 and eps_eff > |p|")
    cfg = cfg or QuadratureConfig(abs_tol=1e-12, rel_tol=1e-10)
    q = p + 1j * damping

    def f(t):
        r = np.hypot(t, ell)
        return np.exp(1j * (eps_eff * t + q * r)) / r

    # |f| <= e^{-damping |tau|}/ell since r >= max(|tau|, ell)
    return oscillatory_tail_integral(f, damping, cfg, scale=1.0 / ell).value
