"""Two-detector state, entanglement measures and per-scenario verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .crossterm import (
    BoundedOnly,
    CrossTermResult,
    DeltaTerm,
    check_detectors,
    cross_term,
    sin_ratio,
)
from .errors import ConditionNotMet, DomainError, InvalidState
from .geometry import AntiParallelTransverse, Detector, Scenario
from .numerics import QuadratureConfig, binary_entropy, complex_eigenvalues_4x4
from .response import response_rate

__all__ = [
    "Verdict",
    "DensityMatrixComponents",
    "EntanglementReport",
    "xi",
    "entanglement_condition_rates",
    "verdict",
    "concurrence_rate_per_proper_time",
    "assemble_density_matrix",
    "partial_transpose",
    "negativity_closed_form",
    "negativity_from_partial_transpose",
    "concurrence_closed_form",
    "concurrence_wootters",
    "entanglement_of_formation",
]


class Verdict(str, Enum):
    ENTANGLED = "Entangled"
    NOT_ENTANGLED_DELTA = "NotEntangledDelta"
    NOT_ENTANGLED_BOUNDED = "NotEntangledBounded"
    NOT_ENTANGLED_XI = "NotEntangledXi"


@dataclass(frozen=True)
class DensityMatrixComponents:
    """Order-c^2 entries of the detector state.

    P_AB, W_A and W_B are never evaluated by the physics here; they default
    to zero and ``offdiagonal_evaluated`` records that.

    ``p11`` is an optional order-c^4 population of |11>. The order-c^2
    matrix alone is not positive semidefinite once E != 0, which makes the
    Wootters concurrence vanish; any physical completion needs
    p11 >= |E|^2 to leading order.
    """

    c: float
    pa: float
    pb: float
    e: complex
    pab: complex = 0j
    wa: complex = 0j
    wb: complex = 0j
    offdiagonal_evaluated: bool = False
    p11: float = 0.0

    def __post_init__(self):
        if not self.c >= 0:
            raise DomainError("coupling c must be >= 0")
        if not (self.pa >= 0 and self.pb >= 0 and self.p11 >= 0):
            raise DomainError("excitation probabilities must be >= 0")


def xi(x: float, sigma: float) -> float:
    """|sin(x sigma)|/sinh(sigma) e^{pi x} - x; positive means entangled."""
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    if not sigma >= 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        # x (e^{pi x} - 1) without cancellation at small x
        return x * math.expm1(math.pi * x)
    return abs(sin_ratio(x, sigma)) * math.exp(math.pi * x) - x


def entanglement_condition_rates(rate_e: float, rate_a: float, rate_b: float) -> bool:
    """Strict PPT condition rate_A rate_B < |rate_E|^2."""
    if rate_a < 0 or rate_b < 0:
        raise DomainError("response rates must be >= 0")
    return rate_a * rate_b < abs(rate_e) ** 2


def concurrence_rate_per_proper_time(x: float, sigma: float, c: float,
                                     m_squared: float, kappa: float):
    """(concurrence rate, negativity rate) per unit proper time, symmetric case.

    C' = max[0, (c^2 kappa/pi) m^2 Xi/(e^{2 pi x} - 1)] and N' = C'/2.
    """
    if not (kappa > 0 and c >= 0 and m_squared >= 0):
        raise DomainError("need kappa > 0, c >= 0, m_squared >= 0")
    val = c * c * kappa / math.pi * m_squared * xi(x, sigma) / math.expm1(2 * math.pi * x)
    rate = max(0.0, val)
    return rate, 0.5 * rate


@dataclass(frozen=True)
class EntanglementReport:
    verdict: Verdict
    cross_term: CrossTermResult
    response_rates: tuple
    xi: Optional[float] = None
    concurrence_rate: Optional[float] = None
    negativity_rate: Optional[float] = None
    bound: Optional[float] = None
    notes: str = ""


def verdict(scenario: Scenario, det_a: Detector, det_b: Detector,
            cfg: QuadratureConfig | None = None, c: float = 1.0) -> EntanglementReport:
    """Classify the pair; rates are filled only in the symmetric anti-parallel case."""
    check_detectors(scenario, det_a, det_b)
    ct = cross_term(scenario, det_a, det_b, cfg)
    rates = (response_rate(det_a), response_rate(det_b))
    if isinstance(ct, DeltaTerm):
        anti = isinstance(scenario, AntiParallelTransverse)
        if not anti or not math.isclose(det_a.x, det_b.x, rel_tol=1e-12):
            return EntanglementReport(
                Verdict.NOT_ENTANGLED_DELTA, ct, rates,
                notes=f"I_E is supported at omega = {ct.omega:.6g} != 0")
        x = det_a.x
        s = scenario.sigma
        val = xi(x, s)
        v = Verdict.ENTANGLED if val > 0 else Verdict.NOT_ENTANGLED_XI
        symmetric = (math.isclose(det_a.kappa, det_b.kappa, rel_tol=1e-12)
                     and math.isclose(det_a.m_squared, det_b.m_squared, rel_tol=1e-12))
        if symmetric:
            cr, nr = concurrence_rate_per_proper_time(x, s, c, det_a.m_squared, det_a.kappa)
            return EntanglementReport(v, ct, rates, xi=val, concurrence_rate=cr,
                                      negativity_rate=nr)
        return EntanglementReport(v, ct, rates, xi=val,
                                  notes="rates need equal kappa and matrix elements")
    if isinstance(ct, BoundedOnly):
        return EntanglementReport(
            Verdict.NOT_ENTANGLED_BOUNDED, ct, rates, bound=ct.upper_bound,
            notes="finite I_E against response growing with the interaction time")
    return EntanglementReport(
        Verdict.NOT_ENTANGLED_BOUNDED, ct, rates,
        notes="finite I_E (no closed-form bound) against response growing "
              "with the interaction time")


def assemble_density_matrix(comp: DensityMatrixComponents) -> np.ndarray:
    """rho_AB to order c^2 in the basis |11>, |10>, |01>, |00>.

    The optional order-c^4 population p11 is added to |11> and removed from
    |00> so that the trace stays 1.
    """
    c2 = comp.c ** 2
    c4p11 = c2 * c2 * comp.p11
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = c4p11
    rho[0, 3] = c2 * comp.e
    rho[3, 0] = np.conj(rho[0, 3])
    rho[1, 1] = c2 * comp.pa
    rho[2, 2] = c2 * comp.pb
    rho[1, 2] = c2 * comp.pab
    rho[2, 1] = np.conj(rho[1, 2])
    rho[1, 3] = c2 * comp.wa
    rho[3, 1] = np.conj(rho[1, 3])
    rho[2, 3] = c2 * comp.wb
    rho[3, 2] = np.conj(rho[2, 3])
    rho[3, 3] = 1 - c2 * (comp.pa + comp.pb) - c4p11
    diag = rho.diagonal().real
    if np.any(diag < 0) or np.any(diag > 1):
        raise InvalidState("a diagonal entry leaves [0, 1]; the coupling is too large")
    if abs(np.trace(rho) - 1) > 1e-12:
        raise InvalidState("trace differs from 1")
    return rho


def partial_transpose(rho) -> np.ndarray:
    """Transpose over the second qubit."""
    r = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


def negativity_from_partial_transpose(rho) -> float:
    ev = complex_eigenvalues_4x4(partial_transpose(rho)).real
    return float(-ev[ev < 0].sum())


def _require_condition(pa, pb, abs_e):
    if not pa * pb < abs_e ** 2:
        raise ConditionNotMet(f"P_A P_B = {pa * pb:.6g} >= |E|^2 = {abs_e ** 2:.6g}")


def negativity_closed_form(c: float, pa: float, pb: float, abs_e: float) -> float:
    _require_condition(pa, pb, abs_e)
    return -0.5 * c * c * (pa + pb - math.sqrt((pa - pb) ** 2 + 4 * abs_e ** 2))


def concurrence_closed_form(c: float, pa: float, pb: float, abs_e: float) -> float:
    if pa * pb > abs_e ** 2:
        raise ConditionNotMet(f"P_A P_B = {pa * pb:.6g} > |E|^2 = {abs_e ** 2:.6g}")
    return 2 * c * c * (abs_e - math.sqrt(pa * pb))


_SYSY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))


def concurrence_wootters(rho) -> float:
    """max(0, l1 - l2 - l3 - l4) from the spin-flipped product rho rho~."""
    rho = np.asarray(rho, dtype=complex)
    tilde = _SYSY @ rho.conj() @ _SYSY
    ev = complex_eigenvalues_4x4(rho @ tilde)
    lam = np.sort(np.sqrt(np.clip(ev.real, 0.0, None)))[::-1]
    return float(max(0.0, lam[0] - lam[1:].sum()))


def entanglement_of_formation(conc: float) -> float:
    """h((1 + sqrt(1 - C^2))/2) in ebits."""
    if not 0.0 <= conc <= 1.0:
        raise DomainError(f"concurrence must lie in [0, 1], got {conc}")
    return binary_entropy(0.5 * (1 + math.sqrt(1 - conc * conc)))
