"""Excitation rate of a single uniformly accelerated detector.

The response integral I_I grows linearly with the interaction time, so only
its rate is represented: a Planck spectrum at the Unruh temperature kappa/2pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .geometry import Detector

__all__ = [
    "DURATION",
    "DurationFactor",
    "ResponseRate",
    "excitation_rate_per_proper_time",
    "excitation_rate_per_lambda",
    "response_rate",
]


class DurationFactor:
    """Marker for the formally infinite interaction time multiplying a rate."""

    def __repr__(self):
        return "DURATION"


DURATION = DurationFactor()


@dataclass(frozen=True)
class ResponseRate:
    per_proper_time: float
    per_lambda: float
    temperature: float


def _bose(y):
    """1/(e^y - 1) for y > 0, accurate at small y."""
    return 1.0 / math.expm1(y) if y < 700 else 0.0


def excitation_rate_per_lambda(x: float) -> float:
    """(1/2 pi) x/(e^{2 pi x} - 1), per unit lambda = kappa tau, x = dE/kappa."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    return x * _bose(2 * math.pi * x) / (2 * math.pi)


def excitation_rate_per_proper_time(detector: Detector) -> float:
    """(dE/2 pi)/(e^{2 pi dE/kappa} - 1)."""
    if not detector.kappa > 0:
        raise DomainError("kappa must be positive")
    return detector.kappa * excitation_rate_per_lambda(detector.x)


def response_rate(detector: Detector) -> ResponseRate:
    per_lambda = excitation_rate_per_lambda(detector.x)
    return ResponseRate(detector.kappa * per_lambda, per_lambda,
                        detector.kappa / (2 * math.pi))
