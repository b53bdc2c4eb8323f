"""Numerical kernels shared by the physics modules.

Adaptive Gauss-Kronrod quadrature (vectorized over panels), a whole-line
integrator for exponentially decaying integrands, the modified Bessel
function K0, small eigenvalue problems and the binary entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import special

from .errors import DomainError, InvalidDecay, NonConvergence

__all__ = [
    "QuadratureConfig",
    "QuadResult",
    "adaptive_quadrature",
    "oscillatory_tail_integral",
    "bessel_k0",
    "complex_eigenvalues_4x4",
    "binary_entropy",
]

# 21-point Kronrod extension of the 10-point Gauss-Legendre rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Nodes on [-1, 1] in increasing order, with matching Kronrod and Gauss weights.
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG
GAUSS_WEIGHTS[11:20:2] = _WG[::-1]

# Depth of the exponential substitution next to a declared singular point.
_SINGULAR_DEPTH = 60.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets for the adaptive integrators."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200_000
    tail_decay_rate: float = 1.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be positive")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if not self.tail_decay_rate > 0:
            raise DomainError("tail_decay_rate must be positive")


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error_estimate: float
    subdivisions_used: int

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be non-negative")


def _segments(a, b, points, singular, min_offset=0.0):
    """Split [a, b] at ``points``; return (lo, hi, kind, anchor) tuples.

    kind 0 is a plain panel in t; kind 1 (2) is a panel in v with
    t = anchor + exp(v) (t = anchor - exp(v)), used next to a singular point.
    """
    cuts = sorted({float(a), float(b), *(float(p) for p in points if a < p < b)})
    sing = {float(s) for s in singular}
    out = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        left, right = lo in sing, hi in sing
        if left and right:
            mid = 0.5 * (lo + hi)
            out.append(_exp_segment(lo, mid - lo, 1, min_offset))
            out.append(_exp_segment(hi, hi - mid, 2, min_offset))
        elif left:
            out.append(_exp_segment(lo, hi - lo, 1, min_offset))
        elif right:
            out.append(_exp_segment(hi, hi - lo, 2, min_offset))
        else:
            out.append((lo, hi, 0, 0.0))
    return out


def _exp_segment(anchor, width, kind, min_offset=0.0):
    vmax = math.log(width)
    # Offsets near the float spacing at the anchor collapse onto the anchor.
    floor = math.log(abs(anchor) * 1e-13) if anchor != 0 else -math.inf
    if min_offset > 0:
        floor = max(floor, math.log(min(min_offset, 0.5 * width)))
    vmin = max(vmax - _SINGULAR_DEPTH, floor)
    return (vmin, vmax, kind, anchor)


def _gk_panels(f, lo, hi, kind, anchor):
    """Apply the 21-point rule to every panel at once."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    s = mid[:, None] + half[:, None] * NODES[None, :]
    jac = np.ones_like(s)
    t = s.copy()
    left = kind == 1
    right = kind == 2
    if left.any() or right.any():
        ev = np.exp(s[left | right])
        sign = np.where(left, 1.0, -1.0)[left | right][:, None]
        t[left | right] = anchor[left | right][:, None] + sign * ev
        jac[left | right] = ev
    vals = np.asarray(f(t.ravel()), dtype=complex).reshape(t.shape) * jac
    if not np.all(np.isfinite(vals)):
        raise NonConvergence("integrand returned non-finite values",
                             operation="adaptive_quadrature")
    kron = half * (vals @ KRONROD_WEIGHTS)
    gauss = half * (vals @ GAUSS_WEIGHTS)
    mean = kron / np.where(half == 0, 1.0, 2.0 * half)
    resasc = np.abs(half) * (np.abs(vals - mean[:, None]) @ KRONROD_WEIGHTS)
    diff = np.abs(kron - gauss)
    err = diff.copy()
    ok = (resasc > 0) & (diff > 0)
    err[ok] = resasc[ok] * np.minimum(1.0, (200.0 * diff[ok] / resasc[ok]) ** 1.5)
    return kron, err


def adaptive_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    cfg: QuadratureConfig | None = None,
    points: Iterable[float] = (),
    singular: Iterable[float] = (),
    initial_panels: int = 1,
    min_offset: float = 0.0,
) -> QuadResult:
    """Integrate a vectorized complex-valued ``f`` over [a, b].

    Panels are bisected until the summed Gauss-Kronrod error estimate is
    below ``max(abs_tol, rel_tol * |value|)``.

    Parameters
    ----------
    f : callable
        Maps a 1-D float array to an array of the same length.
    points : iterable of float
        Interior break points (discontinuities, kinks).
    singular : iterable of float
        Subset of the end/break points next to which the integrand has an
        integrable singularity or infinitely fast but bounded oscillation.
        Panels touching them are integrated in ``v = log|t - point|``.
    initial_panels : int
        Each segment is cut into this many equal panels before refinement.
    min_offset : float
        Points closer than this to a singular point are left out. Meant for
        bounded integrands that cannot be evaluated accurately there; the
        omitted measure is at most 2 * min_offset per singular point.
    """
    cfg = cfg or QuadratureConfig()
    if not a < b:
        raise DomainError(f"need a < b, got a={a}, b={b}")
    points = list(points)
    singular = list(singular)
    segs = _segments(a, b, points, singular, min_offset)
    lo, hi, kind, anchor = [], [], [], []
    for s_lo, s_hi, s_kind, s_anchor in segs:
        edges = np.linspace(s_lo, s_hi, max(int(initial_panels), 1) + 1)
        lo.extend(edges[:-1])
        hi.extend(edges[1:])
        kind.extend([s_kind] * (len(edges) - 1))
        anchor.extend([s_anchor] * (len(edges) - 1))
    lo, hi = np.array(lo), np.array(hi)
    kind, anchor = np.array(kind, dtype=int), np.array(anchor)
    span = hi - lo
    total_span = span.sum()
    val, err = _gk_panels(f, lo, hi, kind, anchor)
    subdivisions = 0
    while True:
        value = val.sum()
        error = err.sum()
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(value))
        if error <= tol:
            return QuadResult(complex(value), float(error), subdivisions)
        width = hi - lo
        splittable = width > 8 * np.finfo(float).eps * np.maximum(
            np.abs(lo), np.abs(hi))
        local = tol * width / total_span
        pick = splittable & (err > local)
        if not pick.any():
            cand = np.where(splittable, err, -1.0)
            if cand.max() <= 0:
                raise NonConvergence(
                    "panels reached floating-point resolution before tolerance",
                    operation="adaptive_quadrature",
                    diagnostics={"error": float(error), "tolerance": tol,
                                 "subdivisions": subdivisions})
            pick = np.zeros_like(pick)
            pick[np.argmax(cand)] = True
        n_new = int(pick.sum())
        if subdivisions + n_new > cfg.max_subdivisions:
            raise NonConvergence(
                f"subdivision budget {cfg.max_subdivisions} exhausted "
                f"(error {error:.3e} > tolerance {tol:.3e})",
                operation="adaptive_quadrature",
                diagnostics={"error": float(error), "tolerance": tol,
                             "subdivisions": subdivisions,
                             "breakpoints": points})
        subdivisions += n_new
        m = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], m])
        new_hi = np.concatenate([m, hi[pick]])
        new_kind = np.concatenate([kind[pick], kind[pick]])
        new_anchor = np.concatenate([anchor[pick], anchor[pick]])
        nv, ne = _gk_panels(f, new_lo, new_hi, new_kind, new_anchor)
        keep = ~pick
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        kind = np.concatenate([kind[keep], new_kind])
        anchor = np.concatenate([anchor[keep], new_anchor])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])


def oscillatory_tail_integral(
    f: Callable[[np.ndarray], np.ndarray],
    decay_rate: float,
    cfg: QuadratureConfig | None = None,
    *,
    scale: float | None = None,
    t0: float = 0.0,
    points: Sequence[float] = (),
    singular: Sequence[float] = (),
    initial_panels: int = 8,
) -> QuadResult:
    """Integral of ``f`` over the whole real line.

    Assumes ``|f(t)| <= scale * exp(-decay_rate * |t|)`` for ``|t| >= t0``.
    The domain is truncated at T where the analytic tail bound
    ``scale * exp(-decay_rate * T) / decay_rate`` falls below abs_tol / 4;
    that bound is added to the reported error. When ``scale`` is omitted it
    is estimated (with a factor 2 margin) from samples on [t0, t0 + 10/rate].
    """
    cfg = cfg or QuadratureConfig()
    if not decay_rate > 0:
        raise InvalidDecay(f"decay_rate must be positive, got {decay_rate}")
    t0 = abs(float(t0))
    if scale is None:
        probe = t0 + np.linspace(0.0, 10.0 / decay_rate, 41)
        probe = np.concatenate([probe, -probe])
        excl = np.array([p for p in singular], dtype=float)
        if excl.size:
            near = np.min(np.abs(probe[:, None] - excl[None, :]), axis=1) < 1e-9
            probe = probe[~near]
        vals = np.abs(np.asarray(f(probe), dtype=complex))
        scale = 2.0 * float(np.max(vals * np.exp(decay_rate * np.abs(probe))))
    if scale <= 0:
        horizon = max(t0, 1.0 / decay_rate)
    else:
        horizon = max(t0, math.log(4.0 * scale / (decay_rate * cfg.abs_tol)) / decay_rate)
    pts = [p for p in points if -horizon < p < horizon]
    sing = [p for p in singular if -horizon < p < horizon]
    res = adaptive_quadrature(f, -horizon, horizon, cfg, points=pts, singular=sing,
                              initial_panels=initial_panels)
    tail = 2.0 * scale * math.exp(-decay_rate * horizon) / decay_rate
    return QuadResult(res.value, res.error_estimate + tail, res.subdivisions_used)


def bessel_k0(z: float) -> float:
    """Modified Bessel function of the second kind, order zero, for z > 0."""
    z = float(z)
    if not z > 0:
        raise DomainError(f"K0 requires z > 0, got {z}")
    return float(special.k0(z))


def complex_eigenvalues_4x4(m) -> np.ndarray:
    """Eigenvalues of a 4x4 complex matrix (unordered)."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc), operation="complex_eigenvalues_4x4") from exc


def binary_entropy(x: float) -> float:
    """Binary entropy in bits, with 0 log 0 = 0."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary entropy needs 0 <= x <= 1, got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)
