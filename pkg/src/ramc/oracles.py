"""Independent reference computations.

Nothing here calls into ``ramc.coeffs``; the routines exist to be compared
against the main evaluation paths:

* ``agm_complete_k`` -- K(r) from the arithmetic-geometric mean,
* ``integrate`` -- globally adaptive 15-point Gauss-Kronrod quadrature,
  used for the integral forms of B - R and of psi,
* ``alpha_by_division`` -- Maclaurin coefficients of Q_p by the plain
  power-series quotient U(x)/V(x) with compensated sums.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, QuadratureError, SizeError
from .hyper import Params, beta

__all__ = [
    "QuadResult",
    "agm_complete_k",
    "alpha_by_division",
    "delta_c_integral",
    "digamma_integral",
    "integrate",
    "power_series_divide",
]


@dataclass(frozen=True)
class QuadResult:
    value: float
    est_error: float
    evaluations: int


# -- AGM ---------------------------------------------------------------------

_AGM_MAX_ITER = 60


def agm_complete_k(r: float) -> float:
    """Complete elliptic integral K(r) = pi / (2 AGM(1, sqrt(1 - r^2)))."""
    r = float(r)
    if not (0.0 <= r < 1.0):
        raise DomainError(f"r must lie in [0, 1), got {r!r}")
    a, b = 1.0, math.sqrt((1.0 - r) * (1.0 + r))
    for _ in range(_AGM_MAX_ITER):
        if abs(a - b) <= 4.0 * math.ulp(a):
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * math.pi / (0.5 * (a + b))


# -- adaptive Gauss-Kronrod ---------------------------------------------------

# 15-point Kronrod abscissae on [0, 1) and weights; odd indices carry the
# embedded 7-point Gauss rule.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

_NODES = np.array([-x for x in _XGK[:-1]] + [0.0] + list(reversed(_XGK[:-1])))
_KRONROD_W = np.array(list(_WGK[:-1]) + [_WGK[-1]] + list(reversed(_WGK[:-1])))
_GAUSS_W = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GAUSS_W[_i] = _GAUSS_W[14 - _i] = _w
_GAUSS_W[7] = _WG[3]


def _gk15(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    fx = np.array([f(mid + half * t) for t in _NODES])
    k = half * float(_KRONROD_W @ fx)
    g = half * float(_GAUSS_W @ fx)
    floor = 50.0 * np.finfo(float).eps * half * float(_KRONROD_W @ np.abs(fx))
    return k, max(abs(k - g), floor)


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    rel_tol: float = 0.0,
    max_intervals: int = 4000,
) -> QuadResult:
    """Globally adaptive GK15 quadrature of f over [lo, hi].

    The interval with the largest error estimate is bisected until the
    summed estimate drops below max(tol, rel_tol * |value|).
    """
    if not hi > lo:
        raise DomainError(f"need hi > lo, got [{lo!r}, {hi!r}]")
    val, err = _gk15(f, lo, hi)
    heap = [(-err, lo, hi, val)]
    total_val, total_err = val, err
    evals = 15
    while total_err > max(tol, rel_tol * abs(total_val)):
        if len(heap) >= max_intervals:
            raise QuadratureError(
                f"no convergence after {max_intervals} intervals: "
                f"value {total_val!r}, error estimate {total_err:.3e} > {tol:.3e}"
            )
        neg_err, a, b, v = heapq.heappop(heap)
        m = 0.5 * (a + b)
        v1, e1 = _gk15(f, a, m)
        v2, e2 = _gk15(f, m, b)
        evals += 30
        heapq.heappush(heap, (-e1, a, m, v1))
        heapq.heappush(heap, (-e2, m, b, v2))
        # re-sum to keep the running totals free of drift
        total_val = math.fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)
    return QuadResult(total_val, total_err, evals)


# -- integral representations ---------------------------------------------------

# Absolute tolerances below roundoff of large integrals are unreachable.
_REL_FLOOR = 1e-13


def _delta_integrand(c: float, x: float) -> Callable[[float], float]:
    s1, s2 = x, c - x

    def g(t: float) -> float:
        lt = math.log(t)
        pw = math.exp(s1 * lt) + math.exp(s2 * lt)
        if t < 0.5:
            am1 = math.expm1(c * math.log1p(t))
            return pw * (am1 + t) / (t * (1.0 - t) * (am1 + 1.0)) - 2.0 / (1.0 - t)
        # (t^s - t)/(1 - t) without cancellation near t = 1
        omt = 1.0 - t
        e = -(math.exp(s1 * lt) * math.expm1((1.0 - s1) * lt)
              + math.exp(s2 * lt) * math.expm1((1.0 - s2) * lt)) / omt
        return (e - pw / (1.0 + t) ** c) / t

    return g


def delta_c_integral(c: float, x: float, tol: float = 1e-12) -> QuadResult:
    """B_c(x) - R_c(x) from its integral representation over (0, 1).

    The integrand's apparent pole at t = 1 is removed algebraically, so no
    cutoff near 1 is needed.  Requires 0 < x < c.
    """
    c, x = float(c), float(x)
    if not (c > 0.0 and 0.0 < x < c):
        raise DomainError(f"need 0 < x < c, got c={c!r}, x={x!r}")
    if tol < 1e-14:
        raise DomainError(f"tol must be >= 1e-14, got {tol!r}")
    res = integrate(_delta_integrand(c, x), 0.0, 1.0, tol=tol, rel_tol=_REL_FLOOR)
    return QuadResult(-res.value, res.est_error, res.evaluations)


def digamma_integral(x: float, tol: float = 1e-12) -> QuadResult:
    """psi(x) + gamma = int_0^1 (1 - t^(x-1)) / (1 - t) dt.

    For x < 1 the integral is taken at 1 + x, where the integrand is
    bounded, and the shift psi(x) = psi(1 + x) - 1/x is applied afterwards.
    """
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"x must be positive, got {x!r}")
    shift = 0.0
    s = x
    if x < 1.0:
        s, shift = 1.0 + x, 1.0 / x

    def g(t: float) -> float:
        return -math.expm1((s - 1.0) * math.log(t)) / (1.0 - t)

    res = integrate(g, 0.0, 1.0, tol=tol, rel_tol=_REL_FLOOR)
    return QuadResult(res.value - shift, res.est_error, res.evaluations)


# -- power-series division --------------------------------------------------------

_MAX_N = 10**7


def power_series_divide(num, den, n_max: int) -> np.ndarray:
    """First n_max+1 coefficients of num(x)/den(x); den[0] must be nonzero."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    if den[0] == 0.0:
        raise DomainError("denominator has zero constant term")
    out = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        m = min(n, len(den) - 1)
        acc = math.fsum((den[1 : m + 1] * out[n - 1 :: -1][:m]).tolist()) if m else 0.0
        top = num[n] if n < len(num) else 0.0
        out[n] = (top - acc) / den[0]
    return out


def alpha_by_division(params: Params, p: float, n_max: int) -> np.ndarray:
    """alpha_0..alpha_{n_max} from p alpha_n = u_n - sum_{k=1}^n alpha_{n-k}/k.

    The U(x) coefficients are rebuilt here term by term with a Neumaier
    running sum instead of reusing the vectorized tables of ``ramc.coeffs``.
    """
    if n_max < 1 or n_max > _MAX_N:
        raise SizeError(f"n_max must lie in [1, {_MAX_N}], got {n_max}")
    a, b = params.a, params.b
    big_b = beta(a, b)
    u = [0.0] * (n_max + 1)
    total, comp = big_b - p, 0.0
    u[0] = total
    w = 1.0
    for k in range(1, n_max + 1):
        w *= (k - 1 + a) * (k - 1 + b) / (k * (k - 1 + a + b))
        term = big_b * w - 1.0 / k
        s = total + term
        if abs(total) >= abs(term):
            comp += (total - s) + term
        else:
            comp += (term - s) + total
        total = s
        u[k] = total + comp
    inv_k = 1.0 / np.arange(1, n_max + 1, dtype=float)
    alpha = np.zeros(n_max + 1)
    alpha[0] = big_b / p - 1.0
    for n in range(1, n_max + 1):
        acc = math.fsum((alpha[n - 1 :: -1] * inv_k[:n]).tolist())
        alpha[n] = math.fsum((u[n], -acc)) / p
    return alpha

