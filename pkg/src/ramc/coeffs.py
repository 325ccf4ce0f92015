"""Integer-indexed sequences behind the Maclaurin coefficients of Q_p.

With w_n the series coefficients of F(a, b; a+b; x),

    u*_0 = B - p,   u*_k = B w_k - 1/k,   u_n = u*_0 + ... + u*_n,

and Q_p(x) = sum alpha_n x^n is the quotient U(x)/V(x) divided by (1 - x),
where V has coefficients p, 1, 1/2, 1/3, ...  Eliminating the harmonic
convolution between consecutive indices gives

    p (n+1) alpha_{n+1} = d_n + (n p - (n+1)) alpha_n
                          + sum_{k=1}^{n} (n-k) / (k(k+1)) alpha_{n-k},

with d_n = (n+1) u_{n+1} - n u_n = n u*_{n+1} + u_{n+1}.  Each step is a
dot product of length n, so a table of size N costs O(N^2).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ScopeError, SizeError
from .hyper import Params, beta, ramanujan_r

__all__ = [
    "CoeffTable",
    "EMembership",
    "NEG_TOL",
    "PInterval",
    "SQuadratic",
    "admissible_p",
    "alpha_sequence",
    "build_table",
    "d_theta_sequences",
    "e_membership",
    "max_n",
    "negativity_margin",
    "s_quadratic",
    "u_sequences",
    "w_sequence",
]

DEFAULT_MAX_N = 10**7
NEG_TOL = 1e-13


def max_n() -> int:
    """Size cap for all tables; the RAMC_MAX_N environment variable overrides it."""
    raw = os.environ.get("RAMC_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        cap = int(raw)
    except ValueError as exc:
        raise SizeError(f"RAMC_MAX_N must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise SizeError(f"RAMC_MAX_N must be positive, got {cap}")
    return cap


def _check_n(n_max: int, lowest: int) -> int:
    if isinstance(n_max, bool) or int(n_max) != n_max:
        raise SizeError(f"n_max must be an integer, got {n_max!r}")
    n_max = int(n_max)
    if n_max < lowest:
        raise SizeError(f"n_max must be at least {lowest}, got {n_max}")
    cap = max_n()
    if n_max > cap:
        raise SizeError(f"n_max={n_max} exceeds the cap {cap} (set RAMC_MAX_N to raise it)")
    return n_max


def _check_p(p: float) -> float:
    p = float(p)
    if not (math.isfinite(p) and p > 0.0):
        raise DomainError(f"p must be positive, got {p!r}")
    return p


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# -- sequences ---------------------------------------------------------------


def w_sequence(params: Params, n_max: int) -> np.ndarray:
    """w_0..w_{n_max}, coefficients of F(a, b; a+b; x)."""
    n_max = _check_n(n_max, 0)
    a, b = params.a, params.b
    n = np.arange(n_max, dtype=float)
    ratios = (n + a) * (n + b) / ((n + 1.0) * (n + a + b))
    w = np.empty(n_max + 1)
    w[0] = 1.0
    # cumprod multiplies left to right, so w[n+1] == w[n] * ratio[n] exactly
    np.cumprod(ratios, out=w[1:])
    return w


def u_sequences(params: Params, p: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """(u*, u) up to index n_max, where u is the running sum of u*."""
    p = _check_p(p)
    n_max = _check_n(n_max, 1)
    w = w_sequence(params, n_max)
    big_b = beta(params.a, params.b)
    k = np.arange(1, n_max + 1, dtype=float)
    u_star = np.empty(n_max + 1)
    u_star[0] = big_b - p
    u_star[1:] = big_b * w[1:] - 1.0 / k
    return u_star, np.cumsum(u_star)


def _d_from_u(u_star: np.ndarray, u: np.ndarray, count: int) -> np.ndarray:
    n = np.arange(count, dtype=float)
    return n * u_star[1 : count + 1] + u[1 : count + 1]


def alpha_sequence(params: Params, p: float, n_max: int) -> np.ndarray:
    """alpha_0..alpha_{n_max} via the eliminated recurrence.

    Seeds are alpha_0 = B/p - 1 and alpha_1 = -S(p)/p^2.
    """
    p = _check_p(p)
    n_max = _check_n(n_max, 1)
    a, b = params.a, params.b
    big_b = beta(a, b)
    alpha = np.zeros(n_max + 1)
    alpha[0] = big_b / p - 1.0
    alpha[1] = -s_value(params, p) / (p * p)
    if n_max == 1:
        return alpha
    u_star, u = u_sequences(params, p, n_max)
    d = _d_from_u(u_star, u, n_max)
    k = np.arange(1, n_max + 1, dtype=float)
    # kernel[k] = 1/(k(k+1)); index 0 is never read
    kernel = np.zeros(n_max + 1)
    kernel[1:] = 1.0 / (k * (k + 1.0))
    # j * alpha_j, so the convolution weight (n-k) rides on alpha_{n-k}
    j_alpha = np.zeros(n_max + 1)
    j_alpha[1] = alpha[1]
    for n in range(1, n_max):
        conv = float(j_alpha[:n] @ kernel[n:0:-1])
        nxt = (d[n] + (n * p - (n + 1)) * alpha[n] + conv) / (p * (n + 1))
        alpha[n + 1] = nxt
        j_alpha[n + 1] = (n + 1) * nxt
    return alpha


def d_theta_sequences(params: Params, p: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """(d, theta) for n = 0..n_max.

    d_n = (n+1) u_{n+1} - n u_n and theta_n = n B w_n (n+a+b+ab)/(n+a+b).
    Index 0 holds the formula values d_0 = u_1 and theta_0 = 0; the
    identity d_n - d_{n-1} = (theta_n - 1)/n holds from n = 1 on.
    """
    p = _check_p(p)
    n_max = _check_n(n_max, 1)
    a, b = params.a, params.b
    u_star, u = u_sequences(params, p, n_max + 1)
    d = _d_from_u(u_star, u, n_max + 1)
    w = w_sequence(params, n_max)
    n = np.arange(n_max + 1, dtype=float)
    theta = n * beta(a, b) * w * (n + a + b + a * b) / (n + a + b)
    return d, theta


def negativity_margin(alpha: np.ndarray) -> np.ndarray:
    """alpha_n + NEG_TOL * max(1, max_{k<=n} |alpha_k|); >= 0 means non-negative."""
    scale = np.maximum(1.0, np.maximum.accumulate(np.abs(alpha)))
    return alpha + NEG_TOL * scale


# -- p interval and S(p) -------------------------------------------------------


@dataclass(frozen=True)
class SQuadratic:
    """S(p) = coeff2 p^2 + coeff1 p + coeff0 with its real roots p1 <= p2.

    The roots are NaN when the discriminant is negative.
    """

    coeff2: float
    coeff1: float
    coeff0: float
    p1: float
    p2: float

    def __call__(self, p: float) -> float:
        return (self.coeff2 * p + self.coeff1) * p + self.coeff0


@dataclass(frozen=True)
class PInterval:
    lo: float
    hi: float
    nonempty: bool

    def __contains__(self, p: float) -> bool:
        return self.lo <= p <= self.hi


def s_quadratic(params: Params) -> SQuadratic:
    a, b = params.a, params.b
    big_b = beta(a, b)
    c1 = -big_b * (a + b + a * b) / (a + b)
    c0 = big_b
    disc = c1 * c1 - 4.0 * c0
    if disc < 0.0:
        return SQuadratic(1.0, c1, c0, math.nan, math.nan)
    # c1 < 0, so -c1 + sqrt(disc) has no cancellation
    big = 0.5 * (-c1 + math.sqrt(disc))
    return SQuadratic(1.0, c1, c0, c0 / big, big)


def s_value(params: Params, p: float) -> float:
    """S(p) = p^2 - B (a+b+ab)/(a+b) p + B."""
    return s_quadratic(params)(p)


def admissible_p(params: Params) -> PInterval:
    """The interval 2 <= p <= R(a, b) on which absolute monotonicity is proven."""
    if not params.theorem_scope:
        raise ScopeError(
            f"(a, b) = ({params.a}, {params.b}) is outside a, b < 1, a + b <= 1"
        )
    hi = ramanujan_r(params.a, params.b)
    return PInterval(2.0, hi, hi > 2.0)


@dataclass(frozen=True)
class EMembership:
    """Membership of p in the four sets; iterates as (e1, e2, e3, e4).

    e3 is decided by p <= R.  ``probe_min_d`` is min d_n over the probe and
    ``probe_consistent`` is False only if p <= R yet some probed d_n < 0.
    """

    e1: bool
    e2: bool
    e3: bool
    e4: bool
    probe_min_d: float
    probe_consistent: bool

    def __iter__(self):
        return iter((self.e1, self.e2, self.e3, self.e4))


def e_membership(params: Params, p: float, n_probe: int = 1000) -> EMembership:
    p = _check_p(p)
    n_probe = _check_n(n_probe, 2)
    a, b = params.a, params.b
    big_b = beta(a, b)
    e3 = p <= ramanujan_r(a, b)
    d, _ = d_theta_sequences(params, p, n_probe)
    min_d = float(np.min(d))
    return EMembership(
        e1=p <= big_b,
        e2=s_value(params, p) <= 0.0,
        e3=e3,
        e4=p >= 2.0,
        probe_min_d=min_d,
        probe_consistent=(not e3) or min_d >= 0.0,
    )


# -- full table --------------------------------------------------------------


@dataclass(frozen=True)
class CoeffTable:
    """Aligned read-only sequences for one (a, b, p) up to index n_max."""

    params: Params
    p: float
    n_max: int
    w: np.ndarray
    u_star: np.ndarray
    u: np.ndarray
    alpha: np.ndarray
    d: np.ndarray
    theta: np.ndarray

    def rows(self):
        for n in range(self.n_max + 1):
            yield (n, self.w[n], self.u_star[n], self.u[n], self.alpha[n], self.d[n], self.theta[n])


def build_table(params: Params, p: float, n_max: int) -> CoeffTable:
    p = _check_p(p)
    n_max = _check_n(n_max, 1)
    u_star, u = u_sequences(params, p, n_max)
    d, theta = d_theta_sequences(params, p, n_max)
    return CoeffTable(
        params=params,
        p=p,
        n_max=n_max,
        w=_frozen(w_sequence(params, n_max)),
        u_star=_frozen(u_star),
        u=_frozen(u),
        alpha=_frozen(alpha_sequence(params, p, n_max)),
        d=_frozen(d),
        theta=_frozen(theta),
    )
