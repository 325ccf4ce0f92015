"""Beta function, Ramanujan R-function and the zero-balanced 2F1.

``hyp_zero_balanced`` sums the Maclaurin series through the term ratio
w_{n+1}/w_n = (n+a)(n+b)/((n+1)(n+a+b)) for x <= 0.75.  Beyond that it
switches to the logarithmic expansion about x = 1,

    B(a,b) F(a,b;a+b;x) = sum_n [(a)_n (b)_n / n!^2]
                          [2 psi(n+1) - psi(n+a) - psi(n+b) - ln(1-x)] (1-x)^n,

whose n = 0 term is exactly R(a,b) - ln(1-x).  That split also yields the
remainder B F - (R - ln(1-x)), which ``q_p`` uses to avoid cancellation
as x -> 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConvergenceError, DomainError
from .realfun import (
    EULER,
    digamma,
    digamma_diff,
    ln_gamma,
    ln_gamma_ratio,
    stirling_remainder,
)

__all__ = [
    "CRestriction",
    "Params",
    "beta",
    "beta_c",
    "beta_f",
    "beta_minus_r",
    "elliptic_k_generalized",
    "g_ratio",
    "hyp_zero_balanced",
    "ln_beta",
    "q_avv",
    "q_p",
    "ramanujan_c",
    "ramanujan_r",
    "ramanujan_remainder",
]

SERIES_CUTOFF = 0.75
MAX_TERMS = 10**7
_REL_STOP = 1e-17


@dataclass(frozen=True)
class Params:
    """Parameter pair (a, b) of the zero-balanced family."""

    a: float
    b: float
    theorem_scope: bool = field(init=False)

    def __post_init__(self):
        for name in ("a", "b"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0.0:
                raise DomainError(f"{name} must be positive, got {v!r}")
            object.__setattr__(self, name, v)
        scope = self.a < 1.0 and self.b < 1.0 and self.a + self.b <= 1.0
        object.__setattr__(self, "theorem_scope", scope)


@dataclass(frozen=True)
class CRestriction:
    """A split point x of a fixed sum c, i.e. (a, b) = (x, c - x)."""

    c: float
    x: float

    def __post_init__(self):
        c, x = float(self.c), float(self.x)
        if not (math.isfinite(c) and c > 0.0):
            raise DomainError(f"c must be positive, got {c!r}")
        if not (0.0 < x < c):
            raise DomainError(f"x must lie in (0, c) = (0, {c!r}), got {x!r}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "x", x)

    @property
    def pair(self) -> tuple[float, float]:
        return self.x, self.c - self.x


def _pos(a: float, b: float) -> tuple[float, float]:
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b) and a > 0.0 and b > 0.0):
        raise DomainError(f"arguments must be positive, got ({a!r}, {b!r})")
    return (a, b) if a <= b else (b, a)


def ln_beta(a: float, b: float) -> float:
    """ln B(a, b); symmetric in its arguments by construction."""
    lo, hi = _pos(a, b)
    if lo >= 12.0:
        s = lo + hi
        return (
            (lo - 0.5) * math.log(lo / s)
            + (hi - 0.5) * math.log(hi / s)
            - 0.5 * math.log(s)
            + 0.5 * math.log(2.0 * math.pi)
            + stirling_remainder(lo)
            + stirling_remainder(hi)
            - stirling_remainder(s)
        )
    return ln_gamma(lo) - ln_gamma_ratio(hi, lo)


def beta(a: float, b: float) -> float:
    """B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    return math.exp(ln_beta(a, b))


def ramanujan_r(a: float, b: float) -> float:
    """R(a, b) = -psi(a) - psi(b) - 2 gamma."""
    lo, hi = _pos(a, b)
    return -(digamma(lo) + digamma(hi)) - 2.0 * EULER


def _zeta_int(k: int) -> float:
    """zeta(k) for integer k >= 3 by Euler-Maclaurin from n = 100."""
    n = 100
    head = [float(j) ** -k for j in range(1, n)]
    tail = [
        n ** (1.0 - k) / (k - 1),
        0.5 * n**-k,
        k * n ** (-k - 1.0) / 12.0,
        -k * (k + 1) * (k + 2) * n ** (-k - 3.0) / 720.0,
        k * (k + 1) * (k + 2) * (k + 3) * (k + 4) * n ** (-k - 5.0) / 30240.0,
    ]
    return math.fsum(head + tail)


_SMALL_SUM = 0.1
_ZETA = {k: _zeta_int(k) for k in range(3, 41)}
_ZETA[2] = math.pi**2 / 6.0


def _beta_minus_r_small(a: float, b: float) -> float:
    """B - R for a + b <= 0.1 from the zeta series of ln Gamma(1+z) and psi(1+z).

    The O(a + b) parts cancel identically; what is left is
    sum_{k>=3} (-1)^(k+1) zeta(k)/k sum_{i=1}^{k-2} C(k+1, i+1) a^i b^(k-1-i)
    plus (1/a + 1/b)(expm1(L) - L), with leading term 2 zeta(3) ab.
    """
    s, ab = a + b, a * b
    # L = -ab sum_{k>=2} (-1)^k zeta(k) P_k / k,  P_k = sum_j C(k,j) a^(j-1) b^(k-1-j)
    l_terms, main = [], []
    for k in range(2, 41):
        p_k = math.fsum(math.comb(k, j) * a ** (j - 1) * b ** (k - 1 - j) for j in range(1, k))
        l_terms.append((-1) ** (k + 1) * _ZETA[k] * p_k / k)
        if k >= 3:
            inner = math.fsum(
                math.comb(k + 1, i + 1) * a ** (i - 1) * b ** (k - 2 - i) for i in range(1, k - 1)
            )
            main.append((-1) ** (k + 1) * _ZETA[k] * inner / k)
            if abs(main[-1]) <= 1e-18 * abs(main[0]) and abs(l_terms[-1]) <= 1e-18 * abs(l_terms[0]):
                break
    big_l = ab * math.fsum(l_terms)
    # expm1(L) - L summed directly; |L| < 0.02 here
    excess, term, m = 0.0, big_l, 1
    while True:
        m += 1
        term *= big_l / m
        excess += term
        if abs(term) <= 1e-18 * abs(excess):
            break
    return ab * math.fsum(main) + s * excess / ab


def beta_minus_r(a: float, b: float) -> float:
    """B(a, b) - R(a, b) without the 1/a and 1/b cancellation.

    Both poles are peeled off: B = (1/a + 1/b) exp(L) with
    L = ln Gamma(1+a) + ln Gamma(1+b) - ln Gamma(1+a+b), and
    R = 1/a + 1/b - psi(1+a) - psi(1+b) - 2 gamma.  For a + b <= 0.1 the
    remaining first-order cancellation is removed by a zeta series.
    """
    lo, hi = _pos(a, b)
    if lo + hi <= _SMALL_SUM:
        return _beta_minus_r_small(lo, hi)
    big_l = ln_gamma_ratio(1.0, lo) - ln_gamma_ratio(1.0 + hi, lo)
    poles = 1.0 / lo + 1.0 / hi
    return poles * math.expm1(big_l) + digamma_diff(1.0, lo) + digamma_diff(1.0, hi)


def beta_c(spec: CRestriction) -> float:
    return beta(*spec.pair)


def ramanujan_c(spec: CRestriction) -> float:
    return ramanujan_r(*spec.pair)


# -- zero-balanced hypergeometric function ---------------------------------


def _check_x(x: float) -> float:
    x = float(x)
    if not (math.isfinite(x) and 0.0 <= x < 1.0):
        raise DomainError(f"x must lie in [0, 1), got {x!r}")
    return x


def _series_tail(a: float, b: float, x: float) -> float:
    """F(a, b; a+b; x) - 1, summed from the n = 1 term on."""
    if x == 0.0:
        return 0.0
    ab, s = a * b, a + b
    tail_factor = x / (1.0 - x)
    total, term = 0.0, 1.0
    n = 0
    while n < MAX_TERMS:
        term *= (n + a) * (n + b) / ((n + 1) * (n + s)) * x
        n += 1
        total += term
        # Term ratios stay below x once n >= ab, so the tail is geometric.
        if n >= ab and term * tail_factor <= _REL_STOP * (1.0 + total):
            return total
    raise ConvergenceError(f"2F1 series did not converge in {MAX_TERMS} terms at x={x}")


def _log_expansion(a: float, b: float, y: float) -> tuple[float, float]:
    """Return (R - ln y, remainder) so that B F = (R - ln y) + remainder."""
    ln_y = math.log(y)
    lead = ramanujan_r(a, b) - ln_y
    # k_n = 2 psi(n+1) - psi(n+a) - psi(n+b), advanced by its recurrence.
    k = digamma_diff(1.0, a - 1.0) + digamma_diff(1.0, b - 1.0)
    k = -k
    coef = 1.0
    ypow = 1.0
    rem = 0.0
    n = 0
    guard = a + b + a * b
    while n < MAX_TERMS:
        k += 2.0 / (n + 1) - 1.0 / (n + a) - 1.0 / (n + b)
        coef *= (n + a) * (n + b) / ((n + 1) * (n + 1))
        ypow *= y
        n += 1
        term = coef * (k - ln_y) * ypow
        rem += term
        if n >= guard and abs(term) <= _REL_STOP * (1.0 - y) * abs(lead + rem):
            return lead, rem
    raise ConvergenceError(f"log expansion did not converge in {MAX_TERMS} terms at y={y}")


def _bf_complement(a: float, b: float, x: float, y: float) -> float:
    """B F(a,b;a+b;x) given both x and its accurately known complement y."""
    if x <= SERIES_CUTOFF:
        return beta(a, b) * (1.0 + _series_tail(a, b, x))
    lead, rem = _log_expansion(a, b, y)
    return lead + rem


def hyp_zero_balanced(params: Params, x: float) -> float:
    """F(a, b; a+b; x) for 0 <= x < 1."""
    x = _check_x(x)
    a, b = params.a, params.b
    if x <= SERIES_CUTOFF:
        return 1.0 + _series_tail(a, b, x)
    return _bf_complement(a, b, x, 1.0 - x) / beta(a, b)


def beta_f(params: Params, x: float) -> float:
    """B(a, b) F(a, b; a+b; x)."""
    x = _check_x(x)
    return _bf_complement(params.a, params.b, x, 1.0 - x)


def ramanujan_remainder(params: Params, x: float) -> float:
    """B F(a, b; a+b; x) - R(a, b) + ln(1 - x); tends to 0 as x -> 1."""
    x = _check_x(x)
    a, b = params.a, params.b
    if x <= SERIES_CUTOFF:
        return beta_minus_r(a, b) + beta(a, b) * _series_tail(a, b, x) + math.log1p(-x)
    return _log_expansion(a, b, 1.0 - x)[1]


def elliptic_k_generalized(a: float, r: float) -> float:
    """K_a(r) = (pi/2) F(a, 1-a; 1; r^2) for 0 < a <= 1/2, 0 < r < 1."""
    a, r = float(a), float(r)
    if not 0.0 < a <= 0.5:
        raise DomainError(f"a must lie in (0, 1/2], got {a!r}")
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r!r}")
    x = r * r
    y = (1.0 - r) * (1.0 + r)
    return 0.5 * math.pi * _bf_complement(a, 1.0 - a, x, y) / beta(a, 1.0 - a)


def g_ratio(params: Params, x: float) -> float:
    """G(a, b, x) = B F / ln(e^R / (1 - x))."""
    x = _check_x(x)
    return beta_f(params, x) / (ramanujan_r(params.a, params.b) - math.log1p(-x))


def q_p(params: Params, p: float, x: float) -> float:
    """Q_p(x) = [B F / (p - ln(1-x)) - 1] / (1 - x) for p > 0, 0 < x < 1."""
    p = float(p)
    if not (math.isfinite(p) and p > 0.0):
        raise DomainError(f"p must be positive, got {p!r}")
    x = float(x)
    if not 0.0 < x < 1.0:
        raise DomainError(f"x must lie in (0, 1), got {x!r}")
    a, b = params.a, params.b
    y = 1.0 - x
    ln_y = math.log1p(-x)
    denom = p - ln_y
    assert denom > 0.0
    if x <= SERIES_CUTOFF:
        # B F - (p - ln y) = (B - R) + (R - p) + [B (F - 1) + ln y]
        numer = (
            beta_minus_r(a, b)
            + (ramanujan_r(a, b) - p)
            + (beta(a, b) * _series_tail(a, b, x) + ln_y)
        )
    else:
        # B F - (p - ln y) = (R - p) + remainder
        _, rem = _log_expansion(a, b, y)
        numer = (ramanujan_r(a, b) - p) + rem
    return numer / (y * denom)


def q_avv(params: Params, x: float) -> float:
    """Q(a, b; x) = (G - 1)/(1 - x), i.e. Q_p with p = R(a, b)."""
    return q_p(params, ramanujan_r(params.a, params.b), x)
