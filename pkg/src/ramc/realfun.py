"""Real gamma-family kernels: ln Gamma, digamma, polygamma and friends.

Digamma and polygamma are evaluated by shifting the argument upward with
the recurrence psi^(m)(x+1) - psi^(m)(x) = (-1)^m m! / x^(m+1) until it is
at least ``_ASYMPTOTIC_FROM`` and then summing the Bernoulli asymptotic
expansion.  The slowly converging defining series are kept as
``digamma_series`` / ``polygamma_series`` so tests can check the fast
kernels against an independent route.

Two difference kernels, ``ln_gamma_ratio`` and ``digamma_diff``, return
ln Gamma(z+h) - ln Gamma(z) and psi(z+h) - psi(z) without the cancellation
that plain subtraction suffers for small ``h``.  Everything that has to
resolve B(a, b) - R(a, b) near a = 0 goes through them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, SizeError, UnsupportedOrderError

__all__ = [
    "CONSTANTS",
    "ConstantSet",
    "digamma",
    "digamma_diff",
    "digamma_series",
    "ln_gamma",
    "ln_gamma_ratio",
    "polygamma",
    "polygamma_series",
    "stirling_remainder",
]


@dataclass(frozen=True)
class ConstantSet:
    euler_gamma: float
    pi: float
    ln2: float
    zeta3: float
    pi_sq_over_6: float


CONSTANTS = ConstantSet(
    euler_gamma=0.57721566490153286060651209008240243,
    pi=math.pi,
    ln2=0.69314718055994530941723212145817657,
    zeta3=1.2020569031595942853997381615114500,
    pi_sq_over_6=1.6449340668482264364724151666460252,
)

EULER = CONSTANTS.euler_gamma

# B_2 .. B_20
_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
)

# Below this the argument is shifted; at x = 12 the last retained term of
# every expansion used here is below 1e-18 relative.
_ASYMPTOTIC_FROM = 12.0

# B_2k / (2k) for the digamma expansion.
_PSI_COEF = tuple(float(b / (2 * k)) for k, b in enumerate(_BERNOULLI, start=1))
# B_2k / (2k (2k-1)) for the Stirling series.
_STIRLING_COEF = tuple(
    float(b / (2 * k * (2 * k - 1))) for k, b in enumerate(_BERNOULLI, start=1)
)


def _check_positive(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"{name} must be a positive finite real, got {x!r}")
    return x


def ln_gamma(x: float) -> float:
    """Return ln Gamma(x) for x > 0."""
    x = _check_positive(x)
    # libm loses relative accuracy next to the zeros at 1 and 2; x - 1 and
    # x - 2 are exact on these windows.
    if 0.5 <= x < 1.5:
        return ln_gamma_ratio(1.0, x - 1.0)
    if 1.5 <= x <= 2.5:
        return ln_gamma_ratio(2.0, x - 2.0)
    return math.lgamma(x)


def _shift_count(x: float) -> int:
    return max(0, math.ceil(_ASYMPTOTIC_FROM - x))


def _digamma_asymptotic(x: float) -> float:
    inv2 = 1.0 / (x * x)
    acc = 0.0
    for coef in reversed(_PSI_COEF):
        acc = acc * inv2 + coef
    return math.log(x) - 0.5 / x - acc * inv2


def digamma(x: float) -> float:
    """Return psi(x) = d/dx ln Gamma(x) for x > 0."""
    x = _check_positive(x)
    n = _shift_count(x)
    # Smallest reciprocals first.
    shift = 0.0
    for k in range(n - 1, -1, -1):
        shift += 1.0 / (x + k)
    return _digamma_asymptotic(x + n) - shift


def _polygamma_asymptotic(m: int, x: float) -> float:
    # (-1)^(m+1) [ (m-1)!/x^m + m!/(2 x^(m+1))
    #              + sum_k B_2k (2k+m-1)! / ((2k)! x^(2k+m)) ]
    total = 0.0
    inv = 1.0 / x
    for k in range(len(_BERNOULLI), 0, -1):
        b = _BERNOULLI[k - 1]
        coef = float(b * Fraction(math.factorial(2 * k + m - 1), math.factorial(2 * k)))
        total += coef * inv ** (2 * k + m)
    total += math.factorial(m - 1) * inv**m + 0.5 * math.factorial(m) * inv ** (m + 1)
    return total if m % 2 == 1 else -total


def polygamma(m: int, x: float) -> float:
    """Return the m-th derivative of digamma at x, for m in {1, 2, 3}."""
    if m not in (1, 2, 3):
        raise UnsupportedOrderError(f"polygamma order must be 1, 2 or 3, got {m!r}")
    x = _check_positive(x)
    n = _shift_count(x)
    shift = 0.0
    for k in range(n - 1, -1, -1):
        shift += 1.0 / (x + k) ** (m + 1)
    # psi^(m)(x) = psi^(m)(x+n) - (-1)^m m! sum_{k<n} (x+k)^-(m+1)
    sign = 1.0 if m % 2 == 0 else -1.0
    return _polygamma_asymptotic(m, x + n) - sign * math.factorial(m) * shift


def ln_gamma_ratio(z: float, h: float) -> float:
    """Return ln Gamma(z+h) - ln Gamma(z) accurately, also for tiny |h|.

    Requires z > 0 and z + h > 0.
    """
    z = _check_positive(z, "z")
    h = float(h)
    if not math.isfinite(h) or z + h <= 0.0:
        raise DomainError(f"z + h must be positive, got z={z!r}, h={h!r}")
    if h == 0.0:
        return 0.0
    if h < 0.0:
        return -ln_gamma_ratio(z + h, -h)
    n = _shift_count(z)
    shift = 0.0
    for k in range(n - 1, -1, -1):
        shift += math.log1p(h / (z + k))
    zz = z + n
    t = h / zz
    lt = math.log1p(t)
    # (zz+h-1/2) ln(zz+h) - (zz-1/2) ln zz - h, rearranged.
    main = (zz - 0.5) * lt + h * math.log(zz + h) - h
    tail = 0.0
    for k in range(len(_STIRLING_COEF), 0, -1):
        p = 1 - 2 * k
        tail += _STIRLING_COEF[k - 1] * zz**p * math.expm1(p * lt)
    return main + tail - shift


def stirling_remainder(z: float) -> float:
    """Return ln Gamma(z) - [(z - 1/2) ln z - z + ln(2 pi)/2], for z >= 12."""
    if z < _ASYMPTOTIC_FROM:
        raise DomainError(f"Stirling remainder needs z >= {_ASYMPTOTIC_FROM}, got {z!r}")
    inv2 = 1.0 / (z * z)
    acc = 0.0
    for coef in reversed(_STIRLING_COEF):
        acc = acc * inv2 + coef
    return acc / z


def digamma_diff(z: float, h: float) -> float:
    """Return psi(z+h) - psi(z) accurately, also for tiny |h|.

    Requires z > 0 and z + h > 0.
    """
    z = _check_positive(z, "z")
    h = float(h)
    if not math.isfinite(h) or z + h <= 0.0:
        raise DomainError(f"z + h must be positive, got z={z!r}, h={h!r}")
    if h == 0.0:
        return 0.0
    if h < 0.0:
        return -digamma_diff(z + h, -h)
    n = _shift_count(z)
    shift = 0.0
    for k in range(n - 1, -1, -1):
        shift += h / ((z + k) * (z + h + k))
    zz = z + n
    lt = math.log1p(h / zz)
    main = lt + 0.5 * h / (zz * (zz + h))
    tail = 0.0
    for k in range(len(_PSI_COEF), 0, -1):
        tail -= _PSI_COEF[k - 1] * zz ** (-2 * k) * math.expm1(-2 * k * lt)
    return main + tail + shift


# -- slow reference series ---------------------------------------------------

_MAX_SERIES_TERMS = 10**7


def _em_power_tail(x: float, s: int, n: int, derivs: int = 4) -> float:
    """Euler-Maclaurin estimate of sum_{k>=n} (x+k)^-s without the integral."""
    y = x + n
    total = 0.5 * y ** (-s)
    for j in range(1, derivs + 1):
        r = 2 * j - 1
        # d^r/dk^r (x+k)^-s = (-1)^r s(s+1)...(s+r-1) (x+k)^-(s+r)
        rising = math.prod(range(s, s + r))
        deriv = -rising * y ** (-(s + r))
        total -= float(_BERNOULLI[j - 1]) / math.factorial(2 * j) * deriv
    return total


def _kahan_sum(terms) -> float:
    total = 0.0
    comp = 0.0
    for t in terms:
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total


def _check_terms(terms: int) -> int:
    if terms < 1 or terms > _MAX_SERIES_TERMS:
        raise SizeError(f"term count must lie in [1, {_MAX_SERIES_TERMS}], got {terms}")
    return terms


def digamma_series(x: float, terms: int = 100_000) -> float:
    """psi(x) = -gamma - 1/x + sum_{k>=1} x/(k(k+x)), summed term by term.

    The first ``terms`` summands are added with Kahan compensation and the
    remainder is closed with an Euler-Maclaurin tail.
    """
    x = _check_positive(x)
    n = _check_terms(terms)
    body = _kahan_sum(x / (k * (k + x)) for k in range(n, 0, -1))
    m = n + 1
    tail = math.log1p(x / m) + _em_power_tail(0.0, 1, m) - _em_power_tail(x, 1, m)
    return -EULER - 1.0 / x + body + tail


def polygamma_series(m: int, x: float, terms: int = 100_000) -> float:
    """psi^(m)(x) = (-1)^(m+1) m! sum_{k>=0} (x+k)^-(m+1), summed directly."""
    if m < 1:
        raise UnsupportedOrderError(f"series order must be >= 1, got {m!r}")
    x = _check_positive(x)
    n = _check_terms(terms)
    s = m + 1
    body = _kahan_sum((x + k) ** (-s) for k in range(n - 1, -1, -1))
    tail = (x + n) ** (-m) / m + _em_power_tail(x, s, n)
    sign = 1.0 if m % 2 == 1 else -1.0
    return sign * math.factorial(m) * (body + tail)
