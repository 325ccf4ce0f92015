"""Maclaurin coefficients of the zero-balanced hypergeometric ratio Q_p.

Submodules:

* ``realfun``  -- ln Gamma, digamma, polygamma and constants
* ``hyper``    -- beta, Ramanujan R, F(a, b; a+b; x), G and Q_p
* ``coeffs``   -- w, u*, u, alpha, d, theta and the S(p) quadratic
* ``oracles``  -- AGM, adaptive quadrature and series-division references
* ``verify``   -- grid checks returning ``CheckReport`` objects
* ``cli``      -- the ``ramc`` command
"""

from .coeffs import CoeffTable, PInterval, SQuadratic, alpha_sequence, build_table
from .errors import (
    ConvergenceError,
    DomainError,
    QuadratureError,
    RamcError,
    ScopeError,
    SizeError,
    UnsupportedOrderError,
)
from .hyper import CRestriction, Params, beta, hyp_zero_balanced, q_avv, q_p, ramanujan_r

__version__ = "0.1.0"

__all__ = [
    "CRestriction",
    "CoeffTable",
    "ConvergenceError",
    "DomainError",
    "PInterval",
    "Params",
    "QuadratureError",
    "RamcError",
    "SQuadratic",
    "ScopeError",
    "SizeError",
    "UnsupportedOrderError",
    "alpha_sequence",
    "beta",
    "build_table",
    "hyp_zero_balanced",
    "q_avv",
    "q_p",
    "ramanujan_r",
]
