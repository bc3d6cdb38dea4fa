"""Hyperbolic-exponential (HEX) tail extrapolation on top of SLN or SABR.

Any positive OTM price curve can be written through a transform ``chi``::

    put  = (P_atm / ln 2) * ln(1 + exp(+chi_P(x)))
    call = (P_atm / ln 2) * ln(1 + exp(-chi_C(x)))

so that ``chi = 0`` at the money returns ``P_atm`` and the linear choice
``chi = x F ln 2 / P_atm`` makes the CDF a logistic (tanh) curve.  The base
model supplies ``chi`` through the inverse transform
``chi_P = ln(2^(put/P_atm) - 1)``; the tails are bent by adding damped cubic
polynomials without constant term, ``theta(x) * exp(-a / x^2)``, to
``chi_P`` for ``x < 0`` and to ``chi_C`` for ``x > 0``.  The other side of
each strike follows from put-call parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .sabr import SabrParams, sabr_call, sabr_put
from .sln import SlnParams, sln_atm_price, sln_call, sln_put

LN2 = math.log(2.0)


@dataclass(frozen=True)
class HexParams:
    base: SlnParams | SabrParams
    theta_left: tuple[float, float, float] = (0.0, 0.0, 0.0)
    theta_right: tuple[float, float, float] = (0.0, 0.0, 0.0)
    a: float = 0.01
    pi_atm: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "theta_left", tuple(float(c) for c in self.theta_left))
        object.__setattr__(self, "theta_right", tuple(float(c) for c in self.theta_right))
        if len(self.theta_left) != 3 or len(self.theta_right) != 3:
            raise DomainError("HEX tail polynomials take exactly three coefficients each")
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"damping constant a must be positive, got {self.a}")
        if not (math.isfinite(self.pi_atm) and self.pi_atm > 0):
            raise DomainError(f"pi_atm must be positive, got {self.pi_atm}")

    def to_dict(self) -> dict:
        kind = "sln" if isinstance(self.base, SlnParams) else "sabr"
        return {
            "base": {kind: self.base.to_dict()},
            "theta_L": list(self.theta_left),
            "theta_R": list(self.theta_right),
            "a": self.a,
            "pi_atm": self.pi_atm,
        }


def chi_from_price(price, pi_atm: float, side: str = "put", *, strict: bool = True):
    """Inverse transform: OTM price -> chi.  ``side`` is 'put' or 'call'.

    With ``strict=False`` a zero price (outside the base model's support)
    maps to an infinite chi, which the forward transform sends back to zero.
    """
    price = np.asarray(price, dtype=float)
    if np.any(price < 0) or (strict and np.any(price == 0)):
        raise DomainError("HEX transform needs strictly positive prices")
    if pi_atm <= 0:
        raise DomainError("pi_atm must be positive")
    with np.errstate(divide="ignore"):
        chi = np.log(np.expm1(price * LN2 / pi_atm))
    return chi if side == "put" else -chi


def price_from_chi(chi, pi_atm: float, side: str = "put"):
    chi = np.asarray(chi, dtype=float)
    arg = chi if side == "put" else -chi
    return pi_atm / LN2 * np.logaddexp(0.0, arg)


def hex_chi_from_base(base_put, base_call, x, pi_atm: float):
    """chi_P from base puts where x <= 0 and chi_C from base calls where x > 0."""
    x = np.asarray(x, dtype=float)
    put = np.asarray(base_put, dtype=float)
    call = np.asarray(base_call, dtype=float)
    return np.where(
        x <= 0,
        chi_from_price(np.where(x <= 0, put, 1.0), pi_atm, "put"),
        chi_from_price(np.where(x > 0, call, 1.0), pi_atm, "call"),
    )


def tail_correction(theta, a: float, x):
    """theta(x) exp(-a/x^2) with theta a cubic without constant term; 0 at x = 0."""
    x = np.asarray(x, dtype=float)
    c1, c2, c3 = theta
    poly = x * (c1 + x * (c2 + x * c3))
    with np.errstate(divide="ignore", over="ignore"):
        damp = np.where(x == 0, 0.0, np.exp(-a / np.where(x == 0, 1.0, x * x)))
    return poly * damp


def base_put(base: SlnParams | SabrParams, F: float, K, T: float, D: float = 1.0, V: float = 1.0):
    if isinstance(base, SlnParams):
        return sln_put(base, F, K, D, V, strict=False)
    return sabr_put(base, F, K, T, D, V)


def base_call(base: SlnParams | SabrParams, F: float, K, T: float, D: float = 1.0, V: float = 1.0):
    if isinstance(base, SlnParams):
        return sln_call(base, F, K, D, V, strict=False)
    return sabr_call(base, F, K, T, D, V)


def base_atm_price(base: SlnParams | SabrParams, F: float, T: float, D: float = 1.0, V: float = 1.0) -> float:
    if isinstance(base, SlnParams):
        return sln_atm_price(base, F, D, V)
    return float(sabr_put(base, F, F, T, D, V))


def hex_put(p: HexParams, F: float, K, T: float = 1.0, D: float = 1.0, V: float = 1.0):
    scalar = np.ndim(K) == 0
    K = np.atleast_1d(np.asarray(K, dtype=float))
    x = (K - F) / F
    bput = np.atleast_1d(np.asarray(base_put(p.base, F, K, T, D, V), dtype=float))
    bcall = np.atleast_1d(np.asarray(base_call(p.base, F, K, T, D, V), dtype=float))
    left = x < 0
    right = x > 0
    out = bput.copy()
    # tails only; x == 0 keeps the base price
    if np.any(left):
        chi = chi_from_price(bput[left], p.pi_atm, "put", strict=False) + tail_correction(p.theta_left, p.a, x[left])
        out[left] = price_from_chi(chi, p.pi_atm, "put")
    if np.any(right):
        chi = chi_from_price(bcall[right], p.pi_atm, "call", strict=False) + tail_correction(p.theta_right, p.a, x[right])
        out[right] = price_from_chi(chi, p.pi_atm, "call") - D * V * (F - K[right])
    return float(out[0]) if scalar else out


def hex_call(p: HexParams, F: float, K, T: float = 1.0, D: float = 1.0, V: float = 1.0):
    scalar = np.ndim(K) == 0
    K = np.atleast_1d(np.asarray(K, dtype=float))
    x = (K - F) / F
    bput = np.atleast_1d(np.asarray(base_put(p.base, F, K, T, D, V), dtype=float))
    bcall = np.atleast_1d(np.asarray(base_call(p.base, F, K, T, D, V), dtype=float))
    left = x < 0
    right = x > 0
    out = bcall.copy()
    if np.any(left):
        chi = chi_from_price(bput[left], p.pi_atm, "put", strict=False) + tail_correction(p.theta_left, p.a, x[left])
        out[left] = price_from_chi(chi, p.pi_atm, "put") + D * V * (F - K[left])
    if np.any(right):
        chi = chi_from_price(bcall[right], p.pi_atm, "call", strict=False) + tail_correction(p.theta_right, p.a, x[right])
        out[right] = price_from_chi(chi, p.pi_atm, "call")
    return float(out[0]) if scalar else out
