"""Shifted log-normal (displaced diffusion) prices, CDF and density.

Moneyness ``x = (K - F) / F``.  The terminal value is ``S = F (1 + f)`` with
``1 + q f`` log-normal of total volatility ``|s|``, ``s = q * sigma_bar``.
For ``q < 0`` the support is bounded above at ``F (1 + 1/|q|)``; for
``q > 0`` it is bounded below at ``F (1 - 1/q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ..errors import DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)

# below this |q * sigma_bar| the closed form is replaced by its Bachelier limit
SMALL_SKEW = 1e-8


@dataclass(frozen=True)
class SlnParams:
    sigma_bar: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma_bar) and self.sigma_bar > 0):
            raise DomainError(f"sigma_bar must be positive, got {self.sigma_bar}")
        if not math.isfinite(self.q):
            raise DomainError(f"q must be finite, got {self.q}")

    @property
    def skew(self) -> float:
        """s = q * sigma_bar."""
        return self.q * self.sigma_bar

    def to_dict(self) -> dict:
        return {"sigma_bar": self.sigma_bar, "q": self.q}


def _npdf(z):
    return np.exp(-0.5 * z * z) / SQRT_2PI


def bachelier_put(F, K, sigma_abs, D=1.0, V=1.0):
    """Normal-model put with absolute total volatility ``sigma_abs``."""
    K = np.asarray(K, dtype=float)
    z = (K - F) / sigma_abs
    return D * V * ((K - F) * ndtr(z) + sigma_abs * _npdf(z))


def bachelier_call(F, K, sigma_abs, D=1.0, V=1.0):
    K = np.asarray(K, dtype=float)
    z = (F - K) / sigma_abs
    return D * V * ((F - K) * ndtr(z) + sigma_abs * _npdf(z))


def sln_support(p: SlnParams, F: float) -> tuple[float, float]:
    """Open interval of strikes where the density is positive."""
    if abs(p.skew) < SMALL_SKEW:
        return -math.inf, math.inf
    edge = F * (1.0 - 1.0 / p.q)
    return (-math.inf, edge) if p.q < 0 else (edge, math.inf)


def _log_arg(p: SlnParams, F: float, K, strict: bool):
    K = np.asarray(K, dtype=float)
    L = 1.0 + p.q * (K - F) / F
    if strict and np.any(L <= 0):
        bad = K[L <= 0] if K.ndim else K
        raise DomainError(
            f"SLN log argument 1 + q (K - F)/F <= 0 at strike {np.atleast_1d(bad)[0]:.6g} "
            f"(q={p.q}, F={F}); strike outside model support"
        )
    return K, L


def _d12(p: SlnParams, L):
    s = p.skew
    with np.errstate(divide="ignore"):
        lnL = np.log(L)
    d1 = -lnL / s + 0.5 * s
    d2 = -lnL / s - 0.5 * s
    return d1, d2


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)
GL_SKEW = 0.05


def _normal_mass(d1, d2, s: float):
    """N(d1) - N(d2) without cancellation; d1 - d2 = s.

    Both the call and the put use this one value, which keeps parity exact
    even when ``F / q`` is huge.
    """
    if abs(s) < GL_SKEW:
        mid = 0.5 * (d1 + d2)
        z = mid[..., None] + 0.5 * s * _GL_NODES
        return 0.5 * s * np.sum(_GL_WEIGHTS * _npdf(z), axis=-1)
    upper = np.minimum(d1, d2) > 0
    return np.where(upper, ndtr(-d2) - ndtr(-d1), ndtr(d1) - ndtr(d2))


def sln_call(p: SlnParams, F: float, K, D: float = 1.0, V: float = 1.0, *, strict: bool = True):
    """Call price.  With ``strict=False`` strikes outside the support get the
    limiting value (zero or intrinsic) instead of raising."""
    if abs(p.skew) < SMALL_SKEW:
        return bachelier_call(F, K, p.sigma_bar * F, D, V)
    K, L = _log_arg(p, F, K, strict)
    inside = L > 0
    Ls = np.where(inside, L, 1.0)
    d1, d2 = _d12(p, Ls)
    core = (F - K) * ndtr(d2) + (F / p.q) * _normal_mass(d1, d2, p.skew)
    if not strict:
        # outside support: q<0 -> K above the top, call worthless; q>0 -> K below the bottom, forward-like
        core = np.where(inside, core, 0.0 if p.q < 0 else F - K)
    return D * V * core


def sln_put(p: SlnParams, F: float, K, D: float = 1.0, V: float = 1.0, *, strict: bool = True):
    if abs(p.skew) < SMALL_SKEW:
        return bachelier_put(F, K, p.sigma_bar * F, D, V)
    K, L = _log_arg(p, F, K, strict)
    inside = L > 0
    Ls = np.where(inside, L, 1.0)
    d1, d2 = _d12(p, Ls)
    core = (K - F) * ndtr(-d2) + (F / p.q) * _normal_mass(d1, d2, p.skew)
    if not strict:
        core = np.where(inside, core, K - F if p.q < 0 else 0.0)
    return D * V * core


def sln_cdf(p: SlnParams, F: float, K, *, strict: bool = True):
    """P(S_T <= K) = N(-d2)."""
    if abs(p.skew) < SMALL_SKEW:
        return ndtr((np.asarray(K, dtype=float) - F) / (p.sigma_bar * F))
    K, L = _log_arg(p, F, K, strict)
    inside = L > 0
    _, d2 = _d12(p, np.where(inside, L, 1.0))
    out = ndtr(-d2)
    if not strict:
        out = np.where(inside, out, 1.0 if p.q < 0 else 0.0)
    return out


def sln_pdf(p: SlnParams, F: float, K):
    """Closed-form density; zero outside the support."""
    if abs(p.skew) < SMALL_SKEW:
        z = (np.asarray(K, dtype=float) - F) / (p.sigma_bar * F)
        return _npdf(z) / (p.sigma_bar * F)
    K, L = _log_arg(p, F, K, strict=False)
    inside = L > 0
    Ls = np.where(inside, L, 1.0)
    _, d2 = _d12(p, Ls)
    return np.where(inside, _npdf(d2) / (p.sigma_bar * F * Ls), 0.0)


def sln_atm_price(p: SlnParams, F: float, D: float = 1.0, V: float = 1.0) -> float:
    """(F D V sigma_bar / s) (2 N(s/2) - 1), about F D V sigma_bar / sqrt(2 pi)."""
    s = p.skew
    if abs(s) < SMALL_SKEW:
        return F * D * V * p.sigma_bar / SQRT_2PI
    return F * D * V * p.sigma_bar / s * (2.0 * float(ndtr(0.5 * s)) - 1.0)
