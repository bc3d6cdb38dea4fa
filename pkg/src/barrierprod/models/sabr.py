"""Hagan/SABR normal-volatility smile used as a price interpolant.

The put is a Bachelier price on moneyness ``x = (K - F)/F`` with a
strike-dependent total normal volatility

    sigma_N(x) = sigma1 * xi / H(xi)
    xi = (nu sqrt(T) / sigma1) * (1 - (1 + x)^(1 - beta)) / (1 - beta)
    H(xi) = ln((sqrt(1 - 2 rho xi + xi^2) + xi - rho) / (1 - rho))

``xi`` is oriented like Hagan's ``z`` (positive for strikes below the
forward), so negative ``rho`` produces the usual equity put skew.  Limits:
``beta = 0`` gives ``xi = -x nu sqrt(T)/sigma1`` and ``beta = 1`` gives
``xi = -ln(1 + x) nu sqrt(T)/sigma1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from ..errors import DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)
SMALL_XI = 1e-6
FD_REL_STEP = 1e-4


@dataclass(frozen=True)
class SabrParams:
    sigma1: float
    rho: float
    nu: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma1) and self.sigma1 > 0):
            raise DomainError(f"sigma1 must be positive, got {self.sigma1}")
        if not -1.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must lie in [-1, 1], got {self.rho}")
        if not (math.isfinite(self.nu) and self.nu >= 0):
            raise DomainError(f"nu must be >= 0, got {self.nu}")
        if not 0.0 <= self.beta <= 1.0:
            raise DomainError(f"beta must lie in [0, 1], got {self.beta}")

    def to_dict(self) -> dict:
        return {"sigma1": self.sigma1, "rho": self.rho, "nu": self.nu, "beta": self.beta}


def sabr_xi(p: SabrParams, F: float, K, T: float):
    K = np.asarray(K, dtype=float)
    ratio = K / F
    if p.beta == 0.0:
        # normal backbone: defined for every strike, including K <= 0
        return p.nu * math.sqrt(T) / p.sigma1 * (1.0 - ratio)
    if np.any(ratio <= 0):
        raise DomainError(f"SABR with beta > 0 requires positive strikes, got min strike {np.min(K):.6g}")
    if p.beta == 1.0:
        g = -np.log(ratio)
    else:
        g = -np.expm1((1.0 - p.beta) * np.log(ratio)) / (1.0 - p.beta)
    return p.nu * math.sqrt(T) / p.sigma1 * g


def _h(xi, rho: float):
    """Hagan's H(xi), evaluated on whichever of two equivalent forms avoids cancellation."""
    root = np.sqrt(1.0 - 2.0 * rho * xi + xi * xi)
    upper = xi - rho >= 0
    # (root + xi - rho)/(1 - rho) and (1 + rho)/(root - xi + rho) are the same number
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.log((root + xi - rho) / (1.0 - rho))
        b = -np.log((root - xi + rho) / (1.0 + rho))
    out = np.where(upper, a, b)
    if not np.all(np.isfinite(out)):
        bad = np.atleast_1d(xi)[~np.isfinite(np.atleast_1d(out))][0]
        raise DomainError(f"H(xi) undefined at xi={bad:.6g} for rho={rho}")
    return out


def sabr_vol(p: SabrParams, F: float, K, T: float):
    """Total normal volatility in moneyness units (dimensionless)."""
    xi = sabr_xi(p, F, K, T)
    small = np.abs(xi) < SMALL_XI
    # placeholder only feeds the discarded branch; 0.1 is regular for every rho in [-1, 1]
    xs = np.where(small, 0.1, xi)
    ratio = np.where(small, 1.0 - 0.5 * p.rho * xi, xs / _h(xs, p.rho))
    vol = p.sigma1 * ratio
    if np.any(vol <= 0) or not np.all(np.isfinite(vol)):
        raise DomainError("SABR normal volatility not positive on the requested strikes")
    return vol


def _bachelier_put_x(x, vol):
    z = x / vol
    return x * ndtr(z) + vol * np.exp(-0.5 * z * z) / SQRT_2PI


def sabr_put(p: SabrParams, F: float, K, T: float, D: float = 1.0, V: float = 1.0):
    K = np.asarray(K, dtype=float)
    x = (K - F) / F
    return D * V * F * _bachelier_put_x(x, sabr_vol(p, F, K, T))


def sabr_call(p: SabrParams, F: float, K, T: float, D: float = 1.0, V: float = 1.0):
    """Parity partner of :func:`sabr_put`, written in the OTM-stable form."""
    K = np.asarray(K, dtype=float)
    x = (K - F) / F
    return D * V * F * _bachelier_put_x(-x, sabr_vol(p, F, K, T))


def sabr_cdf(p: SabrParams, F: float, K, T: float, *, check: bool = True):
    """N(x/sigma_N) + (d sigma_N/dK) * phi(x/sigma_N) * F.

    The strike derivative of ``sigma_N`` uses a central difference with step
    ``1e-4 F``.  Values are clamped to [0, 1]; with ``check`` a decrease
    across the supplied (sorted) strikes raises.
    """
    K = np.asarray(K, dtype=float)
    h = FD_REL_STEP * F
    x = (K - F) / F
    vol = sabr_vol(p, F, K, T)
    dvol_dK = (sabr_vol(p, F, K + h, T) - sabr_vol(p, F, K - h, T)) / (2.0 * h)
    z = x / vol
    cdf = ndtr(z) + F * dvol_dK * np.exp(-0.5 * z * z) / SQRT_2PI
    cdf = np.clip(cdf, 0.0, 1.0)
    if check and cdf.ndim and cdf.size > 1:
        order = np.argsort(K)
        steps = np.diff(cdf[order])
        if np.any(steps < -1e-10):
            i = int(np.argmin(steps))
            raise DomainError(
                f"SABR CDF decreases between strikes {K[order][i]:.6g} and {K[order][i + 1]:.6g}; "
                "parameters not admissible on this grid"
            )
    return cdf
