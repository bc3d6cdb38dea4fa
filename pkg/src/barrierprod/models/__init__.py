"""Price interpolation models: SLN, SABR/Hagan and HEX-extrapolated variants.

Every model is a frozen parameter dataclass plus pure pricing functions.
:class:`InterpolatedSlice` binds parameters to one maturity's forward,
discount and volume factor and is what the product pricers consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import DomainError
from .density import Density, density_from_prices, fd_cdf, fd_pdf, make_grid
from .hex import HexParams, chi_from_price, hex_call, hex_chi_from_base, hex_put, price_from_chi, tail_correction
from .sabr import SabrParams, sabr_call, sabr_cdf, sabr_put, sabr_vol, sabr_xi
from .sln import (
    SlnParams,
    bachelier_call,
    bachelier_put,
    sln_atm_price,
    sln_call,
    sln_cdf,
    sln_pdf,
    sln_put,
    sln_support,
)

ModelParams = Union[SlnParams, SabrParams, HexParams]

__all__ = [
    "Density",
    "HexParams",
    "InterpolatedSlice",
    "ModelParams",
    "SabrParams",
    "SlnParams",
    "bachelier_call",
    "bachelier_put",
    "chi_from_price",
    "default_grid",
    "density_from_model",
    "hex_call",
    "hex_chi_from_base",
    "hex_put",
    "model_call",
    "model_cdf",
    "model_put",
    "params_from_dict",
    "params_to_dict",
    "price_from_chi",
    "sabr_call",
    "sabr_cdf",
    "sabr_put",
    "sabr_vol",
    "sabr_xi",
    "sln_atm_price",
    "sln_call",
    "sln_cdf",
    "sln_pdf",
    "sln_put",
    "sln_support",
    "tail_correction",
]


def model_put(model: ModelParams, F: float, K, T: float, D: float = 1.0, V: float = 1.0, *, strict: bool = True):
    if isinstance(model, SlnParams):
        return sln_put(model, F, K, D, V, strict=strict)
    if isinstance(model, SabrParams):
        return sabr_put(model, F, K, T, D, V)
    if isinstance(model, HexParams):
        return hex_put(model, F, K, T, D, V)
    raise TypeError(f"unknown model parameters {type(model).__name__}")


def model_call(model: ModelParams, F: float, K, T: float, D: float = 1.0, V: float = 1.0, *, strict: bool = True):
    if isinstance(model, SlnParams):
        return sln_call(model, F, K, D, V, strict=strict)
    if isinstance(model, SabrParams):
        return sabr_call(model, F, K, T, D, V)
    if isinstance(model, HexParams):
        return hex_call(model, F, K, T, D, V)
    raise TypeError(f"unknown model parameters {type(model).__name__}")


def model_cdf(model: ModelParams, F: float, K, T: float):
    """P(S_T <= K); closed form for SLN, price differences otherwise."""
    if isinstance(model, SlnParams):
        return sln_cdf(model, F, K, strict=False)
    if isinstance(model, SabrParams):
        return sabr_cdf(model, F, K, T, check=False)
    return fd_cdf(
        lambda k: model_put(model, F, k, T, strict=False),
        lambda k: model_call(model, F, k, T, strict=False),
        F,
        K,
    )


TAIL_MASS = 1e-9
MAX_REACH = 100.0
MAX_POINTS = 20001
MIN_COVER_LO = 0.2


def _admissible_left_end(model: ModelParams, F: float, T: float, lo: float) -> float:
    """Smallest strike in [lo F, 0.2 F] above which price slopes form a valid CDF.

    The Bachelier-with-smile form of the SABR interpolant can price far
    left-wing puts so high that their slope turns negative; the density is
    then only defined to the right of that region.
    """
    K = np.linspace(lo * F, F, 801)
    put = lambda k: model_put(model, F, k, T, strict=False)  # noqa: E731
    call = lambda k: model_call(model, F, k, T, strict=False)  # noqa: E731
    c = fd_cdf(put, call, F, K)
    d = fd_pdf(put, call, F, K)
    bad = np.nonzero((c < -1e-6) | (c > 1 + 1e-6) | (d < -1e-8))[0]
    if bad.size == 0:
        return lo * F
    edge = K[min(bad[-1] + 1, K.size - 1)]
    return edge if edge <= MIN_COVER_LO * F else lo * F


def default_grid(model: ModelParams, F: float, T: float, n: int = 2001, lo: float = 0.05, hi: float = 3.0) -> np.ndarray:
    """Uniform grid on [lo F, hi F], adjusted to the model.

    The ends move outward, in doubling steps up to 100F, while more than
    1e-9 of the mass lies beyond them: negatively skewed shifted log-normals
    carry visible mass below 5% of the forward (even below zero), long-dated
    smiles above 3F.  Widened grids keep the requested spacing, up to
    MAX_POINTS points.  For SABR-based models the left end moves inward, at
    most to 0.2F, past any wing where the interpolant is not arbitrage-free.
    """
    base = model.base if isinstance(model, HexParams) else model
    positive_only = isinstance(base, SabrParams) and base.beta > 0

    def cdf(k):
        try:
            return float(np.atleast_1d(model_cdf(model, F, np.array([k]), T))[0])
        except DomainError:
            return float("nan")

    k_lo, k_hi = lo * F, hi * F
    if positive_only:
        k_lo = _admissible_left_end(model, F, T, lo)
    else:
        step = 0.25 * F
        while cdf(k_lo) > TAIL_MASS and k_lo > -MAX_REACH * F:
            k_lo = max(k_lo - step, -MAX_REACH * F)
            step *= 2.0
    step = F
    while 1.0 - cdf(k_hi) > TAIL_MASS and k_hi < MAX_REACH * F:
        k_hi = min(k_hi + step, MAX_REACH * F)
        step *= 2.0
    spacing = (hi - lo) * F / (n - 1)
    widened = k_lo < lo * F or k_hi > hi * F
    m = min(max(n, int(math.ceil((k_hi - k_lo) / spacing)) + 1), MAX_POINTS) if widened else n
    return np.linspace(k_lo, k_hi, m)


def density_from_model(
    model: ModelParams,
    F: float,
    T: float,
    D: float = 1.0,
    V: float = 1.0,
    grid=None,
    *,
    n: int = 2001,
    lo: float = 0.05,
    hi: float = 3.0,
    check: bool = True,
) -> Density:
    """Density on ``grid`` (default: ``n`` uniform points on [lo F, hi F],
    widened by :func:`default_grid` to hold all but 1e-9 of the mass).

    Raises :class:`~barrierprod.errors.AdmissibilityError` if the pdf dips
    below -1e-8, the CDF leaves [0, 1], or the grid integral or mean miss
    1 and F by more than 1e-4 (relative).
    """
    grid = default_grid(model, F, T, n, lo, hi) if grid is None else np.asarray(grid, dtype=float)
    return density_from_prices(
        lambda k: model_put(model, F, k, T, D, V, strict=False),
        lambda k: model_call(model, F, k, T, D, V, strict=False),
        F,
        grid,
        D,
        V,
        check=check,
    )


@dataclass(frozen=True)
class InterpolatedSlice:
    """Model parameters bound to one maturity's market context."""

    model: ModelParams
    F: float
    T: float
    D: float = 1.0
    V: float = 1.0

    def put(self, K):
        return model_put(self.model, self.F, K, self.T, self.D, self.V, strict=False)

    def call(self, K):
        return model_call(self.model, self.F, K, self.T, self.D, self.V, strict=False)

    def cdf(self, K):
        return model_cdf(self.model, self.F, K, self.T)

    def density(self, grid=None, **kw) -> Density:
        return density_from_model(self.model, self.F, self.T, self.D, self.V, grid, **kw)


def params_to_dict(model: ModelParams) -> dict:
    """``{"sln": {...}}``, ``{"sabr": {...}}`` or ``{"hex": {...}}``."""
    if isinstance(model, SlnParams):
        return {"sln": model.to_dict()}
    if isinstance(model, SabrParams):
        return {"sabr": model.to_dict()}
    if isinstance(model, HexParams):
        return {"hex": model.to_dict()}
    raise TypeError(f"unknown model parameters {type(model).__name__}")


def params_from_dict(doc: dict) -> ModelParams:
    if len(doc) != 1:
        raise DomainError(f"parameter document must have exactly one model key, got {sorted(doc)}")
    (kind, body), = doc.items()
    if kind == "sln":
        return SlnParams(float(body["sigma_bar"]), float(body["q"]))
    if kind == "sabr":
        return SabrParams(float(body["sigma1"]), float(body["rho"]), float(body["nu"]), float(body["beta"]))
    if kind == "hex":
        base = params_from_dict(body["base"])
        if isinstance(base, HexParams):
            raise DomainError("HEX base must be sln or sabr")
        return HexParams(base, tuple(body["theta_L"]), tuple(body["theta_R"]), float(body["a"]), float(body["pi_atm"]))
    raise DomainError(f"unknown model key {kind!r}")
