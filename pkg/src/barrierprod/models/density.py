"""Terminal density and CDF recovered from interpolated vanilla prices.

Below the forward the density is the second strike-derivative of the put,
above it the second derivative of the call; the CDF is the first derivative
of the put (below) or one plus the derivative of the call (above).  All
derivatives are central differences with step ``1e-4 F``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import AdmissibilityError

FD_REL_STEP = 1e-4
DEFAULT_POINTS = 2001
DEFAULT_LO = 0.05
DEFAULT_HI = 3.0
NEG_TOL = 1e-8
CDF_TOL = 1e-6
MOMENT_TOL = 1e-4


@dataclass(frozen=True)
class Density:
    grid: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray

    def integral(self) -> float:
        return float(np.trapezoid(self.pdf, self.grid))

    def mean(self) -> float:
        return float(np.trapezoid(self.grid * self.pdf, self.grid))

    def cdf_at(self, level: float) -> float:
        """Linear interpolation of the CDF; 0 below and 1 above the grid."""
        if level < self.grid[0]:
            return 0.0
        if level > self.grid[-1]:
            return 1.0
        return float(np.interp(level, self.grid, self.cdf))


def make_grid(F: float, n: int = DEFAULT_POINTS, lo: float = DEFAULT_LO, hi: float = DEFAULT_HI) -> np.ndarray:
    return np.linspace(lo * F, hi * F, n)


def fd_cdf(put, call, F: float, K, D: float = 1.0, V: float = 1.0, h: float | None = None):
    """CDF from price first differences; ``put``/``call`` map strikes to prices."""
    K = np.asarray(K, dtype=float)
    h = FD_REL_STEP * F if h is None else h
    below = K <= F
    out = np.empty_like(K)
    Kb, Ka = K[below], K[~below]
    if Kb.size:
        out[below] = (put(Kb + h) - put(Kb - h)) / (2 * h * D * V)
    if Ka.size:
        out[~below] = 1.0 + (call(Ka + h) - call(Ka - h)) / (2 * h * D * V)
    return out


def fd_pdf(put, call, F: float, K, D: float = 1.0, V: float = 1.0, h: float | None = None):
    K = np.asarray(K, dtype=float)
    h = FD_REL_STEP * F if h is None else h
    below = K <= F
    out = np.empty_like(K)
    Kb, Ka = K[below], K[~below]
    if Kb.size:
        out[below] = (put(Kb + h) - 2 * put(Kb) + put(Kb - h)) / (h * h * D * V)
    if Ka.size:
        out[~below] = (call(Ka + h) - 2 * call(Ka) + call(Ka - h)) / (h * h * D * V)
    return out


def density_from_prices(put, call, F: float, grid, D: float = 1.0, V: float = 1.0, *, check: bool = True) -> Density:
    grid = np.asarray(grid, dtype=float)
    pdf = fd_pdf(put, call, F, grid, D, V)
    cdf = fd_cdf(put, call, F, grid, D, V)
    if check and np.any(pdf < -NEG_TOL):
        bad = grid[pdf < -NEG_TOL]
        raise AdmissibilityError(
            f"negative density (min {pdf.min():.3g}) on strikes [{bad.min():.6g}, {bad.max():.6g}] "
            f"({bad.min() / F:.3f}F to {bad.max() / F:.3f}F)"
        )
    if check and (cdf.min() < -CDF_TOL or cdf.max() > 1 + CDF_TOL):
        i = int(np.argmin(cdf)) if cdf.min() < -CDF_TOL else int(np.argmax(cdf))
        raise AdmissibilityError(
            f"CDF from price slopes leaves [0, 1] (value {cdf[i]:.3g} at strike {grid[i]:.6g}, "
            f"{grid[i] / F:.3f}F): prices not arbitrage-free there"
        )
    if check:
        mass = float(np.trapezoid(pdf, grid))
        mean = float(np.trapezoid(grid * pdf, grid))
        if abs(mass - 1.0) > MOMENT_TOL or abs(mean - F) > MOMENT_TOL * F:
            raise AdmissibilityError(
                f"density on [{grid[0]:.6g}, {grid[-1]:.6g}] integrates to {mass:.8g} with mean {mean:.8g} "
                f"(forward {F:.8g}): mass outside the grid or prices inconsistent with a distribution"
            )
    # clip round-off only; real violations were rejected above
    pdf = np.maximum(pdf, 0.0)
    cdf = np.clip(cdf, 0.0, 1.0)
    cdf = np.maximum.accumulate(cdf)
    return Density(grid, pdf, cdf)
