"""Per-maturity least-squares calibration and term-structure interpolation.

The fit objective is the relative squared error

    E^2 = sum_i ((mkt_i - mod_i) / (mkt_i + mod_i))^2

over out-of-the-money quotes: puts at strikes up to the forward, calls
above it.  Each maturity is fitted independently with a restarted
Nelder-Mead simplex; the parameters are then interpolated to any product
maturity with local polynomials through the fitted knots.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import BarycentricInterpolator
from scipy.optimize import minimize

from .errors import DomainError, InsufficientDataError
from .market_data import DAYS_PER_YEAR, MarketSlice, OptionQuote
from .models import (
    HexParams,
    InterpolatedSlice,
    ModelParams,
    SabrParams,
    SlnParams,
    model_call,
    model_put,
    params_from_dict,
    params_to_dict,
)
from .models.hex import base_atm_price, base_call, base_put, chi_from_price, price_from_chi, tail_correction

log = logging.getLogger(__name__)

MODEL_KINDS = ("sln", "sabr0", "sabr1", "hex")
MIN_QUOTES = {"sln": 4, "sabr0": 8, "sabr1": 8, "hex": 12}
RHO_CAP = 0.99
PENALTY = 1e6
MAX_ITER = 5000
TOL = 1e-10
N_STARTS = 3
MAX_DEGREE = 5
SQRT_2PI = math.sqrt(2.0 * math.pi)


# --------------------------------------------------------------------------- objective


def e2(market, model) -> float:
    """Relative least-squares distance between two positive price vectors."""
    market = np.asarray(market, dtype=float)
    model = np.asarray(model, dtype=float)
    if np.any(model <= 0) or not np.all(np.isfinite(model)):
        raise DomainError("model price must be positive at every used strike")
    r = (market - model) / (market + model)
    return float(np.sum(r * r))


def _e2_fit(market, model) -> float:
    """E^2 inside the optimiser: a vanishing model price scores its limit of 1 per quote."""
    model = np.maximum(np.asarray(model, dtype=float), 0.0)
    if not np.all(np.isfinite(model)):
        raise DomainError("non-finite model price")
    r = (market - model) / (market + model)
    return float(np.sum(r * r))


def otm_quotes(slice: MarketSlice) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(strikes, prices, is_put) for the usable OTM quotes of a slice.

    Puts are taken at strikes up to the forward, calls above.  Missing or
    zero prices are dropped: the ratio objective needs both sides positive.
    """
    K = slice.strikes
    puts, calls = slice.puts(), slice.calls()
    is_put = K <= slice.forward
    price = np.where(is_put, puts, calls)
    keep = np.isfinite(price) & (price > 0)
    return K[keep], price[keep], is_put[keep]


def model_otm_prices(model: ModelParams, slice: MarketSlice, K, is_put) -> np.ndarray:
    F, T, D, V = slice.forward, slice.time_to_maturity, slice.discount, slice.volume
    out = np.empty(len(K))
    if np.any(is_put):
        out[is_put] = model_put(model, F, K[is_put], T, D, V, strict=False)
    if np.any(~is_put):
        out[~is_put] = model_call(model, F, K[~is_put], T, D, V, strict=False)
    return out


def objective_e2(model: ModelParams, slice: MarketSlice) -> float:
    K, mkt, is_put = otm_quotes(slice)
    return e2(mkt, model_otm_prices(model, slice, K, is_put))


# --------------------------------------------------------------------------- synthetic data


def default_strikes(F: float, atm_vol: float, n: int = 25) -> np.ndarray:
    """Strikes from -4 to +3 ATM standard deviations (floored at 5% of F)."""
    return F * (1.0 + np.linspace(max(-4.0 * atm_vol, -0.95), 3.0 * atm_vol, n))


def synthetic_slice(
    model: ModelParams,
    maturity_days: int,
    forward: float = 100.0,
    strikes=None,
    discount: float = 1.0,
    volume: float = 1.0,
    *,
    min_price: float | None = None,
    pricing_date=None,
) -> MarketSlice:
    """Quotes generated by ``model``; prices below ``min_price`` are left absent.

    ``min_price`` defaults to 1e-6 of the forward, a stand-in for the
    market's minimum tick.
    """
    T = maturity_days / DAYS_PER_YEAR
    F = forward
    if strikes is None:
        atm = float(model_put(model, F, np.array([F]), T, discount, volume, strict=False)[0])
        strikes = default_strikes(F, atm * SQRT_2PI / (F * discount * volume))
    strikes = np.asarray(strikes, dtype=float)
    floor = 1e-6 * F if min_price is None else min_price
    calls = np.asarray(model_call(model, F, strikes, T, discount, volume, strict=False), dtype=float)
    puts = np.asarray(model_put(model, F, strikes, T, discount, volume, strict=False), dtype=float)
    quotes = [
        OptionQuote(
            float(k),
            float(c) if c >= floor else None,
            float(p) if p >= floor else None,
        )
        for k, c, p in zip(strikes, calls, puts)
    ]
    return MarketSlice(maturity_days, F, quotes, discount=discount, volume=volume, pricing_date=pricing_date)


# --------------------------------------------------------------------------- fitting


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    objective: float
    n_quotes: int
    converged: bool
    iterations: int
    initial_objective: float = math.nan
    kind: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": params_to_dict(self.params),
            "objective": self.objective,
            "initial_objective": self.initial_objective,
            "n_quotes": self.n_quotes,
            "converged": self.converged,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FitResult":
        return cls(
            params=params_from_dict(doc["params"]),
            objective=float(doc["objective"]),
            n_quotes=int(doc["n_quotes"]),
            converged=bool(doc["converged"]),
            iterations=int(doc["iterations"]),
            initial_objective=float(doc.get("initial_objective", math.nan)),
            kind=str(doc.get("kind", "")),
        )


def atm_price_estimate(slice: MarketSlice) -> float:
    """ATM OTM price from the quote nearest the forward (first-order strike shift)."""
    K, price, is_put = otm_quotes(slice)
    if K.size == 0:
        raise InsufficientDataError(f"maturity {slice.maturity_days}d has no usable quotes")
    i = int(np.argmin(np.abs(K - slice.forward)))
    half_dv = 0.5 * slice.discount * slice.volume
    shift = half_dv * (K[i] - slice.forward)
    est = price[i] - shift if is_put[i] else price[i] + shift
    return float(max(est, 0.5 * price[i]))


def _sigma_from_atm(slice: MarketSlice) -> float:
    return atm_price_estimate(slice) * SQRT_2PI / (slice.forward * slice.discount * slice.volume)


def _nelder_mead(fun, starts, max_iter: int):
    """Best of several simplex runs, then one polish restart from the winner."""
    best = None
    nit = 0
    ok = False
    opts = {"maxiter": max_iter, "xatol": 1e-9, "fatol": TOL, "adaptive": len(starts[0]) > 3}
    for x0 in starts:
        res = minimize(fun, x0, method="Nelder-Mead", options=opts)
        nit += int(res.nit)
        ok |= bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    polish = minimize(fun, best.x, method="Nelder-Mead", options=opts)
    nit += int(polish.nit)
    if polish.fun <= best.fun:
        best = polish
        ok |= bool(polish.success)
    return best.x, float(best.fun), ok, nit


def _jitter(x0, scales, rng, n: int = N_STARTS):
    x0 = np.asarray(x0, dtype=float)
    return [x0] + [x0 + rng.normal(0.0, scales) for _ in range(n - 1)]


def _guarded(fn):
    def wrapped(theta):
        try:
            v = fn(theta)
        except DomainError:
            return PENALTY
        return v if math.isfinite(v) else PENALTY

    return wrapped


def _check_count(slice: MarketSlice, kind: str, n: int):
    need = MIN_QUOTES[kind]
    if n < need:
        raise InsufficientDataError(
            f"maturity {slice.maturity_days}d: {n} usable quotes, {kind} needs at least {need}"
        )


def _fit_sln(slice, K, mkt, is_put, init: SlnParams | None, rng, max_iter):
    init = init or SlnParams(_sigma_from_atm(slice), -2.0)

    def unpack(th):
        return SlnParams(math.exp(th[0]), float(th[1]))

    def f(th):
        return _e2_fit(mkt, model_otm_prices(unpack(th), slice, K, is_put))

    x0 = [math.log(init.sigma_bar), init.q]
    x, fun, ok, nit = _nelder_mead(_guarded(f), _jitter(x0, [0.1, 0.5], rng), max_iter)
    return unpack(x), fun, ok, nit


def _fit_sabr(slice, K, mkt, is_put, beta, init: SabrParams | None, rng, max_iter):
    init = init or SabrParams(_sigma_from_atm(slice), -0.7, 1.0, beta)
    init = replace(init, beta=beta, rho=float(np.clip(init.rho, -RHO_CAP * 0.999, RHO_CAP * 0.999)))

    def unpack(th):
        return SabrParams(math.exp(th[0]), RHO_CAP * math.tanh(th[1]), math.exp(th[2]), beta)

    def f(th):
        return _e2_fit(mkt, model_otm_prices(unpack(th), slice, K, is_put))

    x0 = [math.log(init.sigma1), math.atanh(init.rho / RHO_CAP), math.log(max(init.nu, 1e-8))]
    x, fun, ok, nit = _nelder_mead(_guarded(f), _jitter(x0, [0.05, 0.3, 0.3], rng), max_iter)
    return unpack(x), fun, ok, nit


def _fit_hex_tails(slice, K, mkt, is_put, base, rng, max_iter, a0: float = 0.01):
    """Stage two: tail polynomials and damping with the base model frozen."""
    F, T, D, V = slice.forward, slice.time_to_maturity, slice.discount, slice.volume
    pi_atm = base_atm_price(base, F, T, D, V)
    x = (K - F) / F
    left = x < 0
    right = x > 0
    # base chi on the used strikes never changes in this stage
    chi_p = chi_from_price(base_put(base, F, K, T, D, V), pi_atm, "put", strict=False)
    chi_c = chi_from_price(base_call(base, F, K, T, D, V), pi_atm, "call", strict=False)
    fwd_leg = D * V * (F - K)

    def prices(th):
        tl, tr, a = th[0:3], th[3:6], math.exp(th[6])
        out = np.where(is_put, base_put(base, F, K, T, D, V), base_call(base, F, K, T, D, V)).astype(float)
        if np.any(left):
            put = price_from_chi(chi_p[left] + tail_correction(tl, a, x[left]), pi_atm, "put")
            out[left] = np.where(is_put[left], put, put + fwd_leg[left])
        if np.any(right):
            call = price_from_chi(chi_c[right] + tail_correction(tr, a, x[right]), pi_atm, "call")
            out[right] = np.where(is_put[right], call - fwd_leg[right], call)
        return out

    def f(th):
        return _e2_fit(mkt, prices(th))

    x0 = np.r_[np.zeros(6), math.log(a0)]
    th, fun, ok, nit = _nelder_mead(_guarded(f), _jitter(x0, [0.5] * 6 + [0.3], rng), max_iter)
    params = HexParams(base, tuple(th[0:3]), tuple(th[3:6]), math.exp(float(th[6])), pi_atm)
    return params, fun, ok, nit


def calibrate(
    slice: MarketSlice,
    kind: str,
    init: ModelParams | None = None,
    *,
    hex_base: str = "sabr1",
    seed: int = 0,
    max_iter: int = MAX_ITER,
) -> FitResult:
    """Fit one maturity.

    ``kind`` is one of ``sln``, ``sabr0`` (beta = 0), ``sabr1`` (beta = 1)
    or ``hex``.  HEX is fitted in two stages: the ``hex_base`` model first,
    then the six tail coefficients and the damping constant with the base
    frozen.  The jittered restarts use ``seed`` so fits are reproducible.
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    K, mkt, is_put = otm_quotes(slice)
    _check_count(slice, kind, K.size)
    rng = np.random.default_rng(seed)

    if kind == "hex":
        if hex_base == "hex":
            raise ValueError("HEX base must be sln, sabr0 or sabr1")
        base_init = init.base if isinstance(init, HexParams) else init
        stage1 = calibrate(slice, hex_base, base_init, seed=seed, max_iter=max_iter)
        params, fun, ok, nit = _fit_hex_tails(slice, K, mkt, is_put, stage1.params, rng, max_iter)
        if fun > stage1.objective:
            params = HexParams(stage1.params, pi_atm=params.pi_atm)
            fun = stage1.objective
        return FitResult(params, fun, int(K.size), ok and stage1.converged, nit + stage1.iterations,
                         stage1.objective, kind)

    if kind == "sln":
        start = init if isinstance(init, SlnParams) else None
        start = start or SlnParams(_sigma_from_atm(slice), -2.0)
        init_obj = _safe_objective(start, slice)
        params, fun, ok, nit = _fit_sln(slice, K, mkt, is_put, start, rng, max_iter)
    else:
        beta = 0.0 if kind == "sabr0" else 1.0
        start = init if isinstance(init, SabrParams) else None
        start = replace(start, beta=beta) if start else SabrParams(_sigma_from_atm(slice), -0.7, 1.0, beta)
        init_obj = _safe_objective(start, slice)
        params, fun, ok, nit = _fit_sabr(slice, K, mkt, is_put, beta, start, rng, max_iter)

    if not ok:
        log.warning("maturity %sd: %s fit did not converge in %d iterations", slice.maturity_days, kind, nit)
    return FitResult(params, fun, int(K.size), ok, nit, init_obj, kind)


def _safe_objective(model, slice) -> float:
    K, mkt, is_put = otm_quotes(slice)
    try:
        return _e2_fit(mkt, model_otm_prices(model, slice, K, is_put))
    except DomainError:
        return PENALTY


# --------------------------------------------------------------------------- term structure


def _param_vector(p: ModelParams) -> tuple[list[str], np.ndarray]:
    if isinstance(p, SlnParams):
        return ["sigma_bar", "q"], np.array([p.sigma_bar, p.q])
    if isinstance(p, SabrParams):
        return ["sigma1", "rho", "nu", "beta"], np.array([p.sigma1, p.rho, p.nu, p.beta])
    names, vals = _param_vector(p.base)
    names = ["base." + n for n in names] + [f"theta_L{i}" for i in (1, 2, 3)] + [f"theta_R{i}" for i in (1, 2, 3)]
    names += ["a", "pi_atm"]
    return names, np.r_[vals, p.theta_left, p.theta_right, p.a, p.pi_atm]


def _clamp(name: str, v: float, issues: list[str]) -> float:
    bare = name.split(".")[-1]
    lo, hi = {
        "sigma_bar": (1e-12, math.inf),
        "sigma1": (1e-12, math.inf),
        "rho": (-1.0, 1.0),
        "nu": (0.0, math.inf),
        "beta": (0.0, 1.0),
        "a": (1e-12, math.inf),
        "pi_atm": (1e-12, math.inf),
    }.get(bare, (-math.inf, math.inf))
    if v < lo or v > hi:
        issues.append(f"{name}={v:.6g} outside [{lo}, {hi}], clamped")
        return min(max(v, lo), hi)
    return v


def _params_from_vector(template: ModelParams, names: list[str], v: np.ndarray) -> ModelParams:
    issues: list[str] = []
    v = [_clamp(n, float(x), issues) for n, x in zip(names, v)]
    if issues:
        warnings.warn("interpolated parameters left their domain: " + "; ".join(issues), RuntimeWarning, stacklevel=3)
    if isinstance(template, SlnParams):
        return SlnParams(v[0], v[1])
    if isinstance(template, SabrParams):
        return SabrParams(*v)
    nb = 2 if isinstance(template.base, SlnParams) else 4
    base = _params_from_vector(template.base, names[:nb], np.array(v[:nb]))
    return HexParams(base, tuple(v[nb:nb + 3]), tuple(v[nb + 3:nb + 6]), v[nb + 6], v[nb + 7])


@dataclass(frozen=True)
class TermStructure:
    """Fitted knots plus local interpolating polynomials in maturity (years).

    Between knots ``i`` and ``i+1`` every parameter follows the polynomial
    through the ``min(n, 6)`` consecutive knots centred on that interval, so
    the curve passes exactly through every knot and is continuous.
    """

    kind: str
    maturities: np.ndarray
    fits: tuple[FitResult, ...]
    forwards: np.ndarray
    discounts: np.ndarray
    volumes: np.ndarray
    maturity_days: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "maturities", np.asarray(self.maturities, dtype=float))
        object.__setattr__(self, "fits", tuple(self.fits))
        for name in ("forwards", "discounts", "volumes"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if len(self.maturities) != len(self.fits):
            raise ValueError("one fit per maturity required")
        if np.any(np.diff(self.maturities) <= 0):
            raise ValueError("maturities must strictly increase")
        if len({type(f.params) for f in self.fits}) > 1:
            raise ValueError("all knots must carry the same model type")

    @property
    def degree(self) -> int:
        return min(len(self.maturities), MAX_DEGREE + 1) - 1

    def stencil(self, target_T: float) -> slice:
        n = len(self.maturities)
        m = self.degree + 1
        i = int(np.clip(np.searchsorted(self.maturities, target_T, side="right") - 1, 0, n - 2))
        start = int(np.clip(i - (m // 2 - 1), 0, n - m))
        return slice(start, start + m)

    def param_names(self) -> list[str]:
        return _param_vector(self.fits[0].params)[0]

    def knot_matrix(self) -> np.ndarray:
        return np.array([_param_vector(f.params)[1] for f in self.fits])

    def coefficients(self) -> list[dict]:
        """Power-basis coefficients (lowest order first) for each knot interval."""
        out = []
        values = self.knot_matrix()
        names = self.param_names()
        for i in range(len(self.maturities) - 1):
            sl = self.stencil(0.5 * (self.maturities[i] + self.maturities[i + 1]))
            t = self.maturities[sl]
            coefs = {
                n: np.polynomial.Polynomial.fit(t, values[sl, j], len(t) - 1).convert().coef.tolist()
                for j, n in enumerate(names)
            }
            out.append({"interval": [float(self.maturities[i]), float(self.maturities[i + 1])],
                        "knots": [sl.start, sl.stop - 1], "coefficients": coefs})
        return out

    def _check_range(self, target_T: float, extrapolate: bool):
        lo, hi = self.maturities[0], self.maturities[-1]
        if not extrapolate and not lo <= target_T <= hi:
            raise DomainError(
                f"maturity {target_T:.6g}y outside fitted range [{lo:.6g}, {hi:.6g}]; pass extrapolate=True to override"
            )

    def _interp(self, values: np.ndarray, target_T: float) -> np.ndarray:
        sl = self.stencil(target_T)
        return np.atleast_1d(BarycentricInterpolator(self.maturities[sl], values[sl])(target_T)).reshape(-1)

    def context_at(self, target_T: float, *, extrapolate: bool = False) -> tuple[float, float, float]:
        """(F, D, V) at ``target_T``: forward and volume linear, discount log-linear."""
        self._check_range(target_T, extrapolate)
        t = self.maturities
        if len(t) == 1:
            return float(self.forwards[0]), float(self.discounts[0]), float(self.volumes[0])
        F = float(np.interp(target_T, t, self.forwards))
        V = float(np.interp(target_T, t, self.volumes))
        rate = -np.log(self.discounts) / t
        D = float(math.exp(-np.interp(target_T, t, rate) * target_T))
        return F, D, V

    def to_dict(self) -> dict:
        return {
            "model": self.kind,
            "maturities": [
                {
                    "maturity_days": int(d) if d is not None else None,
                    "T": float(t),
                    "forward": float(F),
                    "discount": float(D),
                    "volume": float(V),
                    **fit.to_dict(),
                }
                for d, t, F, D, V, fit in zip(
                    self.maturity_days or [None] * len(self.fits),
                    self.maturities, self.forwards, self.discounts, self.volumes, self.fits,
                )
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TermStructure":
        rows = doc["maturities"]
        days = [r.get("maturity_days") for r in rows]
        return cls(
            kind=doc.get("model", ""),
            maturities=[r["T"] for r in rows],
            fits=[FitResult.from_dict(r) for r in rows],
            forwards=[r["forward"] for r in rows],
            discounts=[r["discount"] for r in rows],
            volumes=[r.get("volume", 1.0) for r in rows],
            maturity_days=tuple(days) if all(d is not None for d in days) else (),
        )


def fit_term_structure(surface, kind: str, **kw) -> TermStructure:
    """Calibrate every slice of ``surface``; each fit warm-starts from the previous one."""
    fits = []
    prev = None
    for s in surface:
        try:
            fit = calibrate(s, kind, prev, **kw)
        except DomainError:
            fit = calibrate(s, kind, None, **kw)
        # keep the better of a cold and a warm start
        if prev is not None:
            cold = calibrate(s, kind, None, **kw)
            if cold.objective < fit.objective:
                fit = cold
        fits.append(fit)
        prev = fit.params
    return term_structure_from_fits(kind, surface, fits)


def term_structure_from_fits(kind: str, surface, fits) -> TermStructure:
    slices = list(surface)
    return TermStructure(
        kind=kind,
        maturities=[s.time_to_maturity for s in slices],
        fits=fits,
        forwards=[s.forward for s in slices],
        discounts=[s.discount for s in slices],
        volumes=[s.volume for s in slices],
        maturity_days=tuple(s.maturity_days for s in slices),
    )


def interpolate_params(ts: TermStructure, target_T: float, *, extrapolate: bool = False) -> ModelParams:
    """Parameters at ``target_T`` years; exact at the knots.

    Values leaving the admissible domain (negative volatility, |rho| > 1)
    are clamped with a :class:`RuntimeWarning`.
    """
    ts._check_range(target_T, extrapolate)
    template = ts.fits[0].params
    names = ts.param_names()
    hit = np.nonzero(ts.maturities == target_T)[0]
    if hit.size:
        return ts.fits[int(hit[0])].params
    if len(ts.maturities) < 2:
        raise InsufficientDataError("interpolation needs at least two maturities")
    return _params_from_vector(template, names, ts._interp(ts.knot_matrix(), target_T))


def slice_at(ts: TermStructure, target_T: float, *, extrapolate: bool = False) -> InterpolatedSlice:
    """Interpolated parameters bound to the interpolated forward, discount and volume."""
    params = interpolate_params(ts, target_T, extrapolate=extrapolate)
    F, D, V = ts.context_at(target_T, extrapolate=extrapolate)
    return InterpolatedSlice(params, F, float(target_T), D, V)


def interpolate_by_prices(
    ts: TermStructure,
    target_T: float,
    *,
    n_strikes: int = 25,
    seed: int = 0,
) -> FitResult:
    """Bracketing alternative: blend model prices of the neighbouring maturities.

    Normalised OTM prices (price / (F D V)) of the knots just before and
    after ``target_T`` are evaluated on a common moneyness grid, blended
    linearly in maturity, and the same model kind is refitted to the blend.
    """
    ts._check_range(target_T, False)
    t = ts.maturities
    j = int(np.clip(np.searchsorted(t, target_T, side="right"), 1, len(t) - 1))
    i = j - 1
    w = (target_T - t[i]) / (t[j] - t[i])
    F, D, V = ts.context_at(target_T)
    lo_atm = _model_atm_vol(ts, i)
    hi_atm = _model_atm_vol(ts, j)
    width = max(lo_atm, hi_atm)
    # the blend of two different smiles is not itself in the model family;
    # keep to the liquid +-2.5 sd band so far wings do not dominate the refit
    x = np.linspace(max(-2.5 * width, -0.95), 2.5 * width, n_strikes)
    norm = []
    for k in (i, j):
        Fk, Dk, Vk, Tk = ts.forwards[k], ts.discounts[k], ts.volumes[k], t[k]
        Kk = Fk * (1.0 + x)
        is_put = x <= 0
        p = np.where(
            is_put,
            model_put(ts.fits[k].params, Fk, Kk, Tk, Dk, Vk, strict=False),
            model_call(ts.fits[k].params, Fk, Kk, Tk, Dk, Vk, strict=False),
        )
        norm.append(p / (Fk * Dk * Vk))
    blend = ((1.0 - w) * norm[0] + w * norm[1]) * F * D * V
    K = F * (1.0 + x)
    fwd_leg = D * V * (F - K)
    quotes = [
        OptionQuote(float(k), float(b + f) if xx <= 0 else float(b), float(b) if xx <= 0 else float(b - f))
        if b > 0 else OptionQuote(float(k))
        for k, b, f, xx in zip(K, blend, fwd_leg, x)
    ]
    days = max(1, int(round(target_T * DAYS_PER_YEAR)))
    synthetic = MarketSlice(days, F, quotes, discount=D, volume=V)
    kind = ts.kind or _kind_of(ts.fits[0].params)
    return calibrate(synthetic, kind, interpolate_params(ts, target_T), seed=seed)


def _model_atm_vol(ts: TermStructure, k: int) -> float:
    F, D, V, T = ts.forwards[k], ts.discounts[k], ts.volumes[k], ts.maturities[k]
    atm = float(np.atleast_1d(model_put(ts.fits[k].params, F, np.array([F]), T, D, V, strict=False))[0])
    return atm * SQRT_2PI / (F * D * V)


def _kind_of(p: ModelParams) -> str:
    if isinstance(p, SlnParams):
        return "sln"
    if isinstance(p, SabrParams):
        return "sabr0" if p.beta == 0 else "sabr1"
    return "hex"


def param_table_rows(ts: TermStructure) -> list[dict]:
    """Flat per-maturity rows (for the CSV fit report)."""
    names = ts.param_names()
    rows = []
    for k, fit in enumerate(ts.fits):
        _, vals = _param_vector(fit.params)
        row = {
            "maturity_days": ts.maturity_days[k] if ts.maturity_days else "",
            "T": float(ts.maturities[k]),
            "forward": float(ts.forwards[k]),
            "objective": fit.objective,
            "n_quotes": fit.n_quotes,
            "converged": fit.converged,
            "iterations": fit.iterations,
        }
        row.update({n: float(v) for n, v in zip(names, vals)})
        rows.append(row)
    return rows
