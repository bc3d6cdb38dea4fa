"""Bonus certificates and barrier reverse convertibles.

European-barrier prices follow exactly from the terminal distribution
implied by the interpolated vanillas.  American-barrier prices need one
extra, path-dependent number: the breach asymmetry ``delta``, defined by
P(hit and end above B) = (1 + delta) P(end below B).  With it,

    ABC  ~ K - (K - B)(2 + delta) p + Call(K)
    ABRC ~ C - (C - B)(2 + delta) p,        C = S0 + R

where ``p`` is the probability of finishing below the barrier.  The only
approximation is dropping paths that breach and then recover above the
strike (or above C); that mass can be supplied as ``eps`` and is subtracted.

Everything is computed per unit of forward value and multiplied by D V at
the end, matching the vanilla pricing convention.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, ValidationError
from .models import InterpolatedSlice, density_from_model
from .models.density import Density

SEPARATION_FACTOR = 1.5
ORACLE_POINTS = 20001


class ProductKind(str, Enum):
    BC = "bc"
    BRC = "brc"


class BarrierStyle(str, Enum):
    EUROPEAN = "european"
    AMERICAN = "american"


@dataclass(frozen=True)
class ProductSpec:
    """Contract terms.  ``K`` is required for bonus certificates, ``R`` for reverse convertibles."""

    kind: ProductKind
    barrier_style: BarrierStyle
    S0: float
    B: float
    T: float
    K: float | None = None
    R: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ProductKind(self.kind))
        object.__setattr__(self, "barrier_style", BarrierStyle(self.barrier_style))
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValidationError(f"maturity T must be positive, got {self.T}")
        if not 0 < self.B < self.S0:
            raise ValidationError(f"barrier must satisfy 0 < B < S0, got B={self.B}, S0={self.S0}")
        if self.kind is ProductKind.BC:
            if self.K is None:
                raise ValidationError("bonus certificate needs a strike K")
            if self.K < self.S0:
                raise ValidationError(f"bonus level K={self.K} must be at least S0={self.S0}")
        else:
            if self.R is None:
                raise ValidationError("reverse convertible needs a coupon R")
            if self.R < 0:
                raise ValidationError(f"coupon R must be >= 0, got {self.R}")
            if self.B > 0.75 * self.cap:
                raise ValidationError(f"barrier {self.B} above 3/4 of S0 + R = {0.75 * self.cap}")

    @property
    def cap(self) -> float:
        """Payoff level above the barrier: K for BC, S0 + R for BRC."""
        return self.K if self.kind is ProductKind.BC else self.S0 + self.R

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["barrier_style"] = self.barrier_style.value
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "ProductSpec":
        allowed = {"kind", "barrier_style", "S0", "B", "T", "K", "R"}
        extra = set(doc) - allowed
        if extra:
            raise ValidationError(f"unknown product fields {sorted(extra)}")
        try:
            return cls(**{k: doc[k] for k in doc})
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"invalid product spec: {exc}") from None


@dataclass(frozen=True)
class PricingInputs:
    """Path-independent ingredients, undiscounted (per unit of D V).

    ``call_K`` and ``put_B`` are forward option values E[(S-K)+] and
    E[(B-S)+]; ``eps`` is the optional breach-and-recover correction.
    """

    p_h_minus: float
    call_K: float = 0.0
    put_B: float = 0.0
    delta: float = 0.0
    F: float = math.nan
    D: float = 1.0
    V: float = 1.0
    eps: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p_h_minus <= 1.0:
            raise DomainError(f"p_h_minus must lie in [0, 1], got {self.p_h_minus}")
        if self.call_K < 0 or self.put_B < 0:
            raise DomainError("option inputs must be non-negative")


@dataclass(frozen=True)
class PriceReport:
    price: float
    terms: dict
    warnings: tuple[str, ...] = ()
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"price": self.price, "terms": dict(self.terms), "warnings": list(self.warnings), "inputs": dict(self.inputs)}


@dataclass(frozen=True)
class SeparationCheck:
    ok: bool
    lhs: float
    rhs: float

    @property
    def message(self) -> str:
        rel = ">=" if self.ok else "<"
        return f"barrier separation 1.5 (K - B)/K = {self.lhs:.4g} {rel} sigma_atm sqrt(T) = {self.rhs:.4g}"


def _report(terms: dict, scale: float, warnings: list[str], inputs: PricingInputs) -> PriceReport:
    scaled = {k: scale * v for k, v in terms.items()}
    price = math.fsum(scaled.values())
    return PriceReport(price, scaled, tuple(warnings), asdict(inputs))


# --------------------------------------------------------------------------- path-independent inputs


def p_h_minus(density: Density, B: float) -> float:
    """Probability of finishing below ``B``: the density's CDF at ``B``."""
    return density.cdf_at(B)


def pricing_inputs(
    spec: ProductSpec,
    market: InterpolatedSlice,
    delta: float = 0.0,
    eps: float = 0.0,
    *,
    check_density: bool = True,
) -> PricingInputs:
    """Read p, Call(K) and Put(B) off an interpolated slice.

    With ``check_density`` the full density is built first so that an
    inadmissible smile raises instead of producing a price.
    """
    if check_density:
        density_from_model(market.model, market.F, market.T, market.D, market.V)
    DV = market.D * market.V
    p = float(np.clip(np.atleast_1d(market.cdf(np.array([spec.B])))[0], 0.0, 1.0))
    put_B = float(np.atleast_1d(market.put(np.array([spec.B])))[0]) / DV
    call_K = 0.0
    if spec.kind is ProductKind.BC:
        call_K = float(np.atleast_1d(market.call(np.array([spec.K])))[0]) / DV
    return PricingInputs(p, max(call_K, 0.0), max(put_B, 0.0), delta, market.F, market.D, market.V, eps)


# --------------------------------------------------------------------------- closed forms


def price_ebc(spec: ProductSpec, inputs: PricingInputs) -> PriceReport:
    """K - (K - B) p + Call(K) - Put(B), times D V."""
    _require(spec, ProductKind.BC, BarrierStyle.EUROPEAN)
    K, B = spec.K, spec.B
    terms = {
        "leading": K,
        "barrier": -(K - B) * inputs.p_h_minus,
        "call": inputs.call_K,
        "put": -inputs.put_B,
    }
    return _report(terms, inputs.D * inputs.V, [], inputs)


def price_ebrc(spec: ProductSpec, inputs: PricingInputs) -> PriceReport:
    _require(spec, ProductKind.BRC, BarrierStyle.EUROPEAN)
    C, B = spec.cap, spec.B
    terms = {
        "leading": C,
        "barrier": -(C - B) * inputs.p_h_minus,
        "put": -inputs.put_B,
    }
    return _report(terms, inputs.D * inputs.V, [], inputs)


def price_abc(spec: ProductSpec, inputs: PricingInputs, sigma_atm_1y: float | None = None) -> PriceReport:
    """American bonus certificate.

    The ``delta`` term is the only path-dependent piece; with
    ``sigma_atm_1y`` the barrier-separation condition is checked and a
    violation is reported as a warning.
    """
    _require(spec, ProductKind.BC, BarrierStyle.AMERICAN)
    K, B, p = spec.K, spec.B, inputs.p_h_minus
    terms = {
        "leading": K,
        "barrier": -2.0 * (K - B) * p,
        "call": inputs.call_K,
        "delta_correction": -(K - B) * inputs.delta * p,
    }
    warns = _american_warnings(spec, inputs, terms, sigma_atm_1y)
    return _report(terms, inputs.D * inputs.V, warns, inputs)


def price_abrc(spec: ProductSpec, inputs: PricingInputs, sigma_atm_1y: float | None = None) -> PriceReport:
    _require(spec, ProductKind.BRC, BarrierStyle.AMERICAN)
    C, B, p = spec.cap, spec.B, inputs.p_h_minus
    terms = {
        "leading": C,
        "barrier": -2.0 * (C - B) * p,
        "delta_correction": -(C - B) * inputs.delta * p,
    }
    warns = _american_warnings(spec, inputs, terms, sigma_atm_1y)
    return _report(terms, inputs.D * inputs.V, warns, inputs)


def price(spec: ProductSpec, inputs: PricingInputs, sigma_atm_1y: float | None = None) -> PriceReport:
    """Dispatch on product kind and barrier style."""
    american = spec.barrier_style is BarrierStyle.AMERICAN
    if spec.kind is ProductKind.BC:
        return price_abc(spec, inputs, sigma_atm_1y) if american else price_ebc(spec, inputs)
    return price_abrc(spec, inputs, sigma_atm_1y) if american else price_ebrc(spec, inputs)


def _american_warnings(spec, inputs, terms, sigma_atm_1y) -> list[str]:
    warns = []
    if inputs.eps:
        terms["eps_correction"] = -inputs.eps
        name = "eps_BC" if spec.kind is ProductKind.BC else "eps_RC"
        # the printed conclusion formula shows eps next to Call(K); both readings are reported
        alt = inputs.call_K * inputs.eps if spec.kind is ProductKind.BC else inputs.eps
        warns.append(
            f"{name}={inputs.eps:.6g} applied as an additive deduction; "
            f"multiplicative reading Call(K)*eps would give {alt:.6g}"
        )
    if sigma_atm_1y is not None:
        chk = validate_separation(spec, sigma_atm_1y)
        if not chk.ok:
            warns.append(chk.message + ": breach-and-recover mass may not be negligible")
    return warns


def _require(spec: ProductSpec, kind: ProductKind, style: BarrierStyle):
    if spec.kind is not kind or spec.barrier_style is not style:
        raise ValidationError(
            f"expected a {style.value} {kind.value} product, got {spec.barrier_style.value} {spec.kind.value}"
        )


def atm_vol(market: InterpolatedSlice) -> float:
    """Relative ATM volatility per sqrt-year implied by the ATM put (normal approximation)."""
    atm = float(np.atleast_1d(market.put(np.array([market.F])))[0])
    return atm * math.sqrt(2.0 * math.pi) / (market.F * market.D * market.V * math.sqrt(market.T))


def validate_separation(spec: ProductSpec, sigma_atm_1y: float) -> SeparationCheck:
    """1.5 (K - B)/K >= sigma_atm_1y sqrt(T); for a BRC, K is read as S0 + R."""
    if not sigma_atm_1y > 0:
        raise DomainError(f"sigma_atm_1y must be positive, got {sigma_atm_1y}")
    K = spec.cap
    lhs = SEPARATION_FACTOR * (K - spec.B) / K
    rhs = sigma_atm_1y * math.sqrt(spec.T)
    return SeparationCheck(lhs >= rhs, lhs, rhs)


def separation_check(K: float, B: float, sigma_atm_1y: float, T: float) -> SeparationCheck:
    """The same inequality for bare numbers."""
    if not sigma_atm_1y > 0:
        raise DomainError(f"sigma_atm_1y must be positive, got {sigma_atm_1y}")
    lhs = SEPARATION_FACTOR * (K - B) / K
    return SeparationCheck(lhs >= sigma_atm_1y * math.sqrt(T), lhs, sigma_atm_1y * math.sqrt(T))


# --------------------------------------------------------------------------- payoffs and the integration oracle


def payoff_european(spec: ProductSpec, S):
    """Terminal payoff with the barrier tested at expiry only."""
    S = np.asarray(S, dtype=float)
    above = S >= spec.B
    if spec.kind is ProductKind.BC:
        return np.where(above, np.maximum(S, spec.K), S)
    return np.where(above, spec.cap, S)


def integrate_payoff(spec: ProductSpec, market: InterpolatedSlice, n: int = ORACLE_POINTS, lo=None, hi=None) -> float:
    """Discounted expectation of the European payoff by Simpson quadrature.

    The density comes from second differences of the slice's prices; the
    range is split at B and K so the payoff's jump and kink sit on nodes.
    The probability mass outside [lo, hi] is added with its exact payoff
    via the CDF and the forward.
    """
    F, DV = market.F, market.D * market.V
    if lo is None or hi is None:
        from .models import default_grid

        g = default_grid(market.model, F, market.T)
        lo = g[0] if lo is None else lo
        hi = g[-1] if hi is None else hi
    cuts = sorted({c for c in (lo, spec.B, spec.cap, hi) if lo <= c <= hi})
    total = 0.0
    per = max(n // (len(cuts) - 1), 101) | 1
    for a, b in zip(cuts, cuts[1:]):
        x = np.linspace(a, b, per)
        dens = density_from_model(market.model, F, market.T, 1.0, 1.0, x, check=False)
        mid = 0.5 * (a + b)
        # payoff evaluated from the segment's side so the jump at B is not smeared
        if spec.kind is ProductKind.BC:
            pay = x if mid < spec.B else np.maximum(x, spec.K)
        else:
            pay = x if mid < spec.B else np.full_like(x, spec.cap)
        total += simpson(pay * dens.pdf, x=x)
    # tails: below lo the payoff is S, above hi it is S (BC) or the cap (BRC)
    c_lo = float(np.atleast_1d(market.cdf(np.array([lo])))[0])
    c_hi = float(np.atleast_1d(market.cdf(np.array([hi])))[0])
    put_lo = float(np.atleast_1d(market.put(np.array([lo])))[0]) / DV
    call_hi = float(np.atleast_1d(market.call(np.array([hi])))[0]) / DV
    total += lo * c_lo - put_lo  # E[S; S < lo]
    if spec.kind is ProductKind.BC:
        total += hi * (1.0 - c_hi) + call_hi  # E[S; S > hi]
    else:
        total += spec.cap * (1.0 - c_hi)
    return DV * total
