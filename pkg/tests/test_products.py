import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barrierprod.errors import DomainError, ValidationError
from barrierprod.models import InterpolatedSlice, SabrParams, SlnParams, bachelier_put, density_from_model, sln_cdf
from barrierprod.products import (
    BarrierStyle,
    PricingInputs,
    ProductKind,
    ProductSpec,
    atm_vol,
    integrate_payoff,
    p_h_minus,
    payoff_european,
    price,
    price_abc,
    price_abrc,
    price_ebc,
    price_ebrc,
    pricing_inputs,
    separation_check,
    validate_separation,
)

F = 100.0


def bc(style="european", B=70.0, K=110.0, T=1.0):
    return ProductSpec(ProductKind.BC, BarrierStyle(style), F, B, T, K=K)


def brc(style="european", B=70.0, R=8.0, T=1.0):
    return ProductSpec(ProductKind.BRC, BarrierStyle(style), F, B, T, R=R)


# --------------------------------------------------------------------------- p_h_minus


def test_p_below_grid_is_zero():
    d = density_from_model(SlnParams(0.2, -1.0), F, 1.0)
    assert p_h_minus(d, d.grid[0] - 1.0) == 0.0


def test_p_symmetric_density_at_forward_is_half():
    d = density_from_model(SlnParams(0.2, 1e-12), F, 1.0)
    assert p_h_minus(d, F) == pytest.approx(0.5, abs=1e-6)


def test_p_matches_closed_form_cdf():
    p = SlnParams(0.25, -3.0)
    d = density_from_model(p, F, 1.0)
    assert p_h_minus(d, 70.0) == pytest.approx(float(sln_cdf(p, F, 70.0)), abs=2e-6)


# --------------------------------------------------------------------------- closed forms


def test_ebc_no_breach_limit():
    spec = bc()
    inp = PricingInputs(0.0, call_K=3.5, put_B=0.0)
    assert price_ebc(spec, inp).price == pytest.approx(110.0 + 3.5, rel=1e-15)


def test_ebrc_no_breach_limit():
    assert price_ebrc(brc(), PricingInputs(0.0)).price == 108.0


def test_abc_and_abrc_no_breach_limits():
    assert price_abc(bc("american"), PricingInputs(0.0, call_K=3.5)).price == pytest.approx(113.5)
    assert price_abrc(brc("american"), PricingInputs(0.0)).price == 108.0


def test_discounting_scales_everything():
    spec = bc()
    a = price_ebc(spec, PricingInputs(0.1, 3.0, 1.0))
    b = price_ebc(spec, PricingInputs(0.1, 3.0, 1.0, D=0.9, V=1.1))
    assert b.price == pytest.approx(0.99 * a.price, rel=1e-14)


def test_affine_in_delta_with_exact_slope():
    spec = bc("american", K=105.0)
    base = PricingInputs(0.12, call_K=4.0)
    p0 = price_abc(spec, base).price
    p1 = price_abc(spec, PricingInputs(0.12, call_K=4.0, delta=1.0)).price
    assert p1 - p0 == pytest.approx(-(105.0 - 70.0) * 0.12, rel=1e-13)
    s = brc("american")
    q0 = price_abrc(s, PricingInputs(0.12)).price
    q1 = price_abrc(s, PricingInputs(0.12, delta=1.0)).price
    assert q1 - q0 == pytest.approx(-(108.0 - 70.0) * 0.12, rel=1e-13)


@settings(max_examples=50, deadline=None)
@given(p=st.floats(0.0, 0.5), call=st.floats(0, 20), d=st.floats(0.0, 1.0), D=st.floats(0.5, 1.0))
def test_breakdown_sums_to_price_and_delta_lowers_value(p, call, d, D):
    spec = bc("american")
    r0 = price_abc(spec, PricingInputs(p, call_K=call, D=D))
    r = price_abc(spec, PricingInputs(p, call_K=call, delta=d, D=D))
    assert r.price == math.fsum(r.terms.values())
    assert abs(r.price - sum(r.terms.values())) <= 1e-12 * abs(r.price)
    assert r0.price >= r.price


def test_style_mismatch_rejected():
    with pytest.raises(ValidationError):
        price_ebc(bc("american"), PricingInputs(0.1))


def test_dispatch():
    inp = PricingInputs(0.1, 2.0, 1.0)
    assert price(bc(), inp) == price_ebc(bc(), inp)
    assert price(brc("american"), inp) == price_abrc(brc("american"), inp)


def test_hand_computed_abc_from_fitted_sln():
    market = InterpolatedSlice(SlnParams(0.2169, -1.82), F, 1.0, 0.97, 1.0)
    spec = bc("american", B=70.0, K=100.0)
    inp = pricing_inputs(spec, market, delta=0.2)
    p = float(sln_cdf(market.model, F, 70.0))
    call = float(market.call(np.array([100.0]))[0]) / 0.97
    expected = 0.97 * (100.0 - 2 * 30.0 * p + call - 30.0 * 0.2 * p)
    assert price_abc(spec, inp).price == pytest.approx(expected, rel=1e-12)


def test_eps_is_an_additive_deduction_and_both_readings_are_reported():
    spec = bc("american")
    r = price_abc(spec, PricingInputs(0.1, call_K=3.0, eps=0.05))
    assert r.terms["eps_correction"] == pytest.approx(-0.05)
    assert any("multiplicative" in w for w in r.warnings)


# --------------------------------------------------------------------------- payoff oracle


def test_european_payoffs():
    S = np.array([50.0, 70.0, 100.0, 120.0])
    np.testing.assert_array_equal(payoff_european(bc(), S), [50.0, 110.0, 110.0, 120.0])
    np.testing.assert_array_equal(payoff_european(brc(), S), [50.0, 108.0, 108.0, 108.0])


MODELS = [
    SlnParams(0.25, -3.0),
    SlnParams(0.1464, -3.16),
    SabrParams(0.25, -0.5, 0.5, 0.0),
    SabrParams(0.2, -0.6, 0.1, 1.0),
]


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("make", [bc, brc])
def test_closed_form_matches_payoff_integration(model, make):
    market = InterpolatedSlice(model, F, 1.0, 0.98, 1.0)
    spec = make()
    closed = price(spec, pricing_inputs(spec, market)).price
    assert closed == pytest.approx(integrate_payoff(spec, market), rel=1e-6)


def test_far_barrier_bc_is_bonus_plus_call():
    market = InterpolatedSlice(SlnParams(0.1, 2.0), F, 1.0)  # support starts at 50
    spec = bc(B=20.0, K=100.0)
    r = price(spec, pricing_inputs(spec, market))
    call = float(market.call(np.array([100.0]))[0])
    assert r.price == pytest.approx(100.0 + call, rel=1e-12)


def test_low_barrier_at_the_money_bonus_against_oracle():
    market = InterpolatedSlice(SlnParams(0.2, 1e-12), F, 1.0)
    spec = bc(B=1.0, K=F)
    r = price(spec, pricing_inputs(spec, market))
    assert r.price == pytest.approx(integrate_payoff(spec, market), rel=1e-6)
    assert r.price == pytest.approx(F + float(market.call(np.array([F]))[0]), rel=1e-6)


def test_brc_barrier_near_cap_against_oracle():
    market = InterpolatedSlice(SlnParams(0.2, -1.0), F, 1.0)
    spec = ProductSpec("brc", "european", F, 75.0, 1.0, R=0.0)
    assert price(spec, pricing_inputs(spec, market)).price == pytest.approx(integrate_payoff(spec, market), rel=1e-6)


def test_inadmissible_surface_raises_before_pricing():
    market = InterpolatedSlice(SabrParams(0.1464, -0.99, 0.58, 1.0), F, 228 / 365)
    with pytest.raises(DomainError):
        pricing_inputs(bc(T=228 / 365), market)


# --------------------------------------------------------------------------- separation


def test_separation_pass():
    c = separation_check(105.0, 70.0, 0.20, 2.0)
    assert c.ok and c.lhs == pytest.approx(0.5) and c.rhs == pytest.approx(0.2 * math.sqrt(2))


def test_separation_barrier_at_strike_warns():
    assert not separation_check(100.0, 100.0, 0.01, 1.0).ok


def test_separation_warn_with_both_sides():
    c = separation_check(100.0, 90.0, 0.30, 1.0)
    assert not c.ok and c.lhs == pytest.approx(0.15) and c.rhs == pytest.approx(0.30)
    assert "0.15" in c.message and "0.3" in c.message


def test_american_price_reports_separation_violation():
    spec = ProductSpec("bc", "american", F, 95.0, 1.0, K=100.0)
    r = price_abc(spec, PricingInputs(0.3, call_K=5.0), sigma_atm_1y=0.3)
    assert any("separation" in w for w in r.warnings)


def test_validate_separation_uses_cap():
    c = validate_separation(brc(R=8.0), 0.2)
    assert c.lhs == pytest.approx(1.5 * 38.0 / 108.0)


def test_atm_vol_of_flat_slice():
    m = InterpolatedSlice(SlnParams(0.2, 1e-12), F, 2.0)
    assert atm_vol(m) == pytest.approx(0.2 / math.sqrt(2.0), rel=1e-12)


# --------------------------------------------------------------------------- spec validation


def test_product_validation():
    with pytest.raises(ValidationError):
        ProductSpec("bc", "european", F, 110.0, 1.0, K=120.0)
    with pytest.raises(ValidationError):
        ProductSpec("bc", "european", F, 70.0, 1.0)
    with pytest.raises(ValidationError):
        ProductSpec("bc", "european", F, 70.0, 1.0, K=90.0)
    with pytest.raises(ValidationError):
        ProductSpec("brc", "european", F, 90.0, 1.0, R=5.0)
    with pytest.raises(ValidationError):
        ProductSpec.from_dict({"kind": "bc", "barrier_style": "european", "S0": F, "B": 70, "T": 1, "K": 110, "x": 1})
    spec = bc()
    assert ProductSpec.from_dict(spec.to_dict()) == spec


def test_inputs_validation():
    with pytest.raises(DomainError):
        PricingInputs(1.5)
    with pytest.raises(DomainError):
        PricingInputs(0.1, call_K=-1.0)
