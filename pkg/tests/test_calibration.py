import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barrierprod.calibration import (
    FitResult,
    TermStructure,
    calibrate,
    e2,
    fit_term_structure,
    interpolate_by_prices,
    interpolate_params,
    objective_e2,
    synthetic_slice,
    term_structure_from_fits,
)
from barrierprod.errors import DomainError, InsufficientDataError
from barrierprod.market_data import MarketSlice, OptionQuote, Surface
from barrierprod.models import HexParams, SabrParams, SlnParams, bachelier_call, bachelier_put, sln_put

from conftest import EUROSTOXX_SLN, SP500_SABR_NU, SP500_SABR_RHO, SP500_SLN


def test_e2_zero_when_prices_match():
    assert e2([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0


def test_e2_single_quote():
    assert e2([2.0], [1.0]) == pytest.approx(1 / 9, rel=1e-15)


def test_e2_rejects_non_positive_model_prices():
    with pytest.raises(DomainError):
        e2([1.0], [0.0])


@settings(max_examples=40, deadline=None)
@given(
    mkt=st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=10),
    noise=st.lists(st.floats(0.5, 2.0), min_size=10, max_size=10),
    c=st.floats(1e-3, 1e3),
)
def test_e2_scale_invariance(mkt, noise, c):
    mod = [m * n for m, n in zip(mkt, noise)]
    a = e2(mkt, mod)
    b = e2([c * m for m in mkt], [c * m for m in mod])
    assert b == pytest.approx(a, rel=1e-12, abs=1e-15)


def test_generated_slice_scores_zero_against_its_own_parameters():
    p = SlnParams(0.1312, -1.73)
    assert objective_e2(p, synthetic_slice(p, 203)) < 1e-20


@pytest.mark.parametrize("row", SP500_SLN + EUROSTOXX_SLN, ids=lambda r: f"{r[0]}d")
def test_sln_round_trip_on_published_parameters(row):
    days, q, s = row
    fit = calibrate(synthetic_slice(SlnParams(s, q), days), "sln")
    assert fit.params.sigma_bar == pytest.approx(s, rel=1e-2)
    assert fit.params.q == pytest.approx(q, rel=1e-2, abs=1e-3)
    assert fit.objective < 1e-12


@pytest.mark.parametrize("i", [0, 4])
def test_sabr_lognormal_backbone_round_trip(i):
    days, _, s = SP500_SLN[i]
    truth = SabrParams(s, SP500_SABR_RHO[i], SP500_SABR_NU[i], 1.0)
    fit = calibrate(synthetic_slice(truth, days), "sabr1")
    assert fit.params.rho == pytest.approx(truth.rho, rel=0.05)
    assert fit.params.nu == pytest.approx(truth.nu, rel=0.05)
    assert fit.params.beta == 1.0


def test_sabr_normal_backbone_round_trip():
    truth = SabrParams(0.2, -0.4, 0.6, 0.0)
    fit = calibrate(synthetic_slice(truth, 365), "sabr0")
    assert fit.params.sigma1 == pytest.approx(0.2, rel=1e-3)
    assert fit.params.rho == pytest.approx(-0.4, rel=0.05)
    assert fit.params.nu == pytest.approx(0.6, rel=0.05)


def test_flat_smile_gives_negligible_skew():
    F, sig = 100.0, 0.2
    K = F * (1 + np.linspace(-0.5, 0.5, 21))
    quotes = [OptionQuote(float(k), float(bachelier_call(F, k, sig * F)), float(bachelier_put(F, k, sig * F))) for k in K]
    fit = calibrate(MarketSlice(365, F, quotes), "sln")
    assert abs(fit.params.q) < 0.05


def test_hex_fit_improves_on_its_base():
    # SLN data fitted by HEX on a SABR base: the tails must not make things worse
    sl = synthetic_slice(SlnParams(0.1464, -3.16), 228)
    base = calibrate(sl, "sabr0")
    fit = calibrate(sl, "hex", hex_base="sabr0")
    assert isinstance(fit.params, HexParams)
    assert fit.objective <= base.objective + 1e-15


def test_too_few_quotes():
    sl = MarketSlice(30, 100.0, [OptionQuote(100.0, 4.0, 4.0), OptionQuote(110.0, 1.0, 11.0)])
    with pytest.raises(InsufficientDataError):
        calibrate(sl, "sln")


def test_fit_is_reproducible_for_a_seed():
    sl = synthetic_slice(SlnParams(0.11, -4.7), 148)
    a = calibrate(sl, "sln", seed=3)
    b = calibrate(sl, "sln", seed=3)
    assert a == b


def test_fit_result_serialisation_round_trip():
    fit = calibrate(synthetic_slice(SlnParams(0.11, -4.7), 148), "sln")
    assert FitResult.from_dict(fit.to_dict()) == fit


# --------------------------------------------------------------------------- term structure


@pytest.fixture(scope="module")
def sp500_ts():
    surf = Surface([synthetic_slice(SlnParams(s, q), d) for d, q, s in SP500_SLN])
    return fit_term_structure(surf, "sln")


def test_knots_are_reproduced_exactly(sp500_ts):
    for k, fit in enumerate(sp500_ts.fits):
        assert interpolate_params(sp500_ts, sp500_ts.maturities[k]) == fit.params


def test_two_knots_midpoint_is_the_mean():
    fits = [
        FitResult(SlnParams(0.1, -3.0), 0.0, 10, True, 1),
        FitResult(SlnParams(0.2, -1.0), 0.0, 10, True, 1),
    ]
    ts = TermStructure("sln", [0.5, 1.5], fits, [100.0, 100.0], [1.0, 1.0], [1.0, 1.0])
    mid = interpolate_params(ts, 1.0)
    assert mid.sigma_bar == pytest.approx(0.15, rel=1e-14)
    assert mid.q == pytest.approx(-2.0, rel=1e-14)


def test_817_days_is_bracketed(sp500_ts):
    p = interpolate_params(sp500_ts, 817 / 365)
    assert 0.2642 < p.sigma_bar < 0.3399
    assert -1.08 < p.q < -0.5


def test_interpolation_is_continuous(sp500_ts):
    for t in sp500_ts.maturities[1:-1]:
        lo = interpolate_params(sp500_ts, t - 1e-9)
        hi = interpolate_params(sp500_ts, t + 1e-9)
        assert lo.sigma_bar == pytest.approx(hi.sigma_bar, abs=1e-6)
        assert lo.q == pytest.approx(hi.q, abs=1e-6)


def test_outside_range_needs_explicit_extrapolation(sp500_ts):
    with pytest.raises(DomainError, match="outside fitted range"):
        interpolate_params(sp500_ts, 5.0)
    interpolate_params(sp500_ts, 3.0, extrapolate=True)


def test_inadmissible_interpolated_values_are_clamped_with_a_warning():
    # quadratic through a falling vol of vol goes negative beyond the last knot
    fits = [
        FitResult(SabrParams(0.2, -0.5, 1.0, 1.0), 0.0, 10, True, 1),
        FitResult(SabrParams(0.2, -0.5, 0.5, 1.0), 0.0, 10, True, 1),
        FitResult(SabrParams(0.2, -0.5, 0.02, 1.0), 0.0, 10, True, 1),
    ]
    ts = TermStructure("sabr1", [0.1, 0.2, 0.3], fits, [100.0] * 3, [1.0] * 3, [1.0] * 3)
    with pytest.warns(RuntimeWarning, match="nu"):
        p = interpolate_params(ts, 0.45, extrapolate=True)
    assert p.nu >= 0.0


def test_term_structure_serialisation(sp500_ts):
    back = TermStructure.from_dict(sp500_ts.to_dict())
    assert back.fits == sp500_ts.fits
    np.testing.assert_array_equal(back.maturities, sp500_ts.maturities)
    assert back.maturity_days == sp500_ts.maturity_days


def test_bracketing_alternative_stays_between_neighbours():
    surf = Surface([synthetic_slice(SlnParams(s, q), d) for d, q, s in SP500_SLN[8:]])
    ts = fit_term_structure(surf, "sln")
    fit = interpolate_by_prices(ts, 817 / 365)
    assert 0.2642 < fit.params.sigma_bar < 0.3399


def test_single_maturity_cannot_interpolate():
    ts = term_structure_from_fits("sln", [synthetic_slice(SlnParams(0.2, -1.0), 365)],
                                  [FitResult(SlnParams(0.2, -1.0), 0.0, 10, True, 1)])
    assert interpolate_params(ts, 1.0) == SlnParams(0.2, -1.0)
    with pytest.raises(InsufficientDataError):
        interpolate_params(ts, 1.1, extrapolate=True)
