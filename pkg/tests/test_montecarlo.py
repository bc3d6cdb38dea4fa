import math
import warnings

import numpy as np
import pytest

from barrierprod.errors import ConfigurationError, DomainError
from barrierprod.montecarlo import (
    BarrierStats,
    DynamicsSpec,
    RunConfig,
    reference_dynamic,
    reference_static,
    conditional_densities,
    delta_and_bound,
    epsilon_terms,
    martingale_hit_gap,
    price_impact_bound,
    ratio_stderr,
    simulate,
)
from barrierprod.products import ProductSpec

from conftest import MC_LEVELS

N = 40_000


def run(dyn, **kw):
    cfg = RunConfig(**{"n_paths": N, "seed": 7, **kw})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return simulate(dyn, cfg)


DYNAMICS = {
    "sln_static": DynamicsSpec.sln_static(0.25, -2.0),
    "sln_dynamic": reference_dynamic(),
    "sln_euler": reference_dynamic(scheme="euler"),
    "sabr_lognormal": DynamicsSpec.sabr(0.2, -0.5, 0.5, 1.0),
    "sabr_normal": DynamicsSpec.sabr(0.2, -0.3, 0.4, 0.0),
    "sabr_cev": DynamicsSpec.sabr(0.2, -0.3, 0.4, 0.5),
}


@pytest.mark.parametrize("name", DYNAMICS)
def test_martingale(name):
    r = run(DYNAMICS[name], antithetic=False)
    assert abs(r.mean_terminal - 1.0) < 4 * r.stderr_terminal


@pytest.mark.parametrize("name", DYNAMICS)
def test_partition_and_nesting(name):
    r = run(DYNAMICS[name])
    hits = [s.hits for s in r]
    assert all(s.ended_below + s.ended_above == s.hits for s in r)
    assert hits == sorted(hits)
    assert [s.ended_below for s in r] == sorted(s.ended_below for s in r)


@pytest.mark.parametrize(
    "dyn",
    [DynamicsSpec.sln_static(0.25, 0.0, scheme="euler"), DynamicsSpec.sabr(0.25, 0.0, 0.0, 0.0)],
    ids=["arithmetic_bm", "sabr_flat"],
)
def test_symmetric_dynamics_have_zero_delta(dyn):
    r = run(dyn, n_paths=100_000)
    for s in r:
        assert abs(s.delta_hat) < 3 * s.std_err


def test_negative_skew_gives_positive_delta():
    r = run(reference_dynamic())
    assert all(s.delta_hat > 3 * s.std_err for s in r)


def test_bit_exact_reproducibility_across_threads():
    a = run(reference_dynamic(), n_paths=20_000, workers=1)
    b = run(reference_dynamic(), n_paths=20_000, workers=3)
    c = run(reference_dynamic(), n_paths=20_000, workers=1)
    assert a.stats == b.stats == c.stats
    assert a.mean_terminal == b.mean_terminal == c.mean_terminal


def test_seed_changes_the_sample():
    a = run(reference_dynamic(), n_paths=20_000, seed=1)
    b = run(reference_dynamic(), n_paths=20_000, seed=2)
    assert a.stats != b.stats


def test_log_scheme_never_clamps_and_euler_reports_clamps():
    dyn = DynamicsSpec.sln_static(0.4, -6.0)
    assert run(dyn, n_paths=10_000).clamp_rate == 0.0
    with pytest.warns(RuntimeWarning, match="clamp rate"):
        r = simulate(DynamicsSpec.sln_static(0.4, -6.0, scheme="euler", steps_per_year=12), RunConfig(10_000, 3))
    assert r.clamp_rate > 1e-3


def test_bridge_only_adds_hits():
    on = run(reference_dynamic(), brownian_bridge=True)
    off = run(reference_dynamic(), brownian_bridge=False)
    for a, b in zip(on, off):
        assert a.hits >= b.hits
        assert a.ended_below == b.ended_below


def test_coefficients_start_at_first_step():
    sig, q = reference_dynamic().coefficient_paths()
    dt = 1 / 250
    assert sig[0] == pytest.approx(0.15 * dt**0.124)
    assert q[0] == pytest.approx(-3.1 * dt**-0.67)
    assert sig[1] == sig[0] and q[-1] == pytest.approx(-3.1 * (249 * dt) ** -0.67)


def test_small_run_warns():
    with pytest.warns(RuntimeWarning, match="statistics unreliable"):
        r = simulate(reference_dynamic(), RunConfig(1000, 1))
    assert r.stats[0].std_err > 0.05


# --------------------------------------------------------------------------- delta summaries


def test_delta_zero_when_above_equals_below():
    s = BarrierStats(1000, 0.7, 200, 100, 100, 0.0, 0.05)
    assert delta_and_bound(s).delta == 0.0


def test_published_row_delta():
    s = BarrierStats(1_000_000, 0.6, 22120 + 18981, 18981, 22120, math.nan, 0.01)
    assert delta_and_bound(s).delta == pytest.approx(0.1654, abs=1e-4)


def test_price_impact_bound():
    assert price_impact_bound(0.05) == pytest.approx(0.0025)
    s = BarrierStats(1000, 0.7, 200, 100, 100, 0.0, 0.02)
    summ = delta_and_bound(s)
    assert summ.delta_uncertainty == pytest.approx(1.959964 * 0.02, rel=1e-6)
    assert summ.price_impact_bound == pytest.approx(summ.delta_uncertainty / 20)


def test_delta_undefined_without_paths_below():
    with pytest.raises(DomainError):
        delta_and_bound(BarrierStats(10, 0.5, 0, 0, 0, math.nan, math.nan))


def test_partition_is_enforced():
    with pytest.raises(ValueError):
        BarrierStats(10, 0.5, 3, 1, 1, 0.0, 0.0)


def test_ratio_stderr_matches_bootstrap_scale():
    rng = np.random.default_rng(0)
    den = rng.poisson(100, 100).astype(float)
    num = rng.poisson(120, 100).astype(float)
    se = ratio_stderr(num, den)
    assert 0.005 < se < 0.03


# --------------------------------------------------------------------------- epsilon and conditional densities


def test_eps_zero_for_unreachable_barrier():
    spec = ProductSpec("bc", "american", 100.0, 5.0, 1.0, K=110.0)
    e = epsilon_terms(DynamicsSpec.sln_static(0.15, 0.0), RunConfig(20_000, 1), spec)
    assert e["eps"] == 0.0


def test_eps_vanishes_for_huge_bonus():
    spec = ProductSpec("bc", "american", 100.0, 70.0, 1.0, K=1e6)
    e = epsilon_terms(reference_dynamic(), RunConfig(20_000, 1), spec)
    assert e["eps"] == 0.0 and e["name"] == "eps_bc"


def test_eps_small_in_reference_regime():
    spec = ProductSpec("bc", "american", 100.0, 70.0, 1.0, K=110.0)
    e = epsilon_terms(reference_dynamic(), RunConfig(100_000, 2), spec)
    assert 0 <= e["relative"] < 0.005
    r = epsilon_terms(reference_dynamic(), RunConfig(100_000, 2), ProductSpec("brc", "american", 100.0, 70.0, 1.0, R=8.0))
    assert r["name"] == "eps_rc" and 0 <= r["relative"] < 0.005


def test_conditional_histograms_partition_and_lower_region():
    dens = conditional_densities(reference_dynamic(), RunConfig(N, 4, barriers=(0.7, 0.8)))
    for d in dens:
        np.testing.assert_array_equal(d.hit + d.not_hit, d.total)
        below = d.edges[1:] <= d.barrier_frac
        np.testing.assert_array_equal(d.hit[below], d.total[below])
        assert np.all(d.not_hit[below] == 0)


def test_hit_conditional_mean_is_the_barrier_for_symmetric_diffusion():
    dens = conditional_densities(DynamicsSpec.sln_static(0.25, 0.0), RunConfig(200_000, 5, barriers=(0.8,)))
    d = dens[0]
    assert abs(d.hit_mean - 0.8) < 4 * d.hit_mean_stderr


def test_optional_stopping_at_the_recorded_hit():
    gap, se = martingale_hit_gap(reference_dynamic(), RunConfig(100_000, 6), 0.7)
    assert abs(gap) < 4 * se


# --------------------------------------------------------------------------- configuration


def test_json_round_trip():
    for dyn in DYNAMICS.values():
        assert DynamicsSpec.from_dict(dyn.to_dict()) == dyn


def test_static_from_total_volatility():
    dyn = DynamicsSpec.from_dict({"kind": "sln_static", "T": 4.0, "sln_static": {"sigma_bar": 0.4, "q": -1.0}})
    assert dyn.sigma_A == pytest.approx(0.2)


def test_configuration_errors():
    with pytest.raises(ConfigurationError):
        RunConfig(1001, antithetic=True)
    with pytest.raises(ConfigurationError):
        RunConfig(1000, barriers=(1.2,))
    with pytest.raises(ConfigurationError):
        DynamicsSpec.from_dict({"kind": "nope"})
    with pytest.raises(ConfigurationError):
        DynamicsSpec.from_dict({"kind": "sln_dynamic", "sln_dynamic": {"sigma_A": 0.1}})
    with pytest.raises(ConfigurationError):
        DynamicsSpec.sabr(0.2, -2.0, 0.1, 1.0)


def test_reference_configurations():
    assert reference_static().q == -3.82
    assert reference_dynamic().to_dict()["sln_dynamic"] == {"sigma_A": 0.15, "alpha": 0.124, "q_B": 3.1, "beta_exp": -0.67}
    assert RunConfig().barriers == MC_LEVELS


@pytest.mark.slow
def test_step_size_convergence():
    # 10^6 paths at 250 and 1000 steps a year; about a minute and a half
    cfg = RunConfig(1_000_000, 42)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        coarse = simulate(reference_dynamic(steps_per_year=250), cfg)
        fine = simulate(reference_dynamic(steps_per_year=1000), cfg)
    gaps = [abs(a.delta_hat - b.delta_hat) for a, b in zip(coarse, fine)]
    assert max(gaps) < 0.02, gaps
