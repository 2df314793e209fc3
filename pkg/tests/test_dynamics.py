import math

import numpy as np
import pytest
from pydantic import ValidationError

from dynamics import (
    Anchor,
    IntegratorConfig,
    IntegratorMethod,
    closed_form_deviation_s0,
    closed_form_deviation_s0_derivatives,
    closed_form_trace_s0,
    delta_estimate_s0,
    find_t0,
    first_sign_change,
    focusing_tendency,
    instability_exponents,
    integrate_deviation,
    integrate_lorenz,
    integrate_reduced,
    kappa0,
    kappa0_closed_form_s0,
    p_along_trajectory,
    s0_rates,
    signed_curvature,
    single_sample,
)
from dynamics.integrators import solve_adaptive
from geometry import DomainError, IntegrationError, ParameterError
from lorenz import EquilibriumKind, LorenzParams, LorenzState, equilibrium_location, equilibrium_p_closed_form, recover_y

XI10, XI20 = 1e-9, 1e-8


def _s0_protocol(params, t_end=2.0, sample_every=1e-2, xi10=XI10, xi20=XI20):
    cfg = IntegratorConfig.adaptive(1e-10, t_end, sample_every=sample_every)
    return integrate_deviation(params, Anchor.S0, ((0.0, 0.0), (xi10, xi20)), cfg)


# ==================== CONFIG ====================

def test_sample_times_end_at_t_end():
    times = IntegratorConfig.adaptive(1e-8, 2.0).sample_times()
    assert len(times) == 201
    assert times[0] == 0.0
    assert times[-1] == 2.0
    odd = IntegratorConfig.adaptive(1e-8, 0.105, sample_every=0.01).sample_times()
    assert odd[-1] == 0.105
    assert np.all(np.diff(odd) > 0)


def test_integrator_config_validation():
    with pytest.raises(ValidationError):
        IntegratorConfig.fixed(step=1e-2, t_end=1.0, sample_every=1e-3)
    with pytest.raises(ValidationError):
        IntegratorConfig(step=-1e-3)
    with pytest.raises(ValidationError):
        IntegratorConfig(t_end=float("inf"))
    assert IntegratorMethod.RK4_FIXED.adaptive is False
    assert IntegratorMethod.DOP853_ADAPTIVE.adaptive is True


# ==================== TRAJECTORIES ====================

@pytest.mark.parametrize("cfg", [IntegratorConfig.fixed(1e-3, 1.0), IntegratorConfig.adaptive(1e-10, 1.0)])
def test_origin_is_a_fixed_point(classic, cfg):
    traj = integrate_lorenz(classic, LorenzState(0.0, 0.0, 0.0), cfg)
    np.testing.assert_array_equal(traj.states, 0.0)
    np.testing.assert_array_equal(traj.reduced, 0.0)


def test_s_plus_is_invariant(classic):
    x1, x2 = equilibrium_location(classic, EquilibriumKind.SPLUS)
    traj = integrate_lorenz(classic, LorenzState(x1, x1, x2), IntegratorConfig.adaptive(1e-10, 1.0))
    assert np.max(np.abs(traj.states - np.array([x1, x1, x2]))) < 1e-6


def test_fixed_and_adaptive_agree(classic):
    s0 = LorenzState(1.0, 5.0, 10.0)
    fixed = integrate_lorenz(classic, s0, IntegratorConfig.fixed(1e-3, 1.0))
    adaptive = integrate_lorenz(classic, s0, IntegratorConfig.adaptive(1e-10, 1.0))
    assert fixed.times[-1] == pytest.approx(1.0)
    np.testing.assert_allclose(fixed.states[-1], adaptive.states[-1], atol=1e-5)
    np.testing.assert_allclose(fixed.times, adaptive.times, atol=1e-12)


def test_trajectory_times_increase(classic):
    traj = integrate_lorenz(classic, LorenzState(1.0, 1.0, 1.0), IntegratorConfig.fixed(1e-3, 0.5))
    assert np.all(np.diff(traj.times) > 0)
    assert len(traj) == 51
    assert traj.state(0) == LorenzState(1.0, 1.0, 1.0)


def test_sub_critical_flow_decays_to_origin(rng):
    params = LorenzParams(rho=0.5)
    for _ in range(5):
        s0 = LorenzState(*rng.uniform(-1.0, 1.0, 3))
        traj = integrate_lorenz(params, s0, IntegratorConfig.adaptive(1e-8, 50.0, sample_every=1.0))
        assert np.max(np.abs(traj.states[-1])) < 1e-6


def test_blow_up_raises_integration_error(classic):
    with pytest.raises(IntegrationError):
        integrate_lorenz(classic, LorenzState(1e200, 1e200, 1e200), IntegratorConfig.fixed(1e-3, 1.0))


def test_adaptive_failure_raises_integration_error():
    cfg = IntegratorConfig.adaptive(1e-8, 2.0)
    with pytest.raises(IntegrationError) as excinfo:
        solve_adaptive(lambda t, y: y * y, np.array([1.0]), cfg)
    assert excinfo.value.exit_code == 4
    assert excinfo.value.last_time <= 1.0


def test_curvature_along_trajectory(classic):
    traj = integrate_lorenz(classic, LorenzState(1.0, 5.0, 10.0), IntegratorConfig.fixed(1e-3, 0.1))
    p = p_along_trajectory(classic, traj)
    assert p.shape == (len(traj), 2, 2)
    assert p[0, 0, 0] == pytest.approx(200.25)
    assert p[0, 1, 1] == pytest.approx(55.0 / 9.0)


def test_curvature_at_rest_is_the_origin_curvature(classic):
    traj = integrate_lorenz(classic, LorenzState(0.0, 0.0, 0.0), IntegratorConfig.fixed(1e-3, 0.1))
    expected = equilibrium_p_closed_form(classic, EquilibriumKind.S0)
    for p in p_along_trajectory(classic, traj):
        np.testing.assert_allclose(p, expected)


def test_single_sample_trajectory(classic):
    traj = single_sample(classic, LorenzState(1.0, 5.0, 10.0))
    assert len(traj) == 1
    np.testing.assert_allclose(traj.reduced[0], [1.0, 10.0, 40.0, 5.0 - 80.0 / 3.0])


def test_reduced_integration_tracks_the_flow(classic):
    s0 = LorenzState(1.0, 5.0, 10.0)
    cfg = IntegratorConfig.adaptive(1e-12, 2.0, method=IntegratorMethod.DOP853_ADAPTIVE)
    direct = integrate_lorenz(classic, s0, cfg)
    reduced = integrate_reduced(classic, s0, cfg)
    assert np.max(np.abs(direct.states - reduced.states)) < 1e-6


def test_reduction_round_trip_along_trajectory(classic):
    traj = integrate_lorenz(classic, LorenzState(1.0, 5.0, 10.0), IntegratorConfig.adaptive(1e-10, 10.0))
    recovered = np.array([recover_y(classic, r) for r in traj.reduced])
    scale = float(np.max(np.abs(traj.states)))
    np.testing.assert_allclose(recovered, traj.states[:, 1], atol=1e-12 * scale)


# ==================== DEVIATION ====================

def test_zero_deviation_stays_zero(classic):
    trace = integrate_deviation(classic, Anchor.S0, ((0.0, 0.0), (0.0, 0.0)), IntegratorConfig.adaptive(1e-10, 1.0))
    np.testing.assert_array_equal(trace.xi_norm, 0.0)
    assert np.all(np.isnan(trace.delta))
    assert np.all(np.isnan(trace.kappa0))


def test_origin_deviation_matches_closed_form(classic):
    trace = _s0_protocol(classic)
    xi1, xi2 = closed_form_deviation_s0(classic, XI10, XI20, trace.times)
    mask = trace.times > 0.0
    np.testing.assert_allclose(trace.xi1[mask], xi1[mask], rtol=1e-6)
    np.testing.assert_allclose(trace.xi2[mask], xi2[mask], rtol=1e-6)
    np.testing.assert_array_equal(trace.xi_norm, np.hypot(trace.xi1, trace.xi2))
    assert trace.anchor is Anchor.S0


def test_closed_form_solves_the_deviation_equations(rng):
    for params in [LorenzParams(), LorenzParams(sigma=3.0, rho=5.0, beta=0.7)]:
        a, b = s0_rates(params)
        t = rng.uniform(0.0, 2.0, 1000)
        (x1, x2), (xd1, xd2), (xdd1, xdd2) = closed_form_deviation_s0_derivatives(params, XI10, XI20, t)
        coupling = params.sigma * (1.0 - params.rho)
        residual1 = xdd1 + b * xd1 + coupling * x1
        size1 = np.abs(xdd1) + b * np.abs(xd1) + abs(coupling) * np.abs(x1)
        assert np.all(np.abs(residual1) <= 1e-9 * size1)
        residual2 = xdd2 - params.beta ** 2 * x2
        assert np.all(np.abs(residual2) <= 1e-9 * np.abs(xdd2) + 1e-30)


def test_closed_form_initial_conditions(classic):
    (x1, x2), (xd1, xd2), _ = closed_form_deviation_s0_derivatives(classic, XI10, XI20, np.array([0.0]))
    assert x1[0] == 0.0 and x2[0] == 0.0
    assert xd1[0] == pytest.approx(XI10, rel=1e-12)
    assert xd2[0] == pytest.approx(XI20, rel=1e-12)


def test_closed_form_degenerate_limits(rng):
    t = np.linspace(0.0, 3.0, 31)
    critical = LorenzParams(sigma=1.0, rho=0.0, beta=0.0)
    assert s0_rates(critical) == (0.0, 2.0)
    x1, x2 = closed_form_deviation_s0(critical, XI10, XI20, t)
    np.testing.assert_allclose(x1, XI10 * t * np.exp(-t))
    np.testing.assert_allclose(x2, XI20 * t)


def test_origin_rates_outside_domain():
    with pytest.raises(DomainError):
        s0_rates(LorenzParams(sigma=1.0, rho=-1.0))
    with pytest.raises(DomainError):
        delta_estimate_s0(LorenzParams(sigma=1.0, rho=0.0), XI10, XI20, 5.0)


def test_s_plus_anchor_outside_domain():
    with pytest.raises(DomainError):
        integrate_deviation(
            LorenzParams(rho=0.5), Anchor.SPLUS, ((0.0, 0.0), (XI10, XI20)), IntegratorConfig.adaptive(1e-10, 1.0)
        )


def test_along_anchor_needs_reference(classic):
    with pytest.raises(ParameterError):
        integrate_deviation(classic, Anchor.ALONG_TRAJECTORY, ((0.0, 0.0), (XI10, XI20)), IntegratorConfig.adaptive(1e-10, 1.0))


def test_along_anchor_at_rest_matches_the_origin(classic):
    cfg = IntegratorConfig.adaptive(1e-10, 1.0)
    reference = single_sample(classic, LorenzState(0.0, 0.0, 0.0))
    along = integrate_deviation(classic, Anchor.ALONG_TRAJECTORY, ((0.0, 0.0), (XI10, XI20)), cfg, reference=reference)
    frozen = integrate_deviation(classic, Anchor.S0, ((0.0, 0.0), (XI10, XI20)), cfg)
    np.testing.assert_allclose(along.xi1[1:], frozen.xi1[1:], rtol=1e-6)
    np.testing.assert_allclose(along.xi2[1:], frozen.xi2[1:], rtol=1e-6)


def test_norms_at_the_origin_grow_with_rho():
    norms = [_s0_protocol(LorenzParams(rho=rho)).xi_norm[-1] for rho in (10.0, 15.0, 20.0, 25.0, 28.0, 33.0)]
    assert all(a < b for a, b in zip(norms, norms[1:]))


@pytest.mark.parametrize("anchor", [Anchor.SPLUS, Anchor.SMINUS])
def test_norms_at_s_plus_minus_shrink_with_rho(anchor):
    cfg = IntegratorConfig.adaptive(1e-10, 2.0)
    norms = [
        integrate_deviation(LorenzParams(rho=rho), anchor, ((0.0, 0.0), (1e-10, 1e-9)), cfg).xi_norm[-1]
        for rho in (15.0, 20.0, 25.0, 28.0, 33.0)
    ]
    assert all(a > b for a, b in zip(norms, norms[1:]))


# ==================== EXPONENTS ====================

def test_first_exponent_converges(classic):
    a, b = s0_rates(classic)
    limit = 0.5 * (a - b)
    assert limit == pytest.approx(0.5 * (np.sqrt(1201.0) - 11.0))
    exact = instability_exponents(closed_form_trace_s0(classic, XI10, XI20, np.linspace(0.0, 40.0, 401)))
    assert exact.t == 40.0
    assert abs(exact.delta1 - limit) < 0.01 * limit
    numeric = instability_exponents(_s0_protocol(classic, t_end=40.0, sample_every=1.0))
    assert abs(numeric.delta1 - limit) < 0.01 * limit


def test_second_exponent_converges(classic):
    trace = closed_form_trace_s0(classic, 0.0, XI20, np.linspace(0.0, 80.0, 81))
    exponents = instability_exponents(trace)
    assert abs(exponents.delta2 - classic.beta) < 0.01 * classic.beta
    assert np.isnan(exponents.delta1)
    assert np.isnan(exponents.delta)


def test_delta_matches_large_time_estimate(classic):
    times = np.linspace(0.0, 5.0, 51)
    estimate = delta_estimate_s0(classic, XI10, XI20, 5.0)
    exact = instability_exponents(closed_form_trace_s0(classic, XI10, XI20, times))
    assert exact.delta == pytest.approx(estimate, rel=1e-9)
    numeric = instability_exponents(_s0_protocol(classic, t_end=5.0, sample_every=0.1))
    assert numeric.delta == pytest.approx(estimate, rel=1e-7)


def test_exponent_series_is_undefined_at_start(classic):
    trace = _s0_protocol(classic, t_end=0.1)
    assert np.isnan(trace.delta[0])
    assert np.all(np.isfinite(trace.delta[1:]))


# ==================== CURVATURE ====================

def test_straight_deviation_has_no_curvature(classic):
    trace = closed_form_trace_s0(classic, XI10, 0.0, np.linspace(0.0, 1.0, 11))
    np.testing.assert_array_equal(trace.kappa0, 0.0)


def test_initial_curvature(classic):
    a, b = s0_rates(classic)
    r = XI20 / XI10
    trace = closed_form_trace_s0(classic, XI10, XI20, np.linspace(0.0, 1.0, 11))
    assert kappa0(trace, 0) == pytest.approx(b * r / ((1.0 + r * r) ** 1.5 * XI10), rel=1e-10)


def test_explicit_curvature_matches_general_formula(classic):
    t = np.linspace(0.0, 2.0, 201)
    _, (xd1, xd2), (xdd1, xdd2) = closed_form_deviation_s0_derivatives(classic, XI10, XI20, t)
    general = signed_curvature(xd1, xd2, xdd1, xdd2)
    explicit = kappa0_closed_form_s0(classic, XI10, XI20, t)
    np.testing.assert_allclose(explicit, general, rtol=1e-9, atol=1e-9 * np.max(np.abs(general)))


def test_numeric_curvature_matches_closed_form(classic):
    trace = _s0_protocol(classic, t_end=1.0)
    explicit = kappa0_closed_form_s0(classic, XI10, XI20, trace.times)
    np.testing.assert_allclose(trace.kappa0, explicit, rtol=1e-6, atol=1e-6 * np.max(np.abs(explicit)))


def test_signed_curvature_marks_singular_speed():
    values = signed_curvature(np.array([0.0, 1.0]), np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([1.0, 2.0]))
    assert np.isnan(values[0])
    assert values[1] == 2.0


# ==================== ONSET OF CHAOS ====================

def test_t0_at_classic_parameters(classic):
    onset = find_t0(classic, XI10, XI20)
    assert onset.found
    assert onset.t0 == pytest.approx(0.039, abs=1e-3)
    assert onset.approximation == pytest.approx(1.099 / 38.02)
    assert onset.sign_pattern.startswith("+-")
    assert onset.is_early(0.05)
    assert not onset.is_early(0.01)


@pytest.mark.parametrize("rho", [15.0, 20.0, 25.0, 28.0, 33.0])
def test_t0_is_close_to_its_approximation(rho):
    onset = find_t0(LorenzParams(rho=rho), XI10, XI20)
    assert 1.0 < onset.t0 / onset.approximation < 2.0


def test_t0_decreases_with_rho():
    roots = [find_t0(LorenzParams(rho=rho), XI10, XI20).t0 for rho in (10.0, 15.0, 20.0, 25.0, 28.0, 33.0)]
    assert all(a > b for a, b in zip(roots, roots[1:]))


def test_t0_does_not_depend_on_deviation_scale(classic):
    roots = {find_t0(classic, XI10 * c, XI20 * c).t0 for c in (1e-3, 1.0, 1e3)}
    assert len(roots) == 1


def test_t0_with_tiny_deviation_speeds(classic):
    tiny = find_t0(classic, 1e-170, 1e-169)
    assert tiny.found
    assert tiny.t0 == find_t0(classic, XI10, XI20).t0
    assert tiny.sign_pattern.startswith("+-")
    assert math.isfinite(tiny.kappa0_at_horizon)
    flipped = find_t0(classic, -1e-170, 1e-169)
    assert flipped.t0 == tiny.t0
    assert flipped.sign_pattern.startswith("-+")


def test_explicit_curvature_with_tiny_deviation_speeds(classic):
    t = np.linspace(0.0, 2.0, 201)
    scale = 1e-161
    reference = kappa0_closed_form_s0(classic, XI10, XI20, t)
    tiny = kappa0_closed_form_s0(classic, XI10 * scale, XI20 * scale, t)
    assert np.all(np.isfinite(tiny))
    np.testing.assert_allclose(tiny * scale, reference, rtol=1e-12)


def test_t0_without_sign_change(classic):
    flat = find_t0(classic, XI10, 0.0)
    assert not flat.found
    assert flat.sign_pattern == "0"
    early = find_t0(classic, XI10, XI20, t_max=1e-3)
    assert not early.found
    assert early.sign_pattern == "+"


def test_sign_change_of_sampled_trace(classic):
    trace = closed_form_trace_s0(classic, XI10, XI20, np.linspace(0.0, 0.2, 2001))
    assert first_sign_change(trace) == pytest.approx(find_t0(classic, XI10, XI20).t0, abs=1e-4)


def test_sign_change_on_numeric_trace(classic):
    trace = _s0_protocol(classic, t_end=0.2, sample_every=1e-3)
    assert first_sign_change(trace) == pytest.approx(find_t0(classic, XI10, XI20).t0, abs=1e-3)


def test_focusing_tendency(classic):
    assert focusing_tendency(_s0_protocol(classic, t_end=0.1)) == "bunching"
    fast = integrate_deviation(classic, Anchor.S0, ((0.0, 0.0), (10.0, 10.0)), IntegratorConfig.adaptive(1e-10, 0.1))
    assert focusing_tendency(fast) == "dispersing"
