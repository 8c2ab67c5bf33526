import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from privcomm import (
    ChannelSpec,
    DegeneratePrivacyTarget,
    EncoderPolicy,
    InfeasiblePrivacyTarget,
    InfiniteRateError,
    evaluate_setting1,
    evaluate_setting2,
    evaluate_setting3,
    privacy_bounds,
    solve_alpha_quadratic,
    solve_setting1,
    solve_setting2,
    solve_setting3,
    validate_model,
    xi_sign_check,
)
from privcomm.equilibrium import mixing_gain, second_order_dc_dp

from conftest import models_with_targets, source_models

M = validate_model(1.0, 0.6, 1.0)

# frozen reference roots for rho=0.6, r=1, d=0.84:
# delta = sqrt(0.64 * (1/0.84 - 1)) evaluated independently
REF_DELTA = math.sqrt(0.64 * (1.0 / 0.84 - 1.0))
REF_ALPHA = -0.6 + REF_DELTA


class TestAlphaQuadratic:
    def test_reference_roots(self):
        plus, minus = solve_alpha_quadratic(M, 0.84, 0.0)
        assert plus == pytest.approx(-0.250851, abs=1e-6)
        assert minus == pytest.approx(-0.949149, abs=1e-6)
        assert plus == pytest.approx(REF_ALPHA, abs=1e-14)

    def test_both_roots_hit_target(self):
        for root in solve_alpha_quadratic(M, 0.84, 0.0):
            _, d_p = second_order_dc_dp(M, root, 0.0)
            assert d_p == pytest.approx(0.84, abs=1e-12)

    def test_max_privacy_double_root(self):
        plus, minus = solve_alpha_quadratic(M, 1.0, 0.0)
        assert plus == minus == pytest.approx(-0.6, abs=1e-12)

    def test_min_privacy_roots(self):
        plus, minus = solve_alpha_quadratic(M, 0.64, 0.0)
        assert plus == pytest.approx(0.0, abs=1e-12)
        assert minus == pytest.approx(-1.2, abs=1e-12)

    def test_infeasible_target(self):
        with pytest.raises(InfeasiblePrivacyTarget):
            solve_alpha_quadratic(M, 1.5, 0.0)

    def test_degenerate_target(self):
        with pytest.raises(DegeneratePrivacyTarget):
            solve_alpha_quadratic(M, 0.0, 0.0)

    @given(models_with_targets())
    @settings(max_examples=200)
    def test_back_substitution(self, model_target):
        model, target = model_target
        d = target / model.sigma_x2
        if d <= 1e-9:
            return
        for root in solve_alpha_quadratic(model, d, 0.0):
            _, d_p = second_order_dc_dp(model, root, 0.0)
            assert d_p / model.sigma_x2 == pytest.approx(d, abs=1e-9)


class TestEvaluators:
    def test_setting1_identity_chain(self):
        d_c, d_p = evaluate_setting1(M, EncoderPolicy(alpha=0.0))
        assert d_c == 0.0
        assert d_p == pytest.approx(0.64)

    def test_setting1_prediction_error(self):
        d_c, d_p = evaluate_setting1(M, EncoderPolicy(alpha=-0.6))
        assert d_c == pytest.approx(0.36, abs=1e-14)
        assert d_p == pytest.approx(1.0, abs=1e-14)

    def test_setting1_reference_point(self):
        d_c, d_p = evaluate_setting1(M, EncoderPolicy(alpha=REF_ALPHA))
        assert d_c == pytest.approx(0.052857, abs=5e-6)
        assert d_p == pytest.approx(0.84, abs=1e-9)

    def test_setting2_alpha_zero(self):
        m = validate_model(1.0, 0.5, 1.0)
        rate, d_c, d_p = evaluate_setting2(m, EncoderPolicy(alpha=0.0, noise_var=1.0))
        assert rate == pytest.approx(0.5 * math.log(2.0))
        assert d_c == pytest.approx(0.5)
        assert d_p == pytest.approx(1.0 - 0.25 / 2.0)

    def test_setting2_reference(self):
        m = validate_model(1.0, 0.5, 1.0)
        _, _, d_p = evaluate_setting2(m, EncoderPolicy(alpha=-0.2, noise_var=1.0))
        assert d_p == pytest.approx(1.0 - 0.09 / 1.84, abs=1e-12)

    def test_setting2_large_noise_limit(self):
        rate, d_c, d_p = evaluate_setting2(M, EncoderPolicy(alpha=-0.3, noise_var=1e9))
        assert rate == pytest.approx(0.0, abs=1e-6)
        assert d_c == pytest.approx(1.0, rel=1e-6)
        assert d_p == pytest.approx(1.0, rel=1e-6)

    def test_setting2_rejects_zero_noise(self):
        with pytest.raises(InfiniteRateError):
            evaluate_setting2(M, EncoderPolicy(alpha=0.0, noise_var=0.0))

    @given(source_models(), st.floats(-2.0, 1.0), st.floats(1e-3, 10.0))
    @settings(max_examples=300)
    def test_setting2_dc_forms_agree(self, model, alpha, noise):
        # the evaluator also cross-checks the two expressions internally
        _, d_c, _ = evaluate_setting2(model, EncoderPolicy(alpha=alpha, noise_var=noise))
        n = noise / model.sigma_x2
        alt = model.sigma_x2 * (
            1.0 - (1.0 + alpha * model.rho) ** 2 / (mixing_gain(model, alpha) + n)
        )
        assert d_c == pytest.approx(alt, rel=1e-10, abs=1e-13 * model.sigma_x2)

    def test_setting3_power(self):
        ch = ChannelSpec(p_t=2.0, sigma_z2=0.5)
        beta = math.sqrt(2.0 / mixing_gain(M, -0.3))
        _, _, power = evaluate_setting3(M, EncoderPolicy(alpha=-0.3, beta=beta), ch)
        assert power == pytest.approx(2.0, rel=1e-12)


class TestSolveSetting1:
    def test_max_privacy_endpoint(self):
        sol = solve_setting1(M, 1.0)
        assert sol.policy.alpha == -0.6
        assert sol.kappa == pytest.approx(1.0)
        assert sol.d_c == pytest.approx(0.36, rel=1e-12)
        assert sol.constraint_active

    def test_min_privacy_endpoint(self):
        sol = solve_setting1(M, 0.64)
        assert sol.policy.alpha == 0.0
        assert sol.kappa == 1.0
        assert sol.d_c == 0.0
        assert not sol.constraint_active

    def test_reference_solution(self):
        sol = solve_setting1(M, 0.84)
        assert sol.policy.alpha == pytest.approx(-0.250851, abs=1e-6)
        assert sol.kappa == pytest.approx(1.114956, abs=5e-6)
        assert sol.d_c == pytest.approx(0.052857, abs=5e-6)
        assert sol.policy.noise_var == 0.0

    def test_below_floor_is_inactive(self):
        sol = solve_setting1(M, 0.1)
        assert sol.policy.alpha == 0.0 and not sol.constraint_active

    def test_infeasible(self):
        with pytest.raises(InfeasiblePrivacyTarget):
            solve_setting1(M, 1.01)

    def test_rho_zero_guarded(self):
        m = validate_model(1.0, 0.0, 1.0)
        sol = solve_setting1(m, 1.0)
        assert sol.policy.alpha == 0.0 and sol.d_c == 0.0

    @given(models_with_targets())
    @settings(max_examples=200)
    def test_invariants(self, model_target):
        model, target = model_target
        sol = solve_setting1(model, target)
        bounds = privacy_bounds(model)
        assert sol.policy.noise_var == 0.0
        assert -model.rho / model.r - 1e-12 <= sol.policy.alpha <= 1e-12
        assert sol.d_c >= 0.0
        assert bounds.dp_min - 1e-9 <= sol.d_p <= bounds.dp_max + 1e-9
        if sol.constraint_active:
            assert sol.d_p == pytest.approx(target, rel=1e-9, abs=1e-9)

    @given(models_with_targets())
    @settings(max_examples=100)
    def test_chosen_root_has_lower_distortion(self, model_target):
        model, target = model_target
        d = target / model.sigma_x2
        bounds = privacy_bounds(model)
        if not (bounds.dp_min * 1.001 + 1e-9 < target < bounds.dp_max * 0.999):
            return
        plus, minus = solve_alpha_quadratic(model, d, 0.0)
        sol = solve_setting1(model, target)
        d_c_plus = second_order_dc_dp(model, plus, 0.0)[0]
        d_c_minus = second_order_dc_dp(model, minus, 0.0)[0]
        assert sol.d_c <= min(d_c_plus, d_c_minus) + 1e-12
        assert sol.policy.alpha == pytest.approx(plus if d_c_plus <= d_c_minus else minus)


class TestSolveSetting2:
    def test_inactive_constraint(self):
        m = validate_model(1.0, 0.5, 1.0)
        sol = solve_setting2(m, 0.8, 1.0)
        assert sol.policy.alpha == 0.0 and not sol.constraint_active

    def test_active_constraint_reference(self):
        m = validate_model(1.0, 0.5, 1.0)
        sol = solve_setting2(m, 1.0 - 0.09 / 1.84, 1.0)
        assert sol.policy.alpha == pytest.approx(-0.2, abs=1e-9)
        assert sol.constraint_active

    def test_noiseless_limit_matches_setting1(self):
        sol2 = solve_setting2(M, 0.84, 1e-8)
        sol1 = solve_setting1(M, 0.84)
        assert sol2.policy.alpha == pytest.approx(sol1.policy.alpha, abs=1e-4)
        assert sol2.d_c == pytest.approx(sol1.d_c, abs=1e-4)

    def test_infeasible(self):
        with pytest.raises(InfeasiblePrivacyTarget):
            solve_setting2(M, 1.5, 1.0)

    def test_zero_noise_rejected(self):
        with pytest.raises(InfiniteRateError):
            solve_setting2(M, 0.84, 0.0)

    @given(models_with_targets(), st.floats(1e-4, 10.0))
    @settings(max_examples=200)
    def test_back_substitution(self, model_target, sigma_n2):
        model, target = model_target
        sol = solve_setting2(model, target, sigma_n2)
        if sol.constraint_active:
            assert sol.d_p == pytest.approx(target, rel=1e-9, abs=1e-9 * model.sigma_x2)
        else:
            assert sol.d_p >= target - 1e-9 * model.sigma_x2


class TestSolveSetting3:
    def test_effective_target_reduction(self):
        sol = solve_setting3(M, 0.92, ChannelSpec(p_t=1.0, sigma_z2=1.0))
        assert sol.policy.alpha == pytest.approx(-0.250851, abs=1e-6)
        assert sol.d_p == pytest.approx(0.92, rel=1e-12)

    def test_noiseless_channel_reduces_to_setting1(self):
        sol1 = solve_setting1(M, 0.84)
        for p_t in (0.5, 1.0, 7.0):
            sol3 = solve_setting3(M, 0.84, ChannelSpec(p_t=p_t, sigma_z2=0.0))
            assert sol3.policy.alpha == pytest.approx(sol1.policy.alpha, rel=1e-12)
            assert sol3.d_c == pytest.approx(sol1.d_c, rel=1e-12)
            assert sol3.d_p == pytest.approx(sol1.d_p, rel=1e-12)

    def test_infinite_power_reduces_to_setting1(self):
        sol1 = solve_setting1(M, 0.84)
        sol3 = solve_setting3(M, 0.84, ChannelSpec(p_t=1e12, sigma_z2=1.0))
        assert sol3.policy.alpha == pytest.approx(sol1.policy.alpha, abs=1e-9)
        assert sol3.d_c == pytest.approx(sol1.d_c, abs=1e-9)

    def test_below_channel_floor_inactive(self):
        ch = ChannelSpec(p_t=1.0, sigma_z2=1.0)
        floor = M.sigma_x2 * (M.r - M.rho**2 * 0.5)
        sol = solve_setting3(M, floor * 0.9, ch)
        assert sol.policy.alpha == 0.0 and not sol.constraint_active

    def test_power_always_active(self):
        ch = ChannelSpec(p_t=3.0, sigma_z2=0.7)
        sol = solve_setting3(M, 0.9, ch)
        _, _, power = evaluate_setting3(M, sol.policy, ch)
        assert power == pytest.approx(3.0, rel=1e-10)

    @given(models_with_targets(), st.floats(0.1, 10.0), st.floats(0.0, 5.0))
    @settings(max_examples=200)
    def test_back_substitution(self, model_target, p_t, sigma_z2):
        model, target = model_target
        ch = ChannelSpec(p_t=p_t, sigma_z2=sigma_z2)
        sol = solve_setting3(model, target, ch)
        if sol.constraint_active:
            assert sol.d_p == pytest.approx(target, rel=1e-9, abs=1e-9 * model.sigma_x2)
        assert -model.rho / model.r - 1e-12 <= sol.policy.alpha <= 1e-12


class TestXiSign:
    def test_lambda_zero(self):
        assert xi_sign_check(M, 0.0, -0.3) == pytest.approx(0.6724)

    def test_prediction_error_alpha(self):
        for lam in (0.0, 1.0, 1.0 / 0.36):
            assert xi_sign_check(M, lam, -0.6) == pytest.approx(0.4096, abs=1e-12)

    def test_grid_nonnegative(self):
        lams = np.linspace(0.0, 1.0 / 0.36, 100)
        alphas = np.linspace(-0.6, 0.0, 100)
        vals = [xi_sign_check(M, lam, a) for lam in lams for a in alphas]
        assert min(vals) >= -1e-12

    def test_rho_zero_trivial(self):
        m = validate_model(1.0, 0.0, 1.0)
        assert xi_sign_check(m, 0.0, 0.0) == 1.0
