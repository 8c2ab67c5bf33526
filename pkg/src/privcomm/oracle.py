"""Brute-force verification of the closed-form equilibria.

Independence is layered: (a) a from-first-principles covariance evaluator
cross-checks the printed distortion/privacy formulas, and (b) a feasibility
filtered grid search with local refinement over the encoder parameters
confirms that the closed-form solutions are true constrained minimizers and
that encoder noise buys nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import (
    ChannelSpec,
    EquilibriumSolution,
    InfeasiblePrivacyTarget,
    Setting,
    mixing_gain,
    second_order_dc_dp,
    solve_setting1,
    solve_setting2,
    solve_setting3,
)
from .model import SourceModel

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleConfig:
    """Search ranges and resolutions; ``None`` ranges are derived per model."""

    alpha_range: tuple[float, float] | None = None
    noise_range: tuple[float, float] | None = None
    grid: int = 401
    refine_tol: float = 1e-7

    def __post_init__(self) -> None:
        if self.grid < 3:
            raise ValueError(f"grid must be >= 3, got {self.grid}")
        for rng in (self.alpha_range, self.noise_range):
            if rng is not None and not (rng[1] > rng[0]):
                raise ValueError(f"degenerate range {rng}")

    def resolved_alpha_range(self, model: SourceModel) -> tuple[float, float]:
        if self.alpha_range is not None:
            return self.alpha_range
        return (-2.0 * model.rho / model.r - 0.5, 0.5)

    def resolved_noise_range(self, model: SourceModel) -> tuple[float, float]:
        if self.noise_range is not None:
            return self.noise_range
        return (0.0, 4.0 * model.sigma_x2)


@dataclass(frozen=True)
class OracleOptimum:
    alpha: float
    noise_var: float
    d_c: float
    d_p: float


@dataclass(frozen=True)
class VerificationReport:
    oracle_optimum: OracleOptimum
    closed_form: EquilibriumSolution
    dc_gap: float
    noise_at_optimum: float
    passed: bool


@dataclass(frozen=True)
class ScanPoint:
    lam: float
    alpha: float
    noise_var: float
    d_c: float
    d_p: float


def covariance_evaluate(
    model: SourceModel,
    alpha: float,
    noise_var: float,
    beta: float = 1.0,
    channel_noise: float = 0.0,
):
    """(d_c, d_p) from the explicit covariance of (X, theta, Y) via Schur complements.

    Kept deliberately formula-free: the 3x3 second-moment matrix is assembled
    from bilinearity of covariance and conditioned on Y numerically.
    """
    s2, rho, r = model.sigma_x2, model.rho, model.r
    cov_x_th = s2 * rho
    var_th = s2 * r
    # Y = beta*(X + alpha*theta + S) + Z
    cov_x_y = beta * (s2 + alpha * cov_x_th)
    cov_th_y = beta * (cov_x_th + alpha * var_th)
    var_y = (
        beta**2 * (s2 + 2.0 * alpha * cov_x_th + alpha**2 * var_th + noise_var)
        + channel_noise
    )
    m = np.array(
        [
            [s2, cov_x_th, cov_x_y],
            [cov_x_th, var_th, cov_th_y],
            [cov_x_y, cov_th_y, var_y],
        ]
    )
    d_c = m[0, 0] - m[0, 2] ** 2 / m[2, 2]
    d_p = m[1, 1] - m[1, 2] ** 2 / m[2, 2]
    return float(d_c), float(d_p)


def _effective_noise(model, setting, channel, alpha, noise_var):
    """Normalized decoder-side noise for a policy, per setting.

    For the channel setting the transmit gain is pinned by the power
    constraint, so channel noise referred to the source scale depends on the
    transmit variance.
    """
    s2 = model.sigma_x2
    if setting is Setting.CHANNEL:
        a_gain = mixing_gain(model, alpha)
        return (
            noise_var
            + channel.sigma_z2 * (s2 * a_gain + noise_var) / channel.p_t
        ) / s2
    return noise_var / s2


def _dc_dp(model, setting, channel, alpha, noise_var):
    """Shared-formula evaluation of (d_c, d_p); array friendly."""
    return second_order_dc_dp(
        model, alpha, _effective_noise(model, setting, channel, alpha, noise_var)
    )


def _golden_min(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section minimizer of a unimodal scalar function on [lo, hi]."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def _boundary_alpha(model, setting, channel, noise_var, d_p_target, tol):
    """The feasible alpha with minimal distortion at fixed encoder noise.

    D_P decreases monotonically from dp_max at alpha = -rho/r to the noise
    floor at alpha = 0, while D_C decreases toward alpha = 0; the constrained
    minimizer is therefore the boundary root of D_P = target, found by
    bisection, or alpha = 0 when the noise alone satisfies the target.
    """
    if model.rho == 0.0:
        return 0.0
    if _dc_dp(model, setting, channel, 0.0, noise_var)[1] >= d_p_target:
        return 0.0
    lo, hi = -model.rho / model.r, 0.0
    if _dc_dp(model, setting, channel, lo, noise_var)[1] < d_p_target:
        raise InfeasiblePrivacyTarget(
            f"target {d_p_target} unreachable at noise {noise_var}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _dc_dp(model, setting, channel, mid, noise_var)[1] >= d_p_target:
            lo = mid
        else:
            hi = mid
    return lo  # feasible side of the boundary


def grid_search(
    model: SourceModel,
    setting: Setting,
    channel: ChannelSpec | None,
    d_p_target: float,
    config: OracleConfig | None = None,
    sigma_n2: float | None = None,
) -> OracleOptimum:
    """Constrained brute-force minimizer of D_C subject to D_P >= d_p_target.

    Grid stage: feasibility filtering with one-grid-cell slack, minimum D_C
    with a deterministic (D_C, alpha, noise) lexicographic tie-break.
    Refinement stage: bisection onto the constraint boundary in alpha, plus a
    golden-section pass over the encoder noise (settings 1/3).
    """
    if config is None:
        config = OracleConfig()
    if setting is Setting.CHANNEL and channel is None:
        raise ValueError("channel setting requires a ChannelSpec")
    if setting is Setting.COMPRESSION:
        if sigma_n2 is None or sigma_n2 <= 0.0:
            raise ValueError("compression search requires a positive sigma_n2")
        noise_axis = np.array([sigma_n2])
    else:
        noise_axis = np.linspace(*config.resolved_noise_range(model), config.grid)
    alpha_axis = np.linspace(*config.resolved_alpha_range(model), config.grid)

    alpha_g, noise_g = np.meshgrid(alpha_axis, noise_axis, indexing="ij")
    d_c, d_p = _dc_dp(model, setting, channel, alpha_g, noise_g)

    slack = 0.0
    if d_p.shape[0] > 1:
        slack = max(slack, float(np.max(np.abs(np.diff(d_p, axis=0)))))
    if d_p.shape[1] > 1:
        slack = max(slack, float(np.max(np.abs(np.diff(d_p, axis=1)))))
    feasible = d_p >= d_p_target - slack
    if not np.any(feasible):
        raise InfeasiblePrivacyTarget(
            f"no feasible grid point for target {d_p_target}"
        )
    masked = np.where(feasible, d_c, np.inf)
    best = float(np.min(masked))
    ties = np.argwhere(masked <= best + 0.0)
    i, j = min(ties.tolist(), key=lambda ij: (alpha_g[ij[0], ij[1]], noise_g[ij[0], ij[1]]))
    alpha0, noise0 = float(alpha_g[i, j]), float(noise_g[i, j])

    tol = config.refine_tol
    if setting is Setting.COMPRESSION:
        alpha = _boundary_alpha(model, setting, channel, sigma_n2, d_p_target, tol)
        noise = sigma_n2
    else:
        def constrained_dc(noise_var: float) -> float:
            try:
                a = _boundary_alpha(model, setting, channel, noise_var, d_p_target, tol)
            except InfeasiblePrivacyTarget:
                return math.inf
            return float(_dc_dp(model, setting, channel, a, noise_var)[0])

        lo_n, hi_n = config.resolved_noise_range(model)
        noise = _golden_min(constrained_dc, lo_n, hi_n, tol)
        # the minimum typically sits on the lower edge of the noise range
        if constrained_dc(lo_n) <= constrained_dc(noise):
            noise = lo_n
        alpha = _boundary_alpha(model, setting, channel, noise, d_p_target, tol)
        # refinement must never lose to a strictly feasible grid point
        strict = np.where(d_p >= d_p_target, d_c, np.inf)
        if np.any(np.isfinite(strict)):
            k, l = np.unravel_index(int(np.argmin(strict)), strict.shape)
            if _dc_dp(model, setting, channel, alpha, noise)[0] > strict[k, l]:
                alpha, noise = float(alpha_g[k, l]), float(noise_g[k, l])
    d_c_opt, d_p_opt = _dc_dp(model, setting, channel, alpha, noise)
    return OracleOptimum(
        alpha=float(alpha), noise_var=float(noise), d_c=float(d_c_opt), d_p=float(d_p_opt)
    )


def verify_equilibrium(
    model: SourceModel,
    setting: Setting,
    channel: ChannelSpec | None,
    d_p_target: float,
    config: OracleConfig | None = None,
    sigma_n2: float | None = None,
    dc_tol: float | None = None,
    noise_tol: float | None = None,
) -> VerificationReport:
    """Compare the closed-form equilibrium against the brute-force optimum."""
    if setting is Setting.SIMPLE:
        closed = solve_setting1(model, d_p_target)
    elif setting is Setting.COMPRESSION:
        if sigma_n2 is None:
            raise ValueError("compression verification requires sigma_n2")
        closed = solve_setting2(model, d_p_target, sigma_n2)
    else:
        closed = solve_setting3(model, d_p_target, channel)
    optimum = grid_search(model, setting, channel, d_p_target, config, sigma_n2)
    dc_gap = optimum.d_c - closed.d_c
    if dc_tol is None:
        dc_tol = 1e-5 * model.sigma_x2
    if noise_tol is None:
        noise_tol = 1e-5 * model.sigma_x2
    noise_ok = setting is Setting.COMPRESSION or optimum.noise_var <= noise_tol
    passed = abs(dc_gap) <= dc_tol and noise_ok
    return VerificationReport(
        oracle_optimum=optimum,
        closed_form=closed,
        dc_gap=float(dc_gap),
        noise_at_optimum=float(optimum.noise_var),
        passed=passed,
    )


def lagrangian_scan(
    model: SourceModel, lambda_grid, config: OracleConfig | None = None
) -> list[ScanPoint]:
    """Trace the frontier by minimizing D_C - lam*D_P over (alpha, noise).

    For each multiplier the unconstrained grid minimizer is refined by
    alternating golden-section passes; the optimum must sit at zero encoder
    noise, which is asserted.
    """
    if model.rho == 0.0:
        raise ValueError("multiplier scan is degenerate for rho = 0")
    if config is None:
        config = OracleConfig()
    lam_max = 1.0 / model.rho**2
    setting = Setting.SIMPLE
    alpha_axis = np.linspace(*config.resolved_alpha_range(model), config.grid)
    noise_axis = np.linspace(*config.resolved_noise_range(model), config.grid)
    alpha_g, noise_g = np.meshgrid(alpha_axis, noise_axis, indexing="ij")
    d_c_g, d_p_g = _dc_dp(model, setting, None, alpha_g, noise_g)

    out = []
    for lam in lambda_grid:
        lam = float(lam)
        if lam < -1e-15 or lam > lam_max * (1.0 + 1e-12):
            raise ValueError(f"lam={lam} outside [0, 1/rho^2]")
        obj = d_c_g - lam * d_p_g
        i, j = np.unravel_index(int(np.argmin(obj)), obj.shape)
        alpha, noise = float(alpha_g[i, j]), float(noise_g[i, j])

        def cost(a, s):
            d_c, d_p = _dc_dp(model, setting, None, a, s)
            return d_c - lam * d_p

        for _ in range(4):
            alpha = _golden_min(lambda a: cost(a, noise), alpha_axis[0], alpha_axis[-1],
                                config.refine_tol)
            noise = _golden_min(lambda s: cost(alpha, s), noise_axis[0], noise_axis[-1],
                                config.refine_tol)
        if noise > 1e-4 * model.sigma_x2:
            raise RuntimeError(
                f"multiplier scan found noisy minimizer (lam={lam}, noise={noise})"
            )
        d_c, d_p = _dc_dp(model, setting, None, alpha, noise)
        out.append(ScanPoint(lam=lam, alpha=alpha, noise_var=noise,
                             d_c=float(d_c), d_p=float(d_p)))
    return out
