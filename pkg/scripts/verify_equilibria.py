#!/usr/bin/env python3
"""Cross-check closed-form equilibria against the brute-force oracle and
Monte Carlo simulation over a batch of random models.

For each sampled model and privacy target the script reports the distortion
gap between the closed-form solver and the grid-search oracle, and the
empirical distortion/privacy errors in standard-error units at the chosen
sample size.  Exits nonzero if any check fails.

Usage:
    python3 scripts/verify_equilibria.py [--models N] [--samples N] [--seed S]
"""

import argparse
import math
import sys

import numpy as np

from privcomm import (
    ChannelSpec,
    SimConfig,
    Setting,
    privacy_bounds,
    simulate_policy,
    solve_setting1,
    solve_setting3,
    validate_model,
    verify_equilibrium,
)


def sample_model(rng):
    sigma_x2 = float(rng.uniform(0.1, 10.0))
    r = float(rng.uniform(0.05, 4.0))
    rho = float(rng.uniform(0.05, 0.99)) * math.sqrt(r)
    return validate_model(sigma_x2, rho, r)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--models", type=int, default=8)
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    failures = 0
    for k in range(args.models):
        model = sample_model(rng)
        bounds = privacy_bounds(model)
        target = bounds.dp_min + float(rng.uniform(0.1, 0.9)) * (
            bounds.dp_max - bounds.dp_min
        )
        setting = Setting.SIMPLE if k % 2 == 0 else Setting.CHANNEL
        channel = None
        if setting is Setting.CHANNEL:
            channel = ChannelSpec(
                p_t=float(rng.uniform(0.5, 4.0)), sigma_z2=float(rng.uniform(0.1, 2.0))
            )
            lo = model.sigma_x2 * (
                model.r - model.rho**2 * channel.p_t / (channel.p_t + channel.sigma_z2)
            )
            target = max(target, lo + 1e-6 * model.sigma_x2)
            sol = solve_setting3(model, target, channel)
        else:
            sol = solve_setting1(model, target)

        report = verify_equilibrium(model, setting, channel, target)
        sim = simulate_policy(
            model, sol.policy, channel, sol.kappa,
            SimConfig(args.samples, args.seed + k, setting),
        )
        z_dc = abs(sim.d_c_hat - sol.d_c) / sim.stderr_dc
        z_dp = abs(sim.d_p_hat - sol.d_p) / sim.stderr_dp
        ok = report.passed and z_dc < 5.0 and z_dp < 5.0
        failures += not ok
        print(
            f"[{'ok' if ok else 'FAIL'}] {setting.value:11s} "
            f"sigma_x2={model.sigma_x2:6.3f} rho={model.rho:5.3f} r={model.r:5.3f} "
            f"d_p={target:8.4f} oracle gap={report.dc_gap:+.2e} "
            f"mc z=({z_dc:4.1f}, {z_dp:4.1f})"
        )

    print(f"{args.models - failures}/{args.models} configurations verified")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
