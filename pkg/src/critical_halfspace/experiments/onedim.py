from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from rich.console import Console

from critical_halfspace.experiments.base import Experiment, lambda_grid, subject_bubble
from critical_halfspace.fields.bubble import printed_q
from critical_halfspace.onedim.shooting import concavity_bound, shoot_case1
from critical_halfspace.onedim.trace import (
    boundary_profile_check,
    find_symmetric_scale,
    g_s_prime_half_numeric,
    make_trace,
    verify_lemma32_symmetry,
)

if TYPE_CHECKING:
    from critical_halfspace.config.loader import RunConfig
    from critical_halfspace.experiments.base import ExperimentReport

console = Console()


class FindScale(Experiment):
    name = "find-scale"
    description = "Scale s* making the Kelvin image about (1, 0, ..., 0) symmetric, and its axis"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        n = config.n
        bubble = subject_bubble(config)
        trace = make_trace(bubble, n)
        result = find_symmetric_scale(trace, n, config.s_lo, config.s_hi)
        expected = math.hypot(bubble.params.lam, bubble.params.depth)
        numeric = g_s_prime_half_numeric(trace, n, result.s_star)
        report.record(s_star=result.s_star, expected_s_star=expected, bracket=result.bracket,
                      iterations=result.iterations)
        report.check("s_star_error", abs(result.s_star - expected),
                     abs(result.s_star - expected) < config.scale_tol)
        report.check("gprime_at_half", result.gprime_at_half, abs(result.gprime_at_half) < 1e-10)
        report.check("gprime_numeric", numeric, abs(numeric - result.gprime_at_half) < 1e-7)

        check = verify_lemma32_symmetry(
            bubble, n, result.s_star,
            lambda_grid=lambda_grid(config),
            count=config.sigma_samples,
            radius=config.sigma_radius,
            seed=config.seed,
            threads=config.threads,
        )
        report.record(image_axis=check.axis_point)
        report.check("axis_distance", check.axis_distance, check.axis_distance < config.axis_tol)
        report.check("image_asymmetry", check.asymmetry_score,
                     check.asymmetry_score < config.asymmetry_tol)
        console.print(f"  s* = {result.s_star:.12f} (closed form {expected:.12f})")


class ShootODE(Experiment):
    name = "shoot-ode"
    description = "Zero crossing of the x_n-only reduction from a positive initial height"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        n, c = config.n, config.c
        q = printed_q(n) if config.q is None else config.q
        p = config.boundary_p
        result = shoot_case1(n, c, p=p, q=q, step=config.step, t_max=config.t_max)
        bound = concavity_bound(c, p)
        report.record(q=q, p=p, concavity_bound=bound, step=result.step,
                      step_count=result.step_count, final_state=result.final_state)
        crossing = result.zero_crossing_t
        report.check("zero_crossing_t", crossing, crossing is not None)
        if crossing is None:
            return
        report.check("within_concavity_bound", crossing <= bound * (1 + 1e-12),
                     crossing <= bound * (1 + 1e-12))
        halved = shoot_case1(n, c, p=p, q=q, step=result.step / 2, t_max=config.t_max)
        shift = (
            math.inf if halved.zero_crossing_t is None else abs(halved.zero_crossing_t - crossing)
        )
        report.check("step_halving_shift", shift, shift < 1e-6)
        console.print(f"  u changes sign at t = {crossing:.10f} (bound {bound:.6g})")


class BoundaryProfile(Experiment):
    name = "boundary-profile"
    description = "Fit of the boundary restriction to the (n-1)-dimensional profile"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        n = config.n
        bubble = subject_bubble(config)
        fit = boundary_profile_check(bubble, n, config.samples, config.sample_radius, config.seed)
        params = bubble.params
        center_error = float(np.max(np.abs(fit.center_prime - np.asarray(params.y_prime))))
        amplitude_error = abs(fit.implied_amplitude - params.amplitude) / params.amplitude
        report.record(profile_amplitude=fit.amplitude, boundary_scale=fit.scale,
                      boundary_scale_squared=fit.scale**2, center_prime=fit.center_prime,
                      implied_amplitude=fit.implied_amplitude,
                      implied_lambda=fit.implied_lambda, fit_residual=fit.fit_residual)
        report.check("max_deviation", fit.max_deviation, fit.max_deviation < config.tol)
        report.check("center_error", center_error, center_error < 1e-8)
        report.check("implied_amplitude_error", amplitude_error, amplitude_error < 1e-8)
        console.print(f"  boundary scale^2 = {fit.scale**2:.10g}, "
                      f"implied amplitude {fit.implied_amplitude:.10g}")
