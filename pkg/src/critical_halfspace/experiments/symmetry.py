from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from rich.console import Console

from critical_halfspace.core.sampling import sample_halfspace
from critical_halfspace.core.types import KelvinCenter
from critical_halfspace.experiments.base import (
    Experiment,
    lambda_grid,
    subject_bubble,
    subject_field,
)
from critical_halfspace.fields.fit import fit_bubble
from critical_halfspace.fields.kelvin import kelvin_at, kelvin_bubble_params, kelvin_origin
from critical_halfspace.symmetry.decay import decay_report, default_directions
from critical_halfspace.symmetry.moving_plane import detect_axis, sweep_planes

if TYPE_CHECKING:
    from critical_halfspace.config.loader import RunConfig
    from critical_halfspace.experiments.base import ExperimentReport

console = Console()


class MovingPlane(Experiment):
    name = "moving-plane"
    description = "Plane sweep on the Kelvin image about the origin, cross-checked by refitting"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        n = config.n
        bubble = subject_bubble(config)
        image = kelvin_origin(bubble, n)
        sweep = sweep_planes(
            image,
            lambda_grid(config),
            count=config.sigma_samples,
            radius=config.sigma_radius,
            seed=config.seed,
            tol=config.plane_tol,
            bisect_width=config.bisect_width,
            threads=config.threads,
        )
        expected = kelvin_bubble_params(bubble.params).center[0]
        fit_pts = sample_halfspace(n, 300, 3.0, config.seed)
        fit_pts = fit_pts[np.linalg.norm(fit_pts, axis=-1) > 1e-3]
        fitted = fit_bubble(image, n, fit_pts).params.center[0]

        clear = [r.lambda_plane for r in sweep.reports if r.violation_count == 0]
        first = sweep.reports[0]
        report.record(
            bracket=sweep.bracket,
            polished_plane=sweep.polished_plane,
            asymmetry=sweep.asymmetry,
            expected_axis=expected,
            fitted_axis=fitted,
            violation_free_planes=len(clear),
            leftmost_plane=first.lambda_plane,
            skipped_singular=sum(r.skipped_singular for r in sweep.reports),
        )
        report.check("lambda0_error", abs(sweep.lambda0_estimate - expected),
                     abs(sweep.lambda0_estimate - expected) < config.axis_tol)
        report.check("fit_cross_check", abs(fitted - expected),
                     abs(fitted - expected) < config.axis_tol)
        report.check("leftmost_violations", first.violation_count, first.violation_count == 0)
        report.record(lambda0_estimate=sweep.lambda0_estimate)
        console.print(f"  lambda0 = {sweep.lambda0_estimate:.9f} (image axis {expected:.9f})")


class DetectAxis(Experiment):
    name = "detect-axis"
    description = "Axis of symmetry of a bubble or of its Kelvin image about a boundary point"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        n = config.n
        bubble = subject_bubble(config)
        if config.inversion_center is None:
            field, expected = bubble, np.asarray(bubble.params.y_prime)
        else:
            e = config.inversion_center
            field = kelvin_at(bubble, KelvinCenter(e), n)
            expected = np.asarray(kelvin_bubble_params(bubble.params, e).y_prime)
        detection = detect_axis(
            field,
            n,
            lambda_grid=lambda_grid(config),
            count=config.sigma_samples,
            radius=config.sigma_radius,
            seed=config.seed,
            tol=config.plane_tol,
            threads=config.threads,
        )
        error = float(np.max(np.abs(detection.axis_point - expected)))
        report.record(axis_point=detection.axis_point, expected_axis=expected,
                      lambda0_estimates=[s.lambda0_estimate for s in detection.sweeps])
        report.check("axis_error", error, error < config.axis_tol)
        report.check("asymmetry_score", detection.asymmetry_score,
                     detection.asymmetry_score < config.asymmetry_tol)
        console.print(f"  axis {np.round(detection.axis_point, 9)}, "
                      f"asymmetry {detection.asymmetry_score:.3e}")


class Decay(Experiment):
    name = "decay"
    description = "Extrapolated far-field limits along several directions"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        n = config.n
        field, _ = subject_field(config)
        expected = field.c if config.family == "harmonic" else field.params.mu
        result = decay_report(field, n, config.radii, default_directions(n, config.directions))
        mu_error = abs(result.mu_estimate - expected)
        radial_error = abs(result.radial_limit_estimate + (n - 2) * result.mu_estimate)
        grad_max = float(np.max(np.abs(result.grad_limit_estimates)))
        report.record(mu_estimate=result.mu_estimate, expected_mu=expected,
                      radial_limit_estimate=result.radial_limit_estimate,
                      grad_limit_estimates=result.grad_limit_estimates,
                      per_direction_mu=result.per_direction_mu, radii=result.radii_used)
        report.check("mu_error", mu_error, mu_error < config.mu_tol)
        report.check("radial_limit_error", radial_error, radial_error < config.radial_tol)
        report.check("grad_limit_max", grad_max, grad_max < config.grad_tol)
        report.check("mu_spread", result.mu_spread, result.mu_spread < config.radial_tol)
        console.print(f"  mu = {result.mu_estimate:.10f} (expected {expected:.10f})")
