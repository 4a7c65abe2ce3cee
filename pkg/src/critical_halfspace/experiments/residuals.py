from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from rich.console import Console

from critical_halfspace.core.sampling import sample_boundary, sample_halfspace
from critical_halfspace.core.types import KelvinCenter
from critical_halfspace.experiments.base import (
    Experiment,
    subject_bubble,
    subject_field,
)
from critical_halfspace.fields.bubble import verify_boundary, verify_interior
from critical_halfspace.fields.fit import fit_bubble
from critical_halfspace.fields.kelvin import (
    boundary_weight_exponent,
    invert,
    kelvin_at,
    kelvin_bubble_params,
    verify_transformed_system,
)
from critical_halfspace.logging.report import point_table

if TYPE_CHECKING:
    from critical_halfspace.config.loader import RunConfig
    from critical_halfspace.experiments.base import ExperimentReport

logger = logging.getLogger(__name__)
console = Console()

# Samples closer than this to the inversion center are dropped from the checks.
KELVIN_EXCLUSION = 1e-3


class VerifyBubble(Experiment):
    name = "verify-bubble"
    description = "Interior and boundary residuals of the explicit solution family"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        field, kappa = subject_field(config)
        q, p = config.interior_q, config.boundary_p
        interior = sample_halfspace(config.n, config.samples, config.sample_radius, config.seed)
        boundary = sample_boundary(config.n, config.samples, config.sample_radius, config.seed)

        inner = verify_interior(field, q, interior, coefficient=kappa)
        outer = verify_boundary(field, p, boundary)
        summary = inner.combine(outer)
        report.record(family=config.family, q=q, p=p, interior_coefficient=kappa,
                      sample_count=summary.sample_count)
        if config.family == "bubble":
            report.record(amplitude=field.params.amplitude, center=field.params.center)
        report.check("max_interior_residual", summary.max_interior_residual,
                     summary.max_interior_residual < config.tol)
        report.check("max_boundary_residual", summary.max_boundary_residual,
                     summary.max_boundary_residual < config.tol)
        report.check("proportionality_defect", summary.proportionality_defect,
                     summary.proportionality_defect < config.tol)
        report.tables["interior_samples"] = point_table(interior, field.value(interior))
        console.print(f"  interior residual {summary.max_interior_residual:.3e}, "
                      f"boundary residual {summary.max_boundary_residual:.3e}")


class KelvinCheck(Experiment):
    name = "kelvin-check"
    description = "Transformed system, critical-weight collapse and refit of a Kelvin image"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        n = config.n
        q, p = config.interior_q, config.boundary_p
        bubble = subject_bubble(config)
        e = config.inversion_center or (0.0,) * n
        image = kelvin_at(bubble, KelvinCenter(e), n)
        center = np.asarray(e)

        interior = sample_halfspace(n, config.samples, config.sample_radius, config.seed)
        boundary = sample_boundary(n, config.samples, config.sample_radius, config.seed)
        samples = np.vstack([interior, boundary])
        samples = samples[np.linalg.norm(samples - center, axis=-1) > KELVIN_EXCLUSION]

        exponent = boundary_weight_exponent(n, p)
        transformed = verify_transformed_system(image, p, q, samples, inversion_center=center)
        report.check("max_interior_residual", transformed.max_interior_residual,
                     transformed.max_interior_residual < config.tol)
        report.check("max_boundary_residual", transformed.max_boundary_residual,
                     transformed.max_boundary_residual < config.tol)
        report.record(boundary_weight_exponent=exponent)

        # the collapse only holds at the critical boundary exponent
        report.record(boundary_weight_is_one=exponent == 0.0)
        if exponent == 0.0:
            original = verify_boundary(bubble, p, boundary)
            gap = abs(original.max_boundary_residual - transformed.max_boundary_residual)
            report.check("boundary_residual_gap", gap, gap < 1e-14)

        # |e + (x − e)/|x − e|²| = 1 on the bisecting slice x₁ = 1/2 for e = (1, 0, …, 0)
        slice_pts = sample_boundary(n, config.samples, config.sample_radius, config.seed)
        slice_pts[:, 0] = 0.5
        unit = np.asarray(KelvinCenter.unit(n, 0).e)
        slice_defect = float(np.max(np.abs(np.linalg.norm(invert(slice_pts, unit), axis=-1) - 1)))
        report.check("inversion_slice_defect", slice_defect, slice_defect < 1e-12)

        expected = kelvin_bubble_params(bubble.params, center)
        fit_pts = sample_halfspace(n, 300, 3.0, config.seed)
        fit_pts = fit_pts[np.linalg.norm(fit_pts - center, axis=-1) > KELVIN_EXCLUSION]
        fit = fit_bubble(image, n, fit_pts)
        lam_error = abs(fit.params.lam - expected.lam) / expected.lam
        center_error = float(np.max(np.abs(np.subtract(fit.params.center, expected.center))))
        report.record(expected_lambda=expected.lam, expected_center=expected.center,
                      fitted_lambda=fit.params.lam, fitted_center=fit.params.center,
                      fitted_amplitude=fit.params.amplitude)
        report.check("fit_residual", fit.fit_residual, fit.fit_residual < 1e-7)
        report.check("fit_lambda_error", lam_error, lam_error < 1e-6)
        report.check("fit_center_error", center_error, center_error < 1e-6)
        console.print(f"  image scale {fit.params.lam:.10g} (closed form {expected.lam:.10g})")
