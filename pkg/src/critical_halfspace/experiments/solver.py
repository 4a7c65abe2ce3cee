from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from rich.console import Console

from critical_halfspace.core.errors import DomainError
from critical_halfspace.core.sampling import sample_halfspace
from critical_halfspace.core.types import AxisymGrid
from critical_halfspace.experiments.base import Experiment, newton_config
from critical_halfspace.fields.bubble import BubbleField, make_bubble
from critical_halfspace.fields.fit import fit_bubble
from critical_halfspace.logging.report import grid_table
from critical_halfspace.solver.assembly import manufactured_far_field, sample_on_grid
from critical_halfspace.solver.newton import newton_solve
from critical_halfspace.solver.study import (
    blind_sensitivity,
    convergence_study,
    lift_to_field,
    solve_blind,
)

if TYPE_CHECKING:
    from critical_halfspace.config.loader import RunConfig
    from critical_halfspace.experiments.base import ExperimentReport

console = Console()


def _axisymmetric_bubble(config: RunConfig) -> BubbleField:
    if any(config.tangential):
        raise DomainError("the axisymmetric solver needs a bubble centered on the x_n-axis")
    return make_bubble(config.n, config.lam)


class Solve(Experiment):
    name = "solve"
    description = "Newton solve on the (r, z) grid from a perturbed start, then refit the bubble"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        n = config.n
        q, p = config.interior_q, config.boundary_p
        exact = _axisymmetric_bubble(config)
        grid = AxisymGrid.square(config.extent, config.cells)
        reference = sample_on_grid(exact, grid)

        if config.mode == "blind":
            blind = solve_blind(grid, n, q, p, exact.params.mu, newton_config(config))
            result = blind.solve
            extents = [0.5 * config.extent, config.extent]
            sensitivity = blind_sensitivity(n, q, p, exact.params.mu, extents, config.cells,
                                            newton_config(config))
            report.record(mu_history=blind.mu_history, rounds=blind.rounds,
                          blind_lambda=blind.lambda_estimate,
                          lambda_by_extent=[[e, lam] for e, lam in sensitivity.items()])
            report.check("blind_lambda_estimate", blind.lambda_estimate,
                         math.isfinite(blind.lambda_estimate))
        else:
            rng = np.random.default_rng(config.seed)
            guess = reference * (1 + config.perturbation * rng.random(grid.shape))
            result = newton_solve(grid, n, q, p, guess, manufactured_far_field(exact),
                                  newton_config(config))

        report.record(newton_iterations=result.newton_iterations,
                      residual_history=result.residual_history,
                      continuation_used=result.continuation_used,
                      final_residual_norm=result.final_residual_norm,
                      h=max(grid.h_r, grid.h_z))
        report.check("converged", result.converged, result.converged)
        report.check("positive", bool(np.all(result.grid_values > 0)),
                     bool(np.all(result.grid_values > 0)))
        report.record(sup_error=float(np.max(np.abs(result.grid_values - reference))))
        rr, zz = grid.mesh()
        report.tables["solution"] = grid_table(rr, zz, result.grid_values)
        if not result.converged or config.mode == "blind":
            return

        lifted = lift_to_field(result, grid, n)
        radius = 0.5 * config.extent / math.sqrt(n - 1)
        fit = fit_bubble(lifted, n, sample_halfspace(n, 400, radius, config.seed))
        lam_error = abs(fit.params.lam - config.lam) / config.lam
        a_error = abs(fit.params.amplitude - exact.params.amplitude) / exact.params.amplitude
        report.record(fitted_lambda=fit.params.lam, fitted_amplitude=fit.params.amplitude,
                      fitted_center=fit.params.center, lifted_mu=lifted.mu)
        report.check("fit_lambda_error", lam_error, lam_error < config.fit_rtol)
        report.check("fit_amplitude_error", a_error, a_error < config.fit_rtol)
        console.print(f"  converged in {result.newton_iterations} iterations; "
                      f"fitted lambda {fit.params.lam:.6f}, a {fit.params.amplitude:.6f}")


class Convergence(Experiment):
    name = "convergence"
    description = "Observed order of the discrete solution error under grid refinement"

    def execute(self, config: RunConfig, report: ExperimentReport) -> None:
        exact = _axisymmetric_bubble(config)
        grids = [AxisymGrid.square(config.extent, m) for m in config.grid_cells]
        study = convergence_study(config.n, config.interior_q, config.boundary_p, exact, grids,
                                  newton_config(config), config.skip_unresolved)
        report.record(spacings=study.spacings, errors=study.errors,
                      newton_iterations=study.iterations,
                      unresolved_grids=[list(shape) for shape in study.unresolved])
        if study.unresolved:
            console.print(f"  [yellow]skipped unresolved grids {study.unresolved}[/yellow]")
        report.check("observed_order", study.observed_order,
                     abs(study.observed_order - config.order_target) <= config.order_tol)
        report.check("refinement_monotone", study.errors[-1] < study.errors[0],
                     study.errors[-1] < study.errors[0])
        console.print(f"  observed order {study.observed_order:.3f}")
