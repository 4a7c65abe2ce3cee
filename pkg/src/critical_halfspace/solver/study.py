"""Refinement studies, lifting grid solutions back to ℝⁿ₊ and the blind far-field mode."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from critical_halfspace.core.errors import DomainError, StudyError
from critical_halfspace.core.field import FieldBase, check_dimension
from critical_halfspace.core.types import (
    AxisymGrid,
    BlindSolveResult,
    ConvergenceStudy,
    NewtonConfig,
    Provenance,
    SolveResult,
)
from critical_halfspace.fields.bubble import derive_amplitude, make_bubble
from critical_halfspace.solver.assembly import (
    asymptotic_far_field,
    manufactured_far_field,
    sample_on_grid,
)
from critical_halfspace.solver.newton import newton_solve
from critical_halfspace.symmetry.decay import decay_report, lambda_guess

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike

    from critical_halfspace.core.protocols import ScalarField

logger = logging.getLogger(__name__)


def convergence_study(
    n: int,
    q: float,
    p: float,
    exact: ScalarField,
    grids: Sequence[AxisymGrid],
    config: NewtonConfig | None = None,
    skip_unresolved: bool = False,
) -> ConvergenceStudy:
    """Observed order = least-squares slope of log(sup error) against log h.

    Newton can fail even from the sampled exact solution when the grid is too coarse for the
    bubble (n = 5 at h = 0.375, for one). By default that aborts the study; with
    ``skip_unresolved`` the grid is recorded in ``unresolved`` and left out of the fit, as
    long as two grids remain.
    """
    n = check_dimension(n)
    if len(grids) < 2:
        raise DomainError("a convergence study needs at least two grids")
    far = manufactured_far_field(exact)
    spacings, errors, iterations = [], [], []
    unresolved: list[tuple[int, int]] = []
    for grid in grids:
        reference = sample_on_grid(exact, grid)
        result = newton_solve(grid, n, q, p, reference, far, config)
        if not result.converged:
            message = (
                f"Newton did not converge on the {grid.m_r}x{grid.m_z} grid "
                f"(h={max(grid.h_r, grid.h_z):.4g}, |F|={result.final_residual_norm:.3e}); "
                f"the grid is likely too coarse for n={n}"
            )
            if not skip_unresolved:
                raise StudyError(message)
            logger.warning("%s; skipping it", message)
            unresolved.append((grid.m_r, grid.m_z))
            continue
        spacings.append(max(grid.h_r, grid.h_z))
        errors.append(float(np.max(np.abs(result.grid_values - reference))))
        iterations.append(result.newton_iterations)
        logger.debug("grid %dx%d: h=%.4g error=%.3e", grid.m_r, grid.m_z, spacings[-1], errors[-1])
    if len(spacings) < 2:
        raise StudyError(f"only {len(spacings)} grid(s) resolved; unresolved: {unresolved}")
    slope = np.polyfit(np.log(spacings), np.log(errors), 1)[0]
    return ConvergenceStudy(
        observed_order=float(slope),
        spacings=spacings,
        errors=errors,
        iterations=iterations,
        unresolved=unresolved,
    )


class LiftedField(FieldBase):
    """Grid solution as a field on ℝⁿ₊: bilinear in (|x′|, x_n), μ/|x|^{n−2} outside the grid."""

    provenance = Provenance.SAMPLED_GRID
    exact = False

    def __init__(self, values: np.ndarray, grid: AxisymGrid, n: int, mu: float | None) -> None:
        super().__init__(n)
        self.grid = grid
        self.mu = mu
        self._interp = RegularGridInterpolator(
            (grid.r, grid.z), np.asarray(values, dtype=float), method="linear"
        )

    def _cylinder(self, x: ArrayLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pts = self._points(x)
        r = np.linalg.norm(pts[..., :-1], axis=-1)
        z = pts[..., -1]
        if np.any(z < 0):
            raise DomainError("lifted field evaluated below the boundary")
        inside = (r <= self.grid.R_r) & (z <= self.grid.R_z)
        return r, z, inside

    def value(self, x: ArrayLike) -> np.ndarray:
        r, z, inside = self._cylinder(x)
        out = np.empty(r.shape)
        out[inside] = self._interp(np.stack([r[inside], z[inside]], axis=-1))
        if np.any(~inside):
            if self.mu is None:
                raise DomainError("lifted field has no far-field coefficient for outside points")
            rho2 = r[~inside] ** 2 + z[~inside] ** 2
            out[~inside] = self.mu * rho2 ** (-(self.dimension - 2) / 2)
        return out


def estimate_mu(values: np.ndarray, grid: AxisymGrid, n: int) -> float:
    """Far-field coefficient extrapolated from radii inside the truncated domain."""
    inner = LiftedField(values, grid, n, mu=None)
    extent = 0.95 * min(grid.R_r, grid.R_z)
    report = decay_report(inner, n, radii=(0.5 * extent, 0.75 * extent, extent))
    return report.mu_estimate


def lift_to_field(
    result: SolveResult, grid: AxisymGrid, n: int, mu: float | None = None
) -> LiftedField:
    n = check_dimension(n)
    if not result.converged:
        logger.warning("lifting a result that did not converge")
    if mu is None:
        mu = estimate_mu(result.grid_values, grid, n)
    logger.debug("lifted field far-field coefficient mu=%.8g", mu)
    return LiftedField(result.grid_values, grid, n, mu)


def solve_blind(
    grid: AxisymGrid,
    n: int,
    q: float,
    p: float,
    mu0: float,
    config: NewtonConfig | None = None,
    rounds: int = 8,
    rtol: float = 1e-6,
) -> BlindSolveResult:
    """Alternate Newton solves under μ/|x|^{n−2} data with re-estimating μ from the solution."""
    n = check_dimension(n)
    if rounds < 1:
        raise DomainError(f"rounds must be at least 1, got {rounds}")
    a = derive_amplitude(n)
    mu = float(mu0)
    history = [mu]
    guess = sample_on_grid(make_bubble(n, lambda_guess(mu, a, n)), grid)
    result: SolveResult | None = None
    for k in range(1, rounds + 1):
        result = newton_solve(grid, n, q, p, guess, asymptotic_far_field(mu, n), config)
        if not result.converged:
            raise StudyError(f"blind solve did not converge in round {k} (mu={mu:.6g})")
        updated = estimate_mu(result.grid_values, grid, n)
        history.append(updated)
        guess = result.grid_values
        logger.debug("blind round %d: mu %.10g -> %.10g", k, mu, updated)
        if abs(updated - mu) <= rtol * abs(mu):
            mu = updated
            break
        mu = updated
    else:
        logger.warning("blind far-field iteration did not settle after %d rounds", rounds)
    return BlindSolveResult(
        solve=result,
        mu_history=history,
        lambda_estimate=lambda_guess(mu, a, n),
        rounds=k,
    )


def blind_sensitivity(
    n: int,
    q: float,
    p: float,
    mu0: float,
    extents: Sequence[float],
    cells: int = 48,
    config: NewtonConfig | None = None,
) -> dict[float, float]:
    """Recovered bubble scale for each truncation extent."""
    out: dict[float, float] = {}
    for extent in extents:
        blind = solve_blind(AxisymGrid.square(extent, cells), n, q, p, mu0, config)
        out[float(extent)] = blind.lambda_estimate
    return out
