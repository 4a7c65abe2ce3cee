from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.sparse.linalg import spsolve

from critical_halfspace.core.errors import DomainError
from critical_halfspace.core.field import check_dimension
from critical_halfspace.core.types import NewtonConfig, SolveResult
from critical_halfspace.solver.assembly import (
    assemble_jacobian,
    assemble_residual,
    dirichlet_data,
)

if TYPE_CHECKING:
    from critical_halfspace.core.protocols import FarField
    from critical_halfspace.core.types import AxisymGrid

logger = logging.getLogger(__name__)


def _sup(a: np.ndarray) -> float:
    return float(np.max(np.abs(a)))


def _iterate(
    grid: AxisymGrid,
    u: np.ndarray,
    n: int,
    q: float,
    p: float,
    g: np.ndarray,
    config: NewtonConfig,
    history: list[float],
) -> tuple[np.ndarray, int, bool]:
    """Damped Newton with backtracking on the residual sup-norm."""

    def residual(v: np.ndarray) -> np.ndarray:
        return assemble_residual(grid, v, n, q, p, None, dirichlet=g)

    F = residual(u)
    norm = _sup(F)
    for k in range(config.max_iter):
        history.append(norm)
        logger.debug("newton q=%.6g it=%d |F|=%.3e", q, k, norm)
        if norm < config.tol:
            return u, k, True
        delta = spsolve(assemble_jacobian(grid, u, n, q, p), -F.ravel()).reshape(grid.shape)
        if not np.all(np.isfinite(delta)):
            logger.warning("singular Newton system at iteration %d", k)
            return u, k, False
        step = config.damping
        for _ in range(config.max_backtracks + 1):
            trial = u + step * delta
            if np.all(trial > 0):
                F_trial = residual(trial)
                if _sup(F_trial) < norm:
                    break
            step *= config.backtrack_factor
        else:
            logger.warning("no descent after %d backtracks (|F|=%.3e)", config.max_backtracks, norm)
            return u, k, False
        u, F, norm = trial, F_trial, _sup(F_trial)
    history.append(norm)
    return u, config.max_iter, norm < config.tol


def newton_solve(
    grid: AxisymGrid,
    n: int,
    q: float,
    p: float,
    initial_guess: np.ndarray,
    far_field: FarField,
    config: NewtonConfig | None = None,
) -> SolveResult:
    """Solve the discrete system; on failure retry with continuation in q.

    The continuation pass restarts from the initial guess and steps the interior exponent
    through 1 + k(q − 1)/K for k = 1, …, K.
    """
    n = check_dimension(n)
    config = config or NewtonConfig()
    guess = np.asarray(initial_guess, dtype=float)
    if guess.shape != grid.shape:
        raise DomainError(f"initial guess has shape {guess.shape}, grid expects {grid.shape}")
    if np.any(guess <= 0):
        raise DomainError("initial guess must be positive")
    g = dirichlet_data(grid, far_field)

    history: list[float] = []
    u, iterations, converged = _iterate(grid, guess.copy(), n, q, p, g, config, history)
    continuation = False
    if not converged and config.continuation_steps > 0:
        logger.info("direct Newton failed; continuing in q over %d steps", config.continuation_steps)
        continuation = True
        u = guess.copy()
        steps = config.continuation_steps
        for q_k in 1 + (q - 1) * np.arange(1, steps + 1) / steps:
            u, its, converged = _iterate(grid, u, n, float(q_k), p, g, config, history)
            iterations += its
            if not converged:
                logger.warning("continuation stalled at q=%.6g", q_k)
                break

    final = _sup(assemble_residual(grid, u, n, q, p, None, dirichlet=g))
    converged = converged and final < config.tol
    logger.debug("newton finished: converged=%s iterations=%d |F|=%.3e", converged, iterations, final)
    return SolveResult(
        grid_values=u,
        newton_iterations=iterations,
        final_residual_norm=final,
        converged=converged,
        residual_history=history,
        q_used=q,
        continuation_used=continuation,
    )
