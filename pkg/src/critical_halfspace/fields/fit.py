"""Least-squares recovery of bubble parameters from samples of a positive field.

A bubble satisfies u^{−1/k} = (c/λ)·(λ² + |x − y|²) with k = (n−2)/2 and c = a^{−1/k}, a
quadratic in x. A linear fit of that quadratic seeds a Levenberg–Marquardt polish of the
log-space residuals log u − log model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import least_squares

from critical_halfspace.core.errors import DomainError, FitFailureError
from critical_halfspace.core.field import as_points
from critical_halfspace.core.types import BubbleParams, FitResult

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from critical_halfspace.core.protocols import ScalarField

logger = logging.getLogger(__name__)


@dataclass
class ProfileFit:
    lam: float
    center: np.ndarray
    amplitude: float
    rms: float
    nfev: int


def _log_model(theta: np.ndarray, points: np.ndarray, k: float) -> np.ndarray:
    log_lam, log_a, center = theta[0], theta[1], theta[2:]
    lam = np.exp(log_lam)
    rho2 = np.sum((points - center) ** 2, axis=-1)
    return log_a + k * log_lam - k * np.log(lam**2 + rho2)


def _algebraic_guess(points: np.ndarray, values: np.ndarray, k: float) -> np.ndarray:
    w = values ** (-1.0 / k)
    design = np.column_stack([np.sum(points**2, axis=-1), points, np.ones(len(points))])
    coef, *_ = np.linalg.lstsq(design, w, rcond=None)
    alpha, beta, gamma = coef[0], coef[1:-1], coef[-1]
    if alpha > 0:
        center = -beta / (2 * alpha)
        lam2 = gamma / alpha - float(np.sum(center**2))
        if lam2 > 0:
            lam = np.sqrt(lam2)
            amplitude = (alpha * lam) ** (-k)
            return np.concatenate([[np.log(lam), np.log(amplitude)], center])
    logger.debug("algebraic guess degenerate (alpha=%g); falling back to peak sample", alpha)
    peak = points[np.argmax(values)]
    return np.concatenate([[0.0, np.log(np.max(values))], peak])


def fit_profile(
    points: ArrayLike, values: ArrayLike, k: float, max_nfev: int = 2000
) -> ProfileFit:
    """Fit a·(λ/(λ² + |x − x₀|²))^k in any number of dimensions."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vals = np.asarray(values, dtype=float)
    dim = pts.shape[-1]
    if len(pts) < dim + 2:
        raise DomainError(f"need at least {dim + 2} samples to fit, got {len(pts)}")
    if np.any(vals <= 0):
        raise DomainError("profile fit needs strictly positive samples")

    log_vals = np.log(vals)
    guess = _algebraic_guess(pts, vals, k)
    result = least_squares(
        lambda theta: _log_model(theta, pts, k) - log_vals,
        guess,
        method="lm",
        xtol=1e-12,
        ftol=1e-12,
        gtol=1e-12,
        max_nfev=max_nfev,
    )
    rms = float(np.sqrt(np.mean(result.fun**2)))
    fit = ProfileFit(
        lam=float(np.exp(result.x[0])),
        center=result.x[2:].copy(),
        amplitude=float(np.exp(result.x[1])),
        rms=rms,
        nfev=int(result.nfev),
    )
    logger.debug("profile fit status=%d nfev=%d rms=%.3e", result.status, result.nfev, rms)
    if result.status <= 0:
        raise FitFailureError(f"profile fit did not converge: {result.message}", best=fit)
    return fit


def fit_bubble(
    f: ScalarField, n: int, sample_points: ArrayLike, max_nfev: int = 2000
) -> FitResult:
    """Recover (λ, y, a) from samples of f; residuals are measured in log space."""
    pts = np.atleast_2d(as_points(sample_points, n))
    values = f.value(pts)
    if np.any(values <= 0):
        raise DomainError("fit_bubble needs f > 0 at every sample")
    try:
        fit = fit_profile(pts, values, (n - 2) / 2, max_nfev=max_nfev)
    except FitFailureError as exc:
        best = exc.best
        raise FitFailureError(
            str(exc),
            best=FitResult(
                BubbleParams(n, best.lam, tuple(map(float, best.center)), best.amplitude),
                best.rms,
                best.nfev,
            ),
        ) from exc
    if fit.center[-1] >= 0:
        logger.warning("fitted bubble center lies in the closed upper half-space: %s", fit.center)
    params = BubbleParams(n, fit.lam, tuple(map(float, fit.center)), fit.amplitude)
    return FitResult(params=params, fit_residual=fit.rms, iterations=fit.nfev)
