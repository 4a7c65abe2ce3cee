"""Far-field limits of a positive solution.

At each radius r along a direction d the three scaled quantities r^{n−2}·u, r^{n−2}·∇u and
r^{n−2}·x·∇u are sampled; a polynomial in 1/r through those samples, evaluated at 1/r = 0,
gives the extrapolated limit.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial import polynomial as P

from critical_halfspace.core.errors import DomainError
from critical_halfspace.core.field import check_dimension
from critical_halfspace.core.types import DecayReport

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from critical_halfspace.core.protocols import ScalarField

logger = logging.getLogger(__name__)

DEFAULT_RADII = (1e2, 1e3, 1e4)


def default_directions(n: int, count: int = 10) -> np.ndarray:
    """Coordinate directions first, then a fixed spread over the upper hemisphere."""
    dirs = [np.eye(n)[k] for k in range(n)]
    dirs.append(np.ones(n))
    k = 1
    while len(dirs) < count:
        angle = 2.4 * k  # golden-angle spacing
        d = np.zeros(n)
        d[0], d[1 % (n - 1)] = np.cos(angle), np.sin(angle)
        d[-1] = 0.3 + 0.6 * ((k * 0.618) % 1.0)
        dirs.append(d)
        k += 1
    out = np.array(dirs[:count], dtype=float)
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def _extrapolate(radii: np.ndarray, samples: np.ndarray) -> np.ndarray:
    """Value at 1/r = 0 of the interpolating polynomial in 1/r; samples has shape (len(radii), ...)."""
    h = 1.0 / radii
    flat = samples.reshape(len(radii), -1)
    coef = P.polyfit(h, flat, deg=len(radii) - 1)
    return coef[0].reshape(samples.shape[1:])


def decay_report(
    f: ScalarField,
    n: int,
    radii: ArrayLike = DEFAULT_RADII,
    directions: ArrayLike | None = None,
) -> DecayReport:
    n = check_dimension(n)
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or len(r) == 0 or np.any(r <= 0):
        raise DomainError("radii must be a non-empty list of positive values")
    if np.any(np.diff(r) <= 0):
        raise DomainError("radii must be strictly increasing")
    dirs = default_directions(n) if directions is None else np.atleast_2d(
        np.asarray(directions, dtype=float)
    )
    if dirs.shape[-1] != n:
        raise DomainError(f"directions must have {n} components")
    if np.any(dirs[:, -1] < 0):
        raise DomainError("directions must satisfy d_n >= 0")
    dirs = dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)

    # points[i, j] = r_i · d_j
    points = r[:, None, None] * dirs[None, :, :]
    weight = r[:, None] ** (n - 2)
    values = weight * f.value(points)
    gradient = f.gradient(points)
    grads = weight[..., None] * gradient
    radial = weight * np.sum(points * gradient, axis=-1)

    mu = _extrapolate(r, values)
    grad_lim = _extrapolate(r, grads)
    radial_lim = _extrapolate(r, radial)

    # per component, the direction with the largest limiting magnitude
    worst = np.argmax(np.abs(grad_lim), axis=0)
    grad_estimates = grad_lim[worst, np.arange(n)]

    report = DecayReport(
        mu_estimate=float(np.mean(mu)),
        grad_limit_estimates=grad_estimates,
        radial_limit_estimate=float(np.mean(radial_lim)),
        radii_used=[float(v) for v in r],
        mu_spread=float(np.max(mu) - np.min(mu)),
        per_direction_mu=[float(v) for v in mu],
    )
    logger.debug("decay report over %d directions: %s", len(dirs), report)
    return report


def lambda_guess(mu: float, amplitude: float, n: int) -> float:
    """Bubble scale matching a far-field coefficient: μ = a·λ^{(n−2)/2}."""
    if mu <= 0 or amplitude <= 0:
        raise DomainError("μ and amplitude must be positive")
    return (mu / amplitude) ** (2 / (n - 2))
