"""Deterministic low-discrepancy sample sets.

Sequences are unscrambled Halton, fast-forwarded by ``seed + 1`` so the seed indexes the
sequence and the all-zero first point is never used.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy.stats import qmc

from critical_halfspace.core.errors import DomainError


def halton_box(count: int, lower: ArrayLike, upper: ArrayLike, seed: int = 0) -> np.ndarray:
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if count < 1:
        raise DomainError(f"sample count must be positive, got {count}")
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    sampler = qmc.Halton(d=lo.size, scramble=False)
    sampler.fast_forward(seed + 1)
    return qmc.scale(sampler.random(count), lo, hi)


def sample_halfspace(
    n: int, count: int, radius: float = 10.0, seed: int = 0, height: float | None = None
) -> np.ndarray:
    """Points in [−R, R]^{n−1} × [0, height]."""
    top = radius if height is None else height
    lower = [-radius] * (n - 1) + [0.0]
    upper = [radius] * (n - 1) + [top]
    return halton_box(count, lower, upper, seed)


def sample_boundary(n: int, count: int, radius: float = 10.0, seed: int = 0) -> np.ndarray:
    tangential = halton_box(count, [-radius] * (n - 1), [radius] * (n - 1), seed)
    return np.hstack([tangential, np.zeros((count, 1))])


def sample_shell(
    n: int,
    count: int,
    r_min: float,
    r_max: float,
    seed: int = 0,
    center: ArrayLike | None = None,
) -> np.ndarray:
    """Half-space points with r_min < |x − center| < r_max."""
    if not 0 <= r_min < r_max:
        raise DomainError(f"invalid shell radii ({r_min}, {r_max})")
    origin = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    lower = np.append(origin[:-1] - r_max, 0.0)
    upper = np.append(origin[:-1] + r_max, origin[-1] + r_max)
    kept: list[np.ndarray] = []
    total, batch, offset = 0, 4 * count, seed
    while total < count:
        pts = halton_box(batch, lower, upper, offset)
        dist = np.linalg.norm(pts - origin, axis=-1)
        pts = pts[(dist > r_min) & (dist < r_max)]
        kept.append(pts)
        total += len(pts)
        offset += batch
    return np.vstack(kept)[:count]
