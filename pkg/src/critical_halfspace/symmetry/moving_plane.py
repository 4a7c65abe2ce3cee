"""Reflections across planes x₁ = λ and numerical moving-plane comparisons.

A sweep compares v with v_λ on samples of Σ_λ = {x₁ ≥ λ, x_n ≥ 0, x ≠ 0} for a grid of
plane positions, takes the rightmost plane of the leftmost violation-free run, and bisects
towards the first violating plane. The symmetry defect is then measured at the
least-squares best plane near that estimate.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import minimize_scalar

from critical_halfspace.core.errors import DomainError, SingularityError, SweepFailureError
from critical_halfspace.core.field import FieldBase, check_dimension
from critical_halfspace.core.sampling import halton_box
from critical_halfspace.core.types import (
    AxisDetection,
    MovingPlaneReport,
    PlaneParams,
    Provenance,
    SigmaSampling,
    SweepResult,
)
from critical_halfspace.fields.kelvin import GUARD_RADIUS

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from critical_halfspace.core.protocols import ScalarField

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 2000
DEFAULT_RADIUS = 50.0
DEFAULT_TOL = 1e-9
DEFAULT_BISECT_WIDTH = 1e-6
ORIGIN_EXCLUSION = 1e-6


class ReflectedField(FieldBase):
    """v_λ(x) = v(2λ − x₁, x₂, …, x_n)."""

    provenance = Provenance.TRANSFORMED

    def __init__(self, source: ScalarField, plane: PlaneParams) -> None:
        super().__init__(source.dimension)
        self.source = source
        self.plane = plane
        self.exact = source.exact

    def value(self, x: ArrayLike) -> np.ndarray:
        return self.source.value(self.plane.reflect(self._points(x)))

    def gradient(self, x: ArrayLike) -> np.ndarray:
        grad = self.source.gradient(self.plane.reflect(self._points(x)))
        grad[..., 0] = -grad[..., 0]
        return grad

    def laplacian(self, x: ArrayLike) -> np.ndarray:
        return self.source.laplacian(self.plane.reflect(self._points(x)))

    @property
    def singularities(self) -> tuple[np.ndarray, ...]:
        return tuple(self.plane.reflect(point) for point in self.source.singularities)


def reflect_field(f: ScalarField, plane: PlaneParams) -> ReflectedField:
    return ReflectedField(f, plane)


class PermutedField(FieldBase):
    """Exchanges tangential coordinate ``axis`` with x₁, so planes x_axis = λ become x₁ = λ."""

    provenance = Provenance.TRANSFORMED

    def __init__(self, source: ScalarField, axis: int) -> None:
        super().__init__(source.dimension)
        if not 0 <= axis < self.dimension - 1:
            raise DomainError(f"axis {axis} is not a tangential coordinate")
        self.source = source
        self.axis = axis
        self.exact = source.exact

    def _swap(self, x: np.ndarray) -> np.ndarray:
        out = np.array(x, dtype=float, copy=True)
        out[..., [0, self.axis]] = out[..., [self.axis, 0]]
        return out

    def value(self, x: ArrayLike) -> np.ndarray:
        return self.source.value(self._swap(self._points(x)))

    def gradient(self, x: ArrayLike) -> np.ndarray:
        return self._swap(self.source.gradient(self._swap(self._points(x))))

    def laplacian(self, x: ArrayLike) -> np.ndarray:
        return self.source.laplacian(self._swap(self._points(x)))

    @property
    def singularities(self) -> tuple[np.ndarray, ...]:
        return tuple(self._swap(point) for point in self.source.singularities)


def _slab(n: int, count: int, radius: float, seed: int) -> np.ndarray:
    lower = [0.0] + [-radius] * (n - 2) + [0.0]
    upper = [radius] * n
    return halton_box(count, lower, upper, seed)


def sigma_sampling(
    n: int,
    plane: PlaneParams,
    count: int = DEFAULT_SAMPLES,
    radius: float = DEFAULT_RADIUS,
    seed: int = 0,
    exclusion: float = ORIGIN_EXCLUSION,
) -> SigmaSampling:
    """Halton points in {λ ≤ x₁ ≤ λ + R, |x_i| ≤ R, 0 ≤ x_n ≤ R} minus a ball around 0."""
    n = check_dimension(n)
    if radius <= 0:
        raise DomainError(f"sampling radius must be positive, got {radius}")
    return _shift_slab(_slab(n, count, radius, seed), plane, radius, exclusion)


def _shift_slab(
    base: np.ndarray, plane: PlaneParams, radius: float, exclusion: float
) -> SigmaSampling:
    pts = base.copy()
    pts[:, 0] += plane.lambda_plane
    pts = pts[np.linalg.norm(pts, axis=-1) > exclusion]
    return SigmaSampling(points=pts, radius_cap=radius, lambda_plane=plane.lambda_plane)


def _singular_mask(f: ScalarField, pts: np.ndarray) -> np.ndarray:
    mask = np.zeros(len(pts), dtype=bool)
    for point in f.singularities:
        mask |= np.linalg.norm(pts - point, axis=-1) < 10 * GUARD_RADIUS
    return mask


def compare_on_sigma(
    v: ScalarField,
    plane: PlaneParams,
    sampling: SigmaSampling,
    tol: float = DEFAULT_TOL,
) -> MovingPlaneReport:
    pts = sampling.points
    if len(pts) and (np.any(pts[:, 0] < plane.lambda_plane) or np.any(pts[:, -1] < 0)):
        raise DomainError("sampling does not lie in Σ_λ for this plane")
    reflected = plane.reflect(pts)
    skip = _singular_mask(v, pts) | _singular_mask(v, reflected)
    kept, mirror = pts[~skip], reflected[~skip]
    if len(kept) == 0:
        raise SweepFailureError(f"no usable samples for plane λ={plane.lambda_plane}")
    diff = v.value(kept) - v.value(mirror)
    idx = int(np.argmin(diff))
    return MovingPlaneReport(
        lambda_plane=plane.lambda_plane,
        min_difference=float(diff[idx]),
        max_abs_difference=float(np.max(np.abs(diff))),
        violation_count=int(np.sum(diff < -tol)),
        argmin=kept[idx].copy(),
        sample_count=len(kept),
        skipped_singular=int(np.sum(skip)),
    )


def _polish_plane(
    v: ScalarField, base: np.ndarray, center: float, window: float, radius: float
) -> float:
    """Least-squares plane: minimise the mean of (v − v_λ)² over a fixed Σ sample."""
    pts = _shift_slab(base, PlaneParams(center), radius, ORIGIN_EXCLUSION).points
    pts = pts[~_singular_mask(v, pts)]
    values = v.value(pts)

    def defect(lam: float) -> float:
        mirror = PlaneParams(lam).reflect(pts)
        try:
            return float(np.mean((values - v.value(mirror)) ** 2))
        except SingularityError:
            return float("inf")

    result = minimize_scalar(
        defect, bounds=(center - window, center + window), method="bounded",
        options={"xatol": 1e-12},
    )
    lam, best = float(result.x), float(result.fun)

    # Brent stops near sqrt(eps)·|λ|; Gauss-Newton on r(λ) = v − v_λ finishes the job.
    for _ in range(10):
        mirror = PlaneParams(lam).reflect(pts)
        try:
            r = values - v.value(mirror)
            dr = -2.0 * v.gradient(mirror)[:, 0]
        except SingularityError:
            break
        denom = float(dr @ dr)
        if denom == 0.0:
            break
        trial = lam - float(r @ dr) / denom
        trial_defect = defect(trial)
        if not trial_defect < best:
            break
        lam, best = trial, trial_defect
    return lam


def sweep_planes(
    v: ScalarField,
    lambda_grid: ArrayLike,
    count: int = DEFAULT_SAMPLES,
    radius: float = DEFAULT_RADIUS,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    bisect_width: float = DEFAULT_BISECT_WIDTH,
    threads: int = 1,
) -> SweepResult:
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise DomainError("lambda_grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("lambda_grid must be sorted ascending")
    base = _slab(v.dimension, count, radius, seed)

    def report_at(lam: float) -> MovingPlaneReport:
        plane = PlaneParams(float(lam))
        return compare_on_sigma(v, plane, _shift_slab(base, plane, radius, ORIGIN_EXCLUSION), tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(report_at, grid))
    else:
        reports = [report_at(lam) for lam in grid]

    ok = [r.violation_count == 0 for r in reports]
    if not any(ok):
        raise SweepFailureError("no violation-free plane in the grid")
    j = ok.index(True)
    while j + 1 < len(grid) and ok[j + 1]:
        j += 1

    lo = float(grid[j])
    if j + 1 < len(grid):
        hi = float(grid[j + 1])
        while hi - lo > bisect_width:
            mid = 0.5 * (lo + hi)
            if report_at(mid).violation_count == 0:
                lo = mid
            else:
                hi = mid
        window = float(grid[j + 1] - grid[j])
    else:
        logger.warning("every plane up to λ=%g is violation-free; estimate not refined", lo)
        hi = lo
        window = float(grid[-1] - grid[-2]) if len(grid) > 1 else 1.0

    polished = _polish_plane(v, base, lo, window, radius)
    at_polished = report_at(polished)
    logger.debug(
        "sweep: λ0 in [%.9g, %.9g], polished %.12g, defect %.3e",
        lo, hi, polished, at_polished.max_abs_difference,
    )
    return SweepResult(
        reports=reports,
        lambda0_estimate=lo,
        bracket=(lo, hi),
        polished_plane=polished,
        asymmetry=at_polished.max_abs_difference,
    )


def default_lambda_grid(extent: float = 10.0, count: int = 41) -> np.ndarray:
    return np.linspace(-extent, extent, count)


def detect_axis(
    f: ScalarField,
    n: int,
    lambda_grid: ArrayLike | None = None,
    count: int = DEFAULT_SAMPLES,
    radius: float = DEFAULT_RADIUS,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
) -> AxisDetection:
    """Sweep along every tangential direction and intersect the detected planes."""
    n = check_dimension(n)
    if f.dimension != n:
        raise DomainError(f"field has dimension {f.dimension}, expected {n}")
    grid = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, float)
    sweeps: list[SweepResult] = []
    for axis in range(n - 1):
        aligned = f if axis == 0 else PermutedField(f, axis)
        sweeps.append(
            sweep_planes(aligned, grid, count=count, radius=radius, seed=seed, tol=tol,
                         threads=threads)
        )
    return AxisDetection(
        axis_point=np.array([s.polished_plane for s in sweeps]),
        asymmetry_score=max(s.asymmetry for s in sweeps),
        sweeps=sweeps,
    )
