"""Kelvin transforms about boundary points and the transformed-system check.

For x ≠ e the transform is v(x) = |x − e|^{2−n}·u(e + (x − e)/|x − e|²). Two identities keep
derivatives exact when the source is exact: the chain rule for ∇v and
Δv(x) = |x − e|^{−n−2}·(Δu)(x*).
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from critical_halfspace.core.errors import DomainError, SingularityError
from critical_halfspace.core.field import (
    FieldBase,
    as_points,
    fd_gradient,
    fd_laplacian,
    require_admissible,
)
from critical_halfspace.core.types import BubbleParams, KelvinCenter, Provenance, ResidualReport

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from critical_halfspace.core.protocols import ScalarField

logger = logging.getLogger(__name__)

GUARD_RADIUS = 1e-8


def invert(x: ArrayLike, e: ArrayLike) -> np.ndarray:
    """x ↦ e + (x − e)/|x − e|²."""
    pts = np.asarray(x, dtype=float)
    center = np.asarray(e, dtype=float)
    d = pts - center
    rho2 = np.sum(d**2, axis=-1, keepdims=True)
    return center + d / rho2


class KelvinField(FieldBase):
    provenance = Provenance.TRANSFORMED

    def __init__(self, source: ScalarField, center: ArrayLike) -> None:
        super().__init__(source.dimension)
        self.source = source
        self.center = as_points(center, self.dimension).copy()
        if self.center[-1] != 0.0:
            raise DomainError("inversion center must lie on the boundary x_n = 0")
        self.exact = source.exact

    def _split(self, x: ArrayLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        d = self._points(x) - self.center
        rho2 = np.sum(d**2, axis=-1)
        if np.any(rho2 < GUARD_RADIUS**2):
            raise SingularityError(f"Kelvin transform evaluated within {GUARD_RADIUS} of its center")
        image = self.center + d / rho2[..., None]
        return d, rho2, image

    def value(self, x: ArrayLike) -> np.ndarray:
        _, rho2, image = self._split(x)
        return rho2 ** ((2 - self.dimension) / 2) * self.source.value(image)

    def gradient(self, x: ArrayLike) -> np.ndarray:
        if not self.exact:
            return fd_gradient(self, x, self._local_step(x))
        d, rho2, image = self._split(x)
        n = self.dimension
        u = self.source.value(image)
        g = self.source.gradient(image)
        g_dot_d = np.sum(g * d, axis=-1)
        inner = (2 - n) * u[..., None] * d + g - 2 * (g_dot_d / rho2)[..., None] * d
        return rho2[..., None] ** (-n / 2) * inner

    def laplacian(self, x: ArrayLike) -> np.ndarray:
        if not self.exact:
            return fd_laplacian(self, x, self._local_step(x))
        _, rho2, image = self._split(x)
        return rho2 ** (-(self.dimension + 2) / 2) * self.source.laplacian(image)

    def _local_step(self, x: ArrayLike) -> np.ndarray:
        # the inversion shrinks lengths by |x − e|² near the center
        rho2 = np.sum((self._points(x) - self.center) ** 2, axis=-1)
        return self.fd_step * np.minimum(1.0, rho2)

    @property
    def singularities(self) -> tuple[np.ndarray, ...]:
        images = [
            invert(point, self.center)
            for point in self.source.singularities
            if np.sum((point - self.center) ** 2) > GUARD_RADIUS**2
        ]
        return (self.center, *images)

    def __repr__(self) -> str:
        return f"KelvinField({self.source!r}, e={tuple(self.center)})"


def kelvin_origin(f: ScalarField, n: int) -> KelvinField:
    if f.dimension != n:
        raise DomainError(f"field has dimension {f.dimension}, expected {n}")
    return KelvinField(f, np.zeros(n))


def kelvin_at(f: ScalarField, e: KelvinCenter, n: int) -> KelvinField:
    if f.dimension != n or len(e.e) != n:
        raise DomainError(f"dimension mismatch between field, center and n={n}")
    return KelvinField(f, np.asarray(e.e, dtype=float))


def kelvin_bubble_params(params: BubbleParams, e: ArrayLike | None = None) -> BubbleParams:
    """Closed-form parameters of the Kelvin image of a bubble.

    With D = λ² + |y − e|² the image has scale λ/D, center e + (y − e)/D and the same
    amplitude.
    """
    center = np.zeros(params.n) if e is None else np.asarray(e, dtype=float)
    y = np.asarray(params.center, dtype=float)
    denom = params.lam**2 + float(np.sum((y - center) ** 2))
    image = center + (y - center) / denom
    return BubbleParams(params.n, params.lam / denom, tuple(map(float, image)), params.amplitude)


def boundary_weight_exponent(n: int, p: float) -> float:
    """n − p(n−2); snapped to exactly zero at the critical p = n/(n−2)."""
    exponent = n - p * (n - 2)
    return 0.0 if abs(exponent) < 1e-12 else exponent


def verify_transformed_system(
    v: ScalarField,
    p: float,
    q: float,
    samples: ArrayLike,
    inversion_center: ArrayLike | None = None,
) -> ResidualReport:
    """Check −Δv = v^q inside and D_{x_n}v = −|x − e|^{−(n−p(n−2))}·v^p on x_n = 0."""
    n = v.dimension
    pts = np.atleast_2d(as_points(samples, n))
    require_admissible(pts)
    center = np.zeros(n) if inversion_center is None else np.asarray(inversion_center, float)
    on_boundary = pts[:, -1] == 0.0
    report = ResidualReport(interior_exponent_used=q, boundary_exponent_used=p)

    interior = pts[~on_boundary]
    if len(interior):
        values = v.value(interior)
        minus_lap = -v.laplacian(interior)
        ratio = minus_lap / values**q
        report.max_interior_residual = float(np.max(np.abs(minus_lap - values**q)))
        report.proportionality_defect = float(np.max(ratio) - np.min(ratio))

    boundary = pts[on_boundary]
    if len(boundary):
        exponent = boundary_weight_exponent(n, p)
        values = v.value(boundary)
        if exponent == 0.0:
            weight = np.ones(len(boundary))
        else:
            weight = np.linalg.norm(boundary - center, axis=-1) ** (-exponent)
        normal = v.gradient(boundary)[:, -1]
        report.max_boundary_residual = float(np.max(np.abs(normal + weight * values**p)))

    report.sample_count = len(pts)
    logger.debug("transformed-system check (p=%g, q=%g): %s", p, q, report)
    return report
