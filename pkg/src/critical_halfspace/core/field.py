"""Half-space geometry, the scalar-field base classes and finite-difference oracles.

The difference operators never look at a boundary condition: where the symmetric stencil
in x_n would leave the half-space they switch to second-order one-sided stencils.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable
from typing import TYPE_CHECKING

import numpy as np

from critical_halfspace.core.errors import DomainError
from critical_halfspace.core.types import Provenance

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from critical_halfspace.core.protocols import ScalarField

DEFAULT_H = 1e-4


def check_dimension(n: int) -> int:
    if int(n) != n or n < 3:
        raise DomainError(f"dimension must be an integer n >= 3, got {n}")
    return int(n)


def as_points(x: ArrayLike, n: int) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0 or pts.shape[-1] != n:
        raise DomainError(f"expected points with {n} coordinates, got shape {pts.shape}")
    return pts


def is_admissible(x: ArrayLike) -> np.ndarray:
    return np.asarray(x, dtype=float)[..., -1] >= 0.0


def require_admissible(points: np.ndarray) -> None:
    if not np.all(is_admissible(points)):
        bad = points[~is_admissible(points)]
        raise DomainError(f"{len(np.atleast_2d(bad))} point(s) below the boundary x_n = 0")


def require_boundary(points: np.ndarray) -> None:
    if not np.all(points[..., -1] == 0.0):
        raise DomainError("boundary samples must have x_n = 0")


def _step(h: ArrayLike, points: np.ndarray) -> np.ndarray:
    step = np.broadcast_to(np.asarray(h, dtype=float), points.shape[:-1])
    if np.any(step <= 0):
        raise DomainError("finite-difference step must be positive")
    return step


def fd_gradient(f: ScalarField, x: ArrayLike, h: ArrayLike = DEFAULT_H) -> np.ndarray:
    pts = as_points(x, f.dimension)
    require_admissible(pts)
    step = _step(h, pts)
    n = pts.shape[-1]
    grad = np.empty(pts.shape, dtype=float)
    for k in range(n):
        shift = np.zeros(pts.shape)
        shift[..., k] = step
        forward = f.value(pts + shift)
        if k < n - 1:
            grad[..., k] = (forward - f.value(pts - shift)) / (2 * step)
            continue
        inside = pts[..., -1] >= step
        backward = f.value(np.where(inside[..., None], pts - shift, pts))
        central = (forward - backward) / (2 * step)
        one_sided = (-3 * f.value(pts) + 4 * forward - f.value(pts + 2 * shift)) / (2 * step)
        grad[..., k] = np.where(inside, central, one_sided)
    return grad


def fd_laplacian(f: ScalarField, x: ArrayLike, h: ArrayLike = DEFAULT_H) -> np.ndarray:
    pts = as_points(x, f.dimension)
    require_admissible(pts)
    step = _step(h, pts)
    n = pts.shape[-1]
    f0 = f.value(pts)
    total = np.zeros(pts.shape[:-1])
    for k in range(n):
        shift = np.zeros(pts.shape)
        shift[..., k] = step
        forward = f.value(pts + shift)
        if k < n - 1:
            total += (forward - 2 * f0 + f.value(pts - shift)) / step**2
            continue
        inside = pts[..., -1] >= step
        backward = f.value(np.where(inside[..., None], pts - shift, pts))
        central = (forward - 2 * f0 + backward) / step**2
        one_sided = (
            2 * f0 - 5 * forward + 4 * f.value(pts + 2 * shift) - f.value(pts + 3 * shift)
        ) / step**2
        total += np.where(inside, central, one_sided)
    return total


class FieldBase(ABC):
    """Shared plumbing for ScalarField implementations.

    Subclasses supply ``value``; fields without analytic derivatives inherit the
    finite-difference ``gradient`` and ``laplacian``.
    """

    provenance: Provenance = Provenance.CLOSED_FORM
    exact: bool = True
    fd_step: float = DEFAULT_H

    def __init__(self, dimension: int) -> None:
        self.dimension = check_dimension(dimension)

    @abstractmethod
    def value(self, x: ArrayLike) -> np.ndarray: ...

    def gradient(self, x: ArrayLike) -> np.ndarray:
        return fd_gradient(self, x, self.fd_step)

    def laplacian(self, x: ArrayLike) -> np.ndarray:
        return fd_laplacian(self, x, self.fd_step)

    @property
    def singularities(self) -> tuple[np.ndarray, ...]:
        return ()

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return self.value(x)

    def _points(self, x: ArrayLike) -> np.ndarray:
        return as_points(x, self.dimension)


PointFn = Callable[[np.ndarray], np.ndarray]


class FunctionField(FieldBase):
    """Field built from vectorised callables; derivatives fall back to differencing."""

    def __init__(
        self,
        dimension: int,
        value_fn: PointFn,
        gradient_fn: PointFn | None = None,
        laplacian_fn: PointFn | None = None,
        provenance: Provenance = Provenance.CLOSED_FORM,
        name: str = "function",
    ) -> None:
        super().__init__(dimension)
        self._value_fn = value_fn
        self._gradient_fn = gradient_fn
        self._laplacian_fn = laplacian_fn
        self.provenance = provenance
        self.exact = gradient_fn is not None and laplacian_fn is not None
        self.name = name

    def value(self, x: ArrayLike) -> np.ndarray:
        return np.asarray(self._value_fn(self._points(x)), dtype=float)

    def gradient(self, x: ArrayLike) -> np.ndarray:
        if self._gradient_fn is None:
            return super().gradient(x)
        return np.asarray(self._gradient_fn(self._points(x)), dtype=float)

    def laplacian(self, x: ArrayLike) -> np.ndarray:
        if self._laplacian_fn is None:
            return super().laplacian(x)
        return np.asarray(self._laplacian_fn(self._points(x)), dtype=float)

    def __repr__(self) -> str:
        return f"FunctionField({self.name!r}, n={self.dimension})"


def constant_field(n: int, c: float) -> FunctionField:
    if c <= 0:
        raise DomainError(f"constant field must be positive, got {c}")
    return FunctionField(
        n,
        lambda x: np.full(x.shape[:-1], float(c)),
        gradient_fn=lambda x: np.zeros(x.shape),
        laplacian_fn=lambda x: np.zeros(x.shape[:-1]),
        name=f"constant {c}",
    )


def sum_fields(*fields: ScalarField) -> FunctionField:
    """Pointwise sum; used for negative controls such as two superposed bubbles."""
    n = fields[0].dimension
    exact = all(f.exact for f in fields)
    return FunctionField(
        n,
        lambda x: sum(f.value(x) for f in fields),
        gradient_fn=(lambda x: sum(f.gradient(x) for f in fields)) if exact else None,
        laplacian_fn=(lambda x: sum(f.laplacian(x) for f in fields)) if exact else None,
        name="sum",
    )
