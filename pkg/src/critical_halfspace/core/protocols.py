from __future__ import annotations

from typing import TYPE_CHECKING, Protocol, runtime_checkable

if TYPE_CHECKING:
    import numpy as np
    from numpy.typing import ArrayLike

    from critical_halfspace.core.types import Provenance


@runtime_checkable
class ScalarField(Protocol):
    """A positive function on the closed upper half-space.

    All three evaluators are vectorised over leading axes: points of shape (..., n) give
    values of shape (...) and gradients of shape (..., n).
    """

    dimension: int
    provenance: Provenance
    exact: bool  # gradient and Laplacian are analytic rather than differenced

    def value(self, x: ArrayLike) -> np.ndarray: ...

    def gradient(self, x: ArrayLike) -> np.ndarray: ...

    def laplacian(self, x: ArrayLike) -> np.ndarray: ...

    @property
    def singularities(self) -> tuple[np.ndarray, ...]: ...


@runtime_checkable
class FarField(Protocol):
    """Dirichlet data on the outer faces of a truncated (r, z) domain."""

    def __call__(self, r: np.ndarray, z: np.ndarray) -> np.ndarray: ...
