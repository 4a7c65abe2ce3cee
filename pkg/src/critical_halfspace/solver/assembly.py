"""Discrete residual and Jacobian of the axisymmetric problem on an (r, z) grid.

Row layout follows ``values.ravel()`` for an array indexed [i, j] ↔ (r_i, z_j):

* interior nodes carry Δ_h u + u^q, where Δ_h u = u_rr + (n−2)/r·u_r + u_zz;
* the axis r = 0 replaces the radial part by its limit (n−1)·u_rr, with u_{−1} = u_1;
* the bottom row z = 0 eliminates the ghost value through u_z = −u^p and is multiplied by h_z/2,
  giving (h_z/2)(radial + u^q) + (u_1 − u_0)/h_z + u^p;
* the outer faces i = m_r and j = m_z are Dirichlet rows u − g.

The linear part depends only on the grid and n and is cached.
"""

from __future__ import annotations

from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from critical_halfspace.core.errors import DomainError
from critical_halfspace.core.field import check_dimension

if TYPE_CHECKING:
    from critical_halfspace.core.protocols import FarField, ScalarField
    from critical_halfspace.core.types import AxisymGrid


def _index(grid: AxisymGrid) -> tuple[np.ndarray, np.ndarray]:
    return np.meshgrid(np.arange(grid.m_r + 1), np.arange(grid.m_z + 1), indexing="ij")


def unknown_mask(grid: AxisymGrid) -> np.ndarray:
    ii, jj = _index(grid)
    return (ii < grid.m_r) & (jj < grid.m_z)


@lru_cache(maxsize=32)
def linear_operator(grid: AxisymGrid, n: int) -> sparse.csr_matrix:
    n = check_dimension(n)
    ii, jj = _index(grid)
    stride = grid.m_z + 1
    size = (grid.m_r + 1) * stride
    flat = ii * stride + jj
    unknown = unknown_mask(grid)
    hr, hz = grid.h_r, grid.h_z
    scale = np.where(jj == 0, hz / 2, 1.0)
    r = ii * hr

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    data: list[np.ndarray] = []

    def add(mask: np.ndarray, di: int, dj: int, coef: np.ndarray | float) -> None:
        rows.append(flat[mask])
        cols.append(flat[mask] + di * stride + dj)
        data.append(np.broadcast_to(coef, flat.shape)[mask])

    off_axis = unknown & (ii > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        drift = np.where(ii > 0, (n - 2) / (2 * r * hr), 0.0)
    add(off_axis, 1, 0, scale * (1 / hr**2 + drift))
    add(off_axis, -1, 0, scale * (1 / hr**2 - drift))
    add(off_axis, 0, 0, scale * (-2 / hr**2))

    on_axis = unknown & (ii == 0)
    add(on_axis, 1, 0, scale * (2 * (n - 1) / hr**2))
    add(on_axis, 0, 0, scale * (-2 * (n - 1) / hr**2))

    above = unknown & (jj > 0)
    add(above, 0, 1, 1 / hz**2)
    add(above, 0, -1, 1 / hz**2)
    add(above, 0, 0, -2 / hz**2)

    bottom = unknown & (jj == 0)
    add(bottom, 0, 1, 1 / hz)
    add(bottom, 0, 0, -1 / hz)

    add(~unknown, 0, 0, 1.0)

    op = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    )
    return op.tocsr()


def _weights(grid: AxisymGrid) -> tuple[np.ndarray, np.ndarray]:
    _, jj = _index(grid)
    unknown = unknown_mask(grid)
    w_q = np.where(unknown, np.where(jj == 0, grid.h_z / 2, 1.0), 0.0)
    w_p = np.where(unknown & (jj == 0), 1.0, 0.0)
    return w_q, w_p


def dirichlet_data(grid: AxisymGrid, far_field: FarField) -> np.ndarray:
    """Far-field values on the outer faces, zero elsewhere."""
    rr, zz = grid.mesh()
    data = np.zeros(grid.shape)
    outer = ~unknown_mask(grid)
    data[outer] = far_field(rr[outer], zz[outer])
    return data


def _check_values(grid: AxisymGrid, values: np.ndarray) -> np.ndarray:
    u = np.asarray(values, dtype=float)
    if u.shape != grid.shape:
        raise DomainError(f"values have shape {u.shape}, grid expects {grid.shape}")
    if np.any(u <= 0):
        raise DomainError(f"{int(np.sum(u <= 0))} non-positive grid value(s)")
    return u


def assemble_residual(
    grid: AxisymGrid,
    values: np.ndarray,
    n: int,
    q: float,
    p: float,
    far_field: FarField | None,
    dirichlet: np.ndarray | None = None,
) -> np.ndarray:
    u = _check_values(grid, values)
    w_q, w_p = _weights(grid)
    if dirichlet is None:
        if far_field is None:
            raise DomainError("either far_field or dirichlet data is required")
        dirichlet = dirichlet_data(grid, far_field)
    g = dirichlet
    lin = (linear_operator(grid, n) @ u.ravel()).reshape(grid.shape)
    return lin + w_q * u**q + w_p * u**p - g


def assemble_jacobian(
    grid: AxisymGrid, values: np.ndarray, n: int, q: float, p: float
) -> sparse.csr_matrix:
    u = _check_values(grid, values)
    w_q, w_p = _weights(grid)
    diag = w_q * q * u ** (q - 1) + w_p * p * u ** (p - 1)
    return (linear_operator(grid, n) + sparse.diags(diag.ravel())).tocsr()


def axis_points(r: np.ndarray, z: np.ndarray, n: int) -> np.ndarray:
    """Points (r, 0, …, 0, z) in ℝⁿ."""
    rr, zz = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
    pts = np.zeros((*rr.shape, n))
    pts[..., 0] = rr
    pts[..., -1] = zz
    return pts


def sample_on_grid(field: ScalarField, grid: AxisymGrid) -> np.ndarray:
    rr, zz = grid.mesh()
    return field.value(axis_points(rr, zz, field.dimension))


def manufactured_far_field(field: ScalarField) -> FarField:
    """Dirichlet data taken from a known axisymmetric solution."""
    n = field.dimension

    def data(r: np.ndarray, z: np.ndarray) -> np.ndarray:
        return field.value(axis_points(r, z, n))

    return data


def asymptotic_far_field(mu: float, n: int) -> FarField:
    """μ/|x|^{n−2}, the leading far-field behaviour of a positive solution."""
    if mu <= 0:
        raise DomainError(f"far-field coefficient must be positive, got {mu}")

    def data(r: np.ndarray, z: np.ndarray) -> np.ndarray:
        return mu * (np.asarray(r) ** 2 + np.asarray(z) ** 2) ** (-(n - 2) / 2)

    return data
