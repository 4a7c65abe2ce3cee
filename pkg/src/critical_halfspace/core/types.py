from __future__ import annotations

import enum
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from critical_halfspace.core.errors import DomainError

if TYPE_CHECKING:
    from critical_halfspace.core.protocols import ScalarField


class Provenance(enum.Enum):
    CLOSED_FORM = "closed-form"
    SAMPLED_GRID = "sampled-grid"
    TRANSFORMED = "transformed"


@dataclass(frozen=True)
class BubbleParams:
    n: int
    lam: float  # scale λ of the profile, not a plane position
    center: tuple[float, ...]  # y, with y_n < 0
    amplitude: float

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise DomainError(f"bubble scale must be positive, got {self.lam}")
        if len(self.center) != self.n:
            raise DomainError(f"center has {len(self.center)} coordinates, expected {self.n}")
        if self.amplitude <= 0:
            raise DomainError(f"amplitude must be positive, got {self.amplitude}")

    @property
    def y_prime(self) -> tuple[float, ...]:
        return self.center[:-1]

    @property
    def depth(self) -> float:
        return self.center[-1]

    @property
    def mu(self) -> float:
        """Far-field coefficient: |x|^{n-2} u(x) tends to a·λ^{(n-2)/2}."""
        return self.amplitude * self.lam ** ((self.n - 2) / 2)

    def boundary_compatible(self, rtol: float = 1e-12) -> bool:
        lhs = (self.n - 2) * (-self.depth)
        rhs = self.amplitude ** (2 / (self.n - 2)) * self.lam
        return math.isclose(lhs, rhs, rel_tol=rtol)


@dataclass(frozen=True)
class FitResult:
    params: BubbleParams
    fit_residual: float  # RMS of log-space residuals
    iterations: int


@dataclass
class ResidualReport:
    interior_exponent_used: float | None = None
    max_interior_residual: float = 0.0
    max_boundary_residual: float = 0.0
    sample_count: int = 0
    proportionality_defect: float = 0.0
    boundary_exponent_used: float | None = None

    def combine(self, other: ResidualReport) -> ResidualReport:
        """Merge an interior-only and a boundary-only report."""
        return ResidualReport(
            interior_exponent_used=self.interior_exponent_used or other.interior_exponent_used,
            max_interior_residual=max(self.max_interior_residual, other.max_interior_residual),
            max_boundary_residual=max(self.max_boundary_residual, other.max_boundary_residual),
            sample_count=self.sample_count + other.sample_count,
            proportionality_defect=max(self.proportionality_defect, other.proportionality_defect),
            boundary_exponent_used=self.boundary_exponent_used or other.boundary_exponent_used,
        )


@dataclass(frozen=True)
class KelvinCenter:
    e: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.e[-1] != 0.0:
            raise DomainError(f"Kelvin center must lie on the boundary, got e_n={self.e[-1]}")

    @classmethod
    def unit(cls, n: int, axis: int = 0) -> KelvinCenter:
        e = [0.0] * n
        e[axis] = 1.0
        return cls(tuple(e))


@dataclass(frozen=True)
class PlaneParams:
    lambda_plane: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.lambda_plane):
            raise DomainError(f"plane position must be finite, got {self.lambda_plane}")

    def reflect(self, points: np.ndarray) -> np.ndarray:
        """x ↦ (2λ − x₁, x₂, …, x_n)."""
        out = np.array(points, dtype=float, copy=True)
        out[..., 0] = 2.0 * self.lambda_plane - out[..., 0]
        return out


@dataclass
class SigmaSampling:
    points: np.ndarray  # shape (m, n)
    radius_cap: float
    lambda_plane: float


@dataclass
class MovingPlaneReport:
    lambda_plane: float
    min_difference: float
    max_abs_difference: float
    violation_count: int
    argmin: np.ndarray
    sample_count: int
    skipped_singular: int = 0


@dataclass
class SweepResult:
    reports: list[MovingPlaneReport]
    lambda0_estimate: float
    bracket: tuple[float, float]
    polished_plane: float
    asymmetry: float


@dataclass
class AxisDetection:
    axis_point: np.ndarray  # (n−1)-vector
    asymmetry_score: float
    sweeps: list[SweepResult] = field(default_factory=list)


@dataclass
class DecayReport:
    mu_estimate: float
    grad_limit_estimates: np.ndarray
    radial_limit_estimate: float
    radii_used: list[float]
    mu_spread: float = 0.0
    per_direction_mu: list[float] = field(default_factory=list)


@dataclass
class TraceFunction:
    eval: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    source: ScalarField | None = None


@dataclass
class ScaleSearchResult:
    s_star: float
    gprime_at_half: float
    bracket: tuple[float, float]
    iterations: int


@dataclass
class ImageSymmetryCheck:
    axis_point: np.ndarray
    axis_distance: float
    asymmetry_score: float


@dataclass
class BoundaryProfileFit:
    amplitude: float  # profile amplitude on x_n = 0
    scale: float  # effective boundary scale λ_b
    center_prime: np.ndarray
    max_deviation: float
    implied_amplitude: float
    implied_lambda: float
    fit_residual: float


@dataclass
class ShootingResult:
    initial_value: float
    zero_crossing_t: float | None
    final_state: tuple[float, float]
    step_count: int
    step: float


@dataclass(frozen=True)
class AxisymGrid:
    R_r: float
    R_z: float
    m_r: int
    m_z: int

    def __post_init__(self) -> None:
        if self.R_r <= 0 or self.R_z <= 0:
            raise DomainError(f"grid extents must be positive, got ({self.R_r}, {self.R_z})")
        if self.m_r < 2 or self.m_z < 2:
            raise DomainError(f"grid needs at least 2 cells per axis, got ({self.m_r}, {self.m_z})")

    @classmethod
    def square(cls, extent: float, cells: int) -> AxisymGrid:
        return cls(R_r=extent, R_z=extent, m_r=cells, m_z=cells)

    @property
    def h_r(self) -> float:
        return self.R_r / self.m_r

    @property
    def h_z(self) -> float:
        return self.R_z / self.m_z

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m_r + 1, self.m_z + 1)

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.m_r + 1) * self.h_r

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.m_z + 1) * self.h_z

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.r, self.z, indexing="ij")


@dataclass
class NewtonConfig:
    tol: float = 1e-10
    max_iter: int = 30
    damping: float = 1.0
    continuation_steps: int = 5
    backtrack_factor: float = 0.5
    max_backtracks: int = 20

    def __post_init__(self) -> None:
        if self.tol <= 0:
            raise DomainError(f"tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be at least 1, got {self.max_iter}")
        if not 0 < self.damping <= 1:
            raise DomainError(f"damping must lie in (0, 1], got {self.damping}")


@dataclass
class SolveResult:
    grid_values: np.ndarray
    newton_iterations: int
    final_residual_norm: float
    converged: bool
    residual_history: list[float] = field(default_factory=list)
    q_used: float = 0.0
    continuation_used: bool = False


@dataclass
class ConvergenceStudy:
    observed_order: float
    spacings: list[float]
    errors: list[float]
    iterations: list[int] = field(default_factory=list)
    unresolved: list[tuple[int, int]] = field(default_factory=list)  # (m_r, m_z) of skipped grids


@dataclass
class BlindSolveResult:
    solve: SolveResult
    mu_history: list[float]
    lambda_estimate: float
    rounds: int
