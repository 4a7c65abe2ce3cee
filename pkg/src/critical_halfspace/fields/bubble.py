"""The explicit solution family a·(λ/(λ² + |x − y|²))^{(n−2)/2} and its residual checks."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import brentq

from critical_halfspace.core.errors import DomainError
from critical_halfspace.core.field import (
    FieldBase,
    as_points,
    check_dimension,
    fd_laplacian,
    require_admissible,
    require_boundary,
)
from critical_halfspace.core.types import BubbleParams, Provenance, ResidualReport

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from critical_halfspace.core.protocols import ScalarField

logger = logging.getLogger(__name__)

_COINCIDENCE = 1e-300


def critical_q(n: int) -> float:
    return (n + 2) / (n - 2)


def critical_p(n: int) -> float:
    return n / (n - 2)


def printed_q(n: int) -> float:
    """Interior exponent 2n/(n−2) as it appears in the problem statement."""
    return 2 * n / (n - 2)


def derive_amplitude(n: int) -> float:
    """Amplitude for which the profile solves −Δu = u^{(n+2)/(n−2)} exactly.

    With w = (λ/(λ²+ρ²))^{(n−2)/2} one has −Δw = n(n−2)·w^{(n+2)/(n−2)}, so a^{4/(n−2)} must
    equal n(n−2).
    """
    n = check_dimension(n)
    return (n * (n - 2)) ** ((n - 2) / 4)


def derive_center_depth(n: int, lam: float) -> float:
    """Depth y_n < 0 making D_{x_n}u = −u^{n/(n−2)} hold on x_n = 0.

    On the boundary D_{x_n}u = −(n−2)·u·(−y_n)/(λ²+ρ²) and u^{2/(n−2)} = a^{2/(n−2)}·λ/(λ²+ρ²),
    so (n−2)(−y_n) = a^{2/(n−2)}·λ, i.e. y_n = −λ·√(n/(n−2)).
    """
    n = check_dimension(n)
    if lam <= 0:
        raise DomainError(f"bubble scale must be positive, got {lam}")
    return -(derive_amplitude(n) ** (2 / (n - 2))) * lam / (n - 2)


class BubbleField(FieldBase):
    provenance = Provenance.CLOSED_FORM
    exact = True

    def __init__(self, params: BubbleParams) -> None:
        super().__init__(params.n)
        self.params = params
        self._center = np.asarray(params.center, dtype=float)

    def _offsets(self, x: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
        diff = self._points(x) - self._center
        rho2 = np.sum(diff**2, axis=-1)
        if np.any(rho2 < _COINCIDENCE):
            raise DomainError("bubble evaluated at its center")
        return diff, rho2

    def value(self, x: ArrayLike) -> np.ndarray:
        _, rho2 = self._offsets(x)
        lam = self.params.lam
        return self.params.amplitude * (lam / (lam**2 + rho2)) ** ((self.dimension - 2) / 2)

    def gradient(self, x: ArrayLike) -> np.ndarray:
        diff, rho2 = self._offsets(x)
        u = self.value(x)
        denom = self.params.lam**2 + rho2
        return -(self.dimension - 2) * (u / denom)[..., None] * diff

    def laplacian(self, x: ArrayLike) -> np.ndarray:
        _, rho2 = self._offsets(x)
        n, lam = self.dimension, self.params.lam
        return -n * (n - 2) * lam**2 * self.value(x) / (lam**2 + rho2) ** 2

    def __repr__(self) -> str:
        p = self.params
        return f"BubbleField(n={p.n}, lam={p.lam:g}, center={p.center}, a={p.amplitude:g})"


def _center(n: int, y_prime: ArrayLike | None, depth: float) -> tuple[float, ...]:
    tangential = np.zeros(n - 1) if y_prime is None else np.asarray(y_prime, dtype=float)
    if tangential.shape != (n - 1,):
        raise DomainError(f"y' must have {n - 1} coordinates, got shape {tangential.shape}")
    return (*map(float, tangential), float(depth))


def make_bubble(n: int, lam: float, y_prime: ArrayLike | None = None) -> BubbleField:
    """Boundary-compatible bubble; its parameters are available as ``field.params``."""
    n = check_dimension(n)
    depth = derive_center_depth(n, lam)
    params = BubbleParams(n, float(lam), _center(n, y_prime, depth), derive_amplitude(n))
    return BubbleField(params)


def bubble_from_params(
    n: int, lam: float, center: ArrayLike, amplitude: float | None = None
) -> BubbleField:
    """Bubble with an arbitrary center, e.g. one violating the boundary relation."""
    n = check_dimension(n)
    a = derive_amplitude(n) if amplitude is None else amplitude
    c = tuple(float(v) for v in np.asarray(center, dtype=float))
    return BubbleField(BubbleParams(n, float(lam), c, float(a)))


def scaled_bubble_params(params: BubbleParams, s: float) -> BubbleParams:
    """Parameters of u_s for a bubble u: scale λ/s and center y/s."""
    center = tuple(c / s for c in params.center)
    return BubbleParams(params.n, params.lam / s, center, params.amplitude)


class HarmonicField(FieldBase):
    """c·|x − y|^{2−n}: positive harmonic with the same nonlinear boundary law."""

    provenance = Provenance.CLOSED_FORM
    exact = True

    def __init__(self, n: int, c: float, center: tuple[float, ...]) -> None:
        super().__init__(n)
        if c <= 0:
            raise DomainError(f"harmonic coefficient must be positive, got {c}")
        self.c = float(c)
        self._center = np.asarray(center, dtype=float)

    def value(self, x: ArrayLike) -> np.ndarray:
        rho2 = np.sum((self._points(x) - self._center) ** 2, axis=-1)
        if np.any(rho2 < _COINCIDENCE):
            raise DomainError("harmonic field evaluated at its pole")
        return self.c * rho2 ** ((2 - self.dimension) / 2)

    def gradient(self, x: ArrayLike) -> np.ndarray:
        diff = self._points(x) - self._center
        rho2 = np.sum(diff**2, axis=-1)
        return -(self.dimension - 2) * (self.value(x) / rho2)[..., None] * diff

    def laplacian(self, x: ArrayLike) -> np.ndarray:
        return np.zeros(self._points(x).shape[:-1])


def make_harmonic(n: int, c: float, y_prime: ArrayLike | None = None) -> HarmonicField:
    """Boundary-compatible pole: (n−2)(−y_n) = c^{2/(n−2)}."""
    n = check_dimension(n)
    if c <= 0:
        raise DomainError(f"harmonic coefficient must be positive, got {c}")
    depth = -(c ** (2 / (n - 2))) / (n - 2)
    return HarmonicField(n, c, _center(n, y_prime, depth))


def _positive_values(f: ScalarField, pts: np.ndarray) -> np.ndarray:
    values = f.value(pts)
    if np.any(values <= 0):
        raise DomainError(f"field is not positive at {int(np.sum(values <= 0))} sample(s)")
    return values


def verify_interior(
    f: ScalarField, q: float, samples: ArrayLike, coefficient: float = 1.0
) -> ResidualReport:
    """Residual of −Δf = κ·f^q and the spread of −Δf/f^q over the samples."""
    if q <= 1:
        raise DomainError(f"interior exponent must exceed 1, got {q}")
    pts = np.atleast_2d(as_points(samples, f.dimension))
    require_admissible(pts)
    values = _positive_values(f, pts)
    minus_lap = -f.laplacian(pts)
    power = values**q
    ratio = minus_lap / power
    report = ResidualReport(
        interior_exponent_used=q,
        max_interior_residual=float(np.max(np.abs(minus_lap - coefficient * power))),
        sample_count=len(pts),
        proportionality_defect=float(np.max(ratio) - np.min(ratio)),
    )
    logger.debug("interior check q=%g over %d samples: %s", q, len(pts), report)
    return report


def verify_boundary(f: ScalarField, p: float, samples: ArrayLike) -> ResidualReport:
    pts = np.atleast_2d(as_points(samples, f.dimension))
    require_boundary(pts)
    values = _positive_values(f, pts)
    normal = f.gradient(pts)[..., -1]
    report = ResidualReport(
        max_boundary_residual=float(np.max(np.abs(normal + values**p))),
        sample_count=len(pts),
        boundary_exponent_used=p,
    )
    logger.debug("boundary check p=%g over %d samples: %s", p, len(pts), report)
    return report


class ScaledField(FieldBase):
    """u_s(x) = s^{(n−2)/2}·u(s·x)."""

    provenance = Provenance.TRANSFORMED

    def __init__(self, source: ScalarField, s: float) -> None:
        super().__init__(source.dimension)
        if s <= 0:
            raise DomainError(f"scale factor must be positive, got {s}")
        self.source = source
        self.s = float(s)
        self.exact = source.exact
        self._weight = self.s ** ((self.dimension - 2) / 2)

    def value(self, x: ArrayLike) -> np.ndarray:
        return self._weight * self.source.value(self.s * self._points(x))

    def gradient(self, x: ArrayLike) -> np.ndarray:
        return self._weight * self.s * self.source.gradient(self.s * self._points(x))

    def laplacian(self, x: ArrayLike) -> np.ndarray:
        return self._weight * self.s**2 * self.source.laplacian(self.s * self._points(x))

    @property
    def singularities(self) -> tuple[np.ndarray, ...]:
        return tuple(point / self.s for point in self.source.singularities)


def scale_field(f: ScalarField, s: float) -> ScaledField:
    return ScaledField(f, s)


def amplitude_oracle(
    n: int, radii: ArrayLike = (0.5, 1.0, 2.0), lam: float = 1.0, h: float = 1e-3
) -> np.ndarray:
    """Solve for a at several radii by substituting the unit-amplitude profile.

    −Δ(a·w) = (a·w)^q gives a^{q−1} = −Δw / w^q at each radius; all entries must agree.
    """
    n = check_dimension(n)
    depth = -0.25
    unit = BubbleField(BubbleParams(n, lam, (0.0,) * (n - 1) + (depth,), 1.0))
    pts = np.zeros((len(radii), n))
    pts[:, -1] = np.asarray(radii, dtype=float) + depth
    q = critical_q(n)
    ratio = -fd_laplacian(unit, pts, h) / unit.value(pts) ** q
    return ratio ** (1 / (q - 1))


def depth_oracle(n: int, lam: float) -> float:
    """Solve the boundary identity at x' = y' for y_n from the field derivative alone."""
    a = derive_amplitude(n)

    def mismatch(depth: float) -> float:
        field = bubble_from_params(n, lam, (0.0,) * (n - 1) + (depth,), a)
        origin = np.zeros(n)
        return float(field.gradient(origin)[-1] + field.value(origin) ** critical_p(n))

    return brentq(mismatch, -50.0 * lam, -1e-6 * lam, xtol=1e-14)

