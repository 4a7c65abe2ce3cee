"""Traces of a field along the x₁-axis and the scale that makes a Kelvin image symmetric.

For the trace f(t) = u(t, 0, …, 0), the Kelvin image of u_s about e = (1, 0, …, 0) restricted
to the same axis is g_s(t) = s^{(n−2)/2}·|t − 1|^{2−n}·f(s(1 + 1/(t − 1))). Its slope at the
midpoint t = 1/2 changes sign as s runs from small to large, and the zero s* is the scale at
which the image is symmetric about the axis through (1/2, 0, …, 0).
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import bisect, newton

from critical_halfspace.core.errors import BracketError, DomainError, PreconditionError
from critical_halfspace.core.field import as_points, check_dimension
from critical_halfspace.core.sampling import sample_boundary
from critical_halfspace.core.types import (
    BoundaryProfileFit,
    ImageSymmetryCheck,
    KelvinCenter,
    ScaleSearchResult,
    TraceFunction,
)
from critical_halfspace.fields.bubble import derive_amplitude, scale_field
from critical_halfspace.fields.fit import fit_profile
from critical_halfspace.fields.kelvin import kelvin_at
from critical_halfspace.symmetry.decay import decay_report, lambda_guess
from critical_halfspace.symmetry.moving_plane import DEFAULT_SAMPLES, detect_axis

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from critical_halfspace.core.protocols import ScalarField

logger = logging.getLogger(__name__)

EVENNESS_TOL = 1e-8
FORM_TOL = 1e-10
SCALE_TOL = 1e-12


def _axis_points(t: ArrayLike, n: int) -> np.ndarray:
    ts = np.asarray(t, dtype=float)
    pts = np.zeros((*ts.shape, n))
    pts[..., 0] = ts
    return pts


def make_trace(u: ScalarField, n: int) -> TraceFunction:
    n = check_dimension(n)
    if u.dimension != n:
        raise DomainError(f"field has dimension {u.dimension}, expected {n}")
    return TraceFunction(
        eval=lambda t: u.value(_axis_points(t, n)),
        derivative=lambda t: u.gradient(_axis_points(t, n))[..., 0],
        source=u,
    )


def g_trace(u_trace: TraceFunction, n: int, s: float) -> TraceFunction:
    """Axis trace of the Kelvin image about (1, 0, …, 0) of the rescaled field u_s."""
    if s <= 0:
        raise DomainError(f"scale must be positive, got {s}")
    k = (n - 2) / 2
    weight = s**k

    def value(t: ArrayLike) -> np.ndarray:
        d = np.asarray(t, dtype=float) - 1.0
        return weight * np.abs(d) ** (2 - n) * u_trace.eval(s * (1 + 1 / d))

    def derivative(t: ArrayLike) -> np.ndarray:
        d = np.asarray(t, dtype=float) - 1.0
        w = s * (1 + 1 / d)
        first = (2 - n) * np.abs(d) ** (1 - n) * np.sign(d) * u_trace.eval(w)
        second = np.abs(d) ** (2 - n) * u_trace.derivative(w) * (-s / d**2)
        return weight * (first + second)

    return TraceFunction(eval=value, derivative=derivative, source=None)


def g_s_prime_half(
    u_trace: TraceFunction,
    n: int,
    s: float,
    evenness_tol: float = EVENNESS_TOL,
    form_tol: float = FORM_TOL,
) -> float:
    """g_s′(1/2) = 2ⁿ·s^{(n−2)/2}·((n−2)/2·f(s) + s·f′(s)).

    The reflected form 2ⁿ·s^{(n−2)/2}·((n−2)/2·f(−s) − s·f′(−s)) and, when the trace knows its
    source field, the form (n−2)/2·u(x_s) + x_s·∇u(x_s) must agree with it.
    """
    if s <= 0:
        raise DomainError(f"scale must be positive, got {s}")
    k = (n - 2) / 2
    f_plus, f_minus = (float(v) for v in u_trace.eval(np.array([s, -s])))
    d_plus, d_minus = (float(v) for v in u_trace.derivative(np.array([s, -s])))
    if abs(f_plus - f_minus) > evenness_tol * max(1.0, abs(f_plus)):
        raise PreconditionError(
            f"trace is not even at s={s}: f(s)={f_plus!r}, f(-s)={f_minus!r}"
        )

    prefactor = 2.0**n * s**k
    form_plus = prefactor * (k * f_plus + s * d_plus)
    form_minus = prefactor * (k * f_minus - s * d_minus)
    forms = [form_minus]
    if u_trace.source is not None:
        x_s = _axis_points(s, n)
        dot = float(np.sum(x_s * u_trace.source.gradient(x_s)))
        forms.append(prefactor * (k * float(u_trace.source.value(x_s)) + dot))

    scale = prefactor * (abs(k * f_plus) + abs(s * d_plus))
    for other in forms:
        if abs(other - form_plus) > form_tol * max(1.0, scale):
            raise PreconditionError(
                f"g_s'(1/2) forms disagree at s={s}: {form_plus!r} vs {other!r}"
            )
    return form_plus


def g_s_prime_half_numeric(u_trace: TraceFunction, n: int, s: float, h: float = 1e-5) -> float:
    """Central difference of g_s at t = 1/2, independent of the closed forms."""
    g = g_trace(u_trace, n, s)
    return float((g.eval(0.5 + h) - g.eval(0.5 - h)) / (2 * h))


def default_scale_bracket(u_trace: TraceFunction, n: int) -> tuple[float, float]:
    """(10⁻³·λ_g, 10³·λ_g) with λ_g the bubble scale matching the far-field coefficient."""
    if u_trace.source is None:
        raise DomainError("default bracket needs a trace with a source field")
    mu = decay_report(u_trace.source, n).mu_estimate
    guess = lambda_guess(mu, derive_amplitude(n), n)
    logger.debug("scale bracket from mu=%.10g: lambda_guess=%.10g", mu, guess)
    return 1e-3 * guess, 1e3 * guess


def find_symmetric_scale(
    u_trace: TraceFunction,
    n: int,
    s_lo: float | None = None,
    s_hi: float | None = None,
    tol: float = SCALE_TOL,
) -> ScaleSearchResult:
    n = check_dimension(n)
    if s_lo is None or s_hi is None:
        default_lo, default_hi = default_scale_bracket(u_trace, n)
        s_lo = default_lo if s_lo is None else s_lo
        s_hi = default_hi if s_hi is None else s_hi
    if not 0 < s_lo < s_hi:
        raise DomainError(f"invalid scale bracket ({s_lo}, {s_hi})")

    def g(s: float) -> float:
        return g_s_prime_half(u_trace, n, s)

    g_lo, g_hi = g(s_lo), g(s_hi)
    if np.sign(g_lo) == np.sign(g_hi):
        raise BracketError(
            f"g_s'(1/2) has the same sign at s={s_lo} ({g_lo:.3e}) and s={s_hi} ({g_hi:.3e})"
        )

    root, info = bisect(g, s_lo, s_hi, xtol=1e-14, maxiter=200, full_output=True)
    iterations = info.iterations
    best, best_residual = root, abs(g(root))
    try:
        polished = float(newton(g, root, tol=1e-15, maxiter=20))
    except (RuntimeError, ValueError) as exc:
        logger.debug("secant polish skipped: %s", exc)
    else:
        if s_lo < polished < s_hi and abs(g(polished)) < best_residual:
            best, best_residual = polished, abs(g(polished))
    if best_residual >= tol:
        logger.warning("scale search stopped with |g'(1/2)| = %.3e above %.1e", best_residual, tol)
    logger.debug("symmetric scale s*=%.15g after %d bisection steps", best, iterations)
    return ScaleSearchResult(
        s_star=float(best),
        gprime_at_half=g(best),
        bracket=(float(s_lo), float(s_hi)),
        iterations=iterations,
    )


def verify_lemma32_symmetry(
    u: ScalarField,
    n: int,
    s_star: float,
    lambda_grid: ArrayLike | None = None,
    count: int = DEFAULT_SAMPLES,
    radius: float = 10.0,
    seed: int = 0,
    threads: int = 1,
) -> ImageSymmetryCheck:
    """Detect the axis of the Kelvin image about (1, 0, …, 0) of u rescaled by s_star."""
    n = check_dimension(n)
    image = kelvin_at(scale_field(u, s_star), KelvinCenter.unit(n, 0), n)
    detection = detect_axis(
        image, n, lambda_grid=lambda_grid, count=count, radius=radius, seed=seed,
        threads=threads,
    )
    target = np.zeros(n - 1)
    target[0] = 0.5
    distance = float(np.linalg.norm(detection.axis_point - target))
    logger.debug("image axis %s, distance %.3e from the midpoint axis", detection.axis_point,
                 distance)
    return ImageSymmetryCheck(
        axis_point=detection.axis_point,
        axis_distance=distance,
        asymmetry_score=detection.asymmetry_score,
    )


def boundary_profile_check(
    u: ScalarField, n: int, count: int = 400, radius: float = 5.0, seed: int = 0
) -> BoundaryProfileFit:
    """Fit u(x′, 0) to A·(λ_b/(λ_b² + |x′ − x₀′|²))^{(n−2)/2} over a boundary sample.

    A bubble of scale λ whose center satisfies the boundary relation restricts to this profile
    with λ_b² = λ² + y_n² = 2λ²(n−1)/(n−2) and A = a·(λ/λ_b)^{(n−2)/2}; the implied (a, λ) are
    reported alongside the fitted (A, λ_b).
    """
    n = check_dimension(n)
    pts = as_points(sample_boundary(n, count, radius, seed), n)
    values = u.value(pts)
    if np.any(values <= 0):
        raise DomainError("field is not positive on the boundary sample")
    k = (n - 2) / 2
    fit = fit_profile(pts[:, :-1], values, k)

    rho2 = np.sum((pts[:, :-1] - fit.center) ** 2, axis=-1)
    model = fit.amplitude * (fit.lam / (fit.lam**2 + rho2)) ** k
    implied_lambda = fit.lam * np.sqrt((n - 2) / (2 * (n - 1)))
    implied_amplitude = fit.amplitude * (fit.lam / implied_lambda) ** k
    return BoundaryProfileFit(
        amplitude=fit.amplitude,
        scale=fit.lam,
        center_prime=fit.center,
        max_deviation=float(np.max(np.abs(model - values))),
        implied_amplitude=float(implied_amplitude),
        implied_lambda=float(implied_lambda),
        fit_residual=fit.rms,
    )
