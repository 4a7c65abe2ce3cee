"""Shooting the x_n-only reduction −u″ = u^q, u′(0) = −u(0)^p, u(0) = c.

While u > 0 the solution is concave and starts with slope −c^p, so it reaches zero no later
than t = c^{1−p}; the integrator reports where that happens. Past the crossing the right-hand
side uses the odd extension sign(u)·|u|^q.
"""

from __future__ import annotations

import logging
import math

from scipy.optimize import brentq

from critical_halfspace.core.errors import DomainError, IntegrationError
from critical_halfspace.core.field import check_dimension
from critical_halfspace.core.types import ShootingResult
from critical_halfspace.fields.bubble import critical_p, printed_q

logger = logging.getLogger(__name__)

OVERFLOW_GUARD = 1e12
RELATIVE_STEP = 1e-4

State = tuple[float, float]


def _rhs(state: State, q: float) -> State:
    u, du = state
    return du, -math.copysign(abs(u) ** q, u)


def rk4_step(state: State, h: float, q: float) -> State:
    """One classical fourth-order Runge–Kutta step of size h."""
    u, du = state
    k1 = _rhs(state, q)
    k2 = _rhs((u + 0.5 * h * k1[0], du + 0.5 * h * k1[1]), q)
    k3 = _rhs((u + 0.5 * h * k2[0], du + 0.5 * h * k2[1]), q)
    k4 = _rhs((u + h * k3[0], du + h * k3[1]), q)
    return (
        u + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        du + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
    )


def concavity_bound(c: float, p: float) -> float:
    return c ** (1 - p)


def shoot_case1(
    n: int,
    c: float,
    p: float | None = None,
    q: float | None = None,
    step: float | None = None,
    t_max: float | None = None,
    overflow: float = OVERFLOW_GUARD,
) -> ShootingResult:
    """Integrate from t = 0 until u changes sign or t_max is reached.

    q defaults to the interior exponent as printed, 2n/(n−2); p defaults to n/(n−2). The step
    defaults to 10⁻⁴ of the concavity bound and t_max to twice that bound.
    """
    n = check_dimension(n)
    if c <= 0:
        raise DomainError(f"initial height must be positive, got {c}")
    p = critical_p(n) if p is None else p
    q = printed_q(n) if q is None else q
    if p <= 0 or q <= 1:
        raise DomainError(f"need p > 0 and q > 1, got p={p}, q={q}")
    bound = concavity_bound(c, p)
    h = RELATIVE_STEP * bound if step is None else step
    if h <= 0:
        raise DomainError(f"step must be positive, got {h}")
    t_end = 2.0 * bound if t_max is None else t_max

    state: State = (float(c), -float(c) ** p)
    t, steps = 0.0, 0
    while t < t_end:
        size = min(h, t_end - t)
        nxt = rk4_step(state, size, q)
        steps += 1
        if not all(math.isfinite(v) and abs(v) < overflow for v in nxt):
            raise IntegrationError(f"integration left the overflow guard at t={t + size:.6g}")
        if nxt[0] <= 0.0 < state[0]:
            start = state
            tau = brentq(lambda s: rk4_step(start, s, q)[0], 0.0, size, xtol=1e-15)
            crossing = t + tau
            logger.debug("sign change of u at t=%.12g after %d steps (bound %.6g)",
                         crossing, steps, bound)
            return ShootingResult(
                initial_value=float(c),
                zero_crossing_t=crossing,
                final_state=rk4_step(start, tau, q),
                step_count=steps,
                step=h,
            )
        state, t = nxt, t + size

    logger.warning("no sign change of u up to t=%g", t_end)
    return ShootingResult(
        initial_value=float(c),
        zero_crossing_t=None,
        final_state=state,
        step_count=steps,
        step=h,
    )
