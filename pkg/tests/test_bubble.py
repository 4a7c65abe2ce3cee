import math

import numpy as np
import pytest

from critical_halfspace.core.errors import DomainError
from critical_halfspace.core.sampling import sample_boundary, sample_halfspace, sample_shell
from critical_halfspace.fields.bubble import (
    amplitude_oracle,
    bubble_from_params,
    critical_p,
    critical_q,
    depth_oracle,
    derive_amplitude,
    derive_center_depth,
    make_bubble,
    make_harmonic,
    printed_q,
    scale_field,
    scaled_bubble_params,
    verify_boundary,
    verify_interior,
)


class TestClosedForms:
    def test_exponents(self):
        assert critical_q(3) == 5.0
        assert critical_p(3) == 3.0
        assert printed_q(3) == 6.0
        assert printed_q(4) == 4.0

    def test_amplitude(self):
        assert derive_amplitude(3) == pytest.approx(3**0.25, rel=1e-15)
        assert derive_amplitude(4) == pytest.approx(2 * math.sqrt(2), rel=1e-15)
        assert derive_amplitude(6) == pytest.approx(24.0, rel=1e-15)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_depth_is_sqrt_ratio(self, n):
        assert derive_center_depth(n, 1.0) == pytest.approx(-math.sqrt(n / (n - 2)), rel=1e-14)
        assert derive_center_depth(n, 2.0) == pytest.approx(-2 * math.sqrt(n / (n - 2)), rel=1e-14)

    def test_depth_rejects_nonpositive_scale(self):
        with pytest.raises(DomainError):
            derive_center_depth(3, 0.0)

    def test_params_are_boundary_compatible(self):
        b = make_bubble(5, 1.7, y_prime=[0.3, -0.2, 1.0])
        assert b.params.boundary_compatible()
        assert b.params.y_prime == (0.3, -0.2, 1.0)
        assert b.params.mu == pytest.approx(derive_amplitude(5) * 1.7**1.5)

    def test_wrong_length_y_prime(self):
        with pytest.raises(DomainError, match="coordinates"):
            make_bubble(4, 1.0, y_prime=[1.0])


class TestResiduals:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_bubble_solves_both_equations(self, n, lam):
        b = make_bubble(n, lam)
        interior = verify_interior(b, critical_q(n), sample_halfspace(n, 500))
        boundary = verify_boundary(b, critical_p(n), sample_boundary(n, 200))
        assert interior.max_interior_residual < 1e-9
        assert interior.proportionality_defect < 1e-9
        assert boundary.max_boundary_residual < 1e-9

    def test_printed_exponent_is_not_proportional(self, bubble4):
        pts = sample_shell(4, 200, 0.5, 2.0)
        report = verify_interior(bubble4, printed_q(4), pts)
        assert report.interior_exponent_used == 4.0
        assert report.proportionality_defect > 0.1

    def test_translated_bubble(self):
        b = make_bubble(3, 1.0, y_prime=[2.0, -1.0])
        assert verify_interior(b, 5.0, sample_halfspace(3, 200)).max_interior_residual < 1e-9
        assert verify_boundary(b, 3.0, sample_boundary(3, 200)).max_boundary_residual < 1e-9

    def test_misplaced_center_violates_boundary(self):
        b = bubble_from_params(3, 1.0, (0.0, 0.0, -1.0))
        assert verify_boundary(b, 3.0, sample_boundary(3, 50)).max_boundary_residual > 1e-3

    def test_interior_rejects_small_exponent(self, bubble3):
        with pytest.raises(DomainError, match="exceed 1"):
            verify_interior(bubble3, 1.0, sample_halfspace(3, 10))

    def test_interior_rejects_points_below(self, bubble3):
        with pytest.raises(DomainError):
            verify_interior(bubble3, 5.0, [[0.0, 0.0, -0.5]])

    def test_boundary_rejects_interior_points(self, bubble3):
        with pytest.raises(DomainError, match="x_n = 0"):
            verify_boundary(bubble3, 3.0, [[0.0, 0.0, 0.5]])


class TestHarmonic:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_harmonic_satisfies_boundary_law(self, n):
        h = make_harmonic(n, 2.0)
        interior = verify_interior(h, critical_q(n), sample_halfspace(n, 100), coefficient=0.0)
        boundary = verify_boundary(h, critical_p(n), sample_boundary(n, 100))
        assert interior.max_interior_residual == 0.0
        assert boundary.max_boundary_residual < 1e-9

    def test_nonpositive_coefficient(self):
        with pytest.raises(DomainError):
            make_harmonic(3, -1.0)


class TestScaling:
    def test_scaled_bubble_matches_closed_form(self, bubble3):
        scaled = scale_field(bubble3, 2.0)
        expected = bubble_from_params(3, **_as_kwargs(scaled_bubble_params(bubble3.params, 2.0)))
        pts = sample_halfspace(3, 50)
        np.testing.assert_allclose(scaled.value(pts), expected.value(pts), rtol=1e-13)
        np.testing.assert_allclose(scaled.laplacian(pts), expected.laplacian(pts), rtol=1e-12)

    def test_scaling_preserves_the_system(self, bubble4):
        scaled = scale_field(bubble4, 0.3)
        assert verify_interior(scaled, 3.0, sample_halfspace(4, 100)).max_interior_residual < 1e-9
        assert verify_boundary(scaled, 2.0, sample_boundary(4, 100)).max_boundary_residual < 1e-9

    def test_nonpositive_scale(self, bubble3):
        with pytest.raises(DomainError):
            scale_field(bubble3, 0.0)


def _as_kwargs(params):
    return {"lam": params.lam, "center": params.center, "amplitude": params.amplitude}


@pytest.mark.parametrize("n", [3, 4, 5])
def test_amplitude_oracle_agrees_at_every_radius(n):
    """Substitution recovers the same amplitude at each radius, matching the closed form."""
    values = amplitude_oracle(n)
    np.testing.assert_allclose(values, derive_amplitude(n), rtol=1e-4)


@pytest.mark.parametrize("n,lam", [(3, 1.0), (4, 0.5), (5, 2.0)])
def test_depth_oracle_matches_closed_form(n, lam):
    assert depth_oracle(n, lam) == pytest.approx(derive_center_depth(n, lam), abs=1e-10)
