import numpy as np
import pytest

from critical_halfspace.core.errors import DomainError
from critical_halfspace.fields.bubble import derive_amplitude, make_bubble, make_harmonic
from critical_halfspace.symmetry.decay import decay_report, default_directions, lambda_guess


class TestDecayReport:
    def test_bubble_far_field(self, bubble3):
        report = decay_report(bubble3, 3)
        mu = 3**0.25
        assert report.mu_estimate == pytest.approx(mu, abs=1e-4)
        assert report.radial_limit_estimate == pytest.approx(-mu, abs=1e-3)
        assert np.max(np.abs(report.grad_limit_estimates)) < 1e-3
        assert report.mu_spread < 1e-3
        assert len(report.per_direction_mu) == 10

    @pytest.mark.parametrize("n,lam", [(4, 1.0), (5, 0.5), (4, 2.0)])
    def test_mu_matches_closed_form(self, n, lam):
        b = make_bubble(n, lam, y_prime=np.full(n - 1, 0.5))
        report = decay_report(b, n)
        assert report.mu_estimate == pytest.approx(b.params.mu, rel=1e-4)

    def test_harmonic_coefficient(self):
        report = decay_report(make_harmonic(3, 2.0), 3)
        assert report.mu_estimate == pytest.approx(2.0, rel=1e-6)

    def test_custom_directions(self, bubble3):
        report = decay_report(bubble3, 3, directions=[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        assert len(report.per_direction_mu) == 2

    def test_directions_must_point_up(self, bubble3):
        with pytest.raises(DomainError, match="d_n"):
            decay_report(bubble3, 3, directions=[[0.0, 0.0, -1.0]])

    def test_radii_must_increase(self, bubble3):
        with pytest.raises(DomainError, match="increasing"):
            decay_report(bubble3, 3, radii=[1e3, 1e2])


class TestDirections:
    def test_unit_and_upper(self):
        dirs = default_directions(5, count=12)
        assert dirs.shape == (12, 5)
        np.testing.assert_allclose(np.linalg.norm(dirs, axis=-1), 1.0)
        assert np.all(dirs[:, -1] >= 0)


def test_lambda_guess_inverts_mu():
    for n in (3, 4, 6):
        b = make_bubble(n, 1.7)
        assert lambda_guess(b.params.mu, derive_amplitude(n), n) == pytest.approx(1.7)
