import numpy as np
import pytest

from critical_halfspace.core.errors import DomainError, StudyError
from critical_halfspace.core.sampling import sample_halfspace
from critical_halfspace.core.types import AxisymGrid, NewtonConfig
from critical_halfspace.fields.bubble import critical_p, critical_q, make_bubble
from critical_halfspace.fields.fit import fit_bubble
from critical_halfspace.solver.assembly import (
    assemble_jacobian,
    assemble_residual,
    asymptotic_far_field,
    manufactured_far_field,
    sample_on_grid,
    unknown_mask,
)
from critical_halfspace.solver.newton import newton_solve
from critical_halfspace.solver.study import (
    blind_sensitivity,
    convergence_study,
    estimate_mu,
    lift_to_field,
    solve_blind,
)
from critical_halfspace.symmetry.moving_plane import detect_axis


def _solve(bubble, grid, guess=None, config=None):
    reference = sample_on_grid(bubble, grid)
    start = reference if guess is None else guess
    return newton_solve(grid, 3, 5.0, 3.0, start, manufactured_far_field(bubble), config)


class TestAssembly:
    def test_constant_interior_residual(self):
        grid = AxisymGrid.square(2.0, 8)
        values = np.full(grid.shape, 2.0)
        F = assemble_residual(grid, values, 3, 5.0, 3.0, None, dirichlet=np.zeros(grid.shape))
        np.testing.assert_allclose(F[1:-1, 1:-1], 32.0)
        np.testing.assert_allclose(F[0, 1:-1], 32.0)
        # bottom row: (h_z/2)·c^q + c^p
        np.testing.assert_allclose(F[1:-1, 0], grid.h_z / 2 * 32.0 + 8.0)
        np.testing.assert_allclose(F[-1, :], 2.0)

    def test_residual_is_second_order(self, bubble3):
        sups = []
        for cells in (32, 64):
            grid = AxisymGrid.square(4.0, cells)
            F = assemble_residual(
                grid, sample_on_grid(bubble3, grid), 3, 5.0, 3.0, manufactured_far_field(bubble3)
            )
            assert np.max(np.abs(F[~unknown_mask(grid)])) < 1e-14
            sups.append(np.max(np.abs(F)))
        assert 3.0 < sups[0] / sups[1] < 5.0

    def test_jacobian_matches_difference_quotient(self):
        grid = AxisymGrid.square(3.0, 8)
        rng = np.random.default_rng(0)
        u = 0.5 + rng.random(grid.shape)
        v = rng.standard_normal(grid.shape)
        zeros = np.zeros(grid.shape)
        eps = 1e-6
        plus = assemble_residual(grid, u + eps * v, 4, 3.0, 2.0, None, dirichlet=zeros)
        minus = assemble_residual(grid, u - eps * v, 4, 3.0, 2.0, None, dirichlet=zeros)
        numeric = (plus - minus).ravel() / (2 * eps)
        exact = assemble_jacobian(grid, u, 4, 3.0, 2.0) @ v.ravel()
        np.testing.assert_allclose(exact, numeric, rtol=1e-6, atol=1e-6)

    def test_nonpositive_values(self):
        grid = AxisymGrid.square(2.0, 4)
        values = np.ones(grid.shape)
        values[2, 2] = 0.0
        with pytest.raises(DomainError, match="non-positive"):
            assemble_residual(grid, values, 3, 5.0, 3.0, asymptotic_far_field(1.0, 3))

    def test_wrong_shape(self):
        grid = AxisymGrid.square(2.0, 4)
        with pytest.raises(DomainError, match="shape"):
            assemble_jacobian(grid, np.ones((3, 3)), 3, 5.0, 3.0)

    def test_missing_far_field(self):
        grid = AxisymGrid.square(2.0, 4)
        with pytest.raises(DomainError):
            assemble_residual(grid, np.ones(grid.shape), 3, 5.0, 3.0, None)


class TestNewton:
    def test_exact_start(self, bubble3):
        grid = AxisymGrid.square(6.0, 32)
        result = _solve(bubble3, grid)
        assert result.converged
        # the sampled bubble is off the discrete solution by O(h²)
        assert result.newton_iterations <= 4
        assert result.final_residual_norm < 1e-10
        assert not result.continuation_used
        again = _solve(bubble3, grid, result.grid_values)
        assert again.converged
        assert again.newton_iterations == 0

    def test_perturbed_starts_agree(self, bubble3):
        grid = AxisymGrid.square(6.0, 32)
        reference = sample_on_grid(bubble3, grid)
        baseline = _solve(bubble3, grid).grid_values
        for seed in range(5):
            rng = np.random.default_rng(seed)
            guess = reference * (1.0 + 0.3 * rng.random(grid.shape))
            result = _solve(bubble3, grid, guess)
            assert result.converged
            assert np.max(np.abs(result.grid_values - baseline)) < 10 * grid.h_r**2
            assert np.max(np.abs(result.grid_values - reference)) < 10 * grid.h_r**2

    def test_quadratic_tail(self, bubble3):
        constants = []
        for cells in (32, 64):
            grid = AxisymGrid.square(6.0, cells)
            solved = _solve(bubble3, grid).grid_values
            history = _solve(bubble3, grid, solved * (1 + 2e-4)).residual_history
            tail = [(a, b) for a, b in zip(history, history[1:]) if a < 1e-3 and b > 1e-12]
            assert tail
            constants.append(max(b / a**2 for a, b in tail))
        assert 0.25 < constants[1] / constants[0] < 4.0

    def test_residual_history_decreases(self, bubble3):
        grid = AxisymGrid.square(6.0, 24)
        guess = sample_on_grid(bubble3, grid) * 1.2
        history = _solve(bubble3, grid, guess).residual_history
        assert all(b < a for a, b in zip(history, history[1:]))

    def test_guess_must_be_positive(self, bubble3):
        grid = AxisymGrid.square(4.0, 8)
        with pytest.raises(DomainError, match="positive"):
            _solve(bubble3, grid, -np.ones(grid.shape))

    def test_iteration_cap(self, bubble3):
        grid = AxisymGrid.square(4.0, 8)
        config = NewtonConfig(tol=1e-15, max_iter=1, continuation_steps=0)
        result = _solve(bubble3, grid, sample_on_grid(bubble3, grid) * 1.5, config)
        assert not result.converged
        assert result.newton_iterations == 1


class TestStudies:
    def test_second_order_convergence(self, bubble3):
        grids = [AxisymGrid.square(12.0, m) for m in (32, 64, 128)]
        study = convergence_study(3, 5.0, 3.0, bubble3, grids)
        assert study.observed_order == pytest.approx(2.0, abs=0.2)
        assert study.errors[0] > study.errors[1] > study.errors[2]

    def test_second_order_in_five_dimensions(self):
        b = make_bubble(5, 1.0)
        grids = [AxisymGrid.square(6.0, m) for m in (64, 128, 256)]
        study = convergence_study(5, critical_q(5), critical_p(5), b, grids)
        assert study.observed_order == pytest.approx(2.0, abs=0.2)
        assert study.unresolved == []

    def test_coarse_grid_is_reported_unresolved(self):
        b = make_bubble(5, 1.0)
        grids = [AxisymGrid.square(12.0, m) for m in (32, 128, 256)]
        with pytest.raises(StudyError, match="too coarse"):
            convergence_study(5, critical_q(5), critical_p(5), b, grids)
        study = convergence_study(5, critical_q(5), critical_p(5), b, grids, skip_unresolved=True)
        assert study.unresolved == [(32, 32)]
        assert len(study.errors) == 2
        assert study.errors[1] < study.errors[0]

    def test_study_fails_loudly(self, bubble3):
        grids = [AxisymGrid.square(4.0, m) for m in (8, 16)]
        config = NewtonConfig(tol=1e-15, max_iter=1, continuation_steps=0)
        with pytest.raises(StudyError, match="did not converge"):
            convergence_study(3, 5.0, 3.0, bubble3, grids, config)

    def test_study_needs_two_grids(self, bubble3):
        with pytest.raises(DomainError):
            convergence_study(3, 5.0, 3.0, bubble3, [AxisymGrid.square(4.0, 8)])


class TestLift:
    @pytest.fixture(scope="class")
    def solved(self):
        bubble = make_bubble(3, 1.0)
        grid = AxisymGrid.square(12.0, 64)
        return bubble, grid, _solve(bubble, grid)

    def test_lift_reproduces_nodes(self, solved):
        bubble, grid, result = solved
        lifted = lift_to_field(result, grid, 3)
        pts = np.zeros((grid.m_r + 1, 3))
        pts[:, 0] = grid.r
        pts[:, -1] = grid.z[5]
        np.testing.assert_allclose(lifted.value(pts), result.grid_values[:, 5], rtol=1e-12)

    def test_far_field_coefficient(self, solved):
        bubble, grid, result = solved
        mu = estimate_mu(result.grid_values, grid, 3)
        assert mu == pytest.approx(bubble.params.mu, rel=0.05)

    def test_outside_points_use_far_field(self, solved):
        _, grid, result = solved
        lifted = lift_to_field(result, grid, 3, mu=2.0)
        assert lifted.value([[100.0, 0.0, 0.0]])[0] == pytest.approx(0.02)

    def test_lifted_axis(self, solved):
        _, grid, result = solved
        lifted = lift_to_field(result, grid, 3)
        detection = detect_axis(
            lifted, 3, lambda_grid=np.linspace(-2.0, 2.0, 9), count=1000, radius=3.0
        )
        np.testing.assert_allclose(detection.axis_point, [0.0, 0.0], atol=grid.h_r)

    def test_fit_recovers_scale(self):
        bubble = make_bubble(3, 1.0)
        grid = AxisymGrid.square(12.0, 128)
        lifted = lift_to_field(_solve(bubble, grid), grid, 3)
        fit = fit_bubble(lifted, 3, sample_halfspace(3, 400, radius=4.0))
        assert fit.params.lam == pytest.approx(1.0, rel=0.02)


def test_blind_mode_runs_to_a_scale():
    """Without the exact far field the solver still settles on a positive bubble scale."""
    grid = AxisymGrid.square(8.0, 24)
    mu0 = make_bubble(3, 1.0).params.mu
    blind = solve_blind(grid, 3, 5.0, 3.0, mu0, rounds=3)
    assert blind.solve.converged
    assert blind.lambda_estimate > 0
    assert len(blind.mu_history) == blind.rounds + 1


def test_blind_sensitivity_covers_each_extent():
    mu0 = make_bubble(3, 1.0).params.mu
    out = blind_sensitivity(3, 5.0, 3.0, mu0, [6.0, 8.0], cells=24)
    assert list(out) == [6.0, 8.0]
    assert all(lam > 0 for lam in out.values())
