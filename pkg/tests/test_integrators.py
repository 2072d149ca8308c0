import math
import warnings

import numpy as np
import pytest

from poisint import rigidbody
from poisint.integrators import (
    TABLEAUX,
    ButcherTableau,
    ConvergenceError,
    ImplicitSolverConfig,
    VectorField,
    explicit_euler_step,
    gauss_legendre_step,
    modified_euler_step,
    rk_step,
    ruth_step,
    symplectic_condition_residual,
    trapezoid_step,
)
from poisint.rigidbody import RigidBodyParams

PARAMS = RigidBodyParams(2.0, 1.0)
RIGID_F = VectorField(3, lambda m: rigidbody.euler_rhs(PARAMS, m))
ZERO_F = VectorField(3, lambda x: np.zeros(3))
DECAY_F = VectorField(1, lambda x: -x)
LINEAR_F = VectorField(1, lambda x: x.copy())


class TestExplicitEuler:
    def test_rigid_body_example(self):
        out = explicit_euler_step(RIGID_F, [1.0, 0.0, 1.0], 0.1)
        assert np.allclose(out, [1.0, -0.05, 1.0], atol=1e-16)

    def test_zero_field_is_identity(self):
        x = np.array([0.3, -0.7, 2.0])
        assert np.array_equal(explicit_euler_step(ZERO_F, x, 0.5), x)

    def test_linear_scalar(self):
        assert explicit_euler_step(LINEAR_F, [1.0], 0.5)[0] == pytest.approx(1.5, abs=0.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            explicit_euler_step(RIGID_F, [1.0, 2.0], 0.1)


class TestModifiedEuler:
    def test_zero_field_is_identity(self):
        x = np.array([1.0, -2.0, 0.5])
        assert np.allclose(modified_euler_step(ZERO_F, x, 0.3), x, atol=0.0)

    def test_scalar_decay_closed_form(self):
        # y = x + h (f(x) + f(y)) with f = -x gives y = (1 - h) x / (1 + h)
        h = 0.1
        out = modified_euler_step(DECAY_F, [1.0], h)
        assert out[0] == pytest.approx((1.0 - h) / (1.0 + h), abs=1e-12)

    def test_constant_field_doubles_increment(self):
        c = np.array([0.7, -0.4])
        f = VectorField(2, lambda x: c)
        x = np.array([1.0, 2.0])
        out = modified_euler_step(f, x, 0.25)
        assert np.allclose(out, x + 2.0 * 0.25 * c, atol=1e-12)

    def test_nonconvergence_reports_residual(self):
        with pytest.raises(ConvergenceError) as err:
            modified_euler_step(DECAY_F, [1.0], 5.0, ImplicitSolverConfig(max_iterations=10))
        assert err.value.residual > 0.0


class TestTrapezoid:
    def test_scalar_decay_closed_form(self):
        # y = x + (h/2)(f(x) + f(y)) with f = -x gives y = (1 - h/2) x / (1 + h/2)
        h = 0.1
        out = trapezoid_step(DECAY_F, [1.0], h)
        assert out[0] == pytest.approx((1.0 - 0.05) / (1.0 + 0.05), abs=1e-12)

    def test_constant_field_single_increment(self):
        c = np.array([0.7, -0.4])
        f = VectorField(2, lambda x: c)
        x = np.array([1.0, 2.0])
        assert np.allclose(trapezoid_step(f, x, 0.25), x + 0.25 * c, atol=1e-12)


class TestGaussLegendre:
    def test_zero_field_is_identity(self):
        x = np.array([1.0, 2.0, 3.0])
        assert np.allclose(gauss_legendre_step(ZERO_F, x, 0.7), x, atol=0.0)

    def test_scalar_decay_closed_form(self):
        # y = x + h f((x + y)/2) with f = -x gives y = (1 - h/2) x / (1 + h/2)
        out = gauss_legendre_step(DECAY_F, [1.0], 0.1)
        assert out[0] == pytest.approx(19.0 / 21.0, abs=1e-12)

    def test_preserves_oscillator_energy(self):
        f = VectorField(2, lambda x: np.array([x[1], -x[0]]))
        cfg = ImplicitSolverConfig(tolerance=1e-12, max_iterations=200)
        x = np.array([0.8, -0.6])
        for _ in range(500):
            x = gauss_legendre_step(f, x, 0.1, cfg)
        assert abs(float(x @ x) - 1.0) <= 10.0 * cfg.tolerance

    def test_newton_strategy_agrees_with_fixed_point(self):
        f = VectorField(2, lambda x: np.array([x[1], -np.sin(x[0])]))
        x = np.array([0.4, 0.2])
        fp = gauss_legendre_step(f, x, 0.05, ImplicitSolverConfig(tolerance=1e-14, max_iterations=200))
        nt = gauss_legendre_step(
            f, x, 0.05, ImplicitSolverConfig(tolerance=1e-14, max_iterations=50, strategy="newton_fd")
        )
        assert np.max(np.abs(fp - nt)) <= 1e-12


class TestRkStep:
    def test_euler_tableau_matches_explicit_euler_exactly(self):
        x = np.array([0.3, 1.7, -0.2])
        via_rk = rk_step(RIGID_F, TABLEAUX["euler"], x, 0.1)
        direct = explicit_euler_step(RIGID_F, x, 0.1)
        assert np.array_equal(via_rk, direct)

    def test_midpoint_tableau_matches_gauss_legendre(self):
        cfg = ImplicitSolverConfig(tolerance=1e-14, max_iterations=200)
        x = np.array([1.0, 0.5, -0.3])
        via_rk = rk_step(RIGID_F, TABLEAUX["midpoint"], x, 0.1, cfg)
        direct = gauss_legendre_step(RIGID_F, x, 0.1, cfg)
        assert np.max(np.abs(via_rk - direct)) <= 1e-13

    def test_rk4_linear_growth_matches_quartic_taylor(self):
        h = 0.1
        out = rk_step(LINEAR_F, TABLEAUX["rk4"], [1.0], h)
        expected = 1.0 + h + h**2 / 2.0 + h**3 / 6.0 + h**4 / 24.0
        assert out[0] == pytest.approx(expected, abs=1e-16)

    @pytest.mark.parametrize("name", ["euler", "midpoint", "rk4"])
    def test_one_step_error_at_least_halves_quadratically(self, name):
        tab = TABLEAUX[name]
        e_coarse = abs(rk_step(LINEAR_F, tab, [1.0], 0.2)[0] - math.exp(0.2))
        e_fine = abs(rk_step(LINEAR_F, tab, [1.0], 0.1)[0] - math.exp(0.1))
        assert e_coarse / e_fine >= 3.5

    def test_implicit_stage_nonconvergence(self):
        with pytest.raises(ConvergenceError):
            rk_step(DECAY_F, TABLEAUX["midpoint"], [1.0], 50.0, ImplicitSolverConfig(max_iterations=20))

    def test_newton_strategy_on_implicit_tableau(self):
        cfg = ImplicitSolverConfig(tolerance=1e-13, max_iterations=50, strategy="newton_fd")
        out = rk_step(DECAY_F, TABLEAUX["midpoint"], [1.0], 0.1, cfg)
        assert out[0] == pytest.approx(19.0 / 21.0, abs=1e-12)

    def test_trapezoid_tableau_is_implicit(self):
        assert not TABLEAUX["trapezoid"].is_explicit
        assert TABLEAUX["rk4"].is_explicit


class TestTableau:
    def test_weight_sum_warning(self):
        with pytest.warns(UserWarning, match="do not sum to 1"):
            ButcherTableau(a=[[0.0]], b=[0.0])

    def test_consistent_weights_do_not_warn(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            ButcherTableau(a=[[0.5]], b=[1.0])

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            ButcherTableau(a=[[0.0, 0.0]], b=[1.0])
        with pytest.raises(ValueError):
            ButcherTableau(a=[[0.0]], b=[0.5, 0.5])


class TestSymplecticCondition:
    def test_midpoint_residual_is_exactly_zero(self):
        res = symplectic_condition_residual(TABLEAUX["midpoint"])
        assert np.array_equal(res, np.array([[0.0]]))

    def test_rk4_residual_values(self):
        res = symplectic_condition_residual(TABLEAUX["rk4"])
        assert res[0, 1] == pytest.approx(1.0 / 9.0, abs=1e-16)
        assert np.max(np.abs(res)) == pytest.approx(1.0 / 9.0, abs=1e-16)

    def test_zero_weights_give_zero_matrix(self):
        with pytest.warns(UserWarning):
            tab = ButcherTableau(a=[[0.3, 0.1], [0.2, 0.4]], b=[0.0, 0.0])
        assert np.array_equal(symplectic_condition_residual(tab), np.zeros((2, 2)))

    def test_residual_matrix_is_symmetric(self):
        rng = np.random.default_rng(3)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            tab = ButcherTableau(a=rng.uniform(-1, 1, size=(3, 3)), b=rng.uniform(-1, 1, size=3))
        res = symplectic_condition_residual(tab)
        assert np.array_equal(res, res.T)


class TestRuth:
    def test_basic_example(self):
        assert np.allclose(ruth_step([1.0, 0.0], 0.1), [1.0, -0.1], atol=0.0)

    def test_origin_is_fixed(self):
        for h in (0.01, 0.5, 2.0):
            assert np.array_equal(ruth_step([0.0, 0.0], h), np.zeros(2))

    def test_jacobian_determinant_is_one(self):
        # closed-form Jacobian [[1, h], [-h, 1 - h^2]]
        for h in np.linspace(-2.0, 2.0, 41):
            det = 1.0 * (1.0 - h * h) - h * (-h)
            assert abs(det - 1.0) <= 1e-15

    def test_energy_identity(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            x = rng.uniform(-2.0, 2.0, size=2)
            for h in (0.05, 0.3, 0.77):
                y = ruth_step(x, h)
                energy_out = 0.5 * (y[0] ** 2 + y[1] ** 2)
                predicted = (
                    (1.0 + h * h) * 0.5 * (x[0] ** 2 + x[1] ** 2)
                    + h * h * (h * h / 2.0 - 1.0) * x[1] ** 2
                    + h**3 * x[0] * x[1]
                )
                assert abs(energy_out - predicted) <= 1e-12


class TestSolverConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ImplicitSolverConfig(tolerance=0.0)
        with pytest.raises(ValueError):
            ImplicitSolverConfig(tolerance=2.0)
        with pytest.raises(ValueError):
            ImplicitSolverConfig(max_iterations=0)
        with pytest.raises(ValueError):
            ImplicitSolverConfig(strategy="bisection")
