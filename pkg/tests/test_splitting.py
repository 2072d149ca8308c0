import math

import numpy as np
import pytest

from poisint import rigidbody, verify
from poisint.rigidbody import RigidBodyParams
from poisint.splitting import (
    ExactFlow,
    SplitScheme,
    composition_coefficients,
    composition_step_count,
    lie_trotter_step,
    strang_application_count,
    strang_step,
    yoshida_step,
)

PARAMS = RigidBodyParams(2.0, 1.0)
SCHEME = rigidbody.split_scheme(PARAMS)


def rotation_flow():
    """Planar rotation, an exact flow we can compare compositions against."""

    def advance(x, t):
        c, s = math.cos(t), math.sin(t)
        return np.array([c * x[0] - s * x[1], s * x[0] + c * x[1]])

    return ExactFlow(2, advance)


class TestSchemeValidation:
    def test_empty_scheme_rejected(self):
        with pytest.raises(ValueError):
            SplitScheme(flows=())

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValueError):
            SplitScheme(flows=(rotation_flow(), ExactFlow(3, lambda x, t: x)))

    def test_dimension_property(self):
        assert SCHEME.dimension == 3


class TestLieTrotter:
    def test_single_flow_is_exact(self):
        flow = rotation_flow()
        scheme = SplitScheme(flows=(flow,))
        x = np.array([1.0, 0.5])
        assert np.array_equal(lie_trotter_step(scheme, x, 0.3), flow.advance(x, 0.3))

    def test_symmetry_axis_is_fixed(self):
        for h in (0.01, 0.3, 2.0):
            assert np.array_equal(lie_trotter_step(SCHEME, [0.0, 0.0, 1.0], h), [0.0, 0.0, 1.0])

    def test_norm_preserved(self):
        out = lie_trotter_step(SCHEME, [1.0, 0.0, 1.0], 0.01)
        assert abs(float(out @ out) - 2.0) <= 1e-14

    def test_identity_at_h_zero(self):
        x = np.array([0.3, -0.6, 1.1])
        assert np.array_equal(lie_trotter_step(SCHEME, x, 0.0), x)

    def test_is_poisson_map(self):
        system = rigidbody.poisson_system(PARAMS)
        rng = np.random.default_rng(101)
        states = verify.sample_states(rng, 20, 3, radius_range=(0.5, 2.0))
        worst = max(
            verify.poisson_residual(system, lambda x, hh: lie_trotter_step(SCHEME, x, hh), x, h)
            for x in states
            for h in (0.1, 0.01)
        )
        assert worst <= 1e-6

    def test_energy_not_conserved(self):
        x = np.array([1.0, 1.0, 1.0])
        h0 = rigidbody.hamiltonian(PARAMS, x)
        worst = 0.0
        for _ in range(1000):
            x = lie_trotter_step(SCHEME, x, 0.1)
            worst = max(worst, abs(rigidbody.hamiltonian(PARAMS, x) - h0))
        assert worst > 1e-6


class TestStrang:
    def test_single_flow_is_exact(self):
        flow = rotation_flow()
        scheme = SplitScheme(flows=(flow,))
        x = np.array([0.2, -1.0])
        assert np.array_equal(strang_step(scheme, x, 0.4), flow.advance(x, 0.4))

    def test_time_reversibility(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            x = rng.uniform(-1.5, 1.5, size=3)
            back = strang_step(SCHEME, strang_step(SCHEME, x, 0.3), -0.3)
            assert np.max(np.abs(back - x)) <= 1e-12

    def test_norm_preserved(self):
        out = strang_step(SCHEME, [1.0, 0.0, 1.0], 0.7)
        assert abs(float(out @ out) - 2.0) <= 1e-14

    def test_identity_at_h_zero(self):
        x = np.array([0.5, 0.4, -0.1])
        assert np.array_equal(strang_step(SCHEME, x, 0.0), x)


class TestCompositionCoefficients:
    def test_level_one_values(self):
        c = composition_coefficients(1)
        assert c.x0 == pytest.approx(-1.7024143839193153, abs=1e-12)
        assert c.x1 == pytest.approx(1.3512071919596578, abs=1e-12)

    def test_level_two_value(self):
        # 1 / (2 - 2**(1/5)), checked against 40-digit decimal arithmetic
        c = composition_coefficients(2)
        assert c.x1 == pytest.approx(1.1746717580893634, abs=1e-12)

    def test_weights_sum_to_one(self):
        for n in range(1, 7):
            c = composition_coefficients(n)
            assert abs(c.x0 + 2.0 * c.x1 - 1.0) <= 1e-14

    def test_rejects_nonpositive_level(self):
        with pytest.raises(ValueError):
            composition_coefficients(0)


class TestStepCounts:
    @pytest.mark.parametrize("n,expected", [(1, 2), (2, 4), (3, 10), (4, 28)])
    def test_step_count(self, n, expected):
        assert composition_step_count(n) == expected

    @pytest.mark.parametrize("n,expected", [(1, 1), (2, 3), (3, 9), (4, 27)])
    def test_strang_applications(self, n, expected):
        assert strang_application_count(n) == expected


class TestYoshida:
    def test_rejects_bad_orders(self):
        x = np.array([1.0, 0.0, 1.0])
        for order in (2, 3, 5, 7):
            with pytest.raises(ValueError):
                yoshida_step(SCHEME, x, 0.1, order=order)

    def test_warns_above_order_eight(self):
        with pytest.warns(UserWarning, match="order-10"):
            yoshida_step(SCHEME, [1.0, 0.0, 1.0], 0.1, order=10)

    def test_single_flow_recovers_exact_advance(self):
        flow = rotation_flow()
        scheme = SplitScheme(flows=(flow,))
        x = np.array([0.8, -0.3])
        out = yoshida_step(scheme, x, 0.25, order=4)
        assert np.max(np.abs(out - flow.advance(x, 0.25))) <= 1e-12

    def test_norm_preserved(self):
        out = yoshida_step(SCHEME, [1.0, 0.0, 1.0], 0.2, order=4)
        assert abs(float(out @ out) - 2.0) <= 1e-13

    def test_identity_at_h_zero(self):
        x = np.array([1.0, -0.2, 0.4])
        assert np.array_equal(yoshida_step(SCHEME, x, 0.0, order=4), x)

    def test_casimir_preserved_over_many_steps(self):
        samples = rigidbody.evolve(PARAMS, [1.0, 0.0, 1.0], 0.05, 10_000, method="yoshida4")
        casimirs = 0.5 * np.einsum("ij,ij->i", samples, samples)
        assert np.max(np.abs(casimirs - casimirs[0])) <= 1e-13

    def test_order_six_beats_order_four(self):
        oracle = lambda x0, T: rigidbody.exact_solution(PARAMS, x0, T)
        x0 = np.array([1.0, 0.0, 1.0])
        est4 = verify.convergence_order(
            rigidbody.one_step_map(PARAMS, "yoshida4"), oracle, x0, 1.0, [0.5, 0.25, 0.125]
        )
        est6 = verify.convergence_order(
            rigidbody.one_step_map(PARAMS, "yoshida6"), oracle, x0, 1.0, [0.5, 0.25, 0.125]
        )
        assert est6.slope > est4.slope + 1.0
        assert est6.errors[-1] < est4.errors[-1]


class TestOrderHierarchy:
    def test_measured_slopes(self):
        oracle = lambda x0, T: rigidbody.exact_solution(PARAMS, x0, T)
        x0 = np.array([1.0, 0.0, 1.0])
        hs = [0.1, 0.05, 0.025, 0.0125]
        slope_lt = verify.convergence_order(rigidbody.one_step_map(PARAMS, "lie_trotter"), oracle, x0, 1.0, hs).slope
        slope_st = verify.convergence_order(rigidbody.one_step_map(PARAMS, "strang"), oracle, x0, 1.0, hs).slope
        slope_y4 = verify.convergence_order(rigidbody.one_step_map(PARAMS, "yoshida4"), oracle, x0, 1.0, hs).slope
        assert abs(slope_lt - 1.0) <= 0.15
        assert abs(slope_st - 2.0) <= 0.15
        assert abs(slope_y4 - 4.0) <= 0.25
