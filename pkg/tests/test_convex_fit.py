import numpy as np
import pytest

from pwca_milp.core.convex_fit import (
    CONCAVE, CONVEX, ConvexFitter, ConvexModel, evaluate_convex, fit_convex,
    plane_from_slopes, plane_value
)
from pwca_milp.core.dataset import Dataset
from pwca_milp.core.geometry import Hyperplane
from pwca_milp.exceptions import DegeneratePlaneError, ParameterError, UnderdeterminedError


@pytest.fixture
def v_model():
    return ConvexModel((plane_from_slopes(0.0, [-1.0]), plane_from_slopes(0.0, [1.0])))


class TestPlaneValue:
    def test_single_point(self):
        plane = plane_from_slopes(0.5, [2.0, -1.0])
        assert plane_value(plane, np.array([1.0, 1.0])) == pytest.approx(1.5)

    def test_array(self):
        plane = plane_from_slopes(1.0, [1.0])
        assert np.allclose(plane_value(plane, np.array([[0.0], [2.0]])), [1.0, 3.0])

    def test_vertical(self):
        with pytest.raises(DegeneratePlaneError):
            plane_value(Hyperplane(np.array([0.0, 1.0, 0.0])), np.array([0.0]))


class TestConvexModel:
    def test_predict_max(self, v_model):
        assert np.allclose(v_model.predict(np.array([[-2.0], [0.0], [3.0]])), [2.0, 0.0, 3.0])

    def test_evaluate_single_point(self, v_model):
        assert evaluate_convex(v_model, np.array([-0.5])) == pytest.approx(0.5)

    def test_mirrored_is_concave_of_negation(self, v_model):
        mirrored = v_model.mirrored()
        x = np.linspace(-1, 1, 7).reshape(-1, 1)
        assert mirrored.orientation == CONCAVE
        assert np.allclose(mirrored.predict(x), -v_model.predict(x))

    def test_planes_need_positive_y_coefficient(self):
        with pytest.raises(ParameterError):
            ConvexModel((Hyperplane(np.array([0.0, 1.0, -1.0])),))

    def test_active_counts(self, v_model):
        counts = v_model.active_counts(np.array([[-1.0], [-0.5], [1.0]]))
        assert counts.tolist() == [2, 1]


class TestFitConvex:
    def test_recovers_abs(self, abs_data, tight_config):
        result = fit_convex(abs_data, 2, config=tight_config, seed=0)
        assert result.rmse < 1e-3
        assert result.model.orientation == CONVEX

    def test_default_penalty_stays_below_one_percent(self, product_data):
        result = fit_convex(product_data, 2, seed=0)
        assert result.penalty < 0.01 * result.sse

    def test_recovers_abs_with_default_penalty(self, abs_data):
        result = fit_convex(abs_data, 2, seed=0)
        assert result.rmse < 1e-3

    def test_concave_fit_of_negated_abs(self, abs_data, tight_config):
        data = Dataset(abs_data.x, -abs_data.y)
        result = fit_convex(data, 2, CONCAVE, config=tight_config, seed=0)
        assert result.model.orientation == CONCAVE
        assert result.rmse < 1e-3

    def test_more_planes_fit_better(self, parabola_data, fast_config):
        one = fit_convex(parabola_data, 1, config=fast_config, seed=0)
        four = fit_convex(parabola_data, 4, config=fast_config, seed=0)
        assert four.rmse < one.rmse

    def test_single_plane_is_least_squares(self, parabola_data, tight_config):
        result = fit_convex(parabola_data, 1, config=tight_config, seed=0)
        # best constant fit of x^2 on a symmetric grid is its mean
        assert result.rmse == pytest.approx(np.std(parabola_data.y), rel=1e-4)

    def test_result_unpacks(self, abs_data, fast_config):
        model, rmse = fit_convex(abs_data, 2, config=fast_config, seed=0)
        assert isinstance(model, ConvexModel)
        assert rmse >= 0

    def test_underdetermined(self):
        data = Dataset(np.array([[0.0], [1.0], [2.0]]), np.array([0.0, 1.0, 4.0]))
        with pytest.raises(UnderdeterminedError):
            fit_convex(data, 2)

    def test_bad_orientation(self, abs_data):
        with pytest.raises(ParameterError):
            fit_convex(abs_data, 2, 'wavy')

    def test_warm_start(self, parabola_data, fast_config):
        coarse = fit_convex(parabola_data, 2, config=fast_config, seed=0)
        refined = fit_convex(parabola_data, 3, config=fast_config, seed=0, init=coarse.model)
        assert refined.model.n_hyp == 3
        assert refined.rmse < coarse.rmse * 1.01

    def test_warm_start_too_many_planes(self, parabola_data, fast_config):
        coarse = fit_convex(parabola_data, 3, config=fast_config, seed=0)
        with pytest.raises(ParameterError):
            fit_convex(parabola_data, 2, config=fast_config, init=coarse.model)

    def test_same_seed_same_result(self, parabola_data, fast_config):
        first = fit_convex(parabola_data, 3, config=fast_config, seed=7)
        second = fit_convex(parabola_data, 3, config=fast_config, seed=7)
        assert first.rmse == second.rmse


class TestDominatedPlanes:
    def test_duplicate_plane_is_dominated(self, parabola_data):
        fitter = ConvexFitter(parabola_data, 2)
        params = np.array([[0.0, 1.0], [0.0, 1.0]])
        assert fitter.dominated_planes(params).tolist() == [0, 1]

    def test_distinct_planes_both_win(self, parabola_data):
        fitter = ConvexFitter(parabola_data, 2)
        params = np.array([[0.0, 1.0], [0.0, -1.0]])
        assert fitter.dominated_planes(params).size == 0
