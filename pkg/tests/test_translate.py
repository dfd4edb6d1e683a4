import numpy as np
import pytest

from pwca_milp.bench.experiments import benchmark_problem, random_queries
from pwca_milp.core.convex_fit import ConvexModel, plane_from_slopes
from pwca_milp.core.dataset import Box
from pwca_milp.core.geometry import Hyperplane
from pwca_milp.core.pwca import PwcaModel, fit_pwca
from pwca_milp.exceptions import TranslationError
from pwca_milp.milp import translate
from pwca_milp.milp.big_m import dataset_translation_box
from pwca_milp.milp.problem import (
    MAXIMIZE, MINIMIZE, MilpProblem, VarNames, fix_variables, replicate
)
from pwca_milp.milp.translate import region_toggle, translate_convex, translate_pwca
from pwca_milp.solver import OPTIMAL, solve_milp


@pytest.fixture
def convex_model():
    lower = (plane_from_slopes(0.0, [1.0]), plane_from_slopes(0.3, [0.0]))
    upper = (plane_from_slopes(1.0, [-1.0]), plane_from_slopes(0.1, [0.0]))
    return PwcaModel(lower, upper, Hyperplane([-0.5, 1.0, 0.0]))


@pytest.fixture
def concave_model(convex_model):
    return convex_model.mirrored()


def box_for(model):
    if model.orientation == 'convex':
        return Box([0.0, -0.1], [1.0, 1.1])
    return Box([0.0, -1.1], [1.0, 0.1])


def solve_at(block, x, sense):
    problem = fix_variables(MilpProblem.from_block(block), {'x1': x})
    problem.set_objective({'y': 1.0}, sense)
    return solve_milp(problem)


class TestPwcaBlocks:
    def test_pure_counts(self, convex_model):
        block = translate_pwca(convex_model, box_for(convex_model), sense=MINIMIZE)
        assert block.kind == 'pwca'
        assert block.counts() == {'binaries': 1, 'continuous': 0, 'constraints': 6}
        assert [c.name for c in block.constraints] == [
            'ifc_up', 'ifc_lo', 'lo1', 'lo2', 'up1', 'up2'
        ]

    def test_selection_counts(self, convex_model):
        block = translate_pwca(convex_model, box_for(convex_model), sense=MAXIMIZE)
        assert block.kind == 'pwca-selection'
        assert block.counts() == {'binaries': 3, 'continuous': 0, 'constraints': 7}

    def test_tilted_interface_is_reported(self, convex_model, mocker):
        logger = mocker.patch.object(translate, 'logger')
        translate_pwca(convex_model, box_for(convex_model))
        logger.warning.assert_not_called()
        tilted = PwcaModel(convex_model.lower, convex_model.upper,
                           Hyperplane([-0.5, 1.0, 0.2]))
        translate_pwca(tilted, box_for(tilted))
        logger.warning.assert_called_once()

    def test_concave_swaps_roles(self, concave_model):
        assert translate_pwca(concave_model, box_for(concave_model), sense=MAXIMIZE).kind == 'pwca'
        assert translate_pwca(concave_model, box_for(concave_model),
                              sense=MINIMIZE).kind == 'pwca-selection'

    def test_custom_names(self, convex_model):
        names = VarNames(('a',), 'out', 'm_')
        block = translate_pwca(convex_model, box_for(convex_model), names)
        assert [v.name for v in block.variables] == ['a', 'out', 'm_t']

    def test_name_count_mismatch(self, convex_model):
        with pytest.raises(TranslationError):
            translate_pwca(convex_model, box_for(convex_model), VarNames.default(2))

    @pytest.mark.parametrize('model_name', ['convex_model', 'concave_model'])
    @pytest.mark.parametrize('sense', [MINIMIZE, MAXIMIZE])
    @pytest.mark.parametrize('x', [0.2, 0.8])
    def test_optimum_is_model_value(self, request, model_name, sense, x):
        model = request.getfixturevalue(model_name)
        block = translate_pwca(model, box_for(model), sense=sense)
        solution = solve_at(block, x, sense)
        assert solution.status == OPTIMAL
        assert solution.objective == pytest.approx(float(model.predict([[x]])[0]), abs=1e-7)

    @pytest.mark.parametrize('x', [0.2, 0.8])
    def test_toggle_follows_region(self, convex_model, x):
        block = translate_pwca(convex_model, box_for(convex_model))
        solution = solve_at(block, x, MINIMIZE)
        assert solution.values['t'] == pytest.approx(region_toggle(convex_model, [x]))

    def test_replicated_copies_are_independent(self, convex_model):
        block = translate_pwca(convex_model, box_for(convex_model))
        problem = fix_variables(replicate(block, 2), {'x1_1': 0.2, 'x1_2': 0.8})
        problem.set_objective({'y_1': 1.0, 'y_2': 1.0}, MINIMIZE)
        solution = solve_milp(problem)
        assert solution.objective == pytest.approx(0.5, abs=1e-7)


class TestRegionToggle:
    def test_sides(self, convex_model):
        assert region_toggle(convex_model, [0.2]) == 0.0
        assert region_toggle(convex_model, [0.8]) == 1.0


class TestConvexBlocks:
    @pytest.fixture
    def tent(self):
        return ConvexModel((plane_from_slopes(0.0, [1.0]), plane_from_slopes(1.0, [-1.0])))

    def test_pure(self, tent):
        block = translate_convex(tent, MINIMIZE, Box([0.0, -0.1], [1.0, 1.1]))
        assert block.counts() == {'binaries': 0, 'continuous': 0, 'constraints': 2}

    def test_selection(self, tent):
        block = translate_convex(tent, MAXIMIZE, Box([0.0, -0.1], [1.0, 1.1]))
        assert block.counts() == {'binaries': 2, 'continuous': 0, 'constraints': 3}

    @pytest.mark.parametrize('sense', [MINIMIZE, MAXIMIZE])
    def test_optimum_is_model_value(self, tent, sense):
        block = translate_convex(tent, sense, Box([0.0, -0.1], [1.0, 1.1]))
        solution = solve_at(block, 0.2, sense)
        assert solution.objective == pytest.approx(0.8, abs=1e-7)


@pytest.mark.slow
class TestFittedModel:
    @pytest.fixture
    def fitted(self, product_data, fast_config):
        fast_config.vertical_interface = True
        return fit_pwca(product_data, 4, config=fast_config, seed=0).model

    @pytest.fixture
    def block(self, fitted, product_data):
        return translate_pwca(fitted, dataset_translation_box(fitted, product_data))

    def test_true_toggle_satisfies_rows(self, fitted, block, product_data):
        problem = MilpProblem.from_block(block)
        estimates = fitted.predict(product_data.x)
        for x, y in zip(product_data.x, estimates):
            values = {'x1': x[0], 'x2': x[1], 'y': y, 't': region_toggle(fitted, x)}
            assert problem.max_violation(values) < 1e-7

    def test_no_point_above_the_model_is_cut_off(self, fitted, block):
        rng = np.random.default_rng(5)
        problem = MilpProblem.from_block(block)
        y_max = problem.variable('y').upper
        x = rng.uniform(0.0, 1.0, size=(10000, 2))
        lowest = fitted.predict(x)
        y = lowest + rng.uniform(0.0, 1.0, size=lowest.size) * (y_max - lowest)
        _, upper = fitted.predict_with_side(x)
        worst = max(
            problem.max_violation({'x1': p[0], 'x2': p[1], 'y': v, 't': float(side)})
            for p, v, side in zip(x, y, upper)
        )
        assert worst < 1e-7

    def test_minimum_matches_evaluator(self, fitted, block):
        queries = random_queries(20, seed=8)
        solution = solve_milp(benchmark_problem(block, queries))
        solved = [solution.values[f"y_{k}"] for k in range(1, 21)]
        assert solved == pytest.approx(fitted.predict(queries).tolist(), abs=1e-6)
