import numpy as np
import pytest

from pwca_milp.core.dataset import Box
from pwca_milp.core.triangulation import DIAGONAL, J1, UNION_JACK, build_grid_triangulation
from pwca_milp.exceptions import FormulationError, TranslationError
from pwca_milp.milp.problem import MAXIMIZE, MINIMIZE, MilpProblem, fix_variables
from pwca_milp.milp.simplex_formulations import (
    CC, LOG, MC, check_formulation, gray_code, sos2_branching_sets, translate_simplex
)
from pwca_milp.solver import OPTIMAL, solve_milp


def with_product_values(tri):
    return tri.with_values(tri.vertices[:, 0] * tri.vertices[:, 1])


@pytest.fixture
def j1_grid(unit_box):
    return with_product_values(build_grid_triangulation(unit_box, (2, 2), J1))


class TestGrayCode:
    def test_neighbours_differ_in_one_bit(self):
        codes = [gray_code(i, 3) for i in range(8)]
        assert len(set(codes)) == 8
        for a, b in zip(codes, codes[1:]):
            assert sum(x != y for x, y in zip(a, b)) == 1

    def test_values(self):
        assert gray_code(2, 2) == (1, 1)
        assert gray_code(3, 2) == (1, 0)


class TestBranchingSets:
    def test_two_segments(self):
        assert sos2_branching_sets(2) == [([2], [0])]

    def test_four_segments(self):
        assert sos2_branching_sets(4) == [([3, 4], [0, 1]), ([2], [0, 4])]

    def test_single_segment(self):
        assert sos2_branching_sets(1) == []


class TestCheckFormulation:
    @pytest.mark.parametrize('given,expected', [('cc', CC), ('Mc', MC), ('LOG', LOG)])
    def test_case_insensitive(self, given, expected):
        assert check_formulation(given) == expected

    def test_unknown(self):
        with pytest.raises(FormulationError):
            check_formulation('SOS2')


class TestCounts:
    @pytest.mark.parametrize('formulation,expected', [
        (CC, (8, 9, 13)),
        (MC, (8, 16, 28)),
        (LOG, (3, 9, 10)),
    ])
    def test_two_by_two_j1(self, j1_grid, formulation, expected):
        counts = translate_simplex(j1_grid, formulation).counts()
        assert (counts['binaries'], counts['continuous'], counts['constraints']) == expected

    def test_log_one_dimensional(self):
        tri = build_grid_triangulation(Box([0.0], [1.0]), (4,))
        tri = tri.with_values(tri.vertices[:, 0] ** 2)
        counts = translate_simplex(tri, LOG).counts()
        assert counts == {'binaries': 2, 'continuous': 5, 'constraints': 7}


class TestValidation:
    @pytest.mark.parametrize('scheme', [DIAGONAL, UNION_JACK])
    def test_log_needs_j1(self, unit_box, scheme):
        tri = with_product_values(build_grid_triangulation(unit_box, (2, 2), scheme))
        with pytest.raises(FormulationError):
            translate_simplex(tri, LOG)

    @pytest.mark.parametrize('scheme', [DIAGONAL, UNION_JACK])
    def test_other_formulations_accept_any_scheme(self, unit_box, scheme):
        tri = with_product_values(build_grid_triangulation(unit_box, (2, 2), scheme))
        assert translate_simplex(tri, CC).n_binaries == tri.n_simplices

    def test_needs_values(self, unit_box):
        with pytest.raises(TranslationError):
            translate_simplex(build_grid_triangulation(unit_box, (2, 2), J1), CC)

    def test_y_bounds(self, j1_grid):
        block = translate_simplex(j1_grid, CC, y_bounds=(-2.0, 3.0))
        y = next(v for v in block.variables if v.name == 'y')
        assert (y.lower, y.upper) == (-2.0, 3.0)


class TestOptimum:
    @pytest.mark.parametrize('formulation', [CC, MC, LOG])
    @pytest.mark.parametrize('sense', [MINIMIZE, MAXIMIZE])
    @pytest.mark.parametrize('point', [(0.3, 0.7), (0.8, 0.1), (0.25, 0.25)])
    def test_equals_interpolant(self, j1_grid, formulation, sense, point):
        problem = fix_variables(MilpProblem.from_block(translate_simplex(j1_grid, formulation,
                                                                         sense=sense)),
                                {'x1': point[0], 'x2': point[1]})
        problem.set_objective({'y': 1.0}, sense)
        solution = solve_milp(problem)
        assert solution.status == OPTIMAL
        expected = float(j1_grid.predict(np.array([point]))[0])
        assert solution.objective == pytest.approx(expected, abs=1e-7)
