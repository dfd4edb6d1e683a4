import numpy as np
import pytest

from pwca_milp.config import SolverConfig
from pwca_milp.milp.problem import EQ, LE, MAXIMIZE, MINIMIZE, Constraint, MilpProblem, Variable
from pwca_milp.solver import (
    FAILURE, INFEASIBLE, OPTIMAL, TIME_LIMIT, LpSolution, branch_and_bound, simplex, solve_lp,
    solve_milp
)


@pytest.fixture
def knapsack():
    """Best packing is {a, b} with value 9"""
    problem = MilpProblem(name='knapsack')
    for name in ('a', 'b', 'c'):
        problem.add_variable(Variable(name, binary=True))
    weights = [(2.0, 3.0, 1.0, 5.0), (4.0, 1.0, 2.0, 11.0), (3.0, 4.0, 2.0, 8.0)]
    for i, (wa, wb, wc, cap) in enumerate(weights, start=1):
        problem.add_constraint(Constraint(f"cap{i}", {'a': wa, 'b': wb, 'c': wc}, LE, cap))
    problem.set_objective({'a': 5.0, 'b': 4.0, 'c': 3.0}, MAXIMIZE)
    return problem


class TestBranchAndBound:
    @pytest.mark.parametrize('backend', ['simplex', 'highs'])
    def test_knapsack(self, knapsack, backend):
        solution = solve_milp(knapsack, SolverConfig(lp_backend=backend))
        assert solution.status == OPTIMAL
        assert solution.objective == pytest.approx(9.0)
        assert solution.values == {'a': 1.0, 'b': 1.0, 'c': 0.0}
        assert solution.gap == pytest.approx(0.0, abs=1e-6)
        assert solution.has_solution

    def test_relaxation_is_a_bound(self, knapsack):
        assert solve_lp(knapsack).objective >= solve_milp(knapsack).objective - 1e-9

    def test_pure_lp(self):
        problem = MilpProblem(name='lp')
        problem.add_variable(Variable('x', 0.0, 2.0))
        problem.add_constraint(Constraint('c', {'x': 1.0}, LE, 1.5))
        problem.set_objective({'x': 1.0}, MAXIMIZE)
        solution = solve_milp(problem)
        assert solution.objective == pytest.approx(1.5)
        assert solution.node_count == 1

    def test_no_integer_point(self):
        problem = MilpProblem(name='half')
        problem.add_variable(Variable('a', binary=True))
        problem.add_variable(Variable('b', binary=True))
        problem.add_constraint(Constraint('c', {'a': 1.0, 'b': 1.0}, EQ, 1.5))
        problem.set_objective({'a': 1.0}, MINIMIZE)
        solution = solve_milp(problem)
        assert solution.status == INFEASIBLE
        assert not solution.has_solution
        assert solution.node_count > 1

    def test_infeasible_root(self):
        problem = MilpProblem(name='empty')
        problem.add_variable(Variable('a', binary=True))
        problem.add_constraint(Constraint('c', {'a': 1.0}, EQ, 2.0))
        solution = solve_milp(problem)
        assert solution.status == INFEASIBLE
        assert solution.node_count == 1

    def test_time_limit(self, knapsack):
        solution = solve_milp(knapsack, SolverConfig(time_limit=1e-9))
        assert solution.status == TIME_LIMIT
        assert 'time limit' in solution.message

    def test_uses_given_logger(self, knapsack, mocker):
        logger = mocker.Mock()
        solve_milp(knapsack, SolverConfig(), logger)
        assert logger.debug.called


class TestFailedRelaxations:
    @pytest.fixture
    def pair(self):
        """max 3a + 2b with 2a + 2b <= 3; the optimum is a = 1, b = 0 with value 3"""
        problem = MilpProblem(name='pair')
        problem.add_variable(Variable('a', binary=True))
        problem.add_variable(Variable('b', binary=True))
        problem.add_constraint(Constraint('cap', {'a': 2.0, 'b': 2.0}, LE, 3.0))
        problem.set_objective({'a': 3.0, 'b': 2.0}, MAXIMIZE)
        return problem

    def test_reference_optimum(self, pair):
        solution = solve_milp(pair)
        assert solution.status == OPTIMAL
        assert solution.objective == pytest.approx(3.0)

    def test_dropped_subtree_is_not_optimal(self, pair, mocker):
        def b_fixed_at_zero_fails(form, config, lower, upper, logger):
            if upper[form.names.index('b')] == 0.0:
                return LpSolution(FAILURE, message='numerical trouble')
            return simplex.solve_form(form, config, lower, upper, logger)

        mocker.patch.object(branch_and_bound, 'solve_form', side_effect=b_fixed_at_zero_fails)
        solution = solve_milp(pair)
        assert solution.status == FAILURE
        assert solution.objective == pytest.approx(2.0)
        assert solution.best_bound == pytest.approx(4.0)
        assert solution.gap == pytest.approx(2.0)
        assert 'numerical trouble' in solution.message

    def test_no_incumbent_is_failure_not_infeasible(self, pair, mocker):
        def children_fail(form, config, lower, upper, logger):
            if np.any(lower[form.binary] == upper[form.binary]):
                return LpSolution(FAILURE, message='numerical trouble')
            return simplex.solve_form(form, config, lower, upper, logger)

        mocker.patch.object(branch_and_bound, 'solve_form', side_effect=children_fail)
        solution = solve_milp(pair)
        assert solution.status == FAILURE
        assert not solution.has_solution
