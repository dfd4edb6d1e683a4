"""
Best-bound branch and bound over binary variables
"""
import heapq
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import SolverConfig
from ..milp.problem import MilpProblem
from .simplex import (
    FAILURE, INFEASIBLE, OPTIMAL, UNBOUNDED, LpSolution, StandardForm, solve_form
)

TIME_LIMIT = 'time-limit'

Overrides = Tuple[Tuple[int, float], ...]


@dataclass
class MilpSolution:
    """Result of a branch-and-bound solve"""
    status: str
    objective: float = math.nan
    values: Dict[str, float] = field(default_factory=dict)
    node_count: int = 0
    wall_time: float = 0.0
    best_bound: float = math.nan
    gap: float = math.nan
    message: str = ''

    @property
    def has_solution(self) -> bool:
        return bool(self.values)

    def __str__(self):
        if self.has_solution:
            return (f"{self.status}: objective={self.objective:.10g} gap={self.gap:.3g} "
                    f"({self.node_count} nodes, {self.wall_time * 1000:.1f} ms)")
        return f"{self.status}: {self.message} ({self.node_count} nodes)"


class BranchAndBound:
    """
    Node selection is best-bound (ties by creation order), branching picks
    the most fractional binary (ties by lowest index). Nodes are stored as
    bound overrides on the root problem's standard form.
    """

    def __init__(self, problem: MilpProblem, config: Optional[SolverConfig] = None,
                 logger: Optional[logging.Logger] = None):
        self.problem = problem
        self.config = (config or SolverConfig()).validate()
        self.logger = logger or logging.getLogger(__name__)
        self.form = StandardForm.from_problem(problem)
        self.binaries = np.flatnonzero(self.form.binary)

    def _bounds(self, overrides: Overrides) -> Tuple[np.ndarray, np.ndarray]:
        lower = self.form.lower.copy()
        upper = self.form.upper.copy()
        for index, value in overrides:
            lower[index] = upper[index] = value
        return lower, upper

    def _relax(self, overrides: Overrides) -> LpSolution:
        lower, upper = self._bounds(overrides)
        return solve_form(self.form, self.config, lower, upper, self.logger)

    def _branch_index(self, x: np.ndarray) -> int:
        """Most fractional binary, or -1 when all are integral"""
        if self.binaries.size == 0:
            return -1
        values = x[self.binaries]
        fractionality = np.abs(values - np.round(values))
        best = int(np.argmax(fractionality))
        if fractionality[best] <= self.config.integrality_tolerance:
            return -1
        return int(self.binaries[best])

    def _internal(self, solution: LpSolution) -> float:
        return float(self.form.c @ solution.x)

    def _finish(self, status: str, incumbent: Optional[LpSolution], bound: float,
                nodes: int, started: float, message: str = '') -> MilpSolution:
        sign = self.form.sign
        if incumbent is None:
            return MilpSolution(status, node_count=nodes, wall_time=time.perf_counter() - started,
                                best_bound=sign * bound, message=message)
        value = self._internal(incumbent)
        values = dict(incumbent.values)
        for index in self.binaries:
            name = self.form.names[index]
            values[name] = float(round(values[name]))
        gap = max(value - bound, 0.0) if math.isfinite(bound) else math.inf
        return MilpSolution(
            status, sign * value, values, nodes, time.perf_counter() - started,
            sign * bound, gap, message,
        )

    def solve(self) -> MilpSolution:
        config = self.config
        started = time.perf_counter()
        deadline = None if config.time_limit is None else started + config.time_limit

        root = self._relax(())
        nodes = 1
        if root.status == INFEASIBLE:
            return self._finish(INFEASIBLE, None, math.inf, nodes, started, root.message)
        if root.status == UNBOUNDED:
            return self._finish(UNBOUNDED, None, -math.inf, nodes, started, root.message)
        if root.status != OPTIMAL:
            return self._finish(FAILURE, None, -math.inf, nodes, started, root.message)

        incumbent: Optional[LpSolution] = None
        incumbent_value = math.inf
        # parent bounds of subtrees whose relaxation could not be solved
        unresolved: List[float] = []
        last_failure = ''
        counter = 0
        queue: List[Tuple[float, int, Overrides, Optional[LpSolution]]] = [
            (self._internal(root), counter, (), root)
        ]

        while queue:
            bound = queue[0][0]
            if bound >= incumbent_value - config.gap_tolerance:
                queue.clear()
                break
            if deadline is not None and time.perf_counter() > deadline:
                self.logger.info(f"Time limit reached after {nodes} nodes")
                return self._finish(TIME_LIMIT, incumbent, min([bound] + unresolved), nodes,
                                    started, "time limit reached")

            parent_value, _, overrides, relaxation = heapq.heappop(queue)
            if relaxation is None:
                relaxation = self._relax(overrides)
                nodes += 1
                if relaxation.status == INFEASIBLE:
                    continue
                if relaxation.status != OPTIMAL:
                    self.logger.warning(f"Node relaxation ended with status {relaxation.status}: "
                                        f"{relaxation.message}")
                    unresolved.append(parent_value)
                    last_failure = relaxation.message
                    continue
            value = self._internal(relaxation)
            if value >= incumbent_value - config.gap_tolerance:
                continue

            index = self._branch_index(relaxation.x)
            if index < 0:
                candidate = self._polish(relaxation)
                if candidate.status == FAILURE:
                    unresolved.append(value)
                    last_failure = candidate.message
                elif candidate.is_optimal and self._internal(candidate) < incumbent_value:
                    incumbent = candidate
                    incumbent_value = self._internal(candidate)
                    self.logger.debug(f"New incumbent {incumbent_value:.10g} at node {nodes}")
                continue

            for branch in (0.0, 1.0):
                counter += 1
                heapq.heappush(queue, (value, counter, overrides + ((index, branch),), None))

        open_bound = incumbent_value if not queue else queue[0][0]
        failed = [b for b in unresolved if b < incumbent_value - config.gap_tolerance]
        if failed:
            message = (f"{len(failed)} node relaxation(s) failed, optimality not proven: "
                       f"{last_failure}")
            self.logger.warning(message)
            return self._finish(FAILURE, incumbent, min([open_bound] + failed), nodes, started,
                                message)
        if incumbent is None:
            return self._finish(INFEASIBLE, None, math.inf, nodes, started,
                                "no integer feasible point")
        return self._finish(OPTIMAL, incumbent, open_bound, nodes, started)

    def _polish(self, relaxation: LpSolution) -> LpSolution:
        """Re-solve with every binary fixed to its rounded value"""
        if self.binaries.size == 0:
            return relaxation
        rounded = tuple((int(i), float(round(relaxation.x[i]))) for i in self.binaries)
        solution = self._relax(rounded)
        if not solution.is_optimal:
            self.logger.debug(f"Rounded relaxation not solved ({solution.status})")
        return solution


def solve_milp(problem: MilpProblem, config: Optional[SolverConfig] = None,
               logger: Optional[logging.Logger] = None) -> MilpSolution:
    """
    Solve a MILP by branch and bound on its binaries

    Returns:
        MilpSolution with status optimal, infeasible, unbounded, time-limit or failure
    """
    return BranchAndBound(problem, config, logger).solve()
