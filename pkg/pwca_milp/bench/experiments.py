"""
Accuracy and performance experiments on the multiplication benchmark
"""
import logging
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..config import BenchmarkConfig, FitConfig, FitResult, SolverConfig
from ..core.convex_fit import CONVEX, ConvexModel, fit_convex
from ..core.dataset import Box, Dataset, grid_points
from ..core.pwca import PwcaModel, extend_pairs, fit_pwca
from ..core.triangulation import (
    J1, LEAST_SQUARES, Triangulation, build_grid_triangulation, fit_vertex_values,
    triangulation_rmse
)
from ..exceptions import ParameterError, PwcaError
from ..milp.big_m import translation_box
from ..milp.problem import (
    MINIMIZE, ConstraintBlock, MilpProblem, copy_names, fix_variables, replicate
)
from ..milp.simplex_formulations import FORMULATIONS, translate_simplex
from ..milp.translate import translate_convex, translate_pwca
from ..solver.branch_and_bound import MilpSolution, solve_milp
from ..solver.simplex import OPTIMAL

UNIT_BOX = Box(np.zeros(2), np.ones(2))

CONVEX_KIND = 'convex'
PWCA_KIND = 'pwca'
SIMPLEX_KIND = 'simplex'

OK = 'ok'
FAILED = 'failed'
SKIPPED = 'skipped'

Model = Union[ConvexModel, PwcaModel, Triangulation]


def generate_multiplication_dataset(grid_size: int = 100) -> Dataset:
    """
    y = x1 * x2 sampled on a grid_size x grid_size grid over [0, 1]^2

    Points are row-major (x1 outer, x2 inner), endpoints included.
    """
    if grid_size < 2:
        raise ParameterError(f"grid_size must be >= 2, got {grid_size}")
    x = grid_points(UNIT_BOX, grid_size)
    return Dataset(x, x[:, 0] * x[:, 1], UNIT_BOX)


def random_queries(count: int, box: Box = UNIT_BOX, seed: Optional[int] = None) -> np.ndarray:
    """`count` points drawn uniformly from the box with numpy's PCG64 generator"""
    rng = np.random.default_rng(seed)
    return rng.uniform(box.lower, box.upper, size=(count, box.dimension))


def query_seed(seed: int, count: int) -> int:
    """Seed of the query points of one replication count"""
    return int(np.random.SeedSequence([seed, count]).generate_state(1)[0])


@dataclass
class SweepRecord:
    """One cell of the accuracy sweep"""
    model_kind: str
    planes: int
    rmse: float = math.nan
    best_seed: Optional[int] = None
    seeds: int = 0
    status: str = OK
    error_message: Optional[str] = None
    duration_seconds: float = 0.0

    def __str__(self):
        if self.status != OK:
            return f"{self.model_kind} {self.planes} planes: {self.status} ({self.error_message})"
        return f"{self.model_kind} {self.planes} planes: rmse={self.rmse:.6g}"


@dataclass
class BenchmarkRecord:
    """One (model, formulation, N) row of the performance benchmark"""
    model_kind: str
    formulation: str
    n: int
    repeats: int
    rmse: float
    binaries: int = 0
    continuous: int = 0
    constraints: int = 0
    seed: int = 0
    status: str = OPTIMAL
    objective: float = math.nan
    max_error: float = math.nan
    node_count: int = 0
    error_message: Optional[str] = None
    median_ms: float = math.nan

    def __str__(self):
        return (f"{self.model_kind}/{self.formulation} N={self.n}: {self.status}, "
                f"median {self.median_ms:.2f} ms over {self.repeats} solves")


def records_frame(records: Sequence) -> pd.DataFrame:
    """Records as a DataFrame with columns in field order"""
    if not records:
        return pd.DataFrame()
    columns = [f.name for f in fields(records[0])]
    return pd.DataFrame([asdict(r) for r in records], columns=columns)


def write_records(records: Sequence, path: str, drop_timing: bool = False) -> str:
    frame = records_frame(records)
    if drop_timing:
        frame = frame.drop(columns=[c for c in ('median_ms', 'duration_seconds') if c in frame])
    frame.to_csv(path, index=False, float_format='%.17g')
    return path


def _fit_cell(kind: str, data: Dataset, planes: int, seed: int, init, config: FitConfig,
              logger: logging.Logger) -> FitResult:
    if kind == CONVEX_KIND:
        return fit_convex(data, planes, CONVEX, config, seed=seed, init=init, logger=logger)
    return fit_pwca(data, planes, init=init, config=config, seed=seed, logger=logger)


def accuracy_sweep(data: Dataset, plane_counts: Iterable[int], seeds: Sequence[int],
                   kinds: Sequence[str] = (CONVEX_KIND, PWCA_KIND),
                   config: Optional[FitConfig] = None,
                   logger: Optional[logging.Logger] = None) -> List[SweepRecord]:
    """
    Best-of-seeds rmse for every model kind and plane count

    Plane counts run in ascending order; besides the fresh fits, each cell
    also fits from the previous cell's best model (extra planes duplicated),
    so rmse does not grow with the plane count. Odd counts are skipped for
    piecewise-convex models; failing fits are recorded, not raised.
    """
    logger = logger or logging.getLogger(__name__)
    config = (config or FitConfig()).validate()
    records: List[SweepRecord] = []

    for kind in kinds:
        if kind not in (CONVEX_KIND, PWCA_KIND):
            raise ParameterError(f"Unknown model kind {kind!r}")
        previous = None
        for planes in sorted(set(plane_counts)):
            if kind == PWCA_KIND and (planes < 2 or planes % 2):
                records.append(SweepRecord(kind, planes, status=SKIPPED,
                                           error_message="piecewise models need an even count"))
                continue

            start_time = time.time()
            best: Optional[FitResult] = None
            best_seed = None
            errors = []
            starts = [(seed, None) for seed in seeds]
            if previous is not None:
                warm = previous.model if kind == CONVEX_KIND else extend_pairs(
                    previous.model.params, planes)
                starts.append((seeds[0] if seeds else None, warm))

            for seed, init in starts:
                try:
                    result = _fit_cell(kind, data, planes, seed, init, config, logger)
                except PwcaError as e:
                    logger.warning(f"{kind} fit with {planes} planes, seed {seed} failed: {e}")
                    errors.append(str(e))
                    continue
                if best is None or result.rmse < best.rmse:
                    best, best_seed = result, seed

            if best is None:
                logger.error(f"All {kind} fits with {planes} planes failed")
                records.append(SweepRecord(kind, planes, seeds=len(starts), status=FAILED,
                                           error_message='; '.join(errors),
                                           duration_seconds=time.time() - start_time))
                continue
            previous = best
            record = SweepRecord(kind, planes, best.rmse, best_seed, len(starts),
                                 duration_seconds=time.time() - start_time)
            logger.info(str(record))
            records.append(record)
    return records


@dataclass
class BenchmarkCase:
    """A model translated once; copies of `block` are replicated per query point"""
    model_kind: str
    formulation: str
    model: Model
    block: ConstraintBlock
    rmse: float = math.nan

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.model.predict(x)


def benchmark_cases(pwca_model: Optional[PwcaModel] = None,
                    triangulation: Optional[Triangulation] = None,
                    formulations: Sequence[str] = FORMULATIONS,
                    convex_model: Optional[ConvexModel] = None,
                    data: Optional[Dataset] = None,
                    x_box: Box = UNIT_BOX,
                    solver_config: Optional[SolverConfig] = None) -> List[BenchmarkCase]:
    """Translate the benchmark models once (minimization, default names)"""
    y_values = None if data is None else data.y
    cases = []
    if pwca_model is not None:
        box = translation_box(pwca_model, x_box, y_values)
        block = translate_pwca(pwca_model, box, sense=MINIMIZE, config=solver_config)
        rmse = data.rmse(pwca_model.predict(data.x)) if data is not None else math.nan
        cases.append(BenchmarkCase(PWCA_KIND, 'big-M', pwca_model, block, rmse))
    if convex_model is not None:
        box = translation_box(convex_model, x_box, y_values)
        block = translate_convex(convex_model, MINIMIZE, box)
        rmse = data.rmse(convex_model.predict(data.x)) if data is not None else math.nan
        cases.append(BenchmarkCase(CONVEX_KIND, 'direct', convex_model, block, rmse))
    if triangulation is not None:
        rmse = triangulation_rmse(triangulation, data) if data is not None else math.nan
        box = translation_box(triangulation, x_box, y_values)
        for formulation in formulations:
            block = translate_simplex(triangulation, formulation, sense=MINIMIZE,
                                      y_bounds=(float(box.lower[-1]), float(box.upper[-1])))
            cases.append(BenchmarkCase(SIMPLEX_KIND, formulation, triangulation, block, rmse))
    return cases


def benchmark_problem(block: ConstraintBlock, queries: np.ndarray,
                      name: str = 'benchmark') -> MilpProblem:
    """
    min sum(y_k) over N copies of `block`, copy k fixed at queries[k]
    """
    count = len(queries)
    problem = replicate(block, count, name)
    objective: Dict[str, float] = {}
    for names, point in zip(copy_names(block.names, count), queries):
        fix_variables(problem, dict(zip(names.inputs, point.tolist())))
        objective[names.output] = 1.0
    problem.set_objective(objective, MINIMIZE)
    return problem


def _run_row(case: BenchmarkCase, queries: np.ndarray, repeats: int, seed: int,
             solver_config: SolverConfig, logger: logging.Logger) -> BenchmarkRecord:
    count = len(queries)
    record = BenchmarkRecord(case.model_kind, case.formulation, count, repeats, case.rmse,
                             seed=seed)
    try:
        problem = benchmark_problem(case.block, queries)
        record.binaries = problem.n_binaries
        record.continuous = problem.n_continuous
        record.constraints = problem.n_constraints

        timings = []
        solution: Optional[MilpSolution] = None
        for _ in range(repeats):
            # timed around the solve only
            started = time.perf_counter()
            solution = solve_milp(problem, solver_config, logger)
            timings.append(time.perf_counter() - started)
        record.median_ms = 1000.0 * statistics.median(timings)
        record.status = solution.status
        record.node_count = solution.node_count
        if solution.has_solution:
            record.objective = solution.objective
            names = copy_names(case.block.names, count)
            solved = np.array([solution.values[n.output] for n in names])
            record.max_error = float(np.max(np.abs(solved - case.evaluate(queries))))
        if solution.status != OPTIMAL:
            logger.warning(f"{record}: {solution.message}")
    except Exception as e:
        logger.error(f"Benchmark row {case.model_kind}/{case.formulation} N={count} failed",
                     exc_info=True)
        record.status = FAILED
        record.error_message = str(e)
    return record


def performance_benchmark(cases: Sequence[BenchmarkCase],
                          config: Optional[BenchmarkConfig] = None,
                          solver_config: Optional[SolverConfig] = None,
                          logger: Optional[logging.Logger] = None) -> List[BenchmarkRecord]:
    """
    Median solve times of replicated problems for every case and N

    All cases see the same query points for a given N. Once a case's median
    exceeds config.time_budget, its larger N are recorded as skipped.
    With config.parallel the replication counts run in a thread pool;
    individual solves are never split.
    """
    config = (config or BenchmarkConfig()).validate()
    solver_config = solver_config or SolverConfig(time_limit=config.solve_time_limit)
    logger = logger or logging.getLogger(__name__)

    def run_size(count: int, skip: Callable[[BenchmarkCase], bool]) -> List[BenchmarkRecord]:
        queries = random_queries(count, UNIT_BOX, query_seed(config.seed, count))
        rows = []
        for case in cases:
            if skip(case):
                rows.append(BenchmarkRecord(case.model_kind, case.formulation, count,
                                            config.repeats, case.rmse, seed=config.seed,
                                            status=SKIPPED,
                                            error_message="time budget exceeded"))
                continue
            row = _run_row(case, queries, config.repeats, config.seed, solver_config, logger)
            logger.info(str(row))
            rows.append(row)
        return rows

    if config.parallel:
        with ThreadPoolExecutor() as pool:
            batches = list(pool.map(lambda n: run_size(n, lambda case: False), config.sizes))
        return [row for batch in batches for row in batch]

    over_budget = set()
    records: List[BenchmarkRecord] = []
    for count in config.sizes:
        rows = run_size(count, lambda case: id(case) in over_budget)
        for case, row in zip(cases, rows):
            if row.status != SKIPPED and (row.median_ms / 1000.0 > config.time_budget
                                          or row.status == FAILED):
                logger.warning(f"{case.model_kind}/{case.formulation} stops at N={count}")
                over_budget.add(id(case))
        records.extend(rows)
    return records


def fit_benchmark_models(data: Dataset, pwca_planes: int = 4, segments: Sequence[int] = (2, 2),
                         seeds: Sequence[int] = (0,), config: Optional[FitConfig] = None,
                         logger: Optional[logging.Logger] = None):
    """
    Best-of-seeds piecewise-convex model and a least-squares J1 triangulation

    The piecewise model is always fitted with a vertical interface, whatever
    `config` says: its MILP block must reproduce predict() at every query.

    Returns:
        (pwca FitResult, triangulation with vertex values)
    """
    logger = logger or logging.getLogger(__name__)
    config = replace(config or FitConfig(), vertical_interface=True)
    best = None
    for seed in seeds:
        result = fit_pwca(data, pwca_planes, config=config, seed=seed, logger=logger)
        if best is None or result.rmse < best.rmse:
            best = result
    tri = fit_vertex_values(build_grid_triangulation(data.x_box, segments, J1), data,
                            LEAST_SQUARES, logger=logger)
    logger.info(f"Benchmark models: pwca rmse {best.rmse:.6g}, "
                f"simplex rmse {triangulation_rmse(tri, data):.6g}")
    return best, tri
