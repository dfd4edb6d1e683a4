"""
Command-line front end

Exit status: 0 on success (also when a solve reports infeasible), 2 on
usage errors, 3 on malformed input files, 1 on any other failure.
"""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from .. import __version__
from ..config import BenchmarkConfig, FitConfig, SolverConfig, default_seed
from ..core.convex_fit import CONCAVE, CONVEX, ConvexModel, fit_convex
from ..core.dataset import Box, Dataset
from ..core.model_io import load_model, save_model
from ..core.pwca import PwcaModel, fit_pwca
from ..core.triangulation import (
    FIT_MODES, J1, LEAST_SQUARES, SCHEMES, Triangulation, build_grid_triangulation,
    fit_vertex_values, triangulation_rmse
)
from ..exceptions import ConfigurationError, DataFormatError, PwcaError
from ..exporters import ArtifactExporter, LocalFileExporter, S3Exporter
from ..filters import crop_filter
from ..milp.big_m import translation_box
from ..milp.lp_format import export_lp, read_lp
from ..milp.problem import MINIMIZE, SENSES, copy_names, replicate
from ..milp.simplex_formulations import FORMULATIONS, LOG, translate_simplex
from ..milp.translate import translate_convex, translate_pwca
from ..solver.branch_and_bound import solve_milp
from .experiments import (
    accuracy_sweep, benchmark_cases, benchmark_problem, fit_benchmark_models,
    generate_multiplication_dataset, performance_benchmark, random_queries, write_records
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DATA = 3

logger = logging.getLogger('pwca_milp.cli')


def _exporters(args) -> List[ArtifactExporter]:
    exporters: List[ArtifactExporter] = []
    if args.archive_dir:
        exporters.append(LocalFileExporter(args.archive_dir))
    if args.s3_bucket:
        exporters.append(S3Exporter(args.s3_bucket, prefix=args.s3_prefix or ''))
    return exporters


def _ship(args, path: str, **metadata: Any):
    """Hand a written artifact to the configured exporters"""
    info: Dict[str, Any] = {'command': args.command, 'seed': args.seed, 'version': __version__}
    info.update(metadata)
    for exporter in _exporters(args):
        location = exporter.export(path, info)
        logger.info(f"{path} exported to {location}")


def _fit_config(args) -> FitConfig:
    config = FitConfig()
    if getattr(args, 'workers', None):
        config.workers = args.workers
    config.vertical_interface = getattr(args, 'vertical_interface', False)
    return config


def _seeds(args) -> List[int]:
    return [args.seed + k for k in range(max(args.seeds, 1))]


def _load_data(path: str) -> Dataset:
    return Dataset.from_csv(path)


def _fit_data(args) -> Dataset:
    data = _load_data(args.data)
    if args.crop_lower is None and args.crop_upper is None:
        return data
    crop = crop_filter(args.crop_lower, args.crop_upper, data)
    cropped = crop.apply(data)
    logger.info(f"{crop} keeps {cropped.size} of {data.size} points")
    return Dataset(cropped.x, cropped.y)


def cmd_gen_data(args) -> int:
    data = generate_multiplication_dataset(args.grid)
    data.to_csv(args.out)
    print(f"wrote {data.size} points to {args.out}")
    _ship(args, args.out, grid=args.grid)
    return EXIT_OK


def _best_fit(fit, seeds: Sequence[int]):
    best = None
    for seed in seeds:
        result = fit(seed)
        if best is None or result.rmse < best.rmse:
            best = result
    return best


def cmd_fit_convex(args) -> int:
    data = _fit_data(args)
    config = _fit_config(args)
    result = _best_fit(lambda seed: fit_convex(data, args.planes, args.orientation, config,
                                               seed=seed), _seeds(args))
    save_model(result.model, args.out, domain=data.box)
    print(f"{result.model}: rmse={result.rmse:.10g}")
    _ship(args, args.out, rmse=result.rmse, planes=args.planes)
    return EXIT_OK


def cmd_fit_pwca(args) -> int:
    data = _fit_data(args)
    config = _fit_config(args)
    result = _best_fit(lambda seed: fit_pwca(data, args.planes, orientation=args.orientation,
                                             config=config, seed=seed), _seeds(args))
    save_model(result.model, args.out, domain=data.box)
    print(f"{result.model}: rmse={result.rmse:.10g}")
    _ship(args, args.out, rmse=result.rmse, planes=args.planes)
    return EXIT_OK


def cmd_fit_simplex(args) -> int:
    data = _fit_data(args)
    segments = args.segments if len(args.segments) == data.n_inputs \
        else args.segments[:1] * data.n_inputs
    tri = build_grid_triangulation(data.x_box, segments, args.scheme)
    tri = fit_vertex_values(tri, data, args.mode)
    rmse = triangulation_rmse(tri, data)
    save_model(tri, args.out, domain=data.box)
    print(f"{tri}: rmse={rmse:.10g}")
    _ship(args, args.out, rmse=rmse)
    return EXIT_OK


def _model_block(stored, args):
    """(x box, constraint block) of a stored model"""
    model = stored.model
    domain: Optional[Box] = stored.domain
    if isinstance(model, Triangulation):
        x_box = model.box
    elif domain is None:
        raise DataFormatError(f"{args.model} carries no domain lines")
    else:
        x_box = Box(domain.lower[:-1], domain.upper[:-1])
    y_values = None if domain is None else [domain.lower[-1], domain.upper[-1]]
    box = translation_box(model, x_box, y_values)

    if isinstance(model, PwcaModel):
        return x_box, translate_pwca(model, box, sense=args.sense)
    if isinstance(model, ConvexModel):
        return x_box, translate_convex(model, args.sense, box)
    y_bounds = (float(box.lower[-1]), float(box.upper[-1]))
    return x_box, translate_simplex(model, args.formulation, sense=args.sense, y_bounds=y_bounds)


def cmd_translate(args) -> int:
    x_box, block = _model_block(load_model(args.model), args)
    if args.queries:
        queries = random_queries(args.queries, x_box, args.seed)
        problem = benchmark_problem(block, queries, name='queries')
        problem.set_objective(problem.objective, args.sense)
    else:
        problem = replicate(block, args.replicate, name='replicated')
        outputs = [names.output for names in copy_names(block.names, args.replicate)]
        problem.set_objective({y: 1.0 for y in outputs}, args.sense)
    export_lp(problem, args.out)
    print(f"{block.kind} x{max(args.queries, args.replicate)}: {problem.n_binaries} binaries, "
          f"{problem.n_continuous} continuous, {problem.n_constraints} rows -> {args.out}")
    _ship(args, args.out, model=args.model)
    return EXIT_OK


def cmd_solve(args) -> int:
    problem = read_lp(args.lp)
    config = SolverConfig(time_limit=args.time_limit, lp_backend=args.backend).validate()
    solution = solve_milp(problem, config)
    print(f"status: {solution.status}")
    print(f"objective: {solution.objective:.17g}")
    print(f"nodes: {solution.node_count}")
    print(f"time_ms: {solution.wall_time * 1000:.3f}")
    if args.out and solution.has_solution:
        frame = pd.DataFrame({'variable': list(solution.values),
                              'value': list(solution.values.values())})
        frame.to_csv(args.out, index=False, float_format='%.17g')
        _ship(args, args.out, lp=args.lp, status=solution.status)
    return EXIT_OK


def _bench_data(args) -> Dataset:
    return _load_data(args.data) if args.data else generate_multiplication_dataset(args.grid)


def cmd_bench_accuracy(args) -> int:
    data = _bench_data(args)
    records = accuracy_sweep(data, args.planes, _seeds(args), config=_fit_config(args))
    write_records(records, args.out)
    for record in records:
        print(record)
    _ship(args, args.out)
    return EXIT_OK


def cmd_bench_perf(args) -> int:
    data = _bench_data(args)
    pwca_model, tri = None, None
    if args.pwca_model:
        pwca_model = load_model(args.pwca_model).model
    if args.simplex_model:
        tri = load_model(args.simplex_model).model
    if pwca_model is None or tri is None:
        fitted, fitted_tri = fit_benchmark_models(data, seeds=_seeds(args),
                                                  config=_fit_config(args))
        pwca_model = pwca_model or fitted.model
        tri = tri or fitted_tri
    if not isinstance(pwca_model, PwcaModel):
        raise DataFormatError(f"{args.pwca_model} does not hold a piecewise-convex model")

    config = BenchmarkConfig(
        sizes=tuple(args.sizes), repeats=args.repeats, seed=args.seed,
        time_budget=args.time_budget, solve_time_limit=args.time_limit, parallel=args.parallel,
    ).validate()
    cases = benchmark_cases(pwca_model, tri, args.formulations, data=data)
    records = performance_benchmark(cases, config)
    write_records(records, args.out)
    for record in records:
        print(record)
    _ship(args, args.out)
    return EXIT_OK


def _add_crop_options(parser: argparse.ArgumentParser):
    parser.add_argument('--crop-lower', type=float, nargs='+', default=None,
                        help='fit only samples with x >= these bounds')
    parser.add_argument('--crop-upper', type=float, nargs='+', default=None,
                        help='fit only samples with x <= these bounds')


def _add_seed_options(parser: argparse.ArgumentParser):
    parser.add_argument('--seeds', type=int, default=1,
                        help='number of seeds tried (seed, seed+1, ...); best result kept')
    parser.add_argument('--workers', type=int, default=None,
                        help='threads for the interface sweep')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pwca-milp',
        description='Piecewise-convex approximation of data and MILP translation',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument('--seed', type=int, default=None,
                        help='random seed (default: $PWCA_SEED or a fixed value)')
    parser.add_argument('--archive-dir', default=None, help='copy written files here')
    parser.add_argument('--s3-bucket', default=None, help='upload written files to this bucket')
    parser.add_argument('--s3-prefix', default='', help='key prefix for --s3-bucket')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('gen-data', help='sample y = x1 * x2 on a grid')
    p.add_argument('--grid', type=int, default=100)
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_gen_data)

    p = sub.add_parser('fit-convex', help='fit a max (min) of hyperplanes')
    p.add_argument('--data', required=True)
    p.add_argument('--planes', type=int, required=True)
    p.add_argument('--orientation', choices=[CONVEX, CONCAVE], default=CONVEX)
    p.add_argument('--out', required=True)
    _add_seed_options(p)
    _add_crop_options(p)
    p.set_defaults(handler=cmd_fit_convex)

    p = sub.add_parser('fit-pwca', help='fit a piecewise-convex model')
    p.add_argument('--data', required=True)
    p.add_argument('--planes', type=int, required=True)
    p.add_argument('--orientation', choices=[CONVEX, CONCAVE], default=CONVEX)
    p.add_argument('--vertical-interface', action='store_true',
                   help='keep the interface independent of y (exact MILP translation)')
    p.add_argument('--out', required=True)
    _add_seed_options(p)
    _add_crop_options(p)
    p.set_defaults(handler=cmd_fit_pwca)

    p = sub.add_parser('fit-simplex', help='fit a grid triangulation')
    p.add_argument('--data', required=True)
    p.add_argument('--segments', type=int, nargs='+', default=[2])
    p.add_argument('--scheme', choices=SCHEMES, default=J1)
    p.add_argument('--mode', choices=FIT_MODES, default=LEAST_SQUARES)
    p.add_argument('--out', required=True)
    _add_crop_options(p)
    p.set_defaults(handler=cmd_fit_simplex)

    p = sub.add_parser('translate', help='write the MILP of a model as an LP file')
    p.add_argument('--model', required=True)
    p.add_argument('--replicate', type=int, default=1)
    p.add_argument('--queries', type=int, default=0,
                   help='replicate and fix x at this many random points')
    p.add_argument('--formulation', choices=FORMULATIONS, default=LOG)
    p.add_argument('--sense', choices=SENSES, default=MINIMIZE)
    p.add_argument('--out', required=True)
    p.set_defaults(handler=cmd_translate)

    p = sub.add_parser('solve', help='solve an LP file by branch and bound')
    p.add_argument('--lp', required=True)
    p.add_argument('--time-limit', type=float, default=None)
    p.add_argument('--backend', choices=['simplex', 'highs'], default='simplex')
    p.add_argument('--out', default=None, help='CSV of variable values')
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser('bench-accuracy', help='rmse against plane count')
    p.add_argument('--data', default=None)
    p.add_argument('--grid', type=int, default=100)
    p.add_argument('--planes', type=int, nargs='+', default=[1, 2, 4, 6, 8, 10])
    p.add_argument('--out', required=True)
    _add_seed_options(p)
    p.set_defaults(handler=cmd_bench_accuracy, seeds=5)

    p = sub.add_parser('bench-perf', help='solve time of replicated problems')
    p.add_argument('--data', default=None)
    p.add_argument('--grid', type=int, default=100)
    p.add_argument('--pwca-model', default=None)
    p.add_argument('--simplex-model', default=None)
    p.add_argument('--formulations', nargs='+', choices=FORMULATIONS, default=list(FORMULATIONS))
    p.add_argument('--sizes', type=int, nargs='+', default=[1, 10, 30, 100, 300])
    p.add_argument('--repeats', type=int, default=10)
    p.add_argument('--time-budget', type=float, default=60.0)
    p.add_argument('--time-limit', type=float, default=None)
    p.add_argument('--parallel', action='store_true')
    p.add_argument('--out', required=True)
    _add_seed_options(p)
    p.set_defaults(handler=cmd_bench_perf)
    return parser


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one subcommand

    Returns:
        Exit status (0 success, 1 failure, 2 usage error, 3 malformed input)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(level=getattr(logging, args.log_level), stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        if args.seed is None:
            args.seed = default_seed()
        return args.handler(args)
    except (DataFormatError, FileNotFoundError) as e:
        print(f"pwca-milp: malformed input: {e}", file=sys.stderr)
        return EXIT_DATA
    except ConfigurationError as e:
        print(f"pwca-milp: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PwcaError as e:
        print(f"pwca-milp: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except Exception as e:
        logger.error("Unexpected failure", exc_info=True)
        print(f"pwca-milp: {e}", file=sys.stderr)
        return EXIT_FAILURE


def main():
    sys.exit(cli_dispatch())
