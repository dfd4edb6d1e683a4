"""
pwca-milp

Piecewise-convex approximation of sampled data and its translation into
mixed-integer linear programs.

Features:
- Convex (max of planes) and concave (min of planes) fits
- Piecewise-convex fits: two convex pieces split by an interface hyperplane
- Grid triangulations with CC, MC and Log simplex formulations
- Big-M translations of every model, replication and LP-file export
- A bounded revised simplex and a best-bound branch-and-bound solver
- Accuracy and performance benchmarks on y = x1 * x2

Quick Start:
    from pwca_milp import Dataset, fit_pwca, translate_pwca, dataset_translation_box

    result = fit_pwca(data, 4, seed=0)
    block = translate_pwca(result.model, dataset_translation_box(result.model, data))

Command line:
    pwca-milp gen-data --grid 100 --out d.csv
    pwca-milp fit-pwca --data d.csv --planes 4 --out m.pwca
"""

__version__ = '0.3.0'
__author__ = 'pwca-milp contributors'

# Core components
from .core import (
    Box,
    Dataset,
    ConvexModel,
    PwcaModel,
    RotationParams,
    Triangulation,
    build_grid_triangulation,
    evaluate_convex,
    evaluate_pwca,
    evaluate_simplex,
    fit_convex,
    fit_pwca,
    fit_vertex_values,
    load_model,
    save_model,
)

# Configuration
from .config import BenchmarkConfig, FitConfig, FitResult, OptimizerOptions, SolverConfig

# MILP translation
from .milp import (
    MilpProblem,
    dataset_translation_box,
    export_lp,
    read_lp,
    replicate,
    translate_convex,
    translate_pwca,
    translate_simplex,
)

# Solvers
from .solver import solve_lp, solve_milp

# Filters
from .filters import BoxFilter, InterfaceBandFilter, PointFilter

# Exporters
from .exporters import ArtifactExporter, LocalFileExporter, S3Exporter

# Exceptions
from .exceptions import (
    PwcaError,
    ConfigurationError,
    DataFormatError,
    ExportError,
    FitError,
    FormulationError,
    GeometryError,
    SolverError,
    TranslationError,
    TriangulationError,
)

__all__ = [
    # Core
    'Box',
    'Dataset',
    'ConvexModel',
    'PwcaModel',
    'RotationParams',
    'Triangulation',
    'build_grid_triangulation',
    'evaluate_convex',
    'evaluate_pwca',
    'evaluate_simplex',
    'fit_convex',
    'fit_pwca',
    'fit_vertex_values',
    'load_model',
    'save_model',

    # Config
    'BenchmarkConfig',
    'FitConfig',
    'FitResult',
    'OptimizerOptions',
    'SolverConfig',

    # MILP
    'MilpProblem',
    'dataset_translation_box',
    'export_lp',
    'read_lp',
    'replicate',
    'translate_convex',
    'translate_pwca',
    'translate_simplex',

    # Solvers
    'solve_lp',
    'solve_milp',

    # Filters
    'PointFilter',
    'InterfaceBandFilter',
    'BoxFilter',

    # Exporters
    'ArtifactExporter',
    'LocalFileExporter',
    'S3Exporter',

    # Exceptions
    'PwcaError',
    'ConfigurationError',
    'DataFormatError',
    'ExportError',
    'FitError',
    'FormulationError',
    'GeometryError',
    'SolverError',
    'TranslationError',
    'TriangulationError',
]
