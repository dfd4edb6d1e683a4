"""
Benchmarks and the command-line front end
"""
from .experiments import (
    BenchmarkCase, BenchmarkRecord, SweepRecord, accuracy_sweep, benchmark_cases,
    benchmark_problem, fit_benchmark_models, generate_multiplication_dataset,
    performance_benchmark, random_queries, write_records
)

__all__ = [
    'BenchmarkCase',
    'BenchmarkRecord',
    'SweepRecord',
    'accuracy_sweep',
    'benchmark_cases',
    'benchmark_problem',
    'fit_benchmark_models',
    'generate_multiplication_dataset',
    'performance_benchmark',
    'random_queries',
    'write_records',
]
