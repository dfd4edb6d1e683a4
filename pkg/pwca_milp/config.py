"""
Configuration module for pwca-milp
"""
import os
from typing import Dict, Any, Optional, Tuple
from dataclasses import dataclass, field

from .exceptions import ConfigurationError

SEED_ENV_VAR = 'PWCA_SEED'
DEFAULT_SEED = 20210906


def default_seed(environ: Optional[Dict[str, str]] = None) -> int:
    """
    Seed used when the caller does not pass one

    Args:
        environ: Mapping to read PWCA_SEED from (uses os.environ if None)
    """
    environ = os.environ if environ is None else environ
    raw = environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == '':
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


@dataclass
class OptimizerOptions:
    """Nelder-Mead search options"""
    max_iterations: Optional[int] = None  # None -> 200 * parameter count
    x_tolerance: float = 1e-6
    f_tolerance: float = 1e-9
    restarts: int = 1  # Nelder-Mead passes, each restarted from the incumbent
    initial_step: float = 0.05  # relative simplex size, absolute for zero coordinates
    seed: Optional[int] = None

    def validate(self) -> 'OptimizerOptions':
        if self.x_tolerance <= 0 or self.f_tolerance <= 0:
            raise ConfigurationError("Optimizer tolerances must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be >= 1")
        if self.restarts < 1:
            raise ConfigurationError("restarts must be >= 1")
        if self.initial_step <= 0:
            raise ConfigurationError("initial_step must be positive")
        return self

    def iterations_for(self, n_params: int) -> int:
        """Iteration budget for a search over n_params variables"""
        if self.max_iterations is not None:
            return self.max_iterations
        return 200 * max(n_params, 1)


@dataclass
class FitConfig:
    """Options shared by the convex and piecewise-convex fitters"""
    optimizer: OptimizerOptions = field(default_factory=lambda: OptimizerOptions(restarts=3))
    penalty_scale: float = 1e-6  # weight = penalty_scale * N_data * (y-range)^2
    max_refits: int = 2
    domination_grid: int = 50
    band_width: float = 0.1  # fraction of the domain diameter
    vertical_interface: bool = False  # a_n = 0, keeps the MILP translation exact

    # Interface sweep
    sweep_shifts: Tuple[float, ...] = (0.25, 0.5, 0.75)
    sweep_iterations_per_param: int = 40
    workers: int = 1

    def validate(self) -> 'FitConfig':
        self.optimizer.validate()
        if self.penalty_scale < 0:
            raise ConfigurationError("penalty_scale must be >= 0")
        if self.max_refits < 0:
            raise ConfigurationError("max_refits must be >= 0")
        if self.domination_grid < 2:
            raise ConfigurationError("domination_grid must be >= 2")
        if not 0 < self.band_width:
            raise ConfigurationError("band_width must be positive")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        return self


@dataclass
class SolverConfig:
    """LP / branch-and-bound options"""
    time_limit: Optional[float] = None  # seconds
    gap_tolerance: float = 1e-6  # absolute
    integrality_tolerance: float = 1e-6
    feasibility_tolerance: float = 1e-9
    optimality_tolerance: float = 1e-9
    max_lp_iterations: int = 50000
    refactor_interval: int = 64
    lp_backend: str = 'simplex'  # 'simplex' or 'highs'

    def validate(self) -> 'SolverConfig':
        if self.gap_tolerance < 0:
            raise ConfigurationError("gap_tolerance must be >= 0")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ConfigurationError("time_limit must be positive")
        if self.lp_backend not in ('simplex', 'highs'):
            raise ConfigurationError(f"Unknown lp_backend: {self.lp_backend}")
        return self


@dataclass
class BenchmarkConfig:
    """Performance benchmark options"""
    sizes: Tuple[int, ...] = (1, 10, 30, 100, 300)
    repeats: int = 10
    seed: int = DEFAULT_SEED
    time_budget: float = 60.0  # seconds per row; larger N skipped once exceeded
    solve_time_limit: Optional[float] = None
    parallel: bool = False

    def validate(self) -> 'BenchmarkConfig':
        if self.repeats < 1:
            raise ConfigurationError("repeats must be >= 1")
        if any(n < 1 for n in self.sizes):
            raise ConfigurationError("replication counts must be >= 1")
        if list(self.sizes) != sorted(self.sizes):
            raise ConfigurationError("replication counts must be ascending")
        return self

    @classmethod
    def from_env(cls, environ: Optional[Dict[str, str]] = None, **overrides: Any):
        """
        Create config with the seed taken from PWCA_SEED

        Args:
            environ: Mapping to read from (uses os.environ if None)
            **overrides: Field values that take precedence
        """
        values: Dict[str, Any] = {'seed': default_seed(environ)}
        values.update(overrides)
        return cls(**values)


@dataclass
class FitResult:
    """Result of a fitting run"""
    model: Any
    rmse: float
    sse: float = 0.0
    penalty: float = 0.0
    converged: bool = False
    evaluations: int = 0
    refits: int = 0
    duration_seconds: float = 0.0
    stats: Dict[str, Any] = field(default_factory=dict)

    def __iter__(self):
        # unpacks as (model, rmse)
        return iter((self.model, self.rmse))

    def __str__(self):
        state = "converged" if self.converged else "not converged"
        return (f"Fit {state}: rmse={self.rmse:.6g} "
                f"({self.evaluations} evaluations, {self.duration_seconds:.2f}s)")
