"""
Core modelling components
"""
from .dataset import Box, Dataset
from .convex_fit import ConvexModel, evaluate_convex, fit_convex, plane_value
from .pwca import (
    PwcaModel, RotationParams, default_interface_sweep, evaluate_pwca, fit_pwca, initial_guess
)
from .triangulation import (
    Triangulation, build_grid_triangulation, evaluate_simplex, fit_vertex_values
)
from .model_io import StoredModel, load_model, save_model

__all__ = [
    'Box',
    'Dataset',
    'ConvexModel',
    'evaluate_convex',
    'fit_convex',
    'plane_value',
    'PwcaModel',
    'RotationParams',
    'default_interface_sweep',
    'evaluate_pwca',
    'fit_pwca',
    'initial_guess',
    'Triangulation',
    'build_grid_triangulation',
    'evaluate_simplex',
    'fit_vertex_values',
    'StoredModel',
    'load_model',
    'save_model',
]
