"""
MILP problems, model translations and the LP text format
"""

from .problem import (
    EQ, GE, LE, MAXIMIZE, MINIMIZE, Constraint, ConstraintBlock, MilpProblem, VarNames,
    Variable, copy_names, fix_variables, replicate
)
from .big_m import BigMSet, big_m_values, dataset_translation_box, translation_box
from .translate import translate_convex, translate_pwca
from .simplex_formulations import CC, FORMULATIONS, LOG, MC, translate_simplex
from .lp_format import LpTextBuilder, export_lp, parse_lp, read_lp

__all__ = [
    'EQ', 'GE', 'LE', 'MINIMIZE', 'MAXIMIZE',
    'Variable', 'Constraint', 'ConstraintBlock', 'MilpProblem', 'VarNames',
    'replicate', 'copy_names', 'fix_variables',
    'BigMSet', 'big_m_values', 'translation_box', 'dataset_translation_box',
    'translate_pwca', 'translate_convex',
    'CC', 'MC', 'LOG', 'FORMULATIONS', 'translate_simplex',
    'LpTextBuilder', 'export_lp', 'parse_lp', 'read_lp',
]
