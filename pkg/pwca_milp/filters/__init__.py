"""
Filter system for sample selection
"""
from .base import PointFilter
from .common_filters import BoxFilter, InterfaceBandFilter, crop_filter

__all__ = [
    'PointFilter',
    'InterfaceBandFilter',
    'BoxFilter',
    'crop_filter',
]
