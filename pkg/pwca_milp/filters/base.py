"""
Base filter interface
"""
from abc import ABC, abstractmethod

import numpy as np

from ..core.dataset import Dataset


class PointFilter(ABC):
    """
    Base class for reusable sample filters.

    Subclasses implement build() to select rows of a dataset.
    """

    @abstractmethod
    def build(self, data: Dataset, **params) -> np.ndarray:
        """
        Build the selection mask for a dataset

        Args:
            data: Dataset to filter
            **params: Additional parameters for the selection

        Returns:
            np.ndarray: Boolean mask with one entry per sample

        Example:
            >>> band = InterfaceBandFilter(normal=[1, 0, 0], offset=0.5, half_width=0.1)
            >>> mask = band.build(data)
            >>> near = data.subset(mask)
        """
        raise NotImplementedError("Subclasses must implement build() method")

    def validate(self, data: Dataset, **params) -> bool:
        """
        Validate filter against a dataset before use (optional)

        Returns:
            bool: True if valid, False otherwise
        """
        return True

    def apply(self, data: Dataset, **params) -> Dataset:
        """Dataset restricted to the selected samples"""
        return data.subset(self.build(data, **params))

    def __str__(self):
        return f"{self.__class__.__name__}()"
