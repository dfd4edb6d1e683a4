import numpy as np
import pytest

from pwca_milp.core.dataset import Dataset
from pwca_milp.exceptions import ParameterError
from pwca_milp.filters import BoxFilter, InterfaceBandFilter, crop_filter


class TestInterfaceBandFilter:
    def test_selects_slab(self, product_data):
        band = InterfaceBandFilter([1.0, 0.0, 0.0], 0.5, 0.15)
        mask = band.build(product_data)
        assert np.all(np.abs(product_data.x[mask, 0] - 0.5) <= 0.15)
        # x1 in {0.4, 0.5, 0.6} on the 11-point grid
        assert mask.sum() == 33

    def test_normal_is_normalized(self, product_data):
        band = InterfaceBandFilter([2.0, 0.0, 0.0], 1.0, 0.0)
        assert band.offset == pytest.approx(0.5)
        assert band.build(product_data).sum() == 11

    def test_wrong_dimension(self, product_data):
        with pytest.raises(ParameterError):
            InterfaceBandFilter([1.0, 0.0], 0.5, 0.1).build(product_data)

    def test_zero_normal(self):
        with pytest.raises(ParameterError):
            InterfaceBandFilter([0.0, 0.0], 0.0, 0.1)


class TestBoxFilter:
    def test_inclusive(self, product_data):
        kept = BoxFilter([0.0, 0.0], [0.5, 1.0]).apply(product_data)
        assert kept.size == 66

    def test_exclusive(self, product_data):
        mask = BoxFilter([0.0, 0.0], [0.5, 1.0], inclusive=False).build(product_data)
        assert mask.sum() == 4 * 9

    def test_dimension_mismatch(self, product_data):
        with pytest.raises(ParameterError):
            BoxFilter([0.0], [1.0]).build(product_data)


class TestCropFilter:
    def test_missing_bounds_from_data(self, product_data):
        crop = crop_filter([0.5, 0.0], None, product_data)
        assert np.allclose(crop.box.upper, [1.0, 1.0])
        assert crop.apply(product_data).size == 66

    def test_one_dimensional(self):
        data = Dataset(np.linspace(0, 1, 5).reshape(-1, 1), np.zeros(5))
        assert crop_filter(None, [0.5], data).apply(data).size == 3
