import numpy as np
import pandas as pd
import pytest

from pwca_milp.core.dataset import Box, Dataset, grid_points
from pwca_milp.exceptions import DataFormatError, ParameterError


class TestBox:
    def test_corners(self, unit_box):
        corners = unit_box.corners()
        assert corners.shape == (4, 2)
        assert {tuple(c) for c in corners} == {(0, 0), (0, 1), (1, 0), (1, 1)}

    def test_inverted_bounds(self):
        with pytest.raises(ParameterError):
            Box([1.0], [0.0])

    def test_contains_with_tolerance(self, unit_box):
        inside = unit_box.contains(np.array([[0.5, 0.5], [1.0 + 1e-9, 0.0], [2.0, 0.0]]),
                                   tolerance=1e-6)
        assert inside.tolist() == [True, True, False]

    def test_product_and_expanded(self, unit_box):
        box = unit_box.product(Box([-1.0], [3.0])).expanded(0.25)
        assert np.allclose(box.lower, [-0.25, -0.25, -2.0])
        assert np.allclose(box.upper, [1.25, 1.25, 4.0])


class TestGridPoints:
    def test_row_major(self, unit_box):
        points = grid_points(unit_box, 3)
        assert points.shape == (9, 2)
        assert np.allclose(points[1], [0.0, 0.5])
        assert np.allclose(points[3], [0.5, 0.0])

    def test_too_coarse(self, unit_box):
        with pytest.raises(ParameterError):
            grid_points(unit_box, 1)


class TestDataset:
    def test_shapes(self, product_data):
        assert product_data.size == 121
        assert product_data.n_inputs == 2
        assert product_data.dimension == 3
        assert product_data.y_range == pytest.approx(1.0)

    def test_one_dimensional_x(self):
        data = Dataset(np.array([0.0, 1.0, 2.0]), np.array([1.0, 2.0, 3.0]))
        assert data.x.shape == (3, 1)
        assert np.allclose(data.x_box.upper, [2.0])

    def test_mismatched_lengths(self):
        with pytest.raises(ParameterError):
            Dataset(np.zeros((3, 1)), np.zeros(2))

    def test_degenerate_domain(self):
        with pytest.raises(ParameterError):
            Dataset(np.array([[1.0, 0.0], [1.0, 1.0]]), np.zeros(2))

    def test_non_finite(self):
        with pytest.raises(ParameterError):
            Dataset(np.array([[0.0], [1.0]]), np.array([0.0, np.nan]))

    def test_points_outside_box(self):
        with pytest.raises(ParameterError):
            Dataset(np.array([[0.0], [2.0]]), np.zeros(2), Box([0.0], [1.0]))

    def test_immutable_arrays(self, product_data):
        with pytest.raises(ValueError):
            product_data.y[0] = 5.0

    def test_negated(self, product_data):
        assert np.allclose(product_data.negated().y, -product_data.y)

    def test_rmse(self, product_data):
        assert product_data.rmse(product_data.y + 0.5) == pytest.approx(0.5)

    def test_subset_requires_points(self, product_data):
        with pytest.raises(ParameterError):
            product_data.subset(np.zeros(product_data.size, dtype=bool))


class TestCsv:
    def test_round_trip_keeps_full_precision(self, tmp_path):
        data = Dataset(np.array([[0.1], [1.0 / 3.0]]), np.array([np.pi, np.e]))
        path = data.to_csv(tmp_path / 'd.csv')
        loaded = Dataset.from_csv(path)
        assert np.array_equal(loaded.x, data.x)
        assert np.array_equal(loaded.y, data.y)

    def test_header(self, tmp_path, product_data):
        path = product_data.to_csv(tmp_path / 'd.csv')
        assert open(path).readline().strip() == 'x1,x2,y'

    def test_wrong_header(self):
        with pytest.raises(DataFormatError):
            Dataset.from_frame(pd.DataFrame({'a': [0.0, 1.0], 'y': [0.0, 1.0]}))

    def test_non_numeric(self):
        with pytest.raises(DataFormatError):
            Dataset.from_frame(pd.DataFrame({'x1': ['a', 'b'], 'y': [0.0, 1.0]}))

    def test_missing_value(self, tmp_path):
        path = tmp_path / 'd.csv'
        path.write_text('x1,y\n0,1\n1,\n')
        with pytest.raises(DataFormatError):
            Dataset.from_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError):
            Dataset.from_csv(tmp_path / 'nope.csv')

    def test_degenerate_domain_is_format_error(self, tmp_path):
        path = tmp_path / 'd.csv'
        path.write_text('x1,y\n1,1\n1,2\n')
        with pytest.raises(DataFormatError):
            Dataset.from_csv(path)
