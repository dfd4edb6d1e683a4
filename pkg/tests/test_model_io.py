import numpy as np
import pytest

from pwca_milp.core.convex_fit import CONCAVE, ConvexModel, plane_from_slopes
from pwca_milp.core.dataset import Box
from pwca_milp.core.geometry import RotationParams
from pwca_milp.core.model_io import (
    load_model, model_from_text, model_to_text, save_model
)
from pwca_milp.core.pwca import PwcaModel
from pwca_milp.core.triangulation import J1, build_grid_triangulation
from pwca_milp.exceptions import DataFormatError


@pytest.fixture
def pwca_model():
    params = RotationParams(r1=[0.1, 0.0, 0.0], s1=0.4, r2=[[0.2], [-0.1]],
                            s2=[0.1, 0.3], r3_minus=[0.05, 1.0 / 3.0], r3_plus=[-0.2, 0.1])
    return PwcaModel.from_params(params)


class TestRoundTrip:
    def test_convex_is_bit_exact(self):
        model = ConvexModel((plane_from_slopes(0.1, [1.0 / 3.0]), plane_from_slopes(-0.2, [-1.7])),
                            CONCAVE)
        stored = model_from_text(model_to_text(model))
        assert stored.kind == 'convex'
        assert stored.model.orientation == CONCAVE
        for a, b in zip(model.planes, stored.model.planes):
            assert np.array_equal(a.coefs, b.coefs)

    def test_pwca_keeps_params(self, pwca_model):
        stored = model_from_text(model_to_text(pwca_model))
        assert stored.kind == 'pwca'
        assert np.array_equal(stored.model.interface.coefs, pwca_model.interface.coefs)
        assert np.array_equal(stored.model.params.r2, pwca_model.params.r2)
        assert stored.model.params.s1 == pwca_model.params.s1
        x = np.random.default_rng(0).uniform(size=(20, 2))
        assert np.array_equal(stored.model.predict(x), pwca_model.predict(x))

    def test_one_input_pwca_has_empty_r2(self):
        model = PwcaModel.from_params(RotationParams.zeros(2, 2).replace(s2=[0.5]))
        stored = model_from_text(model_to_text(model))
        assert stored.model.params.r2.shape == (1, 0)

    def test_simplex_with_values(self, unit_box):
        tri = build_grid_triangulation(unit_box, (2, 2), J1).with_values(np.linspace(0, 1, 9) / 7)
        stored = model_from_text(model_to_text(tri))
        assert stored.kind == 'simplex'
        assert stored.model.scheme == J1
        assert np.array_equal(stored.model.values, tri.values)
        assert np.array_equal(stored.model.simplices, tri.simplices)

    def test_simplex_without_values(self, unit_box):
        tri = build_grid_triangulation(unit_box, (1, 1), J1)
        assert model_from_text(model_to_text(tri)).model.values is None

    def test_domain(self, tmp_path, pwca_model):
        domain = Box([0.0, 0.0, -0.5], [1.0, 1.0, 1.5])
        path = save_model(pwca_model, tmp_path / 'm.pwca', domain=domain)
        stored = load_model(path)
        assert np.array_equal(stored.domain.lower, domain.lower)
        assert np.array_equal(stored.domain.upper, domain.upper)


class TestMalformed:
    def test_missing_end(self, pwca_model):
        text = model_to_text(pwca_model).replace('end\n', '')
        with pytest.raises(DataFormatError):
            model_from_text(text)

    def test_content_after_end(self, pwca_model):
        with pytest.raises(DataFormatError):
            model_from_text(model_to_text(pwca_model) + 'lower 1 2 3 4\n')

    def test_unknown_version(self):
        with pytest.raises(DataFormatError):
            model_from_text('format_version 2\nkind convex\nend\n')

    def test_unknown_kind(self):
        with pytest.raises(DataFormatError):
            model_from_text('format_version 1\nkind spline\nend\n')

    def test_bad_number(self):
        text = 'format_version 1\nkind convex\norientation convex\nplane 0 x 1\nend\n'
        with pytest.raises(DataFormatError):
            model_from_text(text)

    def test_invalid_plane(self):
        text = 'format_version 1\nkind convex\norientation convex\nplane 0 1 -1\nend\n'
        with pytest.raises(DataFormatError):
            model_from_text(text)

    def test_no_planes(self):
        with pytest.raises(DataFormatError):
            model_from_text('format_version 1\nkind convex\norientation convex\nend\n')

    def test_comments_and_blank_lines(self):
        text = ('# saved by hand\n\nformat_version 1\nkind convex\norientation convex\n'
                'plane 0 0 1\nend\n')
        assert model_from_text(text).model.n_hyp == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError):
            load_model(tmp_path / 'missing.pwca')
