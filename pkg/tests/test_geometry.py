import math

import numpy as np
import pytest

from pwca_milp.core.geometry import (
    Basis, Hyperplane, RotationParams, alignment_angles, basic_rotation_planes,
    compose_rotations, convex_to_params, interface_angles, interface_planes,
    params_to_hyperplanes, plane_coefficients, rotate, rotation_matrix
)
from pwca_milp.exceptions import DegeneratePlaneError, InvalidDimensionError, ParameterError


class TestRotationPlanes:
    def test_lexicographic_order(self):
        assert basic_rotation_planes(3) == [(1, 2), (1, 3), (2, 3)]

    def test_count_is_n_choose_2(self):
        assert len(basic_rotation_planes(5)) == 10

    def test_interface_planes_skip_x1(self):
        assert interface_planes(3) == [(2, 3)]
        assert interface_planes(2) == []

    def test_too_small(self):
        with pytest.raises(InvalidDimensionError):
            basic_rotation_planes(1)


class TestRotationMatrix:
    def test_entries(self):
        rot = rotation_matrix(3, (1, 3), math.pi / 6)
        c, s = math.cos(math.pi / 6), math.sin(math.pi / 6)
        assert rot[0, 0] == pytest.approx(c)
        assert rot[0, 2] == pytest.approx(-s)
        assert rot[2, 0] == pytest.approx(s)
        assert rot[2, 2] == pytest.approx(c)
        assert rot[1, 1] == 1.0

    def test_invalid_plane(self):
        with pytest.raises(ParameterError):
            rotation_matrix(3, (2, 1), 0.1)

    def test_composition_is_orthonormal(self):
        rot = compose_rotations(4, [0.3, -1.2, 0.7, 2.0, 0.1, -0.4], basic_rotation_planes(4))
        assert np.allclose(rot.T @ rot, np.eye(4))
        assert np.linalg.det(rot) == pytest.approx(1.0)

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            compose_rotations(3, [0.1], basic_rotation_planes(3))


class TestBasis:
    def test_rotation_keeps_basis_orthonormal(self):
        basis = rotate(Basis.identity(3), [0.4, 0.9, -0.3], basic_rotation_planes(3))
        assert basis.is_orthonormal()
        assert basis.is_proper()

    def test_rotated_x1(self):
        basis = rotate(Basis.identity(2), [math.pi / 4], [(1, 2)])
        assert np.allclose(basis.vector(1), [math.sqrt(0.5), math.sqrt(0.5)])

    def test_shift(self):
        basis = Basis.identity(2).shifted(np.array([1.0, 0.0]), 0.5)
        assert np.allclose(basis.origin, [0.5, 0.0])


class TestHyperplane:
    def test_plane_through_point(self):
        plane = plane_coefficients(np.array([0.0, 0.0, 2.0]), np.array([1.0, 1.0, 3.0]))
        assert np.allclose(plane.coefs, [-3.0, 0.0, 0.0, 1.0])
        assert plane.residual(np.array([5.0, -2.0, 3.0])) == pytest.approx(0.0)

    def test_model_plane_sign(self):
        plane = plane_coefficients(np.array([1.0, -1.0]), np.zeros(2))
        assert plane.coefs[-1] > 0

    def test_vertical_model_plane(self):
        with pytest.raises(DegeneratePlaneError):
            plane_coefficients(np.array([1.0, 0.0]), np.zeros(2))

    def test_interface_may_be_vertical(self):
        plane = plane_coefficients(np.array([1.0, 0.0]), np.array([0.5, 0.0]), model_plane=False)
        assert np.allclose(plane.coefs, [-0.5, 1.0, 0.0])

    def test_zero_normal(self):
        with pytest.raises(DegeneratePlaneError):
            plane_coefficients(np.zeros(3), np.zeros(3))

    def test_mirrored_plane_describes_negated_y(self):
        plane = Hyperplane(np.array([0.2, 0.5, 1.0]))
        mirrored = plane.mirrored()
        point = np.array([0.3, -0.2 - 0.5 * 0.3])
        assert plane.residual(point) == pytest.approx(0.0)
        assert mirrored.residual(point * [1, -1]) == pytest.approx(0.0)
        assert mirrored.coefs[-1] > 0


class TestRotationParams:
    def test_zeros_shapes(self):
        params = RotationParams.zeros(3, 4)
        assert params.r1.shape == (3,)
        assert params.r2.shape == (2, 1)
        assert params.n_hyp == 4
        assert params.dimension == 3

    def test_odd_count(self):
        with pytest.raises(ParameterError):
            RotationParams.zeros(3, 3)

    def test_bad_angle_count(self):
        with pytest.raises(ParameterError):
            RotationParams(r1=np.zeros(2), s1=0.0, r2=np.zeros((1, 0)), s2=[0.0],
                           r3_minus=[0.0], r3_plus=[0.0])

    def test_zero_params_give_horizontal_planes(self):
        lower, upper, interface = params_to_hyperplanes(RotationParams.zeros(2, 2))
        assert np.allclose(interface.coefs, [0.0, 1.0, 0.0])
        assert np.allclose(lower[0].coefs, [0.0, 0.0, 1.0])
        assert np.allclose(upper[0].coefs, [0.0, 0.0, 1.0])

    def test_pair_shift_moves_plane_up(self):
        params = RotationParams.zeros(2, 2).replace(s2=np.array([0.7]))
        lower, upper, _ = params_to_hyperplanes(params)
        # y = 0.7
        assert np.allclose(lower[0].coefs, [-0.7, 0.0, 1.0])

    def test_tilt_changes_slope(self):
        params = RotationParams.zeros(2, 2).replace(r3_plus=np.array([math.pi / 4]))
        _, upper, _ = params_to_hyperplanes(params)
        a = upper[0].coefs
        assert abs(-a[1] / a[2]) == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ParameterError):
            params_to_hyperplanes(RotationParams.zeros(2, 2), n=3)


class TestAlignment:
    def test_interface_angles_reach_normal(self):
        normal = np.array([0.6, 0.0, 0.8])
        basis = rotate(Basis.identity(3), interface_angles(normal), basic_rotation_planes(3))
        assert np.allclose(basis.vector(1), normal)

    def test_generic_normal(self):
        normal = np.array([1.0, -2.0, 0.5, 0.3])
        normal /= np.linalg.norm(normal)
        basis = rotate(Basis.identity(4), interface_angles(normal), basic_rotation_planes(4))
        assert np.allclose(basis.vector(1), normal)

    def test_stray_components(self):
        with pytest.raises(ParameterError):
            alignment_angles(np.array([0.0, 1.0, 1.0]), 3, [1], basic_rotation_planes(3))


class TestConvexEmbedding:
    @pytest.mark.parametrize('normal', [[1.0, 0.0, 0.0], [0.8, 0.6, 0.0]])
    def test_planes_survive_round_trip(self, normal):
        planes = [
            plane_coefficients(np.array([-0.5, 0.2, 1.0]), np.array([0.0, 0.0, 0.1])),
            plane_coefficients(np.array([0.3, -0.4, 1.0]), np.array([0.5, 0.5, 0.2])),
        ]
        params = convex_to_params(planes, np.array(normal), 0.4)
        lower, upper, interface = params_to_hyperplanes(params)
        for original, low, up in zip(planes, lower, upper):
            assert np.allclose(low.coefs, original.coefs, atol=1e-9)
            assert np.allclose(up.coefs, original.coefs, atol=1e-9)
        assert np.allclose(interface.normal, normal)

    def test_one_input(self):
        plane = plane_coefficients(np.array([-1.0, 1.0]), np.array([0.2, 0.3]))
        params = convex_to_params([plane], np.array([1.0, 0.0]), 0.5)
        lower, _, _ = params_to_hyperplanes(params)
        assert np.allclose(lower[0].coefs, plane.coefs, atol=1e-9)
