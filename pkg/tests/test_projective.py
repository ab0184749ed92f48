import numpy as np
import pytest

from polypath.projective import (PatchStrategy, chordal_distance, dehomogenize,
                                 init_patch, inner, update_patch)


class TestInit:
    def test_orthogonal_unit_vector(self):
        x0 = np.array([0.6, 0.8])
        s = init_patch("orthogonal", x0, 0)
        assert np.allclose(s.vector, x0)
        assert abs(inner(x0, s.vector) - 1.0) < 1e-15

    def test_orthogonal_normalizes(self):
        x0 = np.array([3.0, 4.0])
        s = init_patch("orthogonal", x0, 0)
        assert np.allclose(s.vector, [0.6, 0.8])

    def test_fixed_random_on_patch(self):
        x0 = np.array([1.0 + 2.0j, -0.5, 0.25j])
        s = init_patch("fixed_random", x0, 42)
        assert abs(inner(x0, s.vector) - 1.0) < 1e-14

    def test_fixed_random_deterministic(self):
        x0 = np.array([1.0, 1.0j])
        a = init_patch("fixed_random", x0, 7)
        b = init_patch("fixed_random", x0, 7)
        c = init_patch("fixed_random", x0, 8)
        assert np.array_equal(a.vector, b.vector)
        assert not np.array_equal(a.vector, c.vector)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            init_patch("orthogonal", np.zeros(3), 0)
        with pytest.raises(ValueError):
            init_patch("fixed_random", np.zeros(2), 0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            init_patch("random", np.ones(2), 0)


class TestUpdate:
    def test_fixed_leaves_vector_alone(self):
        x0 = np.array([1.0, 2.0 - 1.0j])
        s = init_patch("fixed_random", x0, 3)
        saved = s.vector.copy()
        s2, x = update_patch(s, np.array([5.0j, 1.0 + 1.0j]))
        assert s2 is s
        assert np.array_equal(s.vector, saved)
        assert abs(inner(x, s.vector) - 1.0) < 1e-14

    def test_orthogonal_normalizes_and_moves_v(self):
        s = init_patch("orthogonal", np.array([1.0, 0.0]), 0)
        s, x = update_patch(s, np.array([3.0, 4.0j]))
        assert abs(np.linalg.norm(x) - 1.0) < 1e-15
        assert np.array_equal(s.vector, x)
        assert abs(inner(x, x) - 1.0) < 1e-15

    def test_idempotent(self):
        for kind in ("fixed_random", "orthogonal"):
            s = init_patch(kind, np.array([1.0 + 0.5j, -2.0]), 11)
            s, x1 = update_patch(s, np.array([0.3 - 0.7j, 1.1 + 0.2j]))
            s, x2 = update_patch(s, x1)
            assert np.linalg.norm(x1 - x2) <= 1e-15 * (1 + np.linalg.norm(x1))

    def test_zero_rejected(self):
        s = init_patch("orthogonal", np.ones(2), 0)
        with pytest.raises(ValueError):
            update_patch(s, np.zeros(2))

    def test_fixed_point_at_infinity_of_patch(self):
        s = PatchStrategy("fixed_random", np.array([1.0, 0.0]))
        with pytest.raises(ValueError):
            update_patch(s, np.array([0.0, 1.0]))


class TestChordal:
    def test_same_class_is_zero(self):
        x = np.array([1.0 + 1.0j, 2.0, -0.5j])
        assert chordal_distance(x, (0.3 - 2.7j) * x) < 1e-15

    def test_orthogonal_classes(self):
        assert abs(chordal_distance([1.0, 0.0], [0.0, 1.0]) - 1.0) < 1e-15

    def test_small_perturbation_scale(self):
        x = np.array([1.0, 0.0])
        d = chordal_distance(x, np.array([1.0, 1e-8]))
        assert 0.5e-8 < d < 2e-8

    def test_symmetric(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert abs(chordal_distance(x, y) - chordal_distance(y, x)) < 1e-12

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            chordal_distance(np.zeros(2), np.ones(2))


class TestDehomogenize:
    def test_divides_by_leading_coordinate(self):
        assert np.allclose(dehomogenize([2.0, 4.0, 6.0]), [2.0, 3.0])

    def test_infinity_rejected(self):
        with pytest.raises(ValueError):
            dehomogenize([0.0, 1.0])
