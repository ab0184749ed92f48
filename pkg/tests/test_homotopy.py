import numpy as np
import pytest
from numpy.polynomial import Polynomial as NPoly

from polypath.algebra import homogenize, parse_system
from polypath.homotopy import Homotopy, PatchedHomotopy, straight_line


def central_diff_jac(h, x, t, eps=1e-6):
    n = len(x)
    m = len(h.evaluate(x, t))
    J = np.zeros((m, n), dtype=complex)
    for i in range(n):
        e = np.zeros(n, dtype=complex)
        e[i] = eps
        # complex derivative of a polynomial map: real step suffices
        J[:, i] = (h.evaluate(x + e, t) - h.evaluate(x - e, t)) / (2 * eps)
    return J


TARGET = parse_system("vars: x, y\nx^2 + y^2 - 4\nx*y - 1\n")
START = parse_system("vars: x, y\nx^2 - 1\ny^2 - 1\n")


class TestStraightLine:
    def test_endpoints(self):
        h = straight_line(TARGET, START, 1.0)
        x = np.array([0.7 - 0.2j, 1.3 + 0.4j])
        assert np.allclose(h.evaluate(x, 0.0), TARGET.evaluate(x), rtol=0, atol=1e-14)
        assert np.allclose(h.evaluate(x, 1.0), START.evaluate(x), rtol=0, atol=1e-14)

    def test_endpoints_with_gamma(self):
        g = 0.6 + 0.8j
        h = straight_line(TARGET, START, g)
        x = np.array([1.1, -0.3 + 1j])
        assert np.allclose(h.evaluate(x, 1.0), g * START.evaluate(x), atol=1e-14)
        assert np.allclose(h.evaluate(x, 0.0), TARGET.evaluate(x), atol=1e-14)

    def test_midpoint_is_average(self):
        h = straight_line(TARGET, START, 1.0)
        x = np.array([0.5, 2.0])
        mid = 0.5 * (START.evaluate(x) + TARGET.evaluate(x))
        assert np.allclose(h.evaluate(x, 0.5), mid, atol=1e-14)

    def test_linearity_in_t(self):
        h = straight_line(TARGET, START, np.exp(0.77j))
        rng = np.random.default_rng(5)
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        v1, v0 = h.evaluate(x, 1.0), h.evaluate(x, 0.0)
        for t in (0.125, 0.5, 0.93):
            expect = t * v1 + (1 - t) * v0
            assert np.allclose(h.evaluate(x, t), expect, rtol=1e-14, atol=1e-14)

    def test_gamma_normalized(self):
        h = straight_line(TARGET, START, 3.0 - 4.0j)
        assert abs(abs(h.gamma) - 1.0) < 1e-15
        assert np.isclose(h.gamma, (3.0 - 4.0j) / 5.0)

    def test_gamma_zero_rejected(self):
        with pytest.raises(ValueError):
            straight_line(TARGET, START, 0.0)

    def test_t_range_enforced(self):
        h = straight_line(TARGET, START, 1.0)
        x = np.array([1.0, 1.0])
        for bad in (-0.01, 1.01, 2.0):
            with pytest.raises(ValueError):
                h.evaluate(x, bad)
            with pytest.raises(ValueError):
                h.jac_x(x, bad)

    def test_shape_mismatch_rejected(self):
        small = parse_system("vars: x\nx^2 - 1\n")
        with pytest.raises(ValueError):
            straight_line(TARGET, small, 1.0)
        h = straight_line(TARGET, START, 1.0)
        with pytest.raises(ValueError):
            h.evaluate(np.array([1.0]), 0.5)


class TestDerivatives:
    def test_jac_endpoints(self):
        g = np.exp(1.3j)
        h = straight_line(TARGET, START, g)
        x = np.array([0.4 + 0.1j, -1.2])
        assert np.allclose(h.jac_x(x, 0.0), TARGET.jacobian(x), atol=1e-14)
        assert np.allclose(h.jac_x(x, 1.0), g * START.jacobian(x), atol=1e-14)

    def test_jac_matches_finite_differences(self):
        h = straight_line(TARGET, START, np.exp(0.3j))
        x = np.array([0.9 - 0.5j, 0.2 + 0.8j])
        J = h.jac_x(x, 0.37)
        assert np.allclose(J, central_diff_jac(h, x, 0.37), rtol=1e-6, atol=1e-8)

    def test_dt_matches_finite_differences(self):
        h = straight_line(TARGET, START, np.exp(-0.9j))
        x = np.array([1.4, 0.6 - 0.2j])
        eps = 1e-7
        fd = (h.evaluate(x, 0.5 + eps) - h.evaluate(x, 0.5 - eps)) / (2 * eps)
        assert np.allclose(h.d_t(x, 0.5), fd, rtol=1e-6, atol=1e-8)

    def test_dt_independent_of_t(self):
        h = straight_line(TARGET, START, np.exp(2.1j))
        x = np.array([0.3, 0.9 + 0.4j])
        assert np.allclose(h.d_t(x, 0.1), h.d_t(x, 0.9), atol=1e-14)

    def test_dt_zero_when_start_equals_scaled_target(self):
        # gamma=1 and G == F makes H constant in t
        h = straight_line(TARGET, TARGET, 1.0)
        x = np.array([0.5 + 0.5j, -1.0])
        assert np.allclose(h.d_t(x, 0.3), 0.0, atol=1e-14)

    def test_eval_full_consistent(self):
        h = straight_line(TARGET, START, np.exp(0.45j))
        x = np.array([1.2 - 0.7j, 0.1 + 0.3j])
        H, Hx, Ht = h.eval_full(x, 0.25)
        assert np.allclose(H, h.evaluate(x, 0.25), atol=0)
        assert np.allclose(Hx, h.jac_x(x, 0.25), atol=0)
        assert np.allclose(Ht, h.d_t(x, 0.25), atol=0)
        H2, Hx2 = h.eval_and_jac(x, 0.25)
        assert np.array_equal(H2, H)
        assert np.array_equal(Hx2, Hx)


def patched_pair(gamma=1.0):
    target = homogenize(parse_system("vars: x\nx^2 - 2\n"))
    start = homogenize(parse_system("vars: x\nx^2 - 1\n"))
    return PatchedHomotopy(straight_line(target, start, gamma), np.array([1.0, 0.0]))


class TestPatched:
    def test_patch_row_value(self):
        ph = patched_pair()
        x = np.array([0.3 - 0.1j, 1.4 + 0.2j])
        v = np.array([0.5 + 0.25j, -0.75j])
        ph.set_patch(v)
        vals = ph.evaluate(x, 0.5)
        assert abs(vals[-1] - (np.vdot(v, x) - 1.0)) < 1e-15

    def test_patch_satisfied_at_normalized_point(self):
        # v = x / ||x||^2 puts x exactly on the patch
        ph = patched_pair()
        x = np.array([0.6 + 0.8j, 1.0 - 0.5j])
        ph.set_patch(x / np.linalg.norm(x) ** 2)
        assert abs(ph.evaluate(x, 0.25)[-1]) < 1e-15

    def test_jacobian_row_and_dt_row(self):
        ph = patched_pair(np.exp(0.2j))
        v = np.array([1.0 - 2.0j, 0.5])
        ph.set_patch(v)
        x = np.array([0.9, 1.1 + 0.3j])
        J = ph.jac_x(x, 0.6)
        assert J.shape == (2, 2)
        assert np.array_equal(J[-1], np.conj(v))
        assert ph.d_t(x, 0.6)[-1] == 0

    def test_jacobian_matches_finite_differences(self):
        ph = patched_pair(np.exp(-1.1j))
        ph.set_patch(np.array([0.3 + 0.4j, 0.8 - 0.1j]))
        x = np.array([1.05 - 0.35j, 0.65 + 0.2j])
        J = ph.jac_x(x, 0.41)
        assert np.allclose(J, central_diff_jac(ph, x, 0.41), rtol=1e-6, atol=1e-8)

    def test_eval_full_consistent(self):
        ph = patched_pair(np.exp(0.8j))
        x = np.array([0.4 + 0.9j, 1.3])
        H, Hx, Ht = ph.eval_full(x, 0.7)
        assert np.allclose(H, ph.evaluate(x, 0.7), atol=0)
        assert np.allclose(Hx, ph.jac_x(x, 0.7), atol=0)
        assert np.allclose(Ht, ph.d_t(x, 0.7), atol=0)

    def test_requires_square_after_patch(self):
        # two equations in two variables: already square, patch breaks it
        t = homogenize(TARGET)
        s = homogenize(START)
        h = straight_line(t, s, 1.0)
        ph = PatchedHomotopy(h, np.ones(3))  # 2 eqs + patch in 3 vars: fine
        assert ph.npolys == ph.nvars == 3
        with pytest.raises(ValueError):
            PatchedHomotopy(straight_line(TARGET, START, 1.0), np.ones(2))

    def test_requires_homogeneous_matching_degrees(self):
        inhom = parse_system("vars: x\nx^2 - 2\n")
        hom = homogenize(inhom)
        with pytest.raises(ValueError):
            PatchedHomotopy(straight_line(inhom, inhom, 1.0), np.ones(1))
        cubic = homogenize(parse_system("vars: x\nx^3 - 1\n"))
        with pytest.raises(ValueError):
            PatchedHomotopy(straight_line(hom, cubic, 1.0), np.ones(2))

    def test_patch_length_checked(self):
        ph = patched_pair()
        with pytest.raises(ValueError):
            ph.set_patch(np.ones(3))


class TestJet:
    def poly_oracle(self, ph, xjet, t0, dt_t, order):
        """Compose H with the series by polynomial arithmetic in sigma."""
        sigma = NPoly([0.0, 1.0])
        coords = [sum(c * sigma**k for k, c in enumerate(row)) for row in xjet]
        tpoly = NPoly([t0, dt_t])
        base = ph.base
        rows = []
        for g, f in zip(base.start.polynomials, base.target.polynomials):
            gv = g.evaluate(coords)
            fv = f.evaluate(coords)
            rows.append(tpoly * base.gamma * gv + (NPoly([1.0, 0.0]) - tpoly) * fv)
        patch = sum(np.conj(v) * c for v, c in zip(ph.patch, coords)) - 1.0
        rows.append(patch)
        out = np.zeros((len(rows), order), dtype=complex)
        for i, p in enumerate(rows):
            coef = np.asarray(p.coef, dtype=complex)[:order]
            out[i, : len(coef)] = coef
        return out

    def test_jet_matches_polynomial_composition(self):
        ph = patched_pair(np.exp(0.33j))
        ph.set_patch(np.array([0.7 - 0.2j, 0.4 + 0.1j]))
        rng = np.random.default_rng(11)
        xjet = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        got = ph.eval_jet(xjet, 0.6, -0.05)
        want = self.poly_oracle(ph, xjet, 0.6, -0.05, 4)
        assert np.allclose(got, want, rtol=1e-13, atol=1e-13)

    def test_jet_order_zero_term_is_evaluation(self):
        ph = patched_pair(np.exp(-0.6j))
        x = np.array([0.8 + 0.1j, 1.2 - 0.4j])
        xjet = np.zeros((2, 4), dtype=complex)
        xjet[:, 0] = x
        got = ph.eval_jet(xjet, 0.35, 0.02)
        assert np.allclose(got[:, 0], ph.evaluate(x, 0.35), atol=1e-14)

    def test_jet_linear_term_is_directional_derivative(self):
        ph = patched_pair(np.exp(0.9j))
        x = np.array([1.1 - 0.2j, 0.5 + 0.6j])
        u = np.array([0.3 + 0.7j, -0.9 + 0.2j])
        dt_t = -0.04
        xjet = np.zeros((2, 4), dtype=complex)
        xjet[:, 0] = x
        xjet[:, 1] = u
        got = ph.eval_jet(xjet, 0.5, dt_t)
        want = ph.jac_x(x, 0.5) @ u + dt_t * ph.d_t(x, 0.5)
        assert np.allclose(got[:, 1], want, rtol=1e-13, atol=1e-13)
