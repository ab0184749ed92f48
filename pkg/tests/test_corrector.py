import math

import numpy as np
import pytest

from polypath.algebra import parse_system
from polypath.corrector import (CorrectorOptions, DivergenceError,
                                newton_correct, omega_estimate, refine)
from polypath.linalg import RankDeficientError

ROOT2 = 1.4142135623730950488016887242096980786


class FrozenSystem:
    """Adapter: a plain polynomial system posing as a homotopy (t ignored)."""

    def __init__(self, system, pre=None):
        self.system = system
        self.pre = pre  # optional constant matrix multiplying the equations

    def evaluate(self, x, t):
        v = self.system.evaluate(x)
        return v if self.pre is None else self.pre @ v

    def eval_and_jac(self, x, t):
        v, J = self.system.eval_and_jac(x)
        if self.pre is None:
            return v, J
        return self.pre @ v, self.pre @ J


def scalar(expr):
    return FrozenSystem(parse_system(f"vars: x\n{expr}\n"))


SQRT2 = scalar("x^2 - 2")


class TestNewtonIteration:
    def test_first_steps_match_hand_iteration(self):
        opts = CorrectorOptions(tau=1e-7, max_newton_iters=2)
        res = newton_correct(SQRT2, np.array([1.5]), 0.0, opts)
        assert res.correction_norms[0] == pytest.approx(1 / 12, rel=1e-14)
        assert res.iterates[1][0] == pytest.approx(17 / 12, rel=1e-14)
        assert res.correction_norms[1] == pytest.approx(1 / 408, rel=1e-12)
        assert res.thetas[0] == pytest.approx(1 / 34, rel=1e-12)

    def test_simplified_n2_bound_above_tau(self):
        # two full steps + one reused-Jacobian step cannot certify 1e-7 yet
        opts = CorrectorOptions(tau=1e-7, max_newton_iters=2,
                                criterion="simplified_a_priori")
        res = newton_correct(SQRT2, np.array([1.5]), 0.0, opts)
        assert not res.converged
        assert res.solves == 3
        # evaluating x^2-2 this close to the root cancels ~11 digits, so the
        # hand-computed rationals only hold to ~1e-9 relative
        assert res.correction_norms[2] == pytest.approx(1 / 471648, rel=1e-9)
        assert res.thetas[1] == pytest.approx(1 / 1156, rel=1e-9)
        assert res.accuracy_bound == pytest.approx(2.1202284259274504e-06, rel=1e-9)
        assert res.x[0] == pytest.approx(222337 / 157216, rel=1e-14)
        # the bound is sound for the returned point even though unconverged
        assert abs(res.x[0] - ROOT2) <= res.accuracy_bound

    def test_simplified_n3_converges(self):
        opts = CorrectorOptions(tau=1e-7, max_newton_iters=3)
        res = newton_correct(SQRT2, np.array([1.5]), 0.0, opts)
        assert res.converged
        assert res.solves == 4
        # cancellation at the 4.5e-12 residual level leaves ~4 good digits
        assert res.accuracy_bound == pytest.approx(1.5948594294096417e-12, rel=1e-3)
        assert abs(res.x[0] - ROOT2) <= res.accuracy_bound

    def test_a_priori_converges_at_loose_tau(self):
        opts = CorrectorOptions(tau=1e-2, max_newton_iters=2, criterion="a_priori")
        res = newton_correct(SQRT2, np.array([1.5]), 0.0, opts)
        assert res.converged
        assert res.solves == 2  # stops as soon as the bound is checkable
        assert res.accuracy_bound == pytest.approx(17 / 6924, rel=1e-12)
        assert abs(res.x[0] - ROOT2) <= res.accuracy_bound

    def test_a_posteriori_trails_by_one_solve(self):
        opts = CorrectorOptions(tau=1e-2, max_newton_iters=2, criterion="a_posteriori")
        res = newton_correct(SQRT2, np.array([1.5]), 0.0, opts)
        assert res.converged
        assert res.solves == 3
        assert res.accuracy_bound == pytest.approx(0.0024531061340407802, rel=1e-12)
        assert res.x[0] == pytest.approx(665857 / 470832, rel=1e-14)
        assert abs(res.x[0] - ROOT2) <= res.accuracy_bound

    def test_root_input_short_circuits(self):
        opts = CorrectorOptions(tau=1e-7, max_newton_iters=2)
        res = newton_correct(scalar("x^2 - 1"), np.array([1.0]), 0.0, opts)
        assert res.converged
        assert res.accuracy_bound == 0.0
        assert res.correction_norms == [0.0]
        assert res.x[0] == 1.0

    def test_noise_level_correction_accepted_outright(self):
        # float sqrt(2) is one rounding error away from the true root; the
        # single correction is ~1.6e-16, below any measurable contraction,
        # and must be accepted in one solve instead of producing garbage
        # Theta ratios that reject a machine-exact point.  The declared
        # bound is the working-precision floor, not the ulp-level
        # correction, which would overstate what doubles can promise.
        opts = CorrectorOptions(tau=1e-7, max_newton_iters=2)
        res = newton_correct(SQRT2, np.array([ROOT2]), 0.0, opts)
        assert res.converged
        assert res.solves == 1
        assert res.correction_norms[0] < res.accuracy_bound < 5e-15

    def test_far_start_fails_within_budget(self):
        for crit in ("a_posteriori", "a_priori", "simplified_a_priori"):
            opts = CorrectorOptions(tau=1e-7, max_newton_iters=1, criterion=crit)
            res = newton_correct(SQRT2, np.array([100.0]), 0.0, opts)
            assert not res.converged, crit
            assert abs(res.correction_norms[0] - 49.99) < 1e-10

    def test_weak_contraction_aborts_early(self):
        # Newton on x^3 - 2 far out contracts at about 2/3 per step
        opts = CorrectorOptions(tau=1e-7, max_newton_iters=5)
        res = newton_correct(scalar("x^3 - 2"), np.array([100.0]), 0.0, opts)
        assert not res.converged
        assert res.solves == 2  # stops at the first theta >= 0.5
        assert res.thetas[0] >= 0.5
        assert res.accuracy_bound == math.inf

    def test_singular_jacobian_propagates(self):
        with pytest.raises(RankDeficientError):
            newton_correct(scalar("x^2"), np.array([0.0]), 0.0,
                           CorrectorOptions())

    def test_non_finite_values_fail_cleanly(self):
        class Bad:
            def eval_and_jac(self, x, t):
                return np.array([np.nan + 0j]), np.array([[1.0 + 0j]])

            def evaluate(self, x, t):
                return np.array([np.nan + 0j])

        res = newton_correct(Bad(), np.array([1.0]), 0.0, CorrectorOptions())
        assert not res.converged
        assert res.accuracy_bound == math.inf

    def test_input_not_mutated(self):
        x0 = np.array([1.5 + 0j])
        newton_correct(SQRT2, x0, 0.0, CorrectorOptions())
        assert x0[0] == 1.5 + 0j

    def test_options_validated(self):
        with pytest.raises(ValueError):
            CorrectorOptions(tau=0.0)
        with pytest.raises(ValueError):
            CorrectorOptions(max_newton_iters=0)
        with pytest.raises(ValueError):
            CorrectorOptions(criterion="newton")


class TestOmegaEstimate:
    def test_two_norms(self):
        assert omega_estimate([1e-2, 5e-5]) == pytest.approx(1.0, rel=1e-15)

    def test_single_norm_absent(self):
        assert omega_estimate([0.1]) is None
        assert omega_estimate([]) is None

    def test_max_over_pairs(self):
        assert omega_estimate([1e-1, 1e-2, 1e-4]) == pytest.approx(2.0, rel=1e-15)

    def test_result_field_excludes_reused_jacobian_step(self):
        # on the quadratic every full-step pair gives exactly 12/17
        opts = CorrectorOptions(tau=1e-7, max_newton_iters=2)
        res = newton_correct(SQRT2, np.array([1.5]), 0.0, opts)
        assert res.solves == 3
        assert res.omega_est == omega_estimate(res.correction_norms[:2])
        assert res.omega_est == pytest.approx(12 / 17, rel=1e-9)

    def test_single_full_step_leaves_omega_absent(self):
        # N=1 yields one full norm; pairing it with the reused-Jacobian
        # norm would wrongly report omega = 1/3 here
        opts = CorrectorOptions(tau=1e-7, max_newton_iters=1)
        res = newton_correct(SQRT2, np.array([3.0]), 0.0, opts)
        assert not res.converged
        assert res.solves == 2
        assert res.correction_norms[0] == pytest.approx(7 / 6, rel=1e-14)
        assert res.correction_norms[1] == pytest.approx(49 / 216, rel=1e-13)
        assert res.omega_est is None

    def test_quadratic_contraction_witness(self):
        opts = CorrectorOptions(tau=1e-14, max_newton_iters=4,
                                criterion="a_priori")
        res = newton_correct(SQRT2, np.array([1.5]), 0.0, opts)
        w = res.omega_est
        for a, b in zip(res.correction_norms, res.correction_norms[1:]):
            assert b <= 0.5 * w * a * a * 1.01


class TestAffineCovariance:
    def test_premultiplied_system_same_iterates(self):
        base = parse_system("vars: x, y\nx^2 + y^2 - 4\nx*y - 1\n")
        A = np.array([[2.0, -1.0], [0.5, 3.0]], dtype=complex)
        plain = FrozenSystem(base)
        mixed = FrozenSystem(base, pre=A)
        x0 = np.array([1.9 + 0.1j, 0.4 - 0.2j])
        opts = CorrectorOptions(tau=1e-10, max_newton_iters=3)
        r1 = newton_correct(plain, x0, 0.0, opts)
        r2 = newton_correct(mixed, x0, 0.0, opts)
        assert len(r1.iterates) == len(r2.iterates)
        for a, b in zip(r1.iterates, r2.iterates):
            assert np.linalg.norm(a - b) < 1e-10


class TestRefine:
    def test_root_unchanged(self):
        out = refine(scalar("x^2 - 1"), np.array([1.0]), 0.0, 1e-14, 10)
        assert out[0] == 1.0

    def test_polishes_to_full_precision(self):
        out = refine(SQRT2, np.array([1.4]), 0.0, 1e-14, 20)
        assert abs(out[0] - ROOT2) < 1e-14

    def test_singular_jacobian_raises(self):
        with pytest.raises(RankDeficientError):
            refine(scalar("x^2"), np.array([0.0]), 0.0, 1e-12, 5)

    def test_divergence_detected(self):
        # no root anywhere near: corrections grow
        class Runaway:
            def eval_and_jac(self, x, t):
                # f(x) = exp-like growth surrogate: value 1, slope shrinking
                return np.array([1.0 + 0j]), np.array([[1.0 / (1 + abs(x[0])) + 0j]])

        with pytest.raises(DivergenceError):
            refine(Runaway(), np.array([0.0]), 0.0, 1e-12, 50)

    def test_budget_respected(self):
        calls = 0
        real = SQRT2

        class Counting:
            def eval_and_jac(self, x, t):
                nonlocal calls
                calls += 1
                return real.eval_and_jac(x, t)

        refine(Counting(), np.array([100.0]), 0.0, 1e-30, 3)
        assert calls == 3
