"""Straight-line homotopy H(x,t) = t*gamma*G(x) + (1-t)*F(x).

The start system G sits at t=1, the target F at t=0, and tracking runs
with t decreasing.  Start and target terms are merged into one stacked
term block so that H, H_x and H_t come out of a single pass over the
monomials.  PatchedHomotopy appends the affine-patch row <x,v> - 1 that
makes the system square for projective tracking.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import PolynomialSystem, _StackedTerms, _jet_mul

__all__ = ["Homotopy", "PatchedHomotopy", "straight_line"]


class Homotopy:
    """Pair (target F, start G) blended by t*gamma*G + (1-t)*F."""

    def __init__(self, target: PolynomialSystem, start: PolynomialSystem, gamma: complex):
        if target.nvars != start.nvars or target.npolys != start.npolys:
            raise ValueError("start and target systems must have matching shape")
        gamma = complex(gamma)
        if gamma == 0:
            raise ValueError("gamma must be nonzero")
        self.target = target
        self.start = start
        self.gamma = gamma / abs(gamma)
        self._build_stack()

    def _build_stack(self) -> None:
        rows = []
        start_flags: list[bool] = []
        zero = (0,) * self.target.nvars
        for g, f in zip(self.start.polynomials, self.target.polynomials):
            row = [(c, e) for e, c in g.terms.items()]
            flags = [True] * len(row)
            row += [(c, e) for e, c in f.terms.items()]
            flags += [False] * (len(row) - len(flags))
            if not row:
                row = [(0j, zero)]
                flags = [False]
            rows.append(row)
            start_flags.extend(flags)
        self._stack = _StackedTerms(rows, self.target.nvars)
        flags = np.array(start_flags, dtype=bool)
        self._coeffs_start = np.where(flags, self._stack.coeffs, 0j)
        self._coeffs_target = np.where(flags, 0j, self._stack.coeffs)
        # d/dt of the blended coefficients is t-independent
        self._coeffs_dt = self.gamma * self._coeffs_start - self._coeffs_target

    @property
    def nvars(self) -> int:
        return self.target.nvars

    @property
    def npolys(self) -> int:
        return self.target.npolys

    def _point(self, x: Sequence[complex]) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.nvars,):
            raise ValueError(f"expected a point of length {self.nvars}")
        return x

    def _check_t(self, t: float) -> float:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        return t

    def _blend(self, t: float) -> np.ndarray:
        return (t * self.gamma) * self._coeffs_start + (1.0 - t) * self._coeffs_target

    def evaluate(self, x: Sequence[complex], t: float) -> np.ndarray:
        x, t = self._point(x), self._check_t(t)
        st = self._stack
        return st.reduce_rows(self._blend(t) * st.monomials(x))

    def jac_x(self, x: Sequence[complex], t: float) -> np.ndarray:
        x, t = self._point(x), self._check_t(t)
        st = self._stack
        _, grad = st.monomials_and_gradients(x)
        return st.reduce_rows(self._blend(t)[:, None] * grad)

    def d_t(self, x: Sequence[complex], t: float) -> np.ndarray:
        x = self._point(x)
        self._check_t(t)
        st = self._stack
        return st.reduce_rows(self._coeffs_dt * st.monomials(x))

    def eval_and_jac(self, x, t: float) -> tuple[np.ndarray, np.ndarray]:
        x, t = self._point(x), self._check_t(t)
        st = self._stack
        mon, grad = st.monomials_and_gradients(x)
        w = self._blend(t)
        return st.reduce_rows(w * mon), st.reduce_rows(w[:, None] * grad)

    def eval_full(self, x, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """H, H_x and H_t from one pass over the monomials."""
        x, t = self._point(x), self._check_t(t)
        st = self._stack
        mon, grad = st.monomials_and_gradients(x)
        w = self._blend(t)
        return (st.reduce_rows(w * mon),
                st.reduce_rows(w[:, None] * grad),
                st.reduce_rows(self._coeffs_dt * mon))

    def __repr__(self) -> str:
        return f"Homotopy({self.npolys} equations, gamma={self.gamma:.6f})"


def straight_line(target: PolynomialSystem, start: PolynomialSystem,
                  gamma: complex) -> Homotopy:
    """Build the straight-line homotopy; gamma is normalized to |gamma|=1."""
    return Homotopy(target, start, gamma)


class PatchedHomotopy:
    """A homotopy restricted to the affine patch <x, v> = 1.

    Appends the equation sum_i x_i * conj(v_i) - 1 == 0, whose gradient
    row is conj(v) and whose t-derivative is zero.  The base homotopy
    must be homogeneous with degree-matched rows so the patched system
    is square and well defined on projective classes.  The patch vector
    is owned per path and replaced via set_patch after accepted steps.
    """

    def __init__(self, base: Homotopy, patch: Sequence[complex]):
        if base.npolys + 1 != base.nvars:
            raise ValueError("patching requires npolys + 1 == nvars")
        if not (base.target.is_homogeneous() and base.start.is_homogeneous()):
            raise ValueError("patching requires homogeneous systems")
        if base.target.degrees != base.start.degrees:
            raise ValueError("start and target rows must have matching degrees")
        self.base = base
        self.patch = None
        self.set_patch(patch)

    def set_patch(self, patch: Sequence[complex]) -> None:
        patch = np.asarray(patch, dtype=np.complex128)
        if patch.shape != (self.base.nvars,):
            raise ValueError("patch vector has the wrong length")
        self.patch = patch
        self._patch_row = np.conj(patch)

    @property
    def nvars(self) -> int:
        return self.base.nvars

    @property
    def npolys(self) -> int:
        return self.base.npolys + 1

    @property
    def gamma(self) -> complex:
        return self.base.gamma

    def patch_value(self, x: np.ndarray) -> complex:
        return np.vdot(self.patch, x) - 1.0

    def evaluate(self, x, t: float) -> np.ndarray:
        vals = self.base.evaluate(x, t)
        return np.append(vals, self.patch_value(np.asarray(x, dtype=np.complex128)))

    def jac_x(self, x, t: float) -> np.ndarray:
        J = self.base.jac_x(x, t)
        return np.vstack([J, self._patch_row])

    def d_t(self, x, t: float) -> np.ndarray:
        vals = self.base.d_t(x, t)
        return np.append(vals, 0j)

    def eval_and_jac(self, x, t: float) -> tuple[np.ndarray, np.ndarray]:
        H, Hx = self.base.eval_and_jac(x, t)
        return (np.append(H, self.patch_value(np.asarray(x, dtype=np.complex128))),
                np.vstack([Hx, self._patch_row]))

    def eval_full(self, x, t: float):
        H, Hx, Ht = self.base.eval_full(x, t)
        return (np.append(H, self.patch_value(np.asarray(x, dtype=np.complex128))),
                np.vstack([Hx, self._patch_row]),
                np.append(Ht, 0j))

    def eval_jet(self, xjet: np.ndarray, t: float, dt_t: float) -> np.ndarray:
        """Series coefficients of sigma -> H(x(sigma), t + sigma*dt_t).

        xjet has shape (nvars, K) holding the series coefficients of
        each coordinate; the result has shape (npolys, K).  Truncation
        at order K is exact for the returned coefficients.
        """
        base = self.base
        t = base._check_t(t)
        st = base._stack
        order = xjet.shape[1]
        wjets = np.zeros((len(st.coeffs), order), dtype=np.complex128)
        wjets[:, 0] = base._blend(t)
        if order > 1:
            wjets[:, 1] = dt_t * base._coeffs_dt
        rows = st.reduce_rows(_jet_mul(st.monomial_jets(xjet), wjets))
        patch_row = self._patch_row @ xjet
        patch_row[0] -= 1.0
        return np.vstack([rows, patch_row])

    def __repr__(self) -> str:
        return f"PatchedHomotopy({self.base!r})"
