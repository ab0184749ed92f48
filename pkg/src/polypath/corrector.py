"""Bounded Newton corrector with contraction monitoring.

The corrector runs x^{k+1} = x^k - J(x^k)^+ H(x^k, t) for at most N+1
linear solves and certifies the result through one of three termination
criteria built on the contraction ratios Theta_k = |dx^{k+1}|/|dx^k|:

* ``a_posteriori``        accept once |dx^k| / (1 - Theta_k) <= tau; needs
                          the next correction, so it trails by one solve.
* ``a_priori``            accept once |dx^k| / (1 - 2 Theta_{k-1}^2) <= tau,
                          checkable as soon as dx^k exists.
* ``simplified_a_priori`` run exactly N full steps, then a cheap extra
                          step reusing the last factorization; accept on
                          the same a-priori form with the cheap step's
                          ratio.  This is the default.

Any contraction ratio >= 1/2 aborts the attempt: the iteration is not in
the quadratic convergence basin (and the step likely jumped paths).

One concession to floating point: once a correction is at working
precision (a small multiple of machine epsilon at the iterate's scale)
the iterate cannot be improved and is accepted outright.  Without this,
a predictor that lands within rounding error of the path makes every
contraction ratio pure noise and the step would be rejected forever.
The accuracy_bound declared on that shortcut is the working-precision
floor itself, not the measured correction: a correction of a few ulps
says nothing tighter than "as close as doubles can represent".  The
one exception is a first correction of exactly zero, where the input
is a fixed point of the Newton map and the bound is reported as 0.

The largest observed 2|dx^k|/|dx^{k-1}|^2 doubles as a local Lipschitz
estimate for the step-size controller; it is computed over full steps
only, since the reused-Jacobian step contracts linearly, not
quadratically, and would wildly inflate the estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import factorize, norm2, solve

__all__ = ["CorrectorOptions", "CorrectorResult", "DivergenceError",
           "newton_correct", "omega_estimate", "refine"]

CRITERIA = ("a_posteriori", "a_priori", "simplified_a_priori")

_NOISE_EPS = 8.0 * np.finfo(np.float64).eps


def _noise_floor(x: np.ndarray) -> float:
    """Correction size below which double precision has nothing to say."""
    return _NOISE_EPS * (1.0 + norm2(x))


class DivergenceError(RuntimeError):
    """Newton refinement moved away from a root."""


@dataclass
class CorrectorOptions:
    tau: float = 1e-7
    max_newton_iters: int = 2  # N: full Newton steps; N+1 solves total
    criterion: str = "simplified_a_priori"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be at least 1")
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")


@dataclass
class CorrectorResult:
    iterates: list = field(default_factory=list)
    correction_norms: list = field(default_factory=list)
    thetas: list = field(default_factory=list)
    omega_est: Optional[float] = None
    converged: bool = False
    accuracy_bound: float = math.inf

    @property
    def x(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def solves(self) -> int:
        return len(self.correction_norms)


def omega_estimate(correction_norms: Sequence[float]) -> Optional[float]:
    """Largest observed 2|dx^k| / |dx^{k-1}|^2, or None below two norms."""
    vals = [2.0 * b / (a * a)
            for a, b in zip(correction_norms, correction_norms[1:]) if a > 0]
    return max(vals) if vals else None


def newton_correct(h, x0, t: float, opts: CorrectorOptions) -> CorrectorResult:
    """Correct x0 toward a zero of H(., t); never raises on bad contraction.

    A rank-deficient Jacobian propagates as linalg.RankDeficientError so
    the caller can treat it as a step failure.
    """
    x = np.asarray(x0, dtype=np.complex128)
    res = CorrectorResult(iterates=[x])
    crit = opts.criterion
    simplified = crit == "simplified_a_priori"
    full_budget = opts.max_newton_iters if simplified else opts.max_newton_iters + 1

    fact = None
    healthy = True
    for k in range(full_budget):
        H, J = h.eval_and_jac(x, t)
        fact = factorize(J)
        dx = solve(fact, -H)
        nrm = norm2(dx)
        if not math.isfinite(nrm):
            healthy = False
            break
        res.correction_norms.append(nrm)
        x = x + dx
        res.iterates.append(x)
        if nrm <= _noise_floor(x):
            res.converged = True
            res.accuracy_bound = 0.0 if (nrm == 0.0 and k == 0) else _noise_floor(x)
            res.omega_est = omega_estimate(res.correction_norms)
            return res
        if k >= 1:
            theta = res.correction_norms[k] / res.correction_norms[k - 1]
            res.thetas.append(theta)
            if theta >= 0.5:
                healthy = False
                break
            if crit == "a_priori":
                denom = 1.0 - 2.0 * theta * theta
                if denom > 0:
                    lhs = res.correction_norms[k] / denom
                    if lhs <= opts.tau:
                        res.converged = True
                        res.accuracy_bound = lhs
                        break
            elif crit == "a_posteriori":
                # theta = Theta_{k-1}, certifying iterate k-1
                denom = 1.0 - theta
                if denom > 0:
                    lhs = res.correction_norms[k - 1] / denom
                    if lhs <= opts.tau:
                        res.converged = True
                        res.accuracy_bound = lhs
                        break

    if simplified and healthy and not res.converged:
        # one extra step from x^N reusing the factorization of J(x^{N-1})
        H = h.evaluate(x, t)
        dx = solve(fact, -H)
        nrm = norm2(dx)
        if math.isfinite(nrm):
            n_full = len(res.correction_norms)
            res.correction_norms.append(nrm)
            x = x + dx
            res.iterates.append(x)
            if nrm <= _noise_floor(x):
                res.converged = True
                res.accuracy_bound = _noise_floor(x)
            else:
                theta = nrm / res.correction_norms[n_full - 1]
                res.thetas.append(theta)
                if theta < 0.5:
                    denom = 1.0 - 2.0 * theta * theta
                    if denom > 0:
                        lhs = nrm / denom
                        res.accuracy_bound = lhs
                        res.converged = lhs <= opts.tau
            res.omega_est = omega_estimate(res.correction_norms[:n_full])
            return res

    res.omega_est = omega_estimate(res.correction_norms)
    return res


def refine(h, x, t: float, tol: float, max_iters: int) -> np.ndarray:
    """Polish a point near a regular zero until |dx| <= tol or budget."""
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    x = np.asarray(x, dtype=np.complex128)
    prev = None
    for _ in range(max_iters):
        H, J = h.eval_and_jac(x, t)
        dx = solve(factorize(J), -H)
        nrm = norm2(dx)
        if not math.isfinite(nrm):
            raise DivergenceError("refinement produced non-finite correction")
        x = x + dx
        if nrm <= tol or nrm <= _noise_floor(x):
            break
        if prev is not None and nrm > prev:
            raise DivergenceError("refinement corrections are growing")
        prev = nrm
    return x
