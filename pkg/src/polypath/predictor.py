"""Predictors for the path x(t): Euler/Heun/RK4 on the implicit-ODE
tangent field plus a (2,1) Pade approximant built from higher
t-derivatives.

The tangent solves H_x(x,t) xdot = -H_t(x,t).  A step of size dt moves
against t (t decreases toward the target), so predictors integrate with
the signed increment s = -dt.

The tangent at the step's base point is cached: after a rejected step
the base point has not moved, so the retry reuses the cached tangent and
every method spends exactly one linear solve less.  Intermediate-stage
tangents are never cached.  The cache also carries the per-path solve
counter used for statistics.

Pade(2,1) matches the local Taylor expansion c0 + c1 s + c2 s^2 + c3 s^3
componentwise with (a0 + a1 s + a2 s^2)/(1 + b1 s); the higher Taylor
coefficients come from truncated-series evaluations of H, each costing
one extra back-substitution on the already-factorized H_x.  Components
with c2 = 0 or a pole too close to the step fall back to the cubic
Taylor value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .corrector import refine
from .linalg import factorize, norm2, solve

__all__ = ["PredictorMethod", "TangentCache", "METHODS", "get_method",
           "tangent", "predict", "empirical_order", "IndeterminateOrderError"]


@dataclass(frozen=True)
class PredictorMethod:
    kind: str
    order: int      # p in the error model |x_hat - x| <= eta * dt^p
    stages: int     # tangent solves per prediction with a cold cache


METHODS = {
    "euler": PredictorMethod("euler", 2, 1),
    "heun": PredictorMethod("heun", 3, 2),
    "rk4": PredictorMethod("rk4", 5, 4),
    "pade21": PredictorMethod("pade21", 4, 3),
}


def get_method(name: str) -> PredictorMethod:
    try:
        return METHODS[name]
    except KeyError:
        raise ValueError(f"unknown predictor {name!r}; "
                         f"choose from {', '.join(METHODS)}") from None


@dataclass
class TangentCache:
    t: float = 0.0
    x: Optional[np.ndarray] = None
    tangent: Optional[np.ndarray] = None
    valid: bool = False
    solves: int = 0  # cumulative tangent-system solves through this cache

    def matches(self, x: np.ndarray, t: float) -> bool:
        return (self.valid and self.t == t and self.x is not None
                and self.x.shape == x.shape and bool(np.array_equal(self.x, x)))

    def store(self, x: np.ndarray, t: float, xdot: np.ndarray) -> None:
        self.t = float(t)
        self.x = np.array(x, copy=True)
        self.tangent = xdot
        self.valid = True


def tangent(h, x, t: float) -> np.ndarray:
    """xdot = -H_x^+ H_t at (x, t)."""
    _, J, Ht = h.eval_full(x, t)
    return solve(factorize(J), -Ht)


def _base_tangent(h, x, t, cache: TangentCache):
    """First-stage tangent, served from the cache when the base matches.

    Returns (xdot, factorization-or-None); the factorization is only
    available when the tangent was computed fresh.
    """
    if cache.matches(x, t):
        return cache.tangent, None
    _, J, Ht = h.eval_full(x, t)
    fact = factorize(J)
    xdot = solve(fact, -Ht)
    cache.solves += 1
    cache.store(x, t, xdot)
    return xdot, fact


def _stage_tangent(h, x, t, cache: TangentCache) -> np.ndarray:
    xdot = tangent(h, x, t)
    cache.solves += 1
    return xdot


def _pade21_values(c0, c1, c2, c3, s: float) -> np.ndarray:
    taylor = ((c3 * s + c2) * s + c1) * s + c0
    nonzero = c2 != 0
    b1 = np.where(nonzero, -c3 / np.where(nonzero, c2, 1.0), 0.0)
    den = 1.0 + b1 * s
    ok = nonzero & (np.abs(den) > 0.05)
    num = ((c2 + b1 * c1) * s + (c1 + b1 * c0)) * s + c0
    return np.where(ok, num / np.where(ok, den, 1.0), taylor)


def predict(method: PredictorMethod, h, x, t: float, dt: float,
            cache: TangentCache) -> np.ndarray:
    """Approximate x(t - dt) from the point (x, t)."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    x = np.asarray(x, dtype=np.complex128)
    s = -dt
    k1, fact = _base_tangent(h, x, t, cache)

    kind = method.kind
    if kind == "euler":
        return x + s * k1
    if kind == "heun":
        k2 = _stage_tangent(h, x + s * k1, t + s, cache)
        return x + (0.5 * s) * (k1 + k2)
    if kind == "rk4":
        half = 0.5 * s
        k2 = _stage_tangent(h, x + half * k1, t + half, cache)
        k3 = _stage_tangent(h, x + half * k2, t + half, cache)
        k4 = _stage_tangent(h, x + s * k3, t + s, cache)
        return x + (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if kind == "pade21":
        if fact is None:
            _, J, _ = h.eval_full(x, t)
            fact = factorize(J)
        xjet = np.zeros((x.shape[0], 4), dtype=np.complex128)
        xjet[:, 0] = x
        xjet[:, 1] = k1
        psi = h.eval_jet(xjet, t, 1.0)
        c2 = solve(fact, -psi[:, 2])
        cache.solves += 1
        xjet[:, 2] = c2
        psi = h.eval_jet(xjet, t, 1.0)
        c3 = solve(fact, -psi[:, 3])
        cache.solves += 1
        return _pade21_values(x, k1, c2, c3, s)
    raise ValueError(f"unknown predictor kind {kind!r}")


class IndeterminateOrderError(RuntimeError):
    """The path is too flat to measure a convergence order."""


_ORDER_GRID = np.geomspace(1e-1, 1e-3, 7)
_ORDER_SUBSTEPS = 8


def _reference_point(h, x, t: float, dt: float) -> np.ndarray:
    """High-accuracy x(t - dt): substepped RK4, then Newton polish."""
    xs = np.asarray(x, dtype=np.complex128)
    ts = t
    s = -dt / _ORDER_SUBSTEPS
    for _ in range(_ORDER_SUBSTEPS):
        k1 = tangent(h, xs, ts)
        k2 = tangent(h, xs + 0.5 * s * k1, ts + 0.5 * s)
        k3 = tangent(h, xs + 0.5 * s * k2, ts + 0.5 * s)
        k4 = tangent(h, xs + s * k3, ts + s)
        xs = xs + (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ts += s
    tol = 1e-13 * (1.0 + norm2(xs))
    return refine(h, xs, t - dt, tol, 10)


def empirical_order(method: PredictorMethod, h, x, t: float) -> float:
    """Least-squares slope of log error vs log dt against polished truth."""
    pts = []
    for dt in _ORDER_GRID:
        truth = _reference_point(h, x, t, dt)
        guess = predict(method, h, x, t, float(dt), TangentCache())
        err = norm2(guess - truth)
        if err > 1e-12 * (1.0 + norm2(truth)):
            pts.append((math.log(dt), math.log(err)))
    if len(pts) < 3:
        raise IndeterminateOrderError(
            "prediction errors sit at the noise floor; order not measurable")
    logs = np.array(pts)
    slope, _ = np.polyfit(logs[:, 0], logs[:, 1], 1)
    return float(slope)
