"""Step-size controllers for the path tracker.

The adaptive controller turns the corrector's by-products into the next
trial step.  Its ingredients:

* ``g(x) = sqrt(4x+1) - 1``, the inverse of the contraction map that
  links a predictor's initial error to the first Newton ratio Theta_0;
* ``delta(N, omega, tau)``, the largest Theta_0 from which N+1 Newton
  solves still certify accuracy tau;
* a local Lipschitz estimate ``omega`` fed by the corrector, decayed by
  a forgetting factor so stiff regions do not depress the step forever;
* a predictor-error coefficient ``eta = |predicted - corrected| / dt^p``
  with one-step linear extrapolation.

A rejected step shrinks by the ratio of where Theta_0 should have been
to where it was; a step rejected for other reasons simply halves.  The
classical baseline controller halves on rejection and doubles after M
consecutive successes.

Failure updates return the *unclamped* proposal on purpose: a value
below dt_min is the tracker's signal to abandon the path, while the
state itself keeps dt within its documented bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .corrector import omega_estimate

__all__ = ["AdaptiveState", "SimpleState", "g", "delta", "max_step",
           "adaptive_on_success", "adaptive_on_failure", "simple_update",
           "OMEGA_FLOOR", "ERROR_FLOOR"]

OMEGA_FLOOR = 1e-8
ERROR_FLOOR = 1e-14  # scaled by (1 + |x|) before use
OMEGA_FORGET = 0.5


def g(tau_arg: float) -> float:
    """sqrt(4x+1) - 1, computed without cancellation for small x."""
    if tau_arg < 0:
        raise ValueError("g is defined for nonnegative arguments")
    return 4.0 * tau_arg / (math.sqrt(4.0 * tau_arg + 1.0) + 1.0)


def delta(N: int, omega: float, tau: float) -> float:
    """Largest safe first contraction ratio for an (N+1)-solve corrector."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    if not tau > 0:
        raise ValueError("tau must be positive")
    if omega == 0.0:
        return 0.0
    half = 0.5 * omega
    val = math.sqrt(half) * (tau / (1.0 + half * tau)) ** (1.0 / (2 * N))
    return min(val, 1.0)


def max_step(omega: float, eta: float, p: int, N: int, tau: float,
             remaining: float = math.inf) -> float:
    """Largest feasible step under the current omega and eta estimates."""
    if not omega > 0 or not eta > 0:
        raise ValueError("omega and eta must be positive (apply floors first)")
    if p < 1:
        raise ValueError("p must be at least 1")
    dt = (g(delta(N, omega, tau)) / (omega * eta)) ** (1.0 / p)
    return min(dt, remaining)


@dataclass
class AdaptiveState:
    N: int
    tau: float
    p: int
    omega: float = 1.0
    eta_prev: Optional[float] = None
    eta_curr: Optional[float] = None
    mu: float = 0.9
    dt: float = 0.1
    dt_min: float = 1e-14
    dt_max_user: float = 0.25

    def __post_init__(self):
        if not 0 < self.mu <= 1:
            raise ValueError("mu must lie in (0, 1]")
        if self.omega < 0:
            raise ValueError("omega must be nonnegative")
        if not self.dt_min <= self.dt <= self.dt_max_user:
            raise ValueError("dt must lie in [dt_min, dt_max_user]")
        if self.N < 1 or self.p < 1:
            raise ValueError("N and p must be at least 1")
        if not self.tau > 0:
            raise ValueError("tau must be positive")


def adaptive_on_success(state: AdaptiveState, correction_norms: Sequence[float],
                        prediction_error: float, dt_used: float, *,
                        remaining: float = math.inf,
                        x_norm: float = 0.0) -> float:
    """Accepted step: refresh omega and eta, propose the next step size.

    ``remaining`` caps the proposal at the distance left to the target;
    ``x_norm`` scales the floor that guards against an exactly perfect
    prediction.
    """
    est = omega_estimate(correction_norms)
    if est is not None:
        state.omega = max(est, OMEGA_FORGET * state.omega)
    state.omega = max(state.omega, OMEGA_FLOOR)

    err = max(prediction_error, ERROR_FLOOR * (1.0 + x_norm))
    eta_new = err / dt_used ** state.p
    state.eta_prev = state.eta_curr
    state.eta_curr = eta_new
    if state.eta_prev is not None:
        eta_hat = max(2.0 * eta_new - state.eta_prev, eta_new)
        err = err * (eta_hat / eta_new)

    gd = g(delta(state.N, state.omega, state.tau))
    dt = state.mu * (gd / (state.omega * err)) ** (1.0 / state.p) * dt_used
    dt = max(state.dt_min, min(dt, state.dt_max_user))
    dt = min(dt, remaining)
    state.dt = max(dt, state.dt_min)
    return dt


def adaptive_on_failure(state: AdaptiveState, theta0: Optional[float],
                        dt_used: float) -> float:
    """Rejected step: shrink.  May return a proposal below dt_min."""
    if theta0 is not None:
        d = delta(state.N, state.omega, state.tau)
        if theta0 > d:
            dt = (g(d) / g(theta0)) ** (1.0 / state.p) * dt_used
            state.dt = max(dt, state.dt_min)
            return dt
    dt = 0.5 * dt_used
    state.dt = max(dt, state.dt_min)
    return dt


@dataclass
class SimpleState:
    a: float = 0.5
    M: int = 5
    consecutive_successes: int = 0
    dt: float = 0.1
    dt_min: float = 1e-14
    dt_max_user: float = 0.25

    def __post_init__(self):
        if not 0 < self.a < 1:
            raise ValueError("a must lie in (0, 1)")
        if self.M < 1:
            raise ValueError("M must be positive")
        if self.consecutive_successes < 0:
            raise ValueError("consecutive_successes must be nonnegative")


def simple_update(state: SimpleState, accepted: bool) -> float:
    """Halve on rejection, expand by 1/a after M successes in a row."""
    if not accepted:
        state.consecutive_successes = 0
        dt = state.a * state.dt
        state.dt = max(dt, state.dt_min)
        return dt
    state.consecutive_successes += 1
    if state.consecutive_successes >= state.M:
        state.consecutive_successes = 0
        state.dt = min(state.dt / state.a, state.dt_max_user)
    return state.dt
