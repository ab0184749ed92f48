"""The predictor-corrector tracking loop and the end-to-end solver.

track() advances one path of a projective homotopy from t_start down to
t_end: predict with the configured method, correct with the bounded
Newton corrector, then either accept (update the patch, feed the
controller, advance) or reject (shrink the step, retry with the cached
tangent).  solve() builds the total-degree start pair for a square
target system and tracks every start solution, then polishes, filters
and deduplicates the endpoints.  benchmark() runs the same paths under
two controller configurations and reports per-path step averages.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .algebra import PolynomialSystem, homogenize, total_degree_start
from .corrector import CorrectorOptions, DivergenceError, newton_correct, refine
from .homotopy import Homotopy, PatchedHomotopy, straight_line
from .linalg import RankDeficientError, norm2
from .predictor import PredictorMethod, TangentCache, get_method, predict
from .projective import chordal_distance, dehomogenize, init_patch, update_patch
from .stepcontrol import (AdaptiveState, SimpleState, adaptive_on_failure,
                          adaptive_on_success, simple_update)

__all__ = ["TrackerOptions", "StepStats", "PathResult", "StepRecord",
           "Solution", "SolveReport", "BenchmarkRow", "BenchmarkResult",
           "StepAverages", "track", "solve", "benchmark", "measure_steps"]

CONTROLLERS = ("adaptive", "simple")

# projective classification/cleanup constants
INFINITY_CUTOFF = 1e-6      # |x_0| <= cutoff * |x| counts as at infinity
DEDUP_TOL = 1e-6            # chordal distance below which endpoints merge
REFINE_TOL = 1e-12
RESIDUAL_TOL = 1e-8


@dataclass
class TrackerOptions:
    predictor: Optional[PredictorMethod] = None
    controller: str = "adaptive"
    corrector: CorrectorOptions = field(default_factory=CorrectorOptions)
    patch: str = "orthogonal"
    t_start: float = 1.0
    t_end: float = 0.0
    dt_init: float = 0.1
    dt_min: float = 1e-14
    dt_max: float = 0.25
    growth_cap: float = 1.6  # max expansion of dt per accepted step
    mu: float = 0.65
    omega_init: float = 1.0
    simple_a: float = 0.5
    simple_M: int = 5
    max_steps: int = 10_000  # safety valve against controller stalls

    def __post_init__(self):
        if self.predictor is None:
            self.predictor = get_method("heun")
        elif isinstance(self.predictor, str):
            self.predictor = get_method(self.predictor)
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}")
        if self.patch not in ("fixed_random", "orthogonal"):
            raise ValueError("patch must be fixed_random or orthogonal")
        # equality is allowed so that a zero-length track degenerates cleanly
        if not 0.0 <= self.t_end <= self.t_start <= 1.0:
            raise ValueError("need 0 <= t_end <= t_start <= 1")
        if not 0 < self.dt_min <= self.dt_init <= self.dt_max:
            raise ValueError("need 0 < dt_min <= dt_init <= dt_max")
        if not self.growth_cap > 1.0:
            raise ValueError("growth_cap must exceed 1")

    def fresh_controller(self):
        if self.controller == "adaptive":
            return AdaptiveState(N=self.corrector.max_newton_iters,
                                 tau=self.corrector.tau,
                                 p=self.predictor.order,
                                 omega=self.omega_init, mu=self.mu,
                                 dt=self.dt_init, dt_min=self.dt_min,
                                 dt_max_user=self.dt_max)
        return SimpleState(a=self.simple_a, M=self.simple_M, dt=self.dt_init,
                           dt_min=self.dt_min, dt_max_user=self.dt_max)


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    newton_iters_total: int = 0
    tangent_solves: int = 0


@dataclass
class PathResult:
    status: str
    endpoint: np.ndarray
    t_reached: float
    stats: StepStats


@dataclass
class StepRecord:
    """Snapshot handed to a step observer after every attempt."""
    accepted: bool
    t: float                 # t after the attempt (unchanged if rejected)
    dt: float                # step size that was attempted
    x: np.ndarray            # current point (rescaled onto the patch)
    theta0: Optional[float]
    corrector: object        # CorrectorResult or None if prediction failed
    homotopy: PatchedHomotopy


def _norms_for_controller(res, opts: CorrectorOptions) -> list:
    """Correction norms whose consecutive pairs are genuine full steps."""
    norms = res.correction_norms
    if (opts.criterion == "simplified_a_priori"
            and len(norms) == opts.max_newton_iters + 1):
        return norms[:-1]
    return norms


def track(h: Homotopy, x_start, opts: TrackerOptions, *,
          patch_seed=0,
          step_observer: Optional[Callable[[StepRecord], None]] = None) -> PathResult:
    """Track one path from (x_start, t_start) to t_end.

    Numerical failures land in the result status; only malformed inputs
    raise.  patch_seed feeds the fixed_random patch draw; step_observer,
    when given, is called after every accepted or rejected attempt.
    """
    x_start = np.asarray(x_start, dtype=np.complex128)
    stats = StepStats()
    if opts.t_start == opts.t_end:
        return PathResult("success", x_start, opts.t_end, stats)

    strategy = init_patch(opts.patch, x_start, patch_seed)
    strategy, x = update_patch(strategy, x_start)
    ph = PatchedHomotopy(h, strategy.vector)

    t = opts.t_start
    resid = norm2(ph.evaluate(x, t))
    if not resid < 1e-10:
        raise ValueError(f"x_start is not on the path: |H| = {resid:.3e}")

    state = opts.fresh_controller()
    adaptive = opts.controller == "adaptive"
    cache = TangentCache()
    status = None

    while t > opts.t_end:
        if stats.accepted + stats.rejected >= opts.max_steps:
            status = "step_size_too_small"
            break
        remaining = t - opts.t_end
        dt = min(state.dt, remaining)
        t_next = opts.t_end if dt >= remaining else t - dt

        res = None
        theta0 = None
        accepted = False
        try:
            base_was_cached = cache.matches(x, t)
            xhat = predict(opts.predictor, ph, x, t, dt, cache)
            if np.isfinite(xhat).all():
                res = newton_correct(ph, xhat, t_next, opts.corrector)
                stats.newton_iters_total += res.solves
                theta0 = res.thetas[0] if res.thetas else None
                accepted = res.converged
        except RankDeficientError:
            if not cache.matches(x, t) and not base_was_cached:
                # the tangent system at the accepted base point itself is
                # singular; no step size can fix that
                status = "singular_jacobian"
                break

        if accepted:
            stats.accepted += 1
            prediction_error = norm2(xhat - res.x)
            t = t_next
            try:
                strategy, x = update_patch(strategy, res.x)
            except ValueError:
                status = "diverged"
                break
            ph.set_patch(strategy.vector)
            if adaptive:
                adaptive_on_success(state, _norms_for_controller(res, opts.corrector),
                                    prediction_error, dt,
                                    remaining=t - opts.t_end, x_norm=norm2(x))
                # eta measured at the current dt underestimates eta at a
                # much larger one whenever the error coefficient itself is
                # growing, so cap the per-step expansion like any ODE
                # controller does.
                state.dt = min(state.dt, opts.growth_cap * dt)
            else:
                simple_update(state, True)
        else:
            stats.rejected += 1
            if adaptive:
                proposal = adaptive_on_failure(state, theta0, dt)
                # The ratio shrink aims the retry exactly at the acceptance
                # boundary, and in stiff stretches the corrector's
                # certificates only fire strictly inside it; left alone the
                # retries stall there, shaving slivers off dt.  Insist on
                # geometric progress instead.
                if proposal > 0.5 * dt:
                    proposal = 0.5 * dt
                    state.dt = max(proposal, state.dt_min)
            else:
                proposal = simple_update(state, False)
            if proposal < opts.dt_min:
                status = "step_size_too_small"
                break

        if step_observer is not None:
            step_observer(StepRecord(accepted, t, dt, x, theta0, res, ph))

    if status is None:
        status = "success" if t <= opts.t_end else "step_size_too_small"
    stats.tangent_solves = cache.solves
    return PathResult(status, x, t, stats)


@dataclass
class Solution:
    point: np.ndarray        # affine coordinates
    homogeneous: np.ndarray  # unit-norm projective representative
    multiplicity: int        # paths that landed here (>1 flags path jumps)
    residual: float          # scaled target residual
    path_index: int


@dataclass
class SolveReport:
    gamma: complex
    seed: object
    n_paths: int
    paths: list
    solutions: list
    at_infinity: int
    failures: int
    averages: dict


def _scaled_residual(target: PolynomialSystem, point: np.ndarray) -> float:
    d = max(target.degrees)
    return norm2(target.evaluate(point)) / (1.0 + norm2(point) ** d)


def _refine_endpoint(h: Homotopy, endpoint: np.ndarray, t_end: float) -> np.ndarray:
    """Newton-polish a homogeneous endpoint on its own orthogonal patch."""
    x = endpoint / norm2(endpoint)
    ph = PatchedHomotopy(h, x)
    try:
        x = refine(ph, x, t_end, REFINE_TOL, 12)
    except (RankDeficientError, DivergenceError):
        return endpoint  # singular endpoint: report it as tracked
    return x / norm2(x)


def _start_points(start_solutions: np.ndarray) -> np.ndarray:
    ones = np.ones((start_solutions.shape[0], 1), dtype=np.complex128)
    return np.hstack([ones, start_solutions])


def _draw_gamma(seed) -> complex:
    rng = np.random.default_rng(np.random.SeedSequence(seed) if seed is not None
                                else None)
    return complex(np.exp(2j * np.pi * rng.uniform()))


def _track_all(h: Homotopy, points: np.ndarray, opts: TrackerOptions,
               seed, threads: int = 1) -> list:
    def one(idx):
        ps = np.random.SeedSequence([seed if seed is not None else 0, idx])
        return track(h, points[idx], opts, patch_seed=ps)

    if threads <= 1:
        return [one(i) for i in range(points.shape[0])]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(points.shape[0])))


def solve(target: PolynomialSystem, opts: TrackerOptions, rng_seed=0,
          threads: int = 1) -> SolveReport:
    """Find all isolated roots of a square system by continuation."""
    if target.npolys != target.nvars:
        raise ValueError("solve needs a square system")
    hom = homogenize(target)
    pair = total_degree_start(target)
    start_hom = homogenize(pair.system)
    gamma = _draw_gamma(rng_seed)
    h = straight_line(hom, start_hom, gamma)
    points = _start_points(pair.solutions)
    results = _track_all(h, points, opts, rng_seed, threads)

    solutions = []
    at_infinity = 0
    failures = 0
    finished = opts.t_end == 0.0
    for idx, pr in enumerate(results):
        if pr.status != "success":
            failures += 1
            continue
        if not finished:
            continue
        x = _refine_endpoint(h, pr.endpoint, opts.t_end)
        if abs(x[0]) <= INFINITY_CUTOFF * norm2(x):
            at_infinity += 1
            continue
        for sol in solutions:
            if chordal_distance(sol.homogeneous, x) < DEDUP_TOL:
                sol.multiplicity += 1
                break
        else:
            aff = dehomogenize(x)
            solutions.append(Solution(aff, x, 1, _scaled_residual(target, aff), idx))

    n = len(results)
    averages = {
        "accepted": sum(r.stats.accepted for r in results) / n,
        "rejected": sum(r.stats.rejected for r in results) / n,
        "total": sum(r.stats.accepted + r.stats.rejected for r in results) / n,
        "newton_iters": sum(r.stats.newton_iters_total for r in results) / n,
        "tangent_solves": sum(r.stats.tangent_solves for r in results) / n,
    }
    return SolveReport(gamma, rng_seed, n, results, solutions,
                       at_infinity, failures, averages)


@dataclass
class BenchmarkRow:
    label: str
    accepted: float
    rejected: float
    total: float
    ratio: float
    failures: int


@dataclass
class BenchmarkResult:
    rows: list
    runs: int
    n_paths: int


@dataclass
class StepAverages:
    accepted: float
    rejected: float
    total: float
    tangent_solves: float
    failures: int


def _run_seed(rng_seed, run: int):
    if rng_seed is None:
        return None
    return int(np.random.SeedSequence([rng_seed, run]).generate_state(1)[0])


def _step_sums(hom, start_hom, points, opts: TrackerOptions, runs: int,
               rng_seed, threads: int) -> StepAverages:
    accepted = rejected = tangents = 0.0
    failures = 0
    for run in range(runs):
        seed = _run_seed(rng_seed, run)
        h = straight_line(hom, start_hom, _draw_gamma(seed))
        results = _track_all(h, points, opts, seed, threads)
        accepted += sum(r.stats.accepted for r in results)
        rejected += sum(r.stats.rejected for r in results)
        tangents += sum(r.stats.tangent_solves for r in results)
        failures += sum(r.status != "success" for r in results)
    norm = runs * points.shape[0]
    return StepAverages(accepted / norm, rejected / norm,
                        (accepted + rejected) / norm, tangents / norm,
                        failures)


def _start_setup(target: PolynomialSystem):
    if target.npolys != target.nvars:
        raise ValueError("benchmark needs a square system")
    hom = homogenize(target)
    pair = total_degree_start(target)
    return hom, homogenize(pair.system), _start_points(pair.solutions)


def measure_steps(target: PolynomialSystem, opts: TrackerOptions, runs: int,
                  rng_seed=0, threads: int = 1) -> StepAverages:
    """Per-path step averages for one configuration over `runs` gamma draws."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    hom, start_hom, points = _start_setup(target)
    return _step_sums(hom, start_hom, points, opts, runs, rng_seed, threads)


def benchmark(target: PolynomialSystem, opts_old: TrackerOptions,
              opts_new: TrackerOptions, runs: int, rng_seed=0,
              threads: int = 1) -> BenchmarkResult:
    """Average per-path step counts under two configurations.

    Both sides track exactly the same homotopies: each run draws one
    gamma and one set of patch seeds, shared between configurations.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    hom, start_hom, points = _start_setup(target)
    old = _step_sums(hom, start_hom, points, opts_old, runs, rng_seed, threads)
    new = _step_sums(hom, start_hom, points, opts_new, runs, rng_seed, threads)
    rows = []
    for label, avg in (("old", old), ("new", new)):
        ratio = avg.total / old.total if old.total > 0 else math.nan
        rows.append(BenchmarkRow(label, avg.accepted, avg.rejected,
                                 avg.total, ratio, avg.failures))
    return BenchmarkResult(rows, runs, points.shape[0])
