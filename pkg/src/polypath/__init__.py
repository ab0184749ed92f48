"""polypath: polynomial system solving by homotopy continuation.

The pieces, bottom to top: sparse polynomials and classic benchmark
families (algebra), straight-line homotopies on projective patches
(homotopy, projective), a bounded Newton corrector that certifies its
accuracy (corrector), tangent-based predictors with caching
(predictor), adaptive and classical step-size controllers
(stepcontrol), and the path tracker / solver / benchmark driver on top
(tracker).  The command line lives in polypath.cli.
"""
from .algebra import (ParseError, Polynomial, PolynomialSystem, StartPair,
                      format_system, generate_benchmark, homogenize,
                      parse_system, total_degree_start)
from .corrector import (CorrectorOptions, CorrectorResult, DivergenceError,
                        newton_correct, omega_estimate, refine)
from .homotopy import Homotopy, PatchedHomotopy, straight_line
from .linalg import RankDeficientError, norm2
from .predictor import (METHODS, PredictorMethod, TangentCache,
                        empirical_order, get_method, predict, tangent)
from .projective import chordal_distance, dehomogenize, init_patch, update_patch
from .stepcontrol import (AdaptiveState, SimpleState, adaptive_on_failure,
                          adaptive_on_success, delta, g, max_step,
                          simple_update)
from .tracker import (BenchmarkResult, BenchmarkRow, PathResult, Solution,
                      SolveReport, StepAverages, StepRecord, StepStats,
                      TrackerOptions, benchmark, measure_steps, solve, track)

__all__ = [
    "ParseError", "Polynomial", "PolynomialSystem", "StartPair",
    "format_system", "generate_benchmark", "homogenize", "parse_system",
    "total_degree_start",
    "CorrectorOptions", "CorrectorResult", "DivergenceError",
    "newton_correct", "omega_estimate", "refine",
    "Homotopy", "PatchedHomotopy", "straight_line",
    "RankDeficientError", "norm2",
    "METHODS", "PredictorMethod", "TangentCache", "empirical_order",
    "get_method", "predict", "tangent",
    "chordal_distance", "dehomogenize", "init_patch", "update_patch",
    "AdaptiveState", "SimpleState", "adaptive_on_failure",
    "adaptive_on_success", "delta", "g", "max_step", "simple_update",
    "BenchmarkResult", "BenchmarkRow", "PathResult", "Solution",
    "SolveReport", "StepAverages", "StepRecord", "StepStats",
    "TrackerOptions", "benchmark", "measure_steps", "solve", "track",
]
