"""Compare predictor methods: measured convergence order and step counts.

First, each predictor's empirical order on a curved test path: slope of
log(prediction error) against log(step size).  Euler is second order,
Heun third, the 2/1 Pade predictor fourth, classical Runge-Kutta fifth
(orders here count the exponent p in error ~ dt^p, one more than the
classical ODE order, because the controller consumes them that way).

Then per-path step counts on katsura-6 under the adaptive controller.
Higher order means larger steps and fewer of them -- but every stage of
a prediction is a linear solve, so fewer steps does not automatically
mean less work.  Tangent solves per path is the column to watch.
"""
import numpy as np

from polypath import (METHODS, PatchedHomotopy, TrackerOptions,
                      empirical_order, generate_benchmark, homogenize,
                      measure_steps, parse_system, straight_line, track)


def main():
    target = homogenize(parse_system("vars: x\nx^3 - 2\n"))
    start = homogenize(parse_system("vars: x\nx^3 - 1\n"))
    h = straight_line(target, start, np.exp(1.9j))
    res = track(h, [1.0, 1.0], TrackerOptions(t_end=0.5))
    ph = PatchedHomotopy(h, res.endpoint)

    print("empirical order (error ~ dt^p):")
    for name, method in sorted(METHODS.items(), key=lambda kv: kv[1].order):
        slope = empirical_order(method, ph, res.endpoint, 0.5)
        print(f"  {name:>7}: measured {slope:4.2f}, nominal {method.order}")

    kat = generate_benchmark("katsura", 6)
    print(f"\nkatsura-6, 64 paths, t down to 0.1, per-path averages:")
    print(f"{'predictor':>9} {'steps':>7} {'rejected':>9} {'tangent solves':>15}")
    for name, method in sorted(METHODS.items(), key=lambda kv: kv[1].order):
        avg = measure_steps(kat, TrackerOptions(predictor=name, t_end=0.1),
                            runs=1, rng_seed=3)
        print(f"{name:>9} {avg.total:>7.1f} {avg.rejected:>9.2f} "
              f"{avg.tangent_solves:>15.1f}")


if __name__ == "__main__":
    main()
