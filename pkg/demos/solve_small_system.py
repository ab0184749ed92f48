"""Solve a small polynomial system end to end.

The intersection of a circle and a hyperbola:

    x^2 + y^2 = 5
    x*y = 2

has four real solutions, (1,2), (2,1), (-1,-2), (-2,-1).  Bezout's
bound for the degrees (2,2) is also four, so every start path of the
total-degree homotopy ends at a finite root.
"""
from polypath import TrackerOptions, parse_system, solve

SYSTEM = """\
vars: x, y
x^2 + y^2 - 5
x*y - 2
"""


def main():
    target = parse_system(SYSTEM)
    report = solve(target, TrackerOptions(), rng_seed=0)

    print(f"tracked {report.n_paths} paths with gamma = {report.gamma:.6f}")
    print(f"finite solutions: {len(report.solutions)}, "
          f"at infinity: {report.at_infinity}, failed: {report.failures}")
    print(f"average steps per path: {report.averages['total']:.1f} "
          f"({report.averages['rejected']:.2f} rejected)")
    print()
    for sol in report.solutions:
        x, y = sol.point
        print(f"  x = {x: .12f}   y = {y: .12f}   "
              f"residual = {sol.residual:.2e}")


if __name__ == "__main__":
    main()
