"""Watch the adaptive controller steer one path.

We track a single root of x^3 - 2 from the start system x^3 - 1 and log
every attempt: the controller starts cautiously, grows the step while
the corrector reports easy contractions, shrinks exactly where the path
bends, and lands on t = 0 with a final step cut to fit.

Theta_0 is the corrector's first contraction ratio for the attempt; on
rejected attempts it is what told the controller the prediction was too
ambitious.
"""
import numpy as np

from polypath import (CorrectorOptions, TrackerOptions, homogenize,
                      parse_system, straight_line, track)


def main():
    target = homogenize(parse_system("vars: x\nx^3 - 2\n"))
    start = homogenize(parse_system("vars: x\nx^3 - 1\n"))
    h = straight_line(target, start, np.exp(1.9j))

    log = []
    opts = TrackerOptions(predictor="heun",
                          corrector=CorrectorOptions(tau=1e-9),
                          dt_init=0.02)
    result = track(h, [1.0, 1.0], opts, step_observer=log.append)

    print(f"{'':>4} {'t':>10} {'dt tried':>10} {'Theta_0':>9}")
    for i, rec in enumerate(log):
        mark = "ok " if rec.accepted else "REJ"
        theta = f"{rec.theta0:9.5f}" if rec.theta0 is not None else "        -"
        print(f"{i:>4} {rec.t:>10.6f} {rec.dt:>10.6f} {theta}  {mark}")

    s = result.stats
    print(f"\nstatus {result.status}: {s.accepted} accepted, "
          f"{s.rejected} rejected, {s.newton_iters_total} corrector solves, "
          f"{s.tangent_solves} tangent solves")
    print(f"endpoint (affine): {result.endpoint[1] / result.endpoint[0]:.12f}")
    print(f"cube root of 2:    {2 ** (1 / 3):.12f}")


if __name__ == "__main__":
    main()
