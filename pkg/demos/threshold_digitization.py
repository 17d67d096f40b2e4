#!/usr/bin/env python3
"""From analog trajectory to binary signal, and how stable that step is.

A comparator turns the first state component into a bit stream.  Digitization
is discontinuous in general (a trajectory grazing the threshold can gain or
lose crossings), but transversal crossings move only as far as the analog
perturbation divided by the crossing slope.  The table shows that scaling.
"""

import math

from hybridgates import StateSpace, ThresholdSpec, Trajectory, affine_mode, digitize, one_norm_distance, solve_mode

box = StateSpace(((-2.0, 2.0),))
spec = ThresholdSpec(0.5)

# x(t) = exp(-t) crosses 0.5 at ln 2 with slope -0.5
decay = affine_mode("decay", [[-1.0]], [0.0], box)
base_traj = Trajectory([solve_mode(decay, [1.0], 0.0, 10.0, box)])
base = digitize(base_traj, spec)
print(f"exp(-t) digitized at 0.5: initial {base.initial_value}, transitions {[(round(t.time, 6), t.value) for t in base.transitions]}")
print(f"exact crossing ln 2 = {math.log(2.0):.6f}")

print(f"\n{'delta':>8} {'1-norm gap':>12} {'gap / delta':>12}")
for exponent in range(1, 7):
    delta = 10.0 ** -exponent
    lifted = affine_mode("lifted", [[-1.0]], [delta], box)
    # exp(-t) + delta: same curve shifted up, crossing moves later
    traj = Trajectory([solve_mode(lifted, [1.0 + delta], 0.0, 10.0, box)])
    gap = one_norm_distance(digitize(traj, spec), base)
    print(f"{delta:>8.0e} {gap:>12.4e} {gap / delta:>12.4f}")

print("\ngap/delta settles at 1/|slope| = 2, the transversality constant")
