#!/usr/bin/env python3
"""Nearby mode-switch schedules produce nearby trajectories.

Drive the NOR's mode family with a switching signal, jitter every switch time
by progressively smaller amounts, and watch the sup-norm gap between the two
trajectories shrink together with the schedule distance.  The gap always stays
under the a-priori envelope 2 M exp(T K) d(a, b).
"""

import math
import random

from hybridgates import ModeSwitchSignal, make_simple_nor, matching_output_signal, mode_distance, sup_distance

nor = make_simple_nor()
family = {f"m{a}{b}": nor.choice((a, b), (a, b), None) for a in (0, 1) for b in (0, 1)}
K = max(m.lipschitz_k for m in family.values())
M = max(m.rhs_bound_m for m in family.values())
T = 5.0
envelope = 2.0 * M * math.exp(T * K)
print(f"K={K:.4f}  M={M:.4f}  envelope factor 2M*exp(TK) = {envelope:.1f}")

base = ModeSwitchSignal("m00", ((0.8, "m10"), (1.9, "m11"), (3.1, "m01"), (4.2, "m00")), T)
x0 = (0.2, 0.7)
xa = matching_output_signal(family, base, x0, nor.state_space)

rng = random.Random(7)
print(f"\n{'jitter':>10} {'d(a,b)':>12} {'sup gap':>12} {'envelope':>12}")
for exponent in range(1, 7):
    scale = 10.0 ** -exponent
    moved = sorted((min(max(t + rng.uniform(-scale, scale), 0.0), T), m) for t, m in base.switches)
    other = ModeSwitchSignal(base.initial_mode, tuple(moved), T)
    d = mode_distance(base, other)
    xb = matching_output_signal(family, other, x0, nor.state_space)
    gap = sup_distance(xa, xb, samples=4000)
    print(f"{scale:>10.0e} {d:>12.3e} {gap:>12.3e} {envelope * d:>12.3e}")
