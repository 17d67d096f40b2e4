#!/usr/bin/env python3
"""Short pulses shrink, shorter pulses vanish: the filtration trichotomy.

Any causal single-input circuit falls into one of three classes: it passes
arbitrarily short nonzero pulses, it swallows everything, or there is a sweet
spot where the output norm hits any target in between.  The exponential
channel is in the third class; bisection finds the input width whose output
has 1-norm exactly epsilon.  A storage loop built from one OR gate shows the
checks a short-pulse filter must pass.
"""

from hybridgates import (
    BinarySignal,
    Circuit,
    InputPort,
    OutputPort,
    bisect_pulse_norm,
    check_spf,
    execute,
    make_boolean_gate,
    make_idm_channel,
    min_pulse_width,
)

chan = Circuit(
    {"I": InputPort(0), "chan": make_idm_channel(), "O": OutputPort()},
    [("I", "chan", 0), ("chan", "O", 0)],
)

print("input width -> output 1-norm (exponential channel):")
for width in (0.3, 0.5, 0.7, 0.9, 1.1):
    ex = execute(chan, {"I": BinarySignal.pulse(1.0, width, 12.0)}, 12.0)
    out = ex.signals["O"]
    norm = min_pulse_width(out)
    print(f"  {width:.1f} -> {'no output' if not out.transitions else f'{norm:.6f}'}")

target = 0.25
width, norm = bisect_pulse_norm(chan, target, 0.5, 1.2, horizon=12.0)
print(f"\nbisection: input width {width:.6f} gives output norm {norm:.8f} (target {target})")

keep = make_boolean_gate("or2", (0.05, 0.05), tau_fast=0.02, initial_inputs=(0, 0), name="keep")
loop = Circuit(
    {"I": InputPort(0), "keep": keep, "O": OutputPort()},
    [("I", "keep", 0), ("keep", "keep", 1), ("keep", "O", 0)],
)
widths = [0.02 * i for i in range(1, 26)]
report = check_spf(loop, widths, horizon=30.0, epsilon=0.005, stabilization_bound=2.0)
print("\nstorage loop as a short-pulse filter:")
print(f"  zero in, zero out:            {report.no_generation}")
print(f"  some width produces output:   {report.nontrivial}")
print(f"  no output shorter than eps:   {report.no_short_outputs}")
print(f"  settles soon after the input: {report.bounded_stabilization}")
print(f"  verdict: {'filter' if report.ok else report.violations}")
