"""Hybrid gate models: digitized analog channels driven by delayed inputs.

A gate owns per-input pure delays, a family of internal ODE modes, and a
threshold comparator on one state component.  Each delayed input edge may
switch the active mode; the comparator digitizes the resulting continuous
state back into a binary output.  ``gate_output`` runs one gate standalone
on fully known input signals; the circuit engine drives the same GateSpec
objects incrementally.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .modes import (
    DEFAULT_CONFIG,
    GeneralNumeric,
    ModeFunction,
    SolverConfig,
    StateSpace,
    Trajectory,
    affine_mode,
    matching_output_signal,
)
from .signals import TIME_EPS, BinarySignal, ModeSwitchSignal, delay
from .threshold import ThresholdSpec, digitize

__all__ = [
    "ModeEntry",
    "ChoiceFunction",
    "GateSpec",
    "GateRun",
    "gate_output",
    "initial_output_bit",
    "boolean_table",
    "make_boolean_gate",
    "make_const_gate",
    "make_idm_channel",
    "make_heater_plant",
    "SimpleNorParams",
    "make_simple_nor",
    "AdvancedNorParams",
    "make_advanced_nor",
    "IdmDelayMeasurement",
    "measure_idm_delays",
    "mis_delay_sweep",
]


@dataclass(frozen=True)
class ModeEntry:
    """Context handed to a choice function at a mode decision point.

    ``time`` is None for the initial selection.  ``last_input_change[i]`` is
    the time input ``i`` last changed BEFORE the current event (None if it
    never has), so a choice function can recover inter-edge gaps.
    """

    time: float | None
    last_input_change: tuple[float | None, ...]


ChoiceFunction = Callable[
    [tuple[int, ...], "tuple[int, ...] | None", ModeEntry], ModeFunction
]


@dataclass(frozen=True, eq=False)
class GateSpec:
    """A digitized hybrid gate: delays, mode choice, comparator, state box.

    ``initial_inputs`` declares the input bits the gate is built for at time
    zero; runs whose (delayed) inputs start elsewhere are rejected so the
    initial mode and ``initial_state`` stay consistent.
    """

    name: str
    arity: int
    input_delays: tuple[float, ...]
    choice: ChoiceFunction
    initial_inputs: tuple[int, ...]
    initial_state: tuple[float, ...]
    threshold: ThresholdSpec
    state_space: StateSpace
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_delays", tuple(float(d) for d in self.input_delays))
        object.__setattr__(self, "initial_inputs", tuple(int(b) for b in self.initial_inputs))
        object.__setattr__(
            self, "initial_state", tuple(float(v) for v in self.initial_state)
        )
        if len(self.input_delays) != self.arity:
            raise ValueError(f"{self.name}: need {self.arity} input delays")
        if len(self.initial_inputs) != self.arity:
            raise ValueError(f"{self.name}: need {self.arity} initial input bits")
        if any(d < 0 for d in self.input_delays):
            raise ValueError(f"{self.name}: input delays must be nonnegative")
        if any(b not in (0, 1) for b in self.initial_inputs):
            raise ValueError(f"{self.name}: initial inputs must be bits")
        if len(self.initial_state) != self.state_space.dimension:
            raise ValueError(f"{self.name}: initial state dimension mismatch")
        if not self.state_space.contains(np.asarray(self.initial_state)):
            raise ValueError(f"{self.name}: initial state outside the state space")
        if self.threshold.component > self.state_space.dimension:
            raise ValueError(f"{self.name}: threshold component out of range")


def initial_output_bit(gate: GateSpec) -> int:
    """Digitized output at time zero, before any mode has acted."""
    x = gate.initial_state[gate.threshold.component - 1]
    return 1 if x > gate.threshold.xi else 0


@dataclass(frozen=True)
class GateRun:
    """Everything produced by one standalone gate evaluation."""

    output: BinarySignal
    trajectory: Trajectory
    switching: ModeSwitchSignal
    family: dict


def _coalesced_events(
    delayed: Sequence[BinarySignal],
) -> list[tuple[float, list[tuple[int, int]]]]:
    """Input edges grouped into atomic events (times within TIME_EPS merge)."""
    flat = sorted(
        (tr.time, idx, tr.value)
        for idx, s in enumerate(delayed)
        for tr in s.transitions
    )
    groups: list[tuple[float, list[tuple[int, int]]]] = []
    for t, idx, v in flat:
        if groups and t - groups[-1][0] <= TIME_EPS:
            groups[-1][1].append((idx, v))
        else:
            groups.append((t, [(idx, v)]))
    return groups


def gate_output(
    gate: GateSpec,
    inputs: Sequence[BinarySignal],
    config: SolverConfig = DEFAULT_CONFIG,
    horizon: float | None = None,
) -> GateRun:
    """Run one gate on known input signals over their shared horizon.

    Applies the per-input pure delays, walks the coalesced input edges to
    build the mode-switch signal, solves the matching trajectory, and
    digitizes it through the gate's comparator.
    """
    if len(inputs) != gate.arity:
        raise ValueError(f"{gate.name}: expected {gate.arity} inputs, got {len(inputs)}")
    if inputs:
        horizon = inputs[0].horizon
        for s in inputs[1:]:
            if abs(s.horizon - horizon) > TIME_EPS:
                raise ValueError(f"{gate.name}: input horizons differ")
    elif horizon is None:
        raise ValueError(f"{gate.name}: a horizon is required for a source gate")

    delayed = [delay(s, d) for s, d in zip(inputs, gate.input_delays)]
    bits = tuple(s.initial_value for s in delayed)
    if bits != gate.initial_inputs:
        raise ValueError(
            f"{gate.name}: inputs start at {bits}, gate declared {gate.initial_inputs}"
        )

    last_change: list[float | None] = [None] * gate.arity
    mode = gate.choice(bits, None, ModeEntry(None, tuple(last_change)))
    initial_mode_id = mode.id
    family: dict = {mode.id: mode}
    switches: list[tuple[float, object]] = []
    for t_evt, changes in _coalesced_events(delayed):
        prev_bits = bits
        ctx = ModeEntry(t_evt, tuple(last_change))
        updated = list(bits)
        for idx, v in changes:
            updated[idx] = v
        bits = tuple(updated)
        new_mode = gate.choice(bits, prev_bits, ctx)
        for idx, _ in changes:
            last_change[idx] = t_evt
        if new_mode is not mode:
            mode = new_mode
            family[mode.id] = mode
            switches.append((t_evt, mode.id))

    switching = ModeSwitchSignal(initial_mode_id, tuple(switches), horizon)
    traj = matching_output_signal(
        family, switching, gate.initial_state, gate.state_space, config
    )
    output = digitize(traj, gate.threshold, config)
    return GateRun(output, traj, switching, family)


# -- boolean gates ---------------------------------------------------------

_NAMED_TABLES: dict[str, tuple[int, Callable[[tuple[int, ...]], int]]] = {
    "buf": (1, lambda b: b[0]),
    "not": (1, lambda b: 1 - b[0]),
    "inv": (1, lambda b: 1 - b[0]),
    "and2": (2, lambda b: b[0] & b[1]),
    "or2": (2, lambda b: b[0] | b[1]),
    "nand2": (2, lambda b: 1 - (b[0] & b[1])),
    "nor2": (2, lambda b: 1 - (b[0] | b[1])),
    "xor2": (2, lambda b: b[0] ^ b[1]),
    "xnor2": (2, lambda b: 1 - (b[0] ^ b[1])),
}


def boolean_table(function, arity: int | None = None) -> dict[tuple[int, ...], int]:
    """Full truth table for a named function, mapping, or callable."""
    if isinstance(function, str):
        if function not in _NAMED_TABLES:
            raise ValueError(f"unknown boolean function {function!r}")
        n, fn = _NAMED_TABLES[function]
        if arity is not None and arity != n:
            raise ValueError(f"{function!r} has arity {n}, not {arity}")
        return {bits: fn(bits) for bits in itertools.product((0, 1), repeat=n)}
    if callable(function):
        if arity is None:
            raise ValueError("arity is required with a callable")
        return {
            bits: int(bool(function(*bits)))
            for bits in itertools.product((0, 1), repeat=arity)
        }
    table = {tuple(int(b) for b in k): int(v) for k, v in dict(function).items()}
    arities = {len(k) for k in table}
    if len(arities) != 1:
        raise ValueError("truth table keys have mixed arity")
    n = arities.pop()
    if arity is not None and arity != n:
        raise ValueError(f"table arity {n} != requested {arity}")
    missing = [b for b in itertools.product((0, 1), repeat=n) if b not in table]
    if missing:
        raise ValueError(f"truth table is missing entries: {missing}")
    return table


def make_boolean_gate(
    function,
    delays: Sequence[float],
    tau_fast: float | None = None,
    initial_inputs: Sequence[int] | None = None,
    initial_output: int | None = None,
    v_dd: float = 1.0,
    name: str | None = None,
) -> GateSpec:
    """Idealized boolean gate: a fast first-order lag toward the table value.

    The internal node relaxes toward 0 or ``v_dd`` with time constant
    ``tau_fast`` (default one thousandth of the smallest input delay), so
    the analog response is negligible next to the declared delays.  If
    ``initial_output`` disagrees with the table at ``initial_inputs`` the
    gate starts in flight and produces an initial transition on its own.
    """
    arity = len(delays)
    table = boolean_table(function, arity)
    if initial_inputs is None:
        initial_inputs = (0,) * arity
    initial_inputs = tuple(int(b) for b in initial_inputs)
    if tau_fast is None:
        if not delays or min(delays) <= 0:
            raise ValueError("tau_fast must be given when a delay is zero")
        tau_fast = 1e-3 * min(delays)
    if initial_output is None:
        initial_output = table[initial_inputs]

    box = StateSpace(((-0.01 * v_dd, 1.01 * v_dd),))
    lo = affine_mode("low", [[-1.0 / tau_fast]], [0.0], box)
    hi = affine_mode("high", [[-1.0 / tau_fast]], [v_dd / tau_fast], box)

    def choice(bits, prev_bits, ctx, _table=table, _lo=lo, _hi=hi):
        return _hi if _table[bits] else _lo

    gate_name = name or (function if isinstance(function, str) else "bool")
    return GateSpec(
        name=gate_name,
        arity=arity,
        input_delays=tuple(delays),
        choice=choice,
        initial_inputs=initial_inputs,
        initial_state=(v_dd * float(initial_output),),
        threshold=ThresholdSpec(v_dd / 2.0),
        state_space=box,
        params={"tau_fast": tau_fast, "v_dd": v_dd},
    )


def make_const_gate(value: int, v_dd: float = 1.0, name: str | None = None) -> GateSpec:
    """Zero-input gate holding a constant digitized output."""
    value = int(value)
    if value not in (0, 1):
        raise ValueError(f"constant must be a bit, got {value!r}")
    box = StateSpace(((-0.01 * v_dd, 1.01 * v_dd),))
    hold = affine_mode("hold", [[0.0]], [0.0], box)

    def choice(bits, prev_bits, ctx, _hold=hold):
        return _hold

    return GateSpec(
        name=name or f"const{value}",
        arity=0,
        input_delays=(),
        choice=choice,
        initial_inputs=(),
        initial_state=(v_dd * float(value),),
        threshold=ThresholdSpec(v_dd / 2.0),
        state_space=box,
        params={"v_dd": v_dd},
    )


# -- single-input exponential channel ---------------------------------------


def make_idm_channel(
    tau: float = 1.0,
    delta_min: float = 0.1,
    xi: float = 0.5,
    initial_input: int = 0,
    name: str = "idm",
) -> GateSpec:
    """Pure delay ``delta_min`` into a first-order RC lag, then a comparator.

    This is the classic single-input channel whose measured up/down delays
    are mutual negative inverses, so cancelled-pulse behaviour extrapolates
    consistently to negative input-to-output separations.
    """
    if tau <= 0 or delta_min < 0:
        raise ValueError("tau must be positive and delta_min nonnegative")
    if not 0.0 < xi < 1.0:
        raise ValueError(f"threshold must sit strictly inside (0, 1), got {xi}")
    box = StateSpace(((-0.01, 1.01),))
    up = affine_mode("up", [[-1.0 / tau]], [1.0 / tau], box)
    down = affine_mode("down", [[-1.0 / tau]], [0.0], box)

    def choice(bits, prev_bits, ctx, _up=up, _down=down):
        return _up if bits[0] else _down

    return GateSpec(
        name=name,
        arity=1,
        input_delays=(delta_min,),
        choice=choice,
        initial_inputs=(int(initial_input),),
        initial_state=(float(initial_input),),
        threshold=ThresholdSpec(xi),
        state_space=box,
        params={"tau": tau, "delta_min": delta_min},
    )


def make_heater_plant(
    delta: float = 0.01,
    xi: float = 19.0,
    initial_input: int = 1,
    initial_state: float = 20.0,
    name: str = "plant",
) -> GateSpec:
    """Thermal plant: dT/dt = -0.1 T (heater off) or 5 - 0.1 T (heater on).

    The comparator reports whether the temperature exceeds ``xi``; two copies
    with different levels give the band sensors of a thermostat loop.
    """
    box = StateSpace(((-1.0, 51.0),))
    on = affine_mode("on", [[-0.1]], [5.0], box)
    off = affine_mode("off", [[-0.1]], [0.0], box)

    def choice(bits, prev_bits, ctx, _on=on, _off=off):
        return _on if bits[0] else _off

    return GateSpec(
        name=name,
        arity=1,
        input_delays=(delta,),
        choice=choice,
        initial_inputs=(int(initial_input),),
        initial_state=(float(initial_state),),
        threshold=ThresholdSpec(xi),
        state_space=box,
        params={"delta": delta},
    )


# -- two-transistor NOR models ----------------------------------------------


@dataclass(frozen=True)
class SimpleNorParams:
    """Per-branch resistances, node capacitances, and the supply rail."""

    r1: float = 1.0
    r2: float = 1.0
    r3: float = 1.0
    r4: float = 1.0
    c: float = 1.0
    c_int: float = 1.0
    v_dd: float = 1.0


def make_simple_nor(
    params: SimpleNorParams | None = None,
    delays: Sequence[float] = (0.1, 0.1),
    initial_inputs: Sequence[int] = (0, 0),
    initial_state: Sequence[float] | None = None,
    name: str = "snor",
) -> GateSpec:
    """First-order RC NOR with an internal node between the series pull-ups.

    State is (V_int, V_out); the comparator watches V_out.  Each input pair
    selects a fixed affine network.  The model is deliberately memoryless
    about how long ago the first input fell: with both nodes discharged the
    (A=1, B=0) network holds the state frozen, so rising-output delay shows
    no multi-input switching dependence at all.
    """
    p = params or SimpleNorParams()
    box = StateSpace(
        ((-0.01 * p.v_dd, 1.01 * p.v_dd), (-0.01 * p.v_dd, 1.01 * p.v_dd))
    )
    k1 = 1.0 / (p.c_int * p.r1)
    k2 = 1.0 / (p.c_int * p.r2)
    g2 = 1.0 / (p.c * p.r2)
    g3 = 1.0 / (p.c * p.r3)
    g4 = 1.0 / (p.c * p.r4)
    nets = {
        (1, 1): ([[0.0, 0.0], [0.0, -(g3 + g4)]], [0.0, 0.0]),
        (1, 0): ([[-k2, k2], [g2, -(g2 + g3)]], [0.0, 0.0]),
        (0, 1): ([[-k1, 0.0], [0.0, -g4]], [p.v_dd * k1, 0.0]),
        (0, 0): ([[-(k1 + k2), k2], [g2, -g2]], [p.v_dd * k1, 0.0]),
    }
    modes = {
        bits: affine_mode(f"s{bits[0]}{bits[1]}", a, b, box) for bits, (a, b) in nets.items()
    }

    def choice(bits, prev_bits, ctx, _modes=modes):
        return _modes[bits]

    initial_inputs = tuple(int(b) for b in initial_inputs)
    if initial_state is None:
        a, b = nets[initial_inputs]
        try:
            x0 = np.linalg.solve(np.asarray(a), -np.asarray(b))
        except np.linalg.LinAlgError:
            x0 = np.zeros(2)  # (1,1) network is singular; quiescent is discharged
        initial_state = tuple(float(v) for v in x0)

    return GateSpec(
        name=name,
        arity=2,
        input_delays=tuple(delays),
        choice=choice,
        initial_inputs=initial_inputs,
        initial_state=tuple(initial_state),
        threshold=ThresholdSpec(p.v_dd / 2.0, component=2),
        state_space=box,
        params={
            "r1": p.r1, "r2": p.r2, "r3": p.r3, "r4": p.r4,
            "c": p.c, "c_int": p.c_int, "v_dd": p.v_dd,
        },
    )


@dataclass(frozen=True)
class AdvancedNorParams:
    """Charging-path shape constants, channel resistances, and the rail."""

    alpha1: float = 0.5
    alpha2: float = 0.5
    r: float = 1.0
    r_na: float = 1.0
    r_nb: float = 1.0
    c: float = 1.0
    v_dd: float = 1.0


def make_advanced_nor(
    params: AdvancedNorParams | None = None,
    delays: Sequence[float] = (0.1, 0.1),
    initial_inputs: Sequence[int] = (0, 0),
    name: str = "anor",
) -> GateSpec:
    """Single-state NOR whose pull-up strength remembers the input history.

    Discharge modes are plain exponentials through one or both nMOS paths.
    The charging mode entered at (0, 0) depends on how the gate got there:
    its conductance ramps up from zero with a rational profile in the time
    since entry, parameterized by the gap between the two falling inputs
    (zero for a simultaneous fall, unbounded if the other input never fell).
    All variants share the settled charging rate (V_DD - V) / (2 R C).
    """
    p = params or AdvancedNorParams()
    box = StateSpace(((-0.01 * p.v_dd, 1.01 * p.v_dd),))
    f1 = affine_mode("f1", [[-1.0 / (p.c * p.r_na)]], [0.0], box)
    f2 = affine_mode("f2", [[-1.0 / (p.c * p.r_nb)]], [0.0], box)
    f6 = affine_mode("f6", [[-(1.0 / p.r_na + 1.0 / p.r_nb) / p.c]], [0.0], box)
    settled = affine_mode(
        "f0", [[-1.0 / (2.0 * p.r * p.c)]], [p.v_dd / (2.0 * p.r * p.c)], box
    )
    fresh = itertools.count()
    k_chg = 1.0 / (2.0 * p.r * p.c)
    m_chg = 1.01 * p.v_dd * k_chg

    def charging(t_on: float, gap: float, alpha_first: float) -> ModeFunction:
        # conductance ramp: num/den stays in [0, 1/(2R)] for all t >= t_on
        def rhs(t, x, _t0=t_on, _gap=gap, _af=alpha_first):
            tt = t - _t0
            if tt < 0.0:
                tt = 0.0
            if math.isinf(_gap):
                num = tt
                den = 2.0 * p.r * tt + _af
            else:
                num = tt * (tt + _gap)
                den = (
                    2.0 * p.r * tt * tt
                    + (p.alpha1 + p.alpha2 + 2.0 * _gap * p.r) * tt
                    + _af * _gap
                )
            rho = num / den if den > 0.0 else 0.0
            return (p.v_dd - x) * (rho / p.c)

        return ModeFunction(
            f"chg{next(fresh)}", rhs, GeneralNumeric(), k_chg, m_chg
        )

    def choice(bits, prev_bits, ctx):
        if bits == (1, 0):
            return f1
        if bits == (0, 1):
            return f2
        if bits == (1, 1):
            return f6
        if prev_bits is None:
            return settled
        if prev_bits == (1, 1):
            return charging(ctx.time, 0.0, p.alpha1)
        if prev_bits == (1, 0):  # B fell first, A falls now
            last = ctx.last_input_change[1]
            gap = math.inf if last is None else ctx.time - last
            return charging(ctx.time, gap, p.alpha1)
        if prev_bits == (0, 1):  # A fell first, B falls now
            last = ctx.last_input_change[0]
            gap = math.inf if last is None else ctx.time - last
            return charging(ctx.time, gap, p.alpha2)
        raise AssertionError(f"unreachable mode decision: {prev_bits} -> {bits}")

    initial_inputs = tuple(int(b) for b in initial_inputs)
    x0 = p.v_dd if initial_inputs == (0, 0) else 0.0
    return GateSpec(
        name=name,
        arity=2,
        input_delays=tuple(delays),
        choice=choice,
        initial_inputs=initial_inputs,
        initial_state=(x0,),
        threshold=ThresholdSpec(p.v_dd / 2.0),
        state_space=box,
        params={
            "alpha1": p.alpha1, "alpha2": p.alpha2, "r": p.r,
            "r_na": p.r_na, "r_nb": p.r_nb, "c": p.c, "v_dd": p.v_dd,
        },
    )


# -- delay measurements ------------------------------------------------------


@dataclass(frozen=True)
class IdmDelayMeasurement:
    """Round trip through the falling and rising delay maps of a channel."""

    t_after_output: float
    delta_down: float
    t_prime: float
    delta_up: float
    roundtrip_error: float


def measure_idm_delays(
    t_after_output: float,
    tau: float = 1.0,
    delta_min: float = 0.1,
    xi: float = 0.5,
    config: SolverConfig = DEFAULT_CONFIG,
) -> IdmDelayMeasurement:
    """Measure delta_down(T), then delta_up at T' = -delta_down(T).

    delta_down is read off a digitized run: the input falls T after the
    output rose, and the falling output delay is measured directly.  The
    matching rising measurement needs a negative separation (the input
    rises before the output would fall), where no output edge exists, so
    delta_up is recovered from the analog state at the mode switch by
    solving the rising exponential for its threshold crossing; that solve
    is exact for this channel.  A perfect round trip has -delta_up == T.
    """
    T = float(t_after_output)
    if T < 0:
        raise ValueError("the input-after-output separation must be nonnegative")
    horizon = 2.0 + 2.0 * delta_min + 10.0 * tau + T

    gate_lo = make_idm_channel(tau, delta_min, xi, initial_input=0)
    r0 = 1.0
    run_step = gate_output(gate_lo, [BinarySignal(0, ((r0, 1),), horizon)], config)
    if len(run_step.output.times) != 1:
        raise RuntimeError("step input produced an unexpected output shape")
    o1 = run_step.output.times[0]

    u = o1 + T
    run_pulse = gate_output(gate_lo, [BinarySignal(0, ((r0, 1), (u, 0)), horizon)], config)
    if len(run_pulse.output.times) != 2:
        raise RuntimeError("pulse input did not produce a rise and a fall")
    delta_down = run_pulse.output.times[1] - u

    t_prime = -delta_down
    gate_hi = make_idm_channel(tau, delta_min, xi, initial_input=1)
    a0 = 1.0
    run_ref = gate_output(gate_hi, [BinarySignal(1, ((a0, 0),), horizon)], config)
    if len(run_ref.output.times) != 1:
        raise RuntimeError("falling step produced an unexpected output shape")
    o_ref = run_ref.output.times[0]

    u_prime = o_ref + t_prime
    if u_prime - a0 <= 10 * TIME_EPS:
        raise ValueError("separation too large to resolve the cancelling edge")
    run_test = gate_output(
        gate_hi, [BinarySignal(1, ((a0, 0), (u_prime, 1)), horizon)], config
    )
    x_sw = float(run_test.trajectory.value(u_prime + delta_min)[0])
    if x_sw >= 1.0:
        raise RuntimeError("state saturated before the rising switch")
    delta_up = delta_min + tau * math.log((1.0 - x_sw) / (1.0 - xi))
    return IdmDelayMeasurement(T, delta_down, t_prime, delta_up, abs(-delta_up - T))


def mis_delay_sweep(
    gate_factory: Callable[[], GateSpec],
    gaps: Sequence[float],
    lead: float = 1.0,
    settle: float = 20.0,
    config: SolverConfig = DEFAULT_CONFIG,
) -> list[float]:
    """Rising-output delay of a NOR as a function of the falling-input gap.

    Both inputs start high (output low).  Input B falls at ``lead``, input A
    falls ``gap`` later, and the reported delay is from A's fall to the
    output's rise.  Gate factories must declare initial inputs (1, 1).
    """
    out: list[float] = []
    for gap in gaps:
        if gap < 0:
            raise ValueError("gaps must be nonnegative")
        gate = gate_factory()
        if gate.initial_inputs != (1, 1):
            raise ValueError(f"{gate.name}: sweep needs a gate built for inputs (1, 1)")
        horizon = lead + gap + settle
        sig_a = BinarySignal(1, ((lead + gap, 0),), horizon)
        sig_b = BinarySignal(1, ((lead, 0),), horizon)
        run = gate_output(gate, [sig_a, sig_b], config)
        rises = [tr.time for tr in run.output.transitions if tr.value == 1]
        if not rises:
            raise RuntimeError(f"{gate.name}: output never rose within the horizon")
        out.append(rises[0] - (lead + gap))
    return out
