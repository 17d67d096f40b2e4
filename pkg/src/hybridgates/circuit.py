"""Circuits of hybrid gates: wiring rules, event-driven execution, unrolling.

A circuit is a named set of vertices (input ports, output ports, gate specs)
plus directed edges feeding gate input slots.  Execution is an iterative
event simulation: committed output transitions propagate along edges with
the receiving gate's per-slot delay, arrivals switch gate modes, and mode
switches discard that gate's not-yet-fired output transitions and recompute
them from the new trajectory.  Strictly positive delays make the schedule
causally well founded, so the run is independent of processing order.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

from .gates import GateSpec, ModeEntry, boolean_table, initial_output_bit, make_boolean_gate, make_const_gate
from .modes import DEFAULT_CONFIG, SolverConfig, Trajectory, solve_mode
from .signals import TIME_EPS, BinarySignal, one_norm_distance
from .threshold import find_crossings

__all__ = [
    "InputPort",
    "OutputPort",
    "Edge",
    "Circuit",
    "ValidationReport",
    "validate",
    "InvalidCircuitError",
    "EventCapExceeded",
    "TransitionRecord",
    "Execution",
    "execute",
    "UnrolledCircuit",
    "unroll",
    "EquivalenceReport",
    "check_simulation_equivalence",
    "SpfWidthResult",
    "SpfReport",
    "check_spf",
    "bisect_pulse_norm",
    "random_boolean_circuit",
    "shuffled_copy",
]


@dataclass(frozen=True)
class InputPort:
    """Externally driven vertex; its signal is supplied at execution time."""

    initial_value: int = 0

    def __post_init__(self) -> None:
        if self.initial_value not in (0, 1):
            raise ValueError(f"port initial value must be a bit, got {self.initial_value!r}")


@dataclass(frozen=True)
class OutputPort:
    """Observation vertex: relays its single driver's signal unchanged."""


class Edge(NamedTuple):
    src: str
    dst: str
    slot: int = 0


Vertex = InputPort | OutputPort | GateSpec


class Circuit:
    """Vertices by name plus edges into gate input slots (0-based)."""

    def __init__(self, vertices: Mapping[str, Vertex], edges: Sequence) -> None:
        self.vertices: dict[str, Vertex] = dict(vertices)
        self.edges: tuple[Edge, ...] = tuple(Edge(*e) for e in edges)
        self._in: dict[str, list[Edge]] = {name: [] for name in self.vertices}
        self._out: dict[str, list[Edge]] = {name: [] for name in self.vertices}
        for e in self.edges:
            if e.dst in self._in:
                self._in[e.dst].append(e)
            if e.src in self._out:
                self._out[e.src].append(e)
        for lst in self._in.values():
            lst.sort(key=lambda e: e.slot)

    def incoming(self, name: str) -> list[Edge]:
        return list(self._in.get(name, ()))

    def outgoing(self, name: str) -> list[Edge]:
        return list(self._out.get(name, ()))

    def input_ports(self) -> dict[str, InputPort]:
        return {n: v for n, v in self.vertices.items() if isinstance(v, InputPort)}

    def output_ports(self) -> dict[str, OutputPort]:
        return {n: v for n, v in self.vertices.items() if isinstance(v, OutputPort)}

    def gates(self) -> dict[str, GateSpec]:
        return {n: v for n, v in self.vertices.items() if isinstance(v, GateSpec)}


@dataclass
class ValidationReport:
    """Structural check results; ``ok`` means the circuit may be executed."""

    violations: list[tuple[str, str, str]] = field(default_factory=list)
    delta_min: float = math.inf

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule: str, vertex: str, message: str) -> None:
        self.violations.append((rule, vertex, message))


class InvalidCircuitError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        lines = "; ".join(f"{r}[{v}]: {m}" for r, v, m in report.violations)
        super().__init__(f"circuit failed validation: {lines}")


class EventCapExceeded(RuntimeError):
    """The execution produced more events than the configured cap."""


def _driver_initial_bit(circuit: Circuit, name: str) -> int:
    v = circuit.vertices[name]
    if isinstance(v, InputPort):
        return v.initial_value
    if isinstance(v, GateSpec):
        return initial_output_bit(v)
    raise TypeError(f"{name} cannot drive an edge")


def validate(circuit: Circuit) -> ValidationReport:
    """Check the wiring rules; never raises, collects violations instead.

    Rules: edges reference known vertices and valid slots; input ports are
    never driven; output ports have exactly one driver and drive nothing;
    every gate slot is fed exactly once; every gate delay is strictly
    positive (the circuit-wide minimum delay anchors causality); declared
    gate initial inputs agree with each driver's initial output bit.
    """
    report = ValidationReport()
    for e in circuit.edges:
        if e.src not in circuit.vertices:
            report.add("unknown-vertex", e.src, f"edge source {e.src!r} does not exist")
            continue
        if e.dst not in circuit.vertices:
            report.add("unknown-vertex", e.dst, f"edge target {e.dst!r} does not exist")
            continue
        src_v = circuit.vertices[e.src]
        dst_v = circuit.vertices[e.dst]
        if isinstance(src_v, OutputPort):
            report.add("output-port-fanout", e.src, "output ports cannot drive edges")
        if isinstance(dst_v, InputPort):
            report.add("input-port-driven", e.dst, "input ports cannot be driven")
        if isinstance(dst_v, GateSpec) and not (0 <= e.slot < dst_v.arity):
            report.add("bad-slot", e.dst, f"slot {e.slot} out of range for arity {dst_v.arity}")
        if isinstance(dst_v, OutputPort) and e.slot != 0:
            report.add("bad-slot", e.dst, "output ports have a single slot 0")

    if not report.ok:
        return report

    for name, v in circuit.vertices.items():
        inc = circuit.incoming(name)
        if isinstance(v, OutputPort):
            if len(inc) != 1:
                report.add("output-port-fanin", name, f"needs exactly one driver, has {len(inc)}")
        elif isinstance(v, GateSpec):
            by_slot: dict[int, list[Edge]] = {}
            for e in inc:
                by_slot.setdefault(e.slot, []).append(e)
            for slot in range(v.arity):
                feeds = by_slot.get(slot, [])
                if not feeds:
                    report.add("slot-unfilled", name, f"input slot {slot} has no driver")
                elif len(feeds) > 1:
                    report.add("slot-multiply-driven", name, f"input slot {slot} has {len(feeds)} drivers")
            for slot, d in enumerate(v.input_delays):
                if d <= 0:
                    report.add("nonpositive-delay", name, f"slot {slot} delay {d} must be > 0")
                else:
                    report.delta_min = min(report.delta_min, d)

    if not report.ok:
        return report

    for name, v in circuit.vertices.items():
        if not isinstance(v, GateSpec):
            continue
        for e in circuit.incoming(name):
            declared = v.initial_inputs[e.slot]
            actual = _driver_initial_bit(circuit, e.src)
            if declared != actual:
                report.add(
                    "initial-input-mismatch",
                    name,
                    f"slot {e.slot} declared {declared} but {e.src!r} starts at {actual}",
                )
    return report


# -- execution ---------------------------------------------------------------


@dataclass(frozen=True)
class TransitionRecord:
    """A committed output transition with its causal bookkeeping."""

    time: float
    value: int
    depth: int
    iteration: int


@dataclass
class Execution:
    """Everything produced by one circuit run."""

    horizon: float
    signals: dict[str, BinarySignal]
    records: dict[str, tuple[TransitionRecord, ...]]
    trajectories: dict[str, Trajectory]
    iteration_times: list[float]
    event_count: int
    delta_min: float


class _GateState:
    __slots__ = (
        "spec", "bits", "last_change", "max_arr_depth", "mode",
        "segments", "live", "pending", "records", "out_bit",
    )

    def __init__(self, spec: GateSpec):
        self.spec = spec
        self.bits: tuple[int, ...] = ()
        self.last_change: list[float | None] = [None] * spec.arity
        self.max_arr_depth = -1
        self.mode = None
        self.segments: list = []
        self.live = None
        self.pending: list[tuple[float, int, int]] = []
        self.records: list[TransitionRecord] = []
        self.out_bit = initial_output_bit(spec)


def _alternating_pending(
    crossings: list[tuple[float, bool]], out_bit: int, depth: int
) -> list[tuple[float, int, int]]:
    # keep only a properly alternating tail; a leading entry equal to the
    # current output can appear when the state sits exactly on the threshold
    pending: list[tuple[float, int, int]] = []
    expect = 1 - out_bit
    for t, rising in crossings:
        v = int(rising)
        if v != expect:
            if not pending:
                continue
            raise AssertionError("crossing sequence lost alternation")
        pending.append((t, v, depth))
        expect = 1 - expect
    return pending


def execute(
    circuit: Circuit,
    input_signals: Mapping[str, BinarySignal] | None,
    horizon: float,
    config: SolverConfig = DEFAULT_CONFIG,
    event_cap: int = 1_000_000,
    _shuffle: random.Random | None = None,
) -> Execution:
    """Run the circuit on the given input signals over ``[0, horizon]``.

    The result is unique: heap keys (time, target, slot) never collide, all
    delays are strictly positive, and events closer than ``TIME_EPS`` are
    applied as one atomic batch with output firings committed before input
    arrivals.  ``_shuffle`` randomizes within-batch processing order and
    must not change any result; it exists so tests can prove that.
    """
    report = validate(circuit)
    if not report.ok:
        raise InvalidCircuitError(report)
    if not (math.isfinite(horizon) and horizon > 0):
        raise ValueError(f"horizon must be positive and finite, got {horizon!r}")

    input_signals = dict(input_signals or {})
    ports = circuit.input_ports()
    if set(input_signals) != set(ports):
        raise ValueError(
            f"input signals {sorted(input_signals)} do not match ports {sorted(ports)}"
        )
    for name, sig in input_signals.items():
        if abs(sig.horizon - horizon) > TIME_EPS:
            raise ValueError(f"signal for {name!r} has horizon {sig.horizon}, expected {horizon}")
        if sig.initial_value != ports[name].initial_value:
            raise ValueError(
                f"signal for {name!r} starts at {sig.initial_value}, "
                f"port declares {ports[name].initial_value}"
            )

    states = {name: _GateState(spec) for name, spec in circuit.gates().items()}

    # (time, dst, slot, value, depth); the first three fields are unique
    heap: list[tuple[float, str, int, int, int]] = []
    event_count = 0

    def propagate(src: str, t: float, value: int, depth: int) -> None:
        for e in circuit.outgoing(src):
            dst_v = circuit.vertices[e.dst]
            if isinstance(dst_v, GateSpec):
                heapq.heappush(
                    heap, (t + dst_v.input_delays[e.slot], e.dst, e.slot, value, depth)
                )

    # iteration 1: initial modes from declared initial bits, input edges queued
    for name, sig in input_signals.items():
        for tr in sig.transitions:
            propagate(name, tr.time, tr.value, 0)
    for name, st in states.items():
        spec = st.spec
        st.bits = tuple(
            _driver_initial_bit(circuit, e.src) for e in circuit.incoming(name)
        )
        if st.bits != spec.initial_inputs:  # validate() already guarantees this
            raise AssertionError(f"{name}: initial bits diverge from declaration")
        st.mode = spec.choice(st.bits, None, ModeEntry(None, tuple(st.last_change)))
        st.live = solve_mode(
            st.mode, spec.initial_state, 0.0, horizon, spec.state_space, config
        )
        crossings = find_crossings(
            Trajectory([st.live]),
            spec.threshold.xi,
            spec.threshold.component,
            spec.threshold.time_tolerance,
            config,
        )
        st.pending = _alternating_pending(crossings, st.out_bit, 0)

    iteration = 1
    iteration_times = [0.0]
    while True:
        t_next = math.inf
        if heap:
            t_next = heap[0][0]
        for st in states.values():
            if st.pending and st.pending[0][0] < t_next:
                t_next = st.pending[0][0]
        if not math.isfinite(t_next) or t_next > horizon + TIME_EPS:
            break
        iteration += 1
        iteration_times.append(t_next)
        window = t_next + TIME_EPS

        # fire committed output transitions first
        firing = sorted(
            name for name, st in states.items() if st.pending and st.pending[0][0] <= window
        )
        if _shuffle is not None:
            _shuffle.shuffle(firing)
        for name in firing:
            st = states[name]
            while st.pending and st.pending[0][0] <= window:
                t_c, value, depth = st.pending.pop(0)
                if value == st.out_bit:
                    raise AssertionError(f"{name}: non-alternating commit at t={t_c}")
                if depth > iteration:
                    raise AssertionError(f"{name}: depth {depth} exceeds iteration {iteration}")
                if st.records and depth < st.records[-1].depth:
                    raise AssertionError(f"{name}: depth decreased at t={t_c}")
                st.records.append(TransitionRecord(min(t_c, horizon), value, depth, iteration))
                st.out_bit = value
                event_count += 1
                if event_count > event_cap:
                    raise EventCapExceeded(f"more than {event_cap} events before t={t_c}")
                propagate(name, t_c, value, depth)

        # then apply input arrivals, atomically per gate
        groups: dict[str, list[tuple[float, int, int, int]]] = {}
        while heap and heap[0][0] <= window:
            t_a, dst, slot, value, depth = heapq.heappop(heap)
            groups.setdefault(dst, []).append((t_a, slot, value, depth))
            event_count += 1
            if event_count > event_cap:
                raise EventCapExceeded(f"more than {event_cap} events before t={t_a}")
        ordered = sorted(groups)
        if _shuffle is not None:
            _shuffle.shuffle(ordered)
        for name in ordered:
            st = states[name]
            arrivals = groups[name]
            t_star = min(min(a[0] for a in arrivals), horizon)
            prev_bits = st.bits
            ctx = ModeEntry(t_star, tuple(st.last_change))
            new_bits = list(st.bits)
            for t_a, slot, value, depth in arrivals:
                if new_bits[slot] == value:
                    raise AssertionError(f"{name}: duplicate arrival on slot {slot} at t={t_a}")
                new_bits[slot] = value
            st.bits = tuple(new_bits)
            for t_a, slot, _value, depth in arrivals:
                st.last_change[slot] = t_a
                st.max_arr_depth = max(st.max_arr_depth, depth)
            new_mode = st.spec.choice(st.bits, prev_bits, ctx)
            if new_mode is st.mode:
                continue  # no-op switch: retained transitions keep their depths
            x_star = st.live.value(t_star)
            st.segments.append(st.live.with_end(t_star))
            st.mode = new_mode
            st.live = solve_mode(
                new_mode, x_star, t_star, horizon, st.spec.state_space, config
            )
            crossings = find_crossings(
                Trajectory([st.live]),
                st.spec.threshold.xi,
                st.spec.threshold.component,
                st.spec.threshold.time_tolerance,
                config,
            )
            # Transitions born in the new mode sit one causal step past
            # everything the gate's state carries: the deepest transition seen
            # on any input pin (per-signal depths never decrease, so the
            # running maximum over arrivals equals the maximum over each pin's
            # latest transition) and the gate's own last committed transition,
            # whose timing the continuing trajectory remembers.
            prior = st.records[-1].depth if st.records else -1
            st.pending = _alternating_pending(
                crossings, st.out_bit, 1 + max(st.max_arr_depth, prior)
            )

    # materialize signals, records, trajectories
    signals: dict[str, BinarySignal] = {}
    records: dict[str, tuple[TransitionRecord, ...]] = {}
    trajectories: dict[str, Trajectory] = {}
    for name, sig in input_signals.items():
        signals[name] = sig
        records[name] = tuple(
            TransitionRecord(tr.time, tr.value, 0, 1) for tr in sig.transitions
        )
    for name, st in states.items():
        signals[name] = BinarySignal(
            initial_output_bit(st.spec),
            tuple((r.time, r.value) for r in st.records),
            horizon,
        )
        records[name] = tuple(st.records)
        trajectories[name] = Trajectory(st.segments + [st.live])
    for name, v in circuit.vertices.items():
        if isinstance(v, OutputPort):
            (drv,) = circuit.incoming(name)
            signals[name] = signals[drv.src]
            records[name] = records[drv.src]

    return Execution(
        horizon=horizon,
        signals=signals,
        records=records,
        trajectories=trajectories,
        iteration_times=iteration_times,
        event_count=event_count,
        delta_min=report.delta_min,
    )


# -- unrolling ----------------------------------------------------------------


@dataclass
class UnrolledCircuit:
    """Feedback-free expansion of a circuit toward one output port.

    ``copy_map`` maps (original vertex, level) to the copy's name; input
    ports are shared, level-0 gates collapse to constants holding their
    initial output bit.  ``z_values[copy]`` bounds the transition depth up
    to which the copy reproduces the original vertex exactly.
    """

    circuit: Circuit
    copy_map: dict[tuple[str, int], str]
    z_values: dict[str, float]
    sink: str


def unroll(circuit: Circuit, output_port: str, k: int) -> UnrolledCircuit:
    report = validate(circuit)
    if not report.ok:
        raise InvalidCircuitError(report)
    if output_port not in circuit.vertices or not isinstance(
        circuit.vertices[output_port], OutputPort
    ):
        raise ValueError(f"{output_port!r} is not an output port")
    if k < 0:
        raise ValueError("the unrolling level must be nonnegative")

    new_vertices: dict[str, Vertex] = {}
    new_edges: list[Edge] = []
    z: dict[str, float] = {}
    memo: dict[tuple[str, int], str] = {}
    const_names: dict[int, str] = {}

    def fresh(base: str) -> str:
        name = base
        n = 2
        while name in new_vertices:
            name = f"{base}_{n}"
            n += 1
        return name

    def build(v_name: str, level: int) -> str:
        key = (v_name, level)
        if key in memo:
            return memo[key]
        v = circuit.vertices[v_name]
        if isinstance(v, InputPort):
            if v_name not in new_vertices:
                new_vertices[v_name] = v
                z[v_name] = math.inf
            memo[key] = v_name
            return v_name
        if isinstance(v, OutputPort):
            name = fresh(f"{v_name}^({level})")
            new_vertices[name] = OutputPort()
            (pred,) = circuit.incoming(v_name)
            pred_copy = build(pred.src, level)  # observation keeps the level
            new_edges.append(Edge(pred_copy, name, 0))
            z[name] = z[pred_copy]
            memo[key] = name
            return name
        if level == 0:
            # constants are interchangeable, so one stub per value serves
            # every gate cut at this level
            bit = initial_output_bit(v)
            if bit not in const_names:
                name = fresh(f"X_{bit}")
                new_vertices[name] = make_const_gate(bit, name=name)
                z[name] = 0.0
                const_names[bit] = name
            memo[key] = const_names[bit]
            return memo[key]
        name = fresh(f"{v_name}^({level})")
        new_vertices[name] = v  # specs are stateless and shareable
        bounds = []
        for e in circuit.incoming(v_name):
            pred_copy = build(e.src, level - 1)
            new_edges.append(Edge(pred_copy, name, e.slot))
            bounds.append(1.0 + z[pred_copy])
        z[name] = min(bounds) if bounds else math.inf
        memo[key] = name
        return name

    sink = build(output_port, k)
    unrolled = Circuit(new_vertices, new_edges)
    rep = validate(unrolled)
    if not rep.ok:  # construction bug, not user error
        raise AssertionError(f"unrolled circuit is invalid: {rep.violations}")
    return UnrolledCircuit(unrolled, memo, z, sink)


@dataclass
class EquivalenceReport:
    checked: int
    mismatches: list[str]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def check_simulation_equivalence(
    circuit: Circuit,
    output_port: str,
    k: int,
    input_signals: Mapping[str, BinarySignal] | None,
    horizon: float,
    config: SolverConfig = DEFAULT_CONFIG,
    time_tol: float = 1e-12,
) -> EquivalenceReport:
    """Compare every copy against its original up to the copy's depth bound.

    For each (vertex, level) copy, the original's transitions with depth at
    most z and the copy's transitions with depth at most z must agree in
    count, value, depth, and time (to ``time_tol``).
    """
    un = unroll(circuit, output_port, k)
    ex_orig = execute(circuit, input_signals, horizon, config)
    # shallow unrollings may cut every path to a port before reaching it
    kept = set(un.circuit.input_ports())
    ex_unr = execute(
        un.circuit,
        {n: s for n, s in (input_signals or {}).items() if n in kept},
        horizon,
        config,
    )
    mismatches: list[str] = []
    checked = 0
    for (orig, level), copy_name in sorted(un.copy_map.items()):
        bound = un.z_values[copy_name]
        a = [r for r in ex_orig.records[orig] if r.depth <= bound]
        b = [r for r in ex_unr.records[copy_name] if r.depth <= bound]
        checked += 1
        if len(a) != len(b):
            mismatches.append(
                f"{copy_name}: {len(b)} transitions of depth <= {bound}, original has {len(a)}"
            )
            continue
        for ra, rb in zip(a, b):
            if (
                abs(ra.time - rb.time) > time_tol
                or ra.value != rb.value
                or ra.depth != rb.depth
            ):
                mismatches.append(
                    f"{copy_name}: ({rb.time}, {rb.value}, d={rb.depth}) "
                    f"vs original ({ra.time}, {ra.value}, d={ra.depth})"
                )
                break
    return EquivalenceReport(checked, mismatches)


# -- short-pulse filtration ----------------------------------------------------


@dataclass(frozen=True)
class SpfWidthResult:
    width: float
    norm: float
    last_input_edge: float
    last_output_edge: float | None
    settled: bool


@dataclass
class SpfReport:
    """Filtration profile of a single-input single-output circuit.

    The conditions are evaluated only on the supplied width grid; a clean
    report certifies the grid, not the continuum in between.
    """

    epsilon: float
    stabilization_bound: float
    single_io: bool
    no_generation: bool
    nontrivial: bool
    no_short_outputs: bool
    bounded_stabilization: bool
    results: list[SpfWidthResult] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.single_io
            and self.no_generation
            and self.nontrivial
            and self.no_short_outputs
            and self.bounded_stabilization
        )


def _single_io(circuit: Circuit) -> tuple[str, str] | None:
    ins = list(circuit.input_ports())
    outs = list(circuit.output_ports())
    if len(ins) == 1 and len(outs) == 1:
        return ins[0], outs[0]
    return None


def _pulse_response(
    circuit: Circuit,
    in_name: str,
    out_name: str,
    width: float,
    horizon: float,
    pulse_start: float,
    config: SolverConfig,
) -> tuple[BinarySignal, float]:
    sig = BinarySignal.pulse(pulse_start, width, horizon)
    ex = execute(circuit, {in_name: sig}, horizon, config)
    out = ex.signals[out_name]
    return out, one_norm_distance(out, BinarySignal.constant(0, horizon))


def check_spf(
    circuit: Circuit,
    widths: Sequence[float],
    horizon: float,
    epsilon: float,
    stabilization_bound: float,
    pulse_start: float = 1.0,
    config: SolverConfig = DEFAULT_CONFIG,
) -> SpfReport:
    """Probe a candidate short-pulse filter over a grid of pulse widths.

    Checks: single input and output; a zero input yields a zero output; some
    width produces output; every produced output has one-norm at least
    ``epsilon``; and outputs settle within ``stabilization_bound`` of the
    last input edge.
    """
    io = _single_io(circuit)
    report = SpfReport(
        epsilon=epsilon,
        stabilization_bound=stabilization_bound,
        single_io=io is not None,
        no_generation=True,
        nontrivial=False,
        no_short_outputs=True,
        bounded_stabilization=True,
    )
    if io is None:
        report.violations.append("circuit is not single-input single-output")
        return report
    in_name, out_name = io
    if circuit.vertices[in_name].initial_value != 0:
        report.single_io = False
        report.violations.append("the input port must rest at 0")
        return report

    ex0 = execute(circuit, {in_name: BinarySignal.constant(0, horizon)}, horizon, config)
    if not ex0.signals[out_name].is_zero():
        report.no_generation = False
        report.violations.append("a zero input produced output transitions")

    for width in widths:
        out, norm = _pulse_response(
            circuit, in_name, out_name, width, horizon, pulse_start, config
        )
        last_in = min(pulse_start + width, horizon)
        last_out = out.times[-1] if out.times else None
        settled = last_out is None or last_out <= last_in + stabilization_bound
        report.results.append(SpfWidthResult(width, norm, last_in, last_out, settled))
        if norm > 1e-15:
            report.nontrivial = True
            if norm < epsilon:
                report.no_short_outputs = False
                report.violations.append(
                    f"width {width}: output norm {norm} is inside (0, {epsilon})"
                )
        if not settled:
            report.bounded_stabilization = False
            report.violations.append(
                f"width {width}: output still switching {last_out - last_in} after the input"
            )
    if not report.nontrivial:
        report.violations.append("no width on the grid produced any output")
    return report


def bisect_pulse_norm(
    circuit: Circuit,
    target_norm: float,
    lo: float,
    hi: float,
    horizon: float,
    pulse_start: float = 1.0,
    tol: float = 1e-6,
    max_iter: int = 200,
    config: SolverConfig = DEFAULT_CONFIG,
) -> tuple[float, float]:
    """Find an input width whose output one-norm hits ``target_norm``.

    Output norms vary continuously with the width wherever the output does
    not latch, so between a width producing less than the target and one
    producing more there is a width producing any value in between; this
    locates it by bisection and returns (width, norm).
    """
    io = _single_io(circuit)
    if io is None:
        raise ValueError("pulse-norm bisection needs a single-input single-output circuit")
    in_name, out_name = io

    def norm_at(w: float) -> float:
        return _pulse_response(circuit, in_name, out_name, w, horizon, pulse_start, config)[1]

    n_lo, n_hi = norm_at(lo), norm_at(hi)
    if not (n_lo < target_norm < n_hi):
        raise ValueError(
            f"target {target_norm} not bracketed: norm({lo})={n_lo}, norm({hi})={n_hi}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        n_mid = norm_at(mid)
        if abs(n_mid - target_norm) <= tol:
            return mid, n_mid
        if n_mid < target_norm:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    raise RuntimeError("bisection did not reach the requested norm tolerance")


# -- random circuits -----------------------------------------------------------

_GATE_KINDS = ("nor2", "nand2", "or2", "and2", "not")


def random_boolean_circuit(
    rng: random.Random,
    n_gates: int | None = None,
    feedback: bool = True,
    allow_flight: bool = True,
    n_inputs: int | None = None,
) -> Circuit:
    """Random circuit of small boolean gates, optionally with feedback loops.

    With ``allow_flight`` each gate gets an arbitrary initial output bit, so
    loops may start in flight and oscillate on their own.  Without it, the
    initial bits are solved to a consistent fixed point (regenerating the
    topology if a loop has none), which level-0 unrolling requires.
    """
    n_gates = n_gates if n_gates is not None else rng.randint(2, 6)
    n_inputs = n_inputs if n_inputs is not None else rng.randint(1, 2)
    port_names = [f"in{i}" for i in range(n_inputs)]

    for _attempt in range(64):
        kinds = [rng.choice(_GATE_KINDS) for _ in range(n_gates)]
        gate_names = [f"g{i}" for i in range(n_gates)]
        drivers: dict[str, list[str]] = {}
        for i, name in enumerate(gate_names):
            arity = 1 if kinds[i] == "not" else 2
            pool = port_names + (gate_names if feedback else gate_names[:i])
            drivers[name] = [rng.choice(pool) for _ in range(arity)]

        bits = {p: 0 for p in port_names}
        bits.update({g: rng.randint(0, 1) for g in gate_names})
        if not allow_flight:
            tables = {g: boolean_table(kinds[i]) for i, g in enumerate(gate_names)}
            ok = False
            for _ in range(64):
                new = dict(bits)
                for g in gate_names:
                    new[g] = tables[g][tuple(bits[d] for d in drivers[g])]
                if new == bits:
                    ok = True
                    break
                bits = new
            if not ok:
                continue  # the loop parity admits no consistent start

        vertices: dict[str, Vertex] = {p: InputPort(0) for p in port_names}
        edges: list[Edge] = []
        for i, g in enumerate(gate_names):
            delays = tuple(rng.uniform(0.05, 0.3) for _ in drivers[g])
            vertices[g] = make_boolean_gate(
                kinds[i],
                delays,
                initial_inputs=tuple(bits[d] for d in drivers[g]),
                initial_output=bits[g],
                name=g,
            )
            for slot, d in enumerate(drivers[g]):
                edges.append(Edge(d, g, slot))
        vertices["out"] = OutputPort()
        edges.append(Edge(rng.choice(gate_names), "out", 0))

        c = Circuit(vertices, edges)
        report = validate(c)
        if report.ok:
            return c
    raise RuntimeError("could not generate a consistent random circuit")


def shuffled_copy(circuit: Circuit, rng: random.Random) -> Circuit:
    """Same circuit with vertex and edge insertion order permuted."""
    names = list(circuit.vertices)
    rng.shuffle(names)
    edges = list(circuit.edges)
    rng.shuffle(edges)
    return Circuit({n: circuit.vertices[n] for n in names}, edges)
