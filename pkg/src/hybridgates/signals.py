"""Binary step signals, mode-switch signals, and the metrics defined on them.

A binary signal is a right-continuous 0/1 step function on a finite horizon
``[0, T]``, stored as an initial value (the left-sided limit at 0) plus a
strictly increasing, strictly alternating transition list.  A transition at
``t = 0`` encodes ``s(0) != s(0-)``.

Mode-switch signals are the piecewise-constant selector functions that drive
a hybrid gate between its ODE modes; they carry opaque hashable mode ids.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Hashable, Iterable, Sequence

__all__ = [
    "TIME_EPS",
    "Transition",
    "BinarySignal",
    "ModeSwitchSignal",
    "Pulse",
    "SpfInputKind",
    "delay",
    "one_norm_distance",
    "mode_distance",
    "classify_spf_input",
    "min_pulse_width",
    "read_signal_csv",
    "write_signal_csv",
]

# Two event times closer than this are treated as simultaneous; zero-width
# pulses at or below this scale are canonicalized away at construction.
TIME_EPS = 1e-12


@dataclass(frozen=True, order=True)
class Transition:
    """A single 0->1 or 1->0 edge: the signal takes `value` at `time`."""

    time: float
    value: int

    def __post_init__(self) -> None:
        if self.value not in (0, 1):
            raise ValueError(f"transition value must be 0 or 1, got {self.value!r}")
        if not math.isfinite(self.time):
            raise ValueError(f"transition time must be finite, got {self.time!r}")


def _normalize_transitions(items: Iterable) -> list[Transition]:
    out = []
    for item in items:
        if isinstance(item, Transition):
            out.append(item)
        else:
            t, v = item
            out.append(Transition(float(t), int(v)))
    return out


@dataclass(frozen=True)
class BinarySignal:
    """Right-continuous 0/1 step function on ``[0, horizon]``.

    ``initial_value`` is the value "just before" time 0; the value on
    ``[0, horizon]`` is obtained by applying the transitions in order.
    Construction validates monotonicity and alternation and cancels
    zero-width pulses (two opposite transitions within ``TIME_EPS``).
    """

    initial_value: int
    transitions: tuple[Transition, ...]
    horizon: float

    def __post_init__(self) -> None:
        if self.initial_value not in (0, 1):
            raise ValueError(f"initial value must be 0 or 1, got {self.initial_value!r}")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"horizon must be positive and finite, got {self.horizon!r}")

        raw = _normalize_transitions(self.transitions)
        for tr in raw:
            if tr.time < -TIME_EPS or tr.time > self.horizon + TIME_EPS:
                raise ValueError(
                    f"transition at t={tr.time} outside [0, {self.horizon}]"
                )
        # Clamp boundary jitter, keep times in range.
        raw = [Transition(min(max(tr.time, 0.0), self.horizon), tr.value) for tr in raw]

        # Strict time ordering, with cancellation of zero-width pulses: a
        # pair of opposite transitions closer than TIME_EPS annihilates.
        stack: list[Transition] = []
        for tr in raw:
            if stack and tr.time < stack[-1].time - TIME_EPS:
                raise ValueError("transition times must be sorted increasing")
            if stack and tr.time - stack[-1].time <= TIME_EPS:
                if tr.value != stack[-1].value:
                    stack.pop()
                    continue
                raise ValueError(
                    f"two transitions to value {tr.value} at time {tr.time}"
                )
            stack.append(tr)

        prev = self.initial_value
        for tr in stack:
            if tr.value == prev:
                raise ValueError(
                    f"transition at t={tr.time} does not alternate (value {tr.value} repeated)"
                )
            prev = tr.value

        object.__setattr__(self, "transitions", tuple(stack))
        object.__setattr__(self, "_times", tuple(tr.time for tr in stack))

    # -- constructors ---------------------------------------------------

    @classmethod
    def constant(cls, value: int, horizon: float) -> "BinarySignal":
        return cls(value, (), horizon)

    @classmethod
    def pulse(cls, start: float, width: float, horizon: float) -> "BinarySignal":
        """Zero signal with a single high pulse ``[start, start+width)``."""
        if width <= 0:
            raise ValueError(f"pulse width must be positive, got {width!r}")
        transitions: list[tuple[float, int]] = []
        if start <= horizon:
            transitions.append((start, 1))
            if start + width <= horizon:
                transitions.append((start + width, 0))
        return cls(0, tuple(transitions), horizon)

    # -- evaluation -----------------------------------------------------

    def value_at(self, t: float) -> int:
        """Signal value at time ``t`` (right-continuous)."""
        idx = bisect_right(self._times, t)
        if idx == 0:
            return self.initial_value
        return self.transitions[idx - 1].value

    @property
    def final_value(self) -> int:
        return self.transitions[-1].value if self.transitions else self.initial_value

    @property
    def times(self) -> tuple[float, ...]:
        return self._times

    def is_zero(self) -> bool:
        return self.initial_value == 0 and not self.transitions

    def intervals(self) -> list[tuple[float, float, int]]:
        """Partition of ``[0, horizon]`` into (start, end, value) pieces."""
        out = []
        t_prev, v_prev = 0.0, self.value_at(0.0)
        for tr in self.transitions:
            if tr.time > t_prev:
                out.append((t_prev, tr.time, v_prev))
            t_prev, v_prev = tr.time, tr.value
        if self.horizon > t_prev or not out:
            out.append((t_prev, self.horizon, v_prev))
        return out

    def restricted(self, horizon: float) -> "BinarySignal":
        """The same signal viewed on the (shorter or longer) horizon.

        Extending assumes the signal holds its final value.
        """
        kept = tuple(tr for tr in self.transitions if tr.time <= horizon + TIME_EPS)
        return BinarySignal(self.initial_value, kept, horizon)


# -- operations on binary signals ---------------------------------------


def delay(s: BinarySignal, delta: float) -> BinarySignal:
    """Pure delay: value ``s.initial_value`` before ``delta``, then ``s(t - delta)``.

    Transitions shifted past the horizon are dropped.
    """
    if delta < 0:
        raise ValueError(f"delay must be nonnegative, got {delta!r}")
    shifted = tuple(
        Transition(tr.time + delta, tr.value)
        for tr in s.transitions
        if tr.time + delta <= s.horizon + TIME_EPS
    )
    return BinarySignal(s.initial_value, shifted, s.horizon)


def _merged_breakpoints(times_a: Sequence[float], times_b: Sequence[float], horizon: float) -> list[float]:
    pts = sorted(set([0.0, horizon]) | set(times_a) | set(times_b))
    return [t for t in pts if 0.0 <= t <= horizon]


def one_norm_distance(s1: BinarySignal, s2: BinarySignal) -> float:
    """L1 distance ``integral |s1 - s2|`` = measure of the disagreement set."""
    if abs(s1.horizon - s2.horizon) > TIME_EPS:
        raise ValueError(
            f"signals have different horizons: {s1.horizon} vs {s2.horizon}"
        )
    pts = _merged_breakpoints(s1.times, s2.times, s1.horizon)
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        if s1.value_at(a) != s2.value_at(a):
            total += b - a
    return total


# -- mode-switch signals -------------------------------------------------


@dataclass(frozen=True)
class ModeSwitchSignal:
    """Piecewise-constant mode selector on ``[0, horizon]``.

    Switch entries are ``(time, mode_id)`` with strictly increasing times.
    Consecutive equal modes are dropped at construction (a switch to the
    mode already active is a no-op); coincident switches merge, last wins.
    """

    initial_mode: Hashable
    switches: tuple[tuple[float, Hashable], ...]
    horizon: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"horizon must be positive and finite, got {self.horizon!r}")
        cleaned: list[tuple[float, Hashable]] = []
        for item in self.switches:
            t, mode = float(item[0]), item[1]
            if t < -TIME_EPS or t > self.horizon + TIME_EPS:
                raise ValueError(f"switch at t={t} outside [0, {self.horizon}]")
            t = min(max(t, 0.0), self.horizon)
            if cleaned and t < cleaned[-1][0] - TIME_EPS:
                raise ValueError("switch times must be sorted increasing")
            if cleaned and t - cleaned[-1][0] <= TIME_EPS:
                cleaned[-1] = (cleaned[-1][0], mode)  # coincident: last wins
            else:
                cleaned.append((t, mode))
        # Drop no-op switches.
        result: list[tuple[float, Hashable]] = []
        current = self.initial_mode
        for t, mode in cleaned:
            if mode != current:
                result.append((t, mode))
                current = mode
        object.__setattr__(self, "switches", tuple(result))
        object.__setattr__(self, "_times", tuple(t for t, _ in result))

    @property
    def switch_times(self) -> tuple[float, ...]:
        return self._times

    def mode_at(self, t: float) -> Hashable:
        idx = bisect_right(self._times, t)
        if idx == 0:
            return self.initial_mode
        return self.switches[idx - 1][1]

    def intervals(self) -> list[tuple[float, float, Hashable]]:
        """Partition of ``[0, horizon]`` into (start, end, mode) pieces."""
        out = []
        t_prev, m_prev = 0.0, self.mode_at(0.0)
        for t, mode in self.switches:
            if t > t_prev:
                out.append((t_prev, t, m_prev))
            t_prev, m_prev = t, mode
        if self.horizon > t_prev or not out:
            out.append((t_prev, self.horizon, m_prev))
        return out


def mode_distance(a: ModeSwitchSignal, b: ModeSwitchSignal) -> float:
    """Measure of ``{t in [0, T] : a(t) != b(t)}`` (a pseudometric)."""
    if abs(a.horizon - b.horizon) > TIME_EPS:
        raise ValueError(f"signals have different horizons: {a.horizon} vs {b.horizon}")
    pts = _merged_breakpoints(a.switch_times, b.switch_times, a.horizon)
    total = 0.0
    for lo, hi in zip(pts, pts[1:]):
        if a.mode_at(lo) != b.mode_at(lo):
            total += hi - lo
    return total


# -- pulse classification -------------------------------------------------


@dataclass(frozen=True)
class Pulse:
    """A single high pulse: up at ``start``, down at ``start + width``."""

    start: float
    width: float

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError(f"pulse start must be nonnegative, got {self.start!r}")
        if self.width <= 0:
            raise ValueError(f"pulse width must be positive, got {self.width!r}")


class SpfInputKind(Enum):
    ZERO = "zero"
    SINGLE_PULSE = "single_pulse"
    OTHER = "other"


def classify_spf_input(s: BinarySignal) -> tuple[SpfInputKind, Pulse | None]:
    """Classify a signal as zero, a single high pulse, or anything else."""
    if s.is_zero():
        return SpfInputKind.ZERO, None
    if (
        s.initial_value == 0
        and len(s.transitions) == 2
        and s.transitions[0].value == 1
        and s.transitions[1].value == 0
    ):
        up, down = s.transitions
        return SpfInputKind.SINGLE_PULSE, Pulse(up.time, down.time - up.time)
    return SpfInputKind.OTHER, None


def min_pulse_width(s: BinarySignal) -> float | None:
    """Width of the shortest complete high pulse, or None if there is none.

    Only rising->falling pairs count; a leading high interval or a trailing
    rise with no matching fall is not a pulse.
    """
    widths = [
        b.time - a.time
        for a, b in zip(s.transitions, s.transitions[1:])
        if a.value == 1 and b.value == 0
    ]
    return min(widths) if widths else None


# -- CSV interchange -------------------------------------------------------


def write_signal_csv(s: BinarySignal, path: str | Path, metadata: dict | None = None) -> None:
    """Write a transition list as CSV with `# key=value` header comments."""
    lines = [f"# initial={s.initial_value}", f"# horizon={s.horizon!r}"]
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}={value}")
    lines.append("time,value")
    for tr in s.transitions:
        lines.append(f"{tr.time!r},{tr.value}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal_csv(path: str | Path) -> BinarySignal:
    """Inverse of :func:`write_signal_csv`; ignores unknown header comments."""
    initial: int | None = None
    horizon: float | None = None
    transitions: list[tuple[float, int]] = []
    saw_header = False
    for raw_line in Path(path).read_text().splitlines():
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                key = key.strip()
                if key == "initial":
                    initial = int(value)
                elif key == "horizon":
                    horizon = float(value)
            continue
        if not saw_header:
            if line.lower().replace(" ", "") != "time,value":
                raise ValueError(f"expected 'time,value' header, got {line!r}")
            saw_header = True
            continue
        t_str, _, v_str = line.partition(",")
        transitions.append((float(t_str), int(v_str)))
    if initial is None or horizon is None:
        raise ValueError(f"{path}: missing '# initial=' or '# horizon=' header")
    return BinarySignal(initial, tuple(transitions), horizon)
