"""Shared fixtures and signal-generation strategies."""

from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from hybridgates.signals import BinarySignal, ModeSwitchSignal


@pytest.fixture
def rng():
    return random.Random(20260816)


def random_binary_signal(r: random.Random, horizon: float, max_transitions: int = 8) -> BinarySignal:
    n = r.randint(0, max_transitions)
    times = sorted(r.uniform(0.0, horizon) for _ in range(n))
    # enforce pairwise separation so canonicalization keeps all of them
    times = [t for i, t in enumerate(times) if i == 0 or t - times[i - 1] > 1e-6]
    init = r.randint(0, 1)
    vals = [(init + i + 1) % 2 for i in range(len(times))]
    return BinarySignal(init, tuple(zip(times, vals)), horizon)


def random_mode_signal(r: random.Random, horizon: float, modes, max_switches: int = 6) -> ModeSwitchSignal:
    n = r.randint(0, max_switches)
    times = sorted(r.uniform(0.0, horizon) for _ in range(n))
    times = [t for i, t in enumerate(times) if i == 0 or t - times[i - 1] > 1e-6]
    init = r.choice(modes)
    return ModeSwitchSignal(init, tuple((t, r.choice(modes)) for t in times), horizon)


@st.composite
def binary_signals(draw, horizon: float = 10.0, max_transitions: int = 6):
    n = draw(st.integers(min_value=0, max_value=max_transitions))
    times = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=horizon, allow_nan=False),
            min_size=n,
            max_size=n,
            unique=True,
        )
    )
    times = sorted(times)
    times = [t for i, t in enumerate(times) if i == 0 or t - times[i - 1] > 1e-6]
    init = draw(st.integers(min_value=0, max_value=1))
    vals = [(init + i + 1) % 2 for i in range(len(times))]
    return BinarySignal(init, tuple(zip(times, vals)), horizon)
