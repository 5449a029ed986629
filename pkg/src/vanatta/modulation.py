"""Switch schedules: driving the surface between retro and null states.

Closing the switches on every other pair adds half a wavelength to their
round trips, putting half of the pair phasors 180 degrees out of phase with
the rest; the retro return cancels exactly.  Leaving all switches open keeps
the surface in its coherent (constructive) state.  On-off keying maps bit 1
to the constructive state and bit 0 to the destructive one, held for one
switch interval each.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .emfield import SwitchConfig
from .errors import ConfigurationError, ConstraintError, SchedulingError
from .geometry import SurfaceLayout

# Defaults matching the radar timing used throughout: the state is held for
# two chirps.
DEFAULT_SWITCH_INTERVAL = 1e-3
DEFAULT_CHIRP_DURATION = 0.5e-3


@dataclass(frozen=True)
class BitFrame:
    """A bit sequence with an optional label."""

    bits: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if not self.bits:
            raise ValueError("bit frame is empty")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)

    def as_string(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class SwitchSchedule:
    """Per-interval switch states; states[i] holds during interval i."""

    switch_interval: float
    states: tuple[SwitchConfig, ...]
    bits: tuple[int, ...]

    def __post_init__(self):
        if self.switch_interval <= 0.0:
            raise ValueError("switch_interval must be positive")
        if len(self.states) != len(self.bits):
            raise ValueError("states and bits must have the same length")
        if not self.states:
            raise ValueError("schedule is empty")
        for i, (state, bit) in enumerate(zip(self.states, self.bits)):
            if bit not in (0, 1):
                raise ValueError(f"bit {i} must be 0 or 1, got {bit}")
            if (len(state.toggled) == 0) != (bit == 1):
                raise ConstraintError(
                    f"state {i} disagrees with bit {bit}: constructive means "
                    f"no toggles"
                )

    @property
    def duration(self) -> float:
        return len(self.states) * self.switch_interval

    @property
    def n_bits(self) -> int:
        return len(self.bits)


def constructive_config() -> SwitchConfig:
    """All switches open: coherent retro state."""
    return SwitchConfig(frozenset())


def destructive_config(layout: SurfaceLayout) -> SwitchConfig:
    """Toggle every other pair so the retro return cancels.

    The even-indexed half of the pairs (second, fourth, ... in pair_id
    order) is toggled; those are the lines that carry switches.  Needs an
    even pair count, otherwise no half-and-half split exists.
    """
    pair_ids = layout.pair_ids()
    if len(pair_ids) % 2 != 0:
        raise ConfigurationError(
            f"destructive state needs an even pair count to toggle exactly "
            f"half, got {len(pair_ids)} pairs"
        )
    toggled = pair_ids[1::2]
    for pid in toggled:
        if not layout.line_for(pid).has_switch:
            raise ConfigurationError(f"pair {pid} has no switch")
    return SwitchConfig(frozenset(toggled))


def encode_bits(
    bits,
    layout: SurfaceLayout,
    switch_interval: float = DEFAULT_SWITCH_INTERVAL,
    chirp_duration: float = DEFAULT_CHIRP_DURATION,
) -> SwitchSchedule:
    """On-off keying: bit 1 -> constructive state, bit 0 -> destructive.

    Args:
        bits: BitFrame or iterable of 0/1.
        layout: surface the schedule drives (fixes the destructive state).
        switch_interval: hold time per bit in seconds.
        chirp_duration: radar chirp length; the interval must not be shorter
            (the radar needs at least one whole chirp per state).

    Returns:
        SwitchSchedule covering the bits in order.
    """
    frame = bits if isinstance(bits, BitFrame) else BitFrame(tuple(bits))
    if switch_interval <= 0.0:
        raise ValueError("switch_interval must be positive")
    if chirp_duration <= 0.0:
        raise ValueError("chirp_duration must be positive")
    if switch_interval < chirp_duration:
        raise SchedulingError(
            f"switch interval {switch_interval} s is shorter than one chirp "
            f"({chirp_duration} s)"
        )
    on = constructive_config()
    off = destructive_config(layout)
    states = tuple(on if b == 1 else off for b in frame.bits)
    return SwitchSchedule(switch_interval=switch_interval, states=states, bits=frame.bits)


def config_at(schedule: SwitchSchedule, t: float) -> SwitchConfig:
    """State active at time t; intervals are half-open [i*dt, (i+1)*dt).

    Raises ValueError outside [0, schedule.duration).
    """
    dt = schedule.switch_interval
    if t < 0.0:
        raise ValueError(f"t must be non-negative, got {t}")
    idx = int(math.floor(t / dt))
    # Guard against the quotient landing one ulp below an exact boundary.
    if (idx + 1) * dt <= t:
        idx += 1
    if idx >= len(schedule.states):
        raise ValueError(f"t={t} s is past the schedule end {schedule.duration} s")
    return schedule.states[idx]


def save_schedule(schedule: SwitchSchedule, path) -> None:
    """Write a schedule as JSON."""
    doc = {
        "switch_interval_s": schedule.switch_interval,
        "bits": "".join(str(b) for b in schedule.bits),
        "states": [sorted(s.toggled) for s in schedule.states],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_schedule(path) -> SwitchSchedule:
    """Read a schedule written by save_schedule."""
    with open(path) as fh:
        doc = json.load(fh)
    bits = tuple(int(ch) for ch in doc["bits"])
    states = tuple(SwitchConfig(frozenset(int(p) for p in s)) for s in doc["states"])
    return SwitchSchedule(
        switch_interval=float(doc["switch_interval_s"]), states=states, bits=bits
    )
