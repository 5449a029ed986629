"""Geometry of retrodirective reflective surfaces.

A surface is a set of antenna elements grouped into pairs, each pair joined
by a passive transmission line.  Two properties make the surface re-radiate
toward whatever direction illuminates it, with no phase estimation anywhere:

1. every pair is centrosymmetric about the layout center, so the incoming
   and outgoing projection paths of a pair sum to the same value for any
   incidence angle, and
2. all line electrical lengths are congruent modulo one wavelength, so the
   residual phase is shared by every pair.

Half of the lines carry a switch that inserts an extra half wavelength.
Closing those switches shifts the affected pairs by 180 degrees and turns
the coherent retro-return into a null, which is what the modulation layer
exploits.

Two builders are provided: a 1-D linear array (pairs nested around the
center, outermost elements paired together) and a 2-D surface of concentric
rings whose radii step by wavelength/pi so that the 180-degree arc lines of
consecutive rings differ by exactly one wavelength.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ConstraintError

# Vacuum speed of light, m/s.
C0 = 299_792_458.0

# Default innermost line length, in wavelengths.  Any value works as long as
# all lines stay congruent modulo the wavelength; ten keeps the lines longer
# than the apertures built here so nested routing stays physical.
DEFAULT_BASE_LENGTH_WAVELENGTHS = 10.0


def wavelength_of(frequency: float) -> float:
    """Free-space wavelength in meters for a frequency in Hz."""
    if frequency <= 0.0:
        raise ValueError(f"frequency must be positive, got {frequency}")
    return C0 / frequency


@dataclass(frozen=True)
class AntennaElement:
    """One radiating element.

    position is (x, y) in meters in the surface plane; x is the axis used
    for azimuth pattern cuts.
    """

    id: int
    position: tuple[float, float]
    pair_id: int


@dataclass(frozen=True)
class TransmissionLine:
    """Line joining the two elements of a pair.

    base_electrical_length is in meters.  When has_switch is true the line
    can insert switched_extra_length (exactly half the design wavelength)
    to flip the pair's round-trip phase by 180 degrees.
    """

    pair_id: int
    base_electrical_length: float
    has_switch: bool
    switched_extra_length: float = 0.0


@dataclass(frozen=True)
class Violation:
    """One validation finding: rule name, offending ids, deviation in meters."""

    rule: str
    ids: tuple[int, ...]
    deviation: float


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple[Violation, ...]

    def summary(self) -> str:
        if self.passed:
            return "layout valid"
        lines = [f"layout invalid ({len(self.violations)} violations)"]
        for v in self.violations:
            ids = ",".join(str(i) for i in v.ids)
            lines.append(f"  {v.rule}: ids=({ids}) deviation={v.deviation:.6g} m")
        return "\n".join(lines)


@dataclass(frozen=True)
class SurfaceLayout:
    """Immutable description of one surface.

    absorption_efficiency is the fraction of incident power captured by an
    element and re-emitted after the line round trip; it enters field
    amplitudes once as its square root.
    """

    elements: tuple[AntennaElement, ...]
    lines: tuple[TransmissionLine, ...]
    wavelength: float
    center: tuple[float, float] = (0.0, 0.0)
    absorption_efficiency: float = 0.82

    def __post_init__(self):
        if self.wavelength <= 0.0:
            raise ConstraintError(f"wavelength must be positive, got {self.wavelength}")
        if not 0.0 < self.absorption_efficiency <= 1.0:
            raise ConstraintError(
                f"absorption_efficiency must be in (0, 1], got {self.absorption_efficiency}"
            )
        ids = [e.id for e in self.elements]
        if len(set(ids)) != len(ids):
            raise ConstraintError("element ids must be unique")
        members: dict[int, int] = {}
        for e in self.elements:
            members[e.pair_id] = members.get(e.pair_id, 0) + 1
        bad = sorted(p for p, n in members.items() if n != 2)
        if bad:
            raise ConstraintError(f"pairs must have exactly two elements, bad: {bad}")
        line_ids = [ln.pair_id for ln in self.lines]
        if sorted(line_ids) != sorted(members):
            raise ConstraintError("pair_ids of lines and element pairs must match")
        half = self.wavelength / 2.0
        for ln in self.lines:
            want = half if ln.has_switch else 0.0
            if ln.switched_extra_length != want:
                raise ConstraintError(
                    f"line {ln.pair_id}: switched_extra_length must be "
                    f"{want} m, got {ln.switched_extra_length}"
                )

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def n_pairs(self) -> int:
        return len(self.lines)

    def pair_ids(self) -> tuple[int, ...]:
        return tuple(sorted(ln.pair_id for ln in self.lines))

    def pair_elements(self, pair_id: int) -> tuple[AntennaElement, AntennaElement]:
        both = [e for e in self.elements if e.pair_id == pair_id]
        if len(both) != 2:
            raise KeyError(f"no pair {pair_id}")
        both.sort(key=lambda e: e.id)
        return both[0], both[1]

    def line_for(self, pair_id: int) -> TransmissionLine:
        for ln in self.lines:
            if ln.pair_id == pair_id:
                return ln
        raise KeyError(f"no line for pair {pair_id}")


def build_linear_array(
    n_pairs: int,
    spacing: float,
    wavelength: float,
    base_length: float | None = None,
    absorption_efficiency: float = 0.82,
) -> SurfaceLayout:
    """Uniform 1-D array of 2*n_pairs elements centered on the origin.

    Outermost elements are paired together (pair 1), the next ones inward
    form pair 2, and so on.  The innermost pair's line has base_length
    (default 10 wavelengths); each enclosing pair adds one wavelength so the
    line of pair k is base_length + (n_pairs - k) * wavelength.  Switches sit
    on the even-numbered pairs.

    Args:
        n_pairs: number of element pairs (>= 1).
        spacing: element separation in meters, at least wavelength/2.
        wavelength: design wavelength in meters.
        base_length: innermost line electrical length; default 10 wavelengths.
        absorption_efficiency: see SurfaceLayout.

    Returns:
        A SurfaceLayout that passes validate_layout.
    """
    if n_pairs < 1:
        raise ConstraintError(f"n_pairs must be >= 1, got {n_pairs}")
    if wavelength <= 0.0:
        raise ConstraintError(f"wavelength must be positive, got {wavelength}")
    if spacing < wavelength / 2.0:
        raise ConstraintError(
            f"spacing {spacing} m is below the half-wavelength minimum "
            f"{wavelength / 2.0} m"
        )
    if base_length is None:
        base_length = DEFAULT_BASE_LENGTH_WAVELENGTHS * wavelength
    if base_length <= 0.0:
        raise ConstraintError(f"base_length must be positive, got {base_length}")

    n = 2 * n_pairs
    elements = []
    for i in range(n):
        x = (i - (n - 1) / 2.0) * spacing
        pair = min(i, n - 1 - i) + 1
        elements.append(AntennaElement(id=i, position=(x, 0.0), pair_id=pair))

    lines = []
    for k in range(1, n_pairs + 1):
        switched = k % 2 == 0
        lines.append(
            TransmissionLine(
                pair_id=k,
                base_electrical_length=base_length + (n_pairs - k) * wavelength,
                has_switch=switched,
                switched_extra_length=wavelength / 2.0 if switched else 0.0,
            )
        )
    return SurfaceLayout(
        elements=tuple(elements),
        lines=tuple(lines),
        wavelength=wavelength,
        absorption_efficiency=absorption_efficiency,
    )


def _max_even_count(radius: float, wavelength: float) -> int:
    # Largest even element count whose same-ring chord stays >= wavelength/2.
    ratio = wavelength / (4.0 * radius)
    if ratio > 1.0:
        raise ConstraintError(
            f"ring radius {radius} m too small for half-wavelength spacing"
        )
    n = int(math.pi / math.asin(ratio)) if ratio > 0.0 else 10**9
    n -= n % 2
    while n >= 2 and 2.0 * radius * math.sin(math.pi / n) < wavelength / 2.0:
        n -= 2
    if n < 2:
        raise ConstraintError(
            f"ring radius {radius} m too small for half-wavelength spacing"
        )
    return n


def _uniform_ring_count(base_radius: float, n_rings: int, wavelength: float) -> int:
    """Even per-ring count satisfying same-ring and adjacent-ring spacing.

    Rings sit only wavelength/pi apart radially, closer than the
    wavelength/2 floor, so adjacent rings must interleave: all rings share
    one count, alternate rings are offset by half an angular step, and the
    count is capped so the worst-case (innermost) cross-ring distance still
    clears the floor.
    """
    n = _max_even_count(base_radius, wavelength)
    if n_rings > 1:
        r0 = base_radius
        r1 = base_radius + wavelength / math.pi
        floor_sq = (wavelength / 2.0) ** 2
        while n > 2:
            gap = math.pi / n
            d_sq = r0 * r0 + r1 * r1 - 2.0 * r0 * r1 * math.cos(gap)
            if d_sq >= floor_sq:
                break
            n -= 2
        # n = 2 always clears: r0^2 + r1^2 alone exceeds the floor once
        # base_radius >= wavelength/4.
    return n


def _ring_positions(radius: float, count: int, phase: float) -> list[tuple[float, float]]:
    # First half explicitly, second half as exact negations so every pair is
    # centrosymmetric to the bit.
    pos = []
    for j in range(count // 2):
        a = phase + 2.0 * math.pi * j / count
        pos.append((radius * math.cos(a), radius * math.sin(a)))
    pos.extend((-x, -y) for x, y in pos[: count // 2])
    return pos


def build_concentric_surface(
    n_rings: int,
    base_radius: float,
    wavelength: float,
    absorption_efficiency: float = 0.82,
) -> SurfaceLayout:
    """2-D surface of concentric rings with diametric pairs.

    Ring m has radius base_radius + m * wavelength / pi and its pairs are
    joined by 180-degree arc lines of length pi * radius, so lines of
    consecutive rings differ by exactly one wavelength.  All rings share one
    even element count — the largest that keeps the innermost same-ring
    chord at wavelength/2 or more and, with alternate rings offset by half
    an angular step, keeps adjacent rings that far apart too (ring pitch is
    wavelength/pi, closer than the floor, so the rings must interleave).

    Args:
        n_rings: number of rings (>= 1).
        base_radius: innermost ring radius in meters (>= wavelength/4 so a
            diametric pair is at least half a wavelength apart).
        wavelength: design wavelength in meters.
        absorption_efficiency: see SurfaceLayout.

    Returns:
        A SurfaceLayout that passes validate_layout.
    """
    if n_rings < 1:
        raise ConstraintError(f"n_rings must be >= 1, got {n_rings}")
    if wavelength <= 0.0:
        raise ConstraintError(f"wavelength must be positive, got {wavelength}")
    if base_radius < wavelength / 4.0:
        raise ConstraintError(
            f"base_radius {base_radius} m gives a diametric pair closer than "
            f"wavelength/2; need at least {wavelength / 4.0} m"
        )

    count = _uniform_ring_count(base_radius, n_rings, wavelength)
    elements: list[AntennaElement] = []
    lines: list[TransmissionLine] = []
    next_element = 0
    next_pair = 1

    for m in range(n_rings):
        radius = base_radius + m * wavelength / math.pi
        phase = (math.pi / count) * (m % 2)
        pos = _ring_positions(radius, count, phase)

        ring_pairs = []
        for j in range(count // 2):
            pid = next_pair
            next_pair += 1
            ring_pairs.append(pid)
            elements.append(
                AntennaElement(id=next_element, position=pos[j], pair_id=pid)
            )
            next_element += 1
        for j in range(count // 2):
            elements.append(
                AntennaElement(
                    id=next_element,
                    position=pos[count // 2 + j],
                    pair_id=ring_pairs[j],
                )
            )
            next_element += 1
        for pid in ring_pairs:
            switched = pid % 2 == 0
            lines.append(
                TransmissionLine(
                    pair_id=pid,
                    base_electrical_length=math.pi * radius,
                    has_switch=switched,
                    switched_extra_length=wavelength / 2.0 if switched else 0.0,
                )
            )

    return SurfaceLayout(
        elements=tuple(elements),
        lines=tuple(lines),
        wavelength=wavelength,
        absorption_efficiency=absorption_efficiency,
    )


def validate_layout(layout: SurfaceLayout, tolerance: float = 1e-9) -> ValidationReport:
    """Check the three retrodirection constraints.

    Rules reported:
      centrosymmetry          pair midpoint off the layout center
      line_length_congruence  two lines whose lengths differ by a non-integer
                              number of wavelengths
      min_spacing             two elements closer than wavelength/2

    Deviations are in meters: the midpoint-sum offset |p_a + p_b - 2c| for
    centrosymmetry, the distance to the nearest wavelength multiple for
    congruence, and the shortfall below wavelength/2 for spacing.

    Args:
        layout: surface to check.
        tolerance: allowed deviation in meters (default 1e-9).

    Returns:
        ValidationReport; passed is true iff no rule exceeds tolerance.
    """
    if tolerance < 0.0:
        raise ValueError(f"tolerance must be non-negative, got {tolerance}")
    lam = layout.wavelength
    cx, cy = layout.center
    violations: list[Violation] = []

    for pid in layout.pair_ids():
        a, b = layout.pair_elements(pid)
        dev = math.hypot(
            a.position[0] + b.position[0] - 2.0 * cx,
            a.position[1] + b.position[1] - 2.0 * cy,
        )
        if dev > tolerance:
            violations.append(Violation("centrosymmetry", (pid,), dev))

    lines = sorted(layout.lines, key=lambda ln: ln.pair_id)
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            diff = lines[i].base_electrical_length - lines[j].base_electrical_length
            frac = abs(math.fmod(diff, lam))
            dev = min(frac, lam - frac)
            if dev > tolerance:
                violations.append(
                    Violation(
                        "line_length_congruence",
                        (lines[i].pair_id, lines[j].pair_id),
                        dev,
                    )
                )

    elems = layout.elements
    floor = lam / 2.0
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            d = math.hypot(
                elems[i].position[0] - elems[j].position[0],
                elems[i].position[1] - elems[j].position[1],
            )
            if d < floor - tolerance:
                violations.append(
                    Violation("min_spacing", (elems[i].id, elems[j].id), floor - d)
                )

    return ValidationReport(passed=not violations, violations=tuple(violations))


def save_layout(layout: SurfaceLayout, path) -> None:
    """Write a layout as JSON; floats round-trip exactly."""
    doc = {
        "wavelength_m": layout.wavelength,
        "center_xy_m": list(layout.center),
        "absorption_efficiency": layout.absorption_efficiency,
        "elements": [
            {
                "id": e.id,
                "x_m": e.position[0],
                "y_m": e.position[1],
                "pair_id": e.pair_id,
            }
            for e in layout.elements
        ],
        "lines": [
            {
                "pair_id": ln.pair_id,
                "base_length_m": ln.base_electrical_length,
                "has_switch": ln.has_switch,
            }
            for ln in layout.lines
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_layout(path) -> SurfaceLayout:
    """Read a layout written by save_layout."""
    with open(path) as fh:
        doc = json.load(fh)
    lam = float(doc["wavelength_m"])
    elements = tuple(
        AntennaElement(
            id=int(e["id"]),
            position=(float(e["x_m"]), float(e["y_m"])),
            pair_id=int(e["pair_id"]),
        )
        for e in doc["elements"]
    )
    lines = tuple(
        TransmissionLine(
            pair_id=int(ln["pair_id"]),
            base_electrical_length=float(ln["base_length_m"]),
            has_switch=bool(ln["has_switch"]),
            switched_extra_length=lam / 2.0 if ln["has_switch"] else 0.0,
        )
        for ln in doc["lines"]
    )
    return SurfaceLayout(
        elements=elements,
        lines=lines,
        wavelength=lam,
        center=tuple(float(v) for v in doc["center_xy_m"]),
        absorption_efficiency=float(doc["absorption_efficiency"]),
    )
