"""Round-trip field response of a surface and the flat-plate baseline.

The response model follows the surface's operating principle directly: a
plane wave from incidence angle theta reaches each element with a projection
path x*sin(theta) relative to the layout center, travels the pair's line,
and re-radiates toward the observation angle phi with projection path
x*sin(phi).  Each pair is traversed in both directions, so a surface of N
elements contributes N phasors

    exp(-j k (x_in sin(theta) + l_line + x_out sin(phi)))

scaled by the incident amplitude, by sqrt(absorption_efficiency) once per
round trip, and by the 1/r far-field convention at the reference distance
(1 m unless stated).  Centrosymmetry makes x_in + x_out vanish pairwise at
phi = theta, so the retro direction adds coherently regardless of theta; a
half-wavelength switch on half of the pairs turns that sum into a null.

Patterns are azimuth cuts in the plane spanned by the array x-axis and the
surface normal; only element x-coordinates enter the projection paths.

The baseline a surface is compared against is the monostatic physical-optics
return of a flat plate of the same aperture:

    |E(theta)| = amplitude * cos(theta) * |sinc(k w sin(theta))| * w / lambda

with sinc(x) = sin(x)/x and the trailing factor exposed as ``norm``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import ConfigurationError, ConstraintError, DesignMismatchWarning
from .geometry import C0, SurfaceLayout, build_linear_array, validate_layout

# All patterns and responses are quoted at this distance unless overridden.
REFERENCE_DISTANCE = 1.0

# Fraction of the design wavelength beyond which a wave is flagged as
# off-design (the line lengths no longer realize clean 0/180 states).
WAVELENGTH_MISMATCH_LIMIT = 0.10

# Floor applied to magnitude-in-dB columns so exact nulls stay numeric.
DB_FLOOR = -400.0


@dataclass(frozen=True)
class PlaneWave:
    """Incident plane wave: frequency in Hz, incidence angle in degrees."""

    frequency: float
    incidence_angle_deg: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.frequency <= 0.0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")
        if not -90.0 < self.incidence_angle_deg < 90.0:
            raise ValueError(
                f"incidence angle must lie in (-90, 90) deg, got {self.incidence_angle_deg}"
            )
        if self.amplitude <= 0.0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")

    @property
    def wavelength(self) -> float:
        return C0 / self.frequency

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class SwitchConfig:
    """Set of pair_ids whose line switches are closed (+half wavelength)."""

    toggled: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "toggled", frozenset(self.toggled))


@dataclass(frozen=True)
class FieldPattern:
    """Complex field over observation angles at a reference distance."""

    angles_deg: np.ndarray
    values: np.ndarray
    reference_distance: float = REFERENCE_DISTANCE

    def __post_init__(self):
        if self.reference_distance <= 0.0:
            raise ValueError("reference_distance must be positive")
        if self.angles_deg.shape != self.values.shape:
            raise ValueError("angles and values must have matching shapes")
        if self.angles_deg.size == 0:
            raise ValueError("pattern is empty")
        if np.any(np.diff(self.angles_deg) <= 0.0):
            raise ValueError("angles must be strictly increasing")

    @property
    def samples(self) -> list[tuple[float, complex]]:
        return list(zip(self.angles_deg.tolist(), self.values.tolist()))

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)

    def peak_angle(self) -> float:
        return float(self.angles_deg[int(np.argmax(self.magnitudes()))])

    def value_at(self, angle_deg: float) -> complex:
        idx = int(np.argmin(np.abs(self.angles_deg - angle_deg)))
        if abs(float(self.angles_deg[idx]) - angle_deg) > 1e-9:
            raise KeyError(f"angle {angle_deg} deg not on the pattern grid")
        return complex(self.values[idx])


class MonostaticGain(NamedTuple):
    gain_db: float
    plate_is_null: bool


def _check_wave(layout: SurfaceLayout, wave: PlaneWave) -> None:
    mismatch = abs(wave.wavelength - layout.wavelength) / layout.wavelength
    if mismatch > WAVELENGTH_MISMATCH_LIMIT:
        warnings.warn(
            f"wave wavelength {wave.wavelength:.6g} m is {mismatch:.1%} off the "
            f"design wavelength {layout.wavelength:.6g} m; switch states will "
            f"not realize clean 0/180 phases",
            DesignMismatchWarning,
            stacklevel=3,
        )


def _traversal_arrays(layout: SurfaceLayout, config: SwitchConfig):
    """Per-traversal absorber x, re-radiator x and line length arrays."""
    pair_ids = layout.pair_ids()
    known = set(pair_ids)
    for pid in config.toggled:
        if pid not in known:
            raise ConfigurationError(f"toggled pair {pid} does not exist")
        if not layout.line_for(pid).has_switch:
            raise ConfigurationError(f"pair {pid} has no switch")

    n = 2 * len(pair_ids)
    x_in = np.empty(n)
    x_out = np.empty(n)
    path = np.empty(n)
    cx = layout.center[0]
    for i, pid in enumerate(pair_ids):
        a, b = layout.pair_elements(pid)
        line = layout.line_for(pid)
        total = line.base_electrical_length
        if pid in config.toggled:
            total += line.switched_extra_length
        x_in[2 * i] = a.position[0] - cx
        x_out[2 * i] = b.position[0] - cx
        x_in[2 * i + 1] = b.position[0] - cx
        x_out[2 * i + 1] = a.position[0] - cx
        path[2 * i] = total
        path[2 * i + 1] = total
    return x_in, x_out, path


def _require_valid(layout: SurfaceLayout) -> None:
    report = validate_layout(layout)
    if not report.passed:
        raise ConstraintError(report.summary())


def _response_grid(
    layout: SurfaceLayout,
    config: SwitchConfig,
    wave: PlaneWave,
    angles_deg: np.ndarray,
    reference_distance: float,
    element_taper: bool,
) -> np.ndarray:
    x_in, x_out, path = _traversal_arrays(layout, config)
    theta = math.radians(wave.incidence_angle_deg)
    out = kernels.pair_path_response(
        x_in, x_out, path, wave.wavenumber, math.sin(theta), np.sin(np.radians(angles_deg))
    )
    scale = wave.amplitude * math.sqrt(layout.absorption_efficiency) / reference_distance
    if element_taper:
        out = out * (math.cos(theta) * np.cos(np.radians(angles_deg)))
    return out * scale


def roundtrip_response(
    layout: SurfaceLayout,
    config: SwitchConfig,
    wave: PlaneWave,
    observation_angle_deg: float,
    reference_distance: float = REFERENCE_DISTANCE,
    element_taper: bool = False,
) -> complex:
    """Complex field re-radiated toward one observation angle.

    Args:
        layout: surface geometry; must pass validate_layout.
        config: switch state applied to the lines.
        wave: incident plane wave.
        observation_angle_deg: angle of the observer, degrees from normal,
            in [-90, 90].
        reference_distance: distance in meters the field is quoted at.
        element_taper: apply a cos(theta)*cos(phi) element factor instead of
            isotropic elements.

    Returns:
        Complex field amplitude at the reference distance.
    """
    if not -90.0 <= observation_angle_deg <= 90.0:
        raise ValueError(
            f"observation angle must lie in [-90, 90] deg, got {observation_angle_deg}"
        )
    if reference_distance <= 0.0:
        raise ValueError("reference_distance must be positive")
    _require_valid(layout)
    _check_wave(layout, wave)
    grid = np.array([observation_angle_deg], dtype=np.float64)
    return complex(
        _response_grid(layout, config, wave, grid, reference_distance, element_taper)[0]
    )


def field_pattern(
    layout: SurfaceLayout,
    config: SwitchConfig,
    wave: PlaneWave,
    angles_deg,
    reference_distance: float = REFERENCE_DISTANCE,
    element_taper: bool = False,
) -> FieldPattern:
    """Evaluate roundtrip_response over a strictly increasing angle grid."""
    grid = np.asarray(angles_deg, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("angle grid is empty")
    if grid.size > 1 and not np.all(np.diff(grid) > 0.0):
        raise ValueError("angle grid must be strictly increasing")
    if grid[0] < -90.0 or grid[-1] > 90.0:
        raise ValueError("angle grid must stay within [-90, 90] deg")
    if reference_distance <= 0.0:
        raise ValueError("reference_distance must be positive")
    _require_valid(layout)
    _check_wave(layout, wave)
    values = _response_grid(layout, config, wave, grid, reference_distance, element_taper)
    return FieldPattern(angles_deg=grid, values=values, reference_distance=reference_distance)


def _sinc(x):
    # sin(x)/x with the removable singularity filled in.
    return np.sinc(np.asarray(x) / math.pi)


def plate_baseline_pattern(
    width: float,
    wave: PlaneWave,
    angles_deg,
    reference_distance: float = REFERENCE_DISTANCE,
    norm: float | None = None,
) -> FieldPattern:
    """Monostatic physical-optics return of a flat plate of given width.

    norm defaults to width/wavelength (aperture size in wavelengths); pass
    an explicit value to change the normalization convention.
    """
    if width <= 0.0:
        raise ValueError(f"width must be positive, got {width}")
    if reference_distance <= 0.0:
        raise ValueError("reference_distance must be positive")
    grid = np.asarray(angles_deg, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("angle grid is empty")
    if grid.size > 1 and not np.all(np.diff(grid) > 0.0):
        raise ValueError("angle grid must be strictly increasing")
    if grid[0] < -90.0 or grid[-1] > 90.0:
        raise ValueError("angle grid must stay within [-90, 90] deg")
    if norm is None:
        norm = width / wave.wavelength
    theta = np.radians(grid)
    mags = (
        wave.amplitude
        * np.cos(theta)
        * np.abs(_sinc(wave.wavenumber * width * np.sin(theta)))
        * norm
        / reference_distance
    )
    return FieldPattern(
        angles_deg=grid,
        values=mags.astype(np.complex128),
        reference_distance=reference_distance,
    )


def plate_monostatic_amplitude(
    width: float,
    wave: PlaneWave,
    reference_distance: float = REFERENCE_DISTANCE,
    norm: float | None = None,
) -> float:
    """Plate return magnitude at the wave's own incidence angle."""
    pattern = plate_baseline_pattern(
        width, wave, np.array([wave.incidence_angle_deg]), reference_distance, norm
    )
    return float(np.abs(pattern.values[0]))


def far_field_amplitude(amplitude_at_ref: float, reference_distance: float, distance: float) -> float:
    """1/r far-field scaling from the reference distance outward."""
    if reference_distance <= 0.0:
        raise ValueError("reference_distance must be positive")
    if distance <= 0.0:
        raise ValueError(f"distance must be positive, got {distance}")
    return amplitude_at_ref * reference_distance / distance


def monostatic_gain_db(
    layout: SurfaceLayout,
    config: SwitchConfig,
    wave: PlaneWave,
    plate_width: float,
    plate_norm: float | None = None,
) -> MonostaticGain:
    """Surface retro-return over plate return, in dB, at the wave's angle.

    Returns (gain_db, plate_is_null); gain_db is +inf when the plate sits
    exactly on a pattern null.
    """
    surface = abs(
        roundtrip_response(layout, config, wave, wave.incidence_angle_deg)
    )
    plate = plate_monostatic_amplitude(plate_width, wave, norm=plate_norm)
    if plate == 0.0:
        return MonostaticGain(math.inf, True)
    if surface == 0.0:
        return MonostaticGain(-math.inf, False)
    return MonostaticGain(20.0 * math.log10(surface / plate), False)


def range_extension(gain_db: float) -> float:
    """Detection-range multiplier implied by an amplitude gain in dB."""
    return 10.0 ** (gain_db / 20.0)


def scaling_sweep(n_elements, spacing: float, wave: PlaneWave) -> list[tuple[int, float]]:
    """Retro-return gain over a single element for each array size.

    Args:
        n_elements: iterable of even element counts (>= 2).
        spacing: element spacing in meters for the linear arrays.
        wave: incident wave; retro gain is evaluated at its own angle.

    Returns:
        List of (n, amplitude ratio); the ratio is n exactly under the
        isotropic element model.
    """
    results = []
    config = SwitchConfig()
    for n in n_elements:
        if n < 2 or n % 2 != 0:
            raise ConstraintError(f"element counts must be even and >= 2, got {n}")
        layout = build_linear_array(n // 2, spacing, wave.wavelength)
        surface = abs(
            roundtrip_response(layout, config, wave, wave.incidence_angle_deg)
        )
        single = wave.amplitude * math.sqrt(layout.absorption_efficiency) / REFERENCE_DISTANCE
        results.append((n, surface / single))
    return results


def magnitude_db(values, floor_db: float = DB_FLOOR) -> np.ndarray:
    """20 log10 |values| with exact zeros clamped to floor_db."""
    mags = np.abs(np.asarray(values, dtype=np.complex128))
    out = np.full(mags.shape, floor_db)
    np.log10(mags, out=out, where=mags > 0.0)
    out = np.where(mags > 0.0, 20.0 * out, floor_db)
    return np.maximum(out, floor_db)


def write_pattern_csv(pattern: FieldPattern, path) -> None:
    """CSV with columns angle_deg, re_v_per_m, im_v_per_m, mag_v_per_m, mag_db."""
    mags = pattern.magnitudes()
    dbs = magnitude_db(pattern.values)
    with open(path, "w") as fh:
        fh.write("angle_deg,re_v_per_m,im_v_per_m,mag_v_per_m,mag_db\n")
        for ang, val, mag, db in zip(pattern.angles_deg, pattern.values, mags, dbs):
            fh.write(
                f"{ang:.12g},{val.real:.12g},{val.imag:.12g},{mag:.12g},{db:.12g}\n"
            )
