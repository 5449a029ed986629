"""Sawtooth FMCW radar chain: beat synthesis, range/Doppler maps, detection.

The radar transmits up-chirps of bandwidth B over duration T.  A target at
range r returns a dechirped beat tone at

    f_beat = 2 * B * r / (c * T)

sampled at sample_rate for each of chirps_per_frame chirps.  The tone's
phase advances chirp to chirp by 2 pi * (2 v / lambda) * T (stop-and-hop:
range migration inside a frame is ignored).  Echo amplitudes come from a
reflector model evaluated at the 1 m reference distance and are scaled to
the target range with the one-way 1/r far-field convention by default; a
two-way 1/r^2 mode is available for conventional radar budgets.

Range processing is a Hann-windowed DFT per chirp, scaled so a bin-centered
tone of amplitude A reads magnitude A; bin i of an unpadded profile maps to
range i * c / (2 * B).  Doppler processing is an unwindowed DFT across
chirps, scaled by the chirp count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .emfield import (
    REFERENCE_DISTANCE,
    PlaneWave,
    SwitchConfig,
    magnitude_db,
    plate_monostatic_amplitude,
    roundtrip_response,
)
from .errors import ConfigurationError, DesignMismatchWarning
from .geometry import C0, SurfaceLayout
from .modulation import SwitchSchedule, config_at

RANGE_SCALINGS = ("one_way", "two_way")

# Default detection margin over the median noise floor, in dB.
DEFAULT_THRESHOLD_DB = 13.0

_AUTOMOTIVE_BANDS = ((23e9, 25e9), (76e9, 81e9))


@dataclass(frozen=True)
class ChirpParams:
    """Sawtooth chirp timing and sampling.

    Defaults follow the 24 GHz operating point used throughout: 250 MHz
    sweep over 0.5 ms, sampled at 2 MHz.  Set nonstandard_band_ok to skip
    the automotive-band warning.
    """

    start_frequency: float = 24e9
    bandwidth: float = 250e6
    chirp_duration: float = 0.5e-3
    sample_rate: float = 2e6
    chirps_per_frame: int = 64
    nonstandard_band_ok: bool = False

    def __post_init__(self):
        if self.start_frequency <= 0.0:
            raise ConfigurationError("start_frequency must be positive")
        if self.bandwidth <= 0.0:
            raise ConfigurationError("bandwidth must be positive")
        if self.chirp_duration <= 0.0:
            raise ConfigurationError("chirp_duration must be positive")
        if self.sample_rate <= 0.0:
            raise ConfigurationError("sample_rate must be positive")
        if self.chirps_per_frame < 1:
            raise ConfigurationError("chirps_per_frame must be >= 1")
        n = self.chirp_duration * self.sample_rate
        if abs(n - round(n)) > 1e-6 or round(n) < 2:
            raise ConfigurationError(
                f"chirp_duration * sample_rate must be an integer >= 2, got {n}"
            )
        if not self.nonstandard_band_ok and not any(
            lo <= self.start_frequency <= hi for lo, hi in _AUTOMOTIVE_BANDS
        ):
            warnings.warn(
                f"start_frequency {self.start_frequency:.4g} Hz is outside the "
                f"common automotive bands (24 GHz, 76-81 GHz)",
                DesignMismatchWarning,
                stacklevel=3,
            )

    @property
    def samples_per_chirp(self) -> int:
        return int(round(self.chirp_duration * self.sample_rate))

    @property
    def wavelength(self) -> float:
        return C0 / self.start_frequency

    @property
    def range_bin_m(self) -> float:
        return C0 / (2.0 * self.bandwidth)

    @property
    def velocity_bin_mps(self) -> float:
        return self.wavelength / (2.0 * self.chirps_per_frame * self.chirp_duration)

    @property
    def max_unambiguous_range(self) -> float:
        # Range whose beat tone sits exactly at Nyquist.
        return self.sample_rate * C0 * self.chirp_duration / (4.0 * self.bandwidth)

    def beat_frequency(self, range_m: float) -> float:
        return 2.0 * self.bandwidth * range_m / (C0 * self.chirp_duration)

    def chirp_times(self) -> np.ndarray:
        return np.arange(self.chirps_per_frame) * self.chirp_duration


@dataclass(frozen=True)
class SurfaceReflector:
    """Echo source backed by a surface, optionally driven by a schedule.

    Exactly one of schedule/config may be given; neither means the static
    constructive state.  Chirps starting past the schedule end hold its
    last state.
    """

    layout: SurfaceLayout
    schedule: SwitchSchedule | None = None
    config: SwitchConfig | None = None
    incidence_angle_deg: float = 0.0
    incident_amplitude: float = 1.0

    def __post_init__(self):
        if self.schedule is not None and self.config is not None:
            raise ConfigurationError("give either a schedule or a static config")
        if self.incident_amplitude <= 0.0:
            raise ConfigurationError("incident_amplitude must be positive")

    def amplitudes(self, chirp_times: np.ndarray, frequency: float) -> np.ndarray:
        wave = PlaneWave(frequency, self.incidence_angle_deg, self.incident_amplitude)
        if self.schedule is None:
            static = self.config if self.config is not None else SwitchConfig()
            value = abs(
                roundtrip_response(self.layout, static, wave, self.incidence_angle_deg)
            )
            return np.full(len(chirp_times), value)
        out = np.empty(len(chirp_times))
        cache: dict[frozenset, float] = {}
        end = self.schedule.duration
        for i, t in enumerate(chirp_times):
            cfg = config_at(self.schedule, min(t, math.nextafter(end, 0.0)))
            if cfg.toggled not in cache:
                cache[cfg.toggled] = abs(
                    roundtrip_response(self.layout, cfg, wave, self.incidence_angle_deg)
                )
            out[i] = cache[cfg.toggled]
        return out


@dataclass(frozen=True)
class PlateReflector:
    """Echo source backed by the flat-plate baseline (state-independent)."""

    width: float
    incidence_angle_deg: float = 0.0
    incident_amplitude: float = 1.0

    def __post_init__(self):
        if self.width <= 0.0:
            raise ConfigurationError("width must be positive")
        if self.incident_amplitude <= 0.0:
            raise ConfigurationError("incident_amplitude must be positive")

    def amplitudes(self, chirp_times: np.ndarray, frequency: float) -> np.ndarray:
        wave = PlaneWave(frequency, self.incidence_angle_deg, self.incident_amplitude)
        return np.full(len(chirp_times), plate_monostatic_amplitude(self.width, wave))


@dataclass(frozen=True)
class Target:
    """One echo: range, radial velocity (positive = receding), reflector."""

    range_m: float
    velocity_mps: float
    reflector: SurfaceReflector | PlateReflector

    def __post_init__(self):
        if self.range_m <= 0.0:
            raise ConfigurationError(f"range must be positive, got {self.range_m}")


@dataclass(frozen=True)
class BeatSignal:
    """Dechirped samples, chirps_per_frame x samples_per_chirp."""

    params: ChirpParams
    samples: np.ndarray


@dataclass(frozen=True)
class RangeProfile:
    ranges_m: np.ndarray
    values: np.ndarray

    @property
    def bin_spacing_m(self) -> float:
        return float(self.ranges_m[1] - self.ranges_m[0])

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True)
class RangeDopplerMap:
    """Complex map over (range bins, velocity bins)."""

    ranges_m: np.ndarray
    velocities_mps: np.ndarray
    values: np.ndarray

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True)
class Detection:
    """range_m is the interpolated peak; velocity is NaN for single-chirp
    profiles (one chirp measures no velocity)."""

    range_m: float
    velocity_mps: float
    amplitude: float
    snr_db: float


def _range_scale(range_m: float, range_scaling: str) -> float:
    if range_scaling not in RANGE_SCALINGS:
        raise ConfigurationError(
            f"range_scaling must be one of {RANGE_SCALINGS}, got {range_scaling!r}"
        )
    ratio = REFERENCE_DISTANCE / range_m
    return ratio if range_scaling == "one_way" else ratio * ratio


def synthesize_beat(
    params: ChirpParams,
    targets,
    noise_power: float = 0.0,
    seed: int | None = None,
    range_scaling: str = "one_way",
) -> BeatSignal:
    """Dechirped frame for the given targets plus white Gaussian noise.

    Args:
        params: chirp timing and sampling.
        targets: iterable of Target.
        noise_power: per-sample variance of the added real noise.
        seed: RNG seed; identical seeds give identical frames.
        range_scaling: "one_way" (1/r, default) or "two_way" (1/r^2).

    Returns:
        BeatSignal with shape (chirps_per_frame, samples_per_chirp).

    Raises:
        ConfigurationError: a target's beat tone would exceed Nyquist (the
            error names the target), or range_scaling is unknown.
    """
    if noise_power < 0.0:
        raise ConfigurationError("noise_power must be non-negative")
    nyquist = params.sample_rate / 2.0
    samples = np.zeros((params.chirps_per_frame, params.samples_per_chirp))
    times = params.chirp_times()
    for index, target in enumerate(targets):
        f_beat = params.beat_frequency(target.range_m)
        if f_beat > nyquist:
            raise ConfigurationError(
                f"target {index} at {target.range_m} m: beat frequency "
                f"{f_beat:.6g} Hz exceeds Nyquist {nyquist:.6g} Hz"
            )
        scale = _range_scale(target.range_m, range_scaling)
        amps = target.reflector.amplitudes(times, params.start_frequency) * scale
        tau = 2.0 * target.range_m / C0
        phase0 = 2.0 * math.pi * params.start_frequency * tau
        phase_step = (
            2.0 * math.pi * (2.0 * target.velocity_mps / params.wavelength)
            * params.chirp_duration
        )
        kernels.accumulate_beat(
            samples, amps, f_beat, phase0, phase_step, 1.0 / params.sample_rate
        )
    if noise_power > 0.0:
        rng = np.random.default_rng(seed)
        samples += rng.normal(0.0, math.sqrt(noise_power), samples.shape)
    return BeatSignal(params=params, samples=samples)


def _window(n: int) -> np.ndarray:
    return np.hanning(n)


def _profile_matrix(signal: BeatSignal, zero_pad: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Scaled range DFT of every chirp: (ranges, complex matrix C x bins)."""
    if zero_pad < 1:
        raise ValueError("zero_pad must be >= 1")
    params = signal.params
    n = params.samples_per_chirp
    w = _window(n)
    nfft = n * zero_pad
    spectra = np.fft.rfft(signal.samples * w[None, :], nfft, axis=1) * (2.0 / w.sum())
    freqs = np.fft.rfftfreq(nfft, d=1.0 / params.sample_rate)
    ranges = freqs * C0 * params.chirp_duration / (2.0 * params.bandwidth)
    return ranges, spectra


def range_profile(signal: BeatSignal, chirp_index: int = 0, zero_pad: int = 1) -> RangeProfile:
    """Range spectrum of one chirp.

    zero_pad > 1 interpolates the spectrum for finer peak estimates; bin i
    of the unpadded profile maps to range i * c / (2 * bandwidth).
    """
    if not 0 <= chirp_index < signal.params.chirps_per_frame:
        raise ValueError(f"chirp_index {chirp_index} out of range")
    ranges, spectra = _profile_matrix(signal, zero_pad)
    return RangeProfile(ranges_m=ranges, values=spectra[chirp_index])


def range_doppler(signal: BeatSignal) -> RangeDopplerMap:
    """Range-Doppler map of a frame; velocity 0 is centered."""
    params = signal.params
    c = params.chirps_per_frame
    if c < 2:
        raise ValueError("range_doppler needs at least 2 chirps per frame")
    ranges, spectra = _profile_matrix(signal)
    doppler = np.fft.fftshift(np.fft.fft(spectra, axis=0), axes=0) / c
    velocities = np.fft.fftshift(np.fft.fftfreq(c, d=params.chirp_duration))
    velocities = velocities * params.wavelength / 2.0
    return RangeDopplerMap(
        ranges_m=ranges, velocities_mps=velocities, values=doppler.T
    )


def _parabolic_peak(db: np.ndarray, i: int) -> tuple[float, float]:
    """Sub-bin offset and interpolated dB value around a local peak."""
    left, mid, right = db[i - 1], db[i], db[i + 1]
    denom = left - 2.0 * mid + right
    if denom >= 0.0:
        return 0.0, mid
    delta = 0.5 * (left - right) / denom
    delta = min(0.5, max(-0.5, delta))
    return delta, mid - 0.25 * (left - right) * delta


def detect(profile, threshold_db: float = DEFAULT_THRESHOLD_DB) -> list[Detection]:
    """Local maxima rising threshold_db above the median magnitude floor.

    Accepts a RangeProfile (1-D, detections carry velocity NaN) or a
    RangeDopplerMap (2-D, detections carry the peak's velocity bin).  Peak
    ranges are refined by parabolic interpolation of the dB magnitudes.
    Returns detections in increasing range order.
    """
    if isinstance(profile, RangeDopplerMap):
        return _detect_map(profile, threshold_db)
    mags = profile.magnitudes()
    if mags.size < 3:
        return []
    floor = float(np.median(mags))
    db = magnitude_db(profile.values)
    spacing = profile.bin_spacing_m
    detections = []
    for i in range(1, mags.size - 1):
        if not (mags[i] > mags[i - 1] and mags[i] > mags[i + 1]):
            continue
        if mags[i] <= 0.0:
            continue
        snr = math.inf if floor == 0.0 else 20.0 * math.log10(mags[i] / floor)
        if snr < threshold_db:
            continue
        delta, peak_db = _parabolic_peak(db, i)
        detections.append(
            Detection(
                range_m=float(profile.ranges_m[i] + delta * spacing),
                velocity_mps=math.nan,
                amplitude=10.0 ** (peak_db / 20.0),
                snr_db=snr,
            )
        )
    return detections


def _detect_map(rd: RangeDopplerMap, threshold_db: float) -> list[Detection]:
    """2-D strict local maxima of a range-Doppler map over the median floor."""
    mags = rd.magnitudes()
    if mags.shape[0] < 3 or mags.shape[1] < 3:
        return []
    floor = float(np.median(mags))
    inner = mags[1:-1, 1:-1]
    is_peak = (
        (inner > mags[:-2, 1:-1])
        & (inner > mags[2:, 1:-1])
        & (inner > mags[1:-1, :-2])
        & (inner > mags[1:-1, 2:])
        & (inner > 0.0)
    )
    spacing = float(rd.ranges_m[1] - rd.ranges_m[0])
    detections = []
    for i, j in np.argwhere(is_peak) + 1:
        snr = math.inf if floor == 0.0 else 20.0 * math.log10(mags[i, j] / floor)
        if snr < threshold_db:
            continue
        db = magnitude_db(rd.values[:, j])
        delta, peak_db = _parabolic_peak(db, i)
        detections.append(
            Detection(
                range_m=float(rd.ranges_m[i] + delta * spacing),
                velocity_mps=float(rd.velocities_mps[j]),
                amplitude=10.0 ** (peak_db / 20.0),
                snr_db=snr,
            )
        )
    return detections


def _interpolated_peak_amplitude(profile: RangeProfile) -> float:
    mags = profile.magnitudes()
    i = int(np.argmax(mags))
    if i == 0 or i == mags.size - 1 or mags[i] == 0.0:
        return float(mags[i])
    db = magnitude_db(profile.values)
    _, peak_db = _parabolic_peak(db, i)
    return 10.0 ** (peak_db / 20.0)


def bin_noise_sigma(params: ChirpParams, noise_power: float) -> float:
    """RMS of a range-profile bin under white noise of the given variance.

    Follows the 2/sum(w) profile scaling: E|bin|^2 = (2/sum(w))^2 *
    noise_power * sum(w^2).
    """
    w = _window(params.samples_per_chirp)
    return 2.0 / w.sum() * math.sqrt(noise_power * float(np.square(w).sum()))


def max_detection_range(
    params: ChirpParams,
    target: Target,
    threshold_db: float = DEFAULT_THRESHOLD_DB,
    noise_power: float = 1e-6,
    range_scaling: str = "one_way",
    min_range: float = 1.0,
    rel_tol: float = 1e-6,
) -> float:
    """Largest range at which the target's echo clears the threshold.

    The probe places the target at a candidate range, synthesizes one
    noiseless chirp, and compares the interpolated peak of its range profile
    against the analytic bin-noise floor for noise_power; bisection then
    finds where that SNR crosses threshold_db.  Under one-way 1/r scaling
    the result is proportional to the echo amplitude, so an amplitude gain
    of g dB extends the result by 10**(g/20).

    Returns NaN when the target is undetectable at min_range.  The search
    stops two range bins short of the unambiguous limit (closer in, the
    spectral image overlaps the peak and corrupts the amplitude estimate)
    and returns that cap when the target is still detectable there.
    """
    if noise_power <= 0.0:
        raise ConfigurationError("noise_power must be positive for a finite answer")
    if min_range <= 0.0:
        raise ConfigurationError("min_range must be positive")
    sigma = bin_noise_sigma(params, noise_power)
    probe_params = replace(params, chirps_per_frame=1)

    def clears(range_m: float) -> bool:
        probe = replace(target, range_m=range_m)
        signal = synthesize_beat(probe_params, [probe], 0.0, None, range_scaling)
        profile = range_profile(signal, 0, zero_pad=8)
        amp = _interpolated_peak_amplitude(profile)
        if amp == 0.0:
            return False
        return 20.0 * math.log10(amp / sigma) >= threshold_db

    cap = params.max_unambiguous_range - 2.0 * params.range_bin_m
    if min_range > cap:
        raise ConfigurationError("min_range is beyond the unambiguous range")
    if not clears(min_range):
        return math.nan
    if clears(cap):
        return cap
    lo, hi = min_range, cap
    while hi - lo > rel_tol * lo:
        mid = 0.5 * (lo + hi)
        if clears(mid):
            lo = mid
        else:
            hi = mid
    return lo


def write_range_profile_csv(profile: RangeProfile, path) -> None:
    """CSV with columns range_m, mag, mag_db."""
    mags = profile.magnitudes()
    dbs = magnitude_db(profile.values)
    with open(path, "w") as fh:
        fh.write("range_m,mag,mag_db\n")
        for r, m, db in zip(profile.ranges_m, mags, dbs):
            fh.write(f"{r:.12g},{m:.12g},{db:.12g}\n")


def write_range_doppler_csv(rdmap: RangeDopplerMap, path) -> None:
    """CSV with columns range_m, velocity_mps, mag_db (range-major order)."""
    dbs = magnitude_db(rdmap.values)
    with open(path, "w") as fh:
        fh.write("range_m,velocity_mps,mag_db\n")
        for i, r in enumerate(rdmap.ranges_m):
            for j, v in enumerate(rdmap.velocities_mps):
                fh.write(f"{r:.12g},{v:.12g},{dbs[i, j]:.12g}\n")
