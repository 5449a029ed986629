"""Command-line front end.

Subcommands:
    validate   build or load a layout and run the geometry validator
    pattern    constructive/destructive/plate patterns over an angle grid
    range      amplitude vs distance and the range-extension factor
    scale      retro gain vs element count against the plate reference
    link       run one modulated frame and decode it
    sweep      incidence-angle or SNR parameter sweep

Configs are flat key-value text files with dotted section names::

    frequency_hz = 24e9
    layout.builder = linear
    layout.n_pairs = 2

Unknown keys are rejected.  ``configs/reference.cfg`` in the repository
lists every key with its default.  Exit codes: 0 on success, 1 when a
constraint or validation fails, 2 on I/O or config parse errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .emfield import (
    PlaneWave,
    field_pattern,
    monostatic_gain_db,
    plate_baseline_pattern,
    plate_monostatic_amplitude,
    far_field_amplitude,
    range_extension,
    roundtrip_response,
    scaling_sweep,
    write_pattern_csv,
)
from .errors import SimulationError
from .fmcw import ChirpParams
from .geometry import (
    build_concentric_surface,
    build_linear_array,
    load_layout,
    validate_layout,
    wavelength_of,
)
from .link import (
    LinkScenario,
    ook_ber_trial,
    run_link,
    write_link_report,
    write_per_chirp_csv,
)
from .modulation import constructive_config, destructive_config, encode_bits


class ConfigFileError(Exception):
    """Config file missing, unparseable, or carrying unknown keys."""


# Every accepted key with its default; None marks optional keys that have a
# context-dependent fallback (documented in configs/reference.cfg).
DEFAULTS: dict[str, object] = {
    "frequency_hz": 24e9,
    "incidence_angle_deg": 30.0,
    "amplitude": 1.0,
    "absorption_efficiency": 0.82,
    "seed": 12345,
    "layout.builder": "linear",
    "layout.n_pairs": 2,
    "layout.spacing_m": None,
    "layout.base_length_m": None,
    "layout.n_rings": 1,
    "layout.base_radius_m": None,
    "layout.path": None,
    "plate.width_m": 0.025,
    "validate.tolerance_m": 1e-9,
    "pattern.grid_step_deg": 0.25,
    "radar.bandwidth_hz": 250e6,
    "radar.chirp_s": 0.5e-3,
    "radar.sample_rate_hz": 2e6,
    "radar.chirps_per_frame": 64,
    "target.range_m": 50.0,
    "target.velocity_mps": 0.0,
    "noise.power": 0.0,
    "link.bits": "10110010",
    "link.random_bits": 0,
    "link.switch_interval_s": 1e-3,
    "range.distances_m": "1,2,4,8,16,32,64,128,256,512",
    "range.gain_db": None,
    "scale.n_elements": "2,4,8,16",
    "sweep.parameter": "incidence_angle",
    "sweep.start": -60.0,
    "sweep.stop": 60.0,
    "sweep.step": 5.0,
    "sweep.snr_db": "-30,-24,-18,-12",
    "sweep.bits_per_point": 256,
    "sweep.depth_db": 12.2,
}


def parse_config_text(text: str) -> dict[str, object]:
    """Parse flat ``key = value`` lines; # starts a comment line."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigFileError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or " " in key:
            raise ConfigFileError(f"line {lineno}: bad key {key!r}")
        values[key] = _parse_value(value)
    return values


def _parse_value(value: str) -> object:
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
        return value[1:-1]
    low = value.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    if low == "none":
        return None
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    return value


def render_config(values: dict[str, object]) -> str:
    """Inverse of parse_config_text for scalar values."""
    lines = []
    for key in sorted(values):
        v = values[key]
        if isinstance(v, bool):
            text = "true" if v else "false"
        elif v is None:
            text = "none"
        elif isinstance(v, (int, float)):
            text = repr(v)
        else:
            text = str(v)
            if text != text.strip() or _parse_value(text) != text:
                text = f'"{text}"'
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def load_config(path: str | None) -> dict[str, object]:
    """Defaults merged with the file at path (all defaults when None)."""
    merged = dict(DEFAULTS)
    if path is None:
        return merged
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigFileError(f"cannot read config {path}: {exc}") from exc
    parsed = parse_config_text(text)
    unknown = sorted(set(parsed) - set(DEFAULTS))
    if unknown:
        raise ConfigFileError(f"unknown config keys: {', '.join(unknown)}")
    merged.update(parsed)
    return merged


def _floats(value) -> list[float]:
    if isinstance(value, (int, float)):
        return [float(value)]
    return [float(part) for part in str(value).split(",") if part.strip()]


def _ints(value) -> list[int]:
    return [int(round(f)) for f in _floats(value)]


def _bits_of(value) -> tuple[int, ...]:
    text = str(value).strip()
    if not text or any(ch not in "01" for ch in text):
        raise ConfigFileError(f"link.bits must be a string of 0/1, got {value!r}")
    return tuple(int(ch) for ch in text)


def _resolve_layout(cfg: dict, config_dir: str):
    lam = wavelength_of(float(cfg["frequency_hz"]))
    builder = str(cfg["layout.builder"])
    absorption = float(cfg["absorption_efficiency"])
    if builder == "linear":
        spacing = cfg["layout.spacing_m"]
        base = cfg["layout.base_length_m"]
        return build_linear_array(
            int(cfg["layout.n_pairs"]),
            float(spacing) if spacing is not None else lam / 2.0,
            lam,
            float(base) if base is not None else None,
            absorption,
        )
    if builder == "concentric":
        radius = cfg["layout.base_radius_m"]
        return build_concentric_surface(
            int(cfg["layout.n_rings"]),
            float(radius) if radius is not None else lam,
            lam,
            absorption,
        )
    if builder == "file":
        path = cfg["layout.path"]
        if path is None:
            raise ConfigFileError("layout.builder = file needs layout.path")
        full = os.path.join(config_dir, str(path))
        try:
            return load_layout(full)
        except OSError as exc:
            raise ConfigFileError(f"cannot read layout {full}: {exc}") from exc
    raise ConfigFileError(f"unknown layout.builder {builder!r}")


def _wave(cfg: dict) -> PlaneWave:
    return PlaneWave(
        frequency=float(cfg["frequency_hz"]),
        incidence_angle_deg=float(cfg["incidence_angle_deg"]),
        amplitude=float(cfg["amplitude"]),
    )


def _chirp_params(cfg: dict) -> ChirpParams:
    return ChirpParams(
        start_frequency=float(cfg["frequency_hz"]),
        bandwidth=float(cfg["radar.bandwidth_hz"]),
        chirp_duration=float(cfg["radar.chirp_s"]),
        sample_rate=float(cfg["radar.sample_rate_hz"]),
        chirps_per_frame=int(cfg["radar.chirps_per_frame"]),
    )


def _angle_grid(step: float) -> np.ndarray:
    grid = np.arange(-90.0, 90.0 + step / 2.0, step)
    return grid[grid <= 90.0 + 1e-12]


def _emit(out_dir: str, name: str, text: str) -> None:
    with open(os.path.join(out_dir, name), "w") as fh:
        fh.write(text)


def cmd_validate(cfg: dict, out_dir: str, config_dir: str) -> int:
    layout = _resolve_layout(cfg, config_dir)
    report = validate_layout(layout, float(cfg["validate.tolerance_m"]))
    summary = report.summary()
    _emit(out_dir, "validation.txt", summary + "\n")
    print(summary)
    return 0 if report.passed else 1


def cmd_pattern(cfg: dict, out_dir: str, config_dir: str, grid_step: float | None) -> int:
    layout = _resolve_layout(cfg, config_dir)
    wave = _wave(cfg)
    step = grid_step if grid_step is not None else float(cfg["pattern.grid_step_deg"])
    grid = _angle_grid(step)
    constructive = field_pattern(layout, constructive_config(), wave, grid)
    destructive = field_pattern(layout, destructive_config(layout), wave, grid)
    plate = plate_baseline_pattern(float(cfg["plate.width_m"]), wave, grid)
    write_pattern_csv(constructive, os.path.join(out_dir, "pattern_constructive.csv"))
    write_pattern_csv(destructive, os.path.join(out_dir, "pattern_destructive.csv"))
    write_pattern_csv(plate, os.path.join(out_dir, "pattern_plate.csv"))

    theta = wave.incidence_angle_deg
    retro_on = abs(roundtrip_response(layout, constructive_config(), wave, theta))
    retro_off = abs(roundtrip_response(layout, destructive_config(layout), wave, theta))
    depth = math.inf if retro_off == 0.0 else 20.0 * math.log10(retro_on / retro_off)
    gain = monostatic_gain_db(layout, constructive_config(), wave, float(cfg["plate.width_m"]))
    summary = (
        f"retro_peak_deg={constructive.peak_angle():.6g} "
        f"null_depth_db={depth:.6g} "
        f"monostatic_gain_db={gain.gain_db:.6g}"
    )
    _emit(out_dir, "pattern_summary.txt", summary + "\n")
    print(summary)
    return 0


def cmd_range(cfg: dict, out_dir: str, config_dir: str) -> int:
    layout = _resolve_layout(cfg, config_dir)
    wave = _wave(cfg)
    theta = wave.incidence_angle_deg
    plate_width = float(cfg["plate.width_m"])
    amp_on = abs(roundtrip_response(layout, constructive_config(), wave, theta))
    amp_off = abs(roundtrip_response(layout, destructive_config(layout), wave, theta))
    amp_plate = plate_monostatic_amplitude(plate_width, wave)

    distances = _floats(cfg["range.distances_m"])
    lines = ["distance_m,mag_plate,mag_constructive,mag_destructive"]
    for d in distances:
        lines.append(
            f"{d:.12g},{far_field_amplitude(amp_plate, 1.0, d):.12g},"
            f"{far_field_amplitude(amp_on, 1.0, d):.12g},"
            f"{far_field_amplitude(amp_off, 1.0, d):.12g}"
        )
    _emit(out_dir, "range_amplitudes.csv", "\n".join(lines) + "\n")

    override = cfg["range.gain_db"]
    if override is not None:
        gain_db = float(override)
    else:
        gain_db = monostatic_gain_db(layout, constructive_config(), wave, plate_width).gain_db
    factor = range_extension(gain_db)
    summary = f"gain_db={gain_db:.6g} range_extension={factor:.6g}"
    _emit(out_dir, "range_summary.txt", summary + "\n")
    print(summary)
    return 0


def cmd_scale(cfg: dict, out_dir: str, config_dir: str) -> int:
    wave = _wave(cfg)
    lam = wave.wavelength
    spacing = cfg["layout.spacing_m"]
    spacing = float(spacing) if spacing is not None else lam / 2.0
    ns = _ints(cfg["scale.n_elements"])
    rows = scaling_sweep(ns, spacing, wave)
    plate_mag = plate_monostatic_amplitude(float(cfg["plate.width_m"]), wave)
    lines = ["n_elements,gain_ratio,plate_mag"]
    for n, ratio in rows:
        lines.append(f"{n},{ratio:.12g},{plate_mag:.12g}")
    _emit(out_dir, "scale.csv", "\n".join(lines) + "\n")
    print(f"scaling ratios for n={','.join(str(n) for n in ns)} written")
    return 0


def cmd_link(cfg: dict, out_dir: str, config_dir: str, seed: int) -> int:
    layout = _resolve_layout(cfg, config_dir)
    params = _chirp_params(cfg)
    n_random = int(cfg["link.random_bits"])
    if n_random > 0:
        rng = np.random.default_rng(seed)
        bits = tuple(int(b) for b in rng.integers(0, 2, n_random))
    else:
        bits = _bits_of(cfg["link.bits"])
    schedule = encode_bits(
        bits, layout, float(cfg["link.switch_interval_s"]), params.chirp_duration
    )
    scenario = LinkScenario(
        layout=layout,
        schedule=schedule,
        params=params,
        range_m=float(cfg["target.range_m"]),
        incidence_angle_deg=float(cfg["incidence_angle_deg"]),
        velocity_mps=float(cfg["target.velocity_mps"]),
        noise_power=float(cfg["noise.power"]),
        seed=seed,
        incident_amplitude=float(cfg["amplitude"]),
    )
    result = run_link(scenario)
    write_link_report(result, os.path.join(out_dir, "link_report.txt"))
    write_per_chirp_csv(result, os.path.join(out_dir, "per_chirp.csv"))
    print(f"ber={result.ber:.6g} snr_db={result.snr_db:.6g}")
    return 0


def cmd_sweep(cfg: dict, out_dir: str, config_dir: str, seed: int, grid_step: float | None) -> int:
    parameter = str(cfg["sweep.parameter"])
    if parameter == "incidence_angle":
        layout = _resolve_layout(cfg, config_dir)
        step = grid_step if grid_step is not None else float(cfg["pattern.grid_step_deg"])
        grid = _angle_grid(step)
        start, stop, inc = (
            float(cfg["sweep.start"]),
            float(cfg["sweep.stop"]),
            float(cfg["sweep.step"]),
        )
        thetas = np.arange(start, stop + inc / 2.0, inc)
        lines = ["theta_deg,retro_mag,peak_deg"]
        for theta in thetas:
            wave = PlaneWave(float(cfg["frequency_hz"]), float(theta), float(cfg["amplitude"]))
            pattern = field_pattern(layout, constructive_config(), wave, grid)
            retro = abs(roundtrip_response(layout, constructive_config(), wave, float(theta)))
            lines.append(f"{theta:.12g},{retro:.12g},{pattern.peak_angle():.12g}")
        _emit(out_dir, "sweep_incidence.csv", "\n".join(lines) + "\n")
        print(f"incidence sweep over {len(thetas)} angles written")
        return 0
    if parameter == "snr":
        params = _chirp_params(cfg)
        cpb = int(round(float(cfg["link.switch_interval_s"]) / params.chirp_duration))
        snrs = _floats(cfg["sweep.snr_db"])
        n_bits = int(cfg["sweep.bits_per_point"])
        depth = float(cfg["sweep.depth_db"])
        lines = ["snr_db,ber"]
        for i, snr in enumerate(snrs):
            ber = ook_ber_trial(params, snr, depth, n_bits, cpb, seed + i)
            lines.append(f"{snr:.12g},{ber:.12g}")
        _emit(out_dir, "sweep_snr.csv", "\n".join(lines) + "\n")
        print(f"snr sweep over {len(snrs)} points written")
        return 0
    raise ConfigFileError(f"unknown sweep.parameter {parameter!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vanatta",
        description="Retrodirective reflective surface simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("validate", "check layout constraints"),
        ("pattern", "angle patterns for both states and the plate"),
        ("range", "amplitude vs distance and range extension"),
        ("scale", "retro gain vs element count"),
        ("link", "run one modulated frame"),
        ("sweep", "incidence-angle or SNR sweep"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", default=None, help="config file path")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument(
            "--grid-step-deg",
            type=float,
            default=None,
            help="override pattern grid step",
        )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigFileError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    config_dir = os.path.dirname(os.path.abspath(args.config)) if args.config else os.getcwd()
    seed = args.seed if args.seed is not None else int(cfg["seed"])
    try:
        os.makedirs(args.out, exist_ok=True)
        if args.command == "validate":
            return cmd_validate(cfg, args.out, config_dir)
        if args.command == "pattern":
            return cmd_pattern(cfg, args.out, config_dir, args.grid_step_deg)
        if args.command == "range":
            return cmd_range(cfg, args.out, config_dir)
        if args.command == "scale":
            return cmd_scale(cfg, args.out, config_dir)
        if args.command == "link":
            return cmd_link(cfg, args.out, config_dir, seed)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out, config_dir, seed, args.grid_step_deg)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigFileError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except (SimulationError, ValueError) as exc:
        print(f"constraint error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
