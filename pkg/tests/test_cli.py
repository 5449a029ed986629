"""CLI subcommands: exit codes, output files, and determinism."""

import json
import math

import pytest

from vanatta import build_linear_array, save_layout, wavelength_of
from vanatta.cli import (
    DEFAULTS,
    load_config,
    main,
    parse_config_text,
    render_config,
)

LAM = wavelength_of(24e9)


def run_cli(*argv):
    return main(list(argv))


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_config_round_trip():
    cfg = load_config(None)
    assert parse_config_text(render_config(cfg)) == cfg


def test_config_round_trip_with_overrides(tmp_path):
    cfg_path = write_config(
        tmp_path,
        "frequency_hz = 76.5e9\nlayout.n_pairs = 4\nlink.bits = \"1100\"\n",
    )
    cfg = load_config(cfg_path)
    assert cfg["frequency_hz"] == 76.5e9
    assert cfg["layout.n_pairs"] == 4
    assert cfg["link.bits"] == "1100"
    assert parse_config_text(render_config(cfg)) == cfg


def test_reference_config_spells_out_every_default():
    import pathlib

    path = pathlib.Path(__file__).resolve().parents[1] / "configs" / "reference.cfg"
    assert load_config(str(path)) == DEFAULTS


def test_config_rejects_unknown_keys(tmp_path):
    cfg_path = write_config(tmp_path, "no_such_key = 1\n")
    with pytest.raises(Exception, match="unknown config keys"):
        load_config(cfg_path)


def test_config_parse_errors():
    with pytest.raises(Exception, match="line 1"):
        parse_config_text("this is not a key value line")


def test_validate_defaults_pass(tmp_path, capsys):
    out = tmp_path / "out"
    assert run_cli("validate", "--out", str(out)) == 0
    assert (out / "validation.txt").read_text().startswith("layout valid")


def test_validate_flags_perturbed_layout(tmp_path):
    import dataclasses

    layout = build_linear_array(2, LAM / 2.0, LAM)
    stretched = dataclasses.replace(
        layout.lines[0],
        base_electrical_length=layout.lines[0].base_electrical_length + LAM / 4.0,
    )
    bad = dataclasses.replace(layout, lines=(stretched,) + layout.lines[1:])
    save_layout(bad, tmp_path / "bad_layout.json")
    cfg_path = write_config(
        tmp_path, "layout.builder = file\nlayout.path = bad_layout.json\n"
    )
    out = tmp_path / "out"
    assert run_cli("validate", "--config", cfg_path, "--out", str(out)) == 1
    report = (out / "validation.txt").read_text()
    assert report.count("line_length_congruence") == 1


def test_missing_layout_file_is_io_error(tmp_path):
    cfg_path = write_config(
        tmp_path, "layout.builder = file\nlayout.path = nowhere.json\n"
    )
    assert run_cli("validate", "--config", cfg_path, "--out", str(tmp_path / "o")) == 2


def test_missing_config_file_is_io_error(tmp_path):
    assert run_cli("validate", "--config", str(tmp_path / "nope.cfg")) == 2


def test_pattern_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    assert run_cli("pattern", "--out", str(out), "--grid-step-deg", "0.5") == 0
    for name in ("pattern_constructive.csv", "pattern_destructive.csv", "pattern_plate.csv"):
        lines = (out / name).read_text().splitlines()
        assert lines[0] == "angle_deg,re_v_per_m,im_v_per_m,mag_v_per_m,mag_db"
        assert len(lines) == 362  # 361 grid points at 0.5 deg
    summary = (out / "pattern_summary.txt").read_text()
    assert "retro_peak_deg=30" in summary
    assert "monostatic_gain_db=69.6024" in summary
    assert "null_depth_db=" in summary
    depth = float(summary.split("null_depth_db=")[1].split()[0])
    assert depth > 100.0 or math.isinf(depth)


def test_pattern_normal_incidence_peaks_align(tmp_path):
    cfg_path = write_config(tmp_path, "incidence_angle_deg = 0.0\n")
    out = tmp_path / "out"
    assert run_cli("pattern", "--config", cfg_path, "--out", str(out)) == 0
    summary = (out / "pattern_summary.txt").read_text()
    assert "retro_peak_deg=0 " in summary or "retro_peak_deg=0\n" in summary
    plate_rows = (out / "pattern_plate.csv").read_text().splitlines()[1:]
    best = max(plate_rows, key=lambda row: float(row.split(",")[3]))
    assert float(best.split(",")[0]) == 0.0


def test_range_outputs(tmp_path):
    out = tmp_path / "out"
    assert run_cli("range", "--out", str(out)) == 0
    lines = (out / "range_amplitudes.csv").read_text().splitlines()
    assert lines[0] == "distance_m,mag_plate,mag_constructive,mag_destructive"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 10
    # doubling the distance halves every amplitude (1/r)
    for near, far in zip(rows, rows[1:]):
        assert math.isclose(float(far[0]), 2.0 * float(near[0]), rel_tol=1e-9)
        assert math.isclose(float(far[2]), float(near[2]) / 2.0, rel_tol=1e-9)
    # constructive sits one constant gain above the plate at all distances
    ratios = {float(r[2]) / float(r[1]) for r in rows}
    assert max(ratios) - min(ratios) < 1e-9 * max(ratios)


def test_range_gain_override(tmp_path):
    cfg_path = write_config(tmp_path, "range.gain_db = 11.2\n")
    out = tmp_path / "out"
    assert run_cli("range", "--config", cfg_path, "--out", str(out)) == 0
    summary = (out / "range_summary.txt").read_text()
    assert "gain_db=11.2" in summary
    factor = float(summary.split("range_extension=")[1].split()[0])
    assert math.isclose(factor, 3.63, abs_tol=0.005)


def test_scale_outputs(tmp_path):
    out = tmp_path / "out"
    assert run_cli("scale", "--out", str(out)) == 0
    lines = (out / "scale.csv").read_text().splitlines()
    assert lines[0] == "n_elements,gain_ratio,plate_mag"
    rows = [line.split(",") for line in lines[1:]]
    assert [int(r[0]) for r in rows] == [2, 4, 8, 16]
    for r in rows:
        assert math.isclose(float(r[1]), float(r[0]), rel_tol=1e-9)
    assert len({r[2] for r in rows}) == 1  # plate reference constant across n


def test_link_noiseless_payload(tmp_path, capsys):
    out = tmp_path / "out"
    assert run_cli("link", "--out", str(out)) == 0
    report = (out / "link_report.txt").read_text()
    assert "transmitted_bits = 10110010" in report
    assert "decoded_bits = 10110010" in report
    assert "ber = 0" in report
    assert (out / "per_chirp.csv").exists()
    assert "ber=0" in capsys.readouterr().out


def test_link_random_bits_round_trip(tmp_path):
    cfg_path = write_config(tmp_path, "link.random_bits = 64\n")
    out = tmp_path / "out"
    assert run_cli("link", "--config", cfg_path, "--out", str(out), "--seed", "9") == 0
    report = (out / "link_report.txt").read_text()
    assert "n_bits = 64" in report
    assert "ber = 0" in report


def test_link_noise_swamped_ber_near_half(tmp_path):
    # noise 40 dB above the received on-state power swamps the link
    amp = 4.0 * math.sqrt(0.82) / 50.0
    noise = (amp**2 / 2.0) * 1e4
    cfg_path = write_config(
        tmp_path, f"noise.power = {noise!r}\nlink.random_bits = 512\n"
    )
    out = tmp_path / "out"
    assert run_cli("link", "--config", cfg_path, "--out", str(out), "--seed", "11") == 0
    report = (out / "link_report.txt").read_text()
    ber = float(report.split("ber = ")[1].splitlines()[0])
    assert abs(ber - 0.5) <= 0.05


def test_sweep_incidence(tmp_path):
    cfg_path = write_config(
        tmp_path,
        "sweep.start = -60\nsweep.stop = 60\nsweep.step = 30\n",
    )
    out = tmp_path / "out"
    assert run_cli(
        "sweep", "--config", cfg_path, "--out", str(out), "--grid-step-deg", "0.25"
    ) == 0
    lines = (out / "sweep_incidence.csv").read_text().splitlines()
    assert lines[0] == "theta_deg,retro_mag,peak_deg"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 5
    retro = 4.0 * math.sqrt(0.82)
    for row in rows:
        assert math.isclose(float(row[1]), retro, rel_tol=1e-9)
        assert abs(float(row[2]) - float(row[0])) <= 0.25


def test_sweep_snr_monotone_headline(tmp_path):
    cfg_path = write_config(
        tmp_path,
        "sweep.parameter = snr\nsweep.snr_db = \"-40,10\"\nsweep.bits_per_point = 128\n",
    )
    out = tmp_path / "out"
    assert run_cli("sweep", "--config", cfg_path, "--out", str(out), "--seed", "3") == 0
    lines = (out / "sweep_snr.csv").read_text().splitlines()
    assert lines[0] == "snr_db,ber"
    bers = {float(r.split(",")[0]): float(r.split(",")[1]) for r in lines[1:]}
    assert abs(bers[-40.0] - 0.5) <= 0.1
    assert bers[10.0] == 0.0


def test_sweep_rejects_unknown_parameter(tmp_path):
    cfg_path = write_config(tmp_path, "sweep.parameter = frobnicate\n")
    assert run_cli("sweep", "--config", cfg_path, "--out", str(tmp_path / "o")) == 2


def test_constraint_failures_exit_one(tmp_path):
    cfg_path = write_config(tmp_path, "layout.n_pairs = 3\n")
    out = tmp_path / "out"
    # 3 pairs cannot form the half-toggled destructive state
    assert run_cli("pattern", "--config", cfg_path, "--out", str(out)) == 1


def test_commands_are_deterministic(tmp_path):
    cfg_path = write_config(
        tmp_path,
        "noise.power = 1e-6\nlink.random_bits = 32\nsweep.parameter = snr\n"
        "sweep.snr_db = \"-20\"\nsweep.bits_per_point = 64\n",
    )
    outputs = {}
    for run in ("a", "b"):
        for command in ("validate", "pattern", "range", "scale", "link", "sweep"):
            out = tmp_path / f"{command}_{run}"
            code = run_cli(
                command, "--config", cfg_path, "--out", str(out), "--seed", "77"
            )
            assert code == 0, f"{command} failed"
            for artifact in sorted(out.iterdir()):
                outputs.setdefault((command, artifact.name), []).append(
                    artifact.read_bytes()
                )
    for (command, name), blobs in outputs.items():
        assert len(blobs) == 2
        assert blobs[0] == blobs[1], f"{command}/{name} differs between runs"


def test_layout_file_round_trip_through_cli(tmp_path):
    layout = build_linear_array(3, 0.6 * LAM, LAM)
    save_layout(layout, tmp_path / "layout.json")
    cfg_path = write_config(
        tmp_path, "layout.builder = file\nlayout.path = layout.json\n"
    )
    out = tmp_path / "out"
    assert run_cli("validate", "--config", cfg_path, "--out", str(out)) == 0
    doc = json.loads((tmp_path / "layout.json").read_text())
    assert len(doc["elements"]) == 6
