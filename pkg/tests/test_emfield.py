"""Field patterns against brute-force and closed-form oracles."""

import cmath
import math
import warnings

import numpy as np
import pytest

from vanatta import (
    ConfigurationError,
    ConstraintError,
    DesignMismatchWarning,
    FieldPattern,
    PlaneWave,
    SwitchConfig,
    build_linear_array,
    constructive_config,
    destructive_config,
    far_field_amplitude,
    field_pattern,
    magnitude_db,
    monostatic_gain_db,
    plate_baseline_pattern,
    plate_monostatic_amplitude,
    range_extension,
    roundtrip_response,
    scaling_sweep,
    wavelength_of,
    write_pattern_csv,
)

LAM = wavelength_of(24e9)
SQRT_ETA = math.sqrt(0.82)
WAVE30 = PlaneWave(frequency=24e9, incidence_angle_deg=30.0)


def brute_force_response(layout, config, wave, obs_deg):
    """Independent path enumeration: explicit loop over pairs and directions."""
    k = 2.0 * math.pi / wave.wavelength
    st = math.sin(math.radians(wave.incidence_angle_deg))
    so = math.sin(math.radians(obs_deg))
    total = 0.0 + 0.0j
    for pid in layout.pair_ids():
        a, b = layout.pair_elements(pid)
        line = layout.line_for(pid)
        length = line.base_electrical_length
        if pid in config.toggled:
            length += line.switched_extra_length
        for p_in, p_out in ((a, b), (b, a)):
            phase = k * (p_in.position[0] * st + length + p_out.position[0] * so)
            total += cmath.exp(-1j * phase)
    return total * wave.amplitude * math.sqrt(layout.absorption_efficiency)


def dirichlet_magnitude(n, spacing, theta_deg, phi_deg, lam):
    psi = (2.0 * math.pi / lam) * spacing * (
        math.sin(math.radians(phi_deg)) - math.sin(math.radians(theta_deg))
    )
    den = math.sin(psi / 2.0)
    if abs(den) < 1e-300:
        return float(n)
    return abs(math.sin(n * psi / 2.0) / den)


def test_roundtrip_matches_brute_force_enumeration():
    rng = np.random.default_rng(21)
    for n_pairs, spacing in ((1, 0.5), (2, 0.5), (3, 0.71), (4, 0.55)):
        layout = build_linear_array(n_pairs, spacing * LAM, LAM)
        configs = [constructive_config()]
        if n_pairs % 2 == 0:
            configs.append(destructive_config(layout))
        for config in configs:
            for _ in range(5):
                theta = float(rng.uniform(-80.0, 80.0))
                obs = float(rng.uniform(-90.0, 90.0))
                wave = PlaneWave(24e9, theta, amplitude=1.3)
                got = roundtrip_response(layout, config, wave, obs)
                want = brute_force_response(layout, config, wave, obs)
                assert cmath.isclose(got, want, rel_tol=1e-12, abs_tol=1e-12)


def test_retro_response_is_four_times_single_element():
    layout = build_linear_array(2, LAM / 2.0, LAM)
    response = roundtrip_response(layout, constructive_config(), WAVE30, 30.0)
    assert math.isclose(abs(response), 4.0 * SQRT_ETA, rel_tol=1e-12)


def test_retro_magnitude_independent_of_incidence():
    layout = build_linear_array(2, LAM / 2.0, LAM)
    mags = []
    for theta in (-60.0, -30.0, 0.0, 17.0, 45.0, 60.0):
        wave = PlaneWave(24e9, theta)
        mags.append(abs(roundtrip_response(layout, constructive_config(), wave, theta)))
    assert max(mags) - min(mags) <= 1e-12 * max(mags)


def test_destructive_cancels_at_retro_direction():
    for n_pairs in (2, 4):
        layout = build_linear_array(n_pairs, LAM / 2.0, LAM)
        on = abs(roundtrip_response(layout, constructive_config(), WAVE30, 30.0))
        off = abs(roundtrip_response(layout, destructive_config(layout), WAVE30, 30.0))
        assert off <= 1e-12 * on


def test_toggle_involution_recovers_constructive():
    layout = build_linear_array(2, LAM / 2.0, LAM)
    toggled = destructive_config(layout).toggled
    round_tripped = SwitchConfig(frozenset(toggled ^ toggled))
    a = roundtrip_response(layout, round_tripped, WAVE30, 30.0)
    b = roundtrip_response(layout, constructive_config(), WAVE30, 30.0)
    assert a == b


def test_reciprocity_under_direction_swap():
    # swapping every traversal's absorb/re-radiate roles leaves the sum as is
    layout = build_linear_array(3, 0.6 * LAM, LAM)
    for obs in (-40.0, 10.0, 55.0):
        got = roundtrip_response(layout, constructive_config(), WAVE30, obs)
        k = 2.0 * math.pi / WAVE30.wavelength
        st = math.sin(math.radians(WAVE30.incidence_angle_deg))
        so = math.sin(math.radians(obs))
        swapped = 0.0 + 0.0j
        for pid in layout.pair_ids():
            a, b = layout.pair_elements(pid)
            length = layout.line_for(pid).base_electrical_length
            for p_in, p_out in ((b, a), (a, b)):
                swapped += cmath.exp(
                    -1j * k * (p_in.position[0] * st + length + p_out.position[0] * so)
                )
        swapped *= SQRT_ETA
        assert cmath.isclose(got, swapped, rel_tol=1e-12, abs_tol=1e-12)


def test_field_pattern_matches_dirichlet_kernel():
    grid = np.linspace(-90.0, 90.0, 721)
    for n_pairs in (1, 2, 4):
        n = 2 * n_pairs
        layout = build_linear_array(n_pairs, LAM / 2.0, LAM)
        pattern = field_pattern(layout, constructive_config(), WAVE30, grid)
        mags = pattern.magnitudes()
        for angle, mag in zip(grid, mags):
            oracle = SQRT_ETA * dirichlet_magnitude(n, LAM / 2.0, 30.0, angle, LAM)
            assert abs(mag - oracle) <= 1e-9 * n * SQRT_ETA


def test_field_pattern_peaks_at_incidence():
    grid = np.arange(-90.0, 90.0 + 0.25, 0.5)
    layout = build_linear_array(2, LAM / 2.0, LAM)
    pattern = field_pattern(layout, constructive_config(), WAVE30, grid)
    assert abs(pattern.peak_angle() - 30.0) <= 0.5


def test_destructive_pattern_null_at_incidence():
    grid = np.arange(-90.0, 90.0 + 0.25, 0.5)
    layout = build_linear_array(2, LAM / 2.0, LAM)
    on = field_pattern(layout, constructive_config(), WAVE30, grid)
    off = field_pattern(layout, destructive_config(layout), WAVE30, grid)
    peak = on.magnitudes().max()
    assert abs(off.value_at(30.0)) < 1e-10 * peak


def test_specular_direction_sits_below_retro_peak():
    layout = build_linear_array(2, LAM / 2.0, LAM)
    retro = abs(roundtrip_response(layout, constructive_config(), WAVE30, 30.0))
    specular = abs(roundtrip_response(layout, constructive_config(), WAVE30, -30.0))
    oracle = SQRT_ETA * dirichlet_magnitude(4, LAM / 2.0, 30.0, -30.0, LAM)
    assert specular < retro
    assert abs(specular - oracle) <= 1e-9 * retro


def test_field_pattern_rejects_bad_grids():
    layout = build_linear_array(2, LAM / 2.0, LAM)
    with pytest.raises(ValueError):
        field_pattern(layout, constructive_config(), WAVE30, [])
    with pytest.raises(ValueError):
        field_pattern(layout, constructive_config(), WAVE30, [10.0, 5.0])
    with pytest.raises(ValueError):
        field_pattern(layout, constructive_config(), WAVE30, [-95.0, 0.0])


def test_roundtrip_requires_valid_layout():
    import dataclasses

    layout = build_linear_array(2, LAM / 2.0, LAM)
    stretched = dataclasses.replace(
        layout.lines[0],
        base_electrical_length=layout.lines[0].base_electrical_length + LAM / 4.0,
    )
    bent = dataclasses.replace(layout, lines=(stretched,) + layout.lines[1:])
    with pytest.raises(ConstraintError):
        roundtrip_response(bent, constructive_config(), WAVE30, 0.0)


def test_config_must_match_layout_switches():
    layout = build_linear_array(2, LAM / 2.0, LAM)
    with pytest.raises(ConfigurationError):
        roundtrip_response(layout, SwitchConfig(frozenset({9})), WAVE30, 0.0)
    with pytest.raises(ConfigurationError):
        # pair 1 exists but carries no switch
        roundtrip_response(layout, SwitchConfig(frozenset({1})), WAVE30, 0.0)


def test_wavelength_mismatch_warns():
    layout = build_linear_array(2, LAM / 2.0, LAM)
    with pytest.warns(DesignMismatchWarning):
        roundtrip_response(layout, constructive_config(), PlaneWave(30e9, 30.0), 30.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        roundtrip_response(layout, constructive_config(), PlaneWave(25e9, 30.0), 30.0)


def test_plane_wave_validation():
    with pytest.raises(ValueError):
        PlaneWave(0.0, 10.0)
    with pytest.raises(ValueError):
        PlaneWave(24e9, 90.0)
    with pytest.raises(ValueError):
        PlaneWave(24e9, 10.0, amplitude=0.0)


def test_plate_formula_values():
    # frozen from the physical-optics formula evaluated directly
    assert math.isclose(plate_monostatic_amplitude(0.025, PlaneWave(24e9, 30.0)),
                        0.0011990700417900484, rel_tol=1e-12)
    assert math.isclose(plate_monostatic_amplitude(0.025, PlaneWave(24e9, 0.0)),
                        2.0013845711889124, rel_tol=1e-12)


def test_plate_pattern_peaks_at_normal_and_is_even():
    grid = np.arange(-60.0, 60.0 + 0.25, 0.5)
    pattern = plate_baseline_pattern(0.025, PlaneWave(24e9, 0.0), grid)
    mags = pattern.magnitudes()
    assert pattern.peak_angle() == 0.0
    np.testing.assert_allclose(mags, mags[::-1], rtol=1e-12)


def test_plate_suppressed_near_sinc_null():
    # k * w * sin(30 deg) is within 1% of 2 pi for w = 2.5 cm at 24 GHz
    strong = plate_monostatic_amplitude(0.025, PlaneWave(24e9, 0.0))
    weak = plate_monostatic_amplitude(0.025, PlaneWave(24e9, 30.0))
    assert weak < 1e-2 * strong


def test_far_field_amplitude_scaling():
    assert far_field_amplitude(1.0, 1.0, 10.0) == 0.1
    assert far_field_amplitude(1.0, 1.0, 1.0) == 1.0
    assert math.isclose(far_field_amplitude(0.5, 2.0, 100.0), 0.01, rel_tol=1e-15)
    with pytest.raises(ValueError):
        far_field_amplitude(1.0, 1.0, 0.0)


def test_far_field_product_constant_in_distance():
    for r in (1.0, 3.7, 120.0, 4e3):
        assert math.isclose(far_field_amplitude(2.2, 1.0, r) * r, 2.2, rel_tol=1e-15)


def test_monostatic_gain_against_po_oracle():
    layout = build_linear_array(2, LAM / 2.0, LAM)
    gain = monostatic_gain_db(layout, constructive_config(), WAVE30, 0.025)
    assert not gain.plate_is_null
    oracle = 20.0 * math.log10(4.0 * SQRT_ETA / 0.0011990700417900484)
    assert math.isclose(gain.gain_db, oracle, rel_tol=1e-12)
    assert math.isclose(gain.gain_db, 69.6024473010221, rel_tol=1e-12)


def test_modulation_depth_exceeds_twelve_db():
    layout = build_linear_array(2, LAM / 2.0, LAM)
    on = abs(roundtrip_response(layout, constructive_config(), WAVE30, 30.0))
    off = abs(roundtrip_response(layout, destructive_config(layout), WAVE30, 30.0))
    depth = math.inf if off == 0.0 else 20.0 * math.log10(on / off)
    assert depth >= 12.2


def test_range_extension_values():
    assert math.isclose(range_extension(11.2), 3.63, abs_tol=0.005)
    assert range_extension(0.0) == 1.0
    assert math.isclose(range_extension(20.0), 10.0, rel_tol=1e-15)


def test_scaling_sweep_is_exactly_linear():
    results = scaling_sweep([2, 4, 8, 16, 32], LAM / 2.0, WAVE30)
    for n, ratio in results:
        assert math.isclose(ratio, float(n), rel_tol=1e-9)
    ratios = [r for _, r in results]
    assert ratios == sorted(ratios)


def test_scaling_sweep_rejects_odd_counts():
    with pytest.raises(ValueError):
        scaling_sweep([2, 3], LAM / 2.0, WAVE30)


def test_magnitude_db_floor():
    db = magnitude_db(np.array([1.0, 0.0, 10.0]))
    assert db[0] == 0.0
    assert db[1] == -400.0
    assert math.isclose(db[2], 20.0, rel_tol=1e-15)


def test_field_pattern_type_checks():
    with pytest.raises(ValueError):
        FieldPattern(np.array([0.0, 1.0]), np.array([1.0 + 0j]))
    with pytest.raises(ValueError):
        FieldPattern(np.array([1.0, 0.0]), np.array([1.0 + 0j, 2.0 + 0j]))


def test_pattern_csv_format(tmp_path):
    layout = build_linear_array(2, LAM / 2.0, LAM)
    pattern = field_pattern(layout, constructive_config(), WAVE30, [-30.0, 0.0, 30.0])
    path = tmp_path / "pattern.csv"
    write_pattern_csv(pattern, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "angle_deg,re_v_per_m,im_v_per_m,mag_v_per_m,mag_db"
    assert len(lines) == 4
    row = lines[3].split(",")
    assert float(row[0]) == 30.0
    mag = math.hypot(float(row[1]), float(row[2]))
    assert math.isclose(mag, float(row[3]), rel_tol=1e-9)
    assert math.isclose(float(row[3]), 4.0 * SQRT_ETA, rel_tol=1e-9)
