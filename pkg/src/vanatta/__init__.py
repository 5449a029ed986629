"""Simulator for retrodirective reflective surfaces on FMCW radar links.

Modules:
    geometry    layouts, builders, validator, layout file I/O
    emfield     round-trip responses, patterns, plate baseline, scaling
    modulation  switch configurations and on-off-keyed schedules
    fmcw        beat synthesis, range/Doppler processing, detection
    link        end-to-end modulated frames and bit decoding
    kernels     numba/numpy compute backends
    cli         command-line front end
"""

from .emfield import (
    FieldPattern,
    MonostaticGain,
    PlaneWave,
    SwitchConfig,
    far_field_amplitude,
    field_pattern,
    magnitude_db,
    monostatic_gain_db,
    plate_baseline_pattern,
    plate_monostatic_amplitude,
    range_extension,
    roundtrip_response,
    scaling_sweep,
    write_pattern_csv,
)
from .errors import (
    ConfigurationError,
    ConstraintError,
    DecodingError,
    DesignMismatchWarning,
    SchedulingError,
    SimulationError,
)
from .fmcw import (
    BeatSignal,
    ChirpParams,
    Detection,
    PlateReflector,
    RangeDopplerMap,
    RangeProfile,
    SurfaceReflector,
    Target,
    bin_noise_sigma,
    detect,
    max_detection_range,
    range_doppler,
    range_profile,
    synthesize_beat,
    write_range_doppler_csv,
    write_range_profile_csv,
)
from .geometry import (
    AntennaElement,
    SurfaceLayout,
    TransmissionLine,
    ValidationReport,
    build_concentric_surface,
    build_linear_array,
    load_layout,
    save_layout,
    validate_layout,
    wavelength_of,
)
from .link import (
    LinkResult,
    LinkScenario,
    cross_angle_isolation,
    decode_ook,
    doppler_phase_drift,
    ook_ber_trial,
    run_link,
    two_cluster_centers,
    write_link_report,
    write_per_chirp_csv,
)
from .modulation import (
    BitFrame,
    SwitchSchedule,
    config_at,
    constructive_config,
    destructive_config,
    encode_bits,
    load_schedule,
    save_schedule,
)

__version__ = "0.1.0"
