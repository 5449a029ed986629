"""Hot numeric kernels, compiled with numba when available.

Two loops dominate every simulation here: summing round-trip path phasors
over pair traversals for each observation angle, and accumulating beat-tone
samples over chirps.  Both get an njit implementation and a pure-numpy
fallback with identical semantics.

Backend selection, checked once at import:

    VANATTA_BACKEND=auto    njit if numba imports, else numpy (default)
    VANATTA_BACKEND=numba   require numba, raise if missing
    VANATTA_BACKEND=numpy   force the fallback

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np


def _pair_path_response_numpy(x_in, x_out, path_extra, wavenumber, sin_incidence, sin_obs, out):
    inbound = wavenumber * (x_in * sin_incidence + path_extra)
    outbound = wavenumber * np.outer(x_out, sin_obs)
    out[:] = np.exp(-1j * (inbound[:, None] + outbound)).sum(axis=0)
    return out


def _accumulate_beat_numpy(samples, amplitudes, beat_frequency, phase0, phase_step, dt):
    n_chirps, n_samples = samples.shape
    t = np.arange(n_samples) * dt
    phases = phase0 + phase_step * np.arange(n_chirps)
    samples += amplitudes[:, None] * np.cos(
        2.0 * math.pi * beat_frequency * t[None, :] + phases[:, None]
    )
    return samples


_requested = os.environ.get("VANATTA_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(f"VANATTA_BACKEND must be auto, numba or numpy, got {_requested!r}")

if _requested == "numpy":
    HAS_NUMBA = False
else:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise
        HAS_NUMBA = False

if HAS_NUMBA:

    @njit(cache=True)
    def _pair_path_response_numba(x_in, x_out, path_extra, wavenumber, sin_incidence, sin_obs, out):
        for a in range(sin_obs.size):
            acc = 0.0 + 0.0j
            so = sin_obs[a]
            for j in range(x_in.size):
                ph = wavenumber * (x_in[j] * sin_incidence + path_extra[j] + x_out[j] * so)
                acc += np.cos(ph) - 1j * np.sin(ph)
            out[a] = acc
        return out

    @njit(cache=True)
    def _accumulate_beat_numba(samples, amplitudes, beat_frequency, phase0, phase_step, dt):
        n_chirps, n_samples = samples.shape
        w = 2.0 * math.pi * beat_frequency * dt
        for c in range(n_chirps):
            amp = amplitudes[c]
            if amp == 0.0:
                continue
            ph_c = phase0 + phase_step * c
            for n in range(n_samples):
                samples[c, n] += amp * np.cos(w * n + ph_c)
        return samples

    _pair_path_response = _pair_path_response_numba
    _accumulate_beat = _accumulate_beat_numba
    BACKEND = "numba"
else:
    _pair_path_response = _pair_path_response_numpy
    _accumulate_beat = _accumulate_beat_numpy
    BACKEND = "numpy"


def active_backend() -> str:
    """Name of the backend selected at import ("numba" or "numpy")."""
    return BACKEND


def pair_path_response(x_in, x_out, path_extra, wavenumber, sin_incidence, sin_obs):
    """Sum exp(-j k (x_in sin_inc + path + x_out sin_obs)) over traversals.

    x_in, x_out and path_extra are float arrays with one entry per pair
    traversal; sin_obs is the array of observation-angle sines.  Returns a
    complex array over observation angles.
    """
    x_in = np.ascontiguousarray(x_in, dtype=np.float64)
    x_out = np.ascontiguousarray(x_out, dtype=np.float64)
    path_extra = np.ascontiguousarray(path_extra, dtype=np.float64)
    sin_obs = np.ascontiguousarray(sin_obs, dtype=np.float64)
    out = np.empty(sin_obs.size, dtype=np.complex128)
    _pair_path_response(
        x_in, x_out, path_extra, float(wavenumber), float(sin_incidence), sin_obs, out
    )
    return out


def accumulate_beat(samples, amplitudes, beat_frequency, phase0, phase_step, dt):
    """Add one target's beat tone to samples (chirps x samples), in place.

    Chirp c gets amplitudes[c] * cos(2 pi f_beat t + phase0 + c * phase_step)
    with t sampled at dt.
    """
    amplitudes = np.ascontiguousarray(amplitudes, dtype=np.float64)
    if amplitudes.shape != (samples.shape[0],):
        raise ValueError("need one amplitude per chirp")
    _accumulate_beat(
        samples, amplitudes, float(beat_frequency), float(phase0), float(phase_step), float(dt)
    )
    return samples
