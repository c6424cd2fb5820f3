"""Reference scenario configurations (the benchmark numerical experiments).

Every value in atomic units.  These are plain dicts so they can be dumped
to JSON, edited and fed back through the CLI.
"""
from __future__ import annotations

import copy
import math

from .errors import ConfigError

_BASE_SCHEME = {
    "energies": {"a": -0.10, "b": -0.20, "c": -0.18, "d": -0.05},
    "gamma_a": 2.4e-9,
    "gamma_d": 2.4e-9,
    "gamma_bc": 0.0,
    "width_convention": "total-split",
}

_SIGNAL = {"shape": "sine-square", "amplitude": 1e-10,
           "duration": 1e11, "phase": 0.0, "start_time": 0.0}

_REFERENCE = {
    # two sine-square pulses through the short sample, constant controls
    "transmission": {
        "scheme": _BASE_SCHEME,
        "medium": {"density": 3e-13, "length": 1e7},
        "signals": [dict(_SIGNAL), dict(_SIGNAL)],
        "controls": [{"amplitude": 1.2e-9, "phase": 0.0},
                     {"amplitude": 1.8e-9, "phase": 0.0}],
        "grid": {"nz": 400, "nt": None, "t_max": None},
        "scenario": {"kind": "transmission", "mode": "full"},
        "output": {"directory": "out/transmission"},
    },
    # initially rectangular pulse in a single-Lambda medium
    "smoothing": {
        "scheme": _BASE_SCHEME,
        "medium": {"density": 3e-13, "length": 3e7},
        "signals": [{"shape": "rectangular", "amplitude": 1e-10,
                     "duration": 1e11, "phase": 0.0, "start_time": 5e9},
                    {"shape": "sine-square", "amplitude": 0.0,
                     "duration": 1e11, "phase": 0.0, "start_time": 0.0}],
        "controls": [{"amplitude": 1.2e-9, "phase": 0.0},
                     {"amplitude": 0.0, "phase": 0.0}],
        "grid": {"nz": 400, "nt": None, "t_max": None},
        "scenario": {"kind": "smoothing", "mode": "full",
                     "record_depths": [0.0, 3e6, 1.5e7, 3e7]},
        "output": {"directory": "out/smoothing"},
    },
    # transmission with extra control/signal phases (case a); case b is the
    # same config with controls[1].phase = pi/6
    "phase-control": {
        "scheme": _BASE_SCHEME,
        "medium": {"density": 3e-13, "length": 1e7},
        "signals": [dict(_SIGNAL),
                    dict(_SIGNAL, phase=2.0 * math.pi / 3.0)],
        "controls": [{"amplitude": 1.2e-9, "phase": math.pi / 2.0},
                     {"amplitude": 1.8e-9, "phase": 7.0 * math.pi / 6.0}],
        "grid": {"nz": 400, "nt": None, "t_max": None},
        "scenario": {"kind": "phase-control", "mode": "full"},
        "output": {"directory": "out/phase-control"},
    },
    # storage by simultaneous tanh switch-off; the long sample holds the
    # whole pulse before the controls go down, and the stored phase is read
    # against the analytic line.  Controls and signal amplitudes equalized
    # in normalized units; signals[1].phase is the scanned phase shift.
    "storage-phase-scan": {
        "scheme": _BASE_SCHEME,
        "medium": {"density": 3e-13, "length": 3.5e8},
        "signals": [dict(_SIGNAL), dict(_SIGNAL)],
        "controls": [{"amplitude": 1.2e-9, "phase": 0.0,
                      "off_time": 1.25e11, "ramp_width": 5e9},
                     {"amplitude": 1.8e-9, "phase": 0.0,
                      "off_time": 1.25e11, "ramp_width": 5e9}],
        "grid": {"nz": 400, "nt": None, "t_max": None},
        "scenario": {"kind": "storage-phase-scan", "mode": "full",
                     "equalize_controls": True, "equalize_signals": True},
        "output": {"directory": "out/storage-phase-scan"},
    },
    # spatial distribution of the stored coherence, compared fit-free
    # against the closed forms; runs the resonant relaxation-free system
    # (the model the closed forms are derived from) with the second signal
    # locked to the adiabatic field ratio, on the finer grid that mode needs
    "storage-profile": {
        "scheme": _BASE_SCHEME,
        "medium": {"density": 3e-13, "length": 3.5e8},
        "signals": [dict(_SIGNAL), dict(_SIGNAL)],
        "controls": [{"amplitude": 1.2e-9, "phase": 0.0,
                      "off_time": 1.25e11, "ramp_width": 5e9},
                     {"amplitude": 1.8e-9, "phase": 0.0,
                      "off_time": 1.25e11, "ramp_width": 5e9}],
        "grid": {"nz": 3501, "nt": None, "t_max": None},
        "scenario": {"kind": "storage-profile", "mode": "reduced",
                     "match_signals_to_controls": True},
        "output": {"directory": "out/storage-profile"},
    },
}


def reference_config(kind: str) -> dict:
    """A deep copy of the reference configuration for one scenario kind."""
    try:
        return copy.deepcopy(_REFERENCE[kind])
    except KeyError:
        raise ConfigError(
            f"no reference config named {kind!r}; "
            f"available: {sorted(_REFERENCE)}") from None


def reference_kinds():
    return sorted(_REFERENCE)
