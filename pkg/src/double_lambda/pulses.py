"""Signal pulse envelopes and control-field schedules.

Both evaluate to complex amplitudes; the amplitude fields may be physical
field strengths or the dimensionless normalized variables, depending on
the caller (the propagation solver expects normalized ones).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError

SINE_SQUARE = "sine-square"
RECTANGULAR = "rectangular"
_SHAPES = (SINE_SQUARE, RECTANGULAR)


@dataclass(frozen=True)
class PulseSpec:
    """One signal pulse: shape, amplitude, support and carrier phase.

    The envelope is identically zero outside [start_time, start_time +
    duration); a rectangular pulse keeps its discontinuities exact.
    """

    shape: str
    amplitude: float
    duration: float
    phase: float = 0.0
    start_time: float = 0.0

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise ConfigError(f"unknown pulse shape {self.shape!r}; "
                              f"expected one of {_SHAPES}")
        if self.amplitude < 0:
            raise ConfigError("pulse amplitude must be >= 0")
        if self.duration <= 0:
            raise ConfigError("pulse duration must be > 0")


def eval_pulse(spec: PulseSpec, t):
    """Complex envelope of the pulse at time(s) t."""
    t = np.asarray(t, dtype=float)
    x = (t - spec.start_time) / spec.duration
    inside = (x >= 0.0) & (x < 1.0)
    if spec.shape == SINE_SQUARE:
        profile = np.where(inside, np.sin(np.pi * np.clip(x, 0.0, 1.0)) ** 2, 0.0)
    else:
        profile = np.where(inside, 1.0, 0.0)
    out = spec.amplitude * np.exp(1j * spec.phase) * profile
    return complex(out) if out.ndim == 0 else out


def pulse_l2_norm(spec: PulseSpec) -> float:
    """Closed-form integral of |envelope|^2 over the pulse support."""
    if spec.shape == SINE_SQUARE:
        return 0.375 * spec.amplitude**2 * spec.duration
    return spec.amplitude**2 * spec.duration


@dataclass(frozen=True)
class ControlSchedule:
    """Control-field amplitude versus time.

    With neither off_time nor on_time the control is time independent.
    Switch-off follows (1 - tanh((t - off_time)/ramp_width))/2; switch-on
    uses the mirrored profile.  With both set (off first, on later) the
    value is the larger of the two ramps, which keeps |value| <= base.
    """

    base_amplitude: float
    phase: float = 0.0
    off_time: Optional[float] = None
    on_time: Optional[float] = None
    ramp_width: Optional[float] = None

    def __post_init__(self):
        if self.base_amplitude < 0:
            raise ConfigError("control amplitude must be >= 0")
        if (self.off_time is not None or self.on_time is not None):
            if self.ramp_width is None or self.ramp_width <= 0:
                raise ConfigError("switching controls need a positive ramp_width")
        if (self.off_time is not None and self.on_time is not None
                and not self.on_time > self.off_time):
            raise ConfigError("on_time must be later than off_time")


def eval_control(schedule: ControlSchedule, t):
    """Complex control amplitude at time(s) t."""
    t = np.asarray(t, dtype=float)
    if schedule.off_time is None and schedule.on_time is None:
        ramp = np.ones_like(t)
    else:
        w = schedule.ramp_width
        ramp_off = ramp_on = None
        if schedule.off_time is not None:
            ramp_off = 0.5 * (1.0 - np.tanh((t - schedule.off_time) / w))
        if schedule.on_time is not None:
            ramp_on = 0.5 * (1.0 + np.tanh((t - schedule.on_time) / w))
        if ramp_on is None:
            ramp = ramp_off
        elif ramp_off is None:
            ramp = ramp_on
        else:
            ramp = np.maximum(ramp_off, ramp_on)
    out = schedule.base_amplitude * np.exp(1j * schedule.phase) * ramp
    return complex(out) if out.ndim == 0 else out
