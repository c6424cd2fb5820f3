"""Dark/bright polariton change of variables and its closed-form predictions.

The orthogonal transformation links the normalized fields and the lower
coherence to one dark and two bright collective excitations.  For smooth
inputs, the dark component survives propagation while the bright ones are
damped, which yields closed forms for the transmitted fields, the stored
coherence, the group velocity and the peak trajectory.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import SingularDecompositionError
from .units import PhysicalConstants
from .model import AU


# cos(theta) below this is treated as the stopped-light singularity
# (cos(pi/2) in floats is ~6e-17, well under it)
_SINGULAR_COS = 1e-14


@dataclass(frozen=True)
class MixingAngles:
    """Mixing angles of the polariton transformation.

    theta is set by the total control strength (group velocity,
    compression); phi partitions the two signal channels.  The control
    phases enter as the arg_u factors of the transformation.
    """

    theta: float
    phi: float
    arg_u2: float = 0.0
    arg_u4: float = 0.0

    @classmethod
    def from_controls(cls, U2: complex, U4: complex) -> "MixingAngles":
        """Angles for instantaneous dimensionless controls U2, U4.

        Both controls zero gives theta = pi/2 (stopped light) and, by
        convention, phi = 0; the decomposition is singular there anyway.
        """
        a2, a4 = abs(U2), abs(U4)
        theta = math.asin(1.0 / math.sqrt(a2 * a2 + a4 * a4 + 1.0))
        phi = math.atan2(a4, a2)
        return cls(theta=theta, phi=phi,
                   arg_u2=cmath.phase(U2) if a2 else 0.0,
                   arg_u4=cmath.phase(U4) if a4 else 0.0)

    @property
    def cos2_theta(self) -> float:
        return math.cos(self.theta) ** 2


@dataclass(frozen=True)
class PolaritonState:
    """Dark and bright collective amplitudes (scalars or arrays).

    ``dark`` propagates losslessly at the reduced group velocity;
    ``bright_atomic`` couples to the upper states and is absorbed;
    ``bright_field`` is the purely field-like orthogonal combination.
    """

    dark: np.ndarray
    bright_atomic: np.ndarray
    bright_field: np.ndarray


def group_velocity(angles: MixingAngles,
                   constants: PhysicalConstants = AU) -> float:
    """Dark-polariton group velocity c * cos^2(theta)."""
    return constants.c * angles.cos2_theta


def compression_factor(angles: MixingAngles) -> float:
    """Spatial compression cos^2(theta) of a stored pulse vs free space."""
    c2 = angles.cos2_theta
    if c2 <= _SINGULAR_COS**2:
        raise SingularDecompositionError(
            "compression undefined at theta = pi/2 (zero controls)")
    return c2


def _basis(angles: MixingAngles):
    ct, st = math.cos(angles.theta), math.sin(angles.theta)
    cp, sp = math.cos(angles.phi), math.sin(angles.phi)
    return ct, st, cp, sp


def to_polaritons(R1, R3, sigma_bc, angles: MixingAngles) -> PolaritonState:
    """Project (R1, R3, sigma_bc) onto the polariton basis."""
    ct, st, cp, sp = _basis(angles)
    y1 = np.asarray(R1) * np.exp(-1j * angles.arg_u2)
    y3 = np.asarray(R3) * np.exp(-1j * angles.arg_u4)
    s = np.asarray(sigma_bc)
    return PolaritonState(
        dark=ct * cp * y1 + ct * sp * y3 - st * s,
        bright_atomic=st * cp * y1 + st * sp * y3 + ct * s,
        bright_field=sp * y1 - cp * y3,
    )


def from_polaritons(state: PolaritonState, angles: MixingAngles):
    """Reconstruct (R1, R3, sigma_bc) from a polariton state."""
    ct, st, cp, sp = _basis(angles)
    psi = np.asarray(state.dark)
    phib = np.asarray(state.bright_atomic)
    xb = np.asarray(state.bright_field)
    r1 = np.exp(1j * angles.arg_u2) * (ct * cp * psi + st * cp * phib + sp * xb)
    r3 = np.exp(1j * angles.arg_u4) * (ct * sp * psi + st * sp * phib - cp * xb)
    sigma = -st * psi + ct * phib
    return r1, r3, sigma


def initial_decomposition(R1_0, R3_0, angles: MixingAngles):
    """Split incoming fields into dark and field-like bright parts.

    Valid for smooth pulses, for which the absorbed bright component
    vanishes at entry; requires nonvanishing controls.
    """
    ct, st, cp, sp = _basis(angles)
    if abs(ct) <= _SINGULAR_COS:
        raise SingularDecompositionError(
            "decomposition singular at theta = pi/2 (zero controls at entry)")
    y1 = np.asarray(R1_0) * np.exp(-1j * angles.arg_u2)
    y3 = np.asarray(R3_0) * np.exp(-1j * angles.arg_u4)
    dark = (cp * y1 + sp * y3) / ct
    bright_field = sp * y1 - cp * y3
    return dark, bright_field


def asymptotic_prediction(R1_0, R3_0, angles_0: MixingAngles,
                          angles_final: Optional[MixingAngles] = None):
    """Asymptotic transmitted fields and stored coherence.

    Applies the dark projection at the entry angles and rebuilds the
    primitive variables at the final angles (equal to the entry angles for
    constant controls; theta -> pi/2 for storage).  Time-argument
    bookkeeping (the retarded argument) is the caller's concern.
    Returns (R1_inf, R3_inf, sigma_bc_inf).
    """
    if angles_final is None:
        angles_final = angles_0
    dark, _ = initial_decomposition(R1_0, R3_0, angles_0)
    zeros = np.zeros_like(np.asarray(dark))
    return from_polaritons(
        PolaritonState(dark=dark, bright_atomic=zeros, bright_field=zeros),
        angles_final,
    )


def transit_delay(length: float, angles: MixingAngles,
                  constants: PhysicalConstants = AU) -> float:
    """Extra local-time delay of the dark polariton over the sample."""
    v = group_velocity(angles, constants)
    if angles.cos2_theta <= _SINGULAR_COS**2:
        raise SingularDecompositionError("transit undefined at zero controls")
    return length / v - length / constants.c


def peak_position(t: float, entry_time: float,
                  cos2_theta_of_t: Callable[[float], float],
                  constants: PhysicalConstants = AU,
                  points: Optional[Sequence[float]] = None) -> float:
    """Position of the pulse maximum at time t.

    Before entry_time the maximum flies at c toward the sample entrance
    (negative positions); afterwards it advances by integral of
    c*cos^2(theta(tau)) evaluated by adaptive quadrature.
    """
    if t <= entry_time:
        return constants.c * (t - entry_time)
    pts = [p for p in (points or []) if entry_time < p < t]
    val, _ = quad(lambda tau: constants.c * cos2_theta_of_t(tau),
                  entry_time, t, points=pts or None,
                  limit=200, epsrel=1e-10, epsabs=0.0)
    return val


def stored_profile(z_grid: np.ndarray,
                   input_envelope: Callable[[np.ndarray], np.ndarray],
                   angles_0: MixingAngles,
                   cos2_theta_of_t: Callable[[np.ndarray], np.ndarray],
                   t_end: float,
                   constants: PhysicalConstants = AU,
                   n_time: int = 20001):
    """Predicted |sigma_bc|(z) after the controls are switched off.

    The content that entered the sample at time t freezes at depth
    z(t) = integral_t^{t_end} c cos^2 theta; the stored magnitude is the
    dark projection of the input envelope, amplified by 1/cos(theta_0).
    ``input_envelope`` must return |dark projection * cos(theta_0)|, i.e.
    the combined input magnitude at the entry face.
    """
    tg = np.linspace(0.0, t_end, n_time)
    v = constants.c * np.asarray(cos2_theta_of_t(tg))
    # z(t) = total travel from t to t_end, by cumulative trapezoid from the end
    dt = tg[1] - tg[0]
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * dt)))
    z_of_t = cum[-1] - cum
    # invert the monotone map t -> z on the grid
    t_of_z = np.interp(z_grid, z_of_t[::-1], tg[::-1])
    ct0 = math.cos(angles_0.theta)
    if abs(ct0) <= _SINGULAR_COS:
        raise SingularDecompositionError("stored profile undefined at zero controls")
    return np.abs(input_envelope(t_of_z)) / ct0
