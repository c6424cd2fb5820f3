"""Unit system: Hartree atomic units internally, SI only at the boundary.

All physics in this package is computed in atomic units (hbar = 1,
4*pi*eps0 = 1, c = 137.035999).  ``si_conversion`` / ``si_to_atomic``
translate selected quantity kinds for reporting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

SPEED_OF_LIGHT_AU = 137.035999

# CODATA 2018 conversion factors: SI value of one atomic unit.
BOHR_RADIUS_M = 5.29177210903e-11
ATOMIC_TIME_S = 2.4188843265857e-17
HARTREE_J = 4.3597447222071e-18
ATOMIC_FIELD_V_PER_M = 5.14220674763e11
ATOMIC_DENSITY_PER_M3 = 1.0 / BOHR_RADIUS_M**3
# One atomic unit of intensity, eps0*c*E_au^2/2, for |field amplitude|^2
# expressed in atomic units.
ATOMIC_INTENSITY_W_PER_M2 = (
    0.5 * 8.8541878128e-12 * 299792458.0 * ATOMIC_FIELD_V_PER_M**2
)

_SI_FACTORS = {
    "length": BOHR_RADIUS_M,              # -> m
    "time": ATOMIC_TIME_S,                # -> s
    "energy": HARTREE_J,                  # -> J
    "electric-field": ATOMIC_FIELD_V_PER_M,   # -> V/m
    "density": ATOMIC_DENSITY_PER_M3,     # -> m^-3
    "power-density": ATOMIC_INTENSITY_W_PER_M2,  # |eps|^2 a.u. -> W/m^2
}


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants of the working unit system.

    Defaults are Hartree atomic units; all three must be positive.
    """

    c: float = SPEED_OF_LIGHT_AU
    hbar: float = 1.0
    eps0: float = 1.0 / (4.0 * math.pi)

    def __post_init__(self):
        if not (self.c > 0 and self.hbar > 0 and self.eps0 > 0):
            raise DomainError("physical constants must be strictly positive")

    @classmethod
    def atomic_units(cls) -> "PhysicalConstants":
        return cls()

    @property
    def is_atomic_units(self) -> bool:
        return (
            self.hbar == 1.0
            and abs(4.0 * math.pi * self.eps0 - 1.0) < 1e-14
        )


def si_conversion(value: float, quantity_kind: str) -> float:
    """Convert an atomic-unit value of the given kind to SI.

    ``power-density`` takes the squared field amplitude |eps|^2 in atomic
    units and returns W/m^2.
    """
    try:
        return value * _SI_FACTORS[quantity_kind]
    except KeyError:
        raise DomainError(
            f"unknown quantity kind {quantity_kind!r}; "
            f"expected one of {sorted(_SI_FACTORS)}"
        ) from None


def si_to_atomic(value: float, quantity_kind: str) -> float:
    """Inverse of :func:`si_conversion`."""
    try:
        return value / _SI_FACTORS[quantity_kind]
    except KeyError:
        raise DomainError(
            f"unknown quantity kind {quantity_kind!r}; "
            f"expected one of {sorted(_SI_FACTORS)}"
        ) from None
