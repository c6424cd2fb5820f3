"""Four-level double-lambda atom: levels, dipoles, couplings, detunings.

Level labels follow the standard double-lambda layout: b is the ground
state, c the metastable lower state, a and d the two upper states.
Signal 1 drives b-a, control 2 drives c-a, signal 3 drives b-d,
control 4 drives c-d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .units import PhysicalConstants

AU = PhysicalConstants.atomic_units()


# ---------------------------------------------------------------------------
# elementary operations
# ---------------------------------------------------------------------------

def dipole_from_linewidth(gamma: float, omega: float,
                          constants: PhysicalConstants = AU) -> float:
    """Dipole moment magnitude from a spontaneous decay rate.

    Inverts Gamma = omega^3 d^2 / (3 pi eps0 hbar c^3) for d.
    """
    if gamma <= 0 or omega <= 0:
        raise DomainError("decay rate and transition frequency must be positive")
    k = constants
    return math.sqrt(3.0 * math.pi * k.eps0 * k.hbar * k.c**3 * gamma / omega**3)


def linewidth_from_dipole(d: float, omega: float,
                          constants: PhysicalConstants = AU) -> float:
    """Spontaneous decay rate of a transition with dipole magnitude d."""
    if d <= 0 or omega <= 0:
        raise DomainError("dipole and transition frequency must be positive")
    k = constants
    return omega**3 * d**2 / (3.0 * math.pi * k.eps0 * k.hbar * k.c**3)


def coupling_constant(d: complex, omega: float, density: float,
                      constants: PhysicalConstants = AU) -> float:
    """Field-medium coupling kappa = sqrt(|d|^2 omega N / (4 eps0 hbar)).

    A vanishing dipole or density makes the medium trivially transparent
    for that channel; callers must use the vacuum path instead.
    """
    if abs(d) == 0 or density <= 0 or omega <= 0:
        raise DomainError("coupling requires nonzero dipole, density and frequency")
    k = constants
    return math.sqrt(abs(d) ** 2 * omega * density / (4.0 * k.eps0 * k.hbar))


def normalize_signal(epsilon: complex, d: complex, kappa: float,
                     constants: PhysicalConstants = AU) -> complex:
    """Dimensionless signal variable R = eps d* / (2 hbar kappa)."""
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    return epsilon * np.conj(d) / (2.0 * constants.hbar * kappa)


def normalize_control(epsilon: complex, d: complex, kappa_signal: float,
                      constants: PhysicalConstants = AU) -> complex:
    """Dimensionless control variable U = eps d* / (2 hbar kappa_signal).

    The control on the c-a transition is normalized by the coupling of
    signal 1 and the control on c-d by the coupling of signal 3 (cross
    normalization).
    """
    if kappa_signal <= 0:
        raise DomainError("kappa must be positive")
    return epsilon * np.conj(d) / (2.0 * constants.hbar * kappa_signal)


def rabi_frequency(epsilon: complex, d: complex,
                   constants: PhysicalConstants = AU) -> complex:
    """Rabi frequency Omega = eps d* / (2 hbar)."""
    return epsilon * np.conj(d) / (2.0 * constants.hbar)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelScheme:
    """Energies, dipoles, widths and carrier frequencies of the atom.

    Dipoles d1..d4 belong to the transitions b-a, c-a, b-d, c-d; the
    carrier frequencies omega1..omega4 to the fields driving them.
    """

    E_a: float
    E_b: float
    E_c: float
    E_d: float
    d1: complex
    d2: complex
    d3: complex
    d4: complex
    Gamma_a: float
    Gamma_d: float
    gamma_bc: float
    omega1: float
    omega2: float
    omega3: float
    omega4: float
    resonance_tol: float = 1e-15

    def __post_init__(self):
        if not (self.E_b < self.E_c < self.E_a and self.E_b < self.E_c < self.E_d):
            raise ConfigError(
                "level ordering must satisfy E_b < E_c < E_a and E_b < E_c < E_d"
            )
        if self.Gamma_a < 0 or self.Gamma_d < 0 or self.gamma_bc < 0:
            raise ConfigError("relaxation rates must be non-negative")
        scale = max(abs(self.omega1), abs(self.omega2),
                    abs(self.omega3), abs(self.omega4))
        mismatch = abs((self.omega1 - self.omega2) - (self.omega3 - self.omega4))
        if mismatch > self.resonance_tol * scale:
            raise ConfigError(
                f"four-photon resonance violated: |(w1-w2)-(w3-w4)| = {mismatch:.3e} "
                f"exceeds {self.resonance_tol:.1e} relative"
            )


def resonant_scheme(E_a: float, E_b: float, E_c: float, E_d: float,
                    Gamma_a: float, Gamma_d: float, gamma_bc: float = 0.0,
                    constants: PhysicalConstants = AU,
                    width_convention: str = "total-split",
                    dipole_phases: tuple = (0.0, 0.0, 0.0, 0.0)) -> LevelScheme:
    """Build a scheme with all four fields on resonance.

    Dipoles are derived from the upper-level widths via the spontaneous
    emission formula.  ``width_convention`` controls how a level width maps
    onto its two decay channels:

    * ``"total-split"`` (default): Gamma_a is the total width of level a,
      shared equally between the a->b and a->c channels;
    * ``"per-channel"``: Gamma_a is the width of each individual channel.
    """
    if not (E_b < E_c < E_a and E_b < E_c < E_d):
        raise ConfigError(
            "level ordering must satisfy E_b < E_c < E_a and E_b < E_c < E_d")
    w1, w2 = E_a - E_b, E_a - E_c
    w3, w4 = E_d - E_b, E_d - E_c
    if width_convention == "total-split":
        ga, gd = Gamma_a / 2.0, Gamma_d / 2.0
    elif width_convention == "per-channel":
        ga, gd = Gamma_a, Gamma_d
    else:
        raise ConfigError(f"unknown width convention {width_convention!r}")
    p1, p2, p3, p4 = dipole_phases
    return LevelScheme(
        E_a=E_a, E_b=E_b, E_c=E_c, E_d=E_d,
        d1=dipole_from_linewidth(ga, w1, constants) * np.exp(1j * p1),
        d2=dipole_from_linewidth(ga, w2, constants) * np.exp(1j * p2),
        d3=dipole_from_linewidth(gd, w3, constants) * np.exp(1j * p3),
        d4=dipole_from_linewidth(gd, w4, constants) * np.exp(1j * p4),
        Gamma_a=(Gamma_a if width_convention == "total-split" else 2 * Gamma_a),
        Gamma_d=(Gamma_d if width_convention == "total-split" else 2 * Gamma_d),
        gamma_bc=gamma_bc,
        omega1=w1, omega2=w2, omega3=w3, omega4=w4,
    )


@dataclass(frozen=True)
class Detunings:
    """Complex one- and two-photon detunings, relaxation included.

    Imaginary parts are the damping halves/rates and must be <= 0.
    """

    Delta1: complex
    Delta3: complex
    delta: complex

    def __post_init__(self):
        if (np.imag(self.Delta1) > 0 or np.imag(self.Delta3) > 0
                or np.imag(self.delta) > 0):
            raise ConfigError("detuning imaginary parts must be <= 0 (damping)")

    @classmethod
    def from_scheme(cls, scheme: LevelScheme,
                    constants: PhysicalConstants = AU) -> "Detunings":
        hb = constants.hbar
        d1 = (scheme.E_a - scheme.E_b - hb * scheme.omega1) / hb \
            - 0.5j * scheme.Gamma_a
        d3 = (scheme.E_d - scheme.E_b - hb * scheme.omega3) / hb \
            - 0.5j * scheme.Gamma_d
        dl = (scheme.E_b + hb * scheme.omega1
              - scheme.E_c - hb * scheme.omega2) / hb - 1j * scheme.gamma_bc
        return cls(Delta1=d1, Delta3=d3, delta=dl)

    @classmethod
    def resonant(cls) -> "Detunings":
        """Exact resonance, no relaxation: all three are zero."""
        return cls(0j, 0j, 0j)


@dataclass(frozen=True)
class MediumSpec:
    """Sample geometry and the derived field-medium couplings."""

    density: float
    length: float
    kappa1: float
    kappa3: float
    constants: PhysicalConstants = field(default=AU)

    def __post_init__(self):
        if self.density <= 0 or self.length <= 0:
            raise ConfigError("density and length must be positive")
        if self.kappa1 <= 0 or self.kappa3 <= 0:
            raise ConfigError("couplings must be positive")

    @classmethod
    def from_scheme(cls, scheme: LevelScheme, density: float, length: float,
                    constants: PhysicalConstants = AU) -> "MediumSpec":
        if density <= 0 or length <= 0:
            raise ConfigError("density and length must be positive")
        return cls(
            density=density,
            length=length,
            kappa1=coupling_constant(scheme.d1, scheme.omega1, density, constants),
            kappa3=coupling_constant(scheme.d3, scheme.omega3, density, constants),
            constants=constants,
        )
