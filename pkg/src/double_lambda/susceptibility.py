"""Frequency-domain susceptibility of the double-lambda medium.

Evaluates the four linear susceptibilities connecting the two signal
polarizations to the two signal fields, their resonant lossless limit,
and the effective single-channel susceptibility under the adiabatic field
ratio.  Frequencies are sideband offsets from the carriers.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
import numpy as np

from .errors import DomainError, SingularityError
from .model import AU, Detunings, LevelScheme
from .units import PhysicalConstants

POLE_REL_TOL = 1e-14


@dataclass
class SusceptibilityMatrix:
    """chi components on a sideband-frequency grid, plus pole locations.

    ``flagged`` marks grid points evaluated within the pole tolerance;
    values there are NaN rather than garbage.
    """

    omega: np.ndarray
    chi11: np.ndarray
    chi13: np.ndarray
    chi31: np.ndarray
    chi33: np.ndarray
    poles: np.ndarray
    flagged: np.ndarray = field(default=None)


def denominator_poles(detunings: Detunings, Omega2: complex,
                      Omega4: complex) -> np.ndarray:
    """Roots of the shared cubic denominator (at most three)."""
    p, q, r = detunings.Delta1, detunings.Delta3, detunings.delta
    a, b = abs(Omega4) ** 2, abs(Omega2) ** 2
    coeffs = [-1.0,
              p + q + r,
              a + b - (p * q + p * r + q * r),
              p * q * r - p * a - q * b]
    return np.roots(coeffs)


def _denominator(om, detunings: Detunings, Omega2, Omega4):
    a1 = detunings.Delta1 - om
    a3 = detunings.Delta3 - om
    ad = detunings.delta - om
    den = a1 * a3 * ad - a1 * abs(Omega4) ** 2 - a3 * abs(Omega2) ** 2
    # local magnitude scale of the three contributions, for pole detection
    scale = (np.abs(a1 * a3 * ad) + np.abs(a1) * abs(Omega4) ** 2
             + np.abs(a3) * abs(Omega2) ** 2)
    return a1, a3, ad, den, scale


def chi_matrix(omega_grid, detunings: Detunings, Omega2: complex,
               Omega4: complex, scheme: LevelScheme, density: float,
               constants: PhysicalConstants = AU,
               strict: bool = False) -> SusceptibilityMatrix:
    """Full susceptibility matrix with detunings and relaxation.

    Points within the pole tolerance are flagged and set to NaN; in strict
    mode they raise instead.
    """
    om = np.asarray(omega_grid, dtype=complex)
    a1, a3, ad, den, scale = _denominator(om, detunings, Omega2, Omega4)
    flagged = np.abs(den) <= POLE_REL_TOL * scale
    if strict and np.any(flagged):
        bad = np.asarray(omega_grid)[flagged][0]
        raise SingularityError(f"susceptibility pole at omega = {bad!r}")
    pref = density / (4.0 * np.pi * constants.hbar * constants.eps0)
    c11 = pref * abs(scheme.d1) ** 2
    c33 = pref * abs(scheme.d3) ** 2
    c13 = pref * scheme.d1 * np.conj(scheme.d3)
    with np.errstate(divide="ignore", invalid="ignore"):
        chi11 = c11 * (-(a3 * ad) + abs(Omega4) ** 2) / den
        chi33 = c33 * (-(a1 * ad) + abs(Omega2) ** 2) / den
        chi13 = c13 * (-(Omega2 * np.conj(Omega4))) / den
        chi31 = np.conj(c13) * (-(np.conj(Omega2) * Omega4)) / den
    for arr in (chi11, chi13, chi31, chi33):
        arr[flagged] = np.nan + 1j * np.nan
    return SusceptibilityMatrix(
        omega=np.asarray(omega_grid, dtype=float),
        chi11=chi11, chi13=chi13, chi31=chi31, chi33=chi33,
        poles=denominator_poles(detunings, Omega2, Omega4),
        flagged=flagged,
    )


def chi_resonant(omega_grid, Omega2: complex, Omega4: complex,
                 scheme: LevelScheme, density: float,
                 constants: PhysicalConstants = AU,
                 strict: bool = False) -> SusceptibilityMatrix:
    """Singular resonant limit (zero detunings, zero relaxation).

    Poles sit at omega = 0 and +-sqrt(|Omega2|^2 + |Omega4|^2).
    """
    om = np.asarray(omega_grid, dtype=float)
    osq = abs(Omega2) ** 2 + abs(Omega4) ** 2
    den = om**3 - om * osq
    scale = np.abs(om) ** 3 + np.abs(om) * osq
    flagged = np.abs(den) <= POLE_REL_TOL * scale
    flagged |= (om == 0.0)
    if strict and np.any(flagged):
        raise SingularityError(
            f"resonant susceptibility pole at omega = {om[flagged][0]!r} "
            f"(poles at 0 and +-{np.sqrt(osq):.6e})")
    pref = density / (4.0 * np.pi * constants.hbar * constants.eps0)
    c11 = pref * abs(scheme.d1) ** 2
    c33 = pref * abs(scheme.d3) ** 2
    c13 = pref * scheme.d1 * np.conj(scheme.d3)
    denc = den.astype(complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        chi11 = c11 * (om**2 - abs(Omega4) ** 2) / denc
        chi33 = c33 * (om**2 - abs(Omega2) ** 2) / denc
        chi13 = c13 * (Omega2 * np.conj(Omega4)) / denc
        chi31 = np.conj(c13) * (np.conj(Omega2) * Omega4) / denc
    for arr in (chi11, chi13, chi31, chi33):
        arr[flagged] = np.nan + 1j * np.nan
    root = np.sqrt(osq)
    return SusceptibilityMatrix(
        omega=om, chi11=chi11, chi13=chi13, chi31=chi31, chi33=chi33,
        poles=np.array([0.0, root, -root]), flagged=flagged,
    )


def chi_adiabatic(omega_grid, Omega2: complex, Omega4: complex,
                  scheme: LevelScheme, density: float,
                  constants: PhysicalConstants = AU) -> np.ndarray:
    """Effective susceptibility under the adiabatic field ratio.

    Combining the resonant chi11 and chi13 with the second signal locked
    to eps3 = eps1 d1* Omega4 / (d3* Omega2) cancels the omega = 0
    singularity, leaving a transparency window of half-width
    sqrt(|Omega2|^2 + |Omega4|^2); zero exactly at line center.
    """
    if abs(Omega2) == 0:
        raise DomainError("adiabatic ratio undefined at Omega2 = 0")
    om = np.asarray(omega_grid, dtype=float)
    osq = abs(Omega2) ** 2 + abs(Omega4) ** 2
    pref = density / (4.0 * np.pi * constants.hbar * constants.eps0)
    c11 = pref * abs(scheme.d1) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        chi = c11 * om / (om**2 - osq)
    chi = np.where(om**2 == osq, np.nan, chi)
    return chi.astype(complex)


def default_omega_grid(Omega2: complex, Omega4: complex,
                       n: int = 2001) -> np.ndarray:
    """Sideband grid spanning +-5 sqrt(|Omega2|^2+|Omega4|^2).

    Logarithmically densified near zero and near the side poles.
    """
    root = np.sqrt(abs(Omega2) ** 2 + abs(Omega4) ** 2)
    if root == 0:
        raise DomainError("grid scale undefined for zero controls")
    if n < 64:
        raise DomainError("omega grid needs at least 64 points")
    n_seg = n // 8
    log_near0 = np.geomspace(root * 1e-6, root * 0.5, n_seg)
    log_pole = root + np.concatenate([-np.geomspace(root * 1e-6, root * 0.4, n_seg),
                                      np.geomspace(root * 1e-6, root * 0.4, n_seg)])
    lin = np.linspace(0.0, 5.0 * root, max(n - 6 * n_seg, n // 4))
    half = np.concatenate([log_near0, log_pole, lin])
    grid = np.unique(np.concatenate([-half, half, [0.0]]))
    return grid


def transparency_window(omega_grid, absorption_curve,
                        absorption_threshold: float) -> float:
    """Half-width around omega = 0 where absorption stays below threshold.

    ``absorption_curve`` is any non-negative absorption measure sampled on
    ``omega_grid`` (|chi| in the lossless model, -Im or |Im| chi with
    relaxation).  Returns the smaller of the two one-sided half-widths,
    with linear interpolation of the threshold crossing.  If no crossing
    exists inside the grid, warns and returns the grid half-span.
    """
    om = np.asarray(omega_grid, dtype=float)
    ab = np.asarray(absorption_curve, dtype=float)
    order = np.argsort(om)
    om, ab = om[order], ab[order]
    i0 = int(np.argmin(np.abs(om)))

    def one_side(idx_iter):
        prev_i = i0
        for i in idx_iter:
            if np.isnan(ab[i]):
                prev_i = i
                continue
            if ab[i] > absorption_threshold:
                o0, o1 = om[prev_i], om[i]
                a0, a1 = ab[prev_i], ab[i]
                if np.isnan(a0) or a1 == a0:
                    return abs(o1)
                frac = (absorption_threshold - a0) / (a1 - a0)
                return abs(o0 + frac * (o1 - o0))
            prev_i = i
        return None

    right = one_side(range(i0 + 1, len(om)))
    left = one_side(range(i0 - 1, -1, -1))
    widths = [w for w in (left, right) if w is not None]
    if not widths:
        warnings.warn("no threshold crossing found: transparency window "
                      "exceeds the sampled grid", stacklevel=2)
        return float(max(abs(om[0]), abs(om[-1])))
    return float(min(widths))


def write_csv(path, matrix: SusceptibilityMatrix) -> None:
    """Dump a susceptibility matrix; pole list in the header comment."""
    poles = ", ".join(f"{float(p.real)!r}{float(p.imag):+}j"
                      for p in np.asarray(matrix.poles))
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# poles: {poles}\n")
        f.write("omega,re_chi11,im_chi11,re_chi13,im_chi13,"
                "re_chi31,im_chi31,re_chi33,im_chi33\n")
        for i, om in enumerate(matrix.omega):
            row = [om]
            for comp in (matrix.chi11, matrix.chi13, matrix.chi31, matrix.chi33):
                row.extend([comp[i].real, comp[i].imag])
            f.write(",".join(repr(float(x)) for x in row) + "\n")
