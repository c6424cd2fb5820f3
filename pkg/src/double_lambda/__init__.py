"""EIT and light storage of two signal pulses in a double-lambda medium.

A 1D Maxwell-Bloch propagation solver in the co-moving frame, the
dark/bright polariton analytics that predict transmitted and stored
pulses in closed form, the frequency-domain susceptibility matrix, and a
config-driven scenario runner that cross-validates the two.
"""

from .errors import (ConfigError, DomainError, DoubleLambdaError,
                     GridResolutionError, NumericalBlowupError,
                     SingularDecompositionError, SingularityError)
from .model import (Detunings, LevelScheme, MediumSpec, coupling_constant,
                    dipole_from_linewidth, linewidth_from_dipole,
                    normalize_control, normalize_signal, rabi_frequency,
                    resonant_scheme)
from .polaritons import (MixingAngles, PolaritonState, asymptotic_prediction,
                         compression_factor, from_polaritons, group_velocity,
                         initial_decomposition, peak_position, stored_profile,
                         to_polaritons, transit_delay)
from .pulses import (ControlSchedule, PulseSpec, eval_control, eval_pulse,
                     pulse_l2_norm)
from .solver import (ConvergenceReport, FieldHistory, Grid, convergence_report,
                     integrate_slice, simulate_full, simulate_reduced, step,
                     weak_probe_margin)
from .susceptibility import (SusceptibilityMatrix, chi_adiabatic, chi_matrix,
                             chi_resonant, default_omega_grid,
                             denominator_poles, transparency_window)
from .units import PhysicalConstants, si_conversion, si_to_atomic

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DomainError", "DoubleLambdaError", "GridResolutionError",
    "NumericalBlowupError", "SingularDecompositionError", "SingularityError",
    "Detunings", "LevelScheme", "MediumSpec", "coupling_constant",
    "dipole_from_linewidth", "linewidth_from_dipole", "normalize_control",
    "normalize_signal", "rabi_frequency", "resonant_scheme",
    "MixingAngles", "PolaritonState", "asymptotic_prediction",
    "compression_factor", "from_polaritons", "group_velocity",
    "initial_decomposition", "peak_position", "stored_profile",
    "to_polaritons", "transit_delay",
    "ControlSchedule", "PulseSpec", "eval_control", "eval_pulse",
    "pulse_l2_norm",
    "ConvergenceReport", "FieldHistory", "Grid", "convergence_report",
    "integrate_slice", "simulate_full", "simulate_reduced", "step",
    "weak_probe_margin",
    "SusceptibilityMatrix", "chi_adiabatic", "chi_matrix", "chi_resonant",
    "default_omega_grid", "denominator_poles", "transparency_window",
    "PhysicalConstants", "si_conversion", "si_to_atomic",
    "__version__",
]
