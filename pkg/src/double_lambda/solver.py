"""Co-moving Maxwell-Bloch propagation in one dimension.

The equations are solved on the (z, t') grid with t' = t - z/c the local
time, which turns unidirectional propagation into an outer march over z
with an inner ODE integration over t' at each slice:

* atomic variables at a slice follow a linear ODE driven by the slice
  fields, integrated with classical RK4 (fields linearly interpolated at
  the half steps, control schedules evaluated exactly there);
* the field advance in z is an explicit trapezoidal predictor-corrector
  (second order in dz).

Both solver modes share one kernel over the variables (S1, S3, sigma_bc);
the full mode only switches on the complex detuning coefficients.  The
control schedules are evaluated in local time at every slice; the lab-time
offset z/c is negligible against every schedule timescale here and the
driving fields do not propagate in this model anyway.

Inputs are the *normalized* dimensionless variables: signal PulseSpec
amplitudes are R values, ControlSchedule amplitudes are U values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, GridResolutionError, NumericalBlowupError
from .model import Detunings, LevelScheme, MediumSpec
from .pulses import ControlSchedule, PulseSpec, eval_control, eval_pulse

try:
    from numba import njit

    def _jit(fn):
        return njit(cache=True, nogil=True)(fn)

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    def _jit(fn):
        return fn

    HAVE_NUMBA = False

# Spatial-guard ceiling for (dz/c) * kappa_max^2 / omega_floor; the explicit
# z-advance loses stability when under-resolved bright components near the
# response poles are amplified, observed slightly above this value.
SPACE_GUARD_LIMIT = 10.0
TIME_GUARD_FACTOR = 20.0

REDUCED = "reduced"
FULL = "full"

# instrumentation: how many PDE marches have run (used to prove that the
# analytics-only paths never touch the solver)
SOLVER_STATS = {"runs": 0}


@dataclass(frozen=True)
class Grid:
    """Uniform (z, t') grid for one propagation run."""

    nz: int
    nt: int
    length: float
    t_max: float

    def __post_init__(self):
        if self.nz < 2 or self.nt < 2:
            raise ConfigError("grid needs nz >= 2 and nt >= 2")
        if self.length <= 0 or self.t_max <= 0:
            raise ConfigError("grid extents must be positive")

    @property
    def dz(self) -> float:
        return self.length / (self.nz - 1)

    @property
    def dt(self) -> float:
        return self.t_max / (self.nt - 1)

    @property
    def z(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.nz)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.nt)


@dataclass
class FieldHistory:
    """Recorded space-time history of one propagation run.

    Rows of r1/r3/s1/s3/sigma_bc are the full local-time traces at the
    recorded depths; sigma_end is the lower coherence at the final local
    time for every slice (the frozen profile after storage).  ``full``
    optionally holds the complete (nz, nt) arrays.
    """

    grid: Grid
    mode: str
    record_z: np.ndarray
    record_idx: np.ndarray
    r1: np.ndarray
    r3: np.ndarray
    s1: np.ndarray
    s3: np.ndarray
    sigma_bc: np.ndarray
    sigma_end: np.ndarray
    full: Optional[dict] = field(default=None)

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    def row(self, z: float) -> int:
        """Index of the recorded depth closest to z."""
        return int(np.argmin(np.abs(self.record_z - z)))


def weak_probe_margin(history: FieldHistory, medium: MediumSpec) -> float:
    """Largest recorded atomic coherence magnitude.

    First-order theory assumes |sigma_ba|, |sigma_bd|, |sigma_bc| << 1; a
    value approaching 1 signals that the run left the linearization's
    domain of validity.
    """
    return float(max(
        np.max(np.abs(history.s1)) / medium.kappa1,
        np.max(np.abs(history.s3)) / medium.kappa3,
        np.max(np.abs(history.sigma_bc)),
        np.max(np.abs(history.sigma_end)),
    ))


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@_jit
def _slice_ode(r1s, r3s, u2h, u4h, dt, k1sq, k3sq, g1, g3, gb,
               s1o, s3o, sgo):
    # RK4 integration of the atomic variables at one slice; all atoms start
    # in the ground state.  u2h/u4h live on the half-step grid (2nt-1).
    nt = r1s.shape[0]
    s1 = 0.0 + 0.0j
    s3 = 0.0 + 0.0j
    sg = 0.0 + 0.0j
    s1o[0] = s1
    s3o[0] = s3
    sgo[0] = sg
    for k in range(nt - 1):
        r1a = r1s[k]
        r1c = r1s[k + 1]
        r1b = 0.5 * (r1a + r1c)
        r3a = r3s[k]
        r3c = r3s[k + 1]
        r3b = 0.5 * (r3a + r3c)
        u2a = u2h[2 * k]
        u2b = u2h[2 * k + 1]
        u2c = u2h[2 * k + 2]
        u4a = u4h[2 * k]
        u4b = u4h[2 * k + 1]
        u4c = u4h[2 * k + 2]

        a1 = -k1sq * (r1a + u2a * sg) + g1 * s1
        a3 = -k3sq * (r3a + u4a * sg) + g3 * s3
        ag = np.conj(u2a) * s1 + np.conj(u4a) * s3 + gb * sg

        t1 = s1 + 0.5 * dt * a1
        t3 = s3 + 0.5 * dt * a3
        tg = sg + 0.5 * dt * ag
        b1 = -k1sq * (r1b + u2b * tg) + g1 * t1
        b3 = -k3sq * (r3b + u4b * tg) + g3 * t3
        bg = np.conj(u2b) * t1 + np.conj(u4b) * t3 + gb * tg

        t1 = s1 + 0.5 * dt * b1
        t3 = s3 + 0.5 * dt * b3
        tg = sg + 0.5 * dt * bg
        c1 = -k1sq * (r1b + u2b * tg) + g1 * t1
        c3 = -k3sq * (r3b + u4b * tg) + g3 * t3
        cg = np.conj(u2b) * t1 + np.conj(u4b) * t3 + gb * tg

        t1 = s1 + dt * c1
        t3 = s3 + dt * c3
        tg = sg + dt * cg
        e1 = -k1sq * (r1c + u2c * tg) + g1 * t1
        e3 = -k3sq * (r3c + u4c * tg) + g3 * t3
        eg = np.conj(u2c) * t1 + np.conj(u4c) * t3 + gb * tg

        s1 = s1 + dt / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + e1)
        s3 = s3 + dt / 6.0 * (a3 + 2.0 * b3 + 2.0 * c3 + e3)
        sg = sg + dt / 6.0 * (ag + 2.0 * bg + 2.0 * cg + eg)
        s1o[k + 1] = s1
        s3o[k + 1] = s3
        sgo[k + 1] = sg


@_jit
def _march(r1, r3, u2h, u4h, nz, dz_over_c, dt, k1sq, k3sq, g1, g3, gb,
           rec_idx, rec, sigma_end, full, store_full):
    # rec: (5, nrec, nt) rows at recorded depths in the order
    # (r1, r3, s1, s3, sigma); full: (5, nz, nt) when store_full.
    nt = r1.shape[0]
    s1 = np.empty(nt, dtype=np.complex128)
    s3 = np.empty(nt, dtype=np.complex128)
    sg = np.empty(nt, dtype=np.complex128)
    s1p = np.empty(nt, dtype=np.complex128)
    s3p = np.empty(nt, dtype=np.complex128)
    sgp = np.empty(nt, dtype=np.complex128)
    r1p = np.empty(nt, dtype=np.complex128)
    r3p = np.empty(nt, dtype=np.complex128)

    _slice_ode(r1, r3, u2h, u4h, dt, k1sq, k3sq, g1, g3, gb, s1, s3, sg)
    sigma_end[0] = sg[nt - 1]
    nrec = rec_idx.shape[0]
    r = 0
    if nrec > 0 and rec_idx[0] == 0:
        for k in range(nt):
            rec[0, 0, k] = r1[k]
            rec[1, 0, k] = r3[k]
            rec[2, 0, k] = s1[k]
            rec[3, 0, k] = s3[k]
            rec[4, 0, k] = sg[k]
        r = 1
    if store_full:
        for k in range(nt):
            full[0, 0, k] = r1[k]
            full[1, 0, k] = r3[k]
            full[2, 0, k] = s1[k]
            full[3, 0, k] = s3[k]
            full[4, 0, k] = sg[k]

    for i in range(nz - 1):
        for k in range(nt):
            r1p[k] = r1[k] + dz_over_c * s1[k]
            r3p[k] = r3[k] + dz_over_c * s3[k]
        _slice_ode(r1p, r3p, u2h, u4h, dt, k1sq, k3sq, g1, g3, gb,
                   s1p, s3p, sgp)
        for k in range(nt):
            r1[k] = r1[k] + 0.5 * dz_over_c * (s1[k] + s1p[k])
            r3[k] = r3[k] + 0.5 * dz_over_c * (s3[k] + s3p[k])
        _slice_ode(r1, r3, u2h, u4h, dt, k1sq, k3sq, g1, g3, gb, s1, s3, sg)
        for k in range(nt):
            if not (np.isfinite(r1[k].real) and np.isfinite(r1[k].imag)
                    and np.isfinite(r3[k].real) and np.isfinite(r3[k].imag)):
                return i + 1, k
        sigma_end[i + 1] = sg[nt - 1]
        if r < nrec and rec_idx[r] == i + 1:
            for k in range(nt):
                rec[0, r, k] = r1[k]
                rec[1, r, k] = r3[k]
                rec[2, r, k] = s1[k]
                rec[3, r, k] = s3[k]
                rec[4, r, k] = sg[k]
            r += 1
        if store_full:
            for k in range(nt):
                full[0, i + 1, k] = r1[k]
                full[1, i + 1, k] = r3[k]
                full[2, i + 1, k] = s1[k]
                full[3, i + 1, k] = s3[k]
                full[4, i + 1, k] = sg[k]
    return -1, -1


# ---------------------------------------------------------------------------
# guards
# ---------------------------------------------------------------------------

def effective_rate(medium: MediumSpec, controls, detunings: Detunings) -> float:
    """Fastest rate of the slice ODE: control-dressed oscillation plus the
    largest detuning/relaxation magnitude."""
    om_eff = math.hypot(medium.kappa1 * controls[0].base_amplitude,
                        medium.kappa3 * controls[1].base_amplitude)
    det = max(abs(detunings.Delta1), abs(detunings.Delta3), abs(detunings.delta))
    return om_eff + det


def check_time_resolution(grid: Grid, medium: MediumSpec, controls,
                          detunings: Detunings) -> None:
    """dt must resolve the fastest atomic oscillation, period/20."""
    rate = effective_rate(medium, controls, detunings)
    if rate > 0 and grid.dt > 1.0 / (TIME_GUARD_FACTOR * rate):
        need = int(math.ceil(grid.t_max * TIME_GUARD_FACTOR * rate)) + 1
        raise GridResolutionError(
            f"dt = {grid.dt:.3e} exceeds 1/({TIME_GUARD_FACTOR:.0f} * rate) "
            f"= {1.0 / (TIME_GUARD_FACTOR * rate):.3e}; need nt >= {need}")


def check_space_resolution(grid: Grid, medium: MediumSpec,
                           detunings: Detunings) -> None:
    """Stability heuristic for the explicit z-advance.

    The medium response near its (window- or damping-regularized) poles
    amplifies under-resolved spatial steps; reject grids well past the
    observed stability edge instead of letting them blow up mid-run.
    """
    gamma_floor = min(-np.imag(detunings.Delta1), -np.imag(detunings.Delta3))
    omega_floor = math.pi / grid.t_max + max(gamma_floor, 0.0)
    kmax_sq = max(medium.kappa1, medium.kappa3) ** 2
    metric = (grid.dz / medium.constants.c) * kmax_sq / omega_floor
    if metric > SPACE_GUARD_LIMIT:
        need = int(math.ceil(grid.length * metric
                             / (SPACE_GUARD_LIMIT * grid.dz))) + 1
        raise GridResolutionError(
            f"dz = {grid.dz:.3e} too coarse for the medium response "
            f"(stability metric {metric:.1f} > {SPACE_GUARD_LIMIT:.0f}); "
            f"need nz >= {need}")


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def _record_indices(grid: Grid, record_depths) -> np.ndarray:
    if record_depths is None:
        idx = {0, grid.nz - 1}
    else:
        idx = set()
        for d in record_depths:
            if not 0.0 <= d <= grid.length * (1 + 1e-12):
                raise ConfigError(f"record depth {d!r} outside the sample")
            idx.add(int(round(d / grid.dz)))
        idx.add(0)
        idx.add(grid.nz - 1)
    return np.array(sorted(i for i in idx if 0 <= i < grid.nz), dtype=np.int64)


def _run(mode: str, medium: MediumSpec, controls, signals, grid: Grid,
         detunings: Detunings, record_depths, store_full: bool) -> FieldHistory:
    check_time_resolution(grid, medium, controls, detunings)
    check_space_resolution(grid, medium, detunings)

    t = grid.t
    th = np.linspace(0.0, grid.t_max, 2 * grid.nt - 1)
    r1 = np.asarray(eval_pulse(signals[0], t), dtype=np.complex128).copy()
    r3 = np.asarray(eval_pulse(signals[1], t), dtype=np.complex128).copy()
    u2h = np.asarray(eval_control(controls[0], th), dtype=np.complex128)
    u4h = np.asarray(eval_control(controls[1], th), dtype=np.complex128)

    g1 = -1j * detunings.Delta1
    g3 = -1j * detunings.Delta3
    gb = -1j * detunings.delta

    rec_idx = _record_indices(grid, record_depths)
    rec = np.empty((5, rec_idx.size, grid.nt), dtype=np.complex128)
    sigma_end = np.empty(grid.nz, dtype=np.complex128)
    if store_full:
        full = np.empty((5, grid.nz, grid.nt), dtype=np.complex128)
    else:
        full = np.empty((5, 1, 1), dtype=np.complex128)

    bad_iz, bad_it = _march(r1, r3, u2h, u4h, grid.nz,
                            grid.dz / medium.constants.c, grid.dt,
                            medium.kappa1**2, medium.kappa3**2,
                            g1, g3, gb, rec_idx, rec, sigma_end,
                            full, store_full)
    SOLVER_STATS["runs"] += 1
    if bad_iz >= 0:
        raise NumericalBlowupError(bad_iz, bad_it, bad_iz * grid.dz,
                                   bad_it * grid.dt)

    full_dict = None
    if store_full:
        full_dict = {"r1": full[0], "r3": full[1], "s1": full[2],
                     "s3": full[3], "sigma_bc": full[4]}
    return FieldHistory(
        grid=grid, mode=mode,
        record_z=rec_idx * grid.dz, record_idx=rec_idx,
        r1=rec[0], r3=rec[1], s1=rec[2], s3=rec[3], sigma_bc=rec[4],
        sigma_end=sigma_end, full=full_dict,
    )


def simulate_reduced(medium: MediumSpec, controls, signals, grid: Grid,
                     record_depths=None, store_full: bool = False) -> FieldHistory:
    """Propagate in the resonant relaxation-free mode.

    ``controls`` is the (U2, U4) pair of ControlSchedule in normalized
    units; ``signals`` the (R1, R3) PulseSpec pair of normalized boundary
    envelopes.
    """
    return _run(REDUCED, medium, controls, signals, grid,
                Detunings.resonant(), record_depths, store_full)


def simulate_full(medium: MediumSpec, scheme: LevelScheme,
                  detunings: Detunings, controls, signals, grid: Grid,
                  record_depths=None, store_full: bool = False) -> FieldHistory:
    """Propagate with complex detunings and relaxation.

    Degenerates to :func:`simulate_reduced` when all detunings vanish.
    """
    return _run(FULL, medium, controls, signals, grid,
                detunings, record_depths, store_full)


def integrate_slice(r1_slice, r3_slice, u2_half, u4_half, dt: float,
                    kappa1: float, kappa3: float,
                    detunings: Optional[Detunings] = None):
    """Atomic response (s1, s3, sigma_bc) of one slice to given fields.

    The control arrays live on the half-step grid (2*nt - 1 points).
    """
    det = detunings or Detunings.resonant()
    nt = len(r1_slice)
    s1 = np.empty(nt, dtype=np.complex128)
    s3 = np.empty(nt, dtype=np.complex128)
    sg = np.empty(nt, dtype=np.complex128)
    _slice_ode(np.asarray(r1_slice, np.complex128),
               np.asarray(r3_slice, np.complex128),
               np.asarray(u2_half, np.complex128),
               np.asarray(u4_half, np.complex128),
               dt, kappa1**2, kappa3**2,
               -1j * det.Delta1, -1j * det.Delta3, -1j * det.delta,
               s1, s3, sg)
    return s1, s3, sg


def step(r1_slice, r3_slice, u2_half, u4_half, dz: float, dt: float,
         kappa1: float, kappa3: float, c: float,
         detunings: Optional[Detunings] = None):
    """One spatial advance of the march (predictor-corrector).

    Takes the fields over all t' at a slice and returns the fields and
    atomic state arrays at z + dz; the atomic state is recomputed from
    the advanced fields, exactly as inside the full march.
    """
    det = detunings or Detunings.resonant()
    nt = len(r1_slice)
    r1 = np.asarray(r1_slice, np.complex128).copy()
    r3 = np.asarray(r3_slice, np.complex128).copy()
    rec_idx = np.array([1], dtype=np.int64)
    rec = np.empty((5, 1, nt), dtype=np.complex128)
    sigma_end = np.empty(2, dtype=np.complex128)
    dummy = np.empty((5, 1, 1), dtype=np.complex128)
    bad_iz, bad_it = _march(r1, r3, np.asarray(u2_half, np.complex128),
                            np.asarray(u4_half, np.complex128), 2,
                            dz / c, dt, kappa1**2, kappa3**2,
                            -1j * det.Delta1, -1j * det.Delta3,
                            -1j * det.delta, rec_idx, rec, sigma_end,
                            dummy, False)
    if bad_iz >= 0:
        raise NumericalBlowupError(bad_iz, bad_it, bad_iz * dz, bad_it * dt)
    return rec[0, 0], rec[1, 0], (rec[2, 0], rec[3, 0], rec[4, 0])


# ---------------------------------------------------------------------------
# convergence studies
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    """Observed orders and Richardson extrapolation over nested grids."""

    grids: list
    values: np.ndarray
    orders: np.ndarray
    extrapolated: float

    @property
    def observed_order(self) -> float:
        return float(self.orders[-1])


def convergence_report(run: Callable[[Grid], float],
                       grids: Sequence[Grid]) -> ConvergenceReport:
    """Richardson convergence study on a nested grid family.

    Each successive grid must double both interval counts; at least three
    grids are required.  ``run`` maps a grid to a scalar observable.
    """
    if len(grids) < 3:
        raise ConfigError("convergence study needs at least 3 grids")
    for a, b in zip(grids, grids[1:]):
        if a.nz == b.nz and a.nt == b.nt:
            raise ConfigError("degenerate grid family: identical grids")
        if (b.nz - 1) != 2 * (a.nz - 1) or (b.nt - 1) != 2 * (a.nt - 1):
            raise ConfigError(
                "grids are not nested: interval counts must double "
                f"({a.nz - 1}x{a.nt - 1} -> {b.nz - 1}x{b.nt - 1})")
        if a.length != b.length or a.t_max != b.t_max:
            raise ConfigError("grids must share the physical domain")
    values = np.array([run(g) for g in grids], dtype=float)
    diffs = np.abs(np.diff(values))
    orders = np.log2(diffs[:-1] / diffs[1:])
    p = orders[-1]
    extrap = values[-1] + (values[-1] - values[-2]) / (2.0**p - 1.0)
    return ConvergenceReport(grids=list(grids), values=values,
                             orders=orders, extrapolated=float(extrap))
