"""Config-driven experiment runner: solver runs vs closed-form predictions.

A scenario config is one JSON document with blocks {constants, scheme,
medium, signals, controls, grid, scenario, output}; every physical value
in atomic units, angles in radians.  Each scenario kind runs the solver,
computes the matching analytic predictions, writes plot-ready CSVs and a
machine-readable comparison report.
"""
from __future__ import annotations

import cmath
import copy
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError
from .model import (AU, Detunings, LevelScheme, MediumSpec, normalize_control,
                    normalize_signal, resonant_scheme)
from .polaritons import (MixingAngles, asymptotic_prediction,
                         peak_position, stored_profile, transit_delay)
from .pulses import ControlSchedule, PulseSpec, eval_control, eval_pulse
from .solver import (FULL, REDUCED, FieldHistory, Grid, effective_rate,
                     simulate_full, simulate_reduced)
from .susceptibility import chi_matrix, default_omega_grid, write_csv as write_chi_csv
from .units import PhysicalConstants

OUTPUT_DIR_ENV = "DOUBLE_LAMBDA_OUTDIR"

SCENARIO_KINDS = ("smoothing", "transmission", "phase-control",
                  "storage-phase-scan", "storage-profile", "custom")

# default comparison tolerances per scenario kind
DEFAULT_TOLERANCES = {
    "transmission": {"peak_rel": 0.02, "phase_abs": 0.01, "energy_rel": 0.02},
    "phase-control": {"peak_rel": 0.02, "phase_abs": 0.01, "energy_rel": 0.02},
    # the bright-norm bound is frozen from a fine-grid oracle run of the
    # rectangular-pulse scenario (measured 0.25, grid-converged)
    "smoothing": {"bright_norm_ratio": 0.35},
    "storage-phase-scan": {"phase_abs": 0.01, "amp_rel": 0.10},
    "storage-profile": {"amp_rel": 0.03, "width_rel": 0.05},
}

# the center tolerance of the stored profile is two cells of the documented
# default spatial resolution (nz = 400), kept as an absolute yardstick so
# that refining the grid does not shrink the criterion
DEFAULT_NZ = 400


# ---------------------------------------------------------------------------
# comparison report
# ---------------------------------------------------------------------------

@dataclass
class ReportRow:
    name: str
    observed: float
    predicted: float
    tolerance: float
    tol_kind: str = "rel"     # "rel" | "abs" | "less"
    passed: bool = False
    abs_dev: float = 0.0
    rel_dev: float = 0.0

    @classmethod
    def compare(cls, name, observed, predicted, tolerance, tol_kind="rel"):
        observed = float(observed)
        predicted = float(predicted)
        abs_dev = abs(observed - predicted)
        rel_dev = abs_dev / abs(predicted) if predicted != 0 else math.inf
        if tol_kind == "rel":
            ok = rel_dev <= tolerance
        elif tol_kind == "abs":
            ok = abs_dev <= tolerance
        elif tol_kind == "less":
            ok = observed < predicted
        else:
            raise ConfigError(f"unknown tolerance kind {tol_kind!r}")
        return cls(name=name, observed=observed, predicted=predicted,
                   tolerance=tolerance, tol_kind=tol_kind, passed=ok,
                   abs_dev=abs_dev, rel_dev=rel_dev)


@dataclass
class ComparisonReport:
    kind: str
    rows: list = field(default_factory=list)
    config_sha256: str = ""

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def row(self, name: str) -> ReportRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "config_sha256": self.config_sha256,
            "rows": [vars(r) for r in self.rows],
        }


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


@dataclass
class Setup:
    """Validated physical objects built from one config."""

    config: dict
    constants: PhysicalConstants
    scheme: LevelScheme
    detunings: Detunings
    medium: MediumSpec
    signals_physical: tuple          # PulseSpec pair, field units
    controls_physical: tuple         # ControlSchedule pair, field units
    signals: tuple                   # PulseSpec pair, normalized R units
    controls: tuple                  # ControlSchedule pair, normalized U units
    grid: Grid
    kind: str
    scenario: dict
    mode: str
    tolerances: dict

    @property
    def base_u(self):
        """Complex normalized control amplitudes before any switching."""
        u2 = self.controls[0].base_amplitude * cmath.exp(1j * self.controls[0].phase)
        u4 = self.controls[1].base_amplitude * cmath.exp(1j * self.controls[1].phase)
        return u2, u4

    @property
    def angles0(self) -> MixingAngles:
        return MixingAngles.from_controls(*self.base_u)

    def u_total_sq(self, t):
        u2 = np.abs(eval_control(self.controls[0], t))
        u4 = np.abs(eval_control(self.controls[1], t))
        return u2**2 + u4**2

    def cos2_theta_of_t(self, t):
        us = self.u_total_sq(t)
        return us / (1.0 + us)


def _require(block: dict, key: str, where: str):
    if key not in block:
        raise ConfigError(f"missing key {key!r} in {where} block")
    return block[key]


def _pulse_from_config(blk: dict, where: str) -> PulseSpec:
    return PulseSpec(
        shape=_require(blk, "shape", where),
        amplitude=float(_require(blk, "amplitude", where)),
        duration=float(_require(blk, "duration", where)),
        phase=float(blk.get("phase", 0.0)),
        start_time=float(blk.get("start_time", 0.0)),
    )


def _control_from_config(blk: dict, default_ramp: float) -> ControlSchedule:
    off = blk.get("off_time")
    on = blk.get("on_time")
    ramp = blk.get("ramp_width")
    if ramp is None and (off is not None or on is not None):
        ramp = default_ramp
    return ControlSchedule(
        base_amplitude=float(blk["amplitude"]),
        phase=float(blk.get("phase", 0.0)),
        off_time=None if off is None else float(off),
        on_time=None if on is None else float(on),
        ramp_width=None if ramp is None else float(ramp),
    )


def _normalized_pulse(spec: PulseSpec, d, kappa, constants) -> PulseSpec:
    r = normalize_signal(spec.amplitude * cmath.exp(1j * spec.phase), d,
                         kappa, constants)
    return PulseSpec(shape=spec.shape, amplitude=abs(r), duration=spec.duration,
                     phase=cmath.phase(r) if r != 0 else 0.0,
                     start_time=spec.start_time)


def _normalized_control(sched: ControlSchedule, d, kappa_signal,
                        constants) -> ControlSchedule:
    u = normalize_control(sched.base_amplitude * cmath.exp(1j * sched.phase),
                          d, kappa_signal, constants)
    return ControlSchedule(base_amplitude=abs(u),
                           phase=cmath.phase(u) if u != 0 else 0.0,
                           off_time=sched.off_time, on_time=sched.on_time,
                           ramp_width=sched.ramp_width)


def build_setup(config: dict) -> Setup:
    """Validate a config tree and construct all physical objects."""
    kind = _require(config.get("scenario", {}), "kind", "scenario")
    if kind not in SCENARIO_KINDS:
        raise ConfigError(f"unknown scenario kind {kind!r}; "
                          f"expected one of {SCENARIO_KINDS}")
    scen = config["scenario"]

    cblk = config.get("constants", {})
    constants = PhysicalConstants(
        c=float(cblk.get("c", AU.c)),
        hbar=float(cblk.get("hbar", AU.hbar)),
        eps0=float(cblk.get("eps0", AU.eps0)),
    )

    sblk = _require(config, "scheme", "top level")
    energies = _require(sblk, "energies", "scheme")
    scheme = resonant_scheme(
        E_a=float(energies["a"]), E_b=float(energies["b"]),
        E_c=float(energies["c"]), E_d=float(energies["d"]),
        Gamma_a=float(_require(sblk, "gamma_a", "scheme")),
        Gamma_d=float(_require(sblk, "gamma_d", "scheme")),
        gamma_bc=float(sblk.get("gamma_bc", 0.0)),
        constants=constants,
        width_convention=sblk.get("width_convention", "total-split"),
        dipole_phases=tuple(sblk.get("dipole_phases", (0.0, 0.0, 0.0, 0.0))),
    )
    detunings = Detunings.from_scheme(scheme, constants)

    mblk = _require(config, "medium", "top level")
    medium = MediumSpec.from_scheme(
        scheme, float(_require(mblk, "density", "medium")),
        float(_require(mblk, "length", "medium")), constants)

    sig_blks = _require(config, "signals", "top level")
    ctl_blks = _require(config, "controls", "top level")
    if len(sig_blks) != 2 or len(ctl_blks) != 2:
        raise ConfigError("need exactly two signals and two controls")
    signals_phys = tuple(_pulse_from_config(b, "signals") for b in sig_blks)
    default_ramp = max(s.duration for s in signals_phys) / 20.0
    controls_phys = tuple(_control_from_config(b, default_ramp)
                          for b in ctl_blks)

    mode = scen.get("mode", REDUCED if kind == "storage-profile" else FULL)
    if mode not in (REDUCED, FULL):
        raise ConfigError(f"unknown solver mode {mode!r}")

    # normalized solver inputs; signal 3 with zero amplitude keeps phase 0
    sig_n = (
        _normalized_pulse(signals_phys[0], scheme.d1, medium.kappa1, constants),
        _normalized_pulse(signals_phys[1], scheme.d3, medium.kappa3, constants),
    )
    ctl_n = (
        _normalized_control(controls_phys[0], scheme.d2, medium.kappa1, constants),
        _normalized_control(controls_phys[1], scheme.d4, medium.kappa3, constants),
    )

    # optional equalization rewrites (exact, in normalized units)
    if scen.get("equalize_controls"):
        ctl_n = (ctl_n[0], ControlSchedule(
            base_amplitude=ctl_n[0].base_amplitude, phase=ctl_n[1].phase,
            off_time=ctl_n[1].off_time, on_time=ctl_n[1].on_time,
            ramp_width=ctl_n[1].ramp_width))
    if scen.get("equalize_signals"):
        sig_n = (sig_n[0], PulseSpec(
            shape=sig_n[1].shape, amplitude=sig_n[0].amplitude,
            duration=sig_n[1].duration, phase=sig_n[1].phase,
            start_time=sig_n[1].start_time))
    if scen.get("match_signals_to_controls"):
        u2, u4 = (ctl_n[0].base_amplitude * cmath.exp(1j * ctl_n[0].phase),
                  ctl_n[1].base_amplitude * cmath.exp(1j * ctl_n[1].phase))
        if u2 == 0:
            raise ConfigError("cannot match signals with a vanishing control 2")
        ratio = u4 / u2
        r1 = sig_n[0].amplitude * cmath.exp(1j * sig_n[0].phase)
        r3 = r1 * ratio
        sig_n = (sig_n[0], PulseSpec(
            shape=sig_n[0].shape, amplitude=abs(r3),
            duration=sig_n[0].duration,
            phase=cmath.phase(r3) if r3 != 0 else 0.0,
            start_time=sig_n[0].start_time))

    grid = _build_grid(config.get("grid", {}), kind, scen, medium,
                       sig_n, ctl_n, constants,
                       detunings if mode == FULL else None)

    tolerances = dict(DEFAULT_TOLERANCES.get(kind, {}))
    tolerances.update(scen.get("tolerances", {}))

    return Setup(config=config, constants=constants, scheme=scheme,
                 detunings=detunings, medium=medium,
                 signals_physical=signals_phys, controls_physical=controls_phys,
                 signals=sig_n, controls=ctl_n, grid=grid, kind=kind,
                 scenario=scen, mode=mode, tolerances=tolerances)


def _build_grid(gblk: dict, kind: str, scen: dict, medium: MediumSpec,
                signals, controls, constants, detunings=None) -> Grid:
    nz = int(gblk.get("nz") or DEFAULT_NZ)
    t_max = gblk.get("t_max")
    if t_max is None:
        if kind in ("storage-phase-scan", "storage-profile"):
            offs = [c.off_time for c in controls if c.off_time is not None]
            if not offs:
                raise ConfigError(f"{kind} scenario needs controls with off_time")
            ramps = [c.ramp_width for c in controls if c.ramp_width]
            t_max = max(offs) + 8.0 * max(ramps)
        else:
            duration = max(s.start_time + s.duration for s in signals)
            u2 = controls[0].base_amplitude
            u4 = controls[1].base_amplitude
            usq = u2 * u2 + u4 * u4
            v = constants.c * usq / (1.0 + usq) if usq > 0 else 0.0
            transit = medium.length / v if v > 0 else 0.0
            t_max = 3.0 * duration + transit
    t_max = float(t_max)

    nt = gblk.get("nt")
    if nt is None:
        rate = effective_rate(medium, controls,
                              detunings or Detunings.resonant())
        nt = max(4000, int(math.ceil(t_max * 20.0 * rate)) + 1)
    return Grid(nz=nz, nt=int(nt), length=medium.length, t_max=t_max)


# ---------------------------------------------------------------------------
# csv helpers
# ---------------------------------------------------------------------------

def _csv_header(setup: Setup) -> str:
    return (f"# config_sha256: {config_hash(setup.config)}\n"
            f"# grid: nz={setup.grid.nz} nt={setup.grid.nt} "
            f"length={setup.grid.length!r} t_max={setup.grid.t_max!r}\n"
            f"# mode: {setup.mode}\n")


def _write_table(path: Path, setup: Setup, columns: dict) -> None:
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    with open(path, "w", encoding="utf-8") as f:
        f.write(_csv_header(setup))
        f.write(",".join(names) + "\n")
        for i in range(len(arrays[0])):
            f.write(",".join(repr(float(a[i])) for a in arrays) + "\n")


def _dump_depth_histories(outdir: Path, setup: Setup,
                          hist: FieldHistory) -> list:
    paths = []
    for j, z in enumerate(hist.record_z):
        p = outdir / f"depth_{j:02d}.csv"
        _write_table(p, setup, {
            "t_prime": hist.t,
            "re_r1": hist.r1[j].real, "im_r1": hist.r1[j].imag,
            "re_r3": hist.r3[j].real, "im_r3": hist.r3[j].imag,
            "re_sigma_bc": hist.sigma_bc[j].real,
            "im_sigma_bc": hist.sigma_bc[j].imag,
        })
        paths.append(p)
    return paths


# ---------------------------------------------------------------------------
# analytics (no solver)
# ---------------------------------------------------------------------------

def predicted_transmission(setup: Setup, t: np.ndarray):
    """Asymptotic transmitted envelopes at the exit face, on lab-entry times
    shifted by the dark-polariton transit delay (exact closed-form inputs).
    Returns (r1, r3, sigma_bc) complex arrays."""
    angles = setup.angles0
    delay = transit_delay(setup.medium.length, angles, setup.constants)
    r1_in = np.asarray(eval_pulse(setup.signals[0], t - delay), complex)
    r3_in = np.asarray(eval_pulse(setup.signals[1], t - delay), complex)
    return asymptotic_prediction(r1_in, r3_in, angles)


def predicted_storage(setup: Setup, t: np.ndarray):
    """Asymptotic stored coherence for switched-off controls."""
    angles0 = setup.angles0
    final = MixingAngles(theta=math.pi / 2.0, phi=angles0.phi,
                         arg_u2=angles0.arg_u2, arg_u4=angles0.arg_u4)
    r1_in = np.asarray(eval_pulse(setup.signals[0], t), complex)
    r3_in = np.asarray(eval_pulse(setup.signals[1], t), complex)
    return asymptotic_prediction(r1_in, r3_in, angles0, final)


def write_prediction_tables(setup: Setup, outdir: Path) -> list:
    """The `predict` product: analytic tables only, never the PDE."""
    outdir.mkdir(parents=True, exist_ok=True)
    t = np.linspace(0.0, setup.grid.t_max, 2001)
    paths = []
    if setup.kind in ("storage-phase-scan", "storage-profile"):
        r1p, r3p, sg = predicted_storage(setup, t)
        p = outdir / "predicted_storage.csv"
        _write_table(p, setup, {
            "t": t,
            "abs_r1": np.abs(r1p), "arg_r1": np.angle(r1p),
            "abs_r3": np.abs(r3p), "arg_r3": np.angle(r3p),
            "abs_sigma_bc": np.abs(sg), "arg_sigma_bc": np.angle(sg),
        })
        paths.append(p)
    else:
        r1p, r3p, sg = predicted_transmission(setup, t)
        p = outdir / "predicted_transmission.csv"
        _write_table(p, setup, {
            "t_prime": t,
            "abs_r1": np.abs(r1p), "arg_r1": np.angle(r1p),
            "abs_r3": np.abs(r3p), "arg_r3": np.angle(r3p),
            "abs_sigma_bc": np.abs(sg), "arg_sigma_bc": np.angle(sg),
        })
        paths.append(p)
    return paths


def write_susceptibility_tables(setup: Setup, outdir: Path) -> list:
    """chi matrix on the default sideband grid for this configuration."""
    outdir.mkdir(parents=True, exist_ok=True)
    u2, u4 = setup.base_u
    om2 = u2 * setup.medium.kappa1
    om4 = u4 * setup.medium.kappa3
    sus_blk = setup.config.get("susceptibility", {})
    n = int(sus_blk.get("n", 2001))
    omega = default_omega_grid(om2, om4, n=n)
    mat = chi_matrix(omega, setup.detunings, om2, om4, setup.scheme,
                     setup.medium.density, setup.constants)
    p = outdir / "susceptibility.csv"
    write_chi_csv(p, mat)
    return [p]


# ---------------------------------------------------------------------------
# scenario implementations
# ---------------------------------------------------------------------------

def _total_variation(x: np.ndarray) -> float:
    return float(np.sum(np.abs(np.diff(x))))


def _peak(t: np.ndarray, y: np.ndarray):
    i = int(np.argmax(np.abs(y)))
    return i, float(np.abs(y[i])), float(np.angle(y[i])), float(t[i])


def _wrap_angle(a: float) -> float:
    return float(np.angle(np.exp(1j * a)))


def _run_solver(setup: Setup, record_depths=None) -> FieldHistory:
    if setup.mode == REDUCED:
        return simulate_reduced(setup.medium, setup.controls, setup.signals,
                                setup.grid, record_depths=record_depths)
    return simulate_full(setup.medium, setup.scheme, setup.detunings,
                         setup.controls, setup.signals, setup.grid,
                         record_depths=record_depths)


def _transmission_rows(setup: Setup, hist: FieldHistory, report, outdir):
    t = hist.t
    jL = hist.row(setup.medium.length)
    r1_out, r3_out = hist.r1[jL], hist.r3[jL]
    r1_pred, r3_pred, _ = predicted_transmission(setup, t)
    tol = setup.tolerances

    i1, h1, p1, t1 = _peak(t, r1_out)
    i3, h3, p3, t3 = _peak(t, r3_out)
    _, h1p, p1p, t1p = _peak(t, r1_pred)
    _, h3p, p3p, t3p = _peak(t, r3_pred)
    report.rows.append(ReportRow.compare(
        "transmitted_peak_1", h1, h1p, tol["peak_rel"], "rel"))
    report.rows.append(ReportRow.compare(
        "transmitted_peak_3", h3, h3p, tol["peak_rel"], "rel"))
    report.rows.append(ReportRow.compare(
        "transmitted_phase_1", _wrap_angle(p1 - p1p), 0.0,
        tol["phase_abs"], "abs"))
    report.rows.append(ReportRow.compare(
        "transmitted_phase_3", _wrap_angle(p3 - p3p), 0.0,
        tol["phase_abs"], "abs"))
    # absorptive filtering in the full mode shifts the transmitted peak by
    # a fraction of a percent of the transit; compare at the 2% level.  A
    # nearly cancelled output (destructive phase choice) has no meaningful
    # peak location, so the row applies only to healthy transmission.
    in_peak = float(np.max(np.abs(hist.r1[0])))
    if h1p >= 0.2 * in_peak:
        report.rows.append(ReportRow.compare(
            "peak_delay_1", t1, t1p,
            max(0.02 * t1p, 3.0 * setup.grid.dt), "abs"))
    e_in = np.trapezoid(np.abs(hist.r1[0])**2 + np.abs(hist.r3[0])**2, t)
    e_out = np.trapezoid(np.abs(r1_out)**2 + np.abs(r3_out)**2, t)
    e_pred = np.trapezoid(np.abs(r1_pred)**2 + np.abs(r3_pred)**2, t)
    report.rows.append(ReportRow.compare(
        "transmitted_energy", e_out / e_in, e_pred / e_in,
        tol["energy_rel"], "rel"))

    _write_table(outdir / "transmitted.csv", setup, {
        "t_prime": t,
        "abs_r1": np.abs(r1_out), "arg_r1": np.angle(r1_out),
        "abs_r3": np.abs(r3_out), "arg_r3": np.angle(r3_out),
        "abs_r1_pred": np.abs(r1_pred), "abs_r3_pred": np.abs(r3_pred),
    })


def _smoothing_rows(setup: Setup, hist: FieldHistory, report, outdir):
    t = hist.t
    tol = setup.tolerances
    if setup.controls[1].base_amplitude != 0 or setup.signals[1].amplitude != 0:
        raise ConfigError("the smoothing scenario models a single-Lambda "
                          "system: control 4 and signal 3 must vanish")
    u2 = setup.controls[0].base_amplitude
    st = 1.0 / math.sqrt(u2 * u2 + 1.0)
    ct = u2 / math.sqrt(u2 * u2 + 1.0)

    tvs, slopes, bright = [], [], []
    for j in range(len(hist.record_z)):
        mag = np.abs(hist.r1[j])
        tvs.append(_total_variation(mag))
        slopes.append(float(np.max(np.abs(np.diff(mag))) / setup.grid.dt))
        # bright polariton of the single-Lambda system
        y1 = hist.r1[j] * np.exp(-1j * setup.controls[0].phase)
        phi_b = st * y1 + ct * hist.sigma_bc[j]
        bright.append(float(np.sqrt(np.trapezoid(np.abs(phi_b)**2, t))))

    tv_ratio = max(tvs[j + 1] / tvs[j] for j in range(len(tvs) - 1))
    report.rows.append(ReportRow.compare(
        "tv_monotone_max_ratio", tv_ratio, 1.0, 0.0, "less"))
    slope_ratio = max(slopes[j + 1] / slopes[j] for j in range(len(slopes) - 1))
    report.rows.append(ReportRow.compare(
        "edge_slope_max_ratio", slope_ratio, 1.0, 0.0, "less"))
    report.rows.append(ReportRow.compare(
        "bright_norm_ratio", bright[-1] / bright[0],
        tol["bright_norm_ratio"], 0.0, "less"))

    _write_table(outdir / "depth_summary.csv", setup, {
        "z": hist.record_z,
        "tv": np.array(tvs),
        "max_slope": np.array(slopes),
        "bright_l2": np.array(bright),
    })


def _storage_phase_rows(setup: Setup, hist: FieldHistory, report, outdir):
    tol = setup.tolerances
    prof = np.abs(hist.sigma_end)
    i = int(np.argmax(prof))
    observed = float(np.angle(hist.sigma_end[i]))

    t = hist.t
    _, _, sg_pred = predicted_storage(setup, t)
    ip = int(np.argmax(np.abs(sg_pred)))
    predicted = float(np.angle(sg_pred[ip]))
    report.rows.append(ReportRow.compare(
        "stored_phase_dev", _wrap_angle(observed - predicted), 0.0,
        tol["phase_abs"], "abs"))

    # stored amplitude at the readout depth, from the frozen-profile map
    amp_prof = stored_profile(
        hist.grid.z, lambda tt: np.abs(_dark_projection(setup, tt)),
        setup.angles0, setup.cos2_theta_of_t, setup.grid.t_max,
        setup.constants)
    report.rows.append(ReportRow.compare(
        "stored_amp_at_peak", prof[i], amp_prof[i], tol["amp_rel"], "rel"))
    _write_table(outdir / "stored_profile.csv", setup, {
        "z": hist.grid.z, "abs_sigma_bc": prof,
        "arg_sigma_bc": np.angle(hist.sigma_end),
        "abs_sigma_pred": amp_prof,
    })


def _dark_projection(setup: Setup, t):
    """cos(theta0) * dark amplitude of the input envelopes at entry."""
    a = setup.angles0
    r1 = np.asarray(eval_pulse(setup.signals[0], t), complex)
    r3 = np.asarray(eval_pulse(setup.signals[1], t), complex)
    return (math.cos(a.phi) * np.exp(-1j * a.arg_u2) * r1
            + math.sin(a.phi) * np.exp(-1j * a.arg_u4) * r3)


def _storage_profile_rows(setup: Setup, hist: FieldHistory, report, outdir):
    tol = setup.tolerances
    zg = hist.grid.z
    prof = np.abs(hist.sigma_end)
    ipk = int(np.argmax(prof))
    angles0 = setup.angles0

    # zero-fit predictions: amplitude, width, center
    amp_pred = float(np.max(np.abs(_dark_projection(
        setup, np.linspace(0.0, setup.grid.t_max, 8 * setup.grid.nt))))
        / math.cos(angles0.theta))
    duration = setup.signals[0].duration
    width_pred = setup.constants.c * duration * angles0.cos2_theta
    entry = setup.signals[0].start_time + 0.5 * duration
    offs = [c.off_time for c in setup.controls if c.off_time is not None]
    center_pred = peak_position(setup.grid.t_max, entry,
                                setup.cos2_theta_of_t, setup.constants,
                                points=offs)

    half = prof[ipk] / 2.0
    above = np.nonzero(prof >= half)[0]
    li, ri = above[0], above[-1]
    if li == 0 or ri == len(prof) - 1:
        raise ConfigError("stored profile touches the sample boundary; "
                          "use a longer sample or an earlier switch-off")

    def crossing(i0, i1):
        y0, y1 = prof[i0], prof[i1]
        return zg[i0] + (half - y0) * (zg[i1] - zg[i0]) / (y1 - y0)

    zl, zr = crossing(li - 1, li), crossing(ri, ri + 1)
    width_meas = 2.0 * (zr - zl)       # FWHM of sine-square is half its width
    center_meas = 0.5 * (zl + zr)

    center_tol = 2.0 * setup.medium.length / (DEFAULT_NZ - 1)
    report.rows.append(ReportRow.compare(
        "stored_amplitude", prof[ipk], amp_pred, tol["amp_rel"], "rel"))
    report.rows.append(ReportRow.compare(
        "stored_width", width_meas, width_pred, tol["width_rel"], "rel"))
    report.rows.append(ReportRow.compare(
        "stored_center", center_meas, center_pred, center_tol, "abs"))

    pred_prof = stored_profile(
        zg, lambda tt: np.abs(_dark_projection(setup, tt)),
        angles0, setup.cos2_theta_of_t, setup.grid.t_max, setup.constants)
    _write_table(outdir / "stored_profile.csv", setup, {
        "z": zg, "abs_sigma_bc": prof, "abs_sigma_pred": pred_prof,
    })


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

@dataclass
class ScenarioResult:
    report: ComparisonReport
    outdir: Path
    artifacts: list
    history: Optional[FieldHistory] = None


def resolve_outdir(config: dict, outdir=None) -> Path:
    if outdir is not None:
        return Path(outdir)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env)
    return Path(config.get("output", {}).get("directory", "out"))


def run_scenario(config: dict, outdir=None) -> ScenarioResult:
    """Run one scenario: solver, analytics, CSV artifacts, report."""
    setup = build_setup(config)
    out = resolve_outdir(config, outdir)
    out.mkdir(parents=True, exist_ok=True)

    record_depths = setup.scenario.get("record_depths")
    if setup.kind == "smoothing" and record_depths is None:
        raise ConfigError("smoothing scenario needs scenario.record_depths")

    report = ComparisonReport(kind=setup.kind,
                              config_sha256=config_hash(config))
    hist = _run_solver(setup, record_depths=record_depths)

    if setup.kind in ("transmission", "phase-control"):
        _transmission_rows(setup, hist, report, out)
    elif setup.kind == "smoothing":
        _smoothing_rows(setup, hist, report, out)
    elif setup.kind == "storage-phase-scan":
        _storage_phase_rows(setup, hist, report, out)
    elif setup.kind == "storage-profile":
        _storage_profile_rows(setup, hist, report, out)
    # custom: no comparisons

    artifacts = _dump_depth_histories(out, setup, hist)
    with open(out / "report.json", "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
    with open(out / "report.csv", "w", encoding="utf-8") as f:
        f.write(_csv_header(setup))
        f.write("name,observed,predicted,abs_dev,rel_dev,tolerance,"
                "tol_kind,passed\n")
        for r in report.rows:
            f.write(f"{r.name},{r.observed!r},{r.predicted!r},{r.abs_dev!r},"
                    f"{r.rel_dev!r},{r.tolerance!r},{r.tol_kind},"
                    f"{int(r.passed)}\n")
    with open(out / "config.json", "w", encoding="utf-8") as f:
        json.dump(config, f, indent=2, sort_keys=True)
    artifacts += [out / "report.json", out / "report.csv", out / "config.json"]
    return ScenarioResult(report=report, outdir=out, artifacts=artifacts,
                          history=hist)


def load_report(outdir) -> ComparisonReport:
    path = Path(outdir) / "report.json"
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"no report.json under {outdir}") from None
    rep = ComparisonReport(kind=data["kind"],
                           config_sha256=data.get("config_sha256", ""))
    for row in data["rows"]:
        rep.rows.append(ReportRow(**row))
    return rep


def set_config_value(config: dict, param_path: str, value) -> dict:
    """Return a copy of the config with one dotted-path scalar replaced."""
    out = copy.deepcopy(config)
    node = out
    parts = param_path.split(".")
    try:
        for key in parts[:-1]:
            node = node[int(key)] if isinstance(node, list) else node[key]
        leaf = int(parts[-1]) if isinstance(node, list) else parts[-1]
        existing = node[leaf]
    except (KeyError, IndexError, ValueError, TypeError) as exc:
        raise ConfigError(f"cannot resolve parameter path {param_path!r}: "
                          f"{exc}") from None
    if isinstance(existing, (dict, list)):
        raise ConfigError(f"{param_path!r} does not address a scalar")
    node[leaf] = value
    return out


def scan(config: dict, param_path: str, values, outdir=None,
         max_workers: Optional[int] = None):
    """Independent scenario runs over a list of parameter values.

    Failures of single runs are recorded and do not stop the scan.
    Returns a list of (value, report-or-exception) in input order and
    writes an aggregate CSV.
    """
    if not values:
        raise ConfigError("scan needs a non-empty list of values")
    out = resolve_outdir(config, outdir)
    out.mkdir(parents=True, exist_ok=True)

    def one(iv):
        i, v = iv
        cfg = set_config_value(config, param_path, v)
        try:
            res = run_scenario(cfg, out / f"value_{i:03d}")
            return v, res.report
        except Exception as exc:   # noqa: BLE001 - recorded, scan continues
            return v, exc

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(one, enumerate(values)))

    names = []
    for _, rep in results:
        if isinstance(rep, ComparisonReport):
            names = [r.name for r in rep.rows]
            break
    with open(out / "scan.csv", "w", encoding="utf-8") as f:
        f.write(f"# param: {param_path}\n")
        f.write("value,status," + ",".join(
            f"{n}_observed,{n}_predicted,{n}_passed" for n in names) + "\n")
        for v, rep in results:
            if isinstance(rep, ComparisonReport):
                cells = [repr(float(v)), "ok"]
                for r in rep.rows:
                    cells += [repr(r.observed), repr(r.predicted),
                              str(int(r.passed))]
            else:
                cells = [repr(float(v)), f"error:{type(rep).__name__}"]
            f.write(",".join(cells) + "\n")
    return results
