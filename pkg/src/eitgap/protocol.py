"""Storage -> release-into-bandgap -> trap -> release scenarios.

A scenario stores a forward pulse as a Raman coherence (control ramps off),
holds it dark, switches the standing wave on, then restores the control field
at a possibly different amplitude, releasing the pulse into the bandgap where
it cycles between forward and backward components.  The module also evaluates
every validity inequality that bounds how long such trapping can last.

The standing wave must switch on before (or together with) the control field
at release; schedules violating that order are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import SPEED_OF_LIGHT
from .dynamics import GridSpec, PolaritonState, Snapshot, Trace, evolve, gaussian_state
from .errors import NumericalError, ValidationError
from .medium import (
    DriveSchedule,
    MediumParams,
    Ramp,
    group_velocity,
    light_shift_amplitude,
    mixing_angle,
)

__all__ = [
    "Scenario",
    "ValidityCheck",
    "ValidityReport",
    "ProtocolMetrics",
    "ProtocolResult",
    "build_schedule",
    "validate_release_order",
    "run_protocol",
    "validity_report",
    "oscillation_period",
]


@dataclass(frozen=True)
class Scenario:
    """Complete description of one trapping run.

    Stage times are strictly increasing: the control ramps to zero by
    ``t_store``, the medium stays dark until ``t_hold``, the standing wave
    and then the control ramp up within [t_hold, t_release], the gap holds
    until ``t_trap_end``, and the standing wave ramps off afterwards.  The
    pulse (unit norm, intensity RMS width ``pulse_rms``, duration
    ``pulse_duration``) starts entirely inside the medium span, which is
    centered in the periodic grid.
    """

    medium: MediumParams
    grid: GridSpec
    delta: float
    pulse_center: float
    pulse_rms: float
    pulse_duration: float
    t_store: float
    t_hold: float
    t_release: float
    t_trap_end: float
    t_final: float
    omega_c_in: float
    omega_c_0: float
    omega_s_max: float
    delta_k: float = 0.0
    margin_large: float = 10.0
    margin_small: float = 0.1
    dt_slow: float | None = None
    dt_fast: float | None = None

    def __post_init__(self):
        times = (0.0, self.t_store, self.t_hold, self.t_release, self.t_trap_end, self.t_final)
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError("stage times must be strictly increasing and positive")
        if self.pulse_rms <= 0 or self.pulse_duration <= 0:
            raise ValidationError("pulse width and duration must be > 0")
        if self.omega_c_in <= 0:
            raise ValidationError("omega_c_in must be > 0 (input stage needs a moving pulse)")
        if self.omega_c_0 <= 0:
            raise ValidationError("omega_c_0 must be > 0 (release stage needs a control field)")
        if self.omega_s_max < 0:
            raise ValidationError("omega_s_max must be >= 0")
        lo, hi = self.medium_span
        if self.pulse_center - 3.0 * self.pulse_rms < lo or self.pulse_center + 3.0 * self.pulse_rms > hi:
            raise ValidationError("pulse (3 RMS widths) must start inside the medium span")
        span = self.grid.z_max - self.grid.z_min
        if span < 4.0 * self.medium.length:
            raise ValidationError("periodic domain must be at least 4x the medium length")

    @property
    def medium_span(self) -> tuple[float, float]:
        center = 0.5 * (self.grid.z_min + self.grid.z_max)
        half = 0.5 * self.medium.length
        return center - half, center + half

    @property
    def k_s(self) -> float:
        return self.medium.carrier_wavenumber + self.delta_k

    @property
    def trap_window(self) -> float:
        return self.t_trap_end - self.t_release

    @property
    def shift_amplitude(self) -> float:
        return light_shift_amplitude(self.omega_s_max, self.delta)


def build_schedule(scenario: Scenario) -> DriveSchedule:
    """Assemble the drive ramps implied by the stage times.

    The control holds its input value over the first half of [0, t_store]
    and ramps smoothly to zero over the second half.  At release the
    standing wave ramps up over [t_hold, t_mid] and only then does the
    control ramp up over [t_mid, t_release], which keeps the coupling rate
    independent of stretched time during switch-on.
    """
    s = scenario
    t_mid = 0.5 * (s.t_hold + s.t_release)
    ramp_out = min(0.5 * (s.t_release - s.t_hold), 0.5 * (s.t_final - s.t_trap_end))
    omega_c = Ramp.from_points(
        [
            (0.0, s.omega_c_in),
            (0.5 * s.t_store, s.omega_c_in),
            (s.t_store, 0.0),
            (t_mid, 0.0),
            (s.t_release, s.omega_c_0),
            (s.t_final, s.omega_c_0),
        ]
    )
    omega_s = Ramp.from_points(
        [
            (0.0, 0.0),
            (s.t_hold, 0.0),
            (t_mid, s.omega_s_max),
            (s.t_trap_end, s.omega_s_max),
            (s.t_trap_end + ramp_out, 0.0),
            (s.t_final, 0.0),
        ]
    )
    schedule = DriveSchedule(omega_c, omega_s, s.delta, s.k_s, s.delta_k)
    validate_release_order(schedule, s.t_store, s.t_final)
    return schedule


def validate_release_order(schedule: DriveSchedule, t_start: float, t_end: float) -> None:
    """Reject release schedules that switch the control on before the grating.

    Probes [t_start, t_end]; schedules that never use the standing wave pass.
    """
    probe = np.linspace(t_start, t_end, 4097)
    ws = np.asarray(schedule.omega_s(probe))
    wc = np.asarray(schedule.omega_c(probe))
    if not np.any(ws > 0.0):
        return
    s_on = probe[ws > 0.0]
    c_on = probe[wc > 0.0]
    if len(c_on) and s_on[0] > c_on[0]:
        raise ValidationError("standing wave must switch on before or with the control field")


@dataclass(frozen=True)
class ValidityCheck:
    """One inequality with its margin-aware verdict.

    ``kind`` is ``much_greater`` (value >> bound, pass when value/bound is at
    least margin_large), ``much_less`` (value << bound, pass when value/bound
    is at most margin_small) or ``at_most`` (value <~ bound, pass when
    value <= bound).  ``warn`` marks the band where the raw inequality holds
    but the margin does not.
    """

    name: str
    kind: str
    value: float
    bound: float
    ratio: float
    status: str


@dataclass(frozen=True)
class ValidityReport:
    checks: tuple[ValidityCheck, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    @property
    def failures(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.checks if c.status == "fail")

    def check(self, name: str) -> ValidityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _judge(name: str, kind: str, value: float, bound: float, margin_large: float, margin_small: float) -> ValidityCheck:
    ratio = 0.0 if math.isinf(bound) else (math.inf if bound == 0.0 else value / bound)
    if kind == "much_greater":
        status = "pass" if ratio >= margin_large else ("warn" if ratio > 1.0 else "fail")
    elif kind == "much_less":
        status = "pass" if ratio <= margin_small else ("warn" if ratio < 1.0 else "fail")
    elif kind == "at_most":
        status = "pass" if ratio <= 1.0 else "fail"
    else:
        raise ValidationError(f"unknown check kind '{kind}'")
    return ValidityCheck(name, kind, value, bound, ratio, status)


def validity_report(scenario: Scenario) -> ValidityReport:
    """Evaluate every trapping-validity inequality for the scenario.

    The checks cover: the pulse-bandwidth condition (shift * duration must
    dominate the released/input group-velocity ratio), the distortion bound
    on the trapping time, the optical-depth limit and the Raman-lifetime
    limit on the interaction time, the transparency-window condition on the
    modulation depth, and the geometric requirement that the slowed pulse
    fit inside the medium.
    """
    s = scenario
    shift = abs(s.shift_amplitude)
    v_in = group_velocity(s.omega_c_in, s.medium)
    v_out = group_velocity(s.omega_c_0, s.medium)
    t_int = s.trap_window
    T = s.pulse_duration
    g2n = s.medium.coupling**2
    gamma_ab = s.medium.gamma_ab
    gamma_bc = s.medium.gamma_bc

    od_bound = math.inf
    if gamma_ab > 0.0:
        od_bound = (g2n / gamma_ab) * (s.medium.length / SPEED_OF_LIGHT) * (v_in / v_out) * T
    raman_bound = math.inf if gamma_bc == 0.0 else 1.0 / gamma_bc
    window_bound = math.inf if gamma_ab == 0.0 else s.omega_c_0**2 / gamma_ab

    checks = (
        _judge("pulse_bandwidth", "much_greater", shift * T, v_out / v_in, s.margin_large, s.margin_small),
        _judge("distortion", "much_less", t_int / T, shift * T * (v_in / v_out) ** 2, s.margin_large, s.margin_small),
        _judge("optical_depth_time", "at_most", t_int, od_bound, s.margin_large, s.margin_small),
        _judge("raman_lifetime", "at_most", t_int, raman_bound, s.margin_large, s.margin_small),
        _judge("transparency_window", "much_less", shift, window_bound, s.margin_large, s.margin_small),
        _judge("pulse_fits_medium", "at_most", v_in * T, s.medium.length, s.margin_large, s.margin_small),
    )
    return ValidityReport(checks)


def oscillation_period(tau: np.ndarray, forward_fraction: np.ndarray) -> float:
    """Dominant oscillation period of the forward fraction, in stretched time.

    Spectral estimate with parabolic peak refinement; returns nan when fewer
    than two full cycles fit in the record.
    """
    if len(tau) < 16:
        return math.nan
    dt = float(np.mean(np.diff(tau)))
    if dt <= 0:
        return math.nan
    y = forward_fraction - np.mean(forward_fraction)
    power = np.abs(np.fft.rfft(y)) ** 2
    if len(power) < 4:
        return math.nan
    i = int(np.argmax(power[1:])) + 1
    if i <= 0 or power[i] == 0.0:
        return math.nan
    if 1 <= i < len(power) - 1:
        a, b, c = power[i - 1], power[i], power[i + 1]
        denom = a - 2.0 * b + c
        shift = 0.0 if denom == 0.0 else 0.5 * (a - c) / denom
        i_ref = i + float(np.clip(shift, -0.5, 0.5))
    else:
        i_ref = float(i)
    freq = i_ref / (len(tau) * dt)
    if freq <= 0.0 or i_ref < 2.0:  # need at least ~2 cycles in the record
        return math.nan
    return 1.0 / freq


@dataclass(frozen=True)
class ProtocolMetrics:
    initial_norm: float
    final_norm: float
    norm_drift: float
    trapped_fraction: float
    in_medium_final: float
    centroid_release: float
    centroid_trap_end: float
    centroid_drift: float
    oscillation_period_tau: float
    expected_period_tau: float


@dataclass
class ProtocolResult:
    scenario: Scenario
    schedule: DriveSchedule
    snapshots: list[Snapshot]
    trace: Trace
    metrics: ProtocolMetrics
    validity: ValidityReport
    wrap_warning: bool


def _in_medium_fraction(state: PolaritonState, span: tuple[float, float], reference_norm: float) -> float:
    z = state.grid.z
    mask = (z >= span[0]) & (z <= span[1])
    intensity = np.abs(state.psi_plus) ** 2 + np.abs(state.psi_minus) ** 2
    return float(intensity[mask].sum() * state.grid.dz / reference_norm)


def _merge_traces(traces: list[Trace]) -> Trace:
    def cat(attr):
        return np.concatenate([getattr(tr, attr) for tr in traces])

    return Trace(cat("t"), cat("tau"), cat("theta"), cat("norm"), cat("forward_norm"), cat("centroid"))


def run_protocol(scenario: Scenario, snapshot_count: int = 160) -> ProtocolResult:
    """Execute the staged schedule and gather trapping metrics.

    Stages run back to back with the step size adapted per stage: quiet
    storage stages use a coarse step, while everything from the first ramp
    onward resolves both the ramp angle change and the coupling rotation.
    """
    s = scenario
    schedule = build_schedule(s)
    shift = abs(s.shift_amplitude)

    T = s.pulse_duration
    ramp = 0.5 * (s.t_release - s.t_hold)
    dt_slow = s.dt_slow or min(T / 256.0, s.t_store / 1024.0)
    dt_fast = s.dt_fast or min(T / 1024.0, ramp / 512.0, (0.05 / shift) if shift > 0 else math.inf)

    state = gaussian_state(s.grid, s.pulse_center, s.pulse_rms)
    initial_norm = state.norm
    span = s.medium_span

    stages = [
        ("store", 0.0, s.t_hold, dt_slow),
        ("release", s.t_hold, s.t_release, dt_fast),
        ("trap", s.t_release, s.t_trap_end, dt_fast),
        ("out", s.t_trap_end, s.t_final, dt_fast),
    ]

    snapshots: list[Snapshot] = []
    traces: list[Trace] = []
    wrap = False
    tau_offset = 0.0
    centroid_release = centroid_trap_end = math.nan
    trapped_fraction = math.nan
    trap_trace: Trace | None = None

    for name, a, b, dt_target in stages:
        n_steps = max(1, int(math.ceil((b - a) / dt_target)))
        dt = (b - a) / n_steps
        snap_stride = max(1, n_steps // max(1, snapshot_count // len(stages)))
        trace_stride = max(1, n_steps // 4096)
        try:
            traj = evolve(state, schedule, s.medium, a, b, dt, snapshot_stride=snap_stride, trace_stride=trace_stride)
        except NumericalError as exc:
            raise NumericalError(str(exc), context=f"stage {name}") from exc
        tr = traj.trace
        tr.tau += tau_offset
        for snap in traj.snapshots if not snapshots else traj.snapshots[1:]:
            snapshots.append(
                Snapshot(snap.time, snap.tau + tau_offset, snap.theta, snap.delta_s, snap.omega_c, snap.omega_s, snap.state)
            )
        traces.append(tr)
        tau_offset += traj.final_tau
        wrap = wrap or traj.wrap_warning
        state = traj.final

        if name == "trap":
            trap_trace = tr
            centroid_trap_end = tr.centroid[-1]
            trapped_fraction = _in_medium_fraction(state, span, initial_norm)
        if name == "release":
            centroid_release = tr.centroid[-1]

    trace = _merge_traces(traces)
    in_medium_final = _in_medium_fraction(state, span, initial_norm)
    final_norm = state.norm
    norm_drift = float(np.max(np.abs(trace.norm - initial_norm)) / initial_norm)

    theta0 = mixing_angle(s.omega_c_0, s.medium)
    chi = shift * math.tan(theta0) ** 2 if shift > 0 else math.nan
    expected_period = math.pi / chi if shift > 0 else math.nan
    measured_period = math.nan
    if trap_trace is not None and shift > 0:
        measured_period = oscillation_period(trap_trace.tau, trap_trace.forward_norm / trap_trace.norm)

    metrics = ProtocolMetrics(
        initial_norm=initial_norm,
        final_norm=final_norm,
        norm_drift=norm_drift,
        trapped_fraction=trapped_fraction,
        in_medium_final=in_medium_final,
        centroid_release=centroid_release,
        centroid_trap_end=centroid_trap_end,
        centroid_drift=abs(centroid_trap_end - centroid_release),
        oscillation_period_tau=measured_period,
        expected_period_tau=expected_period,
    )
    return ProtocolResult(s, schedule, snapshots, trace, metrics, validity_report(s), wrap)
