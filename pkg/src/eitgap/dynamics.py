"""Time evolution of coupled forward/backward dark-state polaritons.

The two polariton envelopes obey, in stretched time tau (d tau = cos^2(theta) dt),

    (d/dtau +- c d/dz) psi_pm = -i * chi * exp(+-2i dk z) * psi_mp,
    chi = shift_amplitude * tan^2(theta),

plus an optional damping of the matter fraction at the Raman decoherence
rate.  One step is Strang-split into an exact local 2x2 coupling rotation
(half step), an exact spectral advection phase (full step), the second
coupling half step, and the damping factor; the only discretization error is
the splitting commutator and the midpoint sampling of time-dependent
coefficients.  Advection is a pure phase in the spatial spectrum, so there is
no CFL restriction; the domain is periodic and should be padded around the
physical medium.

In real time the coupling rate is shift_amplitude * sin^2(theta), which stays
finite (and active) when the control field is off, so the representation is
regular through storage stages.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.fft import fft, ifft
from scipy.integrate import quad

from .constants import SPEED_OF_LIGHT
from .errors import NumericalError, ValidationError
from .medium import DriveSchedule, MediumParams, light_shift_amplitude, mixing_angle

__all__ = [
    "GridSpec",
    "PolaritonState",
    "FieldView",
    "Diagnostics",
    "Snapshot",
    "Trace",
    "Trajectory",
    "gaussian_state",
    "fields_from_polariton",
    "stretched_time",
    "step",
    "analytic_evolution",
    "propagate_spectrum",
    "evolve",
    "measure",
]

#: boundary-zone energy fraction above which a periodic-wrap warning fires
WRAP_FRACTION = 1e-4


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic spatial grid; n_points a power of two, >= 64."""

    z_min: float
    z_max: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 64 or self.n_points & (self.n_points - 1):
            raise ValidationError("n_points must be a power of two >= 64")
        if not self.z_max > self.z_min:
            raise ValidationError("z_max must exceed z_min")

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / self.n_points

    @property
    def z(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, self.dz)


@dataclass(frozen=True)
class PolaritonState:
    """Complex forward/backward envelopes on a grid at one instant."""

    grid: GridSpec
    psi_plus: np.ndarray
    psi_minus: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if len(self.psi_plus) != self.grid.n_points or len(self.psi_minus) != self.grid.n_points:
            raise ValidationError("envelope arrays must match the grid")

    @property
    def norm(self) -> float:
        """Total excitation norm, sum(|psi_+|^2 + |psi_-|^2) dz."""
        return float((np.abs(self.psi_plus) ** 2 + np.abs(self.psi_minus) ** 2).sum() * self.grid.dz)

    def copy(self) -> "PolaritonState":
        return replace(self, psi_plus=self.psi_plus.copy(), psi_minus=self.psi_minus.copy())


@dataclass(frozen=True)
class FieldView:
    """Photonic and matter components of a polariton state."""

    e_plus: np.ndarray
    e_minus: np.ndarray
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray


def gaussian_state(grid: GridSpec, center: float, rms_width: float, time: float = 0.0) -> PolaritonState:
    """Unit-norm forward Gaussian pulse with the given intensity RMS width."""
    if rms_width <= 0:
        raise ValidationError("rms_width must be > 0")
    z = grid.z
    envelope = np.exp(-((z - center) ** 2) / (4.0 * rms_width**2)).astype(complex)
    envelope /= np.sqrt((np.abs(envelope) ** 2).sum() * grid.dz)
    return PolaritonState(grid, envelope, np.zeros_like(envelope), time)


def fields_from_polariton(state: PolaritonState, theta: float) -> FieldView:
    """Dark-state decomposition: E_pm = cos(theta) psi_pm, matter = -sin(theta) psi_pm."""
    if not 0.0 <= theta <= np.pi / 2:
        raise ValidationError("mixing angle must lie in [0, pi/2]")
    ct, st = np.cos(theta), np.sin(theta)
    return FieldView(
        e_plus=ct * state.psi_plus,
        e_minus=ct * state.psi_minus,
        sigma_plus=-st * state.psi_plus,
        sigma_minus=-st * state.psi_minus,
    )


def stretched_time(schedule: DriveSchedule, medium: MediumParams, t0: float, t1: float) -> float:
    """tau = integral of cos^2(theta(t)) dt over [t0, t1], adaptive quadrature."""
    if t1 < t0:
        raise ValidationError("t1 must be >= t0")
    if t1 == t0:
        return 0.0
    g2 = medium.coupling**2

    def weight(t):
        w2 = schedule.omega_c(t) ** 2
        return w2 / (w2 + g2)

    cuts = sorted({t0, t1, *(p for p in schedule.omega_c.breakpoints if t0 < p < t1)})
    budget = 1e-6 * (t1 - t0) / (len(cuts) - 1)
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        val, _ = quad(weight, a, b, epsabs=budget, limit=200)
        total += val
    return total


def _apply_step(psi, k, z, dt, theta, delta_s, delta_k, gamma_bc):
    """One Strang step on the stacked (2, n) array [psi_plus, psi_minus]."""
    cos2 = np.cos(theta) ** 2
    sin2 = 1.0 - cos2
    dtau = cos2 * dt
    half = 0.5 * delta_s * sin2 * dt

    ch, sh = np.cos(half), np.sin(half)
    grating = np.exp(2j * delta_k * z) if delta_k != 0.0 else None

    def couple(arr):
        plus, minus = arr
        if grating is None:
            return np.stack((ch * plus - 1j * sh * minus, ch * minus - 1j * sh * plus))
        return np.stack((
            ch * plus - 1j * sh * grating * minus,
            ch * minus - 1j * sh * np.conj(grating) * plus,
        ))

    psi = couple(psi)
    spec = fft(psi, axis=1)
    advect = np.exp(-1j * k * SPEED_OF_LIGHT * dtau)
    spec[0] *= advect
    spec[1] *= np.conj(advect)
    psi = ifft(spec, axis=1, overwrite_x=True)
    psi = couple(psi)

    if gamma_bc > 0.0:
        psi *= np.exp(-gamma_bc * sin2 * dt)
    return psi


def step(
    state: PolaritonState,
    dt: float,
    theta: float,
    delta_s: float,
    delta_k: float = 0.0,
    gamma_bc: float = 0.0,
) -> PolaritonState:
    """Advance one split step with frozen coefficients."""
    if dt <= 0:
        raise ValidationError("dt must be > 0")
    grid = state.grid
    psi = _apply_step(
        np.stack((state.psi_plus.astype(complex), state.psi_minus.astype(complex))),
        grid.k, grid.z, dt, theta, delta_s, delta_k, gamma_bc,
    )
    if not np.all(np.isfinite(psi)):
        raise NumericalError("non-finite polariton state", context=f"t={state.time:g}")
    return PolaritonState(grid, psi[0], psi[1], state.time + dt)


def propagate_spectrum(plus_k, minus_k, k, tau: float, coupling_rate: float):
    """Exact constant-coefficient propagator per spatial-frequency component.

    Generalizes the closed-form single-sided solution to arbitrary initial
    spectra; with minus_k = 0 it reduces to :func:`analytic_evolution`.
    """
    kc = np.asarray(k) * SPEED_OF_LIGHT
    zeta = np.sqrt(kc**2 + coupling_rate**2)
    cosz = np.cos(zeta * tau)
    # sin(zeta*tau)/zeta, regular at zeta = 0
    sfac = tau * np.sinc(zeta * tau / np.pi)
    out_plus = (cosz - 1j * kc * sfac) * plus_k - 1j * coupling_rate * sfac * minus_k
    out_minus = (cosz + 1j * kc * sfac) * minus_k - 1j * coupling_rate * sfac * plus_k
    return out_plus, out_minus


def analytic_evolution(plus_k0, k, tau: float, coupling_rate: float):
    """Closed-form spectra after stretched time tau from a forward-only start."""
    kc = np.asarray(k) * SPEED_OF_LIGHT
    zeta = np.sqrt(kc**2 + coupling_rate**2)
    sfac = tau * np.sinc(zeta * tau / np.pi)
    plus = (np.cos(zeta * tau) - 1j * kc * sfac) * plus_k0
    minus = -1j * coupling_rate * sfac * plus_k0
    return plus, minus


@dataclass(frozen=True)
class Snapshot:
    time: float
    tau: float
    theta: float
    delta_s: float
    omega_c: float
    omega_s: float
    state: PolaritonState


@dataclass
class Trace:
    """Lightweight per-step diagnostics recorded during :func:`evolve`."""

    t: np.ndarray
    tau: np.ndarray
    theta: np.ndarray
    norm: np.ndarray
    forward_norm: np.ndarray
    centroid: np.ndarray


@dataclass
class Trajectory:
    snapshots: list[Snapshot]
    final: PolaritonState
    final_tau: float
    trace: Trace | None
    wrap_warning: bool


def _centroid(intensity: np.ndarray, z: np.ndarray) -> float:
    total = intensity.sum()
    if total <= 0.0:
        return float(0.5 * (z[0] + z[-1]))
    return float((z * intensity).sum() / total)


def _boundary_fraction(intensity: np.ndarray, z: np.ndarray, width: float) -> float:
    total = intensity.sum()
    if total <= 0.0:
        return 0.0
    # two pulse widths per side, capped so diffuse states keep a usable zone
    margin = min(2.0 * width, 0.125 * (z[-1] - z[0]))
    zone = (z < z[0] + margin) | (z > z[-1] - margin)
    return float(intensity[zone].sum() / total)


def evolve(
    state: PolaritonState,
    schedule: DriveSchedule,
    medium: MediumParams,
    t0: float,
    t1: float,
    dt: float,
    snapshot_stride: int = 0,
    trace_stride: int = 0,
) -> Trajectory:
    """Integrate from t0 to t1 with coefficients sampled at step midpoints.

    ``dt`` must divide the interval.  Snapshots (full state copies plus the
    schedule values) are recorded every ``snapshot_stride`` steps when the
    stride is positive, always including the initial and final states; the
    optional trace records norms and the centroid every ``trace_stride``
    steps.  A warning fires if more than ``WRAP_FRACTION`` of the energy
    reaches within two RMS widths of the periodic boundary.
    """
    if not t1 > t0:
        raise ValidationError("t1 must exceed t0")
    span = t1 - t0
    n_steps = int(round(span / dt))
    if n_steps < 1 or abs(n_steps * dt - span) > 1e-9 * span:
        raise ValidationError("dt must divide the evolution interval")

    grid = state.grid
    z, k, dz = grid.z, grid.k, grid.dz
    psi = np.stack((state.psi_plus.astype(complex), state.psi_minus.astype(complex)))
    tau = 0.0
    g2 = medium.coupling**2

    snapshots: list[Snapshot] = []
    trace_rows: list[tuple] = [] if trace_stride > 0 else None
    wrap = False

    def record_snapshot(i_step, arr, tau_now):
        t = t0 + i_step * dt
        wc = float(schedule.omega_c(t))
        ws = float(schedule.omega_s(t))
        snapshots.append(
            Snapshot(
                time=t,
                tau=tau_now,
                theta=mixing_angle(wc, medium),
                delta_s=light_shift_amplitude(ws, schedule.delta),
                omega_c=wc,
                omega_s=ws,
                state=PolaritonState(grid, arr[0].copy(), arr[1].copy(), t),
            )
        )

    def record_trace(i_step, arr, tau_now, theta):
        intensity = np.abs(arr[0]) ** 2 + np.abs(arr[1]) ** 2
        fwd = float((np.abs(arr[0]) ** 2).sum() * dz)
        trace_rows.append(
            (t0 + i_step * dt, tau_now, theta, float(intensity.sum() * dz), fwd, _centroid(intensity, z))
        )

    if snapshot_stride > 0:
        record_snapshot(0, psi, tau)
    if trace_stride > 0:
        record_trace(0, psi, tau, mixing_angle(float(schedule.omega_c(t0)), medium))

    for i in range(1, n_steps + 1):
        t_mid = t0 + (i - 0.5) * dt
        wc = float(schedule.omega_c(t_mid))
        theta = mixing_angle(wc, medium)
        delta_s = light_shift_amplitude(float(schedule.omega_s(t_mid)), schedule.delta)
        psi = _apply_step(psi, k, z, dt, theta, delta_s, schedule.delta_k, medium.gamma_bc)
        tau += dt * wc**2 / (wc**2 + g2)

        if not np.all(np.isfinite(psi)):
            raise NumericalError("non-finite polariton state", context=f"step {i}")
        if snapshot_stride > 0 and (i % snapshot_stride == 0 or i == n_steps):
            record_snapshot(i, psi, tau)
            if not wrap:
                intensity = np.abs(psi[0]) ** 2 + np.abs(psi[1]) ** 2
                cen = _centroid(intensity, z)
                width = float(np.sqrt(np.maximum(((z - cen) ** 2 * intensity).sum() / max(intensity.sum(), 1e-300), 0.0)))
                if 0.0 < width < 0.25 * (grid.z_max - grid.z_min):
                    if _boundary_fraction(intensity, z, width) > WRAP_FRACTION:
                        wrap = True
                        warnings.warn("pulse energy reached the periodic boundary", RuntimeWarning, stacklevel=2)
        if trace_stride > 0 and (i % trace_stride == 0 or i == n_steps):
            record_trace(i, psi, tau, theta)

    trace = None
    if trace_rows:
        cols = [np.array(col) for col in zip(*trace_rows)]
        trace = Trace(*cols)
    final = PolaritonState(grid, psi[0], psi[1], t1)
    return Trajectory(snapshots, final, tau, trace, wrap)


@dataclass(frozen=True)
class Diagnostics:
    """Scalar observables of a state (plus the field intensity profile)."""

    norm: float
    forward_norm: float
    backward_norm: float
    centroid: float
    rms_width: float
    field_intensity: np.ndarray


def measure(state: PolaritonState, theta: float = 0.0) -> Diagnostics:
    """Norms, centroid, RMS width and the wavelength-averaged field intensity.

    The field intensity |E_+|^2 + |E_-|^2 equals cos^2(theta) times the
    polariton intensity; pass the current mixing angle to weight it.
    """
    z, dz = state.grid.z, state.grid.dz
    ip = np.abs(state.psi_plus) ** 2
    im = np.abs(state.psi_minus) ** 2
    intensity = ip + im
    norm = float(intensity.sum() * dz)
    centroid = _centroid(intensity, z)
    if norm > 0.0:
        rms = float(np.sqrt(((z - centroid) ** 2 * intensity).sum() * dz / norm))
    else:
        rms = 0.0
    return Diagnostics(
        norm=norm,
        forward_norm=float(ip.sum() * dz),
        backward_norm=float(im.sum() * dz),
        centroid=centroid,
        rms_width=rms,
        field_intensity=np.cos(theta) ** 2 * intensity,
    )
