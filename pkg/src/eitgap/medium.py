"""Atomic-ensemble parameters, drive schedules and the local EIT response.

All frequencies and rates in this module are angular (rad/s); lengths are in
meters.  Conversion from the ordinary-frequency (Hz) values a user types in a
config file happens once, at the config-ingestion boundary.

The linear response implemented here is the standard three-level lambda form
with the one- and two-photon decay rates inserted as imaginary parts of the
respective detunings.  Its lossless limits reproduce the slow-light group
velocity c/(1 + g^2 N / Omega_c^2) and, under a spatially periodic two-photon
shift, the photonic bandgap computed in :mod:`eitgap.bandstructure`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import ValidationError

__all__ = [
    "MediumParams",
    "RampSegment",
    "Ramp",
    "DriveSchedule",
    "DrivePoint",
    "light_shift_amplitude",
    "spatial_light_shift",
    "group_velocity",
    "mixing_angle",
    "eit_response",
    "envelope_wavenumber",
    "refractive_index",
]

RAMP_SHAPES = ("hold", "linear", "smoothstep")


@dataclass(frozen=True)
class MediumParams:
    """Static constants of the atomic ensemble.

    coupling
        Collective atom-field coupling (the combination g*sqrt(N)), rad/s.
        Microscopic dipole moment, quantization volume and atom number only
        ever enter through this single number.
    gamma_ab
        Optical coherence decay rate, rad/s.
    gamma_bc
        Raman (ground-state) coherence decay rate, rad/s.
    length
        Medium length, m.
    carrier_wavenumber
        Carrier wavenumber k0 = nu/c, rad/m.
    """

    coupling: float
    gamma_ab: float
    gamma_bc: float
    length: float
    carrier_wavenumber: float

    def __post_init__(self):
        if self.coupling <= 0:
            raise ValidationError("coupling must be > 0")
        if self.length <= 0:
            raise ValidationError("length must be > 0")
        if self.carrier_wavenumber <= 0:
            raise ValidationError("carrier_wavenumber must be > 0")
        if not (self.gamma_ab >= self.gamma_bc >= 0):
            raise ValidationError("decay rates must satisfy gamma_ab >= gamma_bc >= 0")

    @property
    def carrier_frequency(self) -> float:
        """Optical carrier frequency nu = k0 * c, rad/s."""
        return self.carrier_wavenumber * SPEED_OF_LIGHT

    @classmethod
    def from_wavelength(cls, coupling, gamma_ab, gamma_bc, length, wavelength):
        return cls(coupling, gamma_ab, gamma_bc, length, 2.0 * math.pi / wavelength)


@dataclass(frozen=True)
class RampSegment:
    """One piece of a piecewise drive amplitude.

    ``shape`` is one of ``hold`` (constant), ``linear``, or ``smoothstep``
    (3u^2 - 2u^3 in normalized segment time, continuous first derivative).
    """

    t_start: float
    t_end: float
    v_start: float
    v_end: float
    shape: str = "smoothstep"

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValidationError("segment requires t_start < t_end")
        if self.shape not in RAMP_SHAPES:
            raise ValidationError(f"unknown ramp shape '{self.shape}'")
        if self.shape == "hold" and self.v_start != self.v_end:
            raise ValidationError("hold segment requires v_start == v_end")

    def value(self, t):
        u = (np.asarray(t, dtype=float) - self.t_start) / (self.t_end - self.t_start)
        u = np.clip(u, 0.0, 1.0)
        if self.shape == "hold":
            w = np.zeros_like(u)
        elif self.shape == "linear":
            w = u
        else:
            w = u * u * (3.0 - 2.0 * u)
        return self.v_start + (self.v_end - self.v_start) * w


class Ramp:
    """Piecewise drive amplitude covering the whole time axis.

    Segments must be contiguous (no gaps) and continuous at the joints;
    before the first segment and after the last the boundary value is held.
    """

    def __init__(self, segments: Sequence[RampSegment]):
        segments = sorted(segments, key=lambda s: s.t_start)
        if not segments:
            raise ValidationError("ramp needs at least one segment")
        for a, b in zip(segments, segments[1:]):
            if not math.isclose(a.t_end, b.t_start, rel_tol=0.0, abs_tol=1e-15 + 1e-9 * abs(a.t_end)):
                raise ValidationError("ramp segments leave a gap or overlap")
            if not math.isclose(a.v_end, b.v_start, rel_tol=1e-12, abs_tol=1e-30):
                raise ValidationError("ramp is discontinuous at a segment boundary")
        if any(s.v_start < 0 or s.v_end < 0 for s in segments):
            raise ValidationError("drive amplitudes must be nonnegative")
        self.segments = tuple(segments)
        self._starts = np.array([s.t_start for s in segments])

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self._starts, t_arr, side="right") - 1, 0, len(self.segments) - 1)
        if t_arr.ndim == 0:
            return float(self.segments[int(idx)].value(t_arr))
        out = np.empty_like(t_arr)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if np.any(mask):
                out[mask] = seg.value(t_arr[mask])
        return out

    @property
    def breakpoints(self) -> list[float]:
        pts = [self.segments[0].t_start]
        pts.extend(s.t_end for s in self.segments)
        return pts

    @classmethod
    def constant(cls, value: float, t_start: float = 0.0, t_end: float = 1.0) -> "Ramp":
        return cls([RampSegment(t_start, t_end, value, value, "hold")])

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]], shape: str = "smoothstep") -> "Ramp":
        """Build a ramp through (time, value) knots, one segment per interval."""
        pts = sorted(points)
        if len(pts) < 2:
            raise ValidationError("need at least two (t, v) points")
        segs = []
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            seg_shape = "hold" if v0 == v1 else shape
            segs.append(RampSegment(t0, t1, v0, v1, seg_shape))
        return cls(segs)


@dataclass(frozen=True)
class DriveSchedule:
    """Time-dependent classical drives.

    omega_c
        Control Rabi frequency Omega_c(t), rad/s.
    omega_s
        Single-beam standing-wave Rabi amplitude Omega_s(t), rad/s; the
        standing-wave profile is 2*Omega_s*cos(k_s z).
    delta
        Standing-wave detuning from its own transition, rad/s, nonzero.
    k_s
        Standing-wave wavenumber, rad/m.
    delta_k
        Phase mismatch k_s - k0, rad/m (0 at phase matching).
    """

    omega_c: Ramp
    omega_s: Ramp
    delta: float
    k_s: float
    delta_k: float = 0.0

    def __post_init__(self):
        if self.delta == 0:
            raise ValidationError("standing-wave detuning delta must be nonzero")
        if self.k_s <= 0:
            raise ValidationError("k_s must be > 0")

    def at(self, t: float) -> "DrivePoint":
        return DrivePoint(float(self.omega_c(t)), float(self.omega_s(t)), self.delta, self.k_s, self.delta_k)


@dataclass(frozen=True)
class DrivePoint:
    """Instantaneous (or static) drive values used by the spectral solvers."""

    omega_c: float
    omega_s: float
    delta: float
    k_s: float
    delta_k: float = 0.0

    def __post_init__(self):
        if self.delta == 0:
            raise ValidationError("standing-wave detuning delta must be nonzero")

    @property
    def shift_amplitude(self) -> float:
        return light_shift_amplitude(self.omega_s, self.delta)

    @property
    def mean_shift(self) -> float:
        """Spatial average of the standing-wave light shift, 2*Omega_s^2/Delta."""
        return 2.0 * light_shift_amplitude(self.omega_s, self.delta)

    @property
    def period(self) -> float:
        """Modulation period pi/k_s of the intensity grating."""
        return math.pi / self.k_s


def light_shift_amplitude(omega_s, delta):
    """Single-beam light shift Omega_s^2 / Delta (signed, follows Delta)."""
    if np.any(np.asarray(delta) == 0):
        raise ValidationError("light shift undefined for zero detuning")
    return np.square(omega_s) / delta


def spatial_light_shift(z, t, schedule: DriveSchedule):
    """Standing-wave light shift 4 Omega_s(t)^2 cos^2(k_s z) / Delta."""
    amp = light_shift_amplitude(schedule.omega_s(t), schedule.delta)
    return 4.0 * amp * np.cos(schedule.k_s * np.asarray(z)) ** 2


def group_velocity(omega_c, medium: MediumParams):
    """Slow-light group velocity c / (1 + coupling^2 / omega_c^2).

    Evaluated as c * omega_c^2 / (omega_c^2 + coupling^2), which is the same
    expression but regular at omega_c = 0, where it returns 0 by continuity
    (stopped light), not an error.
    """
    w2 = np.square(np.asarray(omega_c, dtype=float))
    vg = SPEED_OF_LIGHT * w2 / (w2 + medium.coupling**2)
    if vg.ndim == 0:
        return float(vg)
    return vg


def mixing_angle(omega_c, medium: MediumParams):
    """Photon/matter mixing angle theta in [0, pi/2]; cos^2(theta) = v_g/c."""
    theta = np.arctan2(medium.coupling, np.asarray(omega_c, dtype=float))
    if theta.ndim == 0:
        return float(theta)
    return theta


def eit_response(omega, shift, omega_c, medium: MediumParams):
    """Dimensionless complex susceptibility-like response chi(omega).

    omega
        Probe detuning from the optical resonance, rad/s.
    shift
        Local two-photon shift of the Raman resonance, rad/s.
    omega_c
        Control Rabi frequency, rad/s (>= 0).

    The local complex envelope wavenumber is
    k(omega) = omega/c + (nu / 2c) * chi, i.e.
    chi = (2 g^2 N / nu) * (w2 + i*gamma_bc) /
          (omega_c^2 - (w2 + i*gamma_bc) * (omega + i*gamma_ab))
    with two-photon detuning w2 = omega - shift.  At exact two-photon
    resonance and gamma_bc = 0 the response vanishes (perfect transparency);
    with omega_c = 0 it reduces to the two-level Lorentzian.
    """
    omega = np.asarray(omega, dtype=complex)
    w2 = omega - np.asarray(shift, dtype=complex) + 1j * medium.gamma_bc
    denom = np.square(omega_c) - w2 * (omega + 1j * medium.gamma_ab)
    g2n = medium.coupling**2
    chi = (2.0 * g2n / medium.carrier_frequency) * w2 / denom
    if chi.ndim == 0:
        return complex(chi)
    return chi


def envelope_wavenumber(omega, shift, omega_c, medium: MediumParams):
    """Complex envelope wavenumber k(omega) = omega/c + (nu/2c) chi, rad/m."""
    chi = eit_response(omega, shift, omega_c, medium)
    return np.asarray(omega) / SPEED_OF_LIGHT + medium.carrier_wavenumber * chi / 2.0


def refractive_index(omega, shift, omega_c, medium: MediumParams):
    """Local index n(omega) = 1 + chi/2 (chi << 1 regime)."""
    return 1.0 + eit_response(omega, shift, omega_c, medium) / 2.0
