"""Reflection and transmission spectra of the finite modulated sample.

Inside the bandgap, transfer-matrix products grow like exp(kappa*L) and
overflow for long samples, so this module composes per-period *scattering*
matrices with the Redheffer star product instead; every intermediate quantity
stays bounded by construction.  The sample is a whole number of modulation
periods, N_p = floor(L/a), with vacuum on both sides and normal incidence;
the sub-period remainder of L is dropped and recorded in output metadata.

Frequencies follow the same convention as :mod:`eitgap.bandstructure`:
omega is measured from the shift-averaged two-photon resonance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import NumericalError, ValidationError
from .medium import DrivePoint, MediumParams, refractive_index

__all__ = [
    "SpectrumPoint",
    "ScatterMatrix",
    "SampleGeometry",
    "sample_geometry",
    "period_scatter_unit",
    "sample_scatter",
    "reflection_spectrum",
    "spectrum_arrays",
]


@dataclass(frozen=True)
class SpectrumPoint:
    """Complex scattering amplitudes and intensities at one frequency."""

    omega: float
    r: complex
    t: complex

    @property
    def reflectivity(self) -> float:
        return abs(self.r) ** 2

    @property
    def transmissivity(self) -> float:
        return abs(self.t) ** 2

    @property
    def absorption(self) -> float:
        return 1.0 - self.reflectivity - self.transmissivity


@dataclass(frozen=True)
class ScatterMatrix:
    """Two-port scattering matrix, elementwise over a frequency grid.

    For incoming amplitudes (a_left, a_right) the outgoing ones are
    b_left = r * a_left + t_rev * a_right and
    b_right = t * a_left + r_rev * a_right.
    """

    r: np.ndarray
    t: np.ndarray
    r_rev: np.ndarray
    t_rev: np.ndarray

    @classmethod
    def identity(cls, n: int) -> "ScatterMatrix":
        zero = np.zeros(n, dtype=complex)
        one = np.ones(n, dtype=complex)
        return cls(zero, one, zero.copy(), one.copy())

    @classmethod
    def interface(cls, n_in: np.ndarray, n_out: np.ndarray) -> "ScatterMatrix":
        """Fresnel interface from index n_in into n_out, normal incidence."""
        s = n_in + n_out
        r = (n_in - n_out) / s
        return cls(r=np.broadcast_to(r, r.shape).astype(complex),
                   t=(2.0 * n_in / s).astype(complex),
                   r_rev=(-r).astype(complex),
                   t_rev=(2.0 * n_out / s).astype(complex))

    @classmethod
    def propagation(cls, n: np.ndarray, k_vacuum: np.ndarray, thickness: float) -> "ScatterMatrix":
        phase = np.exp(1j * n * k_vacuum * thickness)
        zero = np.zeros_like(phase)
        return cls(zero, phase, zero.copy(), phase.copy())

    def star(self, other: "ScatterMatrix") -> "ScatterMatrix":
        """Compose with ``other`` attached on the right."""
        denom = 1.0 - self.r_rev * other.r
        return ScatterMatrix(
            r=self.r + self.t_rev * other.r * self.t / denom,
            t=other.t * self.t / denom,
            r_rev=other.r_rev + other.t * self.r_rev * other.t_rev / denom,
            t_rev=self.t_rev * other.t_rev / denom,
        )

    def power(self, exponent: int) -> "ScatterMatrix":
        """Compose ``exponent`` copies by binary doubling (log2 star products)."""
        if exponent < 0:
            raise ValidationError("exponent must be >= 0")
        result = ScatterMatrix.identity(len(self.r))
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result.star(base)
            e >>= 1
            if e:
                base = base.star(base)
        return result

    def power_sequential(self, exponent: int) -> "ScatterMatrix":
        """Compose by a plain loop; desk-scale cross-check of :meth:`power`."""
        result = ScatterMatrix.identity(len(self.r))
        for _ in range(exponent):
            result = result.star(self)
        return result


@dataclass(frozen=True)
class SampleGeometry:
    """Period tiling of the finite sample."""

    period_a: float
    period_count: int
    length_used: float
    length_dropped: float


def sample_geometry(medium: MediumParams, drive: DrivePoint) -> SampleGeometry:
    a = drive.period
    n_p = int(np.floor(medium.length / a))
    if n_p < 1:
        raise ValidationError("medium shorter than one modulation period")
    return SampleGeometry(a, n_p, n_p * a, medium.length - n_p * a)


def _slab_profile(omega_grid, medium, drive, slab_count):
    """Per-slab complex indices, shape (n_omega, slab_count), and k_vacuum."""
    a = drive.period
    z_mid = (np.arange(slab_count) + 0.5) * (a / slab_count)
    shifts = 4.0 * (drive.omega_s**2 / drive.delta) * np.cos(drive.k_s * z_mid) ** 2
    omega = np.asarray(omega_grid, dtype=float)
    n = refractive_index(omega[:, None] + drive.mean_shift, shifts[None, :], drive.omega_c, medium)
    k_vac = (medium.carrier_frequency + omega) / SPEED_OF_LIGHT
    return np.atleast_2d(n), k_vac


def period_scatter_unit(omega_grid, medium: MediumParams, drive: DrivePoint, slab_count: int = 64):
    """Scattering matrices of one period plus the boundary pieces.

    Returns (entry, interior, seam, exit_) where the full sample is
    entry * interior * (seam * interior)^(N_p - 1) * exit_.  ``interior``
    runs from the entrance of the first slab to the end of the last slab;
    ``seam`` is the interface back into the first slab of the next period.
    """
    if slab_count < 8 or slab_count % 2:
        raise ValidationError("slab_count must be even and >= 8")
    n, k_vac = _slab_profile(omega_grid, medium, drive, slab_count)
    d = drive.period / slab_count
    vacuum = np.ones(n.shape[0], dtype=complex)

    interior = ScatterMatrix.propagation(n[:, 0], k_vac, d)
    for j in range(1, slab_count):
        interior = interior.star(ScatterMatrix.interface(n[:, j - 1], n[:, j]))
        interior = interior.star(ScatterMatrix.propagation(n[:, j], k_vac, d))
    seam = ScatterMatrix.interface(n[:, -1], n[:, 0])
    entry = ScatterMatrix.interface(vacuum, n[:, 0])
    exit_ = ScatterMatrix.interface(n[:, -1], vacuum)
    return entry, interior, seam, exit_


def _scatter_arrays(omega_grid, medium, drive, slab_count):
    geometry = sample_geometry(medium, drive)
    entry, interior, seam, exit_ = period_scatter_unit(omega_grid, medium, drive, slab_count)
    total = entry.star(interior)
    if geometry.period_count > 1:
        total = total.star(seam.star(interior).power(geometry.period_count - 1))
    total = total.star(exit_)
    bad = ~(np.isfinite(total.r) & np.isfinite(total.t))
    if np.any(bad):
        first = float(np.asarray(omega_grid)[bad][0])
        raise NumericalError("non-finite scattering amplitude", context=f"omega={first:g} rad/s")
    return total.r, total.t, geometry


def sample_scatter(omega: float, medium: MediumParams, drive: DrivePoint, slab_count: int = 64) -> SpectrumPoint:
    """Reflection/transmission of the whole sample for a unit left-incident wave."""
    r, t, _ = _scatter_arrays(np.array([float(omega)]), medium, drive, slab_count)
    return SpectrumPoint(float(omega), complex(r[0]), complex(t[0]))


def reflection_spectrum(omega_grid, medium: MediumParams, drive: DrivePoint, slab_count: int = 64) -> list[SpectrumPoint]:
    """Per-frequency scattering over a sorted, finite frequency grid."""
    omega = np.asarray(omega_grid, dtype=float)
    if omega.size == 0:
        return []
    if not np.all(np.isfinite(omega)):
        raise ValidationError("frequency grid contains non-finite values")
    if np.any(np.diff(omega) < 0):
        raise ValidationError("frequency grid must be sorted ascending")
    r, t, _ = _scatter_arrays(omega, medium, drive, slab_count)
    return [SpectrumPoint(float(w), complex(rr), complex(tt)) for w, rr, tt in zip(omega, r, t)]


def spectrum_arrays(points: list[SpectrumPoint]) -> dict[str, np.ndarray]:
    """Column arrays for CSV emission."""
    return {
        "omega": np.array([p.omega for p in points]),
        "re_r": np.array([p.r.real for p in points]),
        "im_r": np.array([p.r.imag for p in points]),
        "re_t": np.array([p.t.real for p in points]),
        "im_t": np.array([p.t.imag for p in points]),
        "reflectivity": np.array([p.reflectivity for p in points]),
        "transmissivity": np.array([p.transmissivity for p in points]),
        "absorption": np.array([p.absorption for p in points]),
    }
