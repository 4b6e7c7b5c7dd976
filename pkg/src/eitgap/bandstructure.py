"""Bloch wavevector of the periodically modulated EIT medium.

Two independent solvers are provided:

* ``bloch_k_analytic`` evaluates the closed-form dispersion relation
  cos(K a) = cosh((g^2 N / Omega_c^2) * (a / c) * sqrt(shift^2 - omega^2)),
  which is lossless and keeps only near-resonant terms.

* ``bloch_k_numeric`` builds a transfer matrix over one modulation period
  from the full lossy local response and takes K from the half trace.

Both report the Bloch wavevector as an offset from the standing-wave
wavenumber k_s, folded into the first Brillouin zone (-pi/a, pi/a], with the
attenuation branch kappa >= 0.  Frequencies are measured from the
shift-averaged two-photon resonance: the spatial mean of the standing-wave
light shift (2 Omega_s^2 / Delta) uniformly displaces the Raman resonance,
and the closed form implicitly works in that displaced frame, so the numeric
solver applies the same origin to stay comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import ValidationError
from .medium import DrivePoint, MediumParams, light_shift_amplitude, refractive_index

__all__ = [
    "BandPoint",
    "PeriodCell",
    "GapEdges",
    "make_period_cell",
    "bloch_k_analytic",
    "period_matrix",
    "bloch_k_numeric",
    "band_edges",
    "band_table",
]

#: in_gap threshold for the numeric solver, as a fraction of k_s
GAP_THRESHOLD_FRACTION = 1e-9


@dataclass(frozen=True)
class BandPoint:
    """Bloch wavevector at one probe frequency.

    omega
        Detuning from the (shift-averaged) two-photon resonance, rad/s.
    k_real
        Re(K) - k_s folded into (-pi/a, pi/a], rad/m.
    k_imag
        Attenuation constant, kappa >= 0 branch, rad/m.
    """

    omega: float
    k_real: float
    k_imag: float
    in_gap: bool


@dataclass(frozen=True)
class PeriodCell:
    """Slab discretization of one modulation period.

    Midpoint-sampled light shifts over an even number of slabs tiling
    [0, a) exactly; even counts preserve the cos^2 mirror symmetry.
    """

    period_a: float
    slab_count: int
    shifts: np.ndarray
    mean_shift: float
    k_s: float

    def __post_init__(self):
        if self.slab_count < 8:
            raise ValidationError("slab_count must be >= 8")
        if self.slab_count % 2 != 0:
            raise ValidationError("slab_count must be even")
        if len(self.shifts) != self.slab_count:
            raise ValidationError("one shift per slab required")

    @property
    def slab_thickness(self) -> float:
        return self.period_a / self.slab_count


def make_period_cell(drive: DrivePoint, slab_count: int = 64) -> PeriodCell:
    """Build the period cell for a static drive (midpoint sampling)."""
    a = drive.period
    z_mid = (np.arange(slab_count) + 0.5) * (a / slab_count)
    amp = light_shift_amplitude(drive.omega_s, drive.delta)
    shifts = 4.0 * amp * np.cos(drive.k_s * z_mid) ** 2
    return PeriodCell(a, slab_count, shifts, 2.0 * amp, drive.k_s)


def _fold_offset(ka: complex, a: float) -> tuple[float, float]:
    """Fold K*a - pi into (-pi, pi] and return (offset, kappa) in rad/m."""
    kappa = abs(ka.imag) / a
    q = ka.real - math.pi
    q = math.remainder(q, 2.0 * math.pi)
    if q <= -math.pi:
        q += 2.0 * math.pi
    return q / a, kappa


def bloch_k_analytic(omega: float, delta_s: float, slowdown: float, period_a: float) -> BandPoint:
    """Closed-form band point.

    delta_s
        Light-shift modulation amplitude Omega_s^2/Delta, rad/s.
    slowdown
        g^2 N / Omega_c^2 (approximately c/v_g for strong slowdown).

    Inside |omega| < |delta_s| the argument of cosh is real, so K acquires
    the imaginary part kappa = slowdown * sqrt(delta_s^2 - omega^2) / c and
    the real offset from k_s vanishes.  Outside, K is real with offset
    sign(omega) * slowdown * sqrt(omega^2 - delta_s^2) / c folded into the
    first zone.
    """
    if period_a <= 0 or slowdown <= 0:
        raise ValidationError("period_a and slowdown must be > 0")
    gap2 = delta_s * delta_s - omega * omega
    if gap2 > 0.0:
        kappa = slowdown * math.sqrt(gap2) / SPEED_OF_LIGHT
        return BandPoint(omega, 0.0, kappa, True)
    q_raw = slowdown * math.sqrt(-gap2) / SPEED_OF_LIGHT
    q = math.remainder(q_raw * period_a, 2.0 * math.pi)
    if q <= -math.pi:
        q += 2.0 * math.pi
    q = math.copysign(abs(q), omega if omega != 0.0 else 1.0)
    return BandPoint(omega, q / period_a, 0.0, False)


def _slab_indices(omega, cell: PeriodCell, omega_c: float, medium: MediumParams) -> np.ndarray:
    """Complex refractive index of every slab at probe detuning omega.

    omega is measured from the shift-averaged resonance, so the absolute
    detuning fed to the local response is omega + mean_shift.
    """
    return refractive_index(omega + cell.mean_shift, cell.shifts, omega_c, medium)


def period_matrix(omega: float, cell: PeriodCell, omega_c: float, medium: MediumParams) -> np.ndarray:
    """2x2 transfer matrix of one period acting on (forward, backward) amplitudes.

    Product of per-slab propagation and Fresnel interface matrices, running
    from the entrance of the first slab to the entrance of the first slab of
    the next period (so powers of this matrix tile the lattice).  Unimodular
    by construction.
    """
    n = _slab_indices(float(omega), cell, omega_c, medium)
    k_tot = (medium.carrier_frequency + omega) / SPEED_OF_LIGHT
    d = cell.slab_thickness
    mat = np.eye(2, dtype=complex)
    count = cell.slab_count
    for j in range(count):
        phase = np.exp(1j * n[j] * k_tot * d)
        prop = np.array([[phase, 0.0], [0.0, 1.0 / phase]])
        mat = prop @ mat
        n_next = n[(j + 1) % count]
        r = (n[j] - n_next) / (n[j] + n_next)
        t_rev = 2.0 * n_next / (n[j] + n_next)
        iface = np.array([[1.0, -r], [-r, 1.0]]) / t_rev
        mat = iface @ mat
    return mat


def bloch_k_numeric(omega: float, cell: PeriodCell, omega_c: float, medium: MediumParams) -> BandPoint:
    """Band point from the half trace of the numeric period matrix."""
    half_trace = complex(np.trace(period_matrix(omega, cell, omega_c, medium))) / 2.0
    ka = np.emath.arccos(half_trace)
    ka = complex(ka)
    if ka.imag < 0:
        ka = -ka
    offset, kappa = _fold_offset(ka, cell.period_a)
    in_gap = kappa > GAP_THRESHOLD_FRACTION * cell.k_s
    if not in_gap and offset != 0.0 and omega != 0.0:
        offset = math.copysign(abs(offset), omega)
    return BandPoint(float(omega), offset, kappa, in_gap)


@dataclass(frozen=True)
class GapEdges:
    """Analytic and numerically located band edges.

    ``numeric`` is None when no gap could be resolved on the scanned grid
    (for example when Raman decoherence washes it out).
    """

    analytic: tuple[float, float]
    numeric: tuple[float, float] | None

    @property
    def resolved(self) -> bool:
        return self.numeric is not None


def band_edges(
    drive: DrivePoint,
    medium: MediumParams,
    slab_count: int = 64,
    scan_points: int = 129,
    bisection_steps: int = 40,
) -> GapEdges:
    """Locate the gap edges.

    Analytic edges are +-delta_s exactly.  Numeric edges come from a coarse
    in_gap scan over [-2 delta_s, 2 delta_s] refined by bisection on the
    in_gap transitions of the numeric solver.
    """
    delta_s = abs(drive.shift_amplitude)
    if delta_s <= 0:
        raise ValidationError("band_edges requires a nonzero light shift")
    cell = make_period_cell(drive, slab_count)

    def in_gap(w: float) -> bool:
        return bloch_k_numeric(w, cell, drive.omega_c, medium).in_gap

    grid = np.linspace(-2.0 * delta_s, 2.0 * delta_s, scan_points)
    flags = np.array([in_gap(w) for w in grid])
    if not flags.any() or flags.all():
        # nothing to bisect: either no attenuation anywhere, or absorption
        # above threshold across the whole scan (gap washed out)
        return GapEdges((-delta_s, delta_s), None)

    first = int(np.argmax(flags))
    last = int(len(flags) - 1 - np.argmax(flags[::-1]))

    def bisect(lo: float, hi: float, lo_in: bool) -> float:
        for _ in range(bisection_steps):
            mid = 0.5 * (lo + hi)
            if in_gap(mid) == lo_in:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    lower = grid[0] if first == 0 else bisect(grid[first - 1], grid[first], lo_in=False)
    upper = grid[-1] if last == len(flags) - 1 else bisect(grid[last], grid[last + 1], lo_in=True)
    return GapEdges((-delta_s, delta_s), (lower, upper))


def band_table(
    omega_grid: np.ndarray,
    drive: DrivePoint,
    medium: MediumParams,
    slab_count: int = 64,
) -> tuple[list[BandPoint], list[BandPoint]]:
    """Analytic and numeric band points over a frequency grid (same order)."""
    delta_s = drive.shift_amplitude
    slowdown = (medium.coupling / drive.omega_c) ** 2
    cell = make_period_cell(drive, slab_count)
    analytic = [bloch_k_analytic(float(w), delta_s, slowdown, cell.period_a) for w in omega_grid]
    numeric = [bloch_k_numeric(float(w), cell, drive.omega_c, medium) for w in omega_grid]
    return analytic, numeric
