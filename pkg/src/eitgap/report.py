"""Output emission: metadata-headed CSV, minimal SVG plots, binary dumps.

Every CSV starts with '#'-prefixed metadata lines (tool version, parameter
echo, column schema) so downstream plots are reproducible from the file
alone.  Files are written atomically (temp file + rename).  The binary
trajectory layout is little-endian:

    magic   8 bytes  b"PLTRAJ01"
    uint32  grid n_points
    float64 z_min, z_max
    uint32  snapshot count
    then per snapshot:
        float64 time, tau, theta, shift_amplitude, omega_c, omega_s
        float64[n] Re psi_plus, Im psi_plus, Re psi_minus, Im psi_minus
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .dynamics import GridSpec, PolaritonState, Snapshot

__all__ = [
    "TOOL_VERSION",
    "write_atomic_text",
    "write_atomic_bytes",
    "write_csv",
    "write_trajectory_csv",
    "write_trajectory_binary",
    "read_trajectory_binary",
    "svg_line_chart",
    "svg_heatmap",
]

TOOL_VERSION = "eitgap 0.1.0"
_MAGIC = b"PLTRAJ01"


def _atomic_write(path, payload, mode: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        kwargs = {"encoding": "utf-8", "newline": "\n"} if "b" not in mode else {}
        with os.fdopen(fd, mode, **kwargs) as handle:
            handle.write(payload)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_atomic_text(path, text: str) -> None:
    _atomic_write(path, text, "w")


def write_atomic_bytes(path, blob: bytes) -> None:
    _atomic_write(path, blob, "wb")


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, columns: dict[str, np.ndarray], metadata: dict[str, object]) -> None:
    """RFC-4180-style CSV ('.' decimals, LF endings) with a '#' metadata head."""
    names = list(columns)
    lengths = {len(np.atleast_1d(v)) for v in columns.values()}
    if len(lengths) > 1:
        raise ValueError("all CSV columns must have equal length")
    lines = [f"# tool = {TOOL_VERSION}"]
    for key, value in metadata.items():
        lines.append(f"# {key} = {_format_cell(value)}")
    lines.append(f"# columns = {';'.join(names)}")
    lines.append(",".join(names))
    arrays = [np.atleast_1d(columns[n]) for n in names]
    for row in zip(*arrays):
        lines.append(",".join(_format_cell(cell) for cell in row))
    write_atomic_text(path, "\n".join(lines) + "\n")


def write_trajectory_csv(path, snapshots: list[Snapshot], metadata: dict[str, object]) -> None:
    """One row per snapshot per grid point with envelopes and field intensity."""
    cols: dict[str, list] = {k: [] for k in (
        "t", "z", "re_psi_plus", "im_psi_plus", "re_psi_minus", "im_psi_minus",
        "field_intensity_plus", "field_intensity_minus",
    )}
    for snap in snapshots:
        z = snap.state.grid.z
        cos2 = np.cos(snap.theta) ** 2
        cols["t"].append(np.full_like(z, snap.time))
        cols["z"].append(z)
        cols["re_psi_plus"].append(snap.state.psi_plus.real)
        cols["im_psi_plus"].append(snap.state.psi_plus.imag)
        cols["re_psi_minus"].append(snap.state.psi_minus.real)
        cols["im_psi_minus"].append(snap.state.psi_minus.imag)
        cols["field_intensity_plus"].append(cos2 * np.abs(snap.state.psi_plus) ** 2)
        cols["field_intensity_minus"].append(cos2 * np.abs(snap.state.psi_minus) ** 2)
    stacked = {k: np.concatenate(v) if v else np.empty(0) for k, v in cols.items()}
    write_csv(path, stacked, metadata)


def write_trajectory_binary(path, snapshots: list[Snapshot]) -> None:
    if not snapshots:
        raise ValueError("no snapshots to write")
    grid = snapshots[0].state.grid
    parts = [_MAGIC, struct.pack("<I", grid.n_points), struct.pack("<dd", grid.z_min, grid.z_max),
             struct.pack("<I", len(snapshots))]
    for snap in snapshots:
        parts.append(struct.pack("<6d", snap.time, snap.tau, snap.theta, snap.delta_s, snap.omega_c, snap.omega_s))
        for arr in (snap.state.psi_plus.real, snap.state.psi_plus.imag,
                    snap.state.psi_minus.real, snap.state.psi_minus.imag):
            parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    write_atomic_bytes(path, b"".join(parts))


def read_trajectory_binary(path) -> list[Snapshot]:
    blob = Path(path).read_bytes()
    if blob[:8] != _MAGIC:
        raise ValueError("not a trajectory dump")
    off = 8
    (n_points,) = struct.unpack_from("<I", blob, off)
    off += 4
    z_min, z_max = struct.unpack_from("<dd", blob, off)
    off += 16
    (count,) = struct.unpack_from("<I", blob, off)
    off += 4
    grid = GridSpec(z_min, z_max, n_points)
    snapshots = []
    for _ in range(count):
        time, tau, theta, delta_s, omega_c, omega_s = struct.unpack_from("<6d", blob, off)
        off += 48
        arrays = []
        for _ in range(4):
            arrays.append(np.frombuffer(blob, dtype="<f8", count=n_points, offset=off).copy())
            off += 8 * n_points
        state = PolaritonState(grid, arrays[0] + 1j * arrays[1], arrays[2] + 1j * arrays[3], time)
        snapshots.append(Snapshot(time, tau, theta, delta_s, omega_c, omega_s, state))
    return snapshots


# ---------------------------------------------------------------------------
# minimal static SVG output (no plotting dependency)

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _axis_transform(values, lo, hi, px0, px1):
    span = hi - lo if hi > lo else 1.0
    return px0 + (np.asarray(values, dtype=float) - lo) * (px1 - px0) / span


def svg_line_chart(path, x, series: dict[str, np.ndarray], title: str, x_label: str, y_label: str) -> None:
    """Static polyline chart; one color per named series, range labels on the frame."""
    width, height = 720, 440
    m_left, m_right, m_top, m_bottom = 70, 20, 40, 50
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    x_lo, x_hi = float(x.min()), float(x.max())
    all_y = np.concatenate(list(ys.values()))
    finite = all_y[np.isfinite(all_y)]
    y_lo, y_hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    px = _axis_transform(x, x_lo, x_hi, m_left, width - m_right)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width/2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{m_left}" y="{m_top}" width="{width-m_left-m_right}" height="{height-m_top-m_bottom}" '
        'fill="none" stroke="#333"/>',
    ]
    for i, (name, y) in enumerate(ys.items()):
        py = _axis_transform(y, y_lo, y_hi, height - m_bottom, m_top)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py) if np.isfinite(b))
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>')
        parts.append(f'<text x="{width - m_right - 6}" y="{m_top + 16 + 14*i}" text-anchor="end" '
                     f'fill="{color}">{name}</text>')
    parts += [
        f'<text x="{m_left}" y="{height-m_bottom+16}" text-anchor="middle">{x_lo:.4g}</text>',
        f'<text x="{width-m_right}" y="{height-m_bottom+16}" text-anchor="middle">{x_hi:.4g}</text>',
        f'<text x="{width/2:.0f}" y="{height-12}" text-anchor="middle">{x_label}</text>',
        f'<text x="{m_left-8}" y="{height-m_bottom}" text-anchor="end">{y_lo:.4g}</text>',
        f'<text x="{m_left-8}" y="{m_top+10}" text-anchor="end">{y_hi:.4g}</text>',
        f'<text x="16" y="{height/2:.0f}" text-anchor="middle" transform="rotate(-90 16 {height/2:.0f})">{y_label}</text>',
        "</svg>",
    ]
    write_atomic_text(path, "\n".join(parts) + "\n")


def _heat_color(v: float) -> str:
    stops = ((0.0, (13, 8, 135)), (0.33, (126, 3, 168)), (0.66, (225, 100, 98)), (1.0, (240, 249, 33)))
    v = min(max(v, 0.0), 1.0)
    for (a, ca), (b, cb) in zip(stops, stops[1:]):
        if v <= b:
            u = (v - a) / (b - a)
            rgb = tuple(round(x + u * (y - x)) for x, y in zip(ca, cb))
            return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"
    return "rgb(240,249,33)"


def svg_heatmap(path, matrix: np.ndarray, title: str, x_label: str, y_label: str, max_cells: int = 200) -> None:
    """Downsampled rect-grid heatmap of a (rows=time, cols=space) matrix."""
    data = np.asarray(matrix, dtype=float)
    r_step = max(1, data.shape[0] // max_cells)
    c_step = max(1, data.shape[1] // max_cells)
    data = data[::r_step, ::c_step]
    top = float(data.max()) or 1.0
    rows, cols = data.shape
    width, height = 720, 440
    m_left, m_top, m_bottom = 60, 40, 40
    cw = (width - m_left - 20) / cols
    ch = (height - m_top - m_bottom) / rows
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width/2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    for i in range(rows):
        y = m_top + (rows - 1 - i) * ch
        for j in range(cols):
            color = _heat_color(data[i, j] / top)
            parts.append(f'<rect x="{m_left + j*cw:.2f}" y="{y:.2f}" width="{cw+0.5:.2f}" '
                         f'height="{ch+0.5:.2f}" fill="{color}"/>')
    parts += [
        f'<text x="{width/2:.0f}" y="{height-10}" text-anchor="middle">{x_label}</text>',
        f'<text x="16" y="{height/2:.0f}" text-anchor="middle" transform="rotate(-90 16 {height/2:.0f})">{y_label}</text>',
        "</svg>",
    ]
    write_atomic_text(path, "\n".join(parts) + "\n")
