"""From boundary data g0(k) to the inputs of the inversion: unwrapped
complex log, boundary coefficients p0(k), p1(k), and ingestion of external
frequency-domain measurements."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .forward import ScatterData, incident_field
from .numgrid import WavenumberGrid, diff_matrix

DEGENERATE_TOL = 1e-12


class DegenerateDataError(ValueError):
    pass


class DataFormatError(ValueError):
    def __init__(self, path, lineno, msg):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class PreparedData:
    g0: np.ndarray
    log_g0: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    kgrid: WavenumberGrid


def _check_nonzero(g0):
    if np.any(np.abs(g0) < DEGENERATE_TOL):
        m = int(np.argmin(np.abs(g0)))
        raise DegenerateDataError(f"|g0| below {DEGENERATE_TOL} at k-index {m}")


def unwrap_log(g0, kgrid: WavenumberGrid, method: str = "integral") -> np.ndarray:
    """Complex log of g0 continued in k from the principal value at k_hi.

    ``integral`` integrates d(log g0) exactly over each k-panel for the
    log-linear interpolant of the samples, i.e. the increment on
    [k_j, k_j+1] is Log(g0[j+1] / g0[j]); ``trapezoid`` integrates the
    finite-difference quotient g0'/g0 with the trapezoidal rule (less
    accurate, kept as a cross-check).
    """
    g0 = np.asarray(g0, dtype=complex)
    if g0.shape != (kgrid.n_k,):
        raise ValueError(f"expected {kgrid.n_k} samples, got shape {g0.shape}")
    _check_nonzero(g0)
    anchor = np.log(g0[-1])
    if method == "integral":
        incr = np.log(g0[1:] / g0[:-1])
    elif method == "trapezoid":
        dlog = (diff_matrix(kgrid.n_k, kgrid.h_k, 1) @ g0) / g0
        incr = 0.5 * kgrid.h_k * (dlog[1:] + dlog[:-1])
    else:
        raise ValueError(f"unknown method {method!r}")
    # log(k_m) = log(k_hi) - int_{k_m}^{k_hi}
    tail = np.concatenate([np.cumsum(incr[::-1])[::-1], [0.0]])
    return anchor - tail


def k_derivative(f, kgrid: WavenumberGrid, accuracy: int = 4) -> np.ndarray:
    """Finite-difference derivative in k.

    accuracy 2 reuses the spatial stencils; accuracy 4 uses five-point
    central differences with fourth-order one-sided closures.
    """
    f = np.asarray(f)
    n, h = kgrid.n_k, kgrid.h_k
    if accuracy == 2:
        return diff_matrix(n, h, 1) @ f
    if accuracy != 4:
        raise ValueError("accuracy must be 2 or 4")
    if n < 5:
        raise ValueError("fourth-order differences need n_k >= 5")
    D = np.zeros((n, n))
    for i in range(2, n - 2):
        D[i, i - 2:i + 3] = [1, -8, 0, 8, -1]
    D[0, :5] = [-25, 48, -36, 16, -3]
    D[1, :5] = [-3, -10, 18, -6, 1]
    D[-2, -5:] = [-1, 6, -18, 10, 3]
    D[-1, -5:] = [3, -16, 36, -48, 25]
    return (D / (12 * h)) @ f


def boundary_coefficients(g0, log_g0, kgrid: WavenumberGrid, accuracy: int = 4):
    """p0 = d/dk (log g0 / k^2) and p1 = d/dk [2i/k (1 - 1/g0)]."""
    g0 = np.asarray(g0, dtype=complex)
    _check_nonzero(g0)
    k = kgrid.nodes
    p0 = k_derivative(np.asarray(log_g0) / k**2, kgrid, accuracy)
    p1 = k_derivative(2j / k * (1.0 - 1.0 / g0), kgrid, accuracy)
    return p0, p1


def prepare(data: ScatterData, accuracy: int = 4) -> PreparedData:
    kgrid = data.kgrid
    log_g0 = unwrap_log(data.g0, kgrid)
    p0, p1 = boundary_coefficients(data.g0, log_g0, kgrid, accuracy)
    return PreparedData(data.g0, log_g0, p0, p1, kgrid)


def write_data(path, data: ScatterData, kind: str = "g0", x0: float = -1.0, header: str = ""):
    """Write g0 (or the field u(0, k)) in the external text format.

    ``header`` lines are written as ``#`` comments ahead of the table.
    """
    vals = data.g0 if kind == "g0" else data.g0 * incident_field(0.0, data.kgrid.nodes, x0)
    with open(path, "w", encoding="utf-8") as fh:
        for line in header.splitlines():
            fh.write(f"# {line}\n")
        fh.write("k,re,im,kind\n")
        for k, v in zip(data.kgrid.nodes, vals):
            fh.write(f"{k:.17g},{v.real:.17g},{v.imag:.17g},{kind}\n")


def ingest_external(path, kgrid: WavenumberGrid, calibration: float = 1.0,
                    x0: float = -1.0) -> ScatterData:
    """Read rows ``k, re, im, kind`` (kind is u or g0) and resample to kgrid.

    Values are multiplied by ``calibration``; field samples u(0, k) are
    divided by the incident field to form g0.
    """
    path = Path(path)
    rows = []
    header_seen = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p for p in line.replace(",", " ").split()]
            if not header_seen:
                if [p.lower() for p in parts] != ["k", "re", "im", "kind"]:
                    raise DataFormatError(path, lineno, "expected header 'k,re,im,kind'")
                header_seen = True
                continue
            if len(parts) != 4:
                raise DataFormatError(path, lineno, f"expected 4 fields, got {len(parts)}")
            try:
                k, re, im = (float(p) for p in parts[:3])
            except ValueError as exc:
                raise DataFormatError(path, lineno, str(exc)) from None
            kind = parts[3].lower()
            if kind not in ("u", "g0"):
                raise DataFormatError(path, lineno, f"kind must be 'u' or 'g0', got {parts[3]!r}")
            if k <= 0:
                raise DataFormatError(path, lineno, "wavenumber must be positive")
            rows.append((k, complex(re, im) * calibration, kind))
    if not rows:
        raise DataFormatError(path, 0, "no data rows")
    rows.sort(key=lambda r: r[0])
    ks = np.array([r[0] for r in rows])
    vals = np.array([r[1] for r in rows])
    is_u = np.array([r[2] == "u" for r in rows])
    vals = np.where(is_u, vals / incident_field(0.0, ks, x0), vals)
    eps = 1e-9 * kgrid.k_hi
    if ks[0] > kgrid.k_lo + eps or ks[-1] < kgrid.k_hi - eps:
        raise CoverageError(f"data cover [{ks[0]:g}, {ks[-1]:g}], need [{kgrid.k_lo:g}, {kgrid.k_hi:g}]")
    kn = kgrid.nodes
    g0 = np.interp(kn, ks, vals.real) + 1j * np.interp(kn, ks, vals.imag)
    return ScatterData(g0, kgrid)
