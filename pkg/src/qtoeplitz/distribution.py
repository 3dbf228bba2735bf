"""Empirical spectral/singular-value distributions vs. symbol rearrangements.

The comparison methodology: sort the eigenvalues (Hermitian case) or singular
values of the assembled matrix, duplicate them to the embedded-side
normalization, and compare against a fine uniform sampling of the monotone
nondecreasing rearrangement of the embedded symbol, resampled to matching
quantile positions ``p_i = (i - 1/2) / K``.  The L1 distance between the two
quantile functions is the convergence metric; duplication cancels in the
quantiles, so eigenvalue and singular-value modes share one code path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import cla
from .qmatrix import (
    QMatrix,
    adjoint,
    canonical_eigenvalues,
    frobenius_norm,
    phi_block_array,
    q_singular_values,
)
from .symbols import EmbeddedSymbol, torus_grid

__all__ = [
    "DistributionReport",
    "empirical_spectrum",
    "symbol_quantiles",
    "quantile_distance",
    "localization_check",
    "scatter_canonical",
    "write_report_csv",
    "write_scatter_csv",
    "REPORT_CSV_HEADER",
    "SCATTER_CSV_HEADER",
]

HERMITIAN_GATE_RTOL = 1e-8
#: default symbol-rearrangement grids per dimension
QUANTILE_GRIDS = {1: 4096, 2: 128}

REPORT_CSV_HEADER = ["quantile_position", "empirical_value", "symbol_value"]
SCATTER_CSV_HEADER = ["re", "im"]


@dataclass(frozen=True, eq=False)
class DistributionReport:
    """One (symbol, kernel, size) distribution comparison."""

    mode: str  # "eig" | "sv"
    kernel_label: str
    nvec: tuple[int, ...]
    empirical: np.ndarray
    symbol_quantiles: np.ndarray
    l1_quantile_distance: float
    bounds: tuple[float, float] | None = None
    scatter: np.ndarray | None = None

    def __post_init__(self):
        emp = np.asarray(self.empirical, dtype=float)
        sym = np.asarray(self.symbol_quantiles, dtype=float)
        if np.any(np.diff(emp) < -1e-12) or np.any(np.diff(sym) < -1e-12):
            raise ValueError("empirical and symbol quantiles must be nondecreasing")
        if self.l1_quantile_distance < 0:
            raise ValueError("quantile distance must be nonnegative")
        object.__setattr__(self, "empirical", emp)
        object.__setattr__(self, "symbol_quantiles", sym)


def _require_hermitian(a: QMatrix, rtol: float = HERMITIAN_GATE_RTOL) -> None:
    defect = frobenius_norm(a - adjoint(a))
    if defect > rtol * max(1.0, frobenius_norm(a)):
        raise ValueError(
            f"eig mode needs a quaternion-Hermitian matrix; defect {defect:.3e}"
        )


def empirical_spectrum(a: QMatrix, mode: str) -> np.ndarray:
    """Ascending spectrum in the embedded normalization (each value twice).

    ``sv``: singular values duplicated.  ``eig``: canonical eigenvalues of a
    Hermitian matrix, duplicated — computed directly as the (real) spectrum
    of the embedded matrix, which carries exactly that duplication.
    """
    if mode == "sv":
        sv = q_singular_values(a)
        return np.repeat(sv[::-1], 2)
    if mode == "eig":
        _require_hermitian(a)
        phi = phi_block_array(a)
        phi = 0.5 * (phi + phi.conj().T)
        return cla.herm_eig(phi)
    raise ValueError(f"unknown mode {mode!r}")


def symbol_quantiles(
    g: EmbeddedSymbol, mode: str, grid: int | None = None, count: int | None = None
) -> np.ndarray:
    """Monotone rearrangement of the embedded symbol's pointwise spectra.

    Evaluates ``G_tau`` on a uniform grid, pools all per-point eigenvalues
    (Hermitian, checked) or singular values, sorts, and resamples the
    quantile function by linear interpolation at midpoints.
    """
    if grid is None:
        grid = QUANTILE_GRIDS.get(g.d, 64)
    if grid < 8:
        raise ValueError("symbol grid must have at least 8 points per dimension")
    values = g.evaluate(torus_grid(g.d, grid))
    if mode == "eig":
        defect = float(np.abs(values - values.conj().transpose(0, 2, 1)).max())
        scale = max(1.0, float(np.abs(values).max()))
        if defect > HERMITIAN_GATE_RTOL * scale:
            raise ValueError(
                f"eig mode needs a pointwise Hermitian embedded symbol; defect {defect:.3e}"
            )
        pooled = np.linalg.eigvalsh(0.5 * (values + values.conj().transpose(0, 2, 1)))
    elif mode == "sv":
        pooled = np.linalg.svd(values, compute_uv=False)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    pooled = np.sort(pooled.reshape(-1))
    if count is None or count == pooled.size:
        return pooled
    return _resample_quantiles(pooled, count)


def _resample_quantiles(sorted_values: np.ndarray, count: int) -> np.ndarray:
    src = np.asarray(sorted_values, dtype=float)
    positions = (np.arange(src.size) + 0.5) / src.size
    targets = (np.arange(count) + 0.5) / count
    return np.interp(targets, positions, src)


def quantile_distance(empirical, symbol_values) -> float:
    """Mean absolute gap between the two quantile functions at matched positions."""
    emp = np.asarray(empirical, dtype=float)
    sym = np.asarray(symbol_values, dtype=float)
    if np.any(np.diff(emp) < -1e-12) or np.any(np.diff(sym) < -1e-12):
        raise ValueError("inputs must be nondecreasing")
    if emp.size == 0:
        raise ValueError("empty empirical spectrum")
    if sym.size != emp.size:
        sym = _resample_quantiles(sym, emp.size)
    return float(np.mean(np.abs(emp - sym)))


def localization_check(
    report: DistributionReport, slack: float = 0.0
) -> tuple[bool, float]:
    """Do all empirical eigenvalues lie inside the symbol bounds?

    Returns (ok, max violation); the tolerance is ``1e-8 + slack`` where the
    slack accounts for grid-approximated bounds.
    """
    if report.mode != "eig":
        raise ValueError("localization check applies to eig-mode reports")
    if report.bounds is None:
        raise ValueError("report carries no spectral bounds")
    lo, hi = report.bounds
    eps = 1e-8 + slack
    violation = max(lo - report.empirical.min(), report.empirical.max() - hi, 0.0)
    return violation <= eps, float(violation)


def scatter_canonical(a: QMatrix) -> np.ndarray:
    """Canonical eigenvalues as complex scatter points (diagnostic output)."""
    return canonical_eigenvalues(a)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_report_csv(report: DistributionReport, path) -> None:
    """Quantile table: position, empirical value, symbol value (equal lengths)."""
    emp = report.empirical
    sym = report.symbol_quantiles
    if sym.size != emp.size:
        sym = _resample_quantiles(sym, emp.size)
    k = emp.size
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_CSV_HEADER)
        for i in range(k):
            writer.writerow([_fmt((i + 0.5) / k), _fmt(emp[i]), _fmt(sym[i])])


def write_scatter_csv(scatter: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCATTER_CSV_HEADER)
        for z in np.asarray(scatter, dtype=complex):
            writer.writerow([_fmt(z.real), _fmt(z.imag)])
