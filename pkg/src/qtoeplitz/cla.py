"""Dense complex linear-algebra kernels.

Thin contract wrappers around LAPACK (via numpy): Hermitian eigenvalues,
singular values, and general complex eigenvalues.  Only values are exposed —
no eigenvector or unitary-factor output anywhere in the package.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "NonHermitianError",
    "EigenSolveError",
    "herm_eig",
    "complex_svd_values",
    "general_eig",
]

HERMITIAN_RTOL = 1e-10


class NonHermitianError(ValueError):
    """Input to a Hermitian-only routine was not Hermitian within tolerance."""


class EigenSolveError(RuntimeError):
    """The underlying eigensolver failed to converge."""


def _as_complex_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def herm_eig(h, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    Raises :class:`NonHermitianError` when ``||H - H*||_F > rtol * ||H||_F``.
    """
    m = _as_complex_matrix(h)
    if m.shape[0] != m.shape[1]:
        raise ValueError("herm_eig expects a square matrix")
    scale = np.linalg.norm(m)
    defect = np.linalg.norm(m - m.conj().T)
    if defect > rtol * max(scale, 1e-300):
        raise NonHermitianError(
            f"matrix is not Hermitian: ||H - H*||_F = {defect:.3e} "
            f"(relative {defect / max(scale, 1e-300):.3e})"
        )
    return np.linalg.eigvalsh(m)


def complex_svd_values(a) -> np.ndarray:
    """Singular values of a complex matrix, nonincreasing."""
    m = _as_complex_matrix(a)
    if min(m.shape) == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenSolveError(f"SVD did not converge: {exc}") from exc


def general_eig(a) -> np.ndarray:
    """All eigenvalues of a square complex matrix, with multiplicity, unordered."""
    m = _as_complex_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError("general_eig expects a square matrix")
    if m.shape[0] == 0:
        return np.zeros(0, dtype=np.complex128)
    try:
        return np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenSolveError(f"eigenvalue iteration did not converge: {exc}") from exc
