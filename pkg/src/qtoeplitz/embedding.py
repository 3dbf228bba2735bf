"""The symplectic embedding of quaternion matrices into complex matrices.

Two layouts of the same real-linear *-algebra map are provided:

* ``blocked``   -- ``[[Z, W], [-conj(W), conj(Z)]]``, the canonical form used
  by every structural identity in the package;
* ``entrywise`` -- one 2x2 complex cell per quaternion entry.

They are related by fixed permutations.  The range of the embedding is the
fixed-point space of the conjugate-linear involution
``tau(X) = -J_m conj(X) J_n`` with ``J_k = [[0, I_k], [-I_k, 0]]``; averaging
with ``tau`` projects onto the range without increasing the spectral norm,
and the inverse on the range reads ``(Z, W)`` off the top block row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmatrix import QMatrix, phi_block_array

__all__ = [
    "EmbeddedMatrix",
    "NotInRangeError",
    "phi_blocked",
    "phi_entrywise",
    "perm_matrix",
    "range_project",
    "phi_pullback",
]

RANGE_RTOL = 1e-10


class NotInRangeError(ValueError):
    """A complex matrix claimed to lie in the embedding range does not."""


@dataclass(frozen=True, eq=False)
class EmbeddedMatrix:
    """A 2m x 2n complex matrix carrying its quaternion source dimensions."""

    data: np.ndarray
    source_shape: tuple[int, int]
    layout: str  # "blocked" | "entrywise"

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128, copy=True)
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        m, n = self.source_shape
        if data.shape != (2 * m, 2 * n):
            raise ValueError(
                f"embedded data shape {data.shape} does not match source {self.source_shape}"
            )
        if self.layout not in ("blocked", "entrywise"):
            raise ValueError(f"unknown layout {self.layout!r}")

    def to_blocked(self) -> "EmbeddedMatrix":
        if self.layout == "blocked":
            return self
        m, n = self.source_shape
        pm = perm_matrix(m)
        pn = perm_matrix(n)
        return EmbeddedMatrix(pm.T @ self.data @ pn, self.source_shape, "blocked")


def phi_blocked(a: QMatrix) -> EmbeddedMatrix:
    """Blocked embedding ``[[Z, W], [-conj(W), conj(Z)]]``."""
    return EmbeddedMatrix(phi_block_array(a), a.shape, "blocked")


def phi_entrywise(a: QMatrix) -> EmbeddedMatrix:
    """Entrywise embedding: the 2x2 cell of each quaternion entry in place."""
    m, n = a.shape
    out = np.empty((2 * m, 2 * n), dtype=np.complex128)
    out[0::2, 0::2] = a.z
    out[0::2, 1::2] = a.w
    out[1::2, 0::2] = -a.w.conj()
    out[1::2, 1::2] = a.z.conj()
    return EmbeddedMatrix(out, a.shape, "entrywise")


def perm_matrix(n: int) -> np.ndarray:
    """The 0/1 permutation ``P_n = sum_i (e_{2i-1} e_i* + e_{2i} e_{n+i}*)``.

    Conjugating the entrywise layout by these permutations yields the blocked
    layout; ``P_n`` is orthogonal.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    p = np.zeros((2 * n, 2 * n))
    idx = np.arange(n)
    p[2 * idx, idx] = 1.0
    p[2 * idx + 1, n + idx] = 1.0
    return p


def _tau(x: np.ndarray) -> np.ndarray:
    """The involution ``tau(X) = -J_m conj(X) J_n`` on 2m x 2n matrices."""
    two_m, two_n = x.shape
    m, n = two_m // 2, two_n // 2
    xc = x.conj()
    # J_m @ Y swaps the block rows of Y with a sign; Y @ J_n the block columns.
    top, bot = xc[:m], xc[m:]
    jy = np.vstack([bot, -top])
    left, right = jy[:, :n], jy[:, n:]
    jyj = np.hstack([-right, left])
    return -jyj


def range_project(x) -> EmbeddedMatrix:
    """Project a complex matrix onto the embedding range: ``(X + tau(X)) / 2``.

    The output satisfies the fixed-point invariant and
    ``||Pi(X)|| <= ||X||`` in spectral norm.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] % 2 or x.shape[1] % 2:
        raise ValueError("range_project needs even dimensions")
    out = 0.5 * (x + _tau(x))
    return EmbeddedMatrix(out, (x.shape[0] // 2, x.shape[1] // 2), "blocked")


def range_defect(x) -> float:
    """Relative distance from the fixed-point space, ``||X - tau(X)||_F / ||X||_F``."""
    x = np.asarray(x, dtype=np.complex128)
    scale = np.linalg.norm(x)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(x - _tau(x)) / scale)


def phi_pullback(x, rtol: float = RANGE_RTOL) -> QMatrix:
    """Inverse of the embedding on its range.

    Accepts an :class:`EmbeddedMatrix` (any layout) or a plain blocked array.
    Raises :class:`NotInRangeError` when the fixed-point invariant is violated
    beyond ``rtol``.
    """
    if isinstance(x, EmbeddedMatrix):
        arr = x.to_blocked().data
    else:
        arr = np.asarray(x, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] % 2 or arr.shape[1] % 2:
            raise ValueError("phi_pullback needs even dimensions")
    defect = range_defect(arr)
    if defect > rtol:
        raise NotInRangeError(
            f"matrix is not in the embedding range: relative defect {defect:.3e}"
        )
    m, n = arr.shape[0] // 2, arr.shape[1] // 2
    return QMatrix(arr[:m, :n], arr[:m, n:])
