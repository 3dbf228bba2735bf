"""Dense quaternion matrices with block/multilevel metadata.

A quaternion matrix ``A`` is stored by its unique slice decomposition
``A = Z + W*j`` with ``Z, W`` complex ``C_i``-valued arrays.  This makes the
algebra explicit:

* product:  ``(Z1 + W1 j)(Z2 + W2 j) = (Z1 Z2 - W1 conj(W2)) + (Z1 W2 + W1 conj(Z2)) j``
* adjoint:  ``(Z + W j)* = Z* - W^T j``
* embedding: ``Phi(A) = [[Z, W], [-conj(W), conj(Z)]]`` (2m x 2n complex)

Spectral quantities (singular values, canonical right-eigenvalue
representatives, rank, Schatten norms) are computed through the embedding:
the singular values of ``Phi(A)`` are those of ``A`` duplicated, and the
eigenvalues of ``Phi(A)`` come in conjugate pairs whose upper-half-plane
representatives are the canonical eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import cla
from .quat import Quaternion

__all__ = [
    "BlockStructure",
    "QMatrix",
    "QSpectrum",
    "PairingError",
    "matmul",
    "adjoint",
    "slice_split_matrix",
    "phi_block_array",
    "frobenius_norm",
    "rank_h",
    "schatten_norm",
    "q_singular_values",
    "canonical_eigenvalues",
    "canonical_from_phi_eigenvalues",
    "random_qmatrix",
]

RANK_RTOL = 1e-12
PAIRING_RTOL = 1e-8


class PairingError(RuntimeError):
    """Eigenvalues of the embedded matrix could not be matched into conjugate pairs."""


@dataclass(frozen=True)
class BlockStructure:
    """Multilevel block metadata: d levels of sizes nvec, s x t blocks."""

    d: int
    nvec: tuple[int, ...]
    s: int
    t: int

    def __post_init__(self):
        if self.d != len(self.nvec):
            raise ValueError("level count d must match len(nvec)")
        if any(n < 1 for n in self.nvec) or self.s < 1 or self.t < 1:
            raise ValueError("nvec entries and block dims must be >= 1")

    @property
    def n_total(self) -> int:
        return int(np.prod(self.nvec))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class QMatrix:
    """Immutable dense quaternion matrix ``Z + W*j``."""

    z: np.ndarray
    w: np.ndarray
    structure: BlockStructure | None = field(default=None)

    def __post_init__(self):
        z = _freeze(self.z)
        w = _freeze(self.w)
        if z.ndim != 2 or z.shape != w.shape:
            raise ValueError("z and w must be 2-d arrays of equal shape")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)
        st = self.structure
        if st is not None:
            if self.rows != st.s * st.n_total or self.cols != st.t * st.n_total:
                raise ValueError(
                    f"structure tag ({st}) inconsistent with shape {z.shape}"
                )

    # -- construction -----------------------------------------------------

    @staticmethod
    def zeros(rows: int, cols: int, structure: BlockStructure | None = None) -> "QMatrix":
        return QMatrix(np.zeros((rows, cols)), np.zeros((rows, cols)), structure)

    @staticmethod
    def identity(n: int) -> "QMatrix":
        return QMatrix(np.eye(n), np.zeros((n, n)))

    @staticmethod
    def from_slices(z, w, structure: BlockStructure | None = None) -> "QMatrix":
        return QMatrix(np.asarray(z), np.asarray(w), structure)

    @staticmethod
    def from_entries(entries: Sequence[Sequence[Quaternion]]) -> "QMatrix":
        rows = len(entries)
        cols = len(entries[0])
        z = np.empty((rows, cols), dtype=np.complex128)
        w = np.empty((rows, cols), dtype=np.complex128)
        for i, row in enumerate(entries):
            if len(row) != cols:
                raise ValueError("ragged entry rows")
            for j, q in enumerate(row):
                z[i, j] = complex(q.q0, q.q1)
                w[i, j] = complex(q.q2, q.q3)
        return QMatrix(z, w)

    @staticmethod
    def from_components(q0, q1, q2, q3) -> "QMatrix":
        q0, q1, q2, q3 = (np.asarray(c, dtype=float) for c in (q0, q1, q2, q3))
        return QMatrix(q0 + 1j * q1, q2 + 1j * q3)

    # -- accessors ---------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.z.shape[0]

    @property
    def cols(self) -> int:
        return self.z.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.z.shape

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion.from_slice(self.z[i, j], self.w[i, j])

    def to_components(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """The four real component arrays (q0, q1, q2, q3)."""
        return (
            self.z.real.copy(),
            self.z.imag.copy(),
            self.w.real.copy(),
            self.w.imag.copy(),
        )

    def with_structure(self, structure: BlockStructure | None) -> "QMatrix":
        return QMatrix(self.z, self.w, structure)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.z + other.z, self.w + other.w)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.z - other.z, self.w - other.w)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self.z, -self.w)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        return matmul(self, other)

    def scale_left(self, a: complex) -> "QMatrix":
        """Left multiplication by a slice scalar: ``a (Z + W j) = aZ + aW j``."""
        a = complex(a)
        return QMatrix(a * self.z, a * self.w)

    def scale_right(self, a: complex) -> "QMatrix":
        """Right multiplication by a slice scalar: ``(Z + W j) a = Za + W conj(a) j``."""
        a = complex(a)
        return QMatrix(self.z * a, self.w * a.conjugate())

    def adjoint(self) -> "QMatrix":
        return adjoint(self)

    def conj_entrywise(self) -> "QMatrix":
        """Entrywise quaternion conjugation (no transpose): ``conj(z) - w j``."""
        return QMatrix(self.z.conj(), -self.w)

    def isclose(self, other: "QMatrix", tol: float = 1e-12) -> bool:
        scale = max(frobenius_norm(self), frobenius_norm(other), 1.0)
        return frobenius_norm(self - other) <= tol * scale


@dataclass(frozen=True)
class QSpectrum:
    """Canonical eigenvalues (upper half-plane) and singular values (descending)."""

    canonical_eigs: np.ndarray | None
    singular_values: np.ndarray

    def __post_init__(self):
        sv = np.asarray(self.singular_values, dtype=float)
        if np.any(sv < -1e-12) or np.any(np.diff(sv) > 1e-12):
            raise ValueError("singular values must be nonnegative and nonincreasing")
        object.__setattr__(self, "singular_values", sv)
        if self.canonical_eigs is not None:
            ce = np.asarray(self.canonical_eigs, dtype=np.complex128)
            if np.any(ce.imag < -1e-12):
                raise ValueError("canonical eigenvalues must have Im >= 0")
            object.__setattr__(self, "canonical_eigs", ce)


# -- basic operations -------------------------------------------------------


def matmul(a: QMatrix, b: QMatrix) -> QMatrix:
    """Quaternion matrix product."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    z = a.z @ b.z - a.w @ b.w.conj()
    w = a.z @ b.w + a.w @ b.z.conj()
    return QMatrix(z, w)


def adjoint(a: QMatrix) -> QMatrix:
    """Quaternion conjugate transpose."""
    return QMatrix(a.z.conj().T, -a.w.T)


def slice_split_matrix(a: QMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise slice decomposition ``A = Z + W*j``; exact round trip."""
    return a.z.copy(), a.w.copy()


def phi_block_array(a: QMatrix) -> np.ndarray:
    """The blocked symplectic embedding ``[[Z, W], [-conj(W), conj(Z)]]``."""
    return np.block([[a.z, a.w], [-a.w.conj(), a.z.conj()]])


def frobenius_norm(a: QMatrix) -> float:
    """``sqrt(sum |a_ij|^2)`` with quaternion moduli."""
    return math.sqrt(np.linalg.norm(a.z) ** 2 + np.linalg.norm(a.w) ** 2)


# -- spectral quantities -----------------------------------------------------


def q_singular_values(a: QMatrix) -> np.ndarray:
    """Singular values of ``A``, nonincreasing, length ``min(rows, cols)``.

    Computed as every other entry of the (duplicated) singular values of the
    embedded matrix.
    """
    if min(a.shape) == 0:
        return np.zeros(0)
    sv = cla.complex_svd_values(phi_block_array(a))
    return sv[::2].copy()


def rank_h(a: QMatrix, rtol: float = RANK_RTOL) -> int:
    """Quaternionic rank: half the complex rank of the embedding.

    Singular values below ``max(rows, cols) * sigma_1 * rtol`` count as zero.
    """
    if min(a.shape) == 0:
        return 0
    sv = q_singular_values(a)
    if sv[0] == 0.0:
        return 0
    tol = max(a.shape) * sv[0] * rtol
    return int(np.count_nonzero(sv > tol))


def schatten_norm(a: QMatrix, p: float) -> float:
    """Schatten p-norm of the quaternion singular values; ``p=inf`` is spectral."""
    p = float(p)
    if not (p >= 1.0):
        raise ValueError(f"p must lie in [1, inf], got {p}")
    sv = q_singular_values(a)
    if sv.size == 0:
        return 0.0
    if math.isinf(p):
        return float(sv[0])
    return float(np.sum(sv**p) ** (1.0 / p))


def _pair_conjugates(eigs: np.ndarray, tol: float) -> np.ndarray:
    """Match eigenvalues into conjugate pairs, return one Im>=0 representative each.

    Values with ``|Im| < tol`` are snapped to the real axis first, so real
    spectra pair deterministically.
    """
    eigs = np.where(np.abs(eigs.imag) < tol, eigs.real.astype(np.complex128), eigs)
    order = np.lexsort((np.abs(eigs.imag), eigs.real))
    vals = eigs[order]
    m = len(vals)
    used = np.zeros(m, dtype=bool)
    reps: list[complex] = []
    for i in range(m):
        if used[i]:
            continue
        used[i] = True
        z = vals[i]
        best_j, best_d = -1, math.inf
        for j in range(i + 1, m):
            if used[j]:
                continue
            d = abs(z - vals[j].conjugate())
            if d < best_d:
                best_d, best_j = d, j
            # candidates are sorted by Re: once the real gap alone exceeds the
            # best match there is nothing better further on
            if vals[j].real - z.real > best_d:
                break
        if best_j < 0 or best_d > max(2.0 * tol, 1e-300):
            raise PairingError(
                f"no conjugate partner for eigenvalue {z} within {2 * tol:.3e} "
                "(eigensolver inaccuracy or tolerance too tight)"
            )
        used[best_j] = True
        rep = 0.5 * (z + vals[best_j].conjugate())
        if abs(rep.imag) < tol:
            rep = complex(rep.real, 0.0)
        else:
            rep = complex(rep.real, abs(rep.imag))
        reps.append(rep)
    out = np.array(reps, dtype=np.complex128)
    return out[np.lexsort((out.imag, out.real))]


def canonical_from_phi_eigenvalues(
    eigs: np.ndarray, pairing_rtol: float = PAIRING_RTOL
) -> np.ndarray:
    """Canonical representatives from an embedded spectrum (2n eigenvalues)."""
    eigs = np.asarray(eigs, dtype=np.complex128)
    if eigs.size == 0:
        return eigs.copy()
    radius = float(np.max(np.abs(eigs)))
    return _pair_conjugates(eigs, pairing_rtol * radius)


def canonical_eigenvalues(a: QMatrix, pairing_rtol: float = PAIRING_RTOL) -> np.ndarray:
    """The n canonical (upper half-plane) right-eigenvalue representatives.

    The spectrum of the embedded ``2n x 2n`` matrix consists of conjugate
    pairs; a greedy adjacent match selects one representative per pair.
    Raises :class:`PairingError` when the pairing cannot be completed within
    ``pairing_rtol * spectral_radius``.
    """
    if a.rows != a.cols:
        raise ValueError("canonical eigenvalues need a square matrix")
    if a.rows == 0:
        return np.zeros(0, dtype=np.complex128)
    eigs = cla.general_eig(phi_block_array(a))
    return canonical_from_phi_eigenvalues(eigs, pairing_rtol)


def random_qmatrix(
    rng: np.random.Generator,
    rows: int,
    cols: int,
    scale: float = 1.0,
    structure: BlockStructure | None = None,
) -> QMatrix:
    """Quaternion matrix with iid standard normal components (testing helper)."""
    comps = rng.standard_normal((4, rows, cols)) * scale
    return QMatrix(comps[0] + 1j * comps[1], comps[2] + 1j * comps[3], structure)
