"""d-level s x t quaternion block circulants and their QDFT canonical form.

A circulant is generated by a finite table of block coefficients placed on
periodic multilevel shifts.  Conjugating with the slice-valued DFT sends the
``C_i`` part of the coefficients to block diagonals and the orthogonal part
to a reversal-flipped diagonal; reordering indices so that each ``k`` sits
next to ``-k (mod n)`` turns the resulting X-shaped sparsity pattern into a
genuine block diagonal:

* one s x t quaternion fiber ``Z(theta_k) + W(theta_k) j`` per self-paired
  index (``2k = 0 mod n``),
* one 2s x 2t quaternion fiber mixing ``k`` and ``-k`` per remaining pair,

with ``theta_k = 2 pi k / n`` and ``Z, W`` the coefficient transforms of the
generating polynomial.  The fibers are computed analytically from ``(Z, W)``
samples; the explicit permuted-DFT product is kept as a self-test of the
whole index bookkeeping and is verified on every call.

The same fibers give the circulant spectrum, and truncating a right-kernel
symbol onto periodic shifts produces the circulant approximants whose
low-rank/low-norm witnesses are measured here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .qmatrix import (
    BlockStructure,
    QMatrix,
    QSpectrum,
    canonical_from_phi_eigenvalues,
    frobenius_norm,
    matmul,
    q_singular_values,
    rank_h,
    schatten_norm,
)
from .symbols import KernelPartition, SymbolSpec, TrigPoly, reduce_to_right
from .toeplitz import MultiIndexSet, assemble

__all__ = [
    "CirculantSpec",
    "FiberForm",
    "FiberReconstructionError",
    "AcsWitness",
    "assemble_circulant",
    "qdft_matrix",
    "reversal",
    "qdft_multilevel",
    "reversal_multilevel",
    "fix_pair_order",
    "canonical_x_form",
    "circulant_spectrum",
    "acs_truncate",
    "truncated_symbol",
    "acs_witness",
    "su_profile",
]

RECONSTRUCTION_RTOL = 1e-10
PRUNE_RTOL = 1e-13


class FiberReconstructionError(RuntimeError):
    """The analytic fibers disagree with the explicit permuted-DFT product."""


@dataclass(frozen=True, eq=False)
class CirculantSpec:
    """Finite coefficient table rho -> s x t block, indices taken mod nvec."""

    nvec: tuple[int, ...]
    s: int
    t: int
    table: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]]

    def __post_init__(self):
        nvec = tuple(int(n) for n in self.nvec)
        object.__setattr__(self, "nvec", nvec)
        clean: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]] = {}
        for rho, (zb, wb) in self.table.items():
            key = tuple(int(r) % n for r, n in zip(rho, nvec))
            if len(key) != len(nvec):
                raise ValueError(f"shift {rho} has wrong length for nvec={nvec}")
            if key in clean:
                raise ValueError(f"support indices collide mod nvec at {key}")
            zb = np.array(zb, dtype=np.complex128, copy=True)
            wb = np.array(wb, dtype=np.complex128, copy=True)
            if zb.shape != (self.s, self.t) or wb.shape != (self.s, self.t):
                raise ValueError("block shape mismatch")
            zb.flags.writeable = False
            wb.flags.writeable = False
            clean[key] = (zb, wb)
        object.__setattr__(self, "table", clean)

    @property
    def d(self) -> int:
        return len(self.nvec)

    @property
    def n_total(self) -> int:
        return int(np.prod(self.nvec))

    @staticmethod
    def from_quaternion_table(nvec, s: int, t: int, table: dict) -> "CirculantSpec":
        """Build from a table of QMatrix blocks."""
        converted = {rho: (q.z, q.w) for rho, q in table.items()}
        return CirculantSpec(tuple(nvec), s, t, converted)

    def coefficient_transforms(self, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Z and W at the sample angles theta_k = 2 pi k / n, shape (P, s, t).

        ``Z(theta) = sum_rho (rho-block z-part) e^{-i <rho, theta>}`` and
        likewise for W: the transforms of the coefficient table, evaluated on
        the circulant sample set.
        """
        ks = np.atleast_2d(np.asarray(ks, dtype=float))
        thetas = 2.0 * np.pi * ks / np.array(self.nvec, dtype=float)
        z = np.zeros((thetas.shape[0], self.s, self.t), dtype=np.complex128)
        w = np.zeros_like(z)
        for rho, (zb, wb) in self.table.items():
            phase = np.exp(-1j * (thetas @ np.array(rho)))[:, None, None]
            z += phase * zb
            w += phase * wb
        return z, w


def assemble_circulant(spec: CirculantSpec) -> QMatrix:
    """Dense matrix with block (alpha, beta) = sum_rho p(rho) [alpha = beta + rho mod n]."""
    mis = MultiIndexSet(spec.nvec)
    n = mis.n_total
    idx = mis.indices()
    diff = (idx[:, None, :] - idx[None, :, :]) % np.array(spec.nvec)
    strides = np.ones(spec.d, dtype=np.int64)
    for axis in range(spec.d - 2, -1, -1):
        strides[axis] = strides[axis + 1] * spec.nvec[axis + 1]
    flat = (diff * strides).sum(axis=-1)
    zc = np.zeros((n, spec.s, spec.t), dtype=np.complex128)
    wc = np.zeros_like(zc)
    for rho, (zb, wb) in spec.table.items():
        pos = int(sum(r * st for r, st in zip(rho, strides)))
        zc[pos] = zb
        wc[pos] = wb
    big_z = zc[flat].transpose(0, 2, 1, 3).reshape(n * spec.s, n * spec.t)
    big_w = wc[flat].transpose(0, 2, 1, 3).reshape(n * spec.s, n * spec.t)
    structure = BlockStructure(spec.d, spec.nvec, spec.s, spec.t)
    return QMatrix(big_z, big_w, structure)


def qdft_matrix(n: int) -> np.ndarray:
    """Unitary symmetric DFT ``n^{-1/2} exp(-2 pi i u v / n)``; squares to the reversal."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(u, u) / n) / math.sqrt(n)


def reversal(n: int) -> np.ndarray:
    """Permutation sending e_s to e_{(-s) mod n}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = np.zeros((n, n))
    s = np.arange(n)
    a[(-s) % n, s] = 1.0
    return a


def qdft_multilevel(nvec) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for n in nvec:
        out = np.kron(out, qdft_matrix(int(n)))
    return out


def reversal_multilevel(nvec) -> np.ndarray:
    out = np.ones((1, 1))
    for n in nvec:
        out = np.kron(out, reversal(int(n)))
    return out


def fix_pair_order(nvec) -> tuple[list[tuple[int, ...]], list[tuple[tuple[int, ...], tuple[int, ...]]], np.ndarray]:
    """Self-paired indices, pairs {k, -k}, and the reordering permutation.

    ``Fix`` holds the indices with ``2k = 0 (mod n)`` in lexicographic order;
    each remaining index is paired with its negative, listed as
    ``k, -k mod n`` with ``k`` the lexicographically smaller one.  The
    returned P satisfies ``P A_n P^T = I_|Fix| (+) blkdiag([[0,1],[1,0]])``.
    """
    nvec = tuple(int(n) for n in nvec)
    mis = MultiIndexSet(nvec)
    all_idx = [tuple(row) for row in mis.indices()]
    fix = [k for k in all_idx if all((2 * c) % n == 0 for c, n in zip(k, nvec))]
    pairs = []
    for k in all_idx:
        neg = tuple((-c) % n for c, n in zip(k, nvec))
        if k != neg and k < neg:
            pairs.append((k, neg))
    order = list(fix)
    for k, neg in pairs:
        order.extend([k, neg])
    strides = np.ones(mis.d, dtype=np.int64)
    for axis in range(mis.d - 2, -1, -1):
        strides[axis] = strides[axis + 1] * nvec[axis + 1]
    perm = np.zeros((mis.n_total, mis.n_total))
    for row, k in enumerate(order):
        perm[row, int(np.dot(k, strides))] = 1.0
    return fix, pairs, perm


@dataclass(frozen=True, eq=False)
class FiberForm:
    """Block-diagonal fiber data of a circulant under the permuted QDFT."""

    fixed: list[tuple[tuple[int, ...], QMatrix]]
    paired: list[tuple[tuple[tuple[int, ...], tuple[int, ...]], QMatrix]]
    order: list[tuple[int, ...]]
    permutation: np.ndarray
    residual: float

    def block_diagonal(self) -> QMatrix:
        n_fix = len(self.fixed)
        n_pair = len(self.paired)
        s = self.fixed[0][1].rows if n_fix else self.paired[0][1].rows // 2
        t = self.fixed[0][1].cols if n_fix else self.paired[0][1].cols // 2
        rows = (n_fix + 2 * n_pair) * s
        cols = (n_fix + 2 * n_pair) * t
        z = np.zeros((rows, cols), dtype=np.complex128)
        w = np.zeros_like(z)
        r = c = 0
        for _, blk in self.fixed:
            z[r : r + s, c : c + t] = blk.z
            w[r : r + s, c : c + t] = blk.w
            r += s
            c += t
        for _, blk in self.paired:
            z[r : r + 2 * s, c : c + 2 * t] = blk.z
            w[r : r + 2 * s, c : c + 2 * t] = blk.w
            r += 2 * s
            c += 2 * t
        return QMatrix(z, w)


def canonical_x_form(
    spec: CirculantSpec,
    check: bool = True,
    rtol: float = RECONSTRUCTION_RTOL,
    _w_sign: float = 1.0,
) -> FiberForm:
    """Fibers of the permuted QDFT block-diagonalization.

    Computed analytically from ``(Z, W)`` samples at ``theta_k``; when
    ``check`` is on, the explicit product ``Pi_L U_L C U_R* Pi_R*`` is formed
    by quaternion matrix multiplication and compared, raising
    :class:`FiberReconstructionError` on disagreement (this is an index
    bookkeeping self-test, not a numerical tolerance issue).

    ``_w_sign`` is a fault-injection hook for the self-test negative control:
    ``-1`` reproduces the sign error one would make in the DFT flip identity,
    which the reconstruction check must catch.
    """
    fix, pairs, perm = fix_pair_order(spec.nvec)
    ks = np.array(fix + [k for pair in pairs for k in pair], dtype=float).reshape(
        -1, spec.d
    )
    if ks.size == 0:
        ks = ks.reshape(0, spec.d)
    z_all, w_all = spec.coefficient_transforms(ks)
    w_all = _w_sign * w_all
    fixed = []
    for i, k in enumerate(fix):
        fixed.append((k, QMatrix(z_all[i], w_all[i])))
    paired = []
    base = len(fix)
    s, t = spec.s, spec.t
    for j, (k, neg) in enumerate(pairs):
        zk, wk = z_all[base + 2 * j], w_all[base + 2 * j]
        zn, wn = z_all[base + 2 * j + 1], w_all[base + 2 * j + 1]
        z = np.zeros((2 * s, 2 * t), dtype=np.complex128)
        w = np.zeros_like(z)
        z[:s, :t] = zk
        z[s:, t:] = zn
        w[:s, t:] = wk
        w[s:, :t] = wn
        paired.append(((k, neg), QMatrix(z, w)))
    order = list(fix) + [k for pair in pairs for k in pair]
    form = FiberForm(fixed, paired, order, perm, float("nan"))
    residual = _reconstruction_residual(spec, form)
    form = FiberForm(fixed, paired, order, perm, residual)
    if check and residual > rtol:
        raise FiberReconstructionError(
            f"fiber reconstruction residual {residual:.3e} exceeds {rtol:.1e}"
        )
    return form


def _reconstruction_residual(spec: CirculantSpec, form: FiberForm) -> float:
    """Relative Frobenius gap between Pi_L U_L C U_R* Pi_R* and the fibers."""
    c = assemble_circulant(spec)
    f_left = qdft_multilevel(spec.nvec)
    pl = np.kron(form.permutation, np.eye(spec.s))
    pr = np.kron(form.permutation, np.eye(spec.t))
    ul = QMatrix(np.kron(f_left, np.eye(spec.s)), np.zeros((spec.n_total * spec.s,) * 2))
    ur = QMatrix(np.kron(f_left, np.eye(spec.t)), np.zeros((spec.n_total * spec.t,) * 2))
    prod = matmul(matmul(ul, c), ur.adjoint())
    prod = QMatrix(pl @ prod.z @ pr.T, pl @ prod.w @ pr.T)
    target = form.block_diagonal()
    scale = max(frobenius_norm(c), 1e-300)
    return frobenius_norm(prod - target) / scale


def circulant_spectrum(spec: CirculantSpec, rtol: float = 1e-9) -> QSpectrum:
    """Spectrum from the fiber union, cross-checked against the dense matrix.

    The embedded spectrum of the circulant is the disjoint union over all
    sample indices k of the spectrum of ``G_R`` evaluated at ``theta_k``;
    singular values (and canonical eigenvalues when s = t) follow by
    deduplication and conjugate-pair selection.
    """
    mis = MultiIndexSet(spec.nvec)
    idx = mis.indices()
    z_pos, w_pos = spec.coefficient_transforms(idx.astype(float))
    neg = (-idx) % np.array(spec.nvec)
    strides = np.ones(spec.d, dtype=np.int64)
    for axis in range(spec.d - 2, -1, -1):
        strides[axis] = strides[axis + 1] * spec.nvec[axis + 1]
    neg_flat = (neg * strides).sum(axis=-1)
    z_neg, w_neg = z_pos[neg_flat], w_pos[neg_flat]
    s, t = spec.s, spec.t
    fibers = np.empty((mis.n_total, 2 * s, 2 * t), dtype=np.complex128)
    fibers[:, :s, :t] = z_pos
    fibers[:, :s, t:] = w_pos
    fibers[:, s:, :t] = -w_neg.conj()
    fibers[:, s:, t:] = z_neg.conj()
    sv_union = np.sort(np.linalg.svd(fibers, compute_uv=False).reshape(-1))[::-1]
    singular = sv_union[::2].copy()
    canonical = None
    if s == t:
        eig_union = np.linalg.eigvals(fibers).reshape(-1)
        canonical = canonical_from_phi_eigenvalues(eig_union)
    dense = assemble_circulant(spec)
    sv_dense = q_singular_values(dense)
    scale = max(sv_dense[0] if sv_dense.size else 0.0, 1.0)
    if np.max(np.abs(sv_dense - singular), initial=0.0) > rtol * scale:
        raise FiberReconstructionError(
            "fiber-union singular values disagree with the assembled matrix"
        )
    return QSpectrum(canonical, singular)


# ---------------------------------------------------------------------------
# circulant approximants for right Toeplitz sequences
# ---------------------------------------------------------------------------


def _truncation_support(
    spec: SymbolSpec, m: int, prune_rtol: float = PRUNE_RTOL
) -> list[tuple[tuple[int, ...], np.ndarray, np.ndarray]]:
    """Right-kernel coefficients on the cube max-norm <= m, pruned of zeros."""
    right = reduce_to_right(spec)
    entries = []
    peak = 0.0
    for rho in itertools.product(*([range(-m, m + 1)] * spec.d)):
        zb = right.z_hat(rho)
        wb = right.w_hat(tuple(-c for c in rho))
        entries.append((rho, zb, wb))
        peak = max(peak, float(np.abs(zb).max(initial=0.0)), float(np.abs(wb).max(initial=0.0)))
    tol = prune_rtol * max(peak, 1e-300)
    return [
        (rho, zb, wb)
        for rho, zb, wb in entries
        if max(np.abs(zb).max(initial=0.0), np.abs(wb).max(initial=0.0)) > tol
    ]


def acs_truncate(spec: SymbolSpec, nvec, m: int) -> CirculantSpec:
    """Circulant approximant: truncated right-kernel coefficients on periodic shifts.

    Symbols with other kernels are reduced to the right kernel first (the
    Toeplitz matrices are unchanged by that reduction).  Requires
    ``n_l >= 2m + 1`` so the truncation indices stay distinct mod n.
    """
    nvec = tuple(int(n) for n in nvec)
    if len(nvec) != spec.d:
        raise ValueError(f"nvec has {len(nvec)} levels, symbol has d={spec.d}")
    if m < 0:
        raise ValueError("truncation level m must be >= 0")
    if any(n < 2 * m + 1 for n in nvec):
        raise ValueError(
            f"nvec={nvec} too small for truncation m={m}: need n >= 2m+1 "
            "for distinct residues"
        )
    table = {rho: (zb, wb) for rho, zb, wb in _truncation_support(spec, m)}
    return CirculantSpec(nvec, spec.s, spec.t, table)


def truncated_symbol(spec: SymbolSpec, m: int) -> SymbolSpec:
    """The degree-m right-kernel trigonometric truncation F_m of the symbol."""
    table = {rho: (zb, wb) for rho, zb, wb in _truncation_support(spec, m)}
    body = TrigPoly(spec.d, spec.s, spec.t, table)
    return SymbolSpec(spec.d, spec.s, spec.t, KernelPartition.right(spec.d), body)


@dataclass(frozen=True)
class AcsWitness:
    """Measured low-rank/low-norm split of the circulant approximation.

    ``rank_part`` is rank(T_n(F_m) - B_{n,m}) / r_n (the corner correction),
    ``norm_part`` the normalized trace norm of T_n(F) - T_n(F_m), with
    ``r_n = N_n min(s, t)``.  ``rank_bound`` is the shift-corner estimate
    ``2 sum_l (1/n_l) sum_{rho} |rho_l|`` over the truncation support.
    ``spectral_*`` report the alternative operator-norm witness from an
    SVD split of the tail (smallest value of rank/r_n + leftover norm).
    """

    m: int
    nvec: tuple[int, ...]
    r_n: int
    rank_part: float
    norm_part: float
    rank_bound: float
    spectral_rank_part: float
    spectral_norm_part: float


def acs_witness(spec: SymbolSpec, nvec, m: int) -> AcsWitness:
    """Measure the a.c.s. decomposition of T_n against the circulant approximant."""
    nvec = tuple(int(n) for n in nvec)
    right = reduce_to_right(spec)
    support = _truncation_support(spec, m)
    circ = CirculantSpec(nvec, spec.s, spec.t, {rho: (zb, wb) for rho, zb, wb in support})
    f_m = truncated_symbol(spec, m)
    t_full = assemble(right, nvec)
    t_trunc = assemble(f_m, nvec)
    b = assemble_circulant(circ)
    r_n = int(np.prod(nvec)) * min(spec.s, spec.t)
    corner = t_trunc - b
    rank_part = rank_h(corner) / r_n
    tail = t_full - t_trunc
    norm_part = schatten_norm(tail, 1) / r_n
    bound = 2.0 * sum(
        (1.0 / n) * sum(abs(rho[axis]) for rho, _, _ in support)
        for axis, n in enumerate(nvec)
    )
    sv = q_singular_values(tail)
    best_rank, best_norm, best_obj = 0.0, float(sv[0]) if sv.size else 0.0, math.inf
    for k in range(sv.size + 1):
        omega = float(sv[k]) if k < sv.size else 0.0
        obj = k / r_n + omega
        if obj < best_obj:
            best_obj, best_rank, best_norm = obj, k / r_n, omega
    return AcsWitness(
        m=m,
        nvec=nvec,
        r_n=r_n,
        rank_part=float(rank_part),
        norm_part=float(norm_part),
        rank_bound=float(bound),
        spectral_rank_part=float(best_rank),
        spectral_norm_part=float(best_norm),
    )


def su_profile(a: QMatrix, thresholds) -> np.ndarray:
    """Fractions of singular values above each threshold (sparse-unboundedness probe)."""
    thresholds = np.asarray(thresholds, dtype=float)
    if np.any(thresholds <= 0):
        raise ValueError("thresholds must be positive")
    sv = q_singular_values(a)
    r_n = max(sv.size, 1)
    return np.array([(sv > m).sum() / r_n for m in thresholds])
