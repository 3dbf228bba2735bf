"""Generating functions F: T^d -> H^{s x t} and their kernel machinery.

A symbol is either a finite trigonometric-polynomial coefficient table or a
pointwise-evaluable sampled function, tagged with an ordered kernel partition
(S_L, S_R) that says which torus variables ride on the left and which on the
right of the coefficients.

Everything kernel-dependent reduces to the two slice functions of
``F = Z + W*j``: the sandwich Fourier coefficient under a partition with
sign-flip ``m~`` (keep S_L coordinates, negate S_R coordinates) is

    F^(m) = Z^(m) + W^(m~) * j,

where the hats on the right are plain complex Fourier coefficients.  Both
body types therefore expose ``z_hat``/``w_hat`` lookups plus pointwise slice
evaluation; each kernel-class operation is a thin layer on top.

For sampled bodies, coefficients come from uniform-grid quadrature with M
points per dimension (``theta_j = -pi + 2*pi*j/M``), evaluated once and
cached as an FFT table.  The rule is exact for trigonometric polynomials of
degree < M/2 and first-order accurate at jump discontinuities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .qmatrix import QMatrix

__all__ = [
    "KernelPartition",
    "TrigPoly",
    "Sampled",
    "SymbolSpec",
    "EmbeddedSymbol",
    "HermitianReport",
    "fourier_coeff",
    "reduce_to_right",
    "symbol_adjoint",
    "symbol_conjugate",
    "symbol_linear_combination",
    "hermitian_criterion",
    "embedded_symbol",
    "symbol_lp_norm",
    "spectral_range_bounds",
    "builtin",
    "BUILTIN_NAMES",
    "demo_herm_1d",
    "symbol_to_json",
    "symbol_from_json",
    "torus_grid",
]

DEFAULT_SAMPLE_GRID = 64
#: dense grids for essential-range scans, per dimension
RANGE_GRIDS = {1: 1024, 2: 128}


# ---------------------------------------------------------------------------
# kernel partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelPartition:
    """Ordered disjoint partition of the d torus variables into S_L and S_R."""

    d: int
    s_left: tuple[int, ...]
    s_right: tuple[int, ...]

    def __post_init__(self):
        left = tuple(sorted(self.s_left))
        right = tuple(sorted(self.s_right))
        object.__setattr__(self, "s_left", left)
        object.__setattr__(self, "s_right", right)
        if set(left) & set(right):
            raise ValueError("S_L and S_R must be disjoint")
        if set(left) | set(right) != set(range(1, self.d + 1)):
            raise ValueError(f"S_L and S_R must partition 1..{self.d}")

    @staticmethod
    def left(d: int) -> "KernelPartition":
        return KernelPartition(d, tuple(range(1, d + 1)), ())

    @staticmethod
    def right(d: int) -> "KernelPartition":
        return KernelPartition(d, (), tuple(range(1, d + 1)))

    @property
    def is_left(self) -> bool:
        return not self.s_right

    @property
    def is_right(self) -> bool:
        return not self.s_left

    @property
    def label(self) -> str:
        if self.is_left:
            return "L"
        if self.is_right:
            return "R"
        return "S" + "".join(map(str, self.s_left)) + "".join(map(str, self.s_right))

    def sign_flip(self, m: tuple[int, ...]) -> tuple[int, ...]:
        """``m~``: keep S_L coordinates, negate S_R coordinates."""
        flip = [1] * self.d
        for j in self.s_right:
            flip[j - 1] = -1
        return tuple(int(c) * f for c, f in zip(m, flip))

    def reflect(self, thetas: np.ndarray) -> np.ndarray:
        """The reflection r_{S_L}: negate S_L coordinates of theta."""
        out = np.array(thetas, dtype=float, copy=True)
        for j in self.s_left:
            out[..., j - 1] = -out[..., j - 1]
        return out

    def reflect_index(self, m: tuple[int, ...]) -> tuple[int, ...]:
        out = list(m)
        for j in self.s_left:
            out[j - 1] = -out[j - 1]
        return tuple(out)


def parse_kernel(token, d: int) -> KernelPartition:
    """Parse "L", "R", "S12"-style shorthand, or an explicit mapping."""
    if isinstance(token, KernelPartition):
        if token.d != d:
            raise ValueError(f"kernel has d={token.d}, symbol has d={d}")
        return token
    if isinstance(token, Mapping):
        return KernelPartition(d, tuple(token["s_left"]), tuple(token["s_right"]))
    if isinstance(token, str):
        name = token.strip()
        if name.upper() == "L":
            return KernelPartition.left(d)
        if name.upper() == "R":
            return KernelPartition.right(d)
        if name.upper().startswith("S"):
            digits = [int(c) for c in name[1:] if c.isdigit()]
            if len(digits) == d and sorted(digits) == list(range(1, d + 1)):
                # "S12" = variables listed left-side first; split point is
                # everything before the ordered tail that forms S_R
                # convention: first half left, second half right for even d
                half = d // 2
                return KernelPartition(d, tuple(digits[:half]), tuple(digits[half:]))
        raise ValueError(f"cannot parse kernel token {token!r} for d={d}")
    raise TypeError(f"unsupported kernel token {token!r}")


def all_kernels(d: int) -> list[KernelPartition]:
    """Every ordered partition of [d]: L, R, and the sandwich classes (4 for d=2)."""
    out = []
    for mask in range(1 << d):
        left = tuple(j + 1 for j in range(d) if mask & (1 << j))
        right = tuple(j + 1 for j in range(d) if not mask & (1 << j))
        out.append(KernelPartition(d, left, right))
    # stable, readable order: L first, R last, sandwiches in between
    out.sort(key=lambda k: (not k.is_left, k.is_right, k.s_left))
    return out


# ---------------------------------------------------------------------------
# symbol bodies
# ---------------------------------------------------------------------------


def _freeze_block(b: np.ndarray, s: int, t: int) -> np.ndarray:
    arr = np.array(b, dtype=np.complex128, copy=True)
    if arr.shape != (s, t):
        raise ValueError(f"block shape {arr.shape}, expected {(s, t)}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Finite coefficient table multi-index -> quaternion s x t block.

    Blocks are stored as slice pairs ``(z, w)``.  The table is kernel-free;
    the owning :class:`SymbolSpec` supplies the partition that places the
    exponentials.
    """

    d: int
    s: int
    t: int
    table: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]]

    def __post_init__(self):
        clean = {}
        for m, (zb, wb) in self.table.items():
            key = tuple(int(c) for c in m)
            if len(key) != self.d:
                raise ValueError(f"multi-index {m} has wrong length for d={self.d}")
            clean[key] = (
                _freeze_block(zb, self.s, self.t),
                _freeze_block(wb, self.s, self.t),
            )
        object.__setattr__(self, "table", clean)

    @property
    def degree(self) -> int:
        if not self.table:
            return 0
        return max(max(abs(c) for c in m) for m in self.table)


@dataclass(frozen=True, eq=False)
class Sampled:
    """Pointwise evaluator theta -> s x t quaternion block, with a quadrature grid.

    ``fn`` must be pure: the grid samples are evaluated once and cached.
    """

    d: int
    s: int
    t: int
    fn: Callable[[np.ndarray], QMatrix]
    grid: int = DEFAULT_SAMPLE_GRID
    name: str | None = None

    def __post_init__(self):
        if self.grid < 4:
            raise ValueError("sample grid must have at least 4 points per dimension")
        object.__setattr__(self, "_cache", {})

    def _samples(self) -> tuple[np.ndarray, np.ndarray]:
        """Slice samples on the quadrature grid, shape (M,)*d + (s, t)."""
        cache = self._cache
        if "samples" not in cache:
            m = self.grid
            thetas = torus_grid(self.d, m)
            zs = np.empty((len(thetas), self.s, self.t), dtype=np.complex128)
            ws = np.empty_like(zs)
            for idx, th in enumerate(thetas):
                q = self.fn(th)
                zs[idx] = q.z
                ws[idx] = q.w
            shape = (m,) * self.d + (self.s, self.t)
            cache["samples"] = (zs.reshape(shape), ws.reshape(shape))
        return cache["samples"]

    def _fft_tables(self) -> tuple[np.ndarray, np.ndarray]:
        cache = self._cache
        if "fft" not in cache:
            zg, wg = self._samples()
            axes = tuple(range(self.d))
            scale = 1.0 / self.grid**self.d
            cache["fft"] = (
                np.fft.fftn(zg, axes=axes) * scale,
                np.fft.fftn(wg, axes=axes) * scale,
            )
        return cache["fft"]


def torus_grid(d: int, m: int) -> np.ndarray:
    """Uniform grid ``theta_j = -pi + 2*pi*j/m`` per dimension, shape (m**d, d).

    Lexicographic in the per-dimension index, so position ``flat(j1..jd)``
    matches numpy's C-order reshape of per-axis FFT data.  Contains 0 for
    even m.
    """
    axis = -np.pi + 2.0 * np.pi * np.arange(m) / m
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=-1)


# ---------------------------------------------------------------------------
# the symbol spec
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SymbolSpec:
    """A generating function: body + kernel partition + block dimensions."""

    d: int
    s: int
    t: int
    kernel: KernelPartition
    body: TrigPoly | Sampled

    def __post_init__(self):
        if self.kernel.d != self.d:
            raise ValueError("kernel dimension does not match symbol dimension")
        if (self.body.d, self.body.s, self.body.t) != (self.d, self.s, self.t):
            raise ValueError("body dimensions do not match symbol dimensions")

    # -- slice Fourier tables ---------------------------------------------

    def z_hat(self, m: tuple[int, ...]) -> np.ndarray:
        """Complex Fourier coefficient of the slice function Z at m."""
        if isinstance(self.body, TrigPoly):
            hit = self.body.table.get(tuple(m))
            return hit[0] if hit is not None else np.zeros((self.s, self.t), complex)
        return _sampled_hat(self.body, 0, tuple(m))

    def w_hat(self, k: tuple[int, ...]) -> np.ndarray:
        """Complex Fourier coefficient of the slice function W at k."""
        if isinstance(self.body, TrigPoly):
            hit = self.body.table.get(self.kernel.sign_flip(tuple(k)))
            return hit[1] if hit is not None else np.zeros((self.s, self.t), complex)
        return _sampled_hat(self.body, 1, tuple(k))

    # -- pointwise slice evaluation -----------------------------------------

    def eval_zw(self, thetas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Slice functions Z, W at each row of ``thetas``; shape (P, s, t) each."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        if thetas.shape[1] != self.d:
            raise ValueError(f"theta rows must have length d={self.d}")
        if isinstance(self.body, TrigPoly):
            # synthesis kernel is the conjugate of the analysis kernel, so the
            # table entries are exactly the sandwich Fourier coefficients
            p = thetas.shape[0]
            z = np.zeros((p, self.s, self.t), dtype=np.complex128)
            w = np.zeros_like(z)
            flip = self.kernel.sign_flip
            for m, (zb, wb) in self.body.table.items():
                z += np.exp(1j * (thetas @ np.array(m)))[:, None, None] * zb
                w += np.exp(1j * (thetas @ np.array(flip(m))))[:, None, None] * wb
            return z, w
        z = np.empty((thetas.shape[0], self.s, self.t), dtype=np.complex128)
        w = np.empty_like(z)
        for i, th in enumerate(thetas):
            q = self.body.fn(th)
            z[i] = q.z
            w[i] = q.w
        return z, w

    def eval_q(self, theta) -> QMatrix:
        z, w = self.eval_zw(np.asarray(theta, dtype=float).reshape(1, -1))
        return QMatrix(z[0], w[0])

    @property
    def is_trig_poly(self) -> bool:
        return isinstance(self.body, TrigPoly)

    def with_kernel(self, kernel: KernelPartition) -> "SymbolSpec":
        return SymbolSpec(self.d, self.s, self.t, kernel, self.body)


def _sampled_hat(body: Sampled, which: int, m: tuple[int, ...]) -> np.ndarray:
    tables = body._fft_tables()[which]
    if any(abs(c) >= body.grid for c in m):
        raise ValueError(
            f"harmonic {m} is aliased on a grid of {body.grid} points per dimension"
        )
    idx = tuple(int(c) % body.grid for c in m)
    phase = -1.0 if (sum(abs(c) for c in m) % 2) else 1.0
    return phase * tables[idx]


# ---------------------------------------------------------------------------
# sandwich Fourier coefficients and kernel transforms
# ---------------------------------------------------------------------------


def fourier_coeff(
    spec: SymbolSpec, m: tuple[int, ...], kernel: KernelPartition | None = None
) -> QMatrix:
    """Sandwich Fourier coefficient F^(m) = Z^(m) + W^(m~) j under ``kernel``.

    ``kernel`` defaults to the symbol's own partition.  For trig polynomials
    this is a table lookup; for sampled bodies it is grid quadrature.
    """
    kernel = spec.kernel if kernel is None else kernel
    m = tuple(int(c) for c in m)
    return QMatrix(spec.z_hat(m), spec.w_hat(kernel.sign_flip(m)))


def fourier_coeff_table(
    spec: SymbolSpec, diffs: Iterable[tuple[int, ...]], kernel: KernelPartition | None = None
) -> tuple[np.ndarray, np.ndarray, dict[tuple[int, ...], int]]:
    """Bulk coefficients: arrays (K, s, t) of z/w parts plus an index map."""
    kernel = spec.kernel if kernel is None else kernel
    diffs = [tuple(int(c) for c in m) for m in diffs]
    index = {m: i for i, m in enumerate(diffs)}
    zc = np.zeros((len(diffs), spec.s, spec.t), dtype=np.complex128)
    wc = np.zeros_like(zc)
    for m, i in index.items():
        zc[i] = spec.z_hat(m)
        wc[i] = spec.w_hat(kernel.sign_flip(m))
    return zc, wc, index


def reduce_to_right(spec: SymbolSpec, kernel: KernelPartition | None = None) -> SymbolSpec:
    """The right-kernel symbol H = Z + (W o r_{S_L}) j with identical Toeplitz matrices.

    ``kernel`` is the partition whose Toeplitz family is being reduced
    (default: the symbol's own); for every n the matrices satisfy
    ``T_n^(kernel)(F) = T_n^(R)(H)``.  For trig polynomials the reduction is
    a pure re-keying of the coefficient table (bitwise exact); sampled bodies
    get a reflected evaluator.
    """
    kernel = spec.kernel if kernel is None else kernel
    right = KernelPartition.right(spec.d)
    if kernel.is_right and spec.kernel.is_right:
        return spec
    if isinstance(spec.body, Sampled):
        if kernel.is_right:
            return spec.with_kernel(right)
        src = spec.body
        reflect = kernel.reflect

        def fn(theta: np.ndarray) -> QMatrix:
            a = src.fn(theta)
            b = src.fn(reflect(theta))
            return QMatrix(a.z, b.w)

        body = Sampled(spec.d, spec.s, spec.t, fn, src.grid)
        return SymbolSpec(spec.d, spec.s, spec.t, right, body)
    # right-kernel table of H: z-parts keep their analysis index, the w-part
    # stored at key k lands at r_kernel(-sign_flip_def(k))
    table: dict[tuple[int, ...], list[np.ndarray]] = {}
    zero = lambda: [np.zeros((spec.s, spec.t), complex), np.zeros((spec.s, spec.t), complex)]
    for k, (zb, wb) in spec.body.table.items():
        entry = table.setdefault(k, zero())
        entry[0] = zb
        m = kernel.reflect_index(tuple(-c for c in spec.kernel.sign_flip(k)))
        entry_w = table.setdefault(m, zero())
        entry_w[1] = wb
    body = TrigPoly(
        spec.d, spec.s, spec.t, {m: (v[0], v[1]) for m, v in table.items()}
    )
    return SymbolSpec(spec.d, spec.s, spec.t, right, body)


def symbol_adjoint(spec: SymbolSpec) -> SymbolSpec:
    """The pointwise conjugate transpose F*, tagged with the swapped kernel.

    ``F*(theta) = Z(theta)* - W(theta)^T j``; the assembled Toeplitz matrices
    satisfy ``T^(S_L,S_R)(F)* = T^(S_R,S_L)(F*)``.
    """
    swapped = KernelPartition(spec.d, spec.kernel.s_right, spec.kernel.s_left)
    if isinstance(spec.body, TrigPoly):
        table: dict[tuple[int, ...], list[np.ndarray]] = {}
        zero = lambda: [np.zeros((spec.t, spec.s), complex), np.zeros((spec.t, spec.s), complex)]
        for m, (zb, wb) in spec.body.table.items():
            neg = tuple(-c for c in m)
            entry = table.setdefault(neg, zero())
            entry[0] = zb.conj().T
            entry[1] = -wb.T
        body = TrigPoly(spec.d, spec.t, spec.s, {m: (v[0], v[1]) for m, v in table.items()})
        return SymbolSpec(spec.d, spec.t, spec.s, swapped, body)
    src = spec.body

    def fn(theta: np.ndarray) -> QMatrix:
        return src.fn(theta).adjoint()

    body = Sampled(spec.d, spec.t, spec.s, fn, src.grid)
    return SymbolSpec(spec.d, spec.t, spec.s, swapped, body)


def symbol_conjugate(spec: SymbolSpec) -> SymbolSpec:
    """Entrywise quaternion conjugation: ``conj(F) = conj(Z) - W j`` pointwise."""
    if isinstance(spec.body, TrigPoly):
        table: dict[tuple[int, ...], list[np.ndarray]] = {}
        zero = lambda: [np.zeros((spec.s, spec.t), complex), np.zeros((spec.s, spec.t), complex)]
        for m, (zb, wb) in spec.body.table.items():
            neg = tuple(-c for c in m)
            table.setdefault(neg, zero())[0] = zb.conj()
            table.setdefault(m, zero())[1] = -wb
        body = TrigPoly(spec.d, spec.s, spec.t, {m: (v[0], v[1]) for m, v in table.items()})
        return SymbolSpec(spec.d, spec.s, spec.t, spec.kernel, body)
    src = spec.body

    def fn(theta: np.ndarray) -> QMatrix:
        return src.fn(theta).conj_entrywise()

    body = Sampled(spec.d, spec.s, spec.t, fn, src.grid)
    return SymbolSpec(spec.d, spec.s, spec.t, spec.kernel, body)


def symbol_linear_combination(
    a: complex, f: SymbolSpec, b: complex, g: SymbolSpec
) -> SymbolSpec:
    """Left slice-scalar combination ``a F + b G`` (same dims and kernel)."""
    if (f.d, f.s, f.t) != (g.d, g.s, g.t) or f.kernel != g.kernel:
        raise ValueError("symbols must share dimensions and kernel")
    a, b = complex(a), complex(b)
    if isinstance(f.body, TrigPoly) and isinstance(g.body, TrigPoly):
        table: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]] = {}
        keys = set(f.body.table) | set(g.body.table)
        zero = (np.zeros((f.s, f.t), complex), np.zeros((f.s, f.t), complex))
        for m in keys:
            fz, fw = f.body.table.get(m, zero)
            gz, gw = g.body.table.get(m, zero)
            table[m] = (a * fz + b * gz, a * fw + b * gw)
        return SymbolSpec(f.d, f.s, f.t, f.kernel, TrigPoly(f.d, f.s, f.t, table))

    def fn(theta: np.ndarray) -> QMatrix:
        return f.eval_q(theta).scale_left(a) + g.eval_q(theta).scale_left(b)

    grid = max(
        f.body.grid if isinstance(f.body, Sampled) else DEFAULT_SAMPLE_GRID,
        g.body.grid if isinstance(g.body, Sampled) else DEFAULT_SAMPLE_GRID,
    )
    return SymbolSpec(f.d, f.s, f.t, f.kernel, Sampled(f.d, f.s, f.t, fn, grid))


# ---------------------------------------------------------------------------
# Hermitian criterion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HermitianReport:
    """Outcome of the two-condition Hermitian check."""

    is_hermitian: bool
    z_hermitian: bool
    w_odd_transpose: bool
    z_residual: float
    w_residual: float


def hermitian_criterion(spec: SymbolSpec, tol: float | None = None) -> HermitianReport:
    """Check Z(theta) Hermitian a.e. and W(-theta) = -W(theta)^T a.e.

    Trig polynomials are checked exactly on coefficients
    (Z^(p) = Z^(-p)*, W^(q) = -W^(-q)^T); sampled bodies on their grid.
    The matrices T_n are Hermitian for every n exactly when both hold,
    independently of the kernel class.
    """
    if spec.s != spec.t:
        raise ValueError("Hermitian criterion needs square blocks (s == t)")
    if isinstance(spec.body, TrigPoly):
        tol = 1e-12 if tol is None else tol
        scale = 1.0
        for zb, wb in spec.body.table.values():
            scale = max(scale, np.abs(zb).max(initial=0.0), np.abs(wb).max(initial=0.0))
        z_res = 0.0
        w_res = 0.0
        zkeys = set(spec.body.table)
        for m in zkeys | {tuple(-c for c in m) for m in zkeys}:
            z_res = max(z_res, float(np.abs(spec.z_hat(m) - spec.z_hat(tuple(-c for c in m)).conj().T).max(initial=0.0)))
        flip = spec.kernel.sign_flip
        wkeys = {flip(m) for m in zkeys}
        for q in wkeys | {tuple(-c for c in q) for q in wkeys}:
            w_res = max(w_res, float(np.abs(spec.w_hat(q) + spec.w_hat(tuple(-c for c in q)).T).max(initial=0.0)))
        z_ok = z_res <= tol * scale
        w_ok = w_res <= tol * scale
        return HermitianReport(z_ok and w_ok, z_ok, w_ok, z_res, w_res)
    tol = 1e-10 if tol is None else tol
    body = spec.body
    zg, wg = body._samples()
    m = body.grid
    flat_z = zg.reshape(-1, spec.s, spec.t)
    flat_w = wg.reshape(-1, spec.s, spec.t)
    scale = max(1.0, np.abs(flat_z).max(initial=0.0), np.abs(flat_w).max(initial=0.0))
    z_res = float(np.abs(flat_z - flat_z.conj().transpose(0, 2, 1)).max(initial=0.0))
    # grid index of -theta: j -> (m - j) mod m in every dimension
    neg = wg
    for axis in range(spec.d):
        neg = np.flip(np.roll(neg, -1, axis=axis), axis=axis)
    flat_neg = neg.reshape(-1, spec.s, spec.t)
    w_res = float(np.abs(flat_neg + flat_w.transpose(0, 2, 1)).max(initial=0.0))
    z_ok = z_res <= tol * scale
    w_ok = w_res <= tol * scale
    return HermitianReport(z_ok and w_ok, z_ok, w_ok, z_res, w_res)


# ---------------------------------------------------------------------------
# embedded complex symbols G_tau
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmbeddedSymbol:
    """The complex 2s x 2t symbol G_tau of a quaternion symbol under a kernel.

    Pointwise,

        G(theta) = [[ Z(theta),               W(r(-theta)) ],
                    [ -conj(W(r(theta))),     conj(Z(-theta)) ]]

    with r = r_{S_L}; the left kernel gives (W(theta), -conj(W(-theta))) and
    the right kernel (W(-theta), -conj(W(theta))).
    """

    source: SymbolSpec
    kernel: KernelPartition

    @property
    def d(self) -> int:
        return self.source.d

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * self.source.s, 2 * self.source.t)

    def evaluate(self, thetas: np.ndarray) -> np.ndarray:
        """Values on each theta row; shape (P, 2s, 2t)."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        src, ker = self.source, self.kernel
        z_pos, _ = src.eval_zw(thetas)
        z_neg, _ = src.eval_zw(-thetas)
        _, w_rneg = src.eval_zw(ker.reflect(-thetas))
        _, w_rpos = src.eval_zw(ker.reflect(thetas))
        p = thetas.shape[0]
        s, t = src.s, src.t
        out = np.empty((p, 2 * s, 2 * t), dtype=np.complex128)
        out[:, :s, :t] = z_pos
        out[:, :s, t:] = w_rneg
        out[:, s:, :t] = -w_rpos.conj()
        out[:, s:, t:] = z_neg.conj()
        return out

    def __call__(self, theta) -> np.ndarray:
        return self.evaluate(np.asarray(theta, dtype=float).reshape(1, -1))[0]


def embedded_symbol(spec: SymbolSpec, kernel: KernelPartition | None = None) -> EmbeddedSymbol:
    """The complex symbol whose Toeplitz matrices embed T_n^(kernel)(F)."""
    return EmbeddedSymbol(spec, spec.kernel if kernel is None else kernel)


# ---------------------------------------------------------------------------
# norms and spectral range
# ---------------------------------------------------------------------------


def _pointwise_singular_values(spec: SymbolSpec, thetas: np.ndarray) -> np.ndarray:
    """Quaternion singular values of F(theta) per grid point; shape (P, min(s,t))."""
    z, w = spec.eval_zw(thetas)
    blocks = np.concatenate(
        [
            np.concatenate([z, w], axis=2),
            np.concatenate([-w.conj(), z.conj()], axis=2),
        ],
        axis=1,
    )
    sv = np.linalg.svd(blocks, compute_uv=False)
    return sv[:, ::2]


def symbol_lp_norm(spec: SymbolSpec, p: float, grid: int | None = None) -> float:
    """The L^p norm with pointwise Schatten-p norms, by grid quadrature.

    Satisfies ``||F||_{L^p} = 2**(-1/p) * ||Phi o F||_{L^p}``.
    """
    p = float(p)
    if not (p >= 1.0):
        raise ValueError(f"p must lie in [1, inf], got {p}")
    if grid is None:
        grid = spec.body.grid if isinstance(spec.body, Sampled) else DEFAULT_SAMPLE_GRID
    thetas = torus_grid(spec.d, grid)
    sv = _pointwise_singular_values(spec, thetas)
    if math.isinf(p):
        return float(sv[:, 0].max(initial=0.0))
    pointwise = np.sum(sv**p, axis=1)
    volume = (2.0 * np.pi) ** spec.d
    return float((volume * pointwise.mean()) ** (1.0 / p))


def spectral_range_bounds(
    spec: SymbolSpec,
    kernel: KernelPartition | None = None,
    grid: int | None = None,
) -> tuple[float, float]:
    """Grid approximations of ess-inf lambda_min(G_tau) and ess-sup lambda_max(G_tau).

    Requires the Hermitian criterion; the returned interval contains the
    spectra of every assembled Toeplitz matrix (up to grid resolution).
    """
    report = hermitian_criterion(spec)
    if not report.is_hermitian:
        raise ValueError(f"symbol fails the Hermitian criterion: {report}")
    if grid is None:
        grid = RANGE_GRIDS.get(spec.d, 32)
    g = embedded_symbol(spec, kernel)
    values = g.evaluate(torus_grid(spec.d, grid))
    values = 0.5 * (values + values.conj().transpose(0, 2, 1))
    eigs = np.linalg.eigvalsh(values)
    return float(eigs.min()), float(eigs.max())


# ---------------------------------------------------------------------------
# built-in experiment symbols
# ---------------------------------------------------------------------------

BUILTIN_NAMES = ("herm_cont_2x2", "nonherm_cont_2x2", "herm_l1_2x2", "nonherm_l1_2x2")


def _torus_sign(x: float) -> float:
    """sign(theta) on the torus: 0 at the discontinuities 0 and -pi.

    The angle is first wrapped onto [-pi, pi), so evaluators stay 2*pi
    periodic under the reflections used by the embedded symbols.  The
    half-open torus makes -pi its own reflection; giving both jump points
    the value 0 keeps the function odd on every symmetric grid (a
    measure-zero change, so all a.e. statements are untouched).
    """
    x = x - 2.0 * math.pi * math.floor((x + math.pi) / (2.0 * math.pi))
    if x == 0.0 or x == -math.pi:
        return 0.0
    return math.copysign(1.0, x)


def _sign(x: float) -> float:
    """sign of a combined trig expression, with rounding-level values as 0.

    Arguments like sin(t1) + cos(t2)/4 hit exact symmetric zeros only where
    every term is individually at float-epsilon level; snapping those to the
    jump-point value 0 keeps the evaluation consistent under the exact
    negations and reflections the embedded symbols apply (measure zero, so
    a.e. statements are untouched).
    """
    if abs(x) < 1e-12:
        return 0.0
    return math.copysign(1.0, x)


def _herm_cont_2x2(theta: np.ndarray) -> QMatrix:
    t1, t2 = float(theta[0]), float(theta[1])
    diag = 2.0 + math.cos(t1) + math.cos(t2)
    s1, s2, s12 = math.sin(t1), math.sin(t2), math.sin(t1 - t2)
    z = np.array([[diag, 0.5j * s1], [-0.5j * s1, diag]], dtype=complex)
    off = 0.5 * s2 + 0.25j * s12
    w = np.array([[0.0, off], [off, 0.0]], dtype=complex)
    return QMatrix(z, w)


def _nonherm_cont_2x2(theta: np.ndarray) -> QMatrix:
    t1, t2 = float(theta[0]), float(theta[1])
    z = np.array(
        [
            [math.cos(t1) + math.cos(t2) + 1j * math.sin(t1), 0.0],
            [1j * (math.cos(t1) - math.sin(t2)), 1.0 + 0.5 * (math.cos(t1) - math.cos(t2))],
        ],
        dtype=complex,
    )
    w = np.array(
        [
            [math.sin(t2), 1j * (math.cos(t2) + math.sin(t1))],
            [0.0, 0.5 * math.sin(t1) - 0.5j * math.sin(t2)],
        ],
        dtype=complex,
    )
    return QMatrix(z, w)


def _herm_l1_2x2(theta: np.ndarray) -> QMatrix:
    g1, g2 = _torus_sign(float(theta[0])), _torus_sign(float(theta[1]))
    z = np.array([[2.0, 1j * g1], [-1j * g1, 2.0]], dtype=complex)
    w = np.array([[0.0, g2 * (1.0 + 1j)], [g2 * (1.0 + 1j), 0.0]], dtype=complex)
    return QMatrix(z, w)


def _nonherm_l1_2x2(theta: np.ndarray) -> QMatrix:
    t1, t2 = float(theta[0]), float(theta[1])
    g1, g2 = _torus_sign(t1), _torus_sign(t2)
    # 1 + (e^{j g1 pi/2} - e^{k g2 pi/2}) / 4 with the quaternion exponential
    phi1, phi2 = g1 * np.pi / 2.0, g2 * np.pi / 2.0
    z22 = 1.0 + 0.25 * (math.cos(phi1) - math.cos(phi2))
    w22 = 0.25 * math.sin(phi1) - 0.25j * math.sin(phi2)
    z = np.array(
        [
            [math.cos(t1) + 1j * math.sin(t1) + g1, 0.0],
            [1j * _sign(math.cos(t1) - math.sin(t2)), z22],
        ],
        dtype=complex,
    )
    w = np.array(
        [
            [g2, 1j * _sign(math.sin(t1) + 0.25 * math.cos(t2))],
            [0.0, w22],
        ],
        dtype=complex,
    )
    return QMatrix(z, w)


_BUILTIN_FNS = {
    "herm_cont_2x2": _herm_cont_2x2,
    "nonherm_cont_2x2": _nonherm_cont_2x2,
    "herm_l1_2x2": _herm_l1_2x2,
    "nonherm_l1_2x2": _nonherm_l1_2x2,
}


def builtin(name: str, grid: int = DEFAULT_SAMPLE_GRID) -> SymbolSpec:
    """One of the four built-in 2x2 experiment symbols on T^2, as a Sampled spec."""
    try:
        fn = _BUILTIN_FNS[name]
    except KeyError:
        raise ValueError(f"unknown builtin symbol {name!r}; choose from {BUILTIN_NAMES}")
    body = Sampled(2, 2, 2, fn, grid, name=name)
    return SymbolSpec(2, 2, 2, KernelPartition.right(2), body)


def demo_herm_1d() -> SymbolSpec:
    """The scalar demo symbol 2 + cos(theta) + sin(theta) j, as a TrigPoly.

    Hermitian with spectral bounds (2 - sqrt(2), 2 + sqrt(2)).
    """
    one = np.ones((1, 1), complex)
    zero = np.zeros((1, 1), complex)
    table = {
        (0,): (2.0 * one, zero),
        (1,): (0.5 * one, 0.5j * one),
        (-1,): (0.5 * one, -0.5j * one),
    }
    return SymbolSpec(1, 1, 1, KernelPartition.right(1), TrigPoly(1, 1, 1, table))


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def symbol_to_json(spec: SymbolSpec) -> str:
    """Serialize a symbol; TrigPoly tables round-trip exactly in decimal."""
    kernel = {"s_left": list(spec.kernel.s_left), "s_right": list(spec.kernel.s_right)}
    if isinstance(spec.body, TrigPoly):
        entries = []
        for m in sorted(spec.body.table):
            zb, wb = spec.body.table[m]
            block = [
                [
                    [zb[i, j].real, zb[i, j].imag, wb[i, j].real, wb[i, j].imag]
                    for j in range(spec.t)
                ]
                for i in range(spec.s)
            ]
            entries.append({"multi_index": list(m), "block": block})
        doc = {
            "type": "trig_poly",
            "d": spec.d,
            "s": spec.s,
            "t": spec.t,
            "kernel": kernel,
            "entries": entries,
        }
    else:
        if spec.body.name not in _BUILTIN_FNS:
            raise ValueError("only builtin sampled symbols can be serialized")
        doc = {
            "type": "sampled_builtin",
            "name": spec.body.name,
            "d": spec.d,
            "s": spec.s,
            "t": spec.t,
            "kernel": kernel,
            "grid": spec.body.grid,
        }
    return json.dumps(doc, indent=2)


def symbol_from_json(text: str) -> SymbolSpec:
    doc = json.loads(text)
    kernel = KernelPartition(
        int(doc["d"]), tuple(doc["kernel"]["s_left"]), tuple(doc["kernel"]["s_right"])
    )
    if doc["type"] == "sampled_builtin":
        spec = builtin(doc["name"], grid=int(doc["grid"]))
        return spec.with_kernel(kernel)
    if doc["type"] != "trig_poly":
        raise ValueError(f"unknown symbol document type {doc['type']!r}")
    d, s, t = int(doc["d"]), int(doc["s"]), int(doc["t"])
    table = {}
    for entry in doc["entries"]:
        m = tuple(int(c) for c in entry["multi_index"])
        zb = np.empty((s, t), dtype=np.complex128)
        wb = np.empty((s, t), dtype=np.complex128)
        for i in range(s):
            for j in range(t):
                q0, q1, q2, q3 = entry["block"][i][j]
                zb[i, j] = complex(q0, q1)
                wb[i, j] = complex(q2, q3)
        table[m] = (zb, wb)
    return SymbolSpec(d, s, t, kernel, TrigPoly(d, s, t, table))
