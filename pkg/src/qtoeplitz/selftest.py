"""Fast invariant suites over every module, runnable from the CLI.

Each suite exercises the structural identities at small sizes and reports
pass/fail with a short detail string.  The randomized suites take a seed
(default fixed, so repeated runs are identical).  ``inject_flip_error``
seeds a sign error into the analytic fiber path of the circulant canonical
form — the cross-validating reconstruction check must catch it, which is the
negative control for the whole self-test mechanism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quat import I, J, K, ONE, Quaternion, mul, norm, slice_join, slice_split
from .qmatrix import (
    QMatrix,
    adjoint,
    canonical_eigenvalues,
    frobenius_norm,
    matmul,
    phi_block_array,
    q_singular_values,
    random_qmatrix,
    rank_h,
    schatten_norm,
)
from .embedding import (
    perm_matrix,
    phi_blocked,
    phi_entrywise,
    phi_pullback,
    range_project,
)
from .symbols import (
    KernelPartition,
    SymbolSpec,
    TrigPoly,
    all_kernels,
    demo_herm_1d,
    embedded_symbol,
    fourier_coeff,
    hermitian_criterion,
    reduce_to_right,
    spectral_range_bounds,
    symbol_conjugate,
    symbol_linear_combination,
    torus_grid,
)
from .toeplitz import (
    adjoint_identity_check,
    assemble,
    embedding_identity_check,
    schatten_bound_check,
)
from .circulant import (
    CirculantSpec,
    FiberReconstructionError,
    acs_witness,
    assemble_circulant,
    canonical_x_form,
    circulant_spectrum,
    fix_pair_order,
    qdft_multilevel,
    reversal_multilevel,
    su_profile,
)
from .distribution import empirical_spectrum, quantile_distance, symbol_quantiles

__all__ = ["SuiteResult", "run_selftest", "SUITE_NAMES"]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def random_trig_poly(
    rng: np.random.Generator,
    d: int,
    s: int,
    t: int,
    degree: int,
    kernel: KernelPartition | None = None,
    density: float = 0.5,
) -> SymbolSpec:
    """Random trig-poly symbol with the given degree box (testing helper)."""
    table = {}
    for m in itertools.product(*([range(-degree, degree + 1)] * d)):
        if rng.random() < density:
            table[m] = (
                rng.standard_normal((s, t)) + 1j * rng.standard_normal((s, t)),
                rng.standard_normal((s, t)) + 1j * rng.standard_normal((s, t)),
            )
    if not table:
        table[(0,) * d] = (
            np.ones((s, t), dtype=complex),
            np.zeros((s, t), dtype=complex),
        )
    if kernel is None:
        kernel = KernelPartition.right(d)
    return SymbolSpec(d, s, t, kernel, TrigPoly(d, s, t, table))


def random_circulant_spec(
    rng: np.random.Generator, nvec, s: int, t: int, support: int = 3
) -> CirculantSpec:
    table = {}
    d = len(nvec)
    for _ in range(support):
        rho = tuple(int(rng.integers(0, n)) for n in nvec)
        table[rho] = (
            rng.standard_normal((s, t)) + 1j * rng.standard_normal((s, t)),
            rng.standard_normal((s, t)) + 1j * rng.standard_normal((s, t)),
        )
    return CirculantSpec(tuple(nvec), s, t, table)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _suite_quat_algebra(rng: np.random.Generator) -> tuple[bool, str]:
    units = {"1": ONE, "i": I, "j": J, "k": K}
    expected = {
        ("i", "i"): -ONE, ("i", "j"): K, ("i", "k"): -J,
        ("j", "i"): -K, ("j", "j"): -ONE, ("j", "k"): I,
        ("k", "i"): J, ("k", "j"): -I, ("k", "k"): -ONE,
    }
    for (a, b), want in expected.items():
        got = mul(units[a], units[b])
        if not got.isclose(want, 1e-15):
            return False, f"unit product {a}{b} = {got}, expected {want}"
    worst = 0.0
    for _ in range(1000):
        p = Quaternion(*rng.standard_normal(4))
        q = Quaternion(*rng.standard_normal(4))
        worst = max(worst, abs(norm(mul(p, q)) - norm(p) * norm(q)))
        sp = slice_split(p)
        if slice_join(sp.z, sp.w) != p:
            return False, "slice split/join round trip not exact"
    if worst > 1e-12:
        return False, f"modulus multiplicativity residual {worst:.2e}"
    return True, f"unit table exact, |pq|=|p||q| residual {worst:.2e}"


def _suite_embedding_algebra(rng: np.random.Generator) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(25):
        a = random_qmatrix(rng, 3, 3)
        b = random_qmatrix(rng, 3, 3)
        pa, pb = phi_block_array(a), phi_block_array(b)
        worst = max(worst, np.linalg.norm(phi_block_array(matmul(a, b)) - pa @ pb))
        worst = max(worst, np.linalg.norm(phi_block_array(adjoint(a)) - pa.conj().T))
        al, be = rng.standard_normal(2)
        worst = max(
            worst,
            np.linalg.norm(
                phi_block_array(QMatrix(al * a.z + be * b.z, al * a.w + be * b.w))
                - (al * pa + be * pb)
            ),
        )
    if worst > 1e-12:
        return False, f"*-algebra transport residual {worst:.2e}"
    a = random_qmatrix(rng, 3, 4)
    pm, pn = perm_matrix(3), perm_matrix(4)
    rel = np.linalg.norm(pm.T @ phi_entrywise(a).data @ pn - phi_blocked(a).data)
    if rel > 1e-13:
        return False, f"entrywise/blocked permutation relation residual {rel:.2e}"
    x = rng.standard_normal((6, 8)) + 1j * rng.standard_normal((6, 8))
    px = range_project(x)
    idem = np.linalg.norm(range_project(px.data).data - px.data)
    if idem > 1e-13:
        return False, f"projector not idempotent ({idem:.2e})"
    if np.linalg.norm(px.data, 2) > np.linalg.norm(x, 2) + 1e-12:
        return False, "projector increased the spectral norm"
    back = phi_pullback(phi_blocked(a))
    if frobenius_norm(back - a) > 1e-13:
        return False, "pullback round trip failed"
    low = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 8)) + 1j * (
        rng.standard_normal((6, 2)) @ rng.standard_normal((2, 8))
    )
    proj_rank = np.linalg.matrix_rank(range_project(low).data, tol=1e-10)
    raw_rank = np.linalg.matrix_rank(low, tol=1e-10)
    if proj_rank > 2 * raw_rank:
        return False, f"projection rank {proj_rank} > 2 x {raw_rank}"
    return True, f"transport residual {worst:.2e}"


def _suite_spectral_transport(rng: np.random.Generator) -> tuple[bool, str]:
    worst_dup = worst_p = 0.0
    for _ in range(40):
        rows, cols = int(rng.integers(1, 8)), int(rng.integers(1, 8))
        a = random_qmatrix(rng, rows, cols)
        sv_phi = np.linalg.svd(phi_block_array(a), compute_uv=False)
        sv_q = q_singular_values(a)
        worst_dup = max(worst_dup, float(np.abs(sv_phi - np.repeat(sv_q, 2)).max()))
        for p in (1.0, 2.0, np.inf):
            phi_p = (
                sv_phi[0]
                if np.isinf(p)
                else float(np.sum(sv_phi**p) ** (1.0 / p))
            )
            rel = abs(schatten_norm(a, p) - 2.0 ** (-1.0 / p if not np.isinf(p) else 0.0) * phi_p)
            worst_p = max(worst_p, rel / max(phi_p, 1e-30))
        tol = max(2 * rows, 2 * cols) * sv_phi[0] * 1e-12
        rank_c = int(np.count_nonzero(sv_phi > tol))
        if rank_c != 2 * rank_h(a):
            return False, f"rank doubling violated: {rank_c} vs 2*{rank_h(a)}"
    if worst_dup > 1e-10 or worst_p > 1e-10:
        return False, f"duplication {worst_dup:.2e} / Schatten scaling {worst_p:.2e}"
    herm = random_qmatrix(rng, 5, 5)
    herm = herm + adjoint(herm)
    eigs = canonical_eigenvalues(herm)
    if len(eigs) != 5 or np.abs(eigs.imag).max() > 1e-10:
        return False, "Hermitian canonical eigenvalues not real"
    return True, f"duplication {worst_dup:.2e}, Schatten scaling {worst_p:.2e}"


def _suite_symbol_identities(rng: np.random.Generator) -> tuple[bool, str]:
    grid = 48

    def quad_coeff(spec: SymbolSpec, kernel: KernelPartition, m) -> QMatrix:
        thetas = torus_grid(spec.d, grid)
        z, w = spec.eval_zw(thetas)
        m_arr = np.array(m, dtype=float)
        flip = np.array(kernel.sign_flip(tuple(m)), dtype=float)
        ker_z = np.exp(-1j * (thetas @ m_arr))[:, None, None]
        ker_w = np.exp(-1j * (thetas @ flip))[:, None, None]
        return QMatrix((z * ker_z).mean(axis=0), (w * ker_w).mean(axis=0))

    worst = 0.0
    for d in (1, 2):
        spec = random_trig_poly(rng, d, 2, 2, 1)
        for kernel in all_kernels(d):
            for _ in range(3):
                m = tuple(int(rng.integers(-2, 3)) for _ in range(d))
                direct = fourier_coeff(spec, m, kernel)
                quad = quad_coeff(spec, kernel, m)
                worst = max(worst, frobenius_norm(direct - quad))
        conj = symbol_conjugate(spec)
        for _ in range(4):
            m = tuple(int(rng.integers(-2, 3)) for _ in range(d))
            lhs = fourier_coeff(spec, m, KernelPartition.left(d))
            rhs = fourier_coeff(
                conj, tuple(-c for c in m), KernelPartition.right(d)
            ).conj_entrywise()
            worst = max(worst, frobenius_norm(lhs - rhs))
        other = random_trig_poly(rng, d, 2, 2, 1, kernel=spec.kernel)
        a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        combo = symbol_linear_combination(a, spec, b, other)
        for _ in range(3):
            m = tuple(int(rng.integers(-1, 2)) for _ in range(d))
            lhs = fourier_coeff(combo, m)
            rhs = fourier_coeff(spec, m).scale_left(a) + fourier_coeff(other, m).scale_left(b)
            worst = max(worst, frobenius_norm(lhs - rhs))
    if worst > 1e-10:
        return False, f"coefficient identity residual {worst:.2e}"
    return True, f"coefficient identities residual {worst:.2e}"


def _suite_toeplitz_identities(rng: np.random.Generator) -> tuple[bool, str]:
    worst = 0.0
    for d, nvec in ((1, (5,)), (2, (3, 4))):
        spec = random_trig_poly(rng, d, 2, 2, 2)
        for kernel in all_kernels(d):
            worst = max(worst, embedding_identity_check(spec, kernel, nvec))
            reduced = reduce_to_right(spec, kernel)
            direct = assemble(spec, nvec, kernel)
            via_right = assemble(reduced, nvec)
            if not (
                np.array_equal(direct.z, via_right.z)
                and np.array_equal(direct.w, via_right.w)
            ):
                return False, f"kernel reduction not exact for {kernel.label}"
        if not adjoint_identity_check(spec, nvec):
            return False, "adjoint identities failed"
    one = np.ones((1, 1), complex)
    zero = np.zeros((1, 1), complex)
    even = SymbolSpec(
        1, 1, 1, KernelPartition.right(1),
        TrigPoly(1, 1, 1, {(1,): (zero, 0.5 * one), (-1,): (zero, 0.5 * one)}),
    )
    t_l = assemble(even, (4,), KernelPartition.left(1))
    t_r = assemble(even, (4,), KernelPartition.right(1))
    if frobenius_norm(t_l - t_r) > 1e-14:
        return False, "even W should give identical left/right matrices"
    odd = SymbolSpec(
        1, 1, 1, KernelPartition.right(1),
        TrigPoly(1, 1, 1, {(1,): (zero, 0.5j * one), (-1,): (zero, -0.5j * one)}),
    )
    t_l = assemble(odd, (4,), KernelPartition.left(1))
    t_r = assemble(odd, (4,), KernelPartition.right(1))
    if frobenius_norm(t_l - t_r) < 1e-6:
        return False, "non-even W should give different left/right matrices"
    if worst > 1e-10:
        return False, f"embedding identity residual {worst:.2e}"
    return True, f"embedding identity residual {worst:.2e}"


def _suite_hermitian_localization(rng: np.random.Generator) -> tuple[bool, str]:
    spec = demo_herm_1d()
    report = hermitian_criterion(spec)
    if not report.is_hermitian:
        return False, "demo symbol should pass the criterion"
    lo, hi = spectral_range_bounds(spec)
    t = assemble(spec, (32,))
    if frobenius_norm(t - adjoint(t)) > 1e-12:
        return False, "demo Toeplitz matrix not Hermitian"
    eigs = empirical_spectrum(t, "eig")
    if eigs.min() < lo - 1e-8 or eigs.max() > hi + 1e-8:
        return False, f"eigenvalues escape [{lo:.6f}, {hi:.6f}]"
    if lo > 0 and eigs.min() <= 0:
        return False, "positive definiteness criterion violated"
    one = np.ones((1, 1), complex)
    zero = np.zeros((1, 1), complex)
    bad = SymbolSpec(
        1, 1, 1, KernelPartition.right(1),
        TrigPoly(
            1, 1, 1,
            {(0,): (2 * one, zero), (1,): (0.5 * one, 0.5 * one), (-1,): (0.5 * one, 0.5 * one)},
        ),
    )
    if hermitian_criterion(bad).is_hermitian:
        return False, "even-W symbol should fail the criterion"
    t_bad = assemble(bad, (6,))
    if frobenius_norm(t_bad - adjoint(t_bad)) < 1e-8:
        return False, "criterion-failing symbol produced a Hermitian matrix"
    return True, f"bounds ({lo:.6f}, {hi:.6f}) contain all spectra"


def _suite_schatten_bounds(rng: np.random.Generator) -> tuple[bool, str]:
    margin = np.inf
    for d, nvec in ((1, (8,)), (2, (3, 3))):
        for _ in range(3):
            spec = random_trig_poly(rng, d, int(rng.integers(1, 3)), int(rng.integers(1, 3)), 1)
            for kernel in all_kernels(d):
                for p in (1.0, 2.0, np.inf):
                    lhs, rhs = schatten_bound_check(spec, kernel, nvec, p)
                    if lhs > rhs * (1 + 1e-12):
                        return False, f"bound violated: {lhs:.4e} > {rhs:.4e} (p={p})"
                    margin = min(margin, rhs / max(lhs, 1e-30))
    return True, f"bound holds, min rhs/lhs ratio {margin:.3f}"


def _suite_fibers(rng: np.random.Generator, inject_flip_error: bool) -> tuple[bool, str]:
    # DFT flip identity as quaternion matrices: F (jI) F* = A (jI)
    for n in (2, 3, 5, 8):
        f = qdft_multilevel((n,))
        a_rev = reversal_multilevel((n,))
        uf = QMatrix(f, np.zeros_like(f))
        lhs = matmul(matmul(uf, QMatrix(np.zeros((n, n)), np.eye(n))), adjoint(uf))
        rhs = QMatrix(np.zeros((n, n)), a_rev)
        if frobenius_norm(lhs - rhs) > 1e-12:
            return False, f"DFT flip identity failed at n={n}"
    for nvec in ((3,), (4,), (5,), (2, 3), (4, 4)):
        fix, pairs, perm = fix_pair_order(nvec)
        n_total = int(np.prod(nvec))
        if len(fix) + 2 * len(pairs) != n_total:
            return False, f"Fix/pair counts inconsistent for {nvec}"
        a_rev = reversal_multilevel(nvec)
        want = np.zeros((n_total, n_total))
        i = len(fix)
        want[:i, :i] = np.eye(i)
        for _ in pairs:
            want[i : i + 2, i : i + 2] = [[0.0, 1.0], [1.0, 0.0]]
            i += 2
        if not np.array_equal(perm @ a_rev @ perm.T, want):
            return False, f"exchange-permutation identity failed for {nvec}"
    sign = -1.0 if inject_flip_error else 1.0
    worst = 0.0
    for nvec, s, t in (((4,), 1, 1), ((2, 3), 1, 2), ((5,), 2, 2)):
        spec = random_circulant_spec(rng, nvec, s, t)
        try:
            form = canonical_x_form(spec, _w_sign=sign)
        except FiberReconstructionError as exc:
            return False, f"fiber reconstruction failed: {exc}"
        worst = max(worst, form.residual)
        if s == t:
            qs = circulant_spectrum(spec)
            dense_sv = q_singular_values(assemble_circulant(spec))
            if np.abs(qs.singular_values - dense_sv).max() > 1e-9 * max(1, dense_sv[0]):
                return False, "fiber-union singular values mismatch"
    return True, f"reconstruction residual {worst:.2e}"


def _suite_acs(rng: np.random.Generator) -> tuple[bool, str]:
    one = np.ones((1, 1), complex)
    zero = np.zeros((1, 1), complex)
    shift = SymbolSpec(
        1, 1, 1, KernelPartition.right(1), TrigPoly(1, 1, 1, {(1,): (zero, one)})
    )
    w = acs_witness(shift, (8,), 1)
    if abs(w.rank_part - 0.125) > 1e-12 or w.rank_part > w.rank_bound:
        return False, f"shift witness wrong: rank {w.rank_part}, bound {w.rank_bound}"
    spec = demo_herm_1d()
    w1 = acs_witness(spec, (16,), 1)
    w2 = acs_witness(spec, (32,), 1)
    if w1.rank_part > w1.rank_bound + 1e-12 or w2.rank_part > w2.rank_bound + 1e-12:
        return False, "rank bound violated"
    if not (w2.rank_part < w1.rank_part):
        return False, "rank part did not shrink with n"
    t = assemble(spec, (16,))
    profile = su_profile(t, [0.5, 1.0, 2.0, 4.0])
    if np.any(np.diff(profile) > 0):
        return False, "s.u. profile not nonincreasing"
    return True, f"witness rank {w.rank_part:.4f} <= bound {w.rank_bound:.4f}"


def _suite_distribution(rng: np.random.Generator) -> tuple[bool, str]:
    a = random_qmatrix(rng, 6, 4)
    sv = q_singular_values(a)
    sv_phi = np.linalg.svd(phi_block_array(a), compute_uv=False)
    c = float(rng.uniform(0.0, sv_phi[0]))
    psi = lambda x: np.maximum(0.0, 1.0 - np.abs(x - c))
    lhs = psi(sv_phi).mean()
    rhs = psi(sv).mean()
    if abs(lhs - rhs) > 1e-12:
        return False, f"singular-value normalization identity off by {abs(lhs - rhs):.2e}"
    h = random_qmatrix(rng, 5, 5)
    h = h + adjoint(h)
    phi_eigs = np.linalg.eigvals(phi_block_array(h))
    canon = canonical_eigenvalues(h)
    psi2 = lambda z: np.exp(-np.abs(z) ** 2)  # conjugation-symmetric
    lhs = psi2(phi_eigs).mean()
    rhs = 0.5 * (psi2(canon) + psi2(canon.conj())).mean()
    if abs(lhs - rhs) > 1e-10:
        return False, f"conjugate-pair averaging off by {abs(lhs - rhs):.2e}"
    spec = demo_herm_1d()
    g = embedded_symbol(spec)
    sq = symbol_quantiles(g, "eig", grid=1024)
    d8 = quantile_distance(empirical_spectrum(assemble(spec, (8,)), "eig"), sq)
    d32 = quantile_distance(empirical_spectrum(assemble(spec, (32,)), "eig"), sq)
    if not (d32 < d8):
        return False, f"quantile distance did not shrink: {d8:.4f} -> {d32:.4f}"
    return True, f"quantile distance {d8:.4f} -> {d32:.4f}"


SUITE_NAMES = (
    "quat_algebra",
    "embedding_algebra",
    "spectral_transport",
    "symbol_identities",
    "toeplitz_identities",
    "hermitian_localization",
    "schatten_bounds",
    "fibers",
    "acs",
    "distribution",
)


def run_selftest(seed: int = 0, inject_flip_error: bool = False) -> list[SuiteResult]:
    """Run every suite; returns results in a fixed order."""
    suites: list[tuple[str, Callable[[np.random.Generator], tuple[bool, str]]]] = [
        ("quat_algebra", _suite_quat_algebra),
        ("embedding_algebra", _suite_embedding_algebra),
        ("spectral_transport", _suite_spectral_transport),
        ("symbol_identities", _suite_symbol_identities),
        ("toeplitz_identities", _suite_toeplitz_identities),
        ("hermitian_localization", _suite_hermitian_localization),
        ("schatten_bounds", _suite_schatten_bounds),
        ("fibers", lambda rng: _suite_fibers(rng, inject_flip_error)),
        ("acs", _suite_acs),
        ("distribution", _suite_distribution),
    ]
    results = []
    for name, fn in suites:
        rng = np.random.default_rng(seed)
        try:
            passed, detail = fn(rng)
        except Exception as exc:  # a loud failure is still a failure
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(SuiteResult(name, passed, detail))
    return results
