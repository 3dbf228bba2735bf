import csv

import numpy as np
import pytest

from qtoeplitz.quat import Quaternion
from qtoeplitz.qmatrix import adjoint, frobenius_norm
from qtoeplitz.symbols import (
    KernelPartition,
    SymbolSpec,
    TrigPoly,
    all_kernels,
    builtin,
    demo_herm_1d,
    embedded_symbol,
    hermitian_criterion,
    reduce_to_right,
    symbol_linear_combination,
)
from qtoeplitz.toeplitz import (
    MultiIndexSet,
    PHI_CSV_HEADER,
    adjoint_identity_check,
    assemble,
    assemble_complex_toeplitz,
    blockwise_phi,
    embedding_identity_check,
    export_phi_csv,
    schatten_bound_check,
)

ONE = np.ones((1, 1), complex)
ZERO = np.zeros((1, 1), complex)
RIGHT1 = KernelPartition.right(1)
LEFT1 = KernelPartition.left(1)


def scalar_trig(table, kernel=RIGHT1):
    tab = {m: (z * ONE, w * ONE) for m, (z, w) in table.items()}
    return SymbolSpec(1, 1, 1, kernel, TrigPoly(1, 1, 1, tab))


class TestMultiIndexSet:
    def test_cardinality_and_lex_order(self):
        mis = MultiIndexSet((2, 3))
        idx = mis.indices()
        assert mis.n_total == 6
        assert [tuple(r) for r in idx] == [
            (0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2),
        ]

    def test_difference_span(self):
        mis = MultiIndexSet((2, 3))
        diffs = mis.differences()
        assert len(diffs) == 3 * 5
        assert min(d[0] for d in diffs) == -1 and max(d[1] for d in diffs) == 2

    def test_invalid(self):
        with pytest.raises(ValueError):
            MultiIndexSet((0, 2))


class TestAssemble:
    def test_shift_right_subdiagonal(self):
        spec = scalar_trig({(1,): (0.0, 1.0)})
        t = assemble(spec, (3,))
        want_w = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=complex)
        np.testing.assert_array_equal(t.w, want_w)
        np.testing.assert_array_equal(t.z, np.zeros((3, 3)))

    def test_shift_left_superdiagonal(self):
        spec = scalar_trig({(1,): (0.0, 1.0)})
        t = assemble(spec, (3,), LEFT1)
        want_w = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
        np.testing.assert_array_equal(t.w, want_w)

    def test_constant_block_diagonal(self, rng):
        q = Quaternion(*rng.standard_normal(4))
        spec = scalar_trig({(0,): (complex(q.q0, q.q1), complex(q.q2, q.q3))})
        t = assemble(spec, (4,))
        for i in range(4):
            for j in range(4):
                assert t.entry(i, j) == (q if i == j else Quaternion())

    def test_structure_tag(self, make_trig_poly):
        spec = make_trig_poly(d=2, s=2, t=1)
        t = assemble(spec, (3, 2))
        assert t.structure.nvec == (3, 2)
        assert t.shape == (12, 6)

    def test_sampled_alias_warning(self):
        spec = builtin("herm_cont_2x2", grid=16)
        with pytest.warns(UserWarning, match="alias"):
            assemble(spec, (8, 8))


class TestEmbeddingIdentity:
    @pytest.mark.parametrize("d,nvec", [(1, (6,)), (2, (4, 3))])
    def test_random_trig_all_kernels(self, make_trig_poly, d, nvec):
        spec = make_trig_poly(d=d, s=2, t=2, degree=2)
        for kernel in all_kernels(d):
            assert embedding_identity_check(spec, kernel, nvec) < 1e-10

    def test_real_constant_exact(self):
        spec = scalar_trig({(0,): (3.0, 0.0)})
        assert embedding_identity_check(spec, RIGHT1, (4,)) < 1e-14

    @pytest.mark.parametrize(
        "name", ["herm_cont_2x2", "nonherm_cont_2x2", "herm_l1_2x2", "nonherm_l1_2x2"]
    )
    def test_builtin_sampled(self, name):
        spec = builtin(name)
        for kernel in all_kernels(2):
            assert embedding_identity_check(spec, kernel, (4, 4)) < 1e-6

    def test_blockwise_phi_shape(self, make_trig_poly):
        spec = make_trig_poly(d=1, s=2, t=1)
        t = assemble(spec, (3,))
        assert blockwise_phi(t).shape == (12, 6)

    def test_complex_toeplitz_grid_guard(self):
        g = embedded_symbol(demo_herm_1d(), RIGHT1)
        with pytest.raises(ValueError):
            assemble_complex_toeplitz(g, (40,), grid=16)


class TestKernelReduction:
    @pytest.mark.parametrize("d,nvec", [(1, (5,)), (2, (3, 3))])
    def test_exact_equality(self, make_trig_poly, d, nvec):
        spec = make_trig_poly(d=d, s=2, t=2, degree=1)
        for kernel in all_kernels(d):
            direct = assemble(spec, nvec, kernel)
            via = assemble(reduce_to_right(spec, kernel), nvec)
            assert np.array_equal(direct.z, via.z)
            assert np.array_equal(direct.w, via.w)


class TestAdjointIdentities:
    def test_shift_case_by_hand(self):
        spec = scalar_trig({(1,): (0.0, 1.0)})
        t_right = assemble(spec, (3,))
        # adjoint has conj(j) = -j on the superdiagonal; that is T^(L)(F*)
        adj = adjoint(t_right)
        from qtoeplitz.symbols import symbol_adjoint

        t_left_star = assemble(symbol_adjoint(spec), (3,), LEFT1)
        assert frobenius_norm(adj - t_left_star) == 0.0

    @pytest.mark.parametrize("d,nvec", [(1, (4,)), (2, (3, 2))])
    def test_random(self, make_trig_poly, d, nvec):
        kernels = all_kernels(d)
        spec = make_trig_poly(d=d, s=2, t=2, kernel=kernels[min(1, len(kernels) - 1)])
        assert adjoint_identity_check(spec, nvec)

    def test_hermitian_symbol_self_adjoint(self):
        spec = demo_herm_1d()
        assert hermitian_criterion(spec).is_hermitian
        for kernel in (LEFT1, RIGHT1):
            t = assemble(spec, (6,), kernel)
            assert frobenius_norm(t - adjoint(t)) < 1e-12

    def test_real_scalar_trivial(self):
        spec = scalar_trig({(0,): (2.0, 0.0), (1,): (0.5, 0.0), (-1,): (0.5, 0.0)})
        assert adjoint_identity_check(spec, (4,))


class TestEvenness:
    def test_even_w_left_equals_right(self):
        spec = scalar_trig({(1,): (0.0, 0.5), (-1,): (0.0, 0.5)})  # W = cos
        for n in (1, 2, 5):
            t_l = assemble(spec, (n,), LEFT1)
            t_r = assemble(spec, (n,), RIGHT1)
            assert frobenius_norm(t_l - t_r) == 0.0

    def test_non_even_w_differs(self):
        spec = scalar_trig({(1,): (0.0, 0.5j), (-1,): (0.0, -0.5j)})  # W = -sin
        # W-hat(1) != W-hat(-1), so matrices differ as soon as k=1 occurs
        t_l = assemble(spec, (3,), LEFT1)
        t_r = assemble(spec, (3,), RIGHT1)
        assert frobenius_norm(t_l - t_r) > 0.1
        # but at n=1 only k=0 occurs and the two coincide
        assert frobenius_norm(
            assemble(spec, (1,), LEFT1) - assemble(spec, (1,), RIGHT1)
        ) == 0.0

    def test_criterion_is_sharp(self, rng):
        # evenness of W-hat on Delta(n) decides equality in both directions
        z = ZERO
        w_plus = (rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1)))
        spec_even = scalar_trig({})
        spec_even = SymbolSpec(
            1, 1, 1, RIGHT1,
            TrigPoly(1, 1, 1, {(1,): (z, w_plus), (-1,): (z, w_plus)}),
        )
        # F-hat_R(m) = W-hat(-m) j; equal table entries make W-hat even
        assert frobenius_norm(
            assemble(spec_even, (4,), LEFT1) - assemble(spec_even, (4,), RIGHT1)
        ) < 1e-15


class TestHermitianEquivalence:
    def test_criterion_implies_hermitian_all_kernels(self, rng):
        spec = demo_herm_1d()
        for kernel in (LEFT1, RIGHT1):
            for n in (2, 5, 9):
                t = assemble(spec, (n,), kernel)
                assert frobenius_norm(t - adjoint(t)) < 1e-12

    def test_failing_criterion_gives_non_hermitian(self):
        spec = scalar_trig({(0,): (2.0, 0.0), (1,): (0.5, 0.5), (-1,): (0.5, 0.5)})
        assert not hermitian_criterion(spec).is_hermitian
        t = assemble(spec, (4,))
        assert frobenius_norm(t - adjoint(t)) > 0.1


class TestLinearity:
    def test_assembly_ci_linear(self, make_trig_poly):
        f = make_trig_poly(d=1, s=2, t=2, degree=1)
        g = make_trig_poly(d=1, s=2, t=2, degree=1)
        a, b = 0.7 - 0.1j, 0.2 + 2.0j
        combo = symbol_linear_combination(a, f, b, g)
        lhs = assemble(combo, (4,))
        rhs_f = assemble(f, (4,)).scale_left(a)
        rhs_g = assemble(g, (4,)).scale_left(b)
        assert frobenius_norm(lhs - (rhs_f + rhs_g)) < 1e-12


class TestSchattenBound:
    def test_demo_sup_norm_numbers(self):
        lhs, rhs = schatten_bound_check(demo_herm_1d(), RIGHT1, (32,), np.inf)
        assert lhs <= 2 + np.sqrt(2) + 1e-10
        assert rhs == pytest.approx(12.0, abs=1e-10)  # 4 * ||F||_inf = 4 * 3
        assert lhs <= rhs

    def test_zero_symbol(self):
        spec = scalar_trig({(0,): (0.0, 0.0)})
        lhs, rhs = schatten_bound_check(spec, RIGHT1, (4,), 2)
        assert lhs == 0.0 and rhs == 0.0

    @pytest.mark.parametrize("p", [1.0, 2.0, np.inf])
    def test_random_never_violated(self, make_trig_poly, p):
        for d, nvec in ((1, (8,)), (2, (4, 4))):
            spec = make_trig_poly(d=d, s=2, t=2, degree=1)
            for kernel in all_kernels(d):
                lhs, rhs = schatten_bound_check(spec, kernel, nvec, p)
                assert lhs <= rhs * (1 + 1e-12)


class TestCsvExport:
    def test_header_and_cells(self, tmp_path):
        t = assemble(scalar_trig({(1,): (0.0, 1.0)}), (2,))
        path = tmp_path / "t.csv"
        export_phi_csv(t, path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == PHI_CSV_HEADER
        assert len(rows) == 1 + 4
        # entry (1, 0) is j: cell [[0, 1], [-1, 0]]
        row = next(r for r in rows[1:] if r[0] == "1" and r[1] == "0")
        assert [float(v) for v in row[2:]] == [0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0]
