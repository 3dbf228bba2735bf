import csv

import numpy as np
import pytest

from qtoeplitz.distribution import (
    REPORT_CSV_HEADER,
    SCATTER_CSV_HEADER,
    DistributionReport,
    empirical_spectrum,
    localization_check,
    quantile_distance,
    scatter_canonical,
    symbol_quantiles,
    write_report_csv,
    write_scatter_csv,
)
from qtoeplitz.quat import J
from qtoeplitz.qmatrix import (
    QMatrix,
    adjoint,
    canonical_eigenvalues,
    phi_block_array,
    q_singular_values,
    random_qmatrix,
)
from qtoeplitz.symbols import (
    KernelPartition,
    SymbolSpec,
    TrigPoly,
    builtin,
    demo_herm_1d,
    embedded_symbol,
    spectral_range_bounds,
)
from qtoeplitz.toeplitz import assemble

SQ2 = np.sqrt(2.0)


class TestEmpiricalSpectrum:
    def test_sv_duplication(self):
        a = QMatrix(np.diag([1.0, 2.0]).astype(complex), np.zeros((2, 2)))
        np.testing.assert_allclose(empirical_spectrum(a, "sv"), [1, 1, 2, 2])

    def test_scalar_j(self):
        a = QMatrix.from_entries([[J]])
        np.testing.assert_allclose(empirical_spectrum(a, "sv"), [1.0, 1.0])

    def test_hermitian_toeplitz_eig(self):
        t = assemble(demo_herm_1d(), (8,))
        eigs = empirical_spectrum(t, "eig")
        assert eigs.shape == (16,)
        assert eigs.min() >= 2 - SQ2 - 1e-10 and eigs.max() <= 2 + SQ2 + 1e-10

    def test_eig_rejects_non_hermitian(self, rng):
        a = random_qmatrix(rng, 4, 4)
        with pytest.raises(ValueError):
            empirical_spectrum(a, "eig")

    def test_unknown_mode(self, rng):
        with pytest.raises(ValueError):
            empirical_spectrum(random_qmatrix(rng, 2, 2), "nope")


class TestSymbolQuantiles:
    def test_demo_range_and_median(self):
        g = embedded_symbol(demo_herm_1d())
        q = symbol_quantiles(g, "eig", grid=2048)
        assert q.min() == pytest.approx(2 - SQ2, abs=1e-4)
        assert q.max() == pytest.approx(2 + SQ2, abs=1e-4)
        assert np.median(q) == pytest.approx(2.0, abs=1e-10)

    def test_constant_symbol(self):
        one = np.ones((1, 1), complex)
        spec = SymbolSpec(
            1, 1, 1, KernelPartition.right(1),
            TrigPoly(1, 1, 1, {(0,): (3.0 * one, 0.0 * one)}),
        )
        q = symbol_quantiles(embedded_symbol(spec), "eig", grid=64, count=10)
        np.testing.assert_allclose(q, 3.0)

    def test_sv_mode_nonnegative_sorted(self):
        g = embedded_symbol(builtin("nonherm_cont_2x2"), KernelPartition.right(2))
        q = symbol_quantiles(g, "sv", grid=32)
        assert np.all(np.diff(q) >= 0) and q[0] >= -1e-14

    def test_eig_rejects_non_hermitian_symbol(self):
        g = embedded_symbol(builtin("nonherm_cont_2x2"), KernelPartition.right(2))
        with pytest.raises(ValueError):
            symbol_quantiles(g, "eig", grid=16)

    def test_resampling_length(self):
        g = embedded_symbol(demo_herm_1d())
        q = symbol_quantiles(g, "eig", grid=64, count=37)
        assert q.shape == (37,) and np.all(np.diff(q) >= -1e-12)


class TestQuantileDistance:
    def test_identical_lists(self):
        assert quantile_distance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_hand_example(self):
        assert quantile_distance([0.0, 2.0], [1.0, 1.0]) == pytest.approx(1.0)

    def test_resamples_symbol_side(self):
        emp = [0.0, 1.0]
        sym = [0.0, 0.5, 1.0, 1.5]
        assert quantile_distance(emp, sym) >= 0.0

    def test_strict_decrease_with_n(self):
        g = embedded_symbol(demo_herm_1d())
        sq = symbol_quantiles(g, "eig", grid=2048)
        d = {}
        for n in (8, 64):
            t = assemble(demo_herm_1d(), (n,))
            d[n] = quantile_distance(empirical_spectrum(t, "eig"), sq)
        assert d[64] < d[8]

    def test_rejects_decreasing_input(self):
        with pytest.raises(ValueError):
            quantile_distance([2.0, 1.0], [1.0, 1.0])


class TestLocalization:
    def _report(self, empirical, bounds):
        empirical = np.asarray(empirical, dtype=float)
        return DistributionReport(
            mode="eig",
            kernel_label="R",
            nvec=(8,),
            empirical=empirical,
            symbol_quantiles=empirical,
            l1_quantile_distance=0.0,
            bounds=bounds,
        )

    def test_demo_inside_bounds(self):
        t = assemble(demo_herm_1d(), (64,))
        report = self._report(empirical_spectrum(t, "eig"), (2 - SQ2, 2 + SQ2))
        ok, violation = localization_check(report)
        assert ok and violation == 0.0

    def test_constant_symbol_exact(self):
        one = np.ones((1, 1), complex)
        spec = SymbolSpec(
            1, 1, 1, KernelPartition.right(1),
            TrigPoly(1, 1, 1, {(0,): (5.0 * one, 0.0 * one)}),
        )
        t = assemble(spec, (6,))
        report = self._report(empirical_spectrum(t, "eig"), spectral_range_bounds(spec))
        ok, violation = localization_check(report)
        assert ok and violation < 1e-12

    def test_shrunk_bounds_fail(self):
        t = assemble(demo_herm_1d(), (32,))
        report = self._report(
            empirical_spectrum(t, "eig"), (2 - SQ2 + 0.1, 2 + SQ2 - 0.1)
        )
        ok, violation = localization_check(report)
        assert not ok and violation > 0.05

    def test_requires_bounds_and_eig(self):
        t = assemble(demo_herm_1d(), (8,))
        report = self._report(empirical_spectrum(t, "eig"), None)
        with pytest.raises(ValueError):
            localization_check(report)


class TestScatter:
    def test_scalar_j(self):
        pts = scatter_canonical(QMatrix.from_entries([[J]]))
        np.testing.assert_allclose(pts, [1j], atol=1e-12)

    def test_hermitian_on_real_axis(self):
        t = assemble(demo_herm_1d(), (12,))
        pts = scatter_canonical(t)
        assert np.abs(pts.imag).max() < 1e-8

    def test_count(self):
        t = assemble(builtin("nonherm_cont_2x2"), (4, 4))
        assert scatter_canonical(t).shape == (32,)  # N_n * s = 16 * 2


class TestNormalizationIdentities:
    def test_singular_value_test_function(self, rng):
        # the embedded-side average equals the quaternion-side average
        for _ in range(10):
            a = random_qmatrix(rng, int(rng.integers(2, 6)), int(rng.integers(2, 6)))
            sv_phi = np.linalg.svd(phi_block_array(a), compute_uv=False)
            sv = q_singular_values(a)
            c = float(rng.uniform(0, sv_phi[0]))
            psi = lambda x: np.maximum(0.0, 1.0 - np.abs(x - c))
            assert psi(sv_phi).mean() == pytest.approx(psi(sv).mean(), abs=1e-12)

    def test_conjugate_pair_averaging(self, rng):
        # for conjugation-symmetric psi, averaging over the embedded spectrum
        # equals averaging psi-tilde over the canonical eigenvalues
        for make in ("hermitian", "normalish"):
            a = random_qmatrix(rng, 5, 5)
            if make == "hermitian":
                a = a + adjoint(a)
            else:
                a = a @ adjoint(a)  # Hermitian PSD, spectra real
            phi_eigs = np.linalg.eigvals(phi_block_array(a))
            canon = canonical_eigenvalues(a)
            psi = lambda z: np.exp(-np.abs(z - 0.7) ** 2)
            lhs = psi(phi_eigs).mean()
            rhs = 0.5 * (psi(canon) + psi(canon.conj())).mean()
            assert lhs == pytest.approx(rhs, abs=1e-10)


class TestCsvWriters:
    def test_report_csv(self, tmp_path):
        t = assemble(demo_herm_1d(), (4,))
        emp = empirical_spectrum(t, "eig")
        sym = symbol_quantiles(embedded_symbol(demo_herm_1d()), "eig", grid=64, count=emp.size)
        report = DistributionReport(
            mode="eig",
            kernel_label="R",
            nvec=(4,),
            empirical=emp,
            symbol_quantiles=sym,
            l1_quantile_distance=quantile_distance(emp, sym),
        )
        path = tmp_path / "r.csv"
        write_report_csv(report, path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == REPORT_CSV_HEADER
        assert len(rows) == 1 + emp.size
        assert float(rows[1][0]) == pytest.approx(0.5 / emp.size)

    def test_scatter_csv(self, tmp_path):
        path = tmp_path / "s.csv"
        write_scatter_csv(np.array([1 + 2j, -0.5j]), path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == SCATTER_CSV_HEADER
        assert [float(v) for v in rows[1]] == [1.0, 2.0]
