import numpy as np
import pytest

from qbnf.errors import BudgetError
from qbnf.fock import (
    FockTruncation,
    GradedMatrix,
    default_gaussian_grid,
    displacement_kernel,
    ladder_matrices,
    p0_eigenvalue,
    p0_matrix,
    position_momentum_matrices,
    weyl_matrix_gaussian,
    weyl_matrix_polynomial,
)
from qbnf.freq import FrequencyPair
from qbnf.gaussian import GaussianSymbol, TwoModeGaussian
from qbnf.grids import FourierSymbol, PhaseGrid, sigma_norm

OMEGA = FrequencyPair(1 + 1j, 1 - 2j)


def interior_mask(trunc, depth):
    n1, n2 = trunc.coordinates()
    inside = (n1 <= trunc.n_max - depth) & (n2 <= trunc.n_max - depth)
    return inside[:, None] & inside[None, :]


class TestLattice:
    def test_p0_eigenvalue_examples(self):
        assert p0_eigenvalue((0, 0), OMEGA, 0.5) == pytest.approx(
            0.5 * (OMEGA.omega1 + OMEGA.omega2) / 2
        )
        assert p0_eigenvalue((1, 2), OMEGA, 0.1) == pytest.approx(0.4 - 0.35j, abs=1e-14)
        assert p0_eigenvalue((5, 7), OMEGA, 0.0) == 0.0

    def test_truncation_validation(self):
        with pytest.raises(ValueError):
            FockTruncation(1)
        with pytest.raises(BudgetError):
            FockTruncation(100, lattice_budget=1000)

    def test_flat_index_roundtrip(self):
        trunc = FockTruncation(5)
        pts = trunc.points()
        for i, p in enumerate(pts):
            assert trunc.flat_index(p) == i


class TestLadders:
    def test_canonical_commutators_interior(self):
        trunc = FockTruncation(8)
        a1, a1d, a2, a2d = ladder_matrices(trunc)
        eye = np.eye(trunc.dim)
        mask = interior_mask(trunc, 1)
        for a, ad in ((a1, a1d), (a2, a2d)):
            comm = (a @ ad - ad @ a).entries
            assert np.abs((comm - eye)[mask]).max() < 1e-13
        cross = (a1 @ a2d - a2d @ a1).entries
        assert np.abs(cross[mask]).max() < 1e-13

    def test_position_momentum_canonical_relation(self):
        from qbnf.qnf import commutator_over_ihbar

        trunc = FockTruncation(8)
        hbar = 0.3
        x1, xi1, x2, xi2 = position_momentum_matrices(trunc, OMEGA, hbar)
        comm = commutator_over_ihbar(x1, xi1, hbar).entries
        mask = interior_mask(trunc, 1)
        assert np.abs((comm - np.eye(trunc.dim))[mask]).max() < 1e-12
        zero = commutator_over_ihbar(x1, xi2, hbar).entries
        assert np.abs(zero[mask]).max() < 1e-12

    def test_p0_matrix_is_exact_diagonal(self):
        trunc = FockTruncation(6)
        p0 = p0_matrix(trunc, OMEGA, 0.2)
        for n in [(0, 0), (3, 2), (6, 6)]:
            assert p0.diagonal_at(n) == pytest.approx(p0_eigenvalue(n, OMEGA, 0.2))
        off = p0.entries - np.diag(np.diag(p0.entries))
        assert np.abs(off).max() == 0.0


class TestGradedMatrix:
    def test_bandwidth_and_mask(self):
        trunc = FockTruncation(4)
        a1, a1d, _, _ = ladder_matrices(trunc)
        m = a1 @ a1 @ a1d
        assert m.bandwidth(1e-14) == 1
        masked, dropped = m.nu_masked(0)
        assert masked.bandwidth(1e-14) == 0
        assert dropped > 0

    def test_grading_additivity_under_products(self):
        trunc = FockTruncation(6)
        rng = np.random.default_rng(3)

        def graded_random(nu):
            g1, g2 = GradedMatrix.zero(trunc).grading_arrays()
            vals = rng.normal(size=(trunc.dim, trunc.dim)) * ((g1 == nu[0]) & (g2 == nu[1]))
            return GradedMatrix(trunc, vals)

        a = graded_random((1, -1))
        b = graded_random((2, 0))
        prod = a @ b
        g1, g2 = prod.grading_arrays()
        outside = (g1 != 3) | (g2 != -1)
        assert np.abs(prod.entries[outside]).max() == 0.0

    def test_graded_window_norm(self):
        trunc = FockTruncation(4)
        mat = GradedMatrix.zero(trunc)
        i = trunc.flat_index((1, 1))
        j = trunc.flat_index((2, 1))  # nu = (-1, 0) from row i
        entries = mat.entries.copy()
        entries[i, j] = 2.0
        entries[i, i] = 3.0
        m = GradedMatrix(trunc, entries)
        val = m.graded_window_norm(rho=0.5, n_window=3)
        assert val == pytest.approx(3.0 + np.exp(0.5) * 2.0, rel=1e-12)


class TestPolynomialQuantization:
    def test_constant_gives_identity(self):
        trunc = FockTruncation(5)
        f = weyl_matrix_polynomial({(0, 0, 0, 0): 2.5}, OMEGA, 0.3, trunc)
        np.testing.assert_allclose(f.entries, 2.5 * np.eye(trunc.dim), atol=1e-14)

    def test_p0_polynomial_matches_exact_diagonal(self):
        trunc = FockTruncation(8)
        hbar = 0.4
        mono = {
            (0, 2, 0, 0): 0.5,
            (2, 0, 0, 0): 0.5 * OMEGA.omega1**2,
            (0, 0, 0, 2): 0.5,
            (0, 0, 2, 0): 0.5 * OMEGA.omega2**2,
        }
        f = weyl_matrix_polynomial(mono, OMEGA, hbar, trunc)
        exact = p0_matrix(trunc, OMEGA, hbar)
        mask = interior_mask(trunc, 2)
        assert np.abs((f.entries - exact.entries)[mask]).max() < 1e-12

    def test_mccoy_symmetrization(self):
        trunc = FockTruncation(6)
        hbar = 0.2
        x1, xi1, _, _ = position_momentum_matrices(trunc, OMEGA, hbar)
        f = weyl_matrix_polynomial({(1, 1, 0, 0): 1.0}, OMEGA, hbar, trunc)
        sym = 0.5 * (x1 @ xi1 + xi1 @ x1)
        np.testing.assert_allclose(f.entries, sym.entries, atol=1e-13)

    def test_declared_bandwidth(self):
        trunc = FockTruncation(8)
        f = weyl_matrix_polynomial({(3, 0, 0, 0): 1.0, (0, 0, 1, 1): 1.0}, OMEGA, 0.1, trunc)
        assert f.declared_bandwidth == 3
        assert f.bandwidth(1e-14) <= 3


class TestDisplacementKernel:
    def test_zero_argument_is_identity(self):
        k = displacement_kernel(6, OMEGA.omega1, 0.4, np.array(0.0), np.array(0.0))
        np.testing.assert_allclose(k, np.eye(6), atol=1e-15)

    def test_unit_frequency_gaussian_closed_form(self):
        # f(u) = exp(-|u|^2/4) at omega = 1 quantizes to the diagonal
        # (1 - hbar/4)^n / (1 + hbar/4)^(n+1)
        from qbnf.fock import _gaussian_mode_matrix

        hbar = 0.3
        grid = PhaseGrid(2, 48, 7.0)
        mode = GaussianSymbol(1.0, 0.0)
        mat = _gaussian_mode_matrix(mode, 1.0 + 0j, hbar, 8, grid)
        n = np.arange(8)
        expected = (1 - hbar / 4) ** n / (1 + hbar / 4) ** (n + 1)
        assert np.abs(np.diag(mat) - expected).max() < 1e-12
        assert np.abs(mat - np.diag(np.diag(mat))).max() < 1e-13


class TestGaussianQuantization:
    def test_bandwidth_equals_declared_box(self):
        fam = TwoModeGaussian.from_frequencies(OMEGA.omega1, OMEGA.omega2, amplitude=1.0)
        trunc = FockTruncation(8)
        grid = default_gaussian_grid(0.1, 8)
        f, err = weyl_matrix_gaussian(fam, OMEGA, 0.1, trunc, grid, nu_box=2)
        assert f.declared_bandwidth == 2
        assert f.bandwidth(0.0) <= 2
        assert err < 1e-9

    def test_egorov_grading_phases(self):
        # conjugating by the oscillator phase multiplies the nu block by
        # exp(i <omega, nu> t): the matrix grading is the torus index
        fam = TwoModeGaussian.from_frequencies(OMEGA.omega1, OMEGA.omega2)
        trunc = FockTruncation(6)
        hbar = 0.2
        grid = default_gaussian_grid(hbar, 6)
        f, _ = weyl_matrix_gaussian(fam, OMEGA, hbar, trunc, grid, nu_box=2)
        t = 0.41
        n1, n2 = trunc.coordinates()
        phases = np.exp(1j * (OMEGA.omega1 * n1 + OMEGA.omega2 * n2) * t)
        conj = phases[:, None] * f.entries * (1.0 / phases)[None, :]
        for nu in [(1, 0), (0, 2), (-2, 1)]:
            block = f.graded_block(nu)
            np.testing.assert_allclose(
                np.where(block != 0, conj, 0.0),
                np.exp(1j * (OMEGA.omega1 * nu[0] + OMEGA.omega2 * nu[1]) * t) * block,
                atol=1e-12,
            )

    def test_operator_norm_chain_real_frequencies(self):
        # real omega, self-adjoint case: matrix 2-norm <= |f_hat|_L1 <= |f|_sigma,
        # monotone in the truncation
        real_omega = FrequencyPair(1.0, np.sqrt(2.0))
        fam = TwoModeGaussian.from_frequencies(1.0, np.sqrt(2.0))
        hbar = 0.4
        grid4 = PhaseGrid(4, 12, 5.0)
        hat = FourierSymbol(grid4, fam.hat_flow(grid4, (0.0, 0.0)))
        l1 = hat.l1_norm()
        sig = sigma_norm(hat, 0.5)
        norms = []
        for n_max in (4, 6, 8):
            trunc = FockTruncation(n_max)
            grid = default_gaussian_grid(hbar, n_max)
            f, _ = weyl_matrix_gaussian(fam, real_omega, hbar, trunc, grid, nu_box=n_max)
            herm_err = np.abs(f.entries - f.entries.conj().T).max()
            assert herm_err < 1e-10
            norms.append(np.linalg.norm(f.entries, 2))
        assert norms == sorted(norms)
        assert norms[-1] <= l1 * (1 + 1e-10)
        assert l1 <= sig * (1 + 1e-12)

    def test_rejects_negative_real_part(self):
        fam = TwoModeGaussian.from_frequencies(-1 + 1j, 1 - 2j)
        trunc = FockTruncation(4)
        with pytest.raises(ValueError):
            weyl_matrix_gaussian(
                fam, FrequencyPair(-1 + 1j, 1 - 2j), 0.1, trunc, PhaseGrid(2, 16, 5.0), 2
            )

    def test_quadrature_tolerance_guard(self):
        fam = TwoModeGaussian.from_frequencies(OMEGA.omega1, OMEGA.omega2)
        trunc = FockTruncation(10)
        coarse = PhaseGrid(2, 16, 4.0)
        with pytest.raises(BudgetError):
            weyl_matrix_gaussian(fam, OMEGA, 1.0, trunc, coarse, nu_box=2, quad_tol=1e-12)
