import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbnf.errors import BudgetError, TrackingAmbiguityError
from qbnf.fock import FockTruncation, GradedMatrix, p0_eigenvalue
from qbnf.freq import FrequencyPair
from qbnf.oracle import (
    ClassicalPolynomial,
    SpectrumResult,
    classical_birkhoff,
    diagonalize,
    evaluate_action_polynomial,
    poisson_bracket,
    rs_coefficients,
)

OMEGA = FrequencyPair(1 + 1j, 1 - 2j)


def two_level_matrix(trunc, n, m, c, cp, a=0.0, d=0.0):
    entries = np.zeros((trunc.dim, trunc.dim), dtype=complex)
    i, j = trunc.flat_index(n), trunc.flat_index(m)
    entries[i, j] = c
    entries[j, i] = cp
    entries[i, i] = a
    entries[j, j] = d
    return GradedMatrix(trunc, entries)


class TestDiagonalize:
    def test_epsilon_zero_exact_labels(self):
        trunc = FockTruncation(4)
        f = GradedMatrix.zero(trunc)
        spec = diagonalize(f, OMEGA, 0.3, 0.0)
        for n in [(0, 0), (2, 3), (4, 4)]:
            assert spec.value_at(n) == p0_eigenvalue(n, OMEGA, 0.3)

    def test_real_frequencies_real_spectrum(self):
        # self-adjoint sanity point outside Gamma
        omega = FrequencyPair(1.0, np.sqrt(2.0))
        trunc = FockTruncation(5)
        rng = np.random.default_rng(0)
        raw = rng.normal(size=(trunc.dim, trunc.dim))
        f = GradedMatrix(trunc, (raw + raw.T) / 2)
        spec = diagonalize(f, omega, 0.7, 0.05)
        assert np.abs(spec.eigenvalues.imag).max() < 1e-12

    def test_parity_of_odd_graded_perturbation(self):
        # parity conjugation flips odd-graded F, so E_n(-eps) = E_n(eps) and
        # odd-order series coefficients vanish
        from qbnf.qnf import normal_form_orders

        trunc = FockTruncation(8)
        rng = np.random.default_rng(1)
        g1, g2 = GradedMatrix.zero(trunc).grading_arrays()
        odd = (np.abs(g1) + np.abs(g2)) % 2 == 1
        near = np.maximum(np.abs(g1), np.abs(g2)) <= 2
        vals = rng.normal(size=(trunc.dim, trunc.dim)) + 1j * rng.normal(
            size=(trunc.dim, trunc.dim)
        )
        f = GradedMatrix(trunc, np.where(odd & near, vals, 0.0), 2)
        plus = diagonalize(f, OMEGA, 0.3, 0.02)
        minus = diagonalize(f, OMEGA, 0.3, -0.02)
        for n in [(0, 0), (1, 2)]:
            assert plus.value_at(n) == pytest.approx(minus.value_at(n), abs=1e-11)
        orders = normal_form_orders(f, OMEGA, 0.3, 3, [(0, 0)])["orders"]
        assert abs(orders[0][(0, 0)]) < 1e-13
        assert abs(orders[2][(0, 0)]) < 1e-10
        assert abs(orders[1][(0, 0)]) > 1e-6

    def test_ambiguity_on_engineered_crossing(self):
        # level n is driven exactly onto level m at the final step: the
        # continuation must refuse rather than guess
        trunc = FockTruncation(2)
        n, m = (0, 0), (1, 0)
        gap = p0_eigenvalue(m, OMEGA, 0.1) - p0_eigenvalue(n, OMEGA, 0.1)
        f = two_level_matrix(trunc, n, m, 0.0, 0.0, a=1.0, d=0.0)
        with pytest.raises(TrackingAmbiguityError):
            diagonalize(f, OMEGA, 0.1, gap)

    def test_csv_and_json_output(self):
        trunc = FockTruncation(2)
        f = GradedMatrix.zero(trunc)
        spec = diagonalize(f, OMEGA, 0.2, 0.0)
        text = spec.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "n1,n2,eps,hbar,re_E,im_E,source"
        assert len(lines) == trunc.dim + 1
        payload = spec.to_json_dict()
        assert payload["eigenvalues"]["0,0"][0] == pytest.approx(
            p0_eigenvalue((0, 0), OMEGA, 0.2).real
        )


class TestRayleighSchrodinger:
    def test_diagonal_input_higher_orders_vanish(self):
        trunc = FockTruncation(4)
        diag = GradedMatrix.diagonal(trunc, np.linspace(1, 2, trunc.dim).astype(complex))
        orders = rs_coefficients(diag, OMEGA, 0.3, (1, 1), 3)
        assert abs(orders[1]) < 1e-15 and abs(orders[2]) < 1e-15

    def test_two_level_closed_form(self):
        trunc = FockTruncation(8)
        n, m = (1, 1), (2, 3)
        c, cp = 0.4 - 0.3j, 0.2 + 0.5j
        a, d = 0.3 + 0.1j, -0.2j
        f = two_level_matrix(trunc, n, m, c, cp, a, d)
        hbar = 0.7
        gap = p0_eigenvalue(n, OMEGA, hbar) - p0_eigenvalue(m, OMEGA, hbar)
        orders = rs_coefficients(f, OMEGA, hbar, n, 3)
        assert orders[0] == pytest.approx(a, rel=1e-12)
        assert orders[1] == pytest.approx(c * cp / gap, rel=1e-12)
        assert orders[2] == pytest.approx(c * cp * (d - a) / gap**2, rel=1e-12)

    def test_against_exact_two_level_eigenvalue(self):
        trunc = FockTruncation(8)
        n, m = (0, 0), (1, 2)
        c, cp, a, d = 0.3, 0.45 + 0.1j, 0.2, -0.4
        f = two_level_matrix(trunc, n, m, c, cp, a, d)
        hbar = 0.5
        e_n = p0_eigenvalue(n, OMEGA, hbar)
        e_m = p0_eigenvalue(m, OMEGA, hbar)
        orders = rs_coefficients(f, OMEGA, hbar, n, 3)

        def exact(eps):
            h = np.array([[e_n + eps * a, eps * c], [eps * cp, e_m + eps * d]])
            vals = np.linalg.eigvals(h)
            return vals[np.argmin(np.abs(vals - e_n))]

        eps = 1e-3
        series = e_n + sum(orders[p] * eps ** (p + 1) for p in range(3))
        assert abs(series - exact(eps)) < 5 * abs(eps) ** 4

    def test_truncation_guard(self):
        trunc = FockTruncation(4)
        f = two_level_matrix(trunc, (3, 3), (4, 4), 1.0, 1.0)
        f.declared_bandwidth = 2
        with pytest.raises(BudgetError):
            rs_coefficients(f, OMEGA, 0.3, (3, 3), 3)


class TestPoissonBracket:
    def test_self_bracket_zero(self):
        f = ClassicalPolynomial({(2, 1, 0, 0): 1.0, (0, 0, 1, 2): -2.0})
        assert poisson_bracket(f, f).coefficients == {}

    def test_canonical_pairs(self):
        x1 = ClassicalPolynomial({(1, 0, 0, 0): 1.0})
        xi1 = ClassicalPolynomial({(0, 1, 0, 0): 1.0})
        x2 = ClassicalPolynomial({(0, 0, 1, 0): 1.0})
        assert poisson_bracket(xi1, x1).coefficients == {(0, 0, 0, 0): 1.0}
        assert poisson_bracket(x1, xi1).coefficients == {(0, 0, 0, 0): -1.0}
        assert poisson_bracket(x1, x2).coefficients == {}

    def test_flow_orientation_against_p0(self):
        # {p0, z} = -i omega z for z = omega x + i xi, mode by mode
        w1 = OMEGA.omega1
        p0 = ClassicalPolynomial(
            {
                (0, 2, 0, 0): 0.5,
                (2, 0, 0, 0): 0.5 * OMEGA.omega1**2,
                (0, 0, 0, 2): 0.5,
                (0, 0, 2, 0): 0.5 * OMEGA.omega2**2,
            }
        )
        z1 = ClassicalPolynomial({(1, 0, 0, 0): w1, (0, 1, 0, 0): 1j})
        result = poisson_bracket(p0, z1)
        expected = (-1j * w1) * z1
        for key, val in expected.coefficients.items():
            assert result.coefficients[key] == pytest.approx(val, rel=1e-14)

    @given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
    @settings(max_examples=25, deadline=None)
    def test_jacobi_exact_on_integer_polynomials(self, i, j, k):
        rng = np.random.default_rng(i * 9 + j * 3 + k)

        def rand_poly():
            out = {}
            for _ in range(3):
                key = tuple(rng.integers(0, 3, size=4))
                out[key] = float(rng.integers(-3, 4))
            return ClassicalPolynomial(out)

        f, g, h = rand_poly(), rand_poly(), rand_poly()
        jac = (
            poisson_bracket(f, poisson_bracket(g, h))
            + poisson_bracket(g, poisson_bracket(h, f))
            + poisson_bracket(h, poisson_bracket(f, g))
        )
        assert all(v == 0 for v in jac.coefficients.values()) or jac.coefficients == {}


def action_polynomial(omega_mode, mode=0):
    """I_k = (xi_k^2 + omega_k^2 x_k^2) / (2 omega_k) as a sparse polynomial."""
    if mode == 0:
        return ClassicalPolynomial(
            {(0, 2, 0, 0): 1.0 / (2 * omega_mode), (2, 0, 0, 0): omega_mode / 2.0}
        )
    return ClassicalPolynomial(
        {(0, 0, 0, 2): 1.0 / (2 * omega_mode), (0, 0, 2, 0): omega_mode / 2.0}
    )


class TestClassicalBirkhoff:
    def test_zero_perturbation(self):
        tables = classical_birkhoff(ClassicalPolynomial.zero(), OMEGA, 3)
        assert all(t == {} for t in tables)

    def test_min_degree_guard(self):
        with pytest.raises(ValueError):
            classical_birkhoff(ClassicalPolynomial({(1, 1, 0, 0): 1.0}), OMEGA, 2)

    def test_action_quartic_already_normal(self):
        i1 = action_polynomial(OMEGA.omega1, 0)
        quartic = i1.product(i1)
        tables = classical_birkhoff(quartic, OMEGA, 3)
        assert set(tables[0].keys()) == {(2, 0)}
        assert tables[0][(2, 0)] == pytest.approx(1.0, rel=1e-12)
        assert tables[1] == {} and tables[2] == {}

    def test_coboundary_leaves_first_order_invariant(self):
        rng = np.random.default_rng(4)
        base = ClassicalPolynomial({(3, 0, 0, 0): 0.3, (1, 0, 2, 0): -0.2, (0, 2, 1, 1): 0.15})
        p0 = ClassicalPolynomial(
            {
                (0, 2, 0, 0): 0.5,
                (2, 0, 0, 0): 0.5 * OMEGA.omega1**2,
                (0, 0, 0, 2): 0.5,
                (0, 0, 2, 0): 0.5 * OMEGA.omega2**2,
            }
        )
        for _ in range(3):
            chi = ClassicalPolynomial(
                {tuple(rng.integers(0, 2, size=4) + np.array([1, 0, 1, 1])): rng.normal()}
            )
            shifted = base + poisson_bracket(p0, chi)
            y_base = classical_birkhoff(base, OMEGA, 1)[0]
            y_shift = classical_birkhoff(shifted, OMEGA, 1)[0]
            keys = set(y_base) | set(y_shift)
            for key in keys:
                assert y_base.get(key, 0.0) == pytest.approx(y_shift.get(key, 0.0), abs=1e-12)

    def test_quantum_classical_limit_small(self):
        # linear hbar-shrink of the gap to the classical value, one cubic term
        from qbnf.fock import weyl_matrix_polynomial
        from qbnf.qnf import normal_form_orders

        mono = {(3, 0, 0, 0): 0.05, (1, 0, 2, 0): -0.03}
        poly = ClassicalPolynomial(mono)
        tables = classical_birkhoff(poly, OMEGA, 2)
        actions = (0.8, 0.4)
        gaps = []
        for hbar in (0.2, 0.1):
            n = (int(round(actions[0] / hbar)), int(round(actions[1] / hbar)))
            trunc = FockTruncation(max(n) + 2 * 3 + 2)
            f0 = weyl_matrix_polynomial(mono, OMEGA, hbar, trunc)
            orders = normal_form_orders(f0, OMEGA, hbar, 2, [n])["orders"]
            y2 = evaluate_action_polynomial(tables[1], actions)
            gaps.append(abs(orders[1][n] - y2))
        assert gaps[1] < 0.65 * gaps[0]
        assert gaps[1] < 0.15 * max(abs(v) for v in tables[1].values())
