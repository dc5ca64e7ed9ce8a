import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbnf.gaussian import GaussianSymbol, TwoModeGaussian
from qbnf.grids import PhaseGrid, sigma_norm

GRID = PhaseGrid(2, 32, 5.0)


def test_kappa_zero_iff_unit_gamma():
    assert GaussianSymbol(1.0, 0.3).kappa == pytest.approx(0.0, abs=1e-15)
    assert GaussianSymbol(1.5, 0.3).kappa > 0.0


def test_det_q_formula_matches_entries():
    g = GaussianSymbol(1.4, 0.9)
    phis = np.linspace(0, 2 * np.pi, 37)
    a, b, c = g.q_entries(phis)
    np.testing.assert_allclose(a * c - 0.25 * b * b, g.det_q(phis), rtol=1e-12)
    np.testing.assert_allclose(a + c, g.trace_q(phis), rtol=1e-12)


@given(
    st.floats(0.5, 2.0),
    st.floats(0.0, 2 * np.pi),
    st.floats(0.0, 2 * np.pi),
)
@settings(max_examples=200, deadline=None)
def test_eigenvalue_sandwich(gamma, theta, phi):
    g = GaussianSymbol(gamma, theta)
    l1, l2 = g.q_eigenvalues(phi)
    det = g.det_q(phi)
    assert det >= 1.0 - 1e-12
    assert l1 * l2 == pytest.approx(det, rel=1e-10)
    assert 1.0 - 1e-10 <= l1 * l2 <= 1.0 + g.kappa + 1e-10
    assert 2.0 - 1e-10 <= l1 + l2 <= 2.0 + g.kappa + 1e-10
    d = g.big_d
    assert 1.0 / d - 1e-10 <= l1 <= l2 <= d + 1e-10


def test_kappa_zero_only_nu0_survives():
    g = GaussianSymbol(1.0, 0.7)
    c0 = g.hat_coefficient(0, GRID)
    expected = np.exp(-GRID.radii() ** 2) / np.pi
    np.testing.assert_allclose(c0.values, expected, atol=1e-14)
    for nu in (1, -1, 2, 5):
        assert np.abs(g.hat_coefficient(nu, GRID).values).max() < 1e-12


def test_odd_coefficients_vanish():
    # Q has period pi in phi, so odd angular modes are exactly absent
    g = GaussianSymbol(1.5, 1.1)
    for nu in (1, 3, -5):
        assert np.abs(g.hat_coefficient(nu, GRID).values).max() < 1e-13


def test_uniform_bound_pointwise():
    for gamma, theta in [(1.0, 0.4), (1.3, 0.9), (1.8, 2.0), (0.6, 5.1)]:
        g = GaussianSymbol(gamma, theta)
        bound = g.uniform_bound(GRID) * (1 + 1e-12)
        for nu in range(-6, 7):
            vals = np.abs(g.hat_coefficient(nu, GRID).values)
            assert (vals <= bound).all(), (gamma, theta, nu)


def test_coefficient_decay_rate_positive_and_stable():
    g = GaussianSymbol(np.sqrt(2.0), np.pi / 4)  # kappa = 0.5
    nus = np.arange(0, 13, 2)

    def rate(angular_nodes):
        norms = [sigma_norm(g.hat_coefficient(int(n), GRID, angular_nodes), 1.0) for n in nus]
        slope = np.polyfit(nus[1:], np.log(norms[1:]), 1)[0]
        return -slope

    r64, r128 = rate(64), rate(128)
    assert r64 > 0.0
    assert abs(r64 - r128) / r128 < 0.05


def test_decay_rate_exceeds_strip_prediction():
    # analytic strip of half-width m implies a rate of at least ~m
    g = GaussianSymbol(1.5, np.pi / 3)
    margin = g.analyticity_margin()
    norms = [sigma_norm(g.hat_coefficient(int(n), GRID, 96), 0.5) for n in range(0, 13, 2)]
    slope = -np.polyfit(np.arange(0, 13, 2)[1:], np.log(norms[1:]), 1)[0]
    assert slope > margin * 0.9


def test_reconstruction_at_phi_zero():
    g = GaussianSymbol(1.4, 0.8)
    target = g.hat_flow(GRID, 0.0)
    errors = []
    for k in (6, 14, 30):
        acc = np.zeros(GRID.shape, dtype=complex)
        for nu in range(-k, k + 1):
            acc += g.hat_coefficient(nu, GRID, 96).values
        errors.append(np.abs(acc - target).max())
    assert errors[0] > errors[1] > errors[2]
    assert errors[-1] < 1e-12


def test_pullback_values_against_flow_hat():
    # direct-space pullback equals the inverse transform of hat_flow
    from qbnf.grids import FourierSymbol

    g = GaussianSymbol(1.2, 0.5, amplitude=0.7)
    grid = PhaseGrid(2, 64, 6.0)
    phi = 0.9
    hat = FourierSymbol(grid, g.hat_flow(grid, phi))
    pts = np.array([[0.0, 0.0], [0.5, -0.3], [1.0, 0.8]])
    np.testing.assert_allclose(hat.point_values(pts), g.pullback_values(pts, phi), atol=1e-9)


def test_two_mode_factorization():
    fam = TwoModeGaussian.from_frequencies(1 + 1j, 1 - 2j, amplitude=0.5)
    grid4 = PhaseGrid(4, 8, 4.0)
    vals = fam.hat_coefficient_values((2, 0), grid4)
    g2 = fam.mode_grids(grid4)
    h1 = fam.mode1.hat_coefficient_values(2, g2)
    h2 = fam.mode2.hat_coefficient_values(0, g2)
    manual = 0.5 * np.einsum("ik,jl->ijkl", h1, h2)
    np.testing.assert_allclose(vals, manual, rtol=1e-13)
