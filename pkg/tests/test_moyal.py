import numpy as np
import pytest

from qbnf.errors import BudgetError
from qbnf.freq import FrequencyPair
from qbnf.gaussian import GaussianSymbol
from qbnf.grids import FourierSymbol, PhaseGrid, sigma_norm
from qbnf.moyal import (
    family_moyal_bracket,
    lie_iterates,
    moyal_bracket,
    verify_moyal_inequality,
    verify_poincare_inequality,
)
from qbnf.torus import fourier_coefficients

OMEGA = FrequencyPair(1 + 1j, 1 - 2j)


def offset_gaussian(grid, center, width=1.0, phase=None):
    nodes = grid.nodes()
    r2 = ((nodes - np.asarray(center)) ** 2).sum(axis=-1)
    vals = np.exp(-r2 / width**2).astype(complex)
    if phase is not None:
        vals = vals * np.exp(1j * nodes @ np.asarray(phase))
    return FourierSymbol(grid, vals)


GRID16 = PhaseGrid(2, 16, 5.0)


def test_self_bracket_vanishes_to_roundoff():
    g = offset_gaussian(GRID16, (0.4, -0.2), width=1.3, phase=(0.3, 0.1))
    for hbar in (0.0, 0.1, 1.0):
        b = moyal_bracket(g, g, hbar)
        assert np.abs(b.values).max() < 1e-14 * max(1.0, np.abs(g.values).max())


def test_antisymmetry_and_bilinearity():
    g = offset_gaussian(GRID16, (0.5, 0.0))
    gp = offset_gaussian(GRID16, (-0.3, 0.4), width=0.8)
    b_fwd = moyal_bracket(g, gp, 0.3)
    b_rev = moyal_bracket(gp, g, 0.3)
    np.testing.assert_allclose(b_fwd.values, -b_rev.values, atol=1e-14)
    b_scaled = moyal_bracket(2.0 * g, gp, 0.3)
    np.testing.assert_allclose(b_scaled.values, 2.0 * b_fwd.values, atol=1e-14)
    h = offset_gaussian(GRID16, (0.0, -0.6), width=1.1)
    b_sum = moyal_bracket(g + h, gp, 0.3)
    b_parts = moyal_bracket(g, gp, 0.3) + moyal_bracket(h, gp, 0.3)
    np.testing.assert_allclose(b_sum.values, b_parts.values, atol=1e-13)


def finite_difference_poisson(g_sym, gp_sym, pts, delta=1e-4):
    """Direct-space {g, g'} = g_xi g'_x - g_x g'_xi by central differences."""
    pts = np.asarray(pts, dtype=float)
    ex = np.array([delta, 0.0])
    exi = np.array([0.0, delta])

    def partials(sym):
        gx = (sym.point_values(pts + ex) - sym.point_values(pts - ex)) / (2 * delta)
        gxi = (sym.point_values(pts + exi) - sym.point_values(pts - exi)) / (2 * delta)
        return gx, gxi

    gx, gxi = partials(g_sym)
    gpx, gpxi = partials(gp_sym)
    return gxi * gpx - gx * gpxi


def test_hbar_zero_matches_poisson_oracle():
    g = offset_gaussian(GRID16, (0.3, -0.2), width=1.2)
    gp = offset_gaussian(GRID16, (-0.4, 0.5), width=1.0)
    bracket_hat = moyal_bracket(g, gp, 0.0)
    pts = np.array([[0.4, 0.3], [-0.6, 0.2], [0.1, -0.8], [0.9, 0.7]])
    via_kernel = bracket_hat.point_values(pts)
    via_fd = finite_difference_poisson(g, gp, pts)
    scale = np.abs(via_fd).max()
    assert np.abs(via_kernel - via_fd).max() / scale < 1e-3


def test_hbar_dependence_is_second_order():
    g = offset_gaussian(GRID16, (0.3, -0.2), width=1.2)
    gp = offset_gaussian(GRID16, (-0.4, 0.5), width=1.0)
    b0 = moyal_bracket(g, gp, 0.0)
    d1 = np.abs(moyal_bracket(g, gp, 0.1).values - b0.values).max()
    d2 = np.abs(moyal_bracket(g, gp, 0.2).values - b0.values).max()
    assert d2 / d1 == pytest.approx(4.0, rel=0.15)


def test_moyal_inequality_cases():
    g = offset_gaussian(GRID16, (0.2, 0.1), width=1.1)
    gp = offset_gaussian(GRID16, (-0.5, 0.3), width=0.9, phase=(0.4, -0.2))
    for hbar in (0.0, 0.1, 1.0):
        report = verify_moyal_inequality(g, gp, sigma=1.0, hbar=hbar)
        assert report["passed"]
        assert report["lhs"] <= report["rhs"]
    same = verify_moyal_inequality(g, g, sigma=1.0, hbar=0.5)
    assert same["passed"] and same["lhs"] < 1e-12


def test_disjoint_support_far_below_bound():
    grid = PhaseGrid(2, 32, 8.0)
    g = offset_gaussian(grid, (4.5, 4.5), width=0.5)
    gp = offset_gaussian(grid, (-4.5, -4.5), width=0.5)
    report = verify_moyal_inequality(g, gp, sigma=0.5, hbar=0.1)
    assert report["passed"]
    assert report["lhs"] < 1e-3 * report["rhs"]


def test_poincare_inequality_gaussians():
    grid = PhaseGrid(2, 128, 12.0)
    for width, sigma in [(0.6, 0.5), (0.8, 1.0), (0.5, 2.0)]:
        f = offset_gaussian(grid, (0.5, -0.3), width=width)
        report = verify_poincare_inequality(f, sigma)
        assert report["passed"], (width, sigma, report)


def test_poincare_zero_symbol():
    report = verify_poincare_inequality(FourierSymbol.zero(GRID16), 1.0)
    assert report["passed"] and report["lhs"] == 0.0


def test_poincare_tightens_with_concentration():
    # sharper hat concentration drives the ratio rhs/lhs up like 1/width
    grid = PhaseGrid(2, 128, 12.0)
    ratios = []
    for width in (1.6, 0.8, 0.4):
        f = offset_gaussian(grid, (0.0, 0.0), width=width)
        rep = verify_poincare_inequality(f, 1.0)
        ratios.append(rep["rhs"] / rep["lhs"])
    assert ratios[0] < ratios[1] < ratios[2]


def test_cost_guard():
    g = offset_gaussian(GRID16, (0.0, 0.0))
    with pytest.raises(BudgetError):
        moyal_bracket(g, g, 0.1, pair_budget=1000)


def make_family(gamma, theta, nu_max=2, grid=GRID16):
    g = GaussianSymbol(gamma, theta)
    return fourier_coefficients(
        lambda phi: g.hat_flow(grid, phi[0]),
        OMEGA,
        (nu_max, 0),
        4 * max(nu_max, 1),
        grid,
        aliasing_fraction=0.5,  # deliberately small boxes in these tests
    )


def test_lie_iterates_zero_generator():
    g = make_family(1.4, 0.8)
    w = g.map(lambda nu, sym: 0.0 * sym)
    iters = lie_iterates(g, w, 0.1, r_max=2, sigma=0.5, rho=0.2)
    assert iters[1]["norm"] == 0.0 and iters[2]["norm"] == 0.0


def test_lie_iterates_first_step_is_bracket():
    g = make_family(1.4, 0.8)
    w = make_family(1.2, 0.3)
    iters = lie_iterates(g, w, 0.1, r_max=1, sigma=0.5, rho=0.2)
    direct = family_moyal_bracket(w, g, 0.1)
    for nu in direct.keys():
        np.testing.assert_allclose(iters[1]["family"][nu].values, direct[nu].values, atol=1e-15)


def test_lie_iterates_bound_on_gaussian_family():
    rng = np.random.default_rng(11)
    for _ in range(3):
        g = make_family(rng.uniform(1.1, 1.6), rng.uniform(0, 2 * np.pi))
        w = make_family(rng.uniform(1.1, 1.6), rng.uniform(0, 2 * np.pi))
        iters = lie_iterates(g, w, 0.1, r_max=2, sigma=0.5, rho=0.2)
        for entry in iters[1:]:
            assert entry["norm"] <= entry["bound"] * (1 + 1e-10)
