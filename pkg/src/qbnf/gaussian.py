"""Closed-form Gaussian symbol family under the oscillator torus action.

One mode with frequency omega = gamma * exp(i*theta) acting on u = (x, xi):
the pullback of the phase-space Gaussian g(u) = exp(-|u|^2/4) along the flow
is exp(-<Q(phi) u, u>/4) with

    Q = [[A, B/2], [B/2, C]],  A = cos^2 + gamma^2 sin^2,
    B = cos(theta) (1/gamma - gamma) sin(2 phi),
    C = cos^2 + sin^2 / gamma^2,
    det Q = 1 + kappa (1 - cos^2 theta) sin^2 cos^2,   kappa = gamma^2 + 1/gamma^2 - 2.

In the package transform convention the angular Fourier coefficients of the
family are

    g_hat_nu(s) = (2/(2 pi)^2) * integral_0^{2pi} det(Q)^(-1/2)
                  * exp(-<Q^{-1} s, s>) * exp(-i nu phi) dphi,

so the uniform bound |g_hat_nu(s)| <= (1/pi) exp(-|s|^2 / D) with
D = (2 + kappa + sqrt((2+kappa)^2 - 4))/2 is exact (equality at kappa = 0).
Q has period pi in phi, hence every odd-nu coefficient vanishes identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import FourierSymbol, PhaseGrid

__all__ = ["GaussianSymbol", "TwoModeGaussian"]


@dataclass(frozen=True)
class GaussianSymbol:
    """One-mode family member, parameterized by omega = gamma * exp(i theta)."""

    gamma: float
    theta: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @classmethod
    def from_frequency(cls, omega: complex, amplitude: float = 1.0) -> "GaussianSymbol":
        return cls(abs(omega), float(np.angle(omega)), amplitude)

    @property
    def omega(self) -> complex:
        return self.gamma * np.exp(1j * self.theta)

    @property
    def kappa(self) -> float:
        return self.gamma**-2 + self.gamma**2 - 2.0

    @property
    def big_d(self) -> float:
        """Eigenvalue envelope: 1/D <= lambda1 <= lambda2 <= D for all phi."""
        t = 2.0 + self.kappa
        return 0.5 * (t + np.sqrt(t * t - 4.0))

    def analyticity_margin(self) -> float:
        """Half-width of the phi strip where det Q stays nonzero (theta-uniform)."""
        if self.kappa == 0.0:
            return np.inf
        return 0.25 * float(np.arccosh(1.0 + 8.0 / self.kappa))

    def q_entries(self, phi):
        phi = np.asarray(phi, dtype=float)
        c2, s2 = np.cos(phi) ** 2, np.sin(phi) ** 2
        a = c2 + self.gamma**2 * s2
        b = np.cos(self.theta) * (1.0 / self.gamma - self.gamma) * np.sin(2.0 * phi)
        c = c2 + s2 / self.gamma**2
        return a, b, c

    def det_q(self, phi):
        phi = np.asarray(phi, dtype=float)
        s2c2 = (np.sin(phi) * np.cos(phi)) ** 2
        return 1.0 + self.kappa * (1.0 - np.cos(self.theta) ** 2) * s2c2

    def trace_q(self, phi):
        phi = np.asarray(phi, dtype=float)
        return 2.0 + self.kappa * np.sin(phi) ** 2

    def q_eigenvalues(self, phi):
        """(lambda1, lambda2) of Q(phi), lambda1 <= lambda2."""
        t = self.trace_q(phi)
        d = self.det_q(phi)
        root = np.sqrt(np.maximum(t * t - 4.0 * d, 0.0))
        return 0.5 * (t - root), 0.5 * (t + root)

    def pullback_values(self, u, phi):
        """Direct-space pullback g(Psi_phi(u)) = amp * exp(-<Q u, u>/4)."""
        u = np.asarray(u, dtype=float)
        a, b, c = self.q_entries(phi)
        x, xi = u[..., 0], u[..., 1]
        return self.amplitude * np.exp(-(a * x * x + b * x * xi + c * xi * xi) / 4.0)

    def _quadratic_form_inv(self, grid: PhaseGrid, phi: float):
        """<Q(phi)^{-1} s, s> on the grid nodes."""
        a, b, c = self.q_entries(phi)
        det = self.det_q(phi)
        s = grid.nodes()
        s1, s2 = s[..., 0], s[..., 1]
        return (c * s1 * s1 - b * s1 * s2 + a * s2 * s2) / det

    def hat_flow(self, grid: PhaseGrid, phi: float) -> np.ndarray:
        """Transform of the pullback: (amp/pi) det(Q)^{-1/2} exp(-<Q^{-1}s,s>)."""
        if grid.dimension != 2:
            raise ValueError("one-mode family lives on a 2D grid")
        det = self.det_q(phi)
        return (self.amplitude / np.pi) / np.sqrt(det) * np.exp(-self._quadratic_form_inv(grid, phi))

    def hat_coefficient(self, nu: int, grid: PhaseGrid, angular_nodes: int = 64) -> FourierSymbol:
        """Angular quadrature of the nu-th Fourier coefficient on the grid."""
        vals = self.hat_coefficient_values(nu, grid, angular_nodes)
        return FourierSymbol(grid, vals, label=f"gaussian(g={self.gamma:.3g}) nu={nu}")

    def hat_coefficient_values(self, nu: int, grid: PhaseGrid, angular_nodes: int = 64) -> np.ndarray:
        phis = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
        acc = np.zeros(grid.shape, dtype=complex)
        for phi in phis:
            acc += self.hat_flow(grid, phi) * np.exp(-1j * nu * phi)
        return acc / angular_nodes

    def uniform_bound(self, grid: PhaseGrid) -> np.ndarray:
        """Pointwise envelope (amp/pi) exp(-|s|^2/D), valid for every nu."""
        r2 = grid.radii() ** 2
        return (self.amplitude / np.pi) * np.exp(-r2 / self.big_d)


@dataclass(frozen=True)
class TwoModeGaussian:
    """Product family on the full phase space; factorizes mode by mode."""

    mode1: GaussianSymbol
    mode2: GaussianSymbol
    amplitude: float = 1.0

    @classmethod
    def from_frequencies(cls, omega1: complex, omega2: complex, amplitude: float = 1.0):
        return cls(
            GaussianSymbol.from_frequency(omega1),
            GaussianSymbol.from_frequency(omega2),
            amplitude,
        )

    def mode_grids(self, grid4: PhaseGrid) -> PhaseGrid:
        if grid4.dimension != 4:
            raise ValueError("two-mode family lives on a 4D grid")
        return PhaseGrid(2, grid4.points_per_axis, grid4.extent)

    def hat_coefficient_values(self, nu, grid4: PhaseGrid, angular_nodes: int = 64) -> np.ndarray:
        """Coefficient at nu = (nu1, nu2) as a 4D array over s = (v1,v2,w1,w2)."""
        g2 = self.mode_grids(grid4)
        h1 = self.mode1.hat_coefficient_values(int(nu[0]), g2, angular_nodes)
        h2 = self.mode2.hat_coefficient_values(int(nu[1]), g2, angular_nodes)
        # mode 1 occupies axes (v1, w1) = (0, 2); mode 2 axes (v2, w2) = (1, 3)
        return self.amplitude * np.einsum("ik,jl->ijkl", h1, h2)

    def hat_flow(self, grid4: PhaseGrid, phi) -> np.ndarray:
        g2 = self.mode_grids(grid4)
        h1 = self.mode1.hat_flow(g2, float(phi[0]))
        h2 = self.mode2.hat_flow(g2, float(phi[1]))
        return self.amplitude * np.einsum("ik,jl->ijkl", h1, h2)

    def family_norm(
        self,
        grid4: PhaseGrid,
        nu_box: int,
        rho: float,
        sigma: float,
        angular_nodes: int = 64,
    ) -> float:
        """Weighted family norm sum_nu e^{rho |nu|_1} |f_nu|_sigma of the
        nu-truncated two-mode family; hbar-free by construction.

        The 4D weight e^{sigma |s|} does not factorize, so each coefficient is
        integrated on the full grid from the outer product of mode arrays.
        """
        g2 = self.mode_grids(grid4)
        weight4 = np.exp(sigma * grid4.radii())
        cell = grid4.cell_volume
        mode_abs = {}
        for nu in range(-nu_box, nu_box + 1):
            mode_abs[(1, nu)] = np.abs(self.mode1.hat_coefficient_values(nu, g2, angular_nodes))
            mode_abs[(2, nu)] = np.abs(self.mode2.hat_coefficient_values(nu, g2, angular_nodes))
        total = 0.0
        for n1 in range(-nu_box, nu_box + 1):
            for n2 in range(-nu_box, nu_box + 1):
                norm = cell * np.einsum(
                    "ik,jl,ijkl->", mode_abs[(1, n1)], mode_abs[(2, n2)], weight4
                )
                total += np.exp(rho * (abs(n1) + abs(n2))) * float(norm)
        return abs(self.amplitude) * total
