"""Torus-action flows, Fourier coefficient families and the homological solver.

The oscillator flow with complex frequencies maps real phase-space points to
complex ones:

    x' = x cos(phi) + (xi/omega) sin(phi),  xi' = xi cos(phi) - omega x sin(phi)

per mode; the hyperbolic companion replaces cos/sin by cosh/sinh.  A symbol is
graded by the angular Fourier index nu of its pullback; families of
coefficients are stored as :class:`TorusCoefficients` over the box
|nu|_inf <= nu_max, each entry a Fourier-side symbol on one shared grid.

Flow composition on a family is realized by angle shift, i.e. coefficient nu
picks up exp(i <nu, phi0>); this is NOT the same as composing a member's
analytic continuation with the complexified point map (the base symbols are
functions of |z| and do not continue holomorphically along the flow), so all
flow derivatives below act on the angle-shift phases.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError
from .freq import FrequencyPair, denominator_lower_bound, small_denominator
from .grids import FourierSymbol, PhaseGrid, sigma_norm

__all__ = [
    "psi_map",
    "xi_map",
    "torus_pullback",
    "hyperbolic_pullback",
    "p0_values",
    "TorusCoefficients",
    "fourier_coefficients",
    "rho_sigma_norm",
    "gamma_sup_norm",
    "homological_solve",
    "homological_residual",
]


def _mode_arrays(u, n_modes):
    u = np.asarray(u)
    if u.shape[-1] != 2 * n_modes:
        raise ValueError(f"points must have last dimension {2 * n_modes}, got {u.shape[-1]}")
    return u[..., :n_modes], u[..., n_modes:]


def psi_map(u, omegas, phis):
    """Oscillator flow point map; layout u = (x_1..x_T, xi_1..xi_T)."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=complex))
    phis = np.atleast_1d(np.asarray(phis, dtype=complex))
    x, xi = _mode_arrays(u, omegas.size)
    cos, sin = np.cos(phis), np.sin(phis)
    xp = x * cos + xi * sin / omegas
    xip = xi * cos - omegas * x * sin
    return np.concatenate([xp, xip], axis=-1)


def xi_map(u, omegas, phis):
    """Hyperbolic companion flow: psi_map with (i*phi, i*omega) folded in."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=complex))
    phis = np.atleast_1d(np.asarray(phis, dtype=complex))
    x, xi = _mode_arrays(u, omegas.size)
    ch, sh = np.cosh(phis), np.sinh(phis)
    xp = x * ch + xi * sh / omegas
    xip = xi * ch + omegas * x * sh
    return np.concatenate([xp, xip], axis=-1)


def torus_pullback(f, omega: FrequencyPair, phi):
    """Compose a pointwise-evaluable symbol with the torus flow."""
    omegas = omega.as_vector()

    def pulled(u):
        return f(psi_map(u, omegas, phi))

    return pulled


def hyperbolic_pullback(f, omega: FrequencyPair, phi):
    """Compose with the hyperbolic flow; the caller enforces any strip bound."""
    omegas = omega.as_vector()

    def pulled(u):
        return f(xi_map(u, omegas, phi))

    return pulled


def p0_values(u, omega: FrequencyPair):
    """Oscillator symbol p0(u) = sum_k (xi_k^2 + omega_k^2 x_k^2)/2, no conjugation."""
    omegas = omega.as_vector()
    x, xi = _mode_arrays(np.asarray(u, dtype=complex), 2)
    return 0.5 * ((xi**2).sum(axis=-1) + (omegas**2 * x**2).sum(axis=-1))


@dataclass
class TorusCoefficients:
    """Family {f_nu} over the integer box |nu_k| <= nu_max[k], shared grid."""

    omega: FrequencyPair
    nu_max: tuple
    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        b1, b2 = int(self.nu_max[0]), int(self.nu_max[1])
        self.nu_max = (b1, b2)
        expected = {(n1, n2) for n1 in range(-b1, b1 + 1) for n2 in range(-b2, b2 + 1)}
        if set(self.coefficients) != expected:
            raise ValueError("coefficient keys must fill the box |nu|_inf <= nu_max")
        grids = {c.grid for c in self.coefficients.values()}
        if len(grids) != 1:
            raise GridMismatchError("all member symbols must share one grid")

    @property
    def grid(self) -> PhaseGrid:
        return next(iter(self.coefficients.values())).grid

    def keys(self):
        return sorted(self.coefficients.keys())

    def __getitem__(self, nu) -> FourierSymbol:
        return self.coefficients[tuple(nu)]

    def map(self, fn) -> "TorusCoefficients":
        new = {nu: fn(nu, sym) for nu, sym in self.coefficients.items()}
        return TorusCoefficients(self.omega, self.nu_max, new)

    def resummed_hat(self) -> np.ndarray:
        """Pointwise sum of all coefficient transforms (phi = 0 resummation)."""
        acc = np.zeros(self.grid.shape, dtype=complex)
        for sym in self.coefficients.values():
            acc += sym.values
        return acc

    def point_values(self, nu, points) -> np.ndarray:
        return self.coefficients[tuple(nu)].point_values(points)

    def flow_values(self, points, t) -> np.ndarray:
        """Family evaluated along the diagonal flow: sum_nu f_nu(u) e^{i<nu,omega> t}."""
        omega_vec = self.omega.as_vector()
        total = None
        for nu, sym in self.coefficients.items():
            phase = np.exp(1j * (nu[0] * omega_vec[0] + nu[1] * omega_vec[1]) * t)
            term = sym.point_values(points) * phase
            total = term if total is None else total + term
        return total

    def to_json_dict(self) -> dict:
        return {
            "omega_re_im": [
                [self.omega.omega1.real, self.omega.omega1.imag],
                [self.omega.omega2.real, self.omega.omega2.imag],
            ],
            "nu_max": list(self.nu_max),
            "coefficients": {
                f"{nu[0]},{nu[1]}": sym.to_json_dict() for nu, sym in sorted(self.coefficients.items())
            },
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "TorusCoefficients":
        (a, b), (c, d) = payload["omega_re_im"]
        omega = FrequencyPair(complex(a, b), complex(c, d))
        coeffs = {}
        for key, sub in payload["coefficients"].items():
            n1, n2 = key.split(",")
            coeffs[(int(n1), int(n2))] = FourierSymbol.from_json_dict(sub)
        return cls(omega, tuple(payload["nu_max"]), coeffs)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "TorusCoefficients":
        return cls.from_json_dict(json.loads(text))


def fourier_coefficients(
    hat_flow,
    omega: FrequencyPair,
    nu_max,
    angular_nodes: int,
    grid: PhaseGrid,
    aliasing_fraction: float = 0.05,
) -> TorusCoefficients:
    """Tensor-product discrete Fourier quadrature of the torus coefficients.

    ``hat_flow(phi)`` must return the transform of the pulled-back symbol on
    ``grid`` for the angle tuple ``phi``.  One angle is used for 2D grids
    (second index pinned to 0), two for 4D grids.
    """
    b1, b2 = (int(nu_max[0]), int(nu_max[1])) if np.ndim(nu_max) else (int(nu_max), int(nu_max))
    if grid.dimension == 2:
        b2 = 0
    if angular_nodes < 4 * max(b1, b2, 1):
        raise ValueError(
            f"angular_nodes={angular_nodes} too small for nu_max={(b1, b2)}; need >= 4*nu_max"
        )
    n = angular_nodes
    phis = 2.0 * np.pi * np.arange(n) / n
    coeffs = {}
    if grid.dimension == 2:
        samples = [np.asarray(hat_flow((phi, 0.0)), dtype=complex) for phi in phis]
        for n1 in range(-b1, b1 + 1):
            acc = np.zeros(grid.shape, dtype=complex)
            for phi, sample in zip(phis, samples):
                acc += sample * np.exp(-1j * n1 * phi)
            coeffs[(n1, 0)] = FourierSymbol(grid, acc / n, label=f"nu=({n1},0)")
    else:
        samples = {}
        for i, p1 in enumerate(phis):
            for j, p2 in enumerate(phis):
                samples[(i, j)] = np.asarray(hat_flow((p1, p2)), dtype=complex)
        for n1 in range(-b1, b1 + 1):
            for n2 in range(-b2, b2 + 1):
                acc = np.zeros(grid.shape, dtype=complex)
                for (i, j), sample in samples.items():
                    acc += sample * np.exp(-1j * (n1 * phis[i] + n2 * phis[j]))
                coeffs[(n1, n2)] = FourierSymbol(grid, acc / n**2, label=f"nu=({n1},{n2})")
    family = TorusCoefficients(omega, (b1, b2), coeffs)

    total = sum(sym.l1_norm() for sym in family.coefficients.values())
    shell = sum(
        sym.l1_norm()
        for nu, sym in family.coefficients.items()
        if max(abs(nu[0]), abs(nu[1])) == max(b1, b2) and max(b1, b2) > 0
    )
    if total > 0 and shell / total > aliasing_fraction:
        warnings.warn(
            f"outermost nu-shell carries {shell / total:.1%} of the family mass; "
            "increase nu_max or angular_nodes",
            RuntimeWarning,
            stacklevel=2,
        )
    return family


def rho_sigma_norm(family: TorusCoefficients, rho: float, sigma: float) -> float:
    """Weighted family norm  sum_nu e^{rho |nu|_1} * sigma_norm(f_nu)."""
    total = 0.0
    for nu, sym in sorted(family.coefficients.items()):
        total += np.exp(rho * (abs(nu[0]) + abs(nu[1]))) * sigma_norm(sym, sigma)
    return float(total)


def gamma_sup_norm(per_omega_norms, sample_spec: str = "") -> dict:
    """Fold a finite frequency sample into the sup; the sample is declared."""
    norms = list(per_omega_norms)
    if not norms:
        raise ValueError("nonempty sample required")
    return {"sup": float(max(norms)), "sample_size": len(norms), "sample_spec": sample_spec}


def homological_solve(family: TorusCoefficients, omega: FrequencyPair):
    """Split f into (w, zeta): zeta the nu = 0 coefficient, w_nu = f_nu / (i<omega,nu>).

    The sigma-norm of each divided coefficient contracts by at least
    1/denominator_lower_bound(omega) since |<omega,nu>| >= C |nu|_2 >= C.
    """
    denominator_lower_bound(omega)  # validates non-degeneracy up front
    zeta = family[(0, 0)].copy(label="zeta")

    def divide(nu, sym):
        if nu == (0, 0):
            return FourierSymbol.zero(sym.grid, label="w nu=0")
        return FourierSymbol(sym.grid, sym.values / small_denominator(omega, nu), f"w nu={nu}")

    w = family.map(divide)
    return w, zeta


def homological_residual(
    w: TorusCoefficients,
    family: TorusCoefficients,
    zeta: FourierSymbol,
    omega: FrequencyPair,
    sample_points,
    step: float = 1e-4,
) -> float:
    """Max defect of {w, p0} + f - zeta at the sample points.

    {w, p0} is the negative time derivative of the flow composition, evaluated
    by central differences of sum_nu w_nu(u) e^{i<nu,omega> t}; exact for the
    quadratic oscillator symbol, so only the difference step enters.
    """
    pts = np.asarray(sample_points, dtype=float)
    flow_plus = w.flow_values(pts, step)
    flow_minus = w.flow_values(pts, -step)
    bracket_w_p0 = -(flow_plus - flow_minus) / (2.0 * step)

    f_vals = None
    for nu in family.keys():
        term = family.point_values(nu, pts)
        f_vals = term if f_vals is None else f_vals + term
    zeta_vals = zeta.point_values(pts)
    return float(np.abs(bracket_w_p0 + f_vals - zeta_vals).max())
