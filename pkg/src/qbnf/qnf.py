"""Order-by-order quantum normal form and the contraction-scheme diagnostics.

Everything runs on the truncated Fock lattice.  The conjugation expansion is
the graded recursion X^0 = X, X^l = [W, X^{l-1}]/(i hbar l); at order s the
split

    [W_s, P0]/(i hbar) + F_s = Z_s,   Z_s diagonal,

is solved entrywise: the commutator with the diagonal P0 scales the
nu = m - n block by i<omega, n - m>, so W_s = F_s / (i<omega, n - m>) off the
diagonal.  That division is hbar-free, and the residual identity holds to
machine precision on the whole lattice.  Nested sums assembling F_s replace
the innermost [W_j, P0]/(i hbar) by Z_j - F_j, which is exact and avoids the
large oscillator diagonal entirely.

hbar = 0 is rejected here; the classical limit is served by the polynomial
Lie-series engine in :mod:`qbnf.oracle`.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import ContaminationError, SeriesDivergenceError
from .fock import FockTruncation, GradedMatrix, p0_eigenvalue, p0_matrix
from .freq import FrequencyPair, denominator_lower_bound

__all__ = [
    "homological_solve_matrix",
    "commutator_over_ihbar",
    "normal_form_orders",
    "NormalFormSeries",
    "eigenvalue_series",
    "empirical_radius",
    "mu_and_radius",
    "iterate_contraction",
]


def _grading_denominators(truncation: FockTruncation, omega: FrequencyPair) -> np.ndarray:
    """Matrix of i<omega, n - m> over (row m, col n); zero exactly on the diagonal."""
    n1, n2 = truncation.coordinates()
    d1 = n1[None, :] - n1[:, None]
    d2 = n2[None, :] - n2[:, None]
    return 1j * (omega.omega1 * d1 + omega.omega2 * d2)


def homological_solve_matrix(
    f: GradedMatrix, omega: FrequencyPair, hbar: float
) -> tuple[GradedMatrix, GradedMatrix]:
    """Split F into (W, Z) with [W, P0]/(i hbar) + F = Z, Z = diag(F), W diag 0."""
    denominator_lower_bound(omega)  # rejects degenerate frequencies
    denom = _grading_denominators(f.truncation, omega)
    off = np.eye(f.truncation.dim, dtype=bool)
    w_entries = np.where(off, 0.0, f.entries / np.where(off, 1.0, denom))
    w = GradedMatrix(f.truncation, w_entries, f.declared_bandwidth)
    z = f.diagonal_part()
    return w, z


def commutator_over_ihbar(a: GradedMatrix, b: GradedMatrix, hbar: float) -> GradedMatrix:
    """(AB - BA)/(i hbar); hbar = 0 belongs to the classical oracle, not here."""
    if hbar == 0.0:
        raise ValueError("hbar = 0 is not valid on the matrix path; use the classical oracle")
    return (1.0 / (1j * hbar)) * (a @ b - b @ a)


def _compositions(total: int, parts: int):
    """Ordered tuples of positive integers summing to total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _assemble_fs(s, f0, ws, zs, fs, hbar):
    """Nested-commutator sums feeding order s (s >= 2)."""
    total = GradedMatrix.zero(f0.truncation)
    # stream seeded by P0, innermost commutator replaced by Z_j - F_j
    for length in range(2, s + 1):
        for comp in _compositions(s, length):
            x = zs[comp[-1]] - fs[comp[-1]]
            for j in reversed(comp[:-1]):
                x = commutator_over_ihbar(ws[j], x, hbar)
            total = total + (1.0 / factorial(length)) * x
    # stream seeded by the perturbation
    for length in range(1, s):
        for comp in _compositions(s - 1, length):
            x = f0
            for j in reversed(comp):
                x = commutator_over_ihbar(ws[j], x, hbar)
            total = total + (1.0 / factorial(length)) * x
    return total


def normal_form_orders(
    f0: GradedMatrix,
    omega: FrequencyPair,
    hbar: float,
    max_order: int,
    report_points,
) -> dict:
    """Diagonal normal-form data per order at the requested lattice points.

    Raises ContaminationError if any point sits within p * bandwidth(F0) + 2
    of the truncation edge at some order p; entries there would silently carry
    truncation garbage.
    """
    if hbar == 0.0:
        raise ValueError("hbar = 0 is not valid on the matrix path; use the classical oracle")
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    trunc = f0.truncation
    bw = f0.declared_bandwidth if f0.declared_bandwidth is not None else f0.bandwidth()
    for n in report_points:
        depth = max_order * bw + 2
        if max(n[0], n[1]) > trunc.n_max - depth:
            raise ContaminationError(
                f"point {tuple(n)} needs n_max >= {max(n[0], n[1]) + depth}, have {trunc.n_max}"
            )

    ws: dict[int, GradedMatrix] = {}
    zs: dict[int, GradedMatrix] = {}
    fs: dict[int, GradedMatrix] = {1: f0}
    for s in range(1, max_order + 1):
        if s > 1:
            fs[s] = _assemble_fs(s, f0, ws, zs, fs, hbar)
        w, z = homological_solve_matrix(fs[s], omega, hbar)
        ws[s], zs[s] = w, z

    orders = [
        {tuple(n): zs[p].diagonal_at(n) for n in report_points}
        for p in range(1, max_order + 1)
    ]
    return {
        "orders": orders,
        "ws": ws,
        "zs": zs,
        "fs": fs,
        "bandwidth": bw,
        "contamination_depth": max_order * bw,
    }


@dataclass
class NormalFormSeries:
    """Per-order diagonal data with convergence metadata."""

    omega: FrequencyPair
    hbar: float
    sigma: float
    rho: float
    orders: list  # orders[p-1] maps lattice point -> N_p(n hbar, hbar)
    f0_norm: float
    mu: float
    epsilon_star: float
    remainder_norms: list = field(default_factory=list)
    truncation_n_max: int = 0
    bandwidth: int = 0
    contamination_depth: int = 0

    @property
    def max_order(self) -> int:
        return len(self.orders)

    def order_value(self, p: int, n) -> complex:
        return self.orders[p - 1][tuple(n)]

    def to_json_dict(self) -> dict:
        return {
            "omega_re_im": [
                [self.omega.omega1.real, self.omega.omega1.imag],
                [self.omega.omega2.real, self.omega.omega2.imag],
            ],
            "hbar": self.hbar,
            "sigma": self.sigma,
            "rho": self.rho,
            "f0_norm": self.f0_norm,
            "mu": self.mu,
            "epsilon_star": self.epsilon_star,
            "remainder_norms": list(self.remainder_norms),
            "orders": [
                {f"{n[0]},{n[1]}": [v.real, v.imag] for n, v in sorted(table.items())}
                for table in self.orders
            ],
            "truncation": {
                "n_max": self.truncation_n_max,
                "bandwidth": self.bandwidth,
                "contamination_depth": self.contamination_depth,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, payload: dict) -> "NormalFormSeries":
        (a, b), (c, d) = payload["omega_re_im"]
        orders = []
        for table in payload["orders"]:
            parsed = {}
            for key, (re, im) in table.items():
                i, j = key.split(",")
                parsed[(int(i), int(j))] = complex(re, im)
            orders.append(parsed)
        return cls(
            omega=FrequencyPair(complex(a, b), complex(c, d)),
            hbar=payload["hbar"],
            sigma=payload["sigma"],
            rho=payload["rho"],
            orders=orders,
            f0_norm=payload["f0_norm"],
            mu=payload["mu"],
            epsilon_star=payload["epsilon_star"],
            remainder_norms=list(payload["remainder_norms"]),
            truncation_n_max=payload["truncation"]["n_max"],
            bandwidth=payload["truncation"]["bandwidth"],
            contamination_depth=payload["truncation"]["contamination_depth"],
        )


def mu_and_radius(f0_norm: float, sigma: float, epsilon: float) -> tuple[float, float]:
    """mu = 4 eps |f0| / sigma and the radius eps* = sigma/(16 |f0|) where mu = 1/4.

    Both are built from the hbar-free symbol norm, so recomputation across
    hbar values is bit-identical.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if f0_norm < 0:
        raise ValueError("f0_norm must be nonnegative")
    if f0_norm == 0.0:
        return 0.0, float("inf")
    return 4.0 * epsilon * f0_norm / sigma, sigma / (16.0 * f0_norm)


def eigenvalue_series(
    series: NormalFormSeries, n, epsilon: complex
) -> tuple[complex, list]:
    """Quantization formula: E0(n) + sum_p N_p(n hbar, hbar) eps^p, with terms."""
    if abs(epsilon) > series.epsilon_star:
        warnings.warn(
            f"|epsilon|={abs(epsilon):.3g} exceeds epsilon_star={series.epsilon_star:.3g}; "
            "convergence not guaranteed",
            RuntimeWarning,
            stacklevel=2,
        )
    terms = [series.order_value(p, n) * epsilon**p for p in range(1, series.max_order + 1)]
    value = p0_eigenvalue(n, series.omega, series.hbar) + sum(terms)
    return value, terms


def empirical_radius(series: NormalFormSeries, n, p_lo: int = 3) -> float:
    """Ratio-test estimate from |N_p / N_{p+1}| over p = p_lo .. P-1."""
    mags = [abs(series.order_value(p, n)) for p in range(1, series.max_order + 1)]
    ratios = []
    for p in range(p_lo, series.max_order):
        a, b = mags[p - 1], mags[p]
        if a > 0 and b > 0:
            ratios.append(a / b)
    if not ratios:
        return float("inf")
    return float(np.exp(np.mean(np.log(ratios))))


def _stream_tail(w, seed, hbar, start_order, term_tol, max_terms):
    """Sum_{l >= start_order} of the recursion X^l = [W, X^{l-1}]/(i hbar l).

    ``seed`` is X^{start_order - 1} for start_order >= 1 (or X^0 itself when
    start_order == 1).  Aborts if term norms grow twice in a row.
    """
    total = GradedMatrix.zero(seed.truncation)
    x = seed
    prev_norm = None
    grew = 0
    scale = None
    for l in range(start_order, start_order + max_terms):
        x = commutator_over_ihbar(w, x, hbar) * (1.0 / l) if l > 0 else x
        norm = x.max_norm()
        if scale is None:
            scale = max(norm, 1.0)
        total = total + x
        if prev_norm is not None and norm > prev_norm:
            grew += 1
            if grew >= 2:
                raise SeriesDivergenceError(
                    f"conjugation series terms grow at l={l}: {prev_norm:.3e} -> {norm:.3e}"
                )
        else:
            grew = 0
        prev_norm = norm
        if norm < term_tol * scale:
            break
    else:
        raise SeriesDivergenceError(f"conjugation series not converged in {max_terms} terms")
    return total


def iterate_contraction(
    f0: GradedMatrix,
    omega: FrequencyPair,
    hbar: float,
    epsilon: float,
    k_max: int,
    sigma: float,
    rho: float,
    f0_norm: float,
    n_window: int,
    nu_cap: int | None = None,
    term_tol: float = 1e-14,
    max_terms: int = 60,
) -> dict:
    """k-step scheme Sigma_k = P0 + eps Z_k + V_k with measured remainder norms.

    Remainder norms use the rho-weighted graded max over the window
    |n|_inf <= n_window.  An optional grading cap bounds stored bandwidth;
    the largest entry it ever drops is reported so truncation is never
    silent.  The ratio verdict passes when every measured
    |V_{k+1}| / |V_k| <= 2 mu (1 + slack).
    """
    mu, eps_star = mu_and_radius(f0_norm, sigma, epsilon)
    trunc = f0.truncation

    def measure(v: GradedMatrix) -> float:
        return v.graded_window_norm(rho, n_window)

    if epsilon == 0.0:
        return {
            "mu": mu,
            "epsilon_star": eps_star,
            "remainder_norms": [0.0] * (k_max + 1),
            "ratios": [],
            "max_dropped_entry": 0.0,
            "z_diag": np.zeros(trunc.dim, dtype=complex),
        }
    if mu >= 0.25:
        raise ValueError(f"mu={mu:.3g} >= 1/4: outside the contraction regime")

    z = GradedMatrix.zero(trunc)
    v = epsilon * f0
    norms = [measure(v)]
    max_dropped = 0.0
    for _ in range(k_max):
        w, v_diag = homological_solve_matrix(v, omega, hbar)
        p1 = v_diag - v  # [W, P0]/(i hbar), exact
        v_next = _stream_tail(w, p1, hbar, 2, term_tol, max_terms)
        if z.max_norm() > 0:
            v_next = v_next + epsilon * _stream_tail(w, z, hbar, 1, term_tol, max_terms)
        v_next = v_next + _stream_tail(w, v, hbar, 1, term_tol, max_terms)
        if nu_cap is not None:
            v_next, dropped = v_next.nu_masked(nu_cap)
            max_dropped = max(max_dropped, dropped)
        z = z + (1.0 / epsilon) * v_diag
        norms.append(measure(v_next))
        v = v_next

    ratios = [norms[k + 1] / norms[k] if norms[k] > 0 else 0.0 for k in range(k_max)]
    return {
        "mu": mu,
        "epsilon_star": eps_star,
        "remainder_norms": norms,
        "ratios": ratios,
        "max_dropped_entry": max_dropped,
        "z_diag": np.diag(z.entries).copy(),
    }
