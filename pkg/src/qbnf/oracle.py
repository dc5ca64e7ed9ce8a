"""Independent ground-truth engines for the normal form.

Three oracles, each avoiding the graded machinery it checks:

* dense complex diagonalization of P0 + eps F0 with eigenvalue labels carried
  by continuation in eps from 0 (nearest-match tracking, ambiguity is an
  error);
* nondegenerate Rayleigh-Schrodinger coefficients through order 3, built
  directly from matrix entries and the denominators E_n - E_m;
* the classical (hbar = 0) Birkhoff normal form by a sparse-polynomial Lie
  series in ladder-adapted coordinates z_k = omega_k x_k + i xi_k.

The classical engine accepts polynomial perturbations only.  Those sit
outside the decaying symbol class the quantum estimates assume and are used
solely to validate the order-by-order algebra and the hbar -> 0 limit at
fixed truncation.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import BudgetError, TrackingAmbiguityError
from .fock import FockTruncation, GradedMatrix, p0_eigenvalue, p0_matrix
from .freq import FrequencyPair

__all__ = [
    "SpectrumResult",
    "diagonalize",
    "rs_coefficients",
    "ClassicalPolynomial",
    "poisson_bracket",
    "classical_birkhoff",
    "evaluate_action_polynomial",
]


# ---------------------------------------------------------------------------
# diagonalization with eps-continuation
# ---------------------------------------------------------------------------


@dataclass
class SpectrumResult:
    epsilon: complex
    hbar: float
    omega: FrequencyPair
    labels: list  # lattice points, parallel to eigenvalues
    eigenvalues: np.ndarray
    n_max: int
    source: str = "diagonalization"

    def value_at(self, n) -> complex:
        return complex(self.eigenvalues[self.labels.index(tuple(n))])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n1", "n2", "eps", "hbar", "re_E", "im_E", "source"])
        eps = complex(self.epsilon)
        eps_repr = repr(eps.real) if eps.imag == 0 else repr(eps)
        for label, value in zip(self.labels, self.eigenvalues):
            writer.writerow(
                [label[0], label[1], eps_repr, repr(self.hbar),
                 repr(value.real), repr(value.imag), self.source]
            )
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "epsilon": [complex(self.epsilon).real, complex(self.epsilon).imag],
            "hbar": self.hbar,
            "omega_re_im": [
                [self.omega.omega1.real, self.omega.omega1.imag],
                [self.omega.omega2.real, self.omega.omega2.imag],
            ],
            "n_max": self.n_max,
            "source": self.source,
            "eigenvalues": {
                f"{n[0]},{n[1]}": [v.real, v.imag]
                for n, v in zip(self.labels, self.eigenvalues)
            },
        }


def diagonalize(
    f0: GradedMatrix,
    omega: FrequencyPair,
    hbar: float,
    epsilon: complex,
    n_steps: int = 10,
    ambiguity_factor: float = 10.0,
) -> SpectrumResult:
    """Eigenvalues of P0 + eps F0 labeled by continuation from eps = 0.

    At eps = 0 the labels carry the exact unperturbed eigenvalues; each step
    re-solves the dense eigenproblem and matches labels by a global
    minimal-distance assignment.  A step is ambiguous when a second candidate
    sits within ``ambiguity_factor`` times the step-induced motion of the
    matched one; that raises instead of guessing.
    """
    if n_steps < 1 or n_steps > 10:
        raise ValueError("continuation uses between 1 and 10 steps")
    trunc = f0.truncation
    labels = [tuple(p) for p in trunc.points()]
    current = np.array([p0_eigenvalue(n, omega, hbar) for n in labels], dtype=complex)
    if epsilon == 0:
        return SpectrumResult(epsilon, hbar, omega, labels, current, trunc.n_max)

    p0 = p0_matrix(trunc, omega, hbar)
    scale = max(np.abs(p0.entries).max(), np.abs(f0.entries).max())
    d_eps = epsilon / n_steps
    # first-step prediction from the first-order slope, then linear extrapolation
    slopes = d_eps * np.diag(f0.entries)
    previous = None
    for step in range(1, n_steps + 1):
        eps_here = epsilon * step / n_steps
        predicted = current + slopes if previous is None else 2.0 * current - previous
        h = p0.entries + eps_here * f0.entries
        new_vals = np.linalg.eigvals(h)
        cost = np.abs(predicted[:, None] - new_vals[None, :])
        rows, cols = linear_sum_assignment(cost)
        order = np.empty_like(cols)
        order[rows] = cols
        matched = new_vals[order]
        floor = 1e3 * np.finfo(float).eps * scale
        for i in range(len(labels)):
            dists = np.sort(np.abs(new_vals - predicted[i]))
            unpredicted = max(abs(matched[i] - predicted[i]), floor)
            if len(dists) > 1 and dists[1] < ambiguity_factor * unpredicted:
                raise TrackingAmbiguityError(
                    f"label {labels[i]} at eps={eps_here}: second candidate at distance "
                    f"{dists[1]:.3e} vs unpredicted motion {unpredicted:.3e}"
                )
        previous, current = current, matched
    return SpectrumResult(epsilon, hbar, omega, labels, current, trunc.n_max)


# ---------------------------------------------------------------------------
# Rayleigh-Schrodinger through order 3
# ---------------------------------------------------------------------------


def rs_coefficients(
    f: GradedMatrix,
    omega: FrequencyPair,
    hbar: float,
    n,
    max_order: int = 3,
) -> list:
    """Standard nondegenerate coefficients [E1, E2, E3] at the level n.

    Complex-bilinear throughout (no conjugation); valid because the
    unperturbed level is simple whenever <omega, nu> never vanishes.
    """
    if not 1 <= max_order <= 3:
        raise ValueError("orders 1..3 supported")
    trunc = f.truncation
    bw = f.declared_bandwidth if f.declared_bandwidth is not None else f.bandwidth()
    if max(n[0], n[1]) + max_order * bw > trunc.n_max:
        raise BudgetError(
            f"truncation too small for the coupling bandwidth: need n_max >= "
            f"{max(n[0], n[1]) + max_order * bw}"
        )
    idx = trunc.flat_index(n)
    pts = trunc.points()
    energies = np.array([p0_eigenvalue(p, omega, hbar) for p in pts], dtype=complex)
    fmat = f.entries
    e_n = energies[idx]
    others = np.arange(trunc.dim) != idx
    gaps = np.where(others, e_n - energies, 1.0)

    out = [complex(fmat[idx, idx])]
    if max_order >= 2:
        weights = np.where(others, fmat[idx, :] * fmat[:, idx] / gaps, 0.0)
        out.append(complex(weights.sum()))
    if max_order >= 3:
        resolvent = np.where(others, 1.0 / gaps, 0.0)
        vec_in = fmat[:, idx] * resolvent
        middle = fmat @ vec_in
        third = complex((fmat[idx, :] * resolvent * middle).sum())
        correction = complex(fmat[idx, idx] * (fmat[idx, :] * fmat[:, idx] * resolvent**2).sum())
        out.append(third - correction)
    return out


# ---------------------------------------------------------------------------
# sparse polynomials and the classical Birkhoff normal form
# ---------------------------------------------------------------------------


class ClassicalPolynomial:
    """Sparse polynomial in (x1, xi1, x2, xi2); keys are exponent 4-tuples."""

    def __init__(self, coefficients: dict | None = None):
        self.coefficients = {}
        for key, value in (coefficients or {}).items():
            if value != 0:
                self.coefficients[tuple(int(e) for e in key)] = complex(value)

    @classmethod
    def zero(cls):
        return cls()

    def copy(self):
        return ClassicalPolynomial(dict(self.coefficients))

    def __add__(self, other):
        out = dict(self.coefficients)
        for key, value in other.coefficients.items():
            out[key] = out.get(key, 0.0) + value
            if out[key] == 0:
                del out[key]
        return ClassicalPolynomial(out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return ClassicalPolynomial({k: v * complex(scalar) for k, v in self.coefficients.items()})

    __rmul__ = __mul__

    def product(self, other):
        out = {}
        for k1, v1 in self.coefficients.items():
            for k2, v2 in other.coefficients.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                out[key] = out.get(key, 0.0) + v1 * v2
        return ClassicalPolynomial(out)

    def derivative(self, axis: int):
        out = {}
        for key, value in self.coefficients.items():
            if key[axis] == 0:
                continue
            new = list(key)
            new[axis] -= 1
            out[tuple(new)] = out.get(tuple(new), 0.0) + value * key[axis]
        return ClassicalPolynomial(out)

    def degree(self) -> int:
        if not self.coefficients:
            return 0
        return max(sum(k) for k in self.coefficients)

    def min_degree(self) -> int:
        if not self.coefficients:
            return 0
        return min(sum(k) for k in self.coefficients)

    def evaluate(self, u) -> complex:
        x1, xi1, x2, xi2 = u
        total = 0.0 + 0.0j
        for (a, b, c, d), value in self.coefficients.items():
            total += value * x1**a * xi1**b * x2**c * xi2**d
        return complex(total)

    def max_abs_coeff(self) -> float:
        if not self.coefficients:
            return 0.0
        return max(abs(v) for v in self.coefficients.values())


def poisson_bracket(f: ClassicalPolynomial, g: ClassicalPolynomial) -> ClassicalPolynomial:
    """{f, g} = sum_k (df/dxi_k dg/dx_k - df/dx_k dg/dxi_k), exact and sparse.

    Orientation fixed by {p0, g} = d/dt g(flow_t)|_0; integer-coefficient
    inputs stay exact in floating point.
    """
    total = ClassicalPolynomial.zero()
    for x_axis, xi_axis in ((0, 1), (2, 3)):
        total = total + f.derivative(xi_axis).product(g.derivative(x_axis))
        total = total - f.derivative(x_axis).product(g.derivative(xi_axis))
    return total


class _ZPolynomial:
    """Sparse polynomial in ladder coordinates; keys (k1, l1, k2, l2) for
    z1^k1 zbar1^l1 z2^k2 zbar2^l2."""

    def __init__(self, coefficients=None):
        self.coefficients = {k: complex(v) for k, v in (coefficients or {}).items() if v != 0}

    def __add__(self, other):
        out = dict(self.coefficients)
        for key, value in other.coefficients.items():
            out[key] = out.get(key, 0.0) + value
            if out[key] == 0:
                del out[key]
        return _ZPolynomial(out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return _ZPolynomial({k: v * complex(scalar) for k, v in self.coefficients.items()})

    __rmul__ = __mul__

    def derivative(self, axis):
        out = {}
        for key, value in self.coefficients.items():
            if key[axis] == 0:
                continue
            new = list(key)
            new[axis] -= 1
            out[tuple(new)] = out.get(tuple(new), 0.0) + value * key[axis]
        return _ZPolynomial(out)

    def product(self, other):
        out = {}
        for k1, v1 in self.coefficients.items():
            for k2, v2 in other.coefficients.items():
                key = tuple(a + b for a, b in zip(k1, k2))
                out[key] = out.get(key, 0.0) + v1 * v2
        return _ZPolynomial(out)

    def max_abs_coeff(self):
        return max((abs(v) for v in self.coefficients.values()), default=0.0)


def _to_z_poly(poly: ClassicalPolynomial, omega: FrequencyPair) -> _ZPolynomial:
    """Substitute x_k = (z_k + zbar_k)/(2 omega_k), xi_k = (z_k - zbar_k)/(2i)."""
    z1 = _ZPolynomial({(1, 0, 0, 0): 1.0})
    zb1 = _ZPolynomial({(0, 1, 0, 0): 1.0})
    z2 = _ZPolynomial({(0, 0, 1, 0): 1.0})
    zb2 = _ZPolynomial({(0, 0, 0, 1): 1.0})
    x1 = (1.0 / (2 * omega.omega1)) * (z1 + zb1)
    x2 = (1.0 / (2 * omega.omega2)) * (z2 + zb2)
    xi1 = (1.0 / 2j) * (z1 - zb1)
    xi2 = (1.0 / 2j) * (z2 - zb2)
    base = {0: x1, 1: xi1, 2: x2, 3: xi2}

    powers: dict[tuple[int, int], _ZPolynomial] = {}

    def power(axis, exponent):
        key = (axis, exponent)
        if key not in powers:
            if exponent == 0:
                powers[key] = _ZPolynomial({(0, 0, 0, 0): 1.0})
            else:
                powers[key] = power(axis, exponent - 1).product(base[axis])
        return powers[key]

    total = _ZPolynomial()
    for (a, b, c, d), value in poly.coefficients.items():
        term = _ZPolynomial({(0, 0, 0, 0): value})
        for axis, exponent in ((0, a), (1, b), (2, c), (3, d)):
            if exponent:
                term = term.product(power(axis, exponent))
        total = total + term
    return total


def _z_bracket(f: _ZPolynomial, g: _ZPolynomial, omega: FrequencyPair) -> _ZPolynomial:
    """{f, g} = 2i sum_k omega_k (df/dz_k dg/dzbar_k - df/dzbar_k dg/dz_k)."""
    total = _ZPolynomial()
    for w, z_axis, zb_axis in ((omega.omega1, 0, 1), (omega.omega2, 2, 3)):
        part = f.derivative(z_axis).product(g.derivative(zb_axis))
        part = part - f.derivative(zb_axis).product(g.derivative(z_axis))
        total = total + (2j * w) * part
    return total


def _z_homological_solve(f: _ZPolynomial, omega: FrequencyPair):
    """Split f into (w, resonant) monomial by monomial; nu = (l - k) per mode."""
    w_coeffs = {}
    res_coeffs = {}
    for key, value in f.coefficients.items():
        k1, l1, k2, l2 = key
        nu1, nu2 = l1 - k1, l2 - k2
        if nu1 == 0 and nu2 == 0:
            res_coeffs[key] = value
        else:
            denom = 1j * (omega.omega1 * nu1 + omega.omega2 * nu2)
            if denom == 0:
                raise ZeroDivisionError(
                    f"resonant monomial {key} with <omega,nu> = 0; omega outside Gamma"
                )
            w_coeffs[key] = value / denom
    return _ZPolynomial(w_coeffs), _ZPolynomial(res_coeffs)


def _resonant_to_actions(res: _ZPolynomial, omega: FrequencyPair) -> dict:
    """(z zbar)^k monomials to action monomials via z_k zbar_k = 2 omega_k I_k."""
    out = {}
    for (k1, l1, k2, l2), value in res.coefficients.items():
        assert k1 == l1 and k2 == l2
        key = (k1, k2)
        out[key] = out.get(key, 0.0) + value * (2 * omega.omega1) ** k1 * (2 * omega.omega2) ** k2
    return {k: v for k, v in out.items() if v != 0}


def evaluate_action_polynomial(table: dict, actions) -> complex:
    i1, i2 = actions
    return complex(sum(v * i1 ** k[0] * i2 ** k[1] for k, v in table.items()))


def classical_birkhoff(
    perturbation: ClassicalPolynomial, omega: FrequencyPair, max_order: int
) -> list:
    """Action polynomials Y_p, p = 1..max_order, of the classical normal form.

    Same epsilon-graded Lie scheme as the quantum engine with the Poisson
    bracket in place of the scaled commutator: at each order
    {w_s, p0} + f_s = Y_s, solved monomial by monomial in z coordinates.
    Returns each Y_p as a dict {(a1, a2): coeff} over I1^a1 I2^a2.
    """
    if perturbation.coefficients and perturbation.min_degree() < 3:
        raise ValueError("perturbation must have lowest degree >= 3")
    f0 = _to_z_poly(perturbation, omega)

    ws: dict[int, _ZPolynomial] = {}
    ys: dict[int, _ZPolynomial] = {}
    fs: dict[int, _ZPolynomial] = {1: f0}

    def assemble(s):
        total = _ZPolynomial()
        for length in range(2, s + 1):
            for comp in _order_compositions(s, length):
                x = ys[comp[-1]] - fs[comp[-1]]
                for j in reversed(comp[:-1]):
                    x = _z_bracket(ws[j], x, omega)
                total = total + (1.0 / factorial(length)) * x
        for length in range(1, s):
            for comp in _order_compositions(s - 1, length):
                x = f0
                for j in reversed(comp):
                    x = _z_bracket(ws[j], x, omega)
                total = total + (1.0 / factorial(length)) * x
        return total

    tables = []
    for s in range(1, max_order + 1):
        if s > 1:
            fs[s] = assemble(s)
        w, res = _z_homological_solve(fs[s], omega)
        ws[s], ys[s] = w, res
        tables.append(_resonant_to_actions(res, omega))
    return tables


def _order_compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _order_compositions(total - first, parts - 1):
            yield (first,) + rest
