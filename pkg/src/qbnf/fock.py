"""Truncated Fock lattice, graded matrices and Weyl quantization routes.

The basis is algebraic: ladder matrices obey [a, a^+] = 1 entrywise away from
the truncation corner, with complex frequencies entering only through the
scalings x = sqrt(hbar/2w)(a + a^+), xi = i sqrt(hbar w/2)(a^+ - a).  No inner
product or adjointness is assumed anywhere; matrices are plain complex arrays
indexed row-major by lattice points m (row) and n (column), graded by
nu = m - n, which coincides with the torus Fourier index of the corresponding
symbol.

Two quantization routes:

* polynomials in (x, xi) with symmetric (Weyl) ordering, exact per entry on
  the interior of the lattice;
* the Gaussian class, integrated Fourier-side against the displacement kernel
  <m| exp(i(v x + w xi)) |n> (the transform of the cross-Wigner kernel),
  entry-exact up to the reported quadrature error.

Boundary policy: operations contaminate a shell whose depth equals the
cumulative bandwidth of the factors; consumers must keep reported lattice
points deeper than that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import BudgetError, ContaminationError, GridMismatchError
from .freq import FrequencyPair
from .gaussian import GaussianSymbol, TwoModeGaussian
from .grids import PhaseGrid

__all__ = [
    "FockTruncation",
    "GradedMatrix",
    "p0_eigenvalue",
    "ladder_matrices",
    "position_momentum_matrices",
    "p0_matrix",
    "weyl_matrix_polynomial",
    "weyl_matrix_gaussian",
    "displacement_kernel",
]


@dataclass(frozen=True)
class FockTruncation:
    """Per-mode cutoff; lattice points are n = (n1, n2) with 0 <= n_k <= n_max."""

    n_max: int
    lattice_budget: int = 4_000_000

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError(f"n_max must be >= 2, got {self.n_max}")
        if self.dim**2 > self.lattice_budget:
            raise BudgetError(
                f"lattice of {self.dim}^2 matrix entries exceeds budget {self.lattice_budget}"
            )

    @property
    def per_mode(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return self.per_mode**2

    def flat_index(self, n) -> int:
        n1, n2 = int(n[0]), int(n[1])
        if not (0 <= n1 <= self.n_max and 0 <= n2 <= self.n_max):
            raise IndexError(f"lattice point {n} outside truncation n_max={self.n_max}")
        return n1 * self.per_mode + n2

    def coordinates(self):
        """Arrays (N1, N2) with the lattice coordinates of each flat index."""
        idx = np.arange(self.dim)
        return idx // self.per_mode, idx % self.per_mode

    def points(self):
        n1, n2 = self.coordinates()
        return list(zip(n1.tolist(), n2.tolist()))


def p0_eigenvalue(n, omega: FrequencyPair, hbar: float) -> complex:
    """hbar <omega, n> + hbar (omega1 + omega2)/2, complex-bilinear."""
    return hbar * (
        omega.omega1 * n[0] + omega.omega2 * n[1] + 0.5 * (omega.omega1 + omega.omega2)
    )


@dataclass
class GradedMatrix:
    """Complex matrix over the truncated lattice with nu = m - n grading."""

    truncation: FockTruncation
    entries: np.ndarray
    declared_bandwidth: int | None = field(default=None)

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        d = self.truncation.dim
        if arr.shape != (d, d):
            raise ValueError(f"entries must be {d}x{d}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        self.entries = arr

    # -- construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, truncation: FockTruncation) -> "GradedMatrix":
        return cls(truncation, np.zeros((truncation.dim, truncation.dim), dtype=complex), 0)

    @classmethod
    def diagonal(cls, truncation: FockTruncation, diag: np.ndarray) -> "GradedMatrix":
        return cls(truncation, np.diag(np.asarray(diag, dtype=complex)), 0)

    def _require_same(self, other: "GradedMatrix"):
        if self.truncation != other.truncation:
            raise GridMismatchError("matrices live on different truncations")

    # -- grading --------------------------------------------------------------
    def grading_arrays(self):
        n1, n2 = self.truncation.coordinates()
        return n1[:, None] - n1[None, :], n2[:, None] - n2[None, :]

    def bandwidth(self, tol: float = 0.0) -> int:
        """Max |nu|_inf over entries with |value| > tol."""
        g1, g2 = self.grading_arrays()
        mask = np.abs(self.entries) > tol
        if not mask.any():
            return 0
        return int(np.maximum(np.abs(g1), np.abs(g2))[mask].max())

    def nu_masked(self, cap: int) -> tuple["GradedMatrix", float]:
        """Zero every entry with |nu|_inf > cap; returns (matrix, largest dropped |entry|)."""
        g1, g2 = self.grading_arrays()
        keep = np.maximum(np.abs(g1), np.abs(g2)) <= cap
        dropped = 0.0 if keep.all() else float(np.abs(self.entries[~keep]).max())
        return GradedMatrix(self.truncation, np.where(keep, self.entries, 0.0), cap), dropped

    def graded_block(self, nu) -> np.ndarray:
        g1, g2 = self.grading_arrays()
        return np.where((g1 == nu[0]) & (g2 == nu[1]), self.entries, 0.0)

    # -- algebra ----------------------------------------------------------------
    def __add__(self, other):
        self._require_same(other)
        bw = None
        if self.declared_bandwidth is not None and other.declared_bandwidth is not None:
            bw = max(self.declared_bandwidth, other.declared_bandwidth)
        return GradedMatrix(self.truncation, self.entries + other.entries, bw)

    def __sub__(self, other):
        self._require_same(other)
        bw = None
        if self.declared_bandwidth is not None and other.declared_bandwidth is not None:
            bw = max(self.declared_bandwidth, other.declared_bandwidth)
        return GradedMatrix(self.truncation, self.entries - other.entries, bw)

    def __mul__(self, scalar):
        return GradedMatrix(self.truncation, self.entries * complex(scalar), self.declared_bandwidth)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._require_same(other)
        bw = None
        if self.declared_bandwidth is not None and other.declared_bandwidth is not None:
            bw = self.declared_bandwidth + other.declared_bandwidth
        return GradedMatrix(self.truncation, self.entries @ other.entries, bw)

    def diagonal_part(self) -> "GradedMatrix":
        return GradedMatrix(self.truncation, np.diag(np.diag(self.entries)), 0)

    def offdiagonal_part(self) -> "GradedMatrix":
        out = self.entries.copy()
        np.fill_diagonal(out, 0.0)
        return GradedMatrix(self.truncation, out, self.declared_bandwidth)

    def diagonal_at(self, n) -> complex:
        i = self.truncation.flat_index(n)
        return complex(self.entries[i, i])

    # -- norms ------------------------------------------------------------------
    def max_norm(self) -> float:
        return float(np.abs(self.entries).max())

    def window_mask(self, n_window: int) -> np.ndarray:
        n1, n2 = self.truncation.coordinates()
        inside = np.maximum(n1, n2) <= n_window
        return inside[:, None] & inside[None, :]

    def graded_window_norm(self, rho: float, n_window: int) -> float:
        """sum_nu e^{rho |nu|_1} max |entry| over the window, the matrix shadow
        of the weighted family norm."""
        mask = self.window_mask(n_window)
        g1, g2 = self.grading_arrays()
        vals = np.abs(self.entries)
        total = 0.0
        cap = self.truncation.n_max
        for v1 in range(-cap, cap + 1):
            sel1 = g1 == v1
            for v2 in range(-cap, cap + 1):
                sel = sel1 & (g2 == v2) & mask
                if sel.any():
                    peak = vals[sel].max()
                    if peak > 0:
                        total += np.exp(rho * (abs(v1) + abs(v2))) * peak
        return float(total)


def ladder_matrices(truncation: FockTruncation):
    """(A1, A1+, A2, A2+) on the flattened lattice, row-major kron layout."""
    p = truncation.per_mode
    a = np.zeros((p, p), dtype=complex)
    for n in range(1, p):
        a[n - 1, n] = np.sqrt(n)
    adag = a.T.copy()
    eye = np.eye(p, dtype=complex)
    return (
        GradedMatrix(truncation, np.kron(a, eye), 1),
        GradedMatrix(truncation, np.kron(adag, eye), 1),
        GradedMatrix(truncation, np.kron(eye, a), 1),
        GradedMatrix(truncation, np.kron(eye, adag), 1),
    )


def position_momentum_matrices(truncation: FockTruncation, omega: FrequencyPair, hbar: float):
    """(X1, Xi1, X2, Xi2) from the ladder pair of each mode."""
    a1, a1d, a2, a2d = ladder_matrices(truncation)
    out = []
    for a, ad, w in ((a1, a1d, omega.omega1), (a2, a2d, omega.omega2)):
        root = np.sqrt(complex(w))
        x = np.sqrt(hbar / 2.0) / root * (a + ad)
        xi = 1j * np.sqrt(hbar / 2.0) * root * (ad - a)
        out.extend([x, xi])
    return out[0], out[1], out[2], out[3]


def p0_matrix(truncation: FockTruncation, omega: FrequencyPair, hbar: float) -> GradedMatrix:
    """Exact diagonal oscillator matrix (no boundary defect)."""
    n1, n2 = truncation.coordinates()
    diag = hbar * (
        omega.omega1 * n1 + omega.omega2 * n2 + 0.5 * (omega.omega1 + omega.omega2)
    )
    return GradedMatrix.diagonal(truncation, diag)


def _mccoy_mode(x: np.ndarray, xi: np.ndarray, p: int, q: int) -> np.ndarray:
    """Weyl ordering of x^p xi^q for a single mode:
    2^-p sum_r C(p,r) x^r xi^q x^(p-r)."""
    dim = x.shape[0]
    xq = np.linalg.matrix_power(xi, q) if q else np.eye(dim, dtype=complex)
    acc = np.zeros((dim, dim), dtype=complex)
    for r in range(p + 1):
        coeff = factorial(p) / (factorial(r) * factorial(p - r))
        left = np.linalg.matrix_power(x, r) if r else np.eye(dim, dtype=complex)
        right = np.linalg.matrix_power(x, p - r) if p - r else np.eye(dim, dtype=complex)
        acc += coeff * (left @ xq @ right)
    return acc / 2**p


def weyl_matrix_polynomial(
    monomials: dict,
    omega: FrequencyPair,
    hbar: float,
    truncation: FockTruncation,
) -> GradedMatrix:
    """Quantize a polynomial given as {(ex1, eq1, ex2, eq2): coeff}.

    Different modes commute, so each monomial is the kron of per-mode Weyl
    orderings.  Entries are exact on lattice points farther than the total
    degree from the truncation edge.
    """
    p_dim = truncation.per_mode
    a = np.zeros((p_dim, p_dim), dtype=complex)
    for n in range(1, p_dim):
        a[n - 1, n] = np.sqrt(n)
    ad = a.T.copy()
    mats = {}
    for w in (omega.omega1, omega.omega2):
        root = np.sqrt(complex(w))
        mats[w] = (
            np.sqrt(hbar / 2.0) / root * (a + ad),
            1j * np.sqrt(hbar / 2.0) * root * (ad - a),
        )
    x1, xi1 = mats[omega.omega1]
    x2, xi2 = mats[omega.omega2]

    total = np.zeros((truncation.dim, truncation.dim), dtype=complex)
    bandwidth = 0
    for (ex1, eq1, ex2, eq2), coeff in monomials.items():
        if coeff == 0:
            continue
        m1 = _mccoy_mode(x1, xi1, ex1, eq1)
        m2 = _mccoy_mode(x2, xi2, ex2, eq2)
        total += complex(coeff) * np.kron(m1, m2)
        bandwidth = max(bandwidth, ex1 + eq1, ex2 + eq2)
    return GradedMatrix(truncation, total, bandwidth)


def displacement_kernel(
    n_levels: int, omega_mode: complex, hbar: float, v: np.ndarray, w: np.ndarray
) -> np.ndarray:
    """<m| exp(i(v x + w xi)) |n> for one mode, shape (n_levels, n_levels) + v.shape.

    Purely algebraic finite sums: with lam = iv sqrt(hbar/2w) - w sqrt(hbar w/2)
    and mu = -iv sqrt(hbar/2w) - w sqrt(hbar w/2),

        K = exp(-lam*mu/2) * sum_j (-mu)^j lam^(m-n+j)
            * sqrt(m! n!) / (j! (m-n+j)! (n-j)!).
    """
    root = np.sqrt(complex(omega_mode))
    lam = 1j * v * np.sqrt(hbar / 2.0) / root - w * np.sqrt(hbar / 2.0) * root
    mu = -1j * v * np.sqrt(hbar / 2.0) / root - w * np.sqrt(hbar / 2.0) * root
    pref = np.exp(-0.5 * lam * mu)
    fact = [float(factorial(k)) for k in range(n_levels + 1)]
    out = np.zeros((n_levels, n_levels) + lam.shape, dtype=complex)
    for m in range(n_levels):
        for n in range(n_levels):
            acc = np.zeros(lam.shape, dtype=complex)
            for j in range(max(0, n - m), n + 1):
                coeff = np.sqrt(fact[m] * fact[n]) / (
                    fact[j] * fact[m - n + j] * fact[n - j]
                )
                acc = acc + coeff * (-mu) ** j * lam ** (m - n + j)
            out[m, n] = pref * acc
    return out


def default_gaussian_grid(hbar: float, n_max: int) -> PhaseGrid:
    """Quadrature grid resolving the displacement kernel up to level n_max.

    The kernel oscillates on the scale sqrt(hbar * n_max) and spreads over
    |s| ~ sqrt(hbar * n_max) past the symbol width, so the spacing shrinks and
    the extent grows with that scale; the refinement check in
    :func:`weyl_matrix_gaussian` still guards the result.
    """
    scale = np.sqrt(max(hbar * n_max, 1e-6))
    extent = 4.0 + 1.5 * scale
    spacing_target = min(0.375, 1.3 / scale)
    m = int(np.ceil(2.0 * extent / spacing_target))
    m += m % 2
    return PhaseGrid(2, max(m, 16), extent)


def _gaussian_mode_matrix(
    mode: GaussianSymbol,
    omega_mode: complex,
    hbar: float,
    n_levels: int,
    grid: PhaseGrid,
) -> np.ndarray:
    """Quadrature  h^2 sum_s g_hat(s) K(s)  for one mode on a 2D grid."""
    if grid.dimension != 2:
        raise ValueError("mode quadrature uses a 2D grid")
    hat = mode.hat_flow(grid, 0.0)
    nodes = grid.nodes()
    v, w = nodes[..., 0], nodes[..., 1]
    kernel = displacement_kernel(n_levels, omega_mode, hbar, v, w)
    return grid.cell_volume * np.einsum("vw,mnvw->mn", hat, kernel)


def weyl_matrix_gaussian(
    family: TwoModeGaussian,
    omega: FrequencyPair,
    hbar: float,
    truncation: FockTruncation,
    grid: PhaseGrid,
    nu_box: int,
    quad_tol: float = 1e-9,
) -> tuple[GradedMatrix, float]:
    """Weyl matrix of the nu-truncated Gaussian-class symbol.

    Zeroing the graded blocks beyond |m - n|_inf <= nu_box is exactly the
    quantization of the family truncated to that coefficient box, because each
    coefficient quantizes to a single graded block.  Returns the matrix and a
    quadrature-error estimate from one grid refinement.

    Requires positive real frequency parts: the displacement kernel decays
    like exp(-hbar(Re(w) w^2 + Re(1/w) v^2)/2) only then.
    """
    omega.require_nonzero_real_parts()
    if omega.omega1.real < 0 or omega.omega2.real < 0:
        raise ValueError("gaussian quadrature route requires Re(omega_k) > 0")
    if truncation.n_max < nu_box:
        raise ContaminationError(
            f"truncation n_max={truncation.n_max} below declared bandwidth {nu_box}"
        )
    p = truncation.per_mode

    def assemble(g: PhaseGrid):
        m1 = _gaussian_mode_matrix(family.mode1, omega.omega1, hbar, p, g)
        m2 = _gaussian_mode_matrix(family.mode2, omega.omega2, hbar, p, g)
        return family.amplitude * np.kron(m1, m2)

    raw = assemble(grid)
    fine_grid = PhaseGrid(2, grid.points_per_axis * 2, grid.extent * 1.25)
    quad_error = float(np.abs(assemble(fine_grid) - raw).max())
    if quad_error > quad_tol:
        raise BudgetError(
            f"gaussian quadrature error estimate {quad_error:.2e} exceeds tol {quad_tol:.2e}; "
            "refine the grid"
        )
    matrix = GradedMatrix(truncation, raw, nu_box)
    masked, _ = matrix.nu_masked(nu_box)
    return masked, quad_error
