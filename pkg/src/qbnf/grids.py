"""Phase grids and Fourier-side symbols with exponentially weighted norms.

Symbols are stored Fourier-side only: a :class:`FourierSymbol` holds samples
of the transform g_hat on a uniform grid in R^d (d = 2 for one mode, 4 for the
full phase space).  The transform convention is

    g_hat(s) = (2pi)^(-d) * integral g(u) exp(-i<s,u>) du,
    g(u)     =             integral g_hat(s) exp(+i<s,u>) ds,

which makes the twisted-convolution bracket formula prefactor-free.  The
Fourier variable is blocked as s = (v, w) with v dual to the positions and w
dual to the momenta.

All integrals are trapezoid sums on the grid; for the decaying integrands used
throughout, the periodic trapezoid rule reduces to spacing^d times the node
sum.  Reductions rely on numpy's pairwise summation, so results are
reproducible for a fixed grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, NormOverflowError

__all__ = ["PhaseGrid", "FourierSymbol", "sigma_norm", "gradient_sigma_norm"]

# exp(x) overflows double precision near 709
_EXP_ARG_LIMIT = 700.0


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform grid on [-extent, extent)^dimension, FFT-style node layout."""

    dimension: int
    points_per_axis: int
    extent: float

    def __post_init__(self):
        if self.dimension not in (2, 4):
            raise ValueError(f"dimension must be 2 or 4, got {self.dimension}")
        if self.points_per_axis < 4 or self.points_per_axis % 2:
            raise ValueError(f"points_per_axis must be even and >= 4, got {self.points_per_axis}")
        if self.extent <= 0:
            raise ValueError(f"extent must be positive, got {self.extent}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dimension

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dimension

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dimension

    def axis(self) -> np.ndarray:
        """Nodes along one axis: -extent + j*spacing, j = 0..M-1."""
        return -self.extent + self.spacing * np.arange(self.points_per_axis)

    def nodes(self) -> np.ndarray:
        """All nodes, shape grid.shape + (dimension,)."""
        axes = np.meshgrid(*([self.axis()] * self.dimension), indexing="ij")
        return np.stack(axes, axis=-1)

    def radii(self) -> np.ndarray:
        """Euclidean |s| at every node."""
        return np.sqrt((self.nodes() ** 2).sum(axis=-1))

    def position_dual(self) -> np.ndarray:
        """The v block of s = (v, w), shape grid.shape + (dimension/2,)."""
        return self.nodes()[..., : self.dimension // 2]

    def momentum_dual(self) -> np.ndarray:
        return self.nodes()[..., self.dimension // 2 :]


@dataclass
class FourierSymbol:
    """Sampled Fourier transform of a phase-space symbol."""

    grid: PhaseGrid
    values: np.ndarray
    label: str = field(default="")

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise GridMismatchError(
                f"values shape {vals.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("symbol values must be finite")
        self.values = vals

    @classmethod
    def zero(cls, grid: PhaseGrid, label: str = "zero") -> "FourierSymbol":
        return cls(grid, np.zeros(grid.shape, dtype=complex), label)

    def copy(self, label: str | None = None) -> "FourierSymbol":
        return FourierSymbol(self.grid, self.values.copy(), self.label if label is None else label)

    def __add__(self, other: "FourierSymbol") -> "FourierSymbol":
        self.require_same_grid(other)
        return FourierSymbol(self.grid, self.values + other.values)

    def __sub__(self, other: "FourierSymbol") -> "FourierSymbol":
        self.require_same_grid(other)
        return FourierSymbol(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "FourierSymbol":
        return FourierSymbol(self.grid, self.values * complex(scalar), self.label)

    __rmul__ = __mul__

    def require_same_grid(self, other: "FourierSymbol"):
        if self.grid != other.grid:
            raise GridMismatchError(f"grids differ: {self.grid} vs {other.grid}")

    def l1_norm(self) -> float:
        """Plain L1 quadrature of |g_hat|; the sigma = 0 norm."""
        return float(self.grid.cell_volume * np.abs(self.values).sum())

    def point_values(self, points: np.ndarray) -> np.ndarray:
        """Inverse transform g(u) = integral g_hat(s) e^{i<s,u>} ds at arbitrary u.

        points: array (..., dimension); returns complex array of shape (...,).
        Complex points are allowed (analytic continuation of the inverse
        transform; converges while the symbol decay beats exp(|Im u||s|)).
        """
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        flat_nodes = self.grid.nodes().reshape(-1, self.grid.dimension)
        flat_vals = self.values.reshape(-1)
        phases = np.exp(1j * pts @ flat_nodes.T)
        out = self.grid.cell_volume * (phases @ flat_vals)
        return out.reshape(np.asarray(points).shape[:-1])

    def to_json_dict(self) -> dict:
        flat = self.values.reshape(-1)
        interleaved = np.empty(2 * flat.size)
        interleaved[0::2] = flat.real
        interleaved[1::2] = flat.imag
        return {
            "grid": {
                "dimension": self.grid.dimension,
                "points_per_axis": self.grid.points_per_axis,
                "extent": self.grid.extent,
            },
            "label": self.label,
            "values_interleaved_re_im": interleaved.tolist(),
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "FourierSymbol":
        g = payload["grid"]
        grid = PhaseGrid(int(g["dimension"]), int(g["points_per_axis"]), float(g["extent"]))
        raw = np.asarray(payload["values_interleaved_re_im"], dtype=float)
        vals = (raw[0::2] + 1j * raw[1::2]).reshape(grid.shape)
        return cls(grid, vals, payload.get("label", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "FourierSymbol":
        return cls.from_json_dict(json.loads(text))


def _weight(grid: PhaseGrid, sigma: float) -> np.ndarray:
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    max_arg = sigma * grid.extent * np.sqrt(grid.dimension)
    if max_arg > _EXP_ARG_LIMIT:
        raise NormOverflowError(
            f"sigma*|s| reaches {max_arg:.1f} on this grid, beyond the exp range"
        )
    return np.exp(sigma * grid.radii())


def sigma_norm(f: FourierSymbol, sigma: float) -> float:
    """Weighted norm  integral |g_hat(s)| exp(sigma |s|) ds  by trapezoid sum."""
    total = f.grid.cell_volume * float((np.abs(f.values) * _weight(f.grid, sigma)).sum())
    if not np.isfinite(total):
        raise NormOverflowError("weighted norm overflowed")
    return total


def gradient_sigma_norm(f: FourierSymbol, sigma: float) -> float:
    """Gradient norm  integral |s| |g_hat(s)| exp(sigma |s|) ds.

    Realizes the norm of the symbol gradient: the transform of each d/du_j
    carries a factor i*s_j, and the Euclidean length of that vector is |s|.
    """
    weighted = np.abs(f.values) * _weight(f.grid, sigma) * f.grid.radii()
    total = f.grid.cell_volume * float(weighted.sum())
    if not np.isfinite(total):
        raise NormOverflowError("weighted gradient norm overflowed")
    return total
