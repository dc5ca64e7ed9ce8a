"""Complex frequency pairs, the admissible domain Gamma and large denominators.

A frequency pair (omega1, omega2) = (a+ib, c+id) with a, c != 0 belongs to
Gamma(delta1, delta2, delta) when

    delta1 <= |omega| <= delta2   and   |ac+bd| / (|omega1||omega2|) <= delta < 1,

|omega| being the Euclidean norm of the four real components.  Away from the
parallel case the pairing defect |<omega,nu>| grows linearly in |nu|, with the
sharp rate returned by :func:`denominator_lower_bound`; that constant replaces
small-divisor analysis everywhere downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrequencyError

__all__ = [
    "FrequencyPair",
    "GammaParams",
    "in_gamma",
    "rotate_i",
    "denominator_lower_bound",
    "small_denominator",
    "lattice_denominator_minimum",
]


@dataclass(frozen=True)
class FrequencyPair:
    """Dimensionless complex frequencies of the two oscillator modes."""

    omega1: complex
    omega2: complex

    def __post_init__(self):
        object.__setattr__(self, "omega1", complex(self.omega1))
        object.__setattr__(self, "omega2", complex(self.omega2))

    @property
    def pairing(self) -> float:
        """Real pairing <omega1, omega2> = a*c + b*d."""
        return (
            self.omega1.real * self.omega2.real
            + self.omega1.imag * self.omega2.imag
        )

    @property
    def euclid_norm(self) -> float:
        """Euclidean norm of the four real components."""
        return float(np.sqrt(abs(self.omega1) ** 2 + abs(self.omega2) ** 2))

    def as_vector(self):
        return np.array([self.omega1, self.omega2], dtype=complex)

    def require_nonzero_real_parts(self):
        if self.omega1.real == 0.0 or self.omega2.real == 0.0:
            raise DegenerateFrequencyError(
                "both real parts must be nonzero, got "
                f"({self.omega1}, {self.omega2})"
            )


@dataclass(frozen=True)
class GammaParams:
    """Modulus window [delta1, delta2] and non-parallelism bound delta."""

    delta1: float
    delta2: float
    delta: float

    def __post_init__(self):
        if not (0.0 < self.delta1 <= self.delta2):
            raise ValueError(f"need 0 < delta1 <= delta2, got {self.delta1}, {self.delta2}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"need 0 < delta < 1, got {self.delta}")


def in_gamma(omega: FrequencyPair, params: GammaParams) -> bool:
    """Strict membership test; boundary comparisons are exact, no fuzz."""
    omega.require_nonzero_real_parts()
    norm = omega.euclid_norm
    if not (params.delta1 <= norm <= params.delta2):
        return False
    ratio = abs(omega.pairing) / (abs(omega.omega1) * abs(omega.omega2))
    return ratio <= params.delta


def rotate_i(omega: FrequencyPair) -> FrequencyPair:
    """Componentwise multiplication by i; preserves moduli and the pairing."""
    return FrequencyPair(1j * omega.omega1, 1j * omega.omega2)


def denominator_lower_bound(omega: FrequencyPair) -> float:
    """Sharp constant C with |<omega,nu>| >= C * |nu|_2 for all nu != 0.

    Closed form: the direction-average F(theta) = |omega1 cos(theta) +
    omega2 sin(theta)|^2 is M + ((|w1|^2-|w2|^2)/2) cos(2t) + <w1,w2> sin(2t)
    with M = (|w1|^2+|w2|^2)/2, so min F = M - R with
    R = sqrt(((|w1|^2-|w2|^2)/2)^2 + <w1,w2>^2) and C = sqrt(M - R).
    """
    m1 = abs(omega.omega1) ** 2
    m2 = abs(omega.omega2) ** 2
    mean = 0.5 * (m1 + m2)
    radius = float(np.hypot(0.5 * (m1 - m2), omega.pairing))
    minimum = mean - radius
    if minimum <= 0.0:
        raise DegenerateFrequencyError(
            "frequencies are real-proportional (pairing saturates), "
            f"min over the circle is {minimum:.3e}"
        )
    return float(np.sqrt(minimum))


def small_denominator(omega: FrequencyPair, nu) -> complex:
    """Homological denominator i<omega,nu> for a nonzero integer 2-vector."""
    n1, n2 = int(nu[0]), int(nu[1])
    if n1 == 0 and n2 == 0:
        raise ValueError("nu = (0,0) is excluded: the homological equation never divides there")
    return 1j * (omega.omega1 * n1 + omega.omega2 * n2)


def lattice_denominator_minimum(omega: FrequencyPair, nu_max: int) -> float:
    """Brute-force min of |<omega,nu>| / |nu|_2 over 0 < |nu|_inf <= nu_max.

    Test oracle for :func:`denominator_lower_bound`; the closed form is the
    production path.
    """
    rng = np.arange(-nu_max, nu_max + 1)
    n1, n2 = np.meshgrid(rng, rng, indexing="ij")
    mask = (n1 != 0) | (n2 != 0)
    n1 = n1[mask]
    n2 = n2[mask]
    vals = np.abs(omega.omega1 * n1 + omega.omega2 * n2) / np.hypot(n1, n2)
    return float(vals.min())
