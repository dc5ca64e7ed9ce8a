"""Run configuration: a single JSON document validated up front.

Field-level validation errors raise ConfigError (CLI exit code 2) before any
computation starts.  The canonical-JSON hash of the document is embedded in
every output file so payloads can be traced back to their inputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .freq import FrequencyPair, GammaParams, in_gamma

__all__ = ["RunConfig", "load_config", "config_hash"]

_PERTURBATION_TYPES = ("gaussian", "polynomial")


@dataclass
class RunConfig:
    omega: FrequencyPair
    gamma_params: GammaParams
    hbar_list: list
    epsilon_list: list
    sigma: float
    rho: float
    perturbation_type: str
    amplitude: float
    monomials: dict  # polynomial spec; empty for gaussian
    n_max: int
    nu_max: int
    grid_points: int
    grid_extent: float
    norm_grid_points: int
    norm_grid_extent: float
    order: int
    output_dir: str
    seed: int
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def hash(self) -> str:
        return config_hash(self.raw)


def config_hash(document: dict) -> str:
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _require(document, key, kind, where="config"):
    if key not in document:
        raise ConfigError(f"{where}: missing field '{key}'")
    value = document[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_monomials(spec: dict) -> dict:
    out = {}
    for key, value in spec.items():
        parts = key.split(",")
        if len(parts) != 4:
            raise ConfigError(f"perturbation.monomials: key '{key}' is not 'ex1,eq1,ex2,eq2'")
        try:
            exponents = tuple(int(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"perturbation.monomials: non-integer exponent in '{key}'") from exc
        if any(e < 0 for e in exponents):
            raise ConfigError(f"perturbation.monomials: negative exponent in '{key}'")
        if not (isinstance(value, list) and len(value) == 2):
            raise ConfigError(f"perturbation.monomials['{key}']: expected [re, im]")
        out[exponents] = complex(float(value[0]), float(value[1]))
    return out


def load_config(document: dict) -> RunConfig:
    """Validate a parsed JSON document against module preconditions."""
    omega_raw = _require(document, "omega", list)
    if len(omega_raw) != 2 or any(len(pair) != 2 for pair in omega_raw):
        raise ConfigError("omega: expected [[re1, im1], [re2, im2]]")
    omega = FrequencyPair(
        complex(float(omega_raw[0][0]), float(omega_raw[0][1])),
        complex(float(omega_raw[1][0]), float(omega_raw[1][1])),
    )

    gp_raw = _require(document, "gamma_params", dict)
    try:
        gamma_params = GammaParams(
            float(_require(gp_raw, "delta1", (int, float), "gamma_params")),
            float(_require(gp_raw, "delta2", (int, float), "gamma_params")),
            float(_require(gp_raw, "delta", (int, float), "gamma_params")),
        )
    except ValueError as exc:
        raise ConfigError(f"gamma_params: {exc}") from exc

    hbar_list = [float(h) for h in _require(document, "hbar_list", list)]
    if any(h < 0 for h in hbar_list):
        raise ConfigError("hbar_list: entries must be nonnegative")
    epsilon_list = [float(e) for e in _require(document, "epsilon_list", list)]

    sigma = float(_require(document, "sigma", (int, float)))
    rho = float(_require(document, "rho", (int, float)))
    if sigma <= 0:
        raise ConfigError("sigma: must be positive")
    if rho < 0:
        raise ConfigError("rho: must be nonnegative")

    pert = _require(document, "perturbation", dict)
    ptype = _require(pert, "type", str, "perturbation")
    if ptype not in _PERTURBATION_TYPES:
        raise ConfigError(f"perturbation.type: unknown '{ptype}', expected {_PERTURBATION_TYPES}")
    amplitude = float(pert.get("amplitude", 1.0))
    monomials = {}
    if ptype == "polynomial":
        monomials = _parse_monomials(_require(pert, "monomials", dict, "perturbation"))
        if not monomials:
            raise ConfigError("perturbation.monomials: empty polynomial spec")

    trunc = _require(document, "truncation", dict)
    n_max = int(_require(trunc, "n_max", int, "truncation"))
    nu_max = int(_require(trunc, "nu_max", int, "truncation"))
    grid_points = int(_require(trunc, "grid_points", int, "truncation"))
    grid_extent = float(_require(trunc, "grid_extent", (int, float), "truncation"))
    if n_max < 2:
        raise ConfigError("truncation.n_max: must be >= 2")
    if nu_max < 0:
        raise ConfigError("truncation.nu_max: must be >= 0")
    if grid_points < 4 or grid_points % 2:
        raise ConfigError("truncation.grid_points: must be even and >= 4")
    if grid_extent <= 0:
        raise ConfigError("truncation.grid_extent: must be positive")

    norm_grid_points = int(document.get("norm_grid_points", 16))
    norm_grid_extent = float(document.get("norm_grid_extent", 6.0))
    if norm_grid_points < 4 or norm_grid_points % 2:
        raise ConfigError("norm_grid_points: must be even and >= 4")

    order = int(_require(document, "order", int))
    if order < 1:
        raise ConfigError("order: must be >= 1")

    output_dir = _require(document, "output_dir", str)
    seed = int(_require(document, "seed", int))

    if ptype == "gaussian" and not in_gamma(omega, gamma_params):
        raise ConfigError("omega: not a member of Gamma for the given gamma_params")
    if order * nu_max + 2 > n_max:
        raise ConfigError(
            f"truncation: order*nu_max+2 = {order * nu_max + 2} exceeds n_max = {n_max}; "
            "no clean reporting window"
        )
    if sigma * grid_extent * 2.0 > 650.0:
        raise ConfigError("sigma * grid_extent too large for the exponential weight")

    return RunConfig(
        omega=omega,
        gamma_params=gamma_params,
        hbar_list=hbar_list,
        epsilon_list=epsilon_list,
        sigma=sigma,
        rho=rho,
        perturbation_type=ptype,
        amplitude=amplitude,
        monomials=monomials,
        n_max=n_max,
        nu_max=nu_max,
        grid_points=grid_points,
        grid_extent=grid_extent,
        norm_grid_points=norm_grid_points,
        norm_grid_extent=norm_grid_extent,
        order=order,
        output_dir=output_dir,
        seed=seed,
        raw=document,
    )
