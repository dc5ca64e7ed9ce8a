"""Batch front end: check-gamma, normal-form, verify, sweep.

One executable with four subcommands; a single JSON config document drives
everything (schema in configs/schema.json).  Exit codes are a stable
contract: 0 success, 1 numeric failure, 2 config problem, 3 budget or
truncation-contamination.  Outputs embed the config hash, package versions,
truncation metadata and the seed, and carry no timestamps, so re-running a
config reproduces every payload byte for byte.  File writes go through a
temp-file rename, never a partial write.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np
import scipy

from . import __version__
from .config import RunConfig, load_config
from .errors import (
    BudgetError,
    ConfigError,
    ContaminationError,
    QbnfError,
)
from .fock import p0_eigenvalue
from .freq import denominator_lower_bound, in_gamma, lattice_denominator_minimum
from .oracle import diagonalize
from .qnf import (
    NormalFormSeries,
    eigenvalue_series,
    empirical_radius,
    mu_and_radius,
    normal_form_orders,
)
from .suites import (
    SUITE_NAMES,
    build_f0,
    gaussian_f0_norm,
    run_hbar_uniformity,
    run_suite,
)

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3


def _versions() -> dict:
    return {"qbnf": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def _atomic_write(path: str, data: str):
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _meta(config: RunConfig, **extra) -> dict:
    meta = {
        "config_hash": config.hash,
        "versions": _versions(),
        "seed": config.seed,
        "truncation": {
            "n_max": config.n_max,
            "nu_max": config.nu_max,
            "grid_points": config.grid_points,
            "grid_extent": config.grid_extent,
        },
    }
    meta.update(extra)
    return meta


def _load_config_file(path: str) -> RunConfig:
    try:
        with open(path) as handle:
            document = json.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return load_config(document)


def _fmt(value: float) -> str:
    return f"{value:g}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_check_gamma(config: RunConfig, out_dir: str) -> int:
    member = in_gamma(config.omega, config.gamma_params)
    report = {
        "meta": _meta(config),
        "member": member,
        "omega": [
            [config.omega.omega1.real, config.omega.omega1.imag],
            [config.omega.omega2.real, config.omega.omega2.imag],
        ],
        "pairing": config.omega.pairing,
        "euclid_norm": config.omega.euclid_norm,
    }
    if member:
        bound = denominator_lower_bound(config.omega)
        audit = []
        for nu_max in (10, 50, 200):
            lattice_min = lattice_denominator_minimum(config.omega, nu_max)
            audit.append(
                {
                    "nu_max": nu_max,
                    "lattice_minimum": lattice_min,
                    "relative_gap": (lattice_min - bound) / bound,
                }
            )
        report["denominator_lower_bound"] = bound
        report["lattice_audit"] = audit
    path = os.path.join(out_dir, "gamma_report.json")
    _atomic_write(path, json.dumps(report, sort_keys=True, indent=2) + "\n")
    print(f"gamma member: {member}" + (f", C = {report.get('denominator_lower_bound'):.6g}" if member else ""))
    print(f"wrote {path}")
    return EXIT_OK


def _series_for(config: RunConfig, hbar: float) -> tuple[NormalFormSeries, dict]:
    f0, quad_err = build_f0(config, hbar)
    depth = config.order * config.nu_max
    window = config.n_max - depth - 2
    points = [(i, j) for i in range(window + 1) for j in range(window + 1)]
    result = normal_form_orders(f0, config.omega, hbar, config.order, points)
    if config.perturbation_type == "gaussian":
        f0_norm = gaussian_f0_norm(config)
        mu0, eps_star = mu_and_radius(f0_norm, config.sigma, 0.0)
    else:
        f0_norm, eps_star = float("nan"), float("nan")
    series = NormalFormSeries(
        omega=config.omega,
        hbar=hbar,
        sigma=config.sigma,
        rho=config.rho,
        orders=result["orders"],
        f0_norm=f0_norm,
        mu=0.0,
        epsilon_star=eps_star,
        truncation_n_max=config.n_max,
        bandwidth=result["bandwidth"],
        contamination_depth=result["contamination_depth"],
    )
    return series, {"f0": f0, "quad_error": quad_err, "points": points}


def cmd_normal_form(config: RunConfig, out_dir: str) -> int:
    wrote = []
    for hbar in config.hbar_list:
        if hbar == 0.0:
            raise BudgetError("hbar = 0 runs belong to the classical oracle, not normal-form")
        series, aux = _series_for(config, hbar)
        payload = series.to_json_dict()
        payload["meta"] = _meta(
            config,
            quad_error=aux["quad_error"],
            contamination_depth=series.contamination_depth,
        )
        spath = os.path.join(out_dir, f"series_h{_fmt(hbar)}.json")
        _atomic_write(spath, json.dumps(payload, sort_keys=True, indent=2) + "\n")
        wrote.append(spath)

        for eps in config.epsilon_list:
            spec = diagonalize(aux["f0"], config.omega, hbar, eps)
            rows = spec.to_csv()
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            for n in aux["points"]:
                value, _ = eigenvalue_series(series, n, eps)
                writer.writerow(
                    [n[0], n[1], repr(float(eps)), repr(hbar),
                     repr(value.real), repr(value.imag), "series"]
                )
            header = f"# config_hash={config.hash} seed={config.seed} qbnf={__version__}\n"
            cpath = os.path.join(out_dir, f"spectra_h{_fmt(hbar)}_e{_fmt(eps)}.csv")
            _atomic_write(cpath, header + rows + buf.getvalue())
            wrote.append(cpath)
    for path in wrote:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(config: RunConfig, out_dir: str, suite: str) -> int:
    if suite not in SUITE_NAMES:
        print(
            f"unknown suite '{suite}'; known suites: {', '.join(sorted(SUITE_NAMES))}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    report = run_suite(suite, config)
    report["meta"] = _meta(config)
    path = os.path.join(out_dir, f"verify_{suite}.json")
    _atomic_write(path, json.dumps(report, sort_keys=True, indent=2) + "\n")
    n_pass = sum(1 for c in report["cases"] if c["passed"])
    print(f"suite {suite}: {'PASS' if report['passed'] else 'FAIL'} "
          f"({n_pass}/{len(report['cases'])} cases)")
    print(f"wrote {path}")
    return EXIT_OK if report["passed"] else EXIT_NUMERIC


def cmd_sweep(config: RunConfig, out_dir: str) -> int:
    if not config.epsilon_list:
        print("sweep requires a nonempty epsilon_list", file=sys.stderr)
        return EXIT_CONFIG
    if not config.hbar_list:
        print("sweep requires a nonempty hbar_list", file=sys.stderr)
        return EXIT_CONFIG
    if config.perturbation_type != "gaussian":
        print("sweep requires the gaussian perturbation", file=sys.stderr)
        return EXIT_CONFIG

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["hbar", "epsilon_star", "empirical_radius", "radius_ge_half_eps_star",
         "max_series_vs_diag_residual"]
    )
    f0_norm = gaussian_f0_norm(config)
    _, eps_star = mu_and_radius(f0_norm, config.sigma, 0.0)
    all_ok = True
    for hbar in config.hbar_list:
        series, aux = _series_for(config, hbar)
        radius = empirical_radius(series, (0, 0))
        ok = radius >= eps_star / 2
        all_ok = all_ok and ok
        worst = 0.0
        for eps in config.epsilon_list:
            value, _ = eigenvalue_series(series, (0, 0), eps)
            spec = diagonalize(aux["f0"], config.omega, hbar, eps)
            worst = max(worst, abs(value - spec.value_at((0, 0))))
        writer.writerow(
            [repr(hbar), repr(eps_star), repr(radius), ok, repr(worst)]
        )
    header = f"# config_hash={config.hash} seed={config.seed} qbnf={__version__}\n"
    path = os.path.join(out_dir, "radius_sweep.csv")
    _atomic_write(path, header + buf.getvalue())
    print(f"wrote {path}")
    return EXIT_OK if all_ok else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbnf",
        description="Quantum Birkhoff normal form engine for complex-frequency oscillators",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("check-gamma", "frequency-domain membership and denominator audit"),
        ("normal-form", "run the normal form and write series + spectra"),
        ("verify", "run a named property-verification suite"),
        ("sweep", "empirical convergence radius per hbar"),
    ):
        cmd = sub.add_parser(name, help=helptext)
        cmd.add_argument("--config", required=True, help="path to the JSON run config")
        cmd.add_argument("--out", default=None, help="output directory (default: config output_dir)")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        if name == "verify":
            cmd.add_argument("--suite", required=True, help="suite name")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config_file(args.config)
        if args.seed is not None:
            document = dict(config.raw)
            document["seed"] = args.seed
            config = load_config(document)
        out_dir = args.out if args.out is not None else config.output_dir
        if args.command == "check-gamma":
            return cmd_check_gamma(config, out_dir)
        if args.command == "normal-form":
            return cmd_normal_form(config, out_dir)
        if args.command == "verify":
            return cmd_verify(config, out_dir, args.suite)
        if args.command == "sweep":
            return cmd_sweep(config, out_dir)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BudgetError, ContaminationError) as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except QbnfError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
