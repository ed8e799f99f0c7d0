"""Configuration-driven experiment runner.

Each subcommand reproduces one computable experiment family and writes
machine-readable artifacts (CSV/JSON) plus a run manifest into the output
directory.  All randomness is seeded, floats are printed at 17
significant digits, and manifests carry the effective configuration, so
identical configurations produce byte-identical outputs.

    ellsqueeze profile    --out OUT [--samples N] [--seed S]
    ellsqueeze classify   --out OUT [--kind tangential|normal|cone] [--s S] [--ratio R]
    ellsqueeze floor      --out OUT [--s S] [--r R] [--grid G]
    ellsqueeze scale      --out OUT [--levels d1,d2,...]
    ellsqueeze limits     --out OUT [--b B] [--agrid a1,a2,...]
    ellsqueeze wbscan     --out OUT [--samples N] [--exclusion E]
    ellsqueeze convergence --out OUT [--agrid ...] [--eps E] [--uradius R]

A JSON config file (--config) supplies defaults; explicit flags win.
The working domain defaults to the quartic example {|z_2|^2 + |z_1|^4 < 1};
pass --domain ball:N or --domain path.json for other ellipsoids.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .automorphisms import normalize_point, pullback_coeffs
from .domain import GeneralEllipsoid, samples_to_csv
from .errors import ConfigError, EllsqueezeError
from .scaling import (DefiningFunctionPoly, diagnostics_to_csv, limit_diagnostics,
                      scale_along_normal)
from .sequences import classify, generate, record_to_csv
from .squeeze import gamma_floor, squeeze_lower_bound
from .domconv import exhaustion_check, exhaustion_report_to_csv
from .util import fmt, write_csv

EXPERIMENTS = ("profile", "classify", "floor", "scale", "limits", "wbscan", "convergence")

_DEFAULTS = {
    "domain": "quartic",
    "seed": 0,
    "samples": 1 << 14,
    "out": "out",
    # per-experiment knobs
    "indices": [10, 100, 1000, 10000],
    "kind": "tangential",
    "count": 40,
    "s": 0.5,
    "r": 0.5,
    "ratio": 0.5,
    "grid": 200,
    "levels": [1e-2, 1e-3, 1e-4],
    "b": 0.5,
    "agrid": [0.5, 0.9, 0.99, 0.999, 0.9999],
    "exclusion": 1e-2,
    "eps": 0.4,
    "uradius": 0.5,
}

_TOLERANCES = {
    "boundary_residual": 1e-10,
    "basepoint_centering": 1e-10,
    "tau_relative": 1e-12,
    "levi_psd": -1e-8,
}


def _load_domain(spec: str) -> GeneralEllipsoid:
    if spec == "quartic":
        return GeneralEllipsoid.quartic_disc()
    if spec.startswith("ball:"):
        return GeneralEllipsoid.unit_ball(int(spec.split(":", 1)[1]))
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"domain spec {spec!r} is neither built-in nor a file")
    return GeneralEllipsoid.load(path)


def _merge_config(args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS)
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(loaded) - set(_DEFAULTS) - {"experiment"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: dict) -> None:
    if int(cfg["samples"]) < 1:
        raise ConfigError("samples must be >= 1")
    if not (0.0 < float(cfg["s"]) <= 1.0):
        raise ConfigError("s must lie in (0, 1]")
    if not (0.0 < float(cfg["r"]) <= 1.0):
        raise ConfigError("r must lie in (0, 1]")
    if not (0.0 < float(cfg["ratio"]) < 1.0):
        raise ConfigError("ratio must lie in (0, 1)")
    if any(a <= 0.0 or a >= 1.0 for a in cfg["agrid"]):
        raise ConfigError("agrid values must lie in (0, 1)")
    if any(lv <= 0.0 for lv in cfg["levels"]):
        raise ConfigError("levels must be positive")
    if cfg["kind"] not in ("tangential", "normal", "cone"):
        raise ConfigError("kind must be tangential, normal, or cone")


def _write_manifest(outdir: Path, experiment: str, cfg: dict) -> None:
    manifest = {
        "experiment": experiment,
        "config": {k: cfg[k] for k in sorted(cfg)},
        "package_version": __version__,
        "tolerances": _TOLERANCES,
    }
    with open(outdir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(experiment: str, cfg: dict) -> int:
    """Execute one experiment; returns a process exit status."""
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    D = _load_domain(str(cfg["domain"]))
    seed = int(cfg["seed"])
    samples = int(cfg["samples"])

    if experiment == "profile":
        indices = [int(j) for j in cfg["indices"]]
        seq = generate(D, "tangential", indices=indices)
        rows = []
        for term in seq.terms:
            est = squeeze_lower_bound(D, term.z, count=samples, seed=seed)
            norm = normalize_point(D, term.z)
            rows.append([term.index,
                         float(term.rho_exact()),
                         1.0 if term.p_exact is None else _ratio(D, cfg, term),
                         float(D.P.eval(norm.b[:-1])),
                         est.value])
        write_csv(outdir / "profile.csv",
                  ["n", "rho", "r_star", "P_b_prime", "sigma_hat"], rows)
        print(f"profile: {len(rows)} terms, last sigma_hat = {fmt(rows[-1][-1])}")

    elif experiment == "classify":
        seq = generate(D, str(cfg["kind"]), count=int(cfg["count"]),
                       s=float(cfg["s"]), ratio=float(cfg["ratio"]))
        record = classify(D, float(cfg["s"]), seq)
        record_to_csv(outdir / "classify.csv", record)
        print(f"classify[{cfg['kind']}]: verdict = {record.verdict}")

    elif experiment == "floor":
        report = gamma_floor(D, float(cfg["s"]), float(cfg["r"]),
                             grid_count=int(cfg["grid"]), count=samples,
                             seed=seed, with_analytic=True)
        payload = {
            "s": report.s, "r": report.r, "floor": report.value,
            "analytic_floor_interpretation": report.analytic,
            "grid_count": report.grid_count, "samples": report.samples,
            "seed": report.seed,
            "argmin": [[c.real, c.imag] for c in report.argmin],
        }
        with open(outdir / "floor.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"floor(s={report.s:g}, r={report.r:g}) = {fmt(report.value)}")

    elif experiment == "scale":
        gauge = DefiningFunctionPoly.graph_model(D.P)
        levels = [float(x) for x in cfg["levels"]]
        etas = []
        for delta in levels:
            eta = np.zeros(D.n, dtype=np.complex128)
            eta[-1] = -delta
            etas.append(eta)
        scaled = scale_along_normal(gauge, etas, seed=seed)
        report = limit_diagnostics(scaled)
        diagnostics_to_csv(outdir / "scale.csv", report)
        print(f"scale: sup Cauchy delta = {fmt(report.cauchy_deltas.max())}, "
              f"psd min eig = {fmt(report.psd_min_eig)}")

    elif experiment == "limits":
        b = float(cfg["b"])
        rows = [[a, *pullback_coeffs(b, float(a))] for a in cfg["agrid"]]
        write_csv(outdir / "limits.csv", ["a", "c1", "c2", "c3"], rows)
        c1, c2, c3 = rows[-1][1:]
        print(f"limits: at a={rows[-1][0]:g} coefficients -> ({fmt(c1)}, {fmt(c2)}, {fmt(c3)})")

    elif experiment == "wbscan":
        report = D.wb_scan(count=samples, seed=seed, exclusion=float(cfg["exclusion"]))
        samples_to_csv(outdir / "wbscan.csv", D, report.points, report.levi_values)
        summary = {
            "min_levi": report.min_levi, "tested": report.tested,
            "excluded": report.excluded, "exclusion": report.exclusion,
            "passed": report.passed,
        }
        with open(outdir / "wbscan.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wbscan: min restricted Levi eigenvalue = {fmt(report.min_levi)} "
              f"({'pass' if report.passed else 'FAIL'})")

    elif experiment == "convergence":
        report = exhaustion_check(D, s=float(cfg["s"]),
                                  a_grid=[float(a) for a in cfg["agrid"]],
                                  eps=float(cfg["eps"]),
                                  u_radius=float(cfg["uradius"]),
                                  count=samples, seed=seed)
        exhaustion_report_to_csv(outdir / "convergence.csv", report)
        idx = report.first_ok_index
        print("convergence: inclusion holds from grid index "
              + (str(idx) if idx is not None else "never (extend the grid)"))

    else:
        raise ConfigError(f"unknown experiment {experiment!r}")

    _write_manifest(outdir, experiment, cfg)
    return 0


def _ratio(D, cfg, term) -> float:
    from .sequences import tangency_ratio

    return tangency_ratio(D, float(cfg["s"]), term)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellsqueeze",
        description="squeezing-function experiments on generalized ellipsoids")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--domain", type=str, default=None)
        p.add_argument("--kind", type=str, default=None)
        p.add_argument("--count", type=int, default=None)
        p.add_argument("--s", type=float, default=None)
        p.add_argument("--r", type=float, default=None)
        p.add_argument("--ratio", type=float, default=None)
        p.add_argument("--grid", type=int, default=None)
        p.add_argument("--b", type=float, default=None)
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--uradius", type=float, default=None)
        p.add_argument("--exclusion", type=float, default=None)
        p.add_argument("--indices", type=lambda s: [int(x) for x in s.split(",")],
                       default=None)
        p.add_argument("--agrid", type=lambda s: [float(x) for x in s.split(",")],
                       default=None)
        p.add_argument("--levels", type=lambda s: [float(x) for x in s.split(",")],
                       default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args)
        return run(args.experiment, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EllsqueezeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
