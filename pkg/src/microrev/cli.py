"""Command-line front end: single-query evaluation, deterministic sweeps,
oracle validation, and Monte Carlo experiment emulation.

Exit codes: 0 success, 1 check/assertion failure, 2 usage error.  All file
outputs are byte-deterministic for a fixed seed: floats are written with
repr (shortest round-trip, '.' decimal point), rows are ordered by index
regardless of worker scheduling, and no timestamps enter any payload.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from pathlib import Path
from typing import Sequence

from . import fock_oracle, gaussian_core, heterodyne_experiment, reversibility
from .errors import MicrorevError
from .gaussian_core import BathSpec, BeamSplitterSpec, ComplexAmplitude, TransitionQuery

__all__ = ["main", "parse_complex", "SweepConfig"]

ENV_OUTPUT_DIR = "MICROREV_OUTPUT_DIR"

# Default sweep grids.  Magnitude endpoints follow the benchmark operating
# ranges; interior points are an even fill-in.
FIG3_AMPLITUDES = (1.46, 2.0, 2.4, 2.8, 3.36)
FIG3_NTH = (1.22, 1.62, 2.4, 3.57)
UPSILON_AMPLITUDES = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
UPSILON_BETAS = (1.0, 0.58, 0.35, 0.25, 0.15, 0.1, 0.05, 0.02, 0.01)

FIG3_HEADER = [
    "row", "alpha_i_re", "alpha_i_im", "alpha_f_re", "alpha_f_im",
    "n_th", "beta", "tau", "theta",
    "predicted_log_ratio", "analytic_log_ratio",
    "mc_point", "mc_std_error", "mc_ci_low", "mc_ci_high",
    "mc_samples", "mc_seed", "status",
]
UPSILON_HEADER = [
    "row", "alpha_i_re", "alpha_i_im", "alpha_f_re", "alpha_f_im",
    "n_th", "beta",
    "alpha_sq_tot", "delta_alpha_sq", "log_upsilon",
    "log_upsilon_per_alpha_sq_tot", "half_beta_sq", "status",
]
EXPERIMENT_HEADER = [
    "direction", "mu_fit_re", "mu_fit_im", "variance_fit", "n_samples",
    "eval_re", "eval_im", "density",
]


class UsageError(Exception):
    """Flag/domain violation; rendered as a one-line diagnostic, exit 2."""


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' style amplitudes; bare reals and bare 'bi' accepted."""
    cleaned = text.strip().replace(" ", "").lower()
    if not cleaned:
        raise UsageError("empty amplitude")
    t = cleaned.replace("i", "j")
    # A bare imaginary unit needs an explicit coefficient for complex().
    t = re.sub(r"(?<![0-9.])j", "1j", t)
    try:
        value = complex(t)
    except ValueError:
        raise UsageError(f"cannot parse complex amplitude {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise UsageError(f"amplitude must be finite: {text!r}")
    return value


def _parse_complex_list(text: str) -> list[complex]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError(f"empty amplitude list: {text!r}")
    return [parse_complex(t) for t in items]


def _parse_float_list(text: str) -> list[float]:
    try:
        items = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}: {exc}") from None
    if not items:
        raise UsageError(f"empty number list: {text!r}")
    return items


def _fmt(value) -> str:
    """CSV cell formatting: repr for floats (locale-free, round-trip)."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def resolve_output(path: str) -> Path:
    """Relative outputs land in $MICROREV_OUTPUT_DIR (or the cwd)."""
    p = Path(path)
    if not p.is_absolute():
        base = os.environ.get(ENV_OUTPUT_DIR)
        if base:
            p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


@dataclasses.dataclass
class SweepConfig:
    """One sweep's full parameterisation; JSON-loadable, flag-overridable."""

    amplitudes_i: list
    amplitudes_f: list
    nth_list: list
    tau_list: list
    mc_samples: int = 50000
    base_seed: int = 20260814
    output_path: str = "sweep.csv"

    def validated(self) -> "SweepConfig":
        for name in ("amplitudes_i", "amplitudes_f", "nth_list", "tau_list"):
            if not getattr(self, name):
                raise UsageError(f"{name} must not be empty")
        for n_th in self.nth_list:
            if not (isinstance(n_th, (int, float)) and math.isfinite(n_th) and n_th > 0):
                raise UsageError(f"n_th values must be finite and > 0, got {n_th}")
        for tau in self.tau_list:
            if not (isinstance(tau, (int, float)) and 0.0 < tau < 1.0):
                raise UsageError(f"tau values must lie in (0, 1), got {tau}")
        if self.mc_samples < 3:
            raise UsageError(f"mc_samples must be >= 3, got {self.mc_samples}")
        return self


def _config_from_file(path: str, base: SweepConfig) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path!r} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError(f"config {path!r} must hold a JSON object")
    known = {f.name for f in dataclasses.fields(SweepConfig)}
    unknown = set(raw) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    cfg = dataclasses.replace(base)
    for key, value in raw.items():
        if key in ("amplitudes_i", "amplitudes_f"):
            if not isinstance(value, list):
                raise UsageError(f"{key} must be a list")
            value = [parse_complex(v) if isinstance(v, str) else complex(v)
                     for v in value]
        setattr(cfg, key, value)
    return cfg


def _tau_for_nth(n_th: float) -> float:
    # Benchmark mapping: the quoted reflectance into the bath port is 85%
    # at n_th = 1.62 and 70% elsewhere; tau = 1 - R.
    return 0.15 if abs(n_th - 1.62) < 1e-9 else 0.3


def _query(alpha_i: complex, alpha_f: complex, n_th: float, tau: float) -> TransitionQuery:
    return TransitionQuery(
        alpha_i=ComplexAmplitude(alpha_i.real, alpha_i.imag),
        alpha_f=ComplexAmplitude(alpha_f.real, alpha_f.imag),
        bath=BathSpec.from_nth(n_th),
        splitter=BeamSplitterSpec.from_tau(tau),
    )


# ---------------------------------------------------------------- ratio --

def _bath_from_args(args) -> BathSpec:
    if (args.nth is None) == (args.beta is None):
        raise UsageError("provide exactly one of --nth / --beta")
    try:
        if args.nth is not None:
            return BathSpec.from_nth(args.nth)
        return BathSpec.from_beta(args.beta)
    except MicrorevError as exc:
        raise UsageError(str(exc)) from None


def _record_skeleton(query: TransitionQuery, engine: str) -> dict:
    return {
        "engine": engine,
        "alpha_i_re": query.alpha_i.re, "alpha_i_im": query.alpha_i.im,
        "alpha_f_re": query.alpha_f.re, "alpha_f_im": query.alpha_f.im,
        "n_th": query.bath.n_th, "beta": query.bath.beta,
        "tau": query.splitter.tau, "theta": query.splitter.theta,
    }


def result_record(query: TransitionQuery, engine: str, result,
                  dim=None, estimate=None, mc_samples=None, mc_seed=None) -> dict:
    rec = _record_skeleton(query, engine)
    rec.update(
        p_fwd=result.p_fwd, p_bwd=result.p_bwd,
        log_ratio=result.log_ratio,
        predicted_log_ratio=result.predicted_log_ratio,
        heat=result.heat,
        classical_log_ratio=result.classical_log_ratio,
        log_upsilon=result.log_upsilon,
        alpha_sq_tot=result.alpha_sq_tot,
        delta_alpha_sq=result.delta_alpha_sq,
        dim=dim,
        mc_point=None if estimate is None else estimate.point,
        mc_std_error=None if estimate is None else estimate.std_error,
        mc_ci_low=None if estimate is None else estimate.ci_low,
        mc_ci_high=None if estimate is None else estimate.ci_high,
        mc_n_resamples=None if estimate is None else estimate.n_resamples,
        mc_resample_size=None if estimate is None else estimate.resample_size,
        mc_samples=mc_samples,
        mc_seed=mc_seed,
    )
    return rec


def cmd_ratio(args) -> int:
    try:
        bath = _bath_from_args(args)
        splitter = BeamSplitterSpec.from_tau(args.tau)
    except MicrorevError as exc:
        raise UsageError(str(exc)) from None
    query = TransitionQuery(
        alpha_i=ComplexAmplitude(args.alpha_i.real, args.alpha_i.imag),
        alpha_f=ComplexAmplitude(args.alpha_f.real, args.alpha_f.imag),
        bath=bath, splitter=splitter)

    dim = estimate = mc_samples = mc_seed = None
    if args.engine == "analytic":
        p_fwd = gaussian_core.forward_probability(query)
        p_bwd = gaussian_core.backward_probability(query)
    elif args.engine == "fock":
        dim = args.dim
        p_fwd = fock_oracle.forward_probability_fock(query, dim, args.eps_trunc)
        p_bwd = fock_oracle.backward_probability_fock(query, dim, args.eps_trunc)
    else:
        run = heterodyne_experiment.run_transition_protocol(
            query, args.samples, args.seed,
            n_resamples=args.resamples, resample_size=args.resample_size)
        p_fwd, p_bwd = run.p_fwd_density, run.p_bwd_density
        estimate, mc_samples, mc_seed = run.estimate, args.samples, args.seed

    result = reversibility.transition_result(query, p_fwd, p_bwd)
    rec = result_record(query, args.engine, result, dim=dim, estimate=estimate,
                        mc_samples=mc_samples, mc_seed=mc_seed)
    json.dump(rec, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


# --------------------------------------------------------------- sweeps --

def _sweep_config(args, default_cfg: SweepConfig) -> SweepConfig:
    cfg = default_cfg
    if args.config:
        cfg = _config_from_file(args.config, cfg)
    if args.amplitudes_i:
        cfg.amplitudes_i = _parse_complex_list(args.amplitudes_i)
    if args.amplitudes_f:
        cfg.amplitudes_f = _parse_complex_list(args.amplitudes_f)
    if args.nth_list:
        cfg.nth_list = _parse_float_list(args.nth_list)
    if getattr(args, "tau", None) is not None:
        cfg.tau_list = [args.tau]
    if getattr(args, "samples", None) is not None:
        cfg.mc_samples = args.samples
    if getattr(args, "seed", None) is not None:
        cfg.base_seed = args.seed
    if args.output:
        cfg.output_path = args.output
    return cfg.validated()


def _fig3_row(index: int, alpha_i: complex, alpha_f: complex, n_th: float,
              tau: float, cfg: SweepConfig, skip_mc: bool) -> list:
    query = _query(alpha_i, alpha_f, n_th, tau)
    base = [index,
            query.alpha_i.re, query.alpha_i.im,
            query.alpha_f.re, query.alpha_f.im,
            query.bath.n_th, query.bath.beta,
            query.splitter.tau, query.splitter.theta]
    try:
        predicted = reversibility.predicted_log_ratio(
            query.alpha_i, query.alpha_f, query.bath)
        p_fwd = gaussian_core.forward_probability(query)
        p_bwd = gaussian_core.backward_probability(query)
        analytic = math.log(p_fwd) - math.log(p_bwd)
        if skip_mc:
            mc = [None] * 6
        else:
            seed = heterodyne_experiment.derive_seed(cfg.base_seed, index)
            est = heterodyne_experiment.estimate_log_ratio(
                query, cfg.mc_samples, seed)
            mc = [est.point, est.std_error, est.ci_low, est.ci_high,
                  cfg.mc_samples, seed]
        return base + [predicted, analytic] + mc + ["ok"]
    except MicrorevError as exc:
        return base + [None] * 8 + [f"failed:{type(exc).__name__}"]


def cmd_sweep_fig3(args) -> int:
    cfg = _sweep_config(args, SweepConfig(
        amplitudes_i=[complex(a) for a in FIG3_AMPLITUDES],
        amplitudes_f=[complex(a) for a in FIG3_AMPLITUDES],
        nth_list=list(FIG3_NTH),
        tau_list=[0.3, 0.15],
        output_path="fig3.csv"))
    explicit_tau = args.tau is not None
    grid = []
    for alpha_i, alpha_f, n_th in product(cfg.amplitudes_i, cfg.amplitudes_f,
                                          cfg.nth_list):
        tau = args.tau if explicit_tau else _tau_for_nth(n_th)
        grid.append((alpha_i, alpha_f, n_th, tau))

    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
        rows = list(pool.map(
            lambda item: _fig3_row(item[0], *item[1], cfg, args.skip_mc),
            enumerate(grid)))
    path = resolve_output(cfg.output_path)
    _write_csv(path, FIG3_HEADER, rows)
    failed = [r for r in rows if r[-1] != "ok"]
    print(f"wrote {path} ({len(rows)} rows, {len(failed)} failed)")
    return 1 if failed else 0


def cmd_sweep_upsilon(args) -> int:
    cfg = _sweep_config(args, SweepConfig(
        amplitudes_i=[complex(a) for a in UPSILON_AMPLITUDES],
        amplitudes_f=[complex(a) for a in UPSILON_AMPLITUDES],
        nth_list=[reversibility.nth_from_beta(b) for b in UPSILON_BETAS],
        tau_list=[0.3],
        output_path="upsilon.csv"))
    rows = []
    for index, (alpha_i, alpha_f, n_th) in enumerate(
            product(cfg.amplitudes_i, cfg.amplitudes_f, cfg.nth_list)):
        bath = BathSpec.from_nth(n_th)
        ai = ComplexAmplitude(alpha_i.real, alpha_i.imag)
        af = ComplexAmplitude(alpha_f.real, alpha_f.imag)
        tot = ai.abs_sq + af.abs_sq
        delta = af.abs_sq - ai.abs_sq
        log_ups = reversibility.upsilon_closed_form(ai, af, bath)
        per_tot = (log_ups / tot) if tot > 0 else None
        rows.append([index, ai.re, ai.im, af.re, af.im, bath.n_th, bath.beta,
                     tot, delta, log_ups, per_tot, 0.5 * bath.beta ** 2, "ok"])
    path = resolve_output(cfg.output_path)
    _write_csv(path, UPSILON_HEADER, rows)
    print(f"wrote {path} ({len(rows)} rows, 0 failed)")
    return 0


# --------------------------------------------------------- oracle-check --

def _check_entry(name: str, tolerance: float, fn) -> dict:
    try:
        err = float(fn())
    except MicrorevError as exc:
        return {"name": name, "passed": False, "max_error": None,
                "tolerance": tolerance, "error": f"{type(exc).__name__}: {exc}"}
    return {"name": name, "passed": bool(err <= tolerance), "max_error": err,
            "tolerance": tolerance, "error": None}


def _gaussian_equivalence_error(dim: int) -> float:
    worst = 0.0
    amps_i = (1.0, 2.0, complex(1.0, 0.5))
    amps_f = (0.5, 1.2)
    for alpha_i, alpha_f, n_th, tau in product(amps_i, amps_f, (1.0, 1.62), (0.7, 0.3)):
        query = _query(complex(alpha_i), complex(alpha_f), n_th, tau)
        for fock_fn, gauss_fn in (
                (fock_oracle.forward_probability_fock, gaussian_core.forward_probability),
                (fock_oracle.backward_probability_fock, gaussian_core.backward_probability)):
            slow = fock_fn(query, dim)
            fast = gauss_fn(query)
            worst = max(worst, abs(slow - fast) / fast)
    return worst


def _general_ratio_error(dim: int) -> float:
    bath = BathSpec.from_nth(1.0)
    theta = math.acos(math.sqrt(0.7))
    states = [
        fock_oracle.superposition_ket({0: 1, 2: 1}),
        fock_oracle.superposition_ket({1: 1, 3: 1}),
        fock_oracle.superposition_ket({0: 1, 3: 1j}),
        fock_oracle.superposition_ket({0: 1, 1: 1, 4: 1}),
        fock_oracle.superposition_ket({2: 1, 5: complex(0.5, -0.5)}),
    ]
    worst = 0.0
    for psi_i in states:
        for psi_f in states:
            lhs, rhs = fock_oracle.general_ratio_check(psi_i, psi_f, bath, theta, dim)
            worst = max(worst, abs(lhs - rhs) / rhs)
    return worst


def cmd_oracle_check(args) -> int:
    # Sizing guidance is dim >= 12; smaller cutoffs run anyway so that a
    # starved truncation surfaces as a structured check failure (exit 1)
    # rather than a usage error.
    if args.dim < 2:
        raise UsageError(f"--dim must be >= 2, got {args.dim}")
    dim = args.dim
    tol = args.tolerance

    def pick(default: float) -> float:
        return tol if tol is not None else default

    checks = [
        _check_entry("unitarity", pick(1e-12),
                     lambda: fock_oracle.beam_splitter(
                         math.acos(math.sqrt(0.7)), dim).unitarity_defect),
        _check_entry("energy_conservation", pick(1e-12),
                     lambda: fock_oracle.energy_conservation_check(
                         math.acos(math.sqrt(0.7)), min(dim, 20))),
        _check_entry("fixed_point", pick(1e-8),
                     lambda: fock_oracle.fixed_point_check(
                         BathSpec.from_nth(1.0), math.pi / 4.0, dim)),
        _check_entry("gaussian_equivalence", pick(1e-6),
                     lambda: _gaussian_equivalence_error(dim)),
        _check_entry("general_ratio", pick(1e-5),
                     lambda: _general_ratio_error(dim)),
    ]
    report = {
        "dim": dim,
        "tolerance_override": tol,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }
    payload = json.dumps(report, indent=2) + "\n"
    sys.stdout.write(payload)
    if args.output:
        resolve_output(args.output).write_text(payload, encoding="utf-8")
    return 0 if report["passed"] else 1


# ------------------------------------------------------------ experiment --

def cmd_experiment(args) -> int:
    try:
        bath = _bath_from_args(args)
        splitter = BeamSplitterSpec.from_tau(args.tau)
    except MicrorevError as exc:
        raise UsageError(str(exc)) from None
    query = TransitionQuery(
        alpha_i=ComplexAmplitude(args.alpha_i.real, args.alpha_i.imag),
        alpha_f=ComplexAmplitude(args.alpha_f.real, args.alpha_f.imag),
        bath=bath, splitter=splitter)
    run = heterodyne_experiment.run_transition_protocol(
        query, args.samples, args.seed,
        n_resamples=args.resamples, resample_size=args.resample_size)

    est = run.estimate
    summary = {
        **_record_skeleton(query, "montecarlo"),
        "n_samples": run.n_samples,
        "base_seed": run.base_seed,
        "n_resamples": est.n_resamples,
        "resample_size": est.resample_size,
        "forward_fit": {
            "mean_re": run.forward_fit.mean.re, "mean_im": run.forward_fit.mean.im,
            "variance": run.forward_fit.variance, "n_samples": run.forward_fit.n_samples,
        },
        "backward_fit": {
            "mean_re": run.backward_fit.mean.re, "mean_im": run.backward_fit.mean.im,
            "variance": run.backward_fit.variance, "n_samples": run.backward_fit.n_samples,
        },
        "p_fwd_density": run.p_fwd_density,
        "p_bwd_density": run.p_bwd_density,
        "point": est.point,
        "std_error": est.std_error,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "predicted_log_ratio": run.predicted,
        "within_4_std_error": bool(abs(est.point - run.predicted) <= 4.0 * est.std_error),
    }
    del summary["engine"]

    rows = [
        ["forward",
         run.forward_fit.mean.re, run.forward_fit.mean.im,
         run.forward_fit.variance, run.forward_fit.n_samples,
         run.forward_target.re, run.forward_target.im, run.p_fwd_density],
        ["backward",
         run.backward_fit.mean.re, run.backward_fit.mean.im,
         run.backward_fit.variance, run.backward_fit.n_samples,
         run.backward_target.re, run.backward_target.im, run.p_bwd_density],
    ]
    csv_path = resolve_output(args.output_prefix + ".csv")
    json_path = resolve_output(args.output_prefix + ".json")
    _write_csv(csv_path, EXPERIMENT_HEADER, rows)
    payload = json.dumps(summary, indent=2) + "\n"
    json_path.write_text(payload, encoding="utf-8")
    sys.stdout.write(payload)
    return 0


# ---------------------------------------------------------------- main --

def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microrev",
        description="Reversibility of coherent states mixed with thermal "
                    "light: closed forms, Fock oracle, Monte Carlo.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_query_flags(p):
        p.add_argument("--alpha-i", type=_complex_arg, required=True,
                       metavar="A", help="initial amplitude, e.g. 2 or 1+0.5i")
        p.add_argument("--alpha-f", type=_complex_arg, required=True,
                       metavar="A", help="final amplitude")
        p.add_argument("--nth", type=float, default=None,
                       help="bath mean occupation (> 0)")
        p.add_argument("--beta", type=float, default=None,
                       help="bath inverse temperature (> 0); alternative to --nth")
        p.add_argument("--tau", type=float, required=True,
                       help="splitter transmittance in (0, 1)")

    p_ratio = sub.add_parser("ratio", help="evaluate one transition")
    add_query_flags(p_ratio)
    p_ratio.add_argument("--engine", choices=("analytic", "fock", "montecarlo"),
                         default="analytic")
    p_ratio.add_argument("--dim", type=int, default=40,
                         help="Fock cutoff (fock engine)")
    p_ratio.add_argument("--eps-trunc", type=float,
                         default=fock_oracle.DEFAULT_TRUNCATION_BUDGET,
                         help="tail-mass budget (fock engine)")
    p_ratio.add_argument("--samples", type=int, default=50000)
    p_ratio.add_argument("--seed", type=int, default=20260814)
    p_ratio.add_argument("--resamples", type=int, default=1000)
    p_ratio.add_argument("--resample-size", type=int, default=1000)
    p_ratio.set_defaults(handler=cmd_ratio)

    def add_sweep_flags(p, default_output):
        p.add_argument("--config", default=None,
                       help="JSON file mirroring SweepConfig; flags override")
        p.add_argument("--amplitudes-i", default=None,
                       help="comma-separated amplitudes")
        p.add_argument("--amplitudes-f", default=None)
        p.add_argument("--nth-list", default=None,
                       help="comma-separated bath occupations")
        p.add_argument("--output", default=None,
                       help=f"CSV path (default {default_output})")

    p_f3 = sub.add_parser("sweep-fig3",
                          help="log-ratio sweep: prediction, analytic, Monte Carlo")
    add_sweep_flags(p_f3, "fig3.csv")
    p_f3.add_argument("--tau", type=float, default=None,
                      help="fixed transmittance (default: per-bath mapping)")
    p_f3.add_argument("--samples", type=int, default=None)
    p_f3.add_argument("--seed", type=int, default=None)
    p_f3.add_argument("--skip-mc", action="store_true",
                      help="closed forms only")
    p_f3.set_defaults(handler=cmd_sweep_fig3)

    p_up = sub.add_parser("sweep-upsilon",
                          help="quantum-correction sweep over amplitude/bath grids")
    add_sweep_flags(p_up, "upsilon.csv")
    p_up.set_defaults(handler=cmd_sweep_upsilon, tau=None, samples=None, seed=None)

    p_oc = sub.add_parser("oracle-check",
                          help="run the slow-engine validation suites")
    p_oc.add_argument("--dim", type=int, default=40)
    p_oc.add_argument("--tolerance", type=float, default=None,
                      help="override every check's threshold")
    p_oc.add_argument("--output", default=None, help="also write the JSON report here")
    p_oc.set_defaults(handler=cmd_oracle_check)

    p_ex = sub.add_parser("experiment",
                          help="simulate one measurement campaign (CSV + JSON)")
    add_query_flags(p_ex)
    p_ex.add_argument("--samples", type=int, default=50000)
    p_ex.add_argument("--seed", type=int, default=20260814)
    p_ex.add_argument("--resamples", type=int, default=1000)
    p_ex.add_argument("--resample-size", type=int, default=1000)
    p_ex.add_argument("--output-prefix", default="experiment")
    p_ex.set_defaults(handler=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MicrorevError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
