"""Acceptance gate: one test per release criterion, each emitting a single
PASS/FAIL line.  Criteria 1-9 cover the simulation library; criterion 10
covers the optional figure-rendering component and is skipped when that
component is not present."""

import math
import subprocess
import sys
import time
from itertools import product
from pathlib import Path

import conftest
import pytest

from microrev import fock_oracle, reversibility as rev
from microrev.gaussian_core import (
    BathSpec,
    BeamSplitterSpec,
    ComplexAmplitude,
    TransitionQuery,
    backward_probability,
    forward_probability,
)
from microrev.heterodyne_experiment import derive_seed, estimate_log_ratio

AMPLITUDES = (0.0, 0.5, 1.0 + 0.5j, 2.0, 2.4, -1.3 + 0.7j)
OCCUPATIONS = (0.5, 1.22, 1.62, 3.57)
TRANSMITTANCES = (0.15, 0.3, 0.5, 0.85)


def report(index: int, tier: str, name: str, passed: bool, detail: str = ""):
    line = f"ACCEPTANCE {index:02d} [{tier}] {name}: {'PASS' if passed else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    conftest.acceptance_lines.append(line)
    assert passed, line


def make_query(alpha_i, alpha_f, n_th, tau) -> TransitionQuery:
    return TransitionQuery(
        alpha_i=ComplexAmplitude.coerce(alpha_i),
        alpha_f=ComplexAmplitude.coerce(alpha_f),
        bath=BathSpec.from_nth(n_th),
        splitter=BeamSplitterSpec.from_tau(tau),
    )


def test_log_ratio_identity_and_tau_independence():
    start = time.perf_counter()
    worst_identity = 0.0
    worst_spread = 0.0
    for alpha_i, alpha_f, n_th in product(AMPLITUDES, AMPLITUDES, OCCUPATIONS):
        ratios = []
        predicted = rev.predicted_log_ratio(alpha_i, alpha_f,
                                            BathSpec.from_nth(n_th))
        for tau in TRANSMITTANCES:
            q = make_query(alpha_i, alpha_f, n_th, tau)
            r = math.log(forward_probability(q)) - math.log(backward_probability(q))
            ratios.append(r)
            worst_identity = max(worst_identity, abs(r - predicted))
        worst_spread = max(worst_spread, max(ratios) - min(ratios))
    elapsed = time.perf_counter() - start
    report(1, "PRIMARY", "log-ratio identity, splitter-independent",
           worst_identity < 1e-10 and worst_spread < 1e-10 and elapsed < 1.0,
           f"max identity dev {worst_identity:.2e}, max tau spread "
           f"{worst_spread:.2e}, {elapsed:.2f} s")


def test_fock_engine_reproduces_analytic_probabilities():
    start = time.perf_counter()
    amps = [a for a in AMPLITUDES if abs(complex(a)) <= 2.0]
    baths = [n for n in OCCUPATIONS if n <= 1.62]
    worst = 0.0
    for alpha_i, alpha_f, n_th, tau in product(amps, amps, baths, TRANSMITTANCES):
        q = make_query(alpha_i, alpha_f, n_th, tau)
        # budget below the default: the rescaled backward projector at
        # n_th = 0.5 carries mean occupation 12 whose D = 40 tail exceeds 1e-10
        slow_f = fock_oracle.forward_probability_fock(q, 40, 1e-9)
        slow_b = fock_oracle.backward_probability_fock(q, 40, 1e-9)
        worst = max(worst,
                    abs(slow_f - forward_probability(q)) / forward_probability(q),
                    abs(slow_b - backward_probability(q)) / backward_probability(q))
    elapsed = time.perf_counter() - start
    report(2, "PRIMARY", "number-basis engine equivalence at cutoff 40",
           worst < 1e-6 and elapsed < 60.0,
           f"max rel dev {worst:.2e}, {elapsed:.1f} s")


def test_correction_factor_reference_point():
    log_u = rev.upsilon_closed_form(3.14, 2.17, BathSpec.from_nth(3.57))
    upsilon = math.exp(log_u)
    report(3, "PRIMARY", "correction factor at the cooling reference point",
           1.49 <= upsilon <= 1.66, f"Upsilon {upsilon:.4f}")


def test_correction_factor_routes_agree_at_large_amplitudes():
    beta = rev.beta_from_nth(1.26)
    closed = rev.upsilon_closed_form(2.4, 5.2, beta)
    definition = rev.upsilon_from_definition_coherent(2.4, 5.2, beta)
    rel = abs(closed - definition) / abs(closed)
    upsilon = math.exp(closed)
    report(4, "PRIMARY", "correction factor definition route at high gain",
           rel < 1e-8,
           f"closed {closed:.12f}, definition {definition:.12f}, rel dev "
           f"{rel:.1e}; theory Upsilon {upsilon:.1f} vs reference measured "
           f"value exceeding 200 (reported, not enforced)")


def test_detailed_balance_for_non_coherent_states():
    states = [
        fock_oracle.superposition_ket({0: 1, 2: 1}),
        fock_oracle.superposition_ket({1: 1, 3: 1}),
        fock_oracle.superposition_ket({0: 1, 3: 1j}),
        fock_oracle.superposition_ket({0: 1, 1: 1, 4: 1}),
        fock_oracle.superposition_ket({2: 1, 5: complex(0.5, -0.5)}),
    ]
    bath = BathSpec.from_nth(1.0)
    theta = math.acos(math.sqrt(0.7))
    worst = 0.0
    for psi_i, psi_f in product(states, states):
        lhs, rhs = fock_oracle.general_ratio_check(psi_i, psi_f, bath, theta, 50)
        worst = max(worst, abs(lhs - rhs) / rhs)
    report(5, "PRIMARY", "detailed balance for superposition states",
           worst < 1e-5, f"{len(states)} states, max rel dev {worst:.2e}")


def test_thermal_state_is_a_fixed_point():
    dev = fock_oracle.fixed_point_check(BathSpec.from_nth(1.0), math.pi / 4.0, 60)
    report(6, "PRIMARY", "thermal fixed point of the mixing channel",
           dev < 1e-8, f"max dev {dev:.2e}")


def test_small_beta_expansion_of_the_correction():
    worst_series = 0.0
    series_ok = True
    for beta in (0.1, 0.25, 0.58, 1.0):
        # equal amplitudes: the per-total coefficient is exactly cosh(b) - 1
        log_u = rev.upsilon_closed_form(1.3, 1.3, beta)
        per_tot = log_u / (2.0 * 1.3 ** 2)
        dev = abs(per_tot / (beta ** 2 / 2.0) - 1.0 - beta ** 2 / 12.0)
        worst_series = max(worst_series, dev / beta ** 4)
        series_ok = series_ok and dev < beta ** 4
    worst_bound = 0.0
    grid = (0.5, 1.0, 1.5, 2.0, 2.5)
    for alpha_i, alpha_f in product(grid, grid):
        tot = alpha_i ** 2 + alpha_f ** 2
        for beta in (0.1, 0.25, 0.58, 1.0):
            log_u = rev.upsilon_closed_form(alpha_i, alpha_f, beta)
            dev = abs(log_u - (beta ** 2 / 2.0) * tot)
            bound = (beta ** 3 / 6.0 + beta ** 4) * tot
            worst_bound = max(worst_bound, dev / bound)
    report(7, "PRIMARY", "quadratic small-beta behaviour of the correction",
           series_ok and worst_bound <= 1.0,
           f"series dev/bound {worst_series:.2e}, grid dev/bound {worst_bound:.2f}")


def test_monte_carlo_recovers_the_prediction():
    start = time.perf_counter()
    hits = 0
    trials = 0
    for k, (mag, n_th) in enumerate(product((1.46, 2.0, 2.4, 2.8, 3.36),
                                            (1.22, 1.62, 2.4, 3.57))):
        tau = 0.15 if abs(n_th - 1.62) < 1e-9 else 0.3
        q = make_query(mag, 1.5, n_th, tau)
        est = estimate_log_ratio(q, 50_000, derive_seed(20260814, k))
        predicted = rev.predicted_log_ratio(q.alpha_i, q.alpha_f, q.bath)
        trials += 1
        hits += abs(est.point - predicted) <= 4.0 * est.std_error
    elapsed = time.perf_counter() - start
    report(8, "PRIMARY", "Monte Carlo estimates track the prediction",
           hits >= 19 and trials == 20 and elapsed < 60.0,
           f"{hits}/{trials} within 4 standard errors, {elapsed:.1f} s")


def test_rescaled_overlap_quadratic_contraction():
    worst = 0.0
    ok = True
    for alpha in (0.5, 1.0, 1.5, 2.0, 1.0 + 1.0j, 2.0j):
        sq = abs(complex(alpha)) ** 2
        for beta in (0.01, 0.02, 0.05, 0.1):
            value = fock_oracle.rescaled_overlap(alpha, beta)
            dev = abs(value - (1.0 - sq * beta ** 2 / 8.0))
            bound = sq * beta ** 3 / 4.0
            worst = max(worst, dev / bound)
            ok = ok and dev <= bound
    report(9, "PRIMARY", "Gibbs rescaling only perturbs overlaps quadratically",
           ok, f"max dev/bound {worst:.2f}")


FIGURES_DIR = Path(__file__).resolve().parents[1] / "figures"


@pytest.mark.skipif(not FIGURES_DIR.is_dir(),
                    reason="figure component not present")
def test_figure_scripts_render_default_sweeps(tmp_path):
    env_args = dict(cwd=tmp_path, capture_output=True, text=True, timeout=540)
    cli = [sys.executable, "-m", "microrev.cli"]
    sweeps = [
        cli + ["sweep-fig3", "--output", str(tmp_path / "fig3.csv")],
        cli + ["sweep-upsilon", "--output", str(tmp_path / "upsilon.csv")],
    ]
    renders = [
        [sys.executable, str(FIGURES_DIR / "fig3.py"),
         "--input", str(tmp_path / "fig3.csv"),
         "--output", str(tmp_path / "fig3.svg")],
        [sys.executable, str(FIGURES_DIR / "fig4.py"),
         "--input", str(tmp_path / "upsilon.csv"),
         "--output", str(tmp_path / "fig4.svg")],
        [sys.executable, str(FIGURES_DIR / "fig5.py"),
         "--input", str(tmp_path / "upsilon.csv"),
         "--output", str(tmp_path / "fig5.svg")],
    ]
    failures = []
    for cmd in sweeps + renders:
        proc = subprocess.run(cmd, **env_args)
        if proc.returncode != 0:
            failures.append(f"{Path(cmd[-3]).name if '--input' in cmd else cmd[2]} "
                            f"rc={proc.returncode}: {proc.stderr.strip()[:200]}")
    rendered = [p for p in ("fig3.svg", "fig4.svg", "fig5.svg")
                if (tmp_path / p).is_file() and (tmp_path / p).stat().st_size > 0]
    report(10, "SECONDARY", "figure scripts render the default sweeps",
           not failures and len(rendered) == 3,
           f"{len(rendered)}/3 rendered" + ("; " + "; ".join(failures)
                                            if failures else ""))
