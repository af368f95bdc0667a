"""Closed-form reversibility quantities for coherent-state transitions.

For an input |alpha_i> mixed with a bath of inverse temperature beta
(dimensionless, i.e. beta*hbar*omega folded into one number) and projected
onto |alpha_f>, the forward/backward probability ratio obeys

    log(P_fwd / P_bwd) = |alpha_i|^2 / n_th - |alpha_f|^2 / (n_th + 1),

independent of the splitter transmittance.  The classical counterpart of
the same ratio is -beta * Q with heat Q = |alpha_f|^2 - |alpha_i|^2, and
the quantum correction factor Upsilon that reconciles the two has the
closed form

    log Upsilon = A * (|alpha_i|^2 + |alpha_f|^2) - B * (|alpha_f|^2 - |alpha_i|^2),
    A = cosh(beta) - 1,   B = sinh(beta) - beta.

Everything is kept in log domain; Upsilon itself overflows nothing here.
Unlike the probability engines, all formulas in this module stay finite at
beta = 0, so a bare beta >= 0 is accepted wherever a BathSpec fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from . import fock_oracle
from .errors import DomainError
from .gaussian_core import AmplitudeLike, BathSpec, ComplexAmplitude, TransitionQuery

__all__ = [
    "TransitionResult",
    "RescaledPair",
    "nth_from_beta",
    "beta_from_nth",
    "gibbs_rescale_initial",
    "gibbs_rescale_final",
    "gibbs_rescale_pair",
    "predicted_log_ratio",
    "heat",
    "classical_log_ratio",
    "upsilon_closed_form",
    "exp_beta_h_expectation",
    "upsilon_from_definition",
    "upsilon_from_definition_coherent",
    "transition_result",
]

BathLike = Union[BathSpec, float]


def _beta_of(bath: BathLike) -> float:
    # Bare floats are read as beta; zero temperature-parameter is legal in
    # this module only.
    if isinstance(bath, BathSpec):
        return bath.beta
    beta = float(bath)
    if not math.isfinite(beta) or beta < 0.0:
        raise DomainError(f"beta must be finite and >= 0, got {beta}")
    return beta


def nth_from_beta(beta: float) -> float:
    """Mean occupation e^{-beta}/(1-e^{-beta}) of a mode at inverse
    temperature beta > 0."""
    beta = float(beta)
    if not math.isfinite(beta) or beta <= 0.0:
        raise DomainError(f"beta must be finite and > 0, got {beta}")
    return math.exp(-beta) / (1.0 - math.exp(-beta))


def beta_from_nth(n_th: float) -> float:
    """Inverse of nth_from_beta: beta = ln(1 + 1/n_th)."""
    n_th = float(n_th)
    if not math.isfinite(n_th) or n_th <= 0.0:
        raise DomainError(f"n_th must be finite and > 0, got {n_th}")
    return math.log1p(1.0 / n_th)


def gibbs_rescale_initial(alpha: AmplitudeLike, beta: float) -> ComplexAmplitude:
    """conj(alpha) * e^{+beta/2}: the target state of the reversed run."""
    alpha = ComplexAmplitude.coerce(alpha)
    beta = _beta_of(beta)
    g = math.exp(+beta / 2.0)
    return ComplexAmplitude(alpha.re * g, -alpha.im * g)


def gibbs_rescale_final(alpha: AmplitudeLike, beta: float) -> ComplexAmplitude:
    """conj(alpha) * e^{-beta/2}: the state injected into the reversed run."""
    alpha = ComplexAmplitude.coerce(alpha)
    beta = _beta_of(beta)
    g = math.exp(-beta / 2.0)
    return ComplexAmplitude(alpha.re * g, -alpha.im * g)


@dataclass(frozen=True)
class RescaledPair:
    """Both Gibbs-rescaled amplitudes of one transition."""

    alpha_i_tilde: ComplexAmplitude
    alpha_f_tilde: ComplexAmplitude


def gibbs_rescale_pair(alpha_i: AmplitudeLike, alpha_f: AmplitudeLike,
                       beta: float) -> RescaledPair:
    """Rescale a transition pair; the reversed run grows the initial
    amplitude and shrinks the final one (checked here)."""
    alpha_i = ComplexAmplitude.coerce(alpha_i)
    alpha_f = ComplexAmplitude.coerce(alpha_f)
    pair = RescaledPair(gibbs_rescale_initial(alpha_i, beta),
                        gibbs_rescale_final(alpha_f, beta))
    if abs(pair.alpha_i_tilde) < abs(alpha_i) or abs(pair.alpha_f_tilde) > abs(alpha_f):
        raise DomainError("rescaling must not shrink the initial amplitude "
                          "or grow the final one")
    return pair


def predicted_log_ratio(alpha_i: AmplitudeLike, alpha_f: AmplitudeLike,
                        bath: BathLike) -> float:
    """log(P_fwd/P_bwd) = |alpha_i|^2/n_th - |alpha_f|^2/(n_th+1).

    Splitter-free: the transmittance drops out of the ratio.
    """
    alpha_i = ComplexAmplitude.coerce(alpha_i)
    alpha_f = ComplexAmplitude.coerce(alpha_f)
    beta = _beta_of(bath)
    if beta == 0.0:
        # Infinite-occupation limit: both terms vanish.
        return 0.0
    n_th = nth_from_beta(beta)
    return alpha_i.abs_sq / n_th - alpha_f.abs_sq / (n_th + 1.0)


def heat(alpha_i: AmplitudeLike, alpha_f: AmplitudeLike) -> float:
    """Energy gained by the system, |alpha_f|^2 - |alpha_i|^2 (quanta)."""
    return ComplexAmplitude.coerce(alpha_f).abs_sq - ComplexAmplitude.coerce(alpha_i).abs_sq


def classical_log_ratio(alpha_i: AmplitudeLike, alpha_f: AmplitudeLike,
                        bath: BathLike) -> float:
    """Detailed-balance ratio a classical trajectory would give: -beta*Q."""
    # + 0.0 normalises the -0.0 that a zero-heat transition would produce.
    return -_beta_of(bath) * heat(alpha_i, alpha_f) + 0.0


def upsilon_closed_form(alpha_i: AmplitudeLike, alpha_f: AmplitudeLike,
                        bath: BathLike) -> float:
    """log Upsilon = (cosh b - 1)|alpha|^2_tot - (sinh b - b) d|alpha|^2.

    Nonnegative for every input: A >= B always, and A|t| >= B|d| since
    |alpha|^2_tot >= |delta alpha^2|.
    """
    alpha_i = ComplexAmplitude.coerce(alpha_i)
    alpha_f = ComplexAmplitude.coerce(alpha_f)
    beta = _beta_of(bath)
    a = math.cosh(beta) - 1.0
    b = math.sinh(beta) - beta
    tot = alpha_i.abs_sq + alpha_f.abs_sq
    delta = alpha_f.abs_sq - alpha_i.abs_sq
    return a * tot - b * delta


def exp_beta_h_expectation(alpha: AmplitudeLike, s: float) -> float:
    """Closed form <alpha|e^{s n}|alpha> = e^{|alpha|^2 (e^s - 1)}.

    Returned in the linear domain; use log_ directly for large arguments.
    The Fock oracle recomputes the same number as an audited series.
    """
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"s must be finite, got {s}")
    return math.exp(ComplexAmplitude.coerce(alpha).abs_sq * math.expm1(s))


def upsilon_from_definition(psi_i: "fock_oracle.FockKet", psi_f: "fock_oracle.FockKet",
                            bath: BathLike,
                            eps_trunc: float = fock_oracle.DEFAULT_TRUNCATION_BUDGET) -> float:
    """log Upsilon straight from its definition for arbitrary pure states:

    log<psi_i|e^{b n}|psi_i> - b<n>_i + log<psi_f|e^{-b n}|psi_f> + b<n>_f.

    Zero for energy eigenstates (no coherence to correct for); reduces to
    upsilon_closed_form when both states are coherent.
    """
    beta = _beta_of(bath)
    if beta == 0.0:
        return 0.0
    e_i = fock_oracle.exp_beta_h_expectation(psi_i, +beta, eps_trunc)
    e_f = fock_oracle.exp_beta_h_expectation(psi_f, -beta, eps_trunc)
    n_i = fock_oracle.number_expectation(psi_i)
    n_f = fock_oracle.number_expectation(psi_f)
    return math.log(e_i) - beta * n_i + math.log(e_f) + beta * n_f


def upsilon_from_definition_coherent(alpha_i: AmplitudeLike, alpha_f: AmplitudeLike,
                                     bath: BathLike) -> float:
    """Definition-route log Upsilon for coherent inputs, using the closed
    tilted expectations instead of Fock sums:

    |alpha_i|^2 (e^b - 1 - b) + |alpha_f|^2 (e^{-b} - 1 + b).

    Algebraically equal to upsilon_closed_form; evaluated with a different
    arrangement of exponentials so the two routes stay independent.
    """
    beta = _beta_of(bath)
    t_i = ComplexAmplitude.coerce(alpha_i).abs_sq
    t_f = ComplexAmplitude.coerce(alpha_f).abs_sq
    return t_i * (math.expm1(beta) - beta) + t_f * (math.expm1(-beta) + beta)


@dataclass(frozen=True)
class TransitionResult:
    """Every log-domain quantity of one evaluated transition."""

    p_fwd: float
    p_bwd: float
    log_ratio: float
    predicted_log_ratio: float
    heat: float
    classical_log_ratio: float
    log_upsilon: float
    alpha_sq_tot: float
    delta_alpha_sq: float

    def __post_init__(self):
        if self.p_fwd <= 0.0 or self.p_bwd <= 0.0:
            raise DomainError("probabilities must be positive")
        if abs(self.log_ratio - (math.log(self.p_fwd) - math.log(self.p_bwd))) > 1e-9:
            raise DomainError("log_ratio inconsistent with probabilities")
        if self.alpha_sq_tot < abs(self.delta_alpha_sq) - 1e-12:
            raise DomainError("total amplitude square below its own change")


def transition_result(query: TransitionQuery, p_fwd: float, p_bwd: float) -> TransitionResult:
    """Assemble a TransitionResult from engine probabilities plus the
    closed forms implied by the query."""
    if p_fwd <= 0.0:
        raise DomainError(f"forward probability must be positive, got {p_fwd}")
    if p_bwd <= 0.0:
        raise DomainError(f"backward probability must be positive, got {p_bwd}")
    beta = query.bath.beta
    log_ratio = math.log(p_fwd) - math.log(p_bwd)
    q = heat(query.alpha_i, query.alpha_f)
    return TransitionResult(
        p_fwd=p_fwd,
        p_bwd=p_bwd,
        log_ratio=log_ratio,
        predicted_log_ratio=predicted_log_ratio(query.alpha_i, query.alpha_f, query.bath),
        heat=q,
        classical_log_ratio=-beta * q + 0.0,
        log_upsilon=beta * q + log_ratio,
        alpha_sq_tot=query.alpha_i.abs_sq + query.alpha_f.abs_sq,
        delta_alpha_sq=q,
    )
