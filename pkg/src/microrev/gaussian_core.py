"""Closed-form engine for coherent states mixed with thermal light.

A coherent state |alpha> entering a beam splitter whose other port carries
thermal light of mean occupation n_th leaves (after tracing out the bath
port) in a displaced thermal state: mean field c*alpha with |c|^2 = tau and
thermal part nbar = (1 - tau) * n_th.  Its Husimi Q function is an isotropic
Gaussian

    Q(alpha) = exp(-|alpha - mu|^2 / (nbar + 1)) / (pi * (nbar + 1)),

and pi * Q(alpha_f) is the probability density of a transition to |alpha_f>
as resolved by double homodyne / heterodyne detection.  Everything in this
module is exact arithmetic on those closed forms; the Fock-space oracle
reproduces the same numbers the slow way.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError

__all__ = [
    "ComplexAmplitude",
    "BathSpec",
    "BeamSplitterSpec",
    "DisplacedThermalState",
    "TransitionQuery",
    "interact",
    "q_function",
    "forward_probability",
    "backward_probability",
]

# Mean-field / thermal-occupation consistency is enforced this tightly so a
# bath spec can be round-tripped through either parameter without drifting.
_CONSISTENCY_TOL = 1e-12

AmplitudeLike = Union["ComplexAmplitude", complex, float, int]


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ComplexAmplitude:
    """A phase-space point / coherent amplitude, kept as two finite floats."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "re", _require_finite("re", self.re))
        object.__setattr__(self, "im", _require_finite("im", self.im))

    @classmethod
    def coerce(cls, value: AmplitudeLike) -> "ComplexAmplitude":
        """Accept a ComplexAmplitude, complex, or real number."""
        if isinstance(value, ComplexAmplitude):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        return cls(float(value), 0.0)

    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    @property
    def abs_sq(self) -> float:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)


def _nth_from_beta(beta: float) -> float:
    return math.exp(-beta) / (1.0 - math.exp(-beta))


def _beta_from_nth(n_th: float) -> float:
    return math.log(1.0 + 1.0 / n_th)


@dataclass(frozen=True)
class BathSpec:
    """Thermal occupation of the auxiliary port.

    Stores both the mean photon number n_th and the dimensionless inverse
    temperature beta = ln(1 + 1/n_th); the pair must agree to 1e-12 relative.
    Only strictly positive, finite occupations are representable.
    """

    n_th: float
    beta: float

    def __post_init__(self):
        n_th = _require_finite("n_th", self.n_th)
        beta = _require_finite("beta", self.beta)
        if n_th <= 0.0:
            raise DomainError(f"n_th must be > 0, got {n_th}")
        if beta <= 0.0:
            raise DomainError(f"beta must be > 0, got {beta}")
        implied = _nth_from_beta(beta)
        if abs(implied - n_th) > _CONSISTENCY_TOL * max(1.0, abs(n_th)):
            raise DomainError(
                f"inconsistent bath: beta={beta} implies n_th={implied}, got {n_th}"
            )
        object.__setattr__(self, "n_th", n_th)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_nth(cls, n_th: float) -> "BathSpec":
        n_th = _require_finite("n_th", n_th)
        if n_th <= 0.0:
            raise DomainError(f"n_th must be > 0, got {n_th}")
        return cls(n_th=n_th, beta=_beta_from_nth(n_th))

    @classmethod
    def from_beta(cls, beta: float) -> "BathSpec":
        beta = _require_finite("beta", beta)
        if beta <= 0.0:
            raise DomainError(f"beta must be > 0, got {beta}")
        return cls(n_th=_nth_from_beta(beta), beta=beta)


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Beam splitter of transmittance tau = cos(theta)^2.

    tau = 1 - R where R is the reflectance into the bath port.  theta is the
    interaction angle of the exchange coupling; tau and theta must agree.
    """

    tau: float
    theta: float

    def __post_init__(self):
        tau = _require_finite("tau", self.tau)
        theta = _require_finite("theta", self.theta)
        if not 0.0 < tau < 1.0:
            raise DomainError(f"tau must lie strictly between 0 and 1, got {tau}")
        if not 0.0 < theta < math.pi / 2.0:
            raise DomainError(f"theta must lie strictly inside (0, pi/2), got {theta}")
        if abs(math.cos(theta) ** 2 - tau) > _CONSISTENCY_TOL:
            raise DomainError(
                f"inconsistent beam splitter: theta={theta} implies "
                f"tau={math.cos(theta) ** 2}, got {tau}"
            )
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_tau(cls, tau: float) -> "BeamSplitterSpec":
        tau = _require_finite("tau", tau)
        if not 0.0 < tau < 1.0:
            raise DomainError(f"tau must lie strictly between 0 and 1, got {tau}")
        return cls(tau=tau, theta=math.acos(math.sqrt(tau)))

    @classmethod
    def from_theta(cls, theta: float) -> "BeamSplitterSpec":
        theta = _require_finite("theta", theta)
        if not 0.0 < theta < math.pi / 2.0:
            raise DomainError(f"theta must lie strictly inside (0, pi/2), got {theta}")
        return cls(tau=math.cos(theta) ** 2, theta=theta)


@dataclass(frozen=True)
class DisplacedThermalState:
    """Thermal state of mean occupation nbar displaced to mean field mu."""

    mu: ComplexAmplitude
    nbar: float

    def __post_init__(self):
        object.__setattr__(self, "mu", ComplexAmplitude.coerce(self.mu))
        nbar = _require_finite("nbar", self.nbar)
        if nbar < 0.0:
            raise DomainError(f"nbar must be >= 0, got {nbar}")
        object.__setattr__(self, "nbar", nbar)

    @property
    def mean_photon(self) -> float:
        return self.mu.abs_sq + self.nbar


@dataclass(frozen=True)
class TransitionQuery:
    """One coherent-to-coherent transition alpha_i -> alpha_f through a bath."""

    alpha_i: ComplexAmplitude
    alpha_f: ComplexAmplitude
    bath: BathSpec
    splitter: BeamSplitterSpec

    def __post_init__(self):
        object.__setattr__(self, "alpha_i", ComplexAmplitude.coerce(self.alpha_i))
        object.__setattr__(self, "alpha_f", ComplexAmplitude.coerce(self.alpha_f))
        if not isinstance(self.bath, BathSpec):
            raise DomainError("bath must be a BathSpec")
        if not isinstance(self.splitter, BeamSplitterSpec):
            raise DomainError("splitter must be a BeamSplitterSpec")


def _coupling(splitter: BeamSplitterSpec, port: str) -> complex:
    # "transmit": keep the system beam, c = cos(theta).  "reflect": follow
    # the beam into the other output, c = -i sin(theta).  |c|^2 differs but
    # every reversibility ratio is independent of this choice.
    if port == "transmit":
        return complex(math.cos(splitter.theta), 0.0)
    if port == "reflect":
        return complex(0.0, -math.sin(splitter.theta))
    raise DomainError(f"port must be 'transmit' or 'reflect', got {port!r}")


def interact(alpha_in: AmplitudeLike, bath: BathSpec,
             splitter: BeamSplitterSpec, port: str = "transmit") -> DisplacedThermalState:
    """Mix alpha_in with the thermal port; return the surviving mode's state.

    The mean field picks up the coupling amplitude c (sqrt(tau) for the
    transmitted beam) and the thermal part is what leaks in from the bath:
    nbar = (1 - |c|^2) * n_th.
    """
    alpha = ComplexAmplitude.coerce(alpha_in)
    c = _coupling(splitter, port)
    mu = c * alpha.as_complex()
    nbar = (1.0 - abs(c) ** 2) * bath.n_th
    return DisplacedThermalState(mu=ComplexAmplitude(mu.real, mu.imag), nbar=nbar)


def q_function(state: DisplacedThermalState, alpha: AmplitudeLike) -> float:
    """Husimi Q of a displaced thermal state at the point alpha.

    Q(alpha) = exp(-|alpha - mu|^2/(nbar+1)) / (pi (nbar+1)); normalised so
    that integral Q d^2alpha = 1, hence 0 < pi*Q <= 1 everywhere.
    """
    alpha = ComplexAmplitude.coerce(alpha)
    d = alpha.as_complex() - state.mu.as_complex()
    width = state.nbar + 1.0
    return math.exp(-(d.real * d.real + d.imag * d.imag) / width) / (math.pi * width)


def forward_probability(query: TransitionQuery, port: str = "transmit") -> float:
    """Probability density (per unit pi) of measuring alpha_f after the
    interaction that started from alpha_i."""
    out = interact(query.alpha_i, query.bath, query.splitter, port=port)
    return math.pi * q_function(out, query.alpha_f)


def _reverse_initial(alpha: ComplexAmplitude, beta: float) -> complex:
    # Time-reversed *input* of the backward process: conjugate (time
    # reversal) then shrink by e^{-beta/2} (the Gibbs-rescaled final state
    # is fed back in).
    return alpha.as_complex().conjugate() * math.exp(-beta / 2.0)


def _reverse_target(alpha: ComplexAmplitude, beta: float) -> complex:
    # Target of the backward process: conjugated initial state grown by
    # e^{+beta/2}.
    return alpha.as_complex().conjugate() * math.exp(+beta / 2.0)


def backward_probability(query: TransitionQuery, port: str = "transmit") -> float:
    """Probability density of the time-reversed transition.

    Runs the same interaction on the conjugated, Gibbs-rescaled final state
    and reads the Q function at the conjugated, inversely rescaled initial
    state.  The ratio forward/backward then depends only on |alpha_i|,
    |alpha_f| and the bath temperature, not on the splitter.
    """
    beta = query.bath.beta
    rev_in = _reverse_initial(query.alpha_f, beta)
    rev_target = _reverse_target(query.alpha_i, beta)
    out = interact(rev_in, query.bath, query.splitter, port=port)
    return math.pi * q_function(out, rev_target)
