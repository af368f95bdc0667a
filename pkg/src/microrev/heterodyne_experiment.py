"""Monte Carlo emulation of the heterodyne measurement pipeline.

A displaced thermal state seen through ideal double-homodyne detection
produces (x, p) pairs distributed as an isotropic bivariate normal: mean
(sqrt(2) Re mu, sqrt(2) Im mu), per-quadrature variance nbar + 1 (which is
exactly the Husimi Q function in quadrature coordinates, alpha =
(x + i p)/sqrt(2)).  The pipeline here mirrors the laboratory procedure:

  sample -> maximum-likelihood Gaussian fit -> evaluate the fitted density
  at the target amplitude -> bootstrap the spread.

The forward and backward runs use independent, deterministically derived
sample sets so one base seed reproduces an entire protocol bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import DegenerateData, DomainError, NumericalUnderflow
from .gaussian_core import (
    AmplitudeLike,
    ComplexAmplitude,
    DisplacedThermalState,
    TransitionQuery,
    interact,
)
from .reversibility import predicted_log_ratio

__all__ = [
    "QuadratureSample",
    "HeterodyneDataset",
    "IsotropicGaussianFit",
    "BootstrapEstimate",
    "ProtocolRun",
    "sample_heterodyne",
    "ml_fit",
    "fitted_density",
    "bootstrap",
    "run_transition_protocol",
    "estimate_log_ratio",
]

_SQRT2 = math.sqrt(2.0)

# Beyond this many fitted standard deviations the density estimate is noise.
_UNDERFLOW_SIGMAS = 8.0


@dataclass(frozen=True)
class QuadratureSample:
    x: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise DomainError("quadratures must be finite")

    def as_amplitude(self) -> ComplexAmplitude:
        return ComplexAmplitude(self.x / _SQRT2, self.p / _SQRT2)


@dataclass(frozen=True, eq=False)
class HeterodyneDataset:
    """Immutable batch of simultaneous quadrature outcomes."""

    xs: np.ndarray
    ps: np.ndarray
    seed: int
    source_state: DisplacedThermalState

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ps = np.asarray(self.ps, dtype=float)
        if xs.ndim != 1 or xs.shape != ps.shape or xs.size == 0:
            raise DomainError("xs and ps must be equal-length non-empty vectors")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ps))):
            raise DomainError("samples must be finite")
        for name, arr in (("xs", xs), ("ps", ps)):
            arr = np.ascontiguousarray(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.xs.size

    def __iter__(self) -> Iterator[QuadratureSample]:
        return (QuadratureSample(float(x), float(p))
                for x, p in zip(self.xs, self.ps))

    @property
    def samples(self) -> tuple:
        return tuple(self)


@dataclass(frozen=True)
class IsotropicGaussianFit:
    """ML parameters of the isotropic Gaussian model of one dataset."""

    mean: ComplexAmplitude
    variance: float  # per quadrature; estimates nbar + 1
    n_samples: int

    def __post_init__(self):
        if not (math.isfinite(self.variance) and self.variance > 0.0):
            raise DomainError(f"variance must be positive, got {self.variance}")
        if self.n_samples < 3:
            raise DomainError("a fit needs at least 3 samples")


@dataclass(frozen=True)
class BootstrapEstimate:
    point: float
    std_error: float
    ci_low: float
    ci_high: float
    n_resamples: int
    resample_size: int

    def __post_init__(self):
        if self.std_error < 0.0:
            raise DomainError("std_error must be >= 0")
        if not self.ci_low <= self.point <= self.ci_high:
            raise DomainError(
                f"point {self.point} outside its own interval "
                f"[{self.ci_low}, {self.ci_high}]")


def derive_seed(base_seed: int, stage: int) -> int:
    """Deterministic per-stage seed; independent of evaluation order."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(stage),))
    return int(ss.generate_state(1, np.uint64)[0])


def sample_heterodyne(state: DisplacedThermalState, n: int, seed: int) -> HeterodyneDataset:
    """n i.i.d. heterodyne outcomes of the given state; deterministic in seed."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(int(seed))
    sd = math.sqrt(state.nbar + 1.0)
    xs = rng.normal(_SQRT2 * state.mu.re, sd, size=n)
    ps = rng.normal(_SQRT2 * state.mu.im, sd, size=n)
    return HeterodyneDataset(xs=xs, ps=ps, seed=int(seed), source_state=state)


def ml_fit(data: HeterodyneDataset) -> IsotropicGaussianFit:
    """Maximum-likelihood fit of the isotropic Gaussian model.

    Sample means give the displacement; the pooled per-quadrature variance
    sigma^2 = (1/2N) sum[(x-xbar)^2 + (p-pbar)^2] estimates nbar + 1.
    """
    n = len(data)
    if n < 3:
        raise DomainError(f"need at least 3 samples to fit, got {n}")
    xbar = float(data.xs.mean())
    pbar = float(data.ps.mean())
    var = float(((data.xs - xbar) ** 2 + (data.ps - pbar) ** 2).sum() / (2.0 * n))
    if var == 0.0:
        raise DegenerateData("all samples identical; no spread to fit")
    mean = ComplexAmplitude(xbar / _SQRT2, pbar / _SQRT2)
    return IsotropicGaussianFit(mean=mean, variance=var, n_samples=n)


def _log_density(fit_mean: complex, fit_var: float, alpha: complex) -> float:
    # log of pi * Q_fit(alpha) = -|alpha - mu|^2 / sigma^2 - log sigma^2.
    d = alpha - fit_mean
    return -(d.real * d.real + d.imag * d.imag) / fit_var - math.log(fit_var)


def fitted_density(fit: IsotropicGaussianFit, alpha: AmplitudeLike) -> float:
    """pi * Q(alpha) of the fitted model; the statistical analogue of
    gaussian_core.forward_probability.

    Refuses points beyond 8 fitted standard deviations: there the fitted
    tail is pure extrapolation error.
    """
    alpha = ComplexAmplitude.coerce(alpha).as_complex()
    mu = fit.mean.as_complex()
    dist = abs(alpha - mu)
    sigma = math.sqrt(fit.variance)
    if dist > _UNDERFLOW_SIGMAS * sigma:
        raise NumericalUnderflow(
            f"evaluation point {dist / sigma:.1f} fitted sigmas from the mean; "
            f"density estimate unreliable")
    return math.exp(_log_density(mu, fit.variance, alpha))


def _resample_moments(xs: np.ndarray, ps: np.ndarray,
                      idx: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Vectorised ML refits: idx has shape (n_resamples, resample_size).
    xr = xs[idx]
    pr = ps[idx]
    xbar = xr.mean(axis=1)
    pbar = pr.mean(axis=1)
    var = 0.5 * (((xr - xbar[:, None]) ** 2).mean(axis=1)
                 + ((pr - pbar[:, None]) ** 2).mean(axis=1))
    if np.any(var == 0.0):
        raise DegenerateData("a bootstrap resample has zero spread")
    return xbar, pbar, var


def bootstrap(data: HeterodyneDataset, statistic: Callable[[IsotropicGaussianFit], float],
              n_resamples: int = 1000, resample_size: int = 1000,
              seed: int = 0) -> BootstrapEstimate:
    """Percentile bootstrap of a fit-derived statistic.

    Resamples with replacement, refits, recomputes the statistic; the CI is
    the empirical 2.5/97.5 percentile band and std_error the spread across
    resamples.  The point estimate uses the full dataset.
    """
    n = len(data)
    if not 1 <= resample_size <= n:
        raise DomainError(f"resample_size must lie in [1, {n}], got {resample_size}")
    if n_resamples < 2:
        raise DomainError(f"n_resamples must be >= 2, got {n_resamples}")
    point = float(statistic(ml_fit(data)))
    rng = np.random.default_rng(derive_seed(seed, 0))
    idx = rng.integers(0, n, size=(n_resamples, resample_size))
    xbar, pbar, var = _resample_moments(data.xs, data.ps, idx)
    stats = np.array([
        float(statistic(IsotropicGaussianFit(
            mean=ComplexAmplitude(float(xb) / _SQRT2, float(pb) / _SQRT2),
            variance=float(v), n_samples=resample_size)))
        for xb, pb, v in zip(xbar, pbar, var)
    ])
    return BootstrapEstimate(
        point=point,
        std_error=float(stats.std(ddof=1)),
        ci_low=float(np.percentile(stats, 2.5)),
        ci_high=float(np.percentile(stats, 97.5)),
        n_resamples=n_resamples,
        resample_size=resample_size,
    )


@dataclass(frozen=True)
class ProtocolRun:
    """Everything one simulated measurement campaign produced."""

    query: TransitionQuery
    n_samples: int
    base_seed: int
    forward_fit: IsotropicGaussianFit
    backward_fit: IsotropicGaussianFit
    forward_target: ComplexAmplitude
    backward_target: ComplexAmplitude
    p_fwd_density: float
    p_bwd_density: float
    estimate: BootstrapEstimate
    predicted: float


def run_transition_protocol(query: TransitionQuery, n: int, seed: int,
                            n_resamples: int = 1000, resample_size: int = 1000,
                            port: str = "transmit") -> ProtocolRun:
    """Simulate the full two-direction measurement campaign.

    Forward: prepare alpha_i, mix, fit the output field, read the fitted
    density at alpha_f.  Backward: inject the conjugated final amplitude
    shrunk by e^{-beta/2}, read at the conjugated initial amplitude grown
    by e^{+beta/2}.  (For complex amplitudes the conjugation is the stated
    phase flip of the reversed run.)  The log-ratio spread comes from a
    joint bootstrap over both independent datasets.

    Statistically meaningful results need n in the tens of thousands;
    anything >= 3 runs, just with proportionally wide intervals.
    """
    if n < 3:
        raise DomainError(f"need at least 3 samples per direction, got {n}")
    beta = query.bath.beta
    m = min(resample_size, n)

    fwd_state = interact(query.alpha_i, query.bath, query.splitter, port=port)
    fwd_target = query.alpha_f

    bwd_in = query.alpha_f.as_complex().conjugate() * math.exp(-beta / 2.0)
    bwd_state = interact(bwd_in, query.bath, query.splitter, port=port)
    z = query.alpha_i.as_complex().conjugate() * math.exp(+beta / 2.0)
    bwd_target = ComplexAmplitude(z.real, z.imag)

    ds_f = sample_heterodyne(fwd_state, n, derive_seed(seed, 0))
    ds_b = sample_heterodyne(bwd_state, n, derive_seed(seed, 1))
    fit_f = ml_fit(ds_f)
    fit_b = ml_fit(ds_b)

    dens_f = fitted_density(fit_f, fwd_target)
    dens_b = fitted_density(fit_b, bwd_target)
    point = math.log(dens_f) - math.log(dens_b)

    # Joint bootstrap: forward and backward resampled independently, one
    # log-ratio per resample pair.
    rng_f = np.random.default_rng(derive_seed(seed, 2))
    rng_b = np.random.default_rng(derive_seed(seed, 3))
    idx_f = rng_f.integers(0, n, size=(n_resamples, m))
    idx_b = rng_b.integers(0, n, size=(n_resamples, m))
    xb_f, pb_f, var_f = _resample_moments(ds_f.xs, ds_f.ps, idx_f)
    xb_b, pb_b, var_b = _resample_moments(ds_b.xs, ds_b.ps, idx_b)
    tf = fwd_target.as_complex()
    tb = bwd_target.as_complex()
    mu_f = (xb_f + 1j * pb_f) / _SQRT2
    mu_b = (xb_b + 1j * pb_b) / _SQRT2
    stats = (-(np.abs(tf - mu_f) ** 2) / var_f - np.log(var_f)
             + (np.abs(tb - mu_b) ** 2) / var_b + np.log(var_b))

    estimate = BootstrapEstimate(
        point=point,
        std_error=float(stats.std(ddof=1)),
        ci_low=float(np.percentile(stats, 2.5)),
        ci_high=float(np.percentile(stats, 97.5)),
        n_resamples=n_resamples,
        resample_size=m,
    )
    return ProtocolRun(
        query=query, n_samples=n, base_seed=int(seed),
        forward_fit=fit_f, backward_fit=fit_b,
        forward_target=fwd_target, backward_target=bwd_target,
        p_fwd_density=dens_f, p_bwd_density=dens_b,
        estimate=estimate,
        predicted=predicted_log_ratio(query.alpha_i, query.alpha_f, query.bath),
    )


def estimate_log_ratio(query: TransitionQuery, n: int, seed: int,
                       n_resamples: int = 1000, resample_size: int = 1000) -> BootstrapEstimate:
    """Statistical estimate of log(P_fwd/P_bwd) with bootstrap uncertainty."""
    return run_transition_protocol(query, n, seed,
                                   n_resamples=n_resamples,
                                   resample_size=resample_size).estimate
