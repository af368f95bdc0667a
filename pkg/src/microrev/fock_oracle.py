"""Truncated Fock-space oracle for the beam-splitter interaction.

Everything here recomputes, the slow way, quantities the Gaussian engine
gets in closed form, and extends them to arbitrary (non-Gaussian) pure
inputs.  The exchange coupling conserves total photon number, so the
two-mode unitary exp(-i theta (a b^dag + a^dag b)) is built sector by
sector: within total number N the generator is a real tridiagonal matrix
with off-diagonal sqrt((k+1)(N-k)), exponentiated by eigendecomposition.
Sectors are restricted to the single-mode cutoff, which keeps every block
exactly unitary on the truncated space and keeps [U, N_total] = 0 exact.

Truncation is never silent: states carry the tail mass their cutoff
discards, and operations raise TruncationTooSmall when a requested budget
is violated instead of degrading quietly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import eval_genlaguerre, gammaln
from scipy.stats import poisson

from .errors import (
    DomainError,
    MicrorevError,
    TruncationTooSmall,
    ZeroBackwardProbability,
)
from .gaussian_core import (
    AmplitudeLike,
    BathSpec,
    ComplexAmplitude,
    TransitionQuery,
)

__all__ = [
    "DEFAULT_TRUNCATION_BUDGET",
    "FockKet",
    "FockDensity",
    "NumberBlockUnitary",
    "coherent_ket",
    "superposition_ket",
    "thermal_density",
    "displaced_thermal_density",
    "displacement_operator",
    "beam_splitter",
    "projected_transition_probability",
    "forward_probability_fock",
    "backward_probability_fock",
    "exp_beta_h_expectation",
    "number_expectation",
    "rescaled_overlap",
    "general_ratio_check",
    "fixed_point_check",
    "energy_conservation_check",
    "output_density",
    "husimi_q",
    "mean_field",
    "dim_for_coherent",
]

DEFAULT_TRUNCATION_BUDGET = 1e-10

# Hermiticity / positivity slack for density matrices assembled from
# floating-point products.
_HERM_TOL = 1e-12


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FockKet:
    """Pure state on number states 0..dim-1.

    amps holds the exact coefficients of the retained levels; trunc_deficit
    is the probability mass of the discarded tail (zero for states of
    finite support).  Coefficients are stored unnormalised so the deficit
    shows up as 1 - <psi|psi> instead of being renormalised away.
    """

    amps: np.ndarray
    trunc_deficit: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise DomainError("amps must be a 1-d array of length >= 2")
        if not np.all(np.isfinite(amps.view(float))):
            raise DomainError("amps must be finite")
        if not np.any(amps):
            raise DomainError("ket must not be identically zero")
        if not 0.0 <= self.trunc_deficit < 1.0:
            raise DomainError(f"trunc_deficit must lie in [0, 1), got {self.trunc_deficit}")
        object.__setattr__(self, "amps", _readonly(amps))

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def conjugated(self) -> "FockKet":
        """Time reversal in the number basis: conjugate every coefficient."""
        return FockKet(np.conj(self.amps), self.trunc_deficit)


@dataclass(frozen=True, eq=False)
class FockDensity:
    """Mixed state on number states 0..dim-1, validated on construction."""

    mat: np.ndarray
    trunc_deficit: float = 0.0

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
            raise DomainError("mat must be a square matrix")
        herm = np.max(np.abs(mat - mat.conj().T))
        if herm > _HERM_TOL:
            raise DomainError(f"density matrix not hermitian: defect {herm:.3e}")
        eigs = np.linalg.eigvalsh(mat)
        if eigs.min() < -_HERM_TOL:
            raise DomainError(f"density matrix not positive: min eigenvalue {eigs.min():.3e}")
        tr = float(np.trace(mat).real)
        if tr > 1.0 + _HERM_TOL:
            raise DomainError(f"trace exceeds one: {tr}")
        object.__setattr__(self, "mat", _readonly(mat))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.mat).real)


def dim_for_coherent(alpha: AmplitudeLike, eps_trunc: float = DEFAULT_TRUNCATION_BUDGET) -> int:
    """Smallest cutoff whose Poisson tail mass stays within eps_trunc."""
    lam = ComplexAmplitude.coerce(alpha).abs_sq
    if lam == 0.0:
        return 2
    dim = max(2, int(poisson.isf(eps_trunc, lam)) + 1)
    while poisson.sf(dim - 1, lam) > eps_trunc:
        dim += 1
    return dim


def coherent_ket(alpha: AmplitudeLike, dim: int,
                 eps_trunc: float = DEFAULT_TRUNCATION_BUDGET) -> FockKet:
    """Coherent state truncated at dim levels.

    c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built by recurrence.  Raises
    TruncationTooSmall when the discarded Poisson tail exceeds eps_trunc.
    """
    alpha = ComplexAmplitude.coerce(alpha)
    if dim < 2:
        raise DomainError(f"dim must be >= 2, got {dim}")
    lam = alpha.abs_sq
    tail = float(poisson.sf(dim - 1, lam)) if lam > 0.0 else 0.0
    if tail > eps_trunc:
        raise TruncationTooSmall(
            f"coherent state |alpha|^2={lam:.6g} keeps tail {tail:.3e} beyond "
            f"cutoff {dim}, budget {eps_trunc:.3e}",
            tail_mass=tail, budget=eps_trunc)
    amps = np.zeros(dim, dtype=complex)
    amps[0] = math.exp(-lam / 2.0)
    z = alpha.as_complex()
    for n in range(1, dim):
        amps[n] = amps[n - 1] * z / math.sqrt(n)
    return FockKet(amps, trunc_deficit=tail)


def superposition_ket(coeffs: Sequence[complex] | dict, dim: int | None = None) -> FockKet:
    """Normalised finite superposition of number states.

    coeffs is either a sequence c_0..c_k or a {level: coefficient} dict.
    Exact support, so the truncation deficit is zero.
    """
    if isinstance(coeffs, dict):
        if not coeffs:
            raise DomainError("empty superposition")
        top = max(coeffs)
        if top < 0 or any(k < 0 for k in coeffs):
            raise DomainError("levels must be >= 0")
        amps = np.zeros(max(dim or 0, top + 1, 2), dtype=complex)
        for k, c in coeffs.items():
            amps[k] = c
    else:
        amps = np.asarray(list(coeffs), dtype=complex)
        want = max(dim or 0, amps.size, 2)
        if want > amps.size:
            amps = np.concatenate([amps, np.zeros(want - amps.size, complex)])
    nrm = np.linalg.norm(amps)
    if nrm == 0.0:
        raise DomainError("superposition has zero norm")
    return FockKet(amps / nrm, trunc_deficit=0.0)


def _geometric_weights(n_th: float, dim: int) -> tuple[np.ndarray, float]:
    # Truncated thermal weights p_n proportional to q^n, renormalised to sum
    # to one over the retained levels.  The raw tail mass q^dim is returned
    # alongside for budget checks; renormalising (rather than leaving the
    # trace deficient) keeps transition probabilities accurate to O(tail)
    # relative instead of O(tail) absolute.
    if n_th < 0.0:
        raise DomainError(f"n_th must be >= 0, got {n_th}")
    if n_th == 0.0:
        w = np.zeros(dim)
        w[0] = 1.0
        return w, 0.0
    q = n_th / (n_th + 1.0)
    w = np.power(q, np.arange(dim)) / (n_th + 1.0)
    return w / w.sum(), q ** dim


def thermal_density(bath: BathSpec, dim: int,
                    eps_trunc: float = DEFAULT_TRUNCATION_BUDGET) -> FockDensity:
    """Truncated thermal state; diagonal geometric weights."""
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")
    w, tail = _geometric_weights(bath.n_th, dim)
    if tail > eps_trunc:
        raise TruncationTooSmall(
            f"thermal state n_th={bath.n_th:.6g} keeps tail {tail:.3e} beyond "
            f"cutoff {dim}, budget {eps_trunc:.3e}",
            tail_mass=tail, budget=eps_trunc)
    return FockDensity(np.diag(w.astype(complex)), trunc_deficit=tail)


@dataclass(frozen=True, eq=False)
class NumberBlockUnitary:
    """exp(-i theta (a b^dag + a^dag b)) stored as one block per total
    photon number N, each restricted to levels < dim on both modes."""

    theta: float
    dim: int
    blocks: tuple = field(repr=False)
    unitarity_defect: float = 0.0

    def sector_lo(self, total: int) -> int:
        """Lowest system level appearing in sector N = total."""
        return max(0, total - (self.dim - 1))

    @property
    def n_sectors(self) -> int:
        return 2 * (self.dim - 1) + 1

    def as_dense(self) -> np.ndarray:
        """Assemble the full dim^2 x dim^2 matrix (row-major |n_a, n_b>).

        Intended for small-dimension cross-checks only.
        """
        if self.dim > 32:
            raise DomainError("dense assembly limited to dim <= 32")
        D = self.dim
        U = np.zeros((D * D, D * D), dtype=complex)
        for N, block in enumerate(self.blocks):
            lo = self.sector_lo(N)
            na = np.arange(lo, lo + block.shape[0])
            idx = na * D + (N - na)
            U[np.ix_(idx, idx)] = block
        return U


@lru_cache(maxsize=16)
def _mixing_blocks(theta: float, sys_dim: int, bath_dim: int) -> tuple:
    """Per-sector mixing blocks on the rectangle n_a < sys_dim, n_b < bath_dim.

    Sector N covers system levels n_a in [max(0, N-bath_dim+1), min(N, sys_dim-1)].
    Returns (blocks, max unitarity defect).
    """
    blocks = []
    defect = 0.0
    for N in range(sys_dim + bath_dim - 1):
        lo = max(0, N - (bath_dim - 1))
        hi = min(N, sys_dim - 1)
        na = np.arange(lo, hi + 1)
        d = na.size
        if d == 1:
            blocks.append(_readonly(np.ones((1, 1), dtype=complex)))
            continue
        # Generator restricted to this sector: tridiagonal with zeros on the
        # diagonal and sqrt((n_a+1)(N-n_a)) off it.
        off = np.sqrt((na[:-1] + 1.0) * (N - na[:-1]))
        w, v = eigh_tridiagonal(np.zeros(d), off)
        block = (v * np.exp(-1j * theta * w)) @ v.T
        gram = block.conj().T @ block
        defect = max(defect, float(np.max(np.abs(gram - np.eye(d)))))
        blocks.append(_readonly(block))
    if defect > 1e-12:
        raise MicrorevError(f"beam splitter block lost unitarity: defect {defect:.3e}")
    return tuple(blocks), defect


def _beam_splitter_cached(theta: float, dim: int) -> NumberBlockUnitary:
    blocks, defect = _mixing_blocks(theta, dim, dim)
    return NumberBlockUnitary(theta=float(theta), dim=dim, blocks=blocks,
                              unitarity_defect=defect)


def beam_splitter(theta: float, dim: int) -> NumberBlockUnitary:
    """Sector-blocked two-mode mixing unitary at interaction angle theta."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise DomainError(f"theta must be finite, got {theta}")
    if dim < 2:
        raise DomainError(f"dim must be >= 2, got {dim}")
    return _beam_splitter_cached(theta, dim)


_MAX_BATH_DIM = 4096


def _transition(theta: float, amps_in: np.ndarray, bath_weights: np.ndarray,
                amps_out: np.ndarray) -> float:
    # P = sum_{b,m} p_m |<out, b| U |in, m>|^2.  The bracket for fixed (b, m)
    # collects one term from every sector N = n_a + b, so the scatter below
    # accumulates.
    bath_dim = bath_weights.size
    blocks, _ = _mixing_blocks(theta, amps_in.size, bath_dim)
    A = np.zeros((bath_dim, bath_dim), dtype=complex)
    for N, block in enumerate(blocks):
        lo = max(0, N - (bath_dim - 1))
        na = np.arange(lo, lo + block.shape[0])
        W = amps_out[na].conj()[:, None] * block * amps_in[na][None, :]
        idx = N - na
        A[np.ix_(idx, idx)] += W
    return float(((np.abs(A) ** 2) @ bath_weights).sum())


def projected_transition_probability(unitary: NumberBlockUnitary, input_ket: FockKet,
                                     bath: BathSpec, projector_ket: FockKet) -> float:
    """Probability of finding projector_ket in the system output when
    input_ket is mixed with a thermal bath through the given unitary.

    The bath register shares the unitary's cutoff, so accuracy is limited by
    the thermal tail there; the transition-query routines below instead size
    the bath register themselves.
    """
    if input_ket.dim != unitary.dim or projector_ket.dim != unitary.dim:
        raise DomainError("kets and unitary must share one cutoff")
    w, _ = _geometric_weights(bath.n_th, unitary.dim)
    return _transition(unitary.theta, input_ket.amps, w, projector_ket.amps)


def _bath_register(n_th: float, sys_dim: int, eps_trunc: float) -> np.ndarray:
    """Thermal weights on a register wide enough that neither the geometric
    tail nor sector-boundary reflection exceeds the budget.

    Sectors up to N = 2(sys_dim - 1) must keep their full system range, so
    the register spans at least twice the system cutoff; a hot bath may need
    more before its own tail fits.
    """
    bath_dim = 2 * sys_dim - 1
    if n_th > 0.0:
        q = n_th / (n_th + 1.0)
        bath_dim = max(bath_dim, math.ceil(math.log(eps_trunc) / math.log(q)))
        if bath_dim > _MAX_BATH_DIM:
            raise TruncationTooSmall(
                f"thermal port n_th={n_th:.6g} needs a bath register of "
                f"{bath_dim} levels for budget {eps_trunc:.3e}; limit is "
                f"{_MAX_BATH_DIM}",
                tail_mass=q ** _MAX_BATH_DIM, budget=eps_trunc)
    w, tail = _geometric_weights(n_th, bath_dim)
    if tail > eps_trunc:
        raise TruncationTooSmall(
            f"thermal port n_th={n_th:.6g} keeps tail {tail:.3e} beyond "
            f"register {bath_dim}, budget {eps_trunc:.3e}",
            tail_mass=tail, budget=eps_trunc)
    return w


def forward_probability_fock(query: TransitionQuery, dim: int,
                             eps_trunc: float = DEFAULT_TRUNCATION_BUDGET) -> float:
    """Slow-route forward transition probability; matches the Gaussian
    engine up to declared truncation error.

    dim truncates the system mode; the bath register is sized internally."""
    ci = coherent_ket(query.alpha_i, dim, eps_trunc)
    cf = coherent_ket(query.alpha_f, dim, eps_trunc)
    w = _bath_register(query.bath.n_th, dim, eps_trunc)
    return _transition(query.splitter.theta, ci.amps, w, cf.amps)


def backward_probability_fock(query: TransitionQuery, dim: int,
                              eps_trunc: float = DEFAULT_TRUNCATION_BUDGET) -> float:
    """Slow-route backward probability: conjugate both amplitudes, rescale
    the injected one by e^{-beta/2} and the projected one by e^{+beta/2}.

    The grown amplitude dominates the cutoff requirement; expect to need a
    larger dim (or looser budget) than the forward direction.
    """
    beta = query.bath.beta
    a_in = query.alpha_f.as_complex().conjugate() * math.exp(-beta / 2.0)
    a_out = query.alpha_i.as_complex().conjugate() * math.exp(+beta / 2.0)
    ci = coherent_ket(a_in, dim, eps_trunc)
    cf = coherent_ket(a_out, dim, eps_trunc)
    w = _bath_register(query.bath.n_th, dim, eps_trunc)
    return _transition(query.splitter.theta, ci.amps, w, cf.amps)


def number_expectation(psi: FockKet) -> float:
    """<n> of the (normalised) retained state."""
    w = np.abs(psi.amps) ** 2
    return float((w * np.arange(psi.dim)).sum() / w.sum())


def exp_beta_h_expectation(psi: FockKet, s: float,
                           eps_trunc: float = DEFAULT_TRUNCATION_BUDGET) -> float:
    """sum_n |psi_n|^2 e^{s n}, i.e. <psi|e^{s n}|psi>, with a loud tail audit.

    For s <= 0 the discarded tail is bounded by the ket's own deficit.  For
    s > 0 the retained top of the distribution must still be decaying; the
    remainder is then bounded by a geometric extrapolation of the last two
    weights.  Either bound exceeding eps_trunc (relative) raises
    TruncationTooSmall.
    """
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"s must be finite, got {s}")
    n = np.arange(psi.dim)
    w = (np.abs(psi.amps) ** 2) * np.exp(s * n)
    total = float(w.sum())
    if s <= 0.0:
        tail = psi.trunc_deficit * math.exp(s * psi.dim)
        if tail > eps_trunc * total:
            raise TruncationTooSmall(
                f"tilted sum discards up to {tail:.3e} of {total:.6g}",
                tail_mass=tail, budget=eps_trunc * total)
        return total
    if psi.trunc_deficit == 0.0:
        # Zero deficit declares the ket complete, so the sum is exact even
        # when the support reaches the top retained level.
        return total
    if w[-2] <= 0.0 or w[-1] >= w[-2]:
        raise TruncationTooSmall(
            f"tilted weights not decaying at cutoff {psi.dim}; cannot certify the tail",
            tail_mass=math.inf, budget=eps_trunc * total)
    r = float(w[-1] / w[-2])
    tail = float(w[-1]) * r / (1.0 - r)
    if tail > eps_trunc * total:
        raise TruncationTooSmall(
            f"tilted sum tail estimate {tail:.3e} exceeds budget "
            f"{eps_trunc * total:.3e} at cutoff {psi.dim}",
            tail_mass=tail, budget=eps_trunc * total)
    return total


def rescaled_overlap(alpha: AmplitudeLike, s: float, dim: int | None = None,
                     eps_trunc: float = DEFAULT_TRUNCATION_BUDGET) -> complex:
    """<alpha | alpha e^{s/2}> summed in the number basis.

    Equals exp(-(|alpha|^2/2)(e^{s/2}-1)^2) in closed form; computing the
    series keeps this an independent check.  The cutoff defaults to whatever
    covers both amplitudes within eps_trunc.
    """
    alpha = ComplexAmplitude.coerce(alpha)
    scaled = alpha.as_complex() * math.exp(s / 2.0)
    if dim is None:
        dim = max(dim_for_coherent(alpha, eps_trunc),
                  dim_for_coherent(scaled, eps_trunc))
    a = coherent_ket(alpha, dim, eps_trunc)
    b = coherent_ket(scaled, dim, eps_trunc)
    return complex(np.vdot(a.amps, b.amps))


def _tilted_ket(psi: FockKet, s: float) -> FockKet:
    amps = np.conj(psi.amps) * np.exp(s * np.arange(psi.dim) / 2.0)
    nrm = np.linalg.norm(amps)
    if nrm == 0.0:
        raise DomainError("tilted ket has zero norm")
    return FockKet(amps / nrm, trunc_deficit=psi.trunc_deficit)


def _padded(psi: FockKet, dim: int) -> FockKet:
    if psi.dim > dim:
        raise DomainError(f"ket support {psi.dim} exceeds requested cutoff {dim}")
    if psi.dim == dim:
        return psi
    amps = np.concatenate([psi.amps, np.zeros(dim - psi.dim, complex)])
    return FockKet(amps, psi.trunc_deficit)


def general_ratio_check(psi_i: FockKet, psi_f: FockKet, bath: BathSpec, theta: float,
                        dim: int, eps_trunc: float = DEFAULT_TRUNCATION_BUDGET
                        ) -> tuple[float, float]:
    """Detailed-balance check for arbitrary pure inputs.

    Returns (lhs, rhs) where lhs = P_fwd / P_bwd for the transition
    psi_i -> psi_f through a bath port, and rhs is the closed-form value
    <psi_i|e^{beta n}|psi_i> * <psi_f|e^{-beta n}|psi_f>.  The two agree up
    to truncation error for any pure states, coherent or not.
    """
    psi_i = _padded(psi_i, dim)
    psi_f = _padded(psi_f, dim)
    beta = bath.beta
    e_i = exp_beta_h_expectation(psi_i, +beta, eps_trunc)
    e_f = exp_beta_h_expectation(psi_f, -beta, eps_trunc)
    w = _bath_register(bath.n_th, dim, eps_trunc)
    p_fwd = _transition(theta, psi_i.amps, w, psi_f.amps)
    p_bwd = _transition(theta, _tilted_ket(psi_f, -beta).amps, w,
                        _tilted_ket(psi_i, +beta).amps)
    if p_bwd == 0.0:
        raise ZeroBackwardProbability(
            "backward probability underflowed to zero; ratio undefined")
    return p_fwd / p_bwd, e_i * e_f


def fixed_point_check(bath: BathSpec, theta: float, dim: int) -> float:
    """Trace distance between rho_eq (x) rho_th and its image under the
    mixing unitary, both truncated at dim.

    The joint weights are constant within each total-number sector, so the
    state is proportional to the identity there and the distance is zero up
    to rounding.
    """
    w, _ = _geometric_weights(bath.n_th, dim)
    unitary = beam_splitter(theta, dim)
    dist = 0.0
    for N, block in enumerate(unitary.blocks):
        lo = unitary.sector_lo(N)
        na = np.arange(lo, lo + block.shape[0])
        sector = np.diag((w[na] * w[N - na]).astype(complex))
        evolved = block @ sector @ block.conj().T
        dist += 0.5 * float(np.abs(np.linalg.eigvalsh(evolved - sector)).sum())
    return dist


def energy_conservation_check(theta: float, dim: int) -> float:
    """Max-entry norm of [U, N_total] on the truncated two-mode space."""
    unitary = beam_splitter(theta, dim)
    U = unitary.as_dense()
    D = unitary.dim
    totals = (np.arange(D)[:, None] + np.arange(D)[None, :]).reshape(-1).astype(float)
    comm = U * totals[None, :] - totals[:, None] * U
    return float(np.max(np.abs(comm)))


def displacement_operator(alpha: AmplitudeLike, dim: int) -> np.ndarray:
    """Matrix elements of D(alpha) on the truncated space.

    <m|D|n> = sqrt(n!/m!) alpha^{m-n} e^{-|alpha|^2/2} L_n^{(m-n)}(|alpha|^2)
    for m >= n, the remaining triangle by D(alpha)^dag = D(-alpha).
    """
    z = ComplexAmplitude.coerce(alpha).as_complex()
    x = abs(z) ** 2
    gauss = math.exp(-x / 2.0)
    out = np.zeros((dim, dim), dtype=complex)
    for m in range(dim):
        for n in range(m + 1):
            d = m - n
            pref = math.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)))
            lag = float(eval_genlaguerre(n, d, x))
            out[m, n] = pref * (z ** d) * lag * gauss
            if d:
                out[n, m] = pref * ((-z.conjugate()) ** d) * lag * gauss
    return out


def displaced_thermal_density(mu: AmplitudeLike, nbar: float, dim: int,
                              eps_trunc: float = DEFAULT_TRUNCATION_BUDGET) -> FockDensity:
    """D(mu) rho_th(nbar) D(mu)^dag on the truncated space.

    Raises TruncationTooSmall when the assembled trace falls short of one
    by more than eps_trunc (displacement pushes mass past the cutoff).
    """
    if nbar < 0.0:
        raise DomainError(f"nbar must be >= 0, got {nbar}")
    w, _ = _geometric_weights(nbar, dim)
    disp = displacement_operator(mu, dim)
    mat = (disp * w[None, :]) @ disp.conj().T
    mat = 0.5 * (mat + mat.conj().T)
    deficit = 1.0 - float(np.trace(mat).real)
    if deficit > eps_trunc:
        raise TruncationTooSmall(
            f"displaced thermal state loses {deficit:.3e} of its trace at "
            f"cutoff {dim}, budget {eps_trunc:.3e}",
            tail_mass=deficit, budget=eps_trunc)
    return FockDensity(mat, trunc_deficit=max(deficit, 0.0))


def output_density(input_ket: FockKet, n_th: float, theta: float,
                   eps_trunc: float = DEFAULT_TRUNCATION_BUDGET) -> FockDensity:
    """Reduced state of the surviving mode after mixing with a thermal (or,
    at n_th = 0, vacuum) port."""
    dim = input_ket.dim
    w, tail = _geometric_weights(n_th, dim)
    if tail > eps_trunc:
        raise TruncationTooSmall(
            f"thermal port keeps tail {tail:.3e} beyond cutoff {dim}",
            tail_mass=tail, budget=eps_trunc)
    unitary = beam_splitter(theta, dim)
    amps = input_ket.amps
    rho = np.zeros((dim, dim), dtype=complex)
    for m in range(dim):
        column = np.zeros((dim, dim), dtype=complex)  # [n_a, n_b] amplitudes
        for N in range(m, m + dim):
            block = unitary.blocks[N]
            lo = unitary.sector_lo(N)
            na = np.arange(lo, lo + block.shape[0])
            col = block[:, (N - m) - lo] * amps[N - m]
            column[na, N - na] += col
        rho += w[m] * (column @ column.conj().T)
    rho = 0.5 * (rho + rho.conj().T)
    deficit = 1.0 - float(np.trace(rho).real)
    return FockDensity(rho, trunc_deficit=max(deficit, 0.0))


def husimi_q(rho: FockDensity, alpha: AmplitudeLike,
             eps_trunc: float = 1e-6) -> float:
    """(1/pi) <alpha| rho |alpha> via the truncated coherent ket."""
    c = coherent_ket(alpha, rho.dim, eps_trunc).amps
    return float(np.vdot(c, rho.mat @ c).real / math.pi)


def mean_field(rho: FockDensity) -> complex:
    """Tr[rho a]: the mean complex amplitude of a density matrix."""
    n = np.arange(1, rho.dim)
    # Tr[rho a] = sum_n sqrt(n) rho[n, n-1]
    return complex((np.sqrt(n) * rho.mat[n, n - 1]).sum())
