"""Decoupling error, its Monte Carlo estimation, and the one-shot bounds.

The decoupling error of a channel T acting on the A part of rho_AE is the
Haar average over unitaries U on A of D(T(U rho U*) || omega_C x rho_E),
with omega_C = T(I_A/|A|).  Everything is in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .channels import Channel, apply_channel, partial_trace_channel
from .condentropy import EntropyKind, cond_entropy
from .divergences import _log2_on_support, sandwiched_renyi, support_contained, umegaki
from .linalg import (
    distinct_eigenvalue_count,
    partial_trace,
    positive_part_trace,
    tensor,
)
from .states import State, haar_unitary, make_rng

LN2 = math.log(2.0)


def prefactor(s: float) -> float:
    """c_s = s^s (1-s)^(1-s), with the continuous limits at the endpoints."""
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    if s == 1.0:
        return 1.0
    return math.exp(s * math.log(s) + (1.0 - s) * math.log(1.0 - s))


@dataclass(frozen=True)
class DecouplingInstance:
    """A state rho_AE together with the decoupling channel on A."""

    rho_ae: State
    channel: Channel

    def __post_init__(self):
        if tuple(self.rho_ae.labels) != ("A", "E"):
            raise ValueError("rho_ae must carry labels ('A', 'E')")
        if self.rho_ae.dim_of("A") != self.channel.din:
            raise ValueError("channel input dimension does not match subsystem A")

    @property
    def dim_a(self) -> int:
        return self.rho_ae.dim_of("A")

    @property
    def omega_c(self) -> np.ndarray:
        """Channel output on the maximally mixed input."""
        return self.channel.output_of_max_mixed()

    @property
    def rho_e(self) -> np.ndarray:
        return self.rho_ae.marginal("E").density


def standard_instance(rho_ae: State, d_a1: int, d_a2: int) -> DecouplingInstance:
    """Standard decoupling: trace out a d_a2-dimensional factor of A."""
    if d_a1 * d_a2 != rho_ae.dim_of("A"):
        raise ValueError("d_a1 * d_a2 must equal |A|")
    return DecouplingInstance(rho_ae, partial_trace_channel(d_a1, d_a2))


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean and error of the decoupling error over Haar draws."""

    mean: float
    stderr: float
    n_samples: int
    seed: int
    n_infinite: int = field(default=0)
    per_sample: tuple[float, ...] | None = field(default=None)

    @property
    def is_finite(self) -> bool:
        return self.n_infinite == 0


def decoupling_error_sample(inst: DecouplingInstance, u: np.ndarray) -> float:
    """D(T(U rho_AE U*) || omega_C x rho_E) for one unitary on A."""
    da = inst.dim_a
    de = inst.rho_ae.dim_of("E")
    big = tensor(u, np.eye(de))
    rotated = State(big @ inst.rho_ae.density @ big.conj().T, inst.rho_ae.dims)
    out = apply_channel(inst.channel, rotated, "A")
    target = tensor(inst.omega_c, inst.rho_e)
    return umegaki(out.density, target)


def mc_decoupling_error(
    inst: DecouplingInstance,
    n_samples: int = 500,
    seed: int = 0,
    keep_samples: bool = False,
) -> MCEstimate:
    """Monte Carlo estimate of the Haar-averaged decoupling error.

    Infinite samples (support violations of single draws) are counted and
    surfaced through ``n_infinite`` rather than dropped; the mean and
    stderr are then reported over the finite samples only.
    """
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    rng = make_rng(seed)
    vals = np.empty(n_samples)
    n_inf = 0
    for i in range(n_samples):
        v = decoupling_error_sample(inst, haar_unitary(inst.dim_a, rng))
        if math.isinf(v):
            n_inf += 1
            vals[i] = np.nan
        else:
            vals[i] = v
    finite = vals[~np.isnan(vals)]
    if len(finite) >= 2:
        mean = float(np.mean(finite))
        stderr = float(np.std(finite, ddof=1) / math.sqrt(len(finite)))
    else:
        mean, stderr = math.inf, math.inf
    return MCEstimate(
        mean=mean,
        stderr=stderr,
        n_samples=n_samples,
        seed=seed,
        n_infinite=n_inf,
        per_sample=tuple(vals) if keep_samples else None,
    )


def _entropy_sum(inst: DecouplingInstance, s: float) -> float:
    """H_{1+s}(A|E)_rho + H_{1+s}(A'|C)_omega, sandwiched, non-optimized."""
    kind = EntropyKind("sandwiched", 1.0 + s)
    h_ae = cond_entropy(inst.rho_ae, ["A"], ["E"], kind)
    omega = inst.channel.choi_state(("Ain", "C"))
    h_ac = cond_entropy(omega, ["Ain"], ["C"], kind)
    return h_ae + h_ac


def decoupling_error_upper_bound(inst: DecouplingInstance, s: float) -> float:
    """One-shot upper bound (c_s/s) * 2^(-s * (H(A|E) + H(A'|C))) at fixed s."""
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    return (prefactor(s) / s) * 2.0 ** (-s * _entropy_sum(inst, s))


def decoupling_error_upper_bound_optimized(
    inst: DecouplingInstance, s_min: float = 1e-4
) -> tuple[float, float]:
    """Minimum of the one-shot upper bound over s in (0, 1]; returns (bound, s*)."""
    grid = np.geomspace(s_min, 1.0, 48)
    vals = [decoupling_error_upper_bound(inst, float(s)) for s in grid]
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    if hi - lo < 1e-12:
        return float(vals[i]), float(grid[i])
    res = optimize.minimize_scalar(
        lambda s: decoupling_error_upper_bound(inst, float(np.clip(s, s_min, 1.0))),
        bounds=(float(lo), float(hi)),
        method="bounded",
        options={"xatol": 1e-10},
    )
    if res.fun < vals[i]:
        return float(res.fun), float(np.clip(res.x, s_min, 1.0))
    return float(vals[i]), float(grid[i])


def decoupling_error_lower_bound(rho_ae: State, d_a1: int, d_a2: int) -> float:
    """One-shot converse for standard decoupling (partial trace over A2).

    (1/v) * tr(rho_AE - 9 v (|A2|/|A1|) I_A x rho_E)_+ with v the number of
    distinct eigenvalues of rho_E.
    """
    da = rho_ae.dim_of("A")
    if d_a1 * d_a2 != da:
        raise ValueError("d_a1 * d_a2 must equal |A|")
    rho_e = rho_ae.marginal("E").density
    v = distinct_eigenvalue_count(rho_e)
    shift = 9.0 * v * (d_a2 / d_a1) * tensor(np.eye(da), rho_e)
    return positive_part_trace(rho_ae.density - shift) / v


def isometry_decoupling_bound(
    rho_ar: State, a_label: str, d_tilde: int, s: float
) -> float:
    """Upper bound for decoupling through a rank-d_tilde partial isometry.

    (c_s/s) * (|Atilde|^(1+s)/|A|) * 2^(-s * H_{1+s}(A|R)), sandwiched.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    da = rho_ar.dim_of(a_label)
    if not 1 <= d_tilde <= da:
        raise ValueError("d_tilde must lie in [1, |A|]")
    rest = [l for l in rho_ar.labels if l != a_label]
    h = cond_entropy(rho_ar, [a_label], rest, EntropyKind("sandwiched", 1.0 + s))
    return (prefactor(s) / s) * (d_tilde ** (1.0 + s) / da) * 2.0 ** (-s * h)


# -- inequality checkers ---------------------------------------------------


def sharp_trace_inequality(rho: np.ndarray, sigma: np.ndarray, s: float):
    """Both sides of tr(rho(log(rho+sigma) - log sigma)) <= rhs, in bits.

    The right-hand side is (c_s/(s ln 2)) * 2^(s * D_{1+s}(rho||sigma)) with
    the sandwiched divergence in bits; the 1/ln 2 converts the natural-log
    statement of the inequality to the base-2 left-hand side.
    """
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    if not support_contained(rho, sigma):
        raise ValueError("supp(rho) must be contained in supp(sigma)")
    lhs = float(
        np.real(np.trace(rho @ (_log2_on_support(rho + sigma) - _log2_on_support(sigma))))
    )
    d = sandwiched_renyi(rho, sigma, 1.0 + s)
    rhs = (prefactor(s) / (s * LN2)) * 2.0 ** (s * d)
    return lhs, rhs


@dataclass(frozen=True)
class SweepReport:
    """Max violations found by a random-ensemble inequality sweep."""

    superadditivity_violation: float
    relent_floor_violation: float
    n_samples: int
    seed: int

    @property
    def max_violation(self) -> float:
        return max(self.superadditivity_violation, self.relent_floor_violation)


def positive_part_inequality_sweep(
    n_samples: int, seed: int = 0, dim: int = 4, n_terms: int = 3
) -> SweepReport:
    """Random sweep of two positive-part inequalities.

    Checks tr(sum_x A_x - lam I)_+ >= sum_x tr(A_x - lam I)_+ for PSD A_x,
    and D(rho||sigma) >= tr(rho - 9 sigma)_+ for random state pairs.
    """
    rng = make_rng(seed)
    worst_super = 0.0
    worst_floor = 0.0
    for _ in range(n_samples):
        mats = []
        for _ in range(n_terms):
            g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            mats.append(g @ g.conj().T / dim)
        lam = float(rng.uniform(0.0, 2.0))
        eye = np.eye(dim)
        lhs = positive_part_trace(sum(mats) - lam * eye)
        rhs = sum(positive_part_trace(a - lam * eye) for a in mats)
        worst_super = max(worst_super, rhs - lhs)

        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = g @ g.conj().T
        rho /= np.real(np.trace(rho))
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        sig = g @ g.conj().T
        sig /= np.real(np.trace(sig))
        d = umegaki(rho, sig)
        floor = positive_part_trace(rho - 9.0 * sig)
        worst_floor = max(worst_floor, floor - d)
    return SweepReport(worst_super, worst_floor, n_samples, seed)
