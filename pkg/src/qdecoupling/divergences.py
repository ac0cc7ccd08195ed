"""Quantum divergences with extended-real (+inf) semantics, base-2 logs.

Inputs are density-like matrices (first argument a possibly sub-normalized
state, second any PSD operator; the second argument is deliberately never
renormalized).  Support violations yield ``math.inf`` instead of raising.
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import (
    SUPPORT_LEAK_TOL,
    as_hermitian,
    herm_eig,
    mat_pow,
    support_cutoff,
    support_projector,
)

# Dispatch to the Umegaki divergence this close to alpha = 1; the
# 1/(alpha - 1) prefactor is numerically catastrophic nearer.
ALPHA_ONE_GUARD = 1e-6


def support_contained(rho: np.ndarray, sigma: np.ndarray, tol: float = SUPPORT_LEAK_TOL) -> bool:
    """Whether supp(rho) fits inside supp(sigma) up to a mass leak of ``tol``."""
    comp = np.eye(sigma.shape[0]) - support_projector(sigma)
    leak = float(np.real(np.trace(comp @ rho @ comp)))
    return leak <= tol


def supports_overlap(rho: np.ndarray, sigma: np.ndarray, tol: float = SUPPORT_LEAK_TOL) -> bool:
    """Whether the supports are non-orthogonal."""
    overlap = float(np.real(np.trace(support_projector(rho) @ support_projector(sigma))))
    return overlap > tol


def umegaki(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Relative entropy tr(rho(log rho - log sigma)) in bits; +inf off-support."""
    rho = as_hermitian(rho)
    sigma = as_hermitian(sigma)
    if not support_contained(rho, sigma):
        return math.inf
    vals_r, vecs_r = herm_eig(rho)
    cut = support_cutoff(vals_r)
    sup = vals_r > cut
    term1 = float(np.sum(vals_r[sup] * np.log2(vals_r[sup])))
    log_sigma = _log2_on_support(sigma)
    term2 = float(np.real(np.trace(rho @ log_sigma)))
    return term1 - term2


def _log2_on_support(p: np.ndarray) -> np.ndarray:
    vals, vecs = herm_eig(p)
    cut = support_cutoff(vals)
    out = np.zeros(len(vals))
    sup = vals > cut
    out[sup] = np.log2(vals[sup])
    return (vecs * out) @ vecs.conj().T


def petz_renyi(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """Quasi-entropy family built on tr(rho^a sigma^(1-a)), in bits."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if abs(alpha - 1.0) < ALPHA_ONE_GUARD:
        return umegaki(rho, sigma)
    rho = as_hermitian(rho)
    sigma = as_hermitian(sigma)
    if alpha > 1 and not support_contained(rho, sigma):
        return math.inf
    if alpha < 1 and not supports_overlap(rho, sigma):
        return math.inf
    q = float(np.real(np.trace(mat_pow(rho, alpha) @ mat_pow(sigma, 1.0 - alpha))))
    if q <= 0:
        return math.inf
    tr_rho = float(np.real(np.trace(rho)))
    return (math.log2(q) - math.log2(tr_rho)) / (alpha - 1.0)


def sandwiched_renyi(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """Sandwiched family built on tr((sigma^c rho sigma^c)^a), c=(1-a)/2a, in bits."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if abs(alpha - 1.0) < ALPHA_ONE_GUARD:
        return umegaki(rho, sigma)
    rho = as_hermitian(rho)
    sigma = as_hermitian(sigma)
    if alpha > 1 and not support_contained(rho, sigma):
        return math.inf
    if alpha < 1 and not supports_overlap(rho, sigma):
        return math.inf
    c = (1.0 - alpha) / (2.0 * alpha)
    conj = mat_pow(sigma, c)
    mid = as_hermitian(conj @ rho @ conj)
    vals, _ = herm_eig(mid)
    cut = support_cutoff(vals)
    q = float(np.sum(vals[vals > cut] ** alpha))
    if q <= 0:
        return math.inf
    tr_rho = float(np.real(np.trace(rho)))
    return (math.log2(q) - math.log2(tr_rho)) / (alpha - 1.0)


def d_max(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Smallest lambda with rho <= 2^lambda sigma; +inf off-support."""
    rho = as_hermitian(rho)
    sigma = as_hermitian(sigma)
    if not support_contained(rho, sigma):
        return math.inf
    inv_sqrt = mat_pow(sigma, -0.5)
    top = float(np.max(np.linalg.eigvalsh(as_hermitian(inv_sqrt @ rho @ inv_sqrt))))
    if top <= 0:
        return -math.inf
    return math.log2(top)


def classical_divergence_oracle(
    p: np.ndarray, q: np.ndarray, kind: str, alpha: float | None = None
) -> float:
    """Scalar-sum evaluation on probability vectors, for commuting cross-checks.

    ``kind`` is one of "umegaki", "petz", "sandwiched", "max"; the two Renyi
    families coincide classically.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("probability vectors must be nonnegative")
    sup_p = p > 0
    if kind == "umegaki":
        if np.any(sup_p & (q == 0)):
            return math.inf
        return float(np.sum(p[sup_p] * (np.log2(p[sup_p]) - np.log2(q[sup_p]))))
    if kind == "max":
        if np.any(sup_p & (q == 0)):
            return math.inf
        return float(np.max(np.log2(p[sup_p] / q[sup_p])))
    if kind in ("petz", "sandwiched"):
        if alpha is None:
            raise ValueError("Renyi kinds need alpha")
        if abs(alpha - 1.0) < ALPHA_ONE_GUARD:
            return classical_divergence_oracle(p, q, "umegaki")
        if alpha > 1 and np.any(sup_p & (q == 0)):
            return math.inf
        mask = sup_p & (q > 0)
        s = float(np.sum(p[mask] ** alpha * q[mask] ** (1.0 - alpha)))
        if s <= 0:
            return math.inf
        return (math.log2(s) - math.log2(float(np.sum(p)))) / (alpha - 1.0)
    raise ValueError(f"unknown divergence kind {kind!r}")


def divergence(rho: np.ndarray, sigma: np.ndarray, kind: str, alpha: float | None = None) -> float:
    """Uniform dispatch used by the CLI and the conditional-entropy layer."""
    if kind == "umegaki":
        return umegaki(rho, sigma)
    if kind == "max":
        return d_max(rho, sigma)
    if kind in ("petz", "sandwiched"):
        if alpha is None:
            raise ValueError("Renyi kinds need alpha")
        fn = petz_renyi if kind == "petz" else sandwiched_renyi
        return fn(rho, sigma, alpha)
    raise ValueError(f"unknown divergence kind {kind!r}")
