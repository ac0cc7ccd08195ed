"""Dense complex Hermitian linear algebra and functional calculus.

Operators are plain complex numpy arrays.  Conventions used everywhere in
this package:

* logarithms are base 2 unless a function explicitly says otherwise,
* ``math.inf`` is the sentinel for quantities that diverge,
* spectral cutoffs follow the rank-revealing rule in :func:`support_cutoff`.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

# Relative tolerance for accepting an almost-Hermitian input; larger
# asymmetry is treated as a caller bug, not roundoff.
HERMITICITY_RTOL = 1e-8

# Relative tolerance for merging nearly equal eigenvalues into one cluster.
CLUSTER_RTOL = 1e-8

# Tolerance for deciding how much of one operator may stick out of the
# support of another before we call the supports incompatible.
SUPPORT_LEAK_TOL = 1e-10

_EPS = float(np.finfo(float).eps)


class DomainError(ValueError):
    """A scalar function was evaluated outside its domain on the spectrum."""


def as_hermitian(m: np.ndarray, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Validate and symmetrize an (almost) Hermitian matrix.

    Asymmetry up to ``rtol * max(1, |m|_max)`` is absorbed by averaging with
    the adjoint; anything larger raises ``ValueError``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix contains non-finite entries")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if asym > rtol * scale:
        raise ValueError(f"matrix is not Hermitian: max asymmetry {asym:.3e}")
    return 0.5 * (m + m.conj().T)


def herm_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with real ascending eigenvalues
    and eigenvectors as the columns of a unitary matrix.
    """
    h = as_hermitian(h)
    try:
        vals, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise RuntimeError(f"eigensolver failed to converge: {exc}") from exc
    return vals, vecs


def support_cutoff(eigvals: np.ndarray, dim: int | None = None) -> float:
    """Rank-revealing cutoff: eigenvalues at or below it count as kernel."""
    if dim is None:
        dim = len(eigvals)
    top = float(np.max(np.abs(eigvals))) if len(eigvals) else 0.0
    return dim * _EPS * max(top, 1.0)


def mat_func(
    h: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    kernel_value: float = 0.0,
) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix via its spectrum.

    Eigenvalues at or below the support cutoff are mapped to
    ``kernel_value`` instead of through ``f``; ``f`` evaluating to a
    non-finite number on an in-support eigenvalue raises :class:`DomainError`.
    """
    vals, vecs = herm_eig(h)
    cut = support_cutoff(vals)
    out = np.full(len(vals), float(kernel_value))
    sup = vals > cut
    if np.any(sup):
        fv = np.asarray(f(vals[sup]), dtype=float)
        if not np.all(np.isfinite(fv)):
            raise DomainError("function is non-finite on an in-support eigenvalue")
        out[sup] = fv
    return (vecs * out) @ vecs.conj().T


def mat_pow(p: np.ndarray, t: float) -> np.ndarray:
    """Power of a PSD matrix with the pseudo-inverse convention.

    The kernel maps to 0 for every ``t != 0``; ``t == 0`` returns the
    support projector.
    """
    vals, vecs = herm_eig(p)
    cut = support_cutoff(vals)
    if float(vals[0]) < -cut:
        raise ValueError(f"matrix is not PSD: min eigenvalue {vals[0]:.3e}")
    sup = vals > cut
    out = np.zeros(len(vals))
    if t == 0:
        out[sup] = 1.0
    else:
        out[sup] = vals[sup] ** t
    return (vecs * out) @ vecs.conj().T


def support_projector(p: np.ndarray) -> np.ndarray:
    return mat_pow(p, 0)


def positive_part_trace(h: np.ndarray) -> float:
    """Trace of the positive part: the sum of positive eigenvalues."""
    vals, _ = herm_eig(h)
    return float(np.sum(vals[vals > 0.0]))


def proj_geq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Projector onto the eigenspaces of ``a - b`` with eigenvalue >= 0.

    A small negative tolerance keeps roundoff-level zero modes included,
    so ``proj_geq(h, h)`` is the identity.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("operands must have equal dimensions")
    vals, vecs = herm_eig(a - b)
    tol = 1e-10 * max(1.0, float(np.max(np.abs(vals))) if len(vals) else 1.0)
    sel = (vals >= -tol).astype(float)
    return (vecs * sel) @ vecs.conj().T


def tensor(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices."""
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def partial_trace(
    x: np.ndarray, dims: Sequence[int], keep: Sequence[int]
) -> np.ndarray:
    """Partial trace of a matrix over the subsystems not listed in ``keep``.

    ``dims`` are the subsystem dimensions in tensor order; the result keeps
    the subsystems in ``keep`` in their original relative order.
    """
    dims = list(dims)
    keep = sorted(set(keep))
    n = len(dims)
    x = np.asarray(x, dtype=complex)
    total = int(np.prod(dims))
    if x.shape != (total, total):
        raise ValueError(f"matrix shape {x.shape} does not match dims {dims}")
    if not keep or any(i < 0 or i >= n for i in keep):
        raise ValueError(f"invalid keep set {keep} for {n} subsystems")
    t = x.reshape(dims + dims)
    row = list(range(n))
    col = [i if i not in keep else n + i for i in range(n)]
    out_idx = [i for i in keep] + [n + i for i in keep]
    out = np.einsum(t, row + col, out_idx)
    dk = int(np.prod([dims[i] for i in keep]))
    return out.reshape(dk, dk)


def trace_norm(x: np.ndarray) -> float:
    """Sum of singular values (works for non-Hermitian inputs)."""
    return float(np.sum(np.linalg.svd(np.asarray(x, dtype=complex), compute_uv=False)))


def _check_state(rho: np.ndarray, name: str) -> np.ndarray:
    rho = as_hermitian(rho)
    vals = np.linalg.eigvalsh(rho)
    if float(vals[0]) < -1e-8:
        raise ValueError(f"{name} is not PSD (min eigenvalue {vals[0]:.3e})")
    tr = float(np.real(np.trace(rho)))
    if tr > 1.0 + 1e-8:
        raise ValueError(f"{name} has trace {tr:.6f} > 1")
    return rho


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Fidelity ``|| sqrt(rho) sqrt(sigma) ||_1`` between two states."""
    rho = _check_state(rho, "rho")
    sigma = _check_state(sigma, "sigma")
    f = trace_norm(mat_pow(rho, 0.5) @ mat_pow(sigma, 0.5))
    return min(max(f, 0.0), 1.0)


def purified_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    f = fidelity(rho, sigma)
    return math.sqrt(max(0.0, 1.0 - f * f))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    rho = _check_state(rho, "rho")
    sigma = _check_state(sigma, "sigma")
    return 0.5 * trace_norm(rho - sigma)


def eigenvalue_clusters(h: np.ndarray) -> list[tuple[float, np.ndarray]]:
    """Cluster nearly equal eigenvalues and return (value, projector) pairs.

    Single-linkage clustering on the sorted spectrum with gap threshold
    ``CLUSTER_RTOL * max(1, |lambda|_max)``.
    """
    vals, vecs = herm_eig(h)
    tol = CLUSTER_RTOL * max(1.0, float(np.max(np.abs(vals))) if len(vals) else 1.0)
    clusters: list[tuple[float, np.ndarray]] = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > tol:
            block = vecs[:, start:i]
            clusters.append((float(np.mean(vals[start:i])), block @ block.conj().T))
            start = i
    return clusters


def distinct_eigenvalue_count(h: np.ndarray) -> int:
    """Number of eigenvalue clusters after tolerance-based merging."""
    return len(eigenvalue_clusters(h))
