"""Conditional Renyi entropies, coherent informations and their optimizers.

All quantities are in bits.  The non-optimized conditional entropy of a
bipartition (A, B) is -D(rho_AB || I_A x rho_B) for the chosen divergence
family; the optimized ("up-arrow") variant minimizes the divergence over
the conditioning state sigma_B instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .channels import Channel
from .divergences import ALPHA_ONE_GUARD, divergence, umegaki
from .linalg import herm_eig, mat_pow, partial_trace, support_cutoff, tensor
from .states import State, tensor_power

_TINY = 1e-300


@dataclass(frozen=True)
class EntropyKind:
    """Which conditional entropy: family, Renyi order, up-arrow or not."""

    family: str  # "petz" or "sandwiched"
    alpha: float
    optimized: bool = field(default=False)

    def __post_init__(self):
        if self.family not in ("petz", "sandwiched"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class SimplexOptimizerConfig:
    """Knobs for the mirror-descent minimizer over density matrices."""

    max_iters: int = 500
    step_init: float = 1.0
    grad_tol: float = 1e-9
    stall_tol: float = 1e-12
    stall_iters: int = 50
    fd_step: float = 1e-6
    restarts: int = 1


@dataclass(frozen=True)
class MinimizeResult:
    value: float
    sigma: np.ndarray
    iters: int
    grad_norm: float
    converged: bool


class OptimizerDivergence(RuntimeError):
    """The simplex minimizer ran out of iterations far from stationarity."""


def _split_blocks(state: State, a_labels, b_labels):
    """Density rearranged as (A block, B block) plus the two block sizes."""
    a_labels = list(a_labels)
    b_labels = list(b_labels)
    if sorted(a_labels + b_labels) != sorted(state.labels):
        raise ValueError("a_labels + b_labels must partition the state's subsystems")
    perm = state.permuted(*(a_labels + b_labels))
    da = int(np.prod([state.dim_of(l) for l in a_labels]))
    db = perm.total_dim // da
    return perm.density, da, db


def von_neumann_entropy(m: np.ndarray) -> float:
    vals = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    cut = support_cutoff(vals)
    sup = vals > cut
    return float(-np.sum(vals[sup] * np.log2(vals[sup])))


def cond_vn_entropy(state: State, a_labels, b_labels) -> float:
    """Von Neumann conditional entropy H(A|B) = H(AB) - H(B)."""
    rho, da, db = _split_blocks(state, a_labels, b_labels)
    rho_b = partial_trace(rho, [da, db], [1])
    return von_neumann_entropy(rho) - von_neumann_entropy(rho_b)


# -- fast objectives for the sigma minimization ----------------------------
#
# Both return D_family(rho_AB || I_A x sigma) as a function of sigma alone,
# with everything independent of sigma precomputed.  They tolerate slightly
# indefinite sigma (finite-difference probes) by clamping the spectrum.


def _petz_objective(rho: np.ndarray, da: int, alpha: float):
    db = rho.shape[0] // da
    m = partial_trace(mat_pow(rho, alpha), [da, db], [1])
    m = 0.5 * (m + m.conj().T)

    def f(sigma: np.ndarray) -> float:
        w, v = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
        w = np.maximum(w, _TINY)
        pw = (v * w ** (1.0 - alpha)) @ v.conj().T
        q = float(np.real(np.trace(m @ pw)))
        if q <= 0:
            return math.inf
        return math.log2(q) / (alpha - 1.0)

    return f


def _sandwiched_objective(rho: np.ndarray, da: int, alpha: float):
    c = (1.0 - alpha) / (2.0 * alpha)
    eye_a = np.eye(da)

    def f(sigma: np.ndarray) -> float:
        w, v = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
        w = np.maximum(w, _TINY)
        conj = (v * w**c) @ v.conj().T
        big = np.kron(eye_a, conj)
        mid = big @ rho @ big
        mv = np.linalg.eigvalsh(0.5 * (mid + mid.conj().T))
        q = float(np.sum(np.maximum(mv, 0.0) ** alpha))
        if q <= 0:
            return math.inf
        return math.log2(q) / (alpha - 1.0)

    return f


def _herm_basis(d: int) -> list[np.ndarray]:
    """Orthonormal (Frobenius) Hermitian basis of d x d matrices."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2)
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j / np.sqrt(2)
            e[j, i] = 1j / np.sqrt(2)
            basis.append(e)
    return basis


def _exp_update(sigma: np.ndarray, direction: np.ndarray, eta: float) -> np.ndarray:
    """Mirror step: normalize(exp(log sigma - eta * direction))."""
    w, v = np.linalg.eigh(0.5 * (sigma + sigma.conj().T))
    logs = (v * np.log(np.maximum(w, _TINY))) @ v.conj().T
    m = logs - eta * direction
    mw, mv = np.linalg.eigh(0.5 * (m + m.conj().T))
    mw = mw - np.max(mw)  # overflow guard; normalization absorbs the shift
    out = (mv * np.exp(mw)) @ mv.conj().T
    return out / np.real(np.trace(out))


def _mirror_descent(obj, d: int, sigma0: np.ndarray, cfg: SimplexOptimizerConfig):
    basis = _herm_basis(d)
    sigma = sigma0 / np.real(np.trace(sigma0))
    fval = obj(sigma)
    eye = np.eye(d)
    eta = cfg.step_init
    history = [fval]
    grad_norm = math.inf
    for it in range(cfg.max_iters):
        grad = np.zeros((d, d), dtype=complex)
        h = cfg.fd_step * max(1.0, float(np.max(np.abs(sigma))))
        for b in basis:
            df = obj(sigma + h * b) - obj(sigma - h * b)
            grad += (df / (2.0 * h)) * b
        proj = grad - float(np.real(np.trace(grad @ sigma))) * eye
        grad_norm = float(np.linalg.norm(proj))
        if grad_norm <= cfg.grad_tol:
            return MinimizeResult(fval, sigma, it, grad_norm, True)
        accepted = False
        for _ in range(40):
            cand = _exp_update(sigma, grad, eta)
            fc = obj(cand)
            if fc < fval - 1e-15:
                sigma, fval = cand, fc
                eta = min(eta * 1.3, 1e3)
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            return MinimizeResult(fval, sigma, it, grad_norm, True)
        history.append(fval)
        if (
            len(history) > cfg.stall_iters
            and history[-cfg.stall_iters - 1] - fval < cfg.stall_tol
        ):
            return MinimizeResult(fval, sigma, it + 1, grad_norm, True)
    if grad_norm > 1e-4:
        raise OptimizerDivergence(
            f"simplex minimizer hit {cfg.max_iters} iterations, "
            f"projected gradient norm {grad_norm:.3e}"
        )
    return MinimizeResult(fval, sigma, cfg.max_iters, grad_norm, False)


def minimized_conditioning(
    state: State,
    a_labels,
    b_labels,
    family: str,
    alpha: float,
    config: SimplexOptimizerConfig | None = None,
    sigma0: np.ndarray | None = None,
) -> MinimizeResult:
    """inf over sigma_B of D(rho_AB || I_A x sigma_B), by mirror descent.

    Starts from ``sigma0`` when given, else from rho_B; with
    ``config.restarts > 1`` additional starts at the closed-form Petz
    optimizer and maximally mixed are tried and the best result kept.
    """
    cfg = config or SimplexOptimizerConfig()
    rho, da, db = _split_blocks(state, a_labels, b_labels)
    if abs(alpha - 1.0) < ALPHA_ONE_GUARD:
        sigma_b = partial_trace(rho, [da, db], [1])
        val = umegaki(rho, tensor(np.eye(da), sigma_b))
        return MinimizeResult(val, sigma_b, 0, 0.0, True)
    # The minimizer is supported on supp(rho_B): pinching with the support
    # projector leaves rho invariant and cannot increase the divergence, and
    # renormalizing the in-support block only decreases it.  Restricting to
    # that subspace keeps the iterates full rank, which the multiplicative
    # update needs to make progress.
    rho_b_full = partial_trace(rho, [da, db], [1])
    vals_b, vecs_b = herm_eig(rho_b_full)
    sup = vals_b > support_cutoff(vals_b)
    basis = None
    if int(np.sum(sup)) < db:
        basis = vecs_b[:, sup]
        db = basis.shape[1]
        iso = tensor(np.eye(da), basis)
        rho = iso.conj().T @ rho @ iso
        if sigma0 is not None:
            s0 = basis.conj().T @ np.asarray(sigma0, dtype=complex) @ basis
            tr0 = float(np.real(np.trace(s0)))
            sigma0 = s0 / tr0 if tr0 > 1e-12 else None
    obj = (_petz_objective if family == "petz" else _sandwiched_objective)(rho, da, alpha)
    starts = []
    if sigma0 is not None:
        starts.append(np.asarray(sigma0, dtype=complex))
    else:
        rho_b = partial_trace(rho, [da, db], [1])
        starts.append((1.0 - 1e-9) * rho_b + 1e-9 * np.eye(db) / db)
    if cfg.restarts > 1:
        m = partial_trace(mat_pow(rho, alpha), [da, db], [1])
        petz_opt = mat_pow(m, 1.0 / alpha)
        petz_opt = petz_opt / np.real(np.trace(petz_opt))
        starts.append((1.0 - 1e-9) * petz_opt + 1e-9 * np.eye(db) / db)
    if cfg.restarts > 2:
        starts.append(np.eye(db, dtype=complex) / db)
    best = None
    for s0 in starts[: max(cfg.restarts, 1)]:
        res = _mirror_descent(obj, db, s0, cfg)
        if best is None or res.value < best.value:
            best = res
    if basis is not None:
        best = MinimizeResult(
            best.value,
            basis @ best.sigma @ basis.conj().T,
            best.iters,
            best.grad_norm,
            best.converged,
        )
    return best


def petz_up_closed_form(state: State, a_labels, b_labels, alpha: float) -> float:
    """Optimized Petz conditional entropy via its closed-form expression.

    H_up(A|B) = (alpha/(1-alpha)) * log2 tr[(tr_A rho^alpha)^(1/alpha)].
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    rho, da, db = _split_blocks(state, a_labels, b_labels)
    if abs(alpha - 1.0) < ALPHA_ONE_GUARD:
        sigma_b = partial_trace(rho, [da, db], [1])
        return -umegaki(rho, tensor(np.eye(da), sigma_b))
    m = partial_trace(mat_pow(rho, alpha), [da, db], [1])
    t = float(np.real(np.trace(mat_pow(m, 1.0 / alpha))))
    return (alpha / (1.0 - alpha)) * math.log2(t)


def cond_entropy(
    state: State,
    a_labels,
    b_labels,
    kind: EntropyKind,
    config: SimplexOptimizerConfig | None = None,
) -> float:
    """Conditional Renyi entropy of the (A, B) partition, in bits."""
    rho, da, db = _split_blocks(state, a_labels, b_labels)
    if not kind.optimized:
        sigma_b = partial_trace(rho, [da, db], [1])
        return -divergence(rho, tensor(np.eye(da), sigma_b), kind.family, kind.alpha)
    if kind.family == "petz":
        return petz_up_closed_form(state, a_labels, b_labels, kind.alpha)
    return -minimized_conditioning(
        state, a_labels, b_labels, kind.family, kind.alpha, config
    ).value


def coherent_info(
    state: State,
    a_labels,
    b_labels,
    family: str = "petz",
    alpha: float = 0.5,
    config: SimplexOptimizerConfig | None = None,
) -> float:
    """Renyi coherent information I(A>B): sign-flipped optimized entropy."""
    return -cond_entropy(
        state, a_labels, b_labels, EntropyKind(family, alpha, optimized=True), config
    )


def duality_pair(state: State, a_labels, b_labels, c_labels, s: float):
    """Both sides of the pure-state duality, for cross-checking.

    For pure rho_ABC returns (sandwiched H_{1+s}(A|C), -petz H_up_{1/(1+s)}(A|B));
    the two agree in exact arithmetic.
    """
    if not 0 < s <= 1:
        raise ValueError("s must lie in (0, 1]")
    purity = float(np.real(np.trace(state.density @ state.density)))
    if purity < 1.0 - 1e-8:
        raise ValueError(f"state is not pure (tr rho^2 = {purity:.6f})")
    ac = state.marginal(*(list(a_labels) + list(c_labels)))
    ab = state.marginal(*(list(a_labels) + list(b_labels)))
    lhs = cond_entropy(ac, a_labels, c_labels, EntropyKind("sandwiched", 1.0 + s))
    rhs = -petz_up_closed_form(ab, a_labels, b_labels, 1.0 / (1.0 + s))
    return lhs, rhs


def tensor_power_entropy(
    state: State, a_labels, b_labels, kind: EntropyKind, m: int
) -> float:
    """Per-copy conditional entropy of the m-fold tensor power."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if state.total_dim ** (2 * m) > 2**26:
        raise ValueError("tensor power exceeds the memory budget")
    big = tensor_power(state, m)
    a_all = [f"{l}#{k}" for k in range(m) for l in a_labels]
    b_all = [f"{l}#{k}" for k in range(m) for l in b_labels]
    return cond_entropy(big, a_all, b_all, kind) / m


# -- channel input optimization --------------------------------------------


def _petz_coherent_of_output(rho: np.ndarray, da: int, alpha: float) -> float:
    """I_alpha(A>B) of a bipartite density via the closed form, raw arrays."""
    db = rho.shape[0] // da
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    w = np.maximum(w, 0.0)
    pa = (v * w**alpha) @ v.conj().T
    m = partial_trace(pa, [da, db], [1])
    mw = np.maximum(np.linalg.eigvalsh(0.5 * (m + m.conj().T)), 0.0)
    t = float(np.sum(mw ** (1.0 / alpha)))
    return -(alpha / (1.0 - alpha)) * math.log2(t)


def channel_coherent_info(
    channel: Channel,
    alpha: float,
    family: str = "petz",
    restarts: int = 32,
    rng: np.random.Generator | None = None,
    x0: np.ndarray | None = None,
) -> tuple[float, State]:
    """Best Renyi coherent information over pure channel inputs.

    Multi-start ascent: the maximally entangled input is always tried, plus
    ``restarts - 1`` random pure starts (and ``x0`` if given).  The channel
    input maximization is non-convex; the best value found is returned with
    its achieving input.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    din, dout = channel.din, channel.dout
    w = channel.choi.reshape(din, dout, din, dout)
    n = din * din

    def neg(x: np.ndarray) -> float:
        v = x[:n] + 1j * x[n:]
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            return 0.0
        psi = (v / nrm).reshape(din, din)
        out = din * np.einsum("icjd,ri,sj->rcsd", w, psi, psi.conj())
        out = out.reshape(din * dout, din * dout)
        if family == "petz":
            return -_petz_coherent_of_output(out, din, alpha)
        ref = State(
            0.5 * (out + out.conj().T), (("R", din), ("B", dout)), subnormalized=True
        )
        return -coherent_info(ref, ["R"], ["B"], family, alpha)

    starts = []
    phi = np.eye(din).reshape(n) / np.sqrt(din)
    starts.append(np.concatenate([phi.real, phi.imag]))
    if x0 is not None:
        starts.append(np.asarray(x0, dtype=float))
    if rng is None:
        rng = np.random.default_rng(0)
    while len(starts) < restarts + (x0 is not None):
        g = rng.standard_normal(2 * n)
        starts.append(g / np.linalg.norm(g))
    best_val, best_x = math.inf, starts[0]
    for s0 in starts:
        res = optimize.minimize(neg, s0, method="L-BFGS-B")
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    v = best_x[:n] + 1j * best_x[n:]
    v /= np.linalg.norm(v)
    inp = State(np.outer(v, v.conj()), (("R", din), ("A", din)))
    return -best_val, inp
