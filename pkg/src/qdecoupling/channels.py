"""Quantum channels in Choi form, plus the structured families used here.

The Choi state of a channel ``T`` with input dimension ``din`` is stored
normalized (trace 1), on the ordered pair (input copy, output); applying the
channel to a labelled subsystem contracts the input indices of the Choi
state against that subsystem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_hermitian, eigenvalue_clusters, herm_eig, partial_trace, support_cutoff
from .states import State


@dataclass(frozen=True)
class Channel:
    """Completely positive map in normalized-Choi representation.

    ``trace_preserving=False`` relaxes the marginal condition to
    trace non-increasing (marginal on the input copy <= I/din).
    """

    din: int
    dout: int
    choi: np.ndarray
    trace_preserving: bool = field(default=True)

    def __post_init__(self):
        c = as_hermitian(self.choi)
        if c.shape != (self.din * self.dout, self.din * self.dout):
            raise ValueError("Choi matrix shape does not match din * dout")
        vals = np.linalg.eigvalsh(c)
        if float(vals[0]) < -1e-9:
            raise ValueError(f"Choi matrix is not PSD (min eig {vals[0]:.3e})")
        marg = partial_trace(c, [self.din, self.dout], [0])
        target = np.eye(self.din) / self.din
        if self.trace_preserving:
            if float(np.max(np.abs(marg - target))) > 1e-9:
                raise ValueError("Choi marginal on the input copy is not I/din")
        else:
            dev = np.linalg.eigvalsh(target - marg)
            if float(dev[0]) < -1e-9:
                raise ValueError("map increases trace: Choi marginal exceeds I/din")
        object.__setattr__(self, "choi", c)

    def choi_state(self, labels: tuple[str, str] = ("Ain", "C")) -> State:
        return State(
            self.choi,
            ((labels[0], self.din), (labels[1], self.dout)),
            subnormalized=not self.trace_preserving,
        )

    def output_of_max_mixed(self) -> np.ndarray:
        """Image of I/din: the marginal of the Choi state on the output."""
        return partial_trace(self.choi, [self.din, self.dout], [1])


def channel_from_kraus(kraus: list[np.ndarray], trace_preserving: bool = True) -> Channel:
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    dout, din = kraus[0].shape
    choi = np.zeros((din * dout, din * dout), dtype=complex)
    for k in kraus:
        # vectorized |i><j| -> K|i><j|K* contribution, index order (i, c)
        m = k.T.reshape(din * dout)  # m[i*dout + c] = K[c, i]
        choi += np.outer(m, m.conj())
    return Channel(din, dout, choi / din, trace_preserving)


def kraus_operators(channel: Channel) -> list[np.ndarray]:
    """Kraus decomposition from the eigenvectors of the unnormalized Choi."""
    vals, vecs = herm_eig(channel.choi * channel.din)
    cut = support_cutoff(vals)
    ops = []
    for i in range(len(vals)):
        if vals[i] > cut:
            k = np.sqrt(vals[i]) * vecs[:, i].reshape(channel.din, channel.dout).T
            ops.append(k)
    return ops


def identity_channel(d: int) -> Channel:
    return channel_from_kraus([np.eye(d)])


def partial_trace_channel(d_keep: int, d_drop: int) -> Channel:
    """Trace out the second factor of an input split as keep x drop."""
    kraus = [np.kron(np.eye(d_keep), np.eye(d_drop)[j : j + 1, :]) for j in range(d_drop)]
    return channel_from_kraus(kraus)


def full_trace_channel(d: int) -> Channel:
    """Trace out everything; output is the trivial one-dimensional system."""
    kraus = [np.eye(d)[j : j + 1, :] for j in range(d)]
    return channel_from_kraus(kraus)


def pinching_channel(h: np.ndarray) -> Channel:
    """Dephasing with respect to the clustered spectral projectors of ``h``."""
    projs = [p for _, p in eigenvalue_clusters(h)]
    return channel_from_kraus(projs)


def generalized_dephasing(overlaps: np.ndarray) -> Channel:
    """Basis-preserving channel built from a Gram matrix of state overlaps.

    Maps ``rho`` to the matrix with entries ``rho[x, y] * conj(overlaps[x, y])``
    in the computational basis; requires ``overlaps`` PSD with unit diagonal.
    """
    g = as_hermitian(overlaps)
    d = g.shape[0]
    if float(np.max(np.abs(np.diag(g) - 1.0))) > 1e-10:
        raise ValueError("Gram matrix must have unit diagonal")
    if float(np.linalg.eigvalsh(g)[0]) < -1e-10:
        raise ValueError("Gram matrix must be PSD")
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            choi[i * d + i, j * d + j] = g[j, i] / d
    return Channel(d, d, choi)


def random_channel(din: int, dout: int, rng: np.random.Generator, rank: int | None = None) -> Channel:
    """Random CPTP map from a normalized Ginibre-induced Choi matrix."""
    if rank is None:
        rank = din * dout
    g = rng.standard_normal((din * dout, rank)) + 1j * rng.standard_normal((din * dout, rank))
    m = g @ g.conj().T
    marg = partial_trace(m, [din, dout], [0])
    vals, vecs = herm_eig(marg)
    inv_sqrt = (vecs * (vals ** -0.5)) @ vecs.conj().T
    corr = np.kron(inv_sqrt, np.eye(dout))
    choi = corr @ m @ corr / din
    return Channel(din, dout, choi)


def apply_channel(channel: Channel, state: State, on: str) -> State:
    """Apply a channel to one labelled subsystem of a multipartite state.

    Uses the Choi contraction identity; the acted-on subsystem keeps its
    label but takes the channel's output dimension.
    """
    if state.dim_of(on) != channel.din:
        raise ValueError(
            f"subsystem {on!r} has dimension {state.dim_of(on)}, channel input is {channel.din}"
        )
    rest = [l for l in state.labels if l != on]
    perm = state.permuted(on, *rest)
    d_rest = perm.total_dim // channel.din
    r = perm.density.reshape(channel.din, d_rest, channel.din, d_rest)
    w = channel.choi.reshape(channel.din, channel.dout, channel.din, channel.dout)
    out = channel.din * np.einsum("icjd,iejf->cedf", w, r)
    out = out.reshape(channel.dout * d_rest, channel.dout * d_rest)
    new_dims = ((on, channel.dout),) + tuple((l, state.dim_of(l)) for l in rest)
    result = State(
        out, new_dims, subnormalized=state.subnormalized or not channel.trace_preserving
    )
    return result.permuted(*state.labels)


def apply_kraus(channel: Channel, state: State, on: str) -> State:
    """Independent route: apply the channel through its Kraus operators."""
    rest = [l for l in state.labels if l != on]
    perm = state.permuted(on, *rest)
    d_rest = perm.total_dim // channel.din
    out = np.zeros((channel.dout * d_rest,) * 2, dtype=complex)
    for k in kraus_operators(channel):
        big = np.kron(k, np.eye(d_rest))
        out += big @ perm.density @ big.conj().T
    new_dims = ((on, channel.dout),) + tuple((l, state.dim_of(l)) for l in rest)
    result = State(
        out, new_dims, subnormalized=state.subnormalized or not channel.trace_preserving
    )
    return result.permuted(*state.labels)
