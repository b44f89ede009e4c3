"""Per-element mimetic building blocks derived from an SBP operator.

Lagrange (nodal) coefficients live on the ``N + 1`` nodes, histopolation
(integral) coefficients on the ``N`` sub-intervals.  The histopolation
Vandermonde matrix ``V`` evaluates histopolation functions at the nodes and
is read off ``D`` by negative cumulative row sums, which gives ``D = V @ diff``
with ``diff`` the forward-difference matrix.

All matrices refer to the reference element; element sizes enter during 2D
assembly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sbp import SbpOperator


def vandermonde(op: SbpOperator) -> np.ndarray:
    """``V[k, i-1] = -sum_{j < i} D[k, j]`` for ``i = 1..N``; shape ``(N+1, N)``."""
    return -np.cumsum(op.D, axis=1)[:, :-1]


def difference_matrix(N: int) -> np.ndarray:
    """Forward differences from ``N + 1`` nodal values to ``N`` increments."""
    diff = np.zeros((N, N + 1))
    idx = np.arange(N)
    diff[idx, idx] = -1.0
    diff[idx, idx + 1] = 1.0
    return diff


def split_difference(N: int):
    """Element-local and wrap-around parts of ``difference_matrix(N)``.

    The last node of an element is owned by the right neighbour (its node 0),
    so the full difference splits into ``diff_hat`` acting on the element's own
    nodes ``0..N-1`` and ``diff_tilde``, a single ``+1`` at ``(N-1, 0)`` that
    picks the neighbour's first node.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    full = difference_matrix(N)
    diff_hat = full[:, :N].copy()
    diff_tilde = np.zeros((N, N))
    diff_tilde[:, 0] = full[:, N]
    return diff_hat, diff_tilde


def split_derivative(op: SbpOperator):
    """Split ``D`` like :func:`split_difference`; both parts are ``(N+1, N)``."""
    N = op.N
    D_hat = op.D[:, :N].copy()
    D_tilde = np.zeros((N + 1, N))
    D_tilde[:, 0] = op.D[:, N]
    return D_hat, D_tilde


def intertwined_mass(op: SbpOperator) -> np.ndarray:
    """Weights of the owned Lagrange nodes ``0..N-1``; node 0 absorbs ``w_N``."""
    w = op.weights
    out = w[:-1].copy()
    out[0] = w[0] + w[-1]
    return out


@dataclass(frozen=True)
class ElementOps:
    op: SbpOperator = field(repr=False)
    V: np.ndarray = field(repr=False)
    diff: np.ndarray = field(repr=False)
    diff_hat: np.ndarray = field(repr=False)
    diff_tilde: np.ndarray = field(repr=False)
    D_hat: np.ndarray = field(repr=False)
    D_tilde: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    weights_hat: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.op.N

    @property
    def name(self) -> str:
        return self.op.name


def element_ops(op: SbpOperator) -> ElementOps:
    if op.length != 1.0:
        raise ValueError("element ops are built on the reference element")
    diff_hat, diff_tilde = split_difference(op.N)
    D_hat, D_tilde = split_derivative(op)
    return ElementOps(
        op=op,
        V=vandermonde(op),
        diff=difference_matrix(op.N),
        diff_hat=diff_hat,
        diff_tilde=diff_tilde,
        D_hat=D_hat,
        D_tilde=D_tilde,
        weights=op.weights.copy(),
        weights_hat=intertwined_mass(op),
    )
