"""Sparse Kronecker assembly and a restarted GMRES solver.

Dense matrices are plain :class:`numpy.ndarray` objects and sparse matrices
are :class:`scipy.sparse.csr_array` objects; everything is float64.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_triangular

_INDEX_LIMIT = np.iinfo(np.int64).max


@dataclass(frozen=True)
class SolveStats:
    iterations: int
    final_residual: float
    converged: bool


class SolverError(RuntimeError):
    """Raised when an iterative solve breaks down or fails to converge."""

    def __init__(self, message: str, stats: Optional[SolveStats] = None) -> None:
        super().__init__(message)
        self.stats = stats


def as_csr(a) -> sp.csr_array:
    """Canonical CSR copy of a dense or sparse matrix (duplicates summed)."""
    out = sp.csr_array(a, dtype=np.float64)
    out.sum_duplicates()
    out.sort_indices()
    return out


def from_triplets(rows, cols, values, shape: Tuple[int, int]) -> sp.csr_array:
    """Assemble from (row, col, value) triplets, summing duplicates."""
    coo = sp.coo_array(
        (np.asarray(values, dtype=np.float64), (np.asarray(rows), np.asarray(cols))),
        shape=shape,
    )
    return as_csr(coo)


def kron(a, b) -> sp.csr_array:
    """Kronecker product ``a (x) b``.

    Entry ``(i*b.rows + k, j*b.cols + l)`` of the result is ``a[i, j] * b[k, l]``.
    """
    a = sp.csr_array(a, dtype=np.float64)
    b = sp.csr_array(b, dtype=np.float64)
    rows = int(a.shape[0]) * int(b.shape[0])
    cols = int(a.shape[1]) * int(b.shape[1])
    if rows > _INDEX_LIMIT or cols > _INDEX_LIMIT:
        raise OverflowError(f"kron result shape {rows}x{cols} overflows the index space")
    return as_csr(sp.kron(a, b, format="csr"))


def identity(n: int) -> sp.csr_array:
    return sp.identity(n, dtype=np.float64, format="csr")


def diag(values) -> sp.csr_array:
    return sp.diags_array(np.asarray(values, dtype=np.float64), format="csr")


def gmres(
    apply: Callable[[np.ndarray], np.ndarray],
    rhs: np.ndarray,
    tol: float = 1e-10,
    restart: int = 50,
    max_iters: Optional[int] = None,
    x0: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, SolveStats]:
    """Solve ``apply(x) = rhs`` with restarted GMRES (no preconditioning).

    Convergence means ``||apply(x) - rhs|| <= tol * ||rhs||`` for the returned
    ``x``; the residual in the stats is always recomputed from ``x`` itself, never
    taken from the Arnoldi estimate.  Non-convergence is reported through
    ``SolveStats.converged``; a NaN in the recurrence raises :class:`SolverError`.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if restart < 1:
        raise ValueError("restart must be at least 1")

    b = np.asarray(rhs, dtype=np.float64)
    n = b.size
    if max_iters is None:
        max_iters = 10 * n

    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        x[:] = 0.0
        return x, SolveStats(0, 0.0, True)
    target = tol * bnorm

    r = b - apply(x)
    beta = np.linalg.norm(r)
    if not np.isfinite(beta):
        raise SolverError("NaN in initial residual", SolveStats(0, float("nan"), False))
    iters = 0
    while beta > target and iters < max_iters:
        m = min(restart, max_iters - iters)
        Q = np.zeros((m + 1, n))
        H = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        Q[0] = r / beta

        k = 0
        for j in range(m):
            w = np.asarray(apply(Q[j]), dtype=np.float64)
            # modified Gram-Schmidt, one reorthogonalization pass
            for _ in range(2):
                for i in range(j + 1):
                    hij = Q[i] @ w
                    H[i, j] += hij
                    w = w - hij * Q[i]
            H[j + 1, j] = np.linalg.norm(w)
            if not np.all(np.isfinite(H[: j + 2, j])):
                raise SolverError(
                    "NaN encountered in Arnoldi recurrence",
                    SolveStats(iters + j + 1, float("nan"), False),
                )

            for i in range(j):
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = t
            denom = np.hypot(H[j, j], H[j + 1, j])
            breakdown = H[j + 1, j] <= 1e-14 * denom
            if not breakdown:
                Q[j + 1] = w / H[j + 1, j]
            cs[j] = H[j, j] / denom
            sn[j] = H[j + 1, j] / denom
            H[j, j] = denom
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            k = j + 1
            if breakdown or abs(g[j + 1]) <= 0.5 * target:
                break

        y = solve_triangular(H[:k, :k], g[:k])
        x = x + Q[:k].T @ y
        iters += k
        r = b - apply(x)
        beta = np.linalg.norm(r)
        if not np.isfinite(beta):
            raise SolverError("NaN in GMRES iterate", SolveStats(iters, float("nan"), False))

    return x, SolveStats(iters, float(beta / bnorm), bool(beta <= target))
