"""Periodic Cartesian multi-element mesh and the per-element DOF layout.

Elements are numbered lexicographically with x fastest, ``k = kx + m_x * ky``.
Inside an element every scalar field stores ``N * N`` coefficients, again x
fastest.  Lagrange directions store nodes ``0..N-1`` (node ``N`` belongs to the
neighbour); histopolation directions store sub-intervals ``1..N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from .linalg import from_triplets
from .sbp import SbpOperator


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class PeriodicMesh2D:
    m_x: int
    m_y: int
    N: int
    x_min: float = -1.0
    x_max: float = 1.0
    y_min: float = -1.0
    y_max: float = 1.0

    def __post_init__(self) -> None:
        if self.m_x < 1 or self.m_y < 1:
            raise MeshError("element counts must be at least 1")
        if self.N < 1:
            raise MeshError("N must be at least 1")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise MeshError("domain lengths must be positive")

    @property
    def m(self) -> int:
        return self.m_x * self.m_y

    @property
    def L_x(self) -> float:
        return self.x_max - self.x_min

    @property
    def L_y(self) -> float:
        return self.y_max - self.y_min

    @property
    def dx(self) -> float:
        return self.L_x / self.m_x

    @property
    def dy(self) -> float:
        return self.L_y / self.m_y

    @property
    def n_dofs(self) -> int:
        """Coefficients per scalar field."""
        return self.m * self.N * self.N

    def element(self, kx: int, ky: int) -> int:
        return (kx % self.m_x) + self.m_x * (ky % self.m_y)

    def element_coords(self, k) -> Tuple[np.ndarray, np.ndarray]:
        k = np.asarray(k)
        return k % self.m_x, k // self.m_x

    def _shift(self, sx: int, sy: int) -> np.ndarray:
        kx, ky = self.element_coords(np.arange(self.m))
        return self.element(kx + sx, ky + sy)

    @property
    def right(self) -> np.ndarray:
        return self._shift(1, 0)

    @property
    def left(self) -> np.ndarray:
        return self._shift(-1, 0)

    @property
    def up(self) -> np.ndarray:
        return self._shift(0, 1)

    @property
    def down(self) -> np.ndarray:
        return self._shift(0, -1)


def build_mesh(
    m_x: int,
    m_y: int,
    N: int,
    x_bounds: Tuple[float, float] = (-1.0, 1.0),
    y_bounds: Tuple[float, float] = (-1.0, 1.0),
) -> PeriodicMesh2D:
    return PeriodicMesh2D(m_x, m_y, N, x_bounds[0], x_bounds[1], y_bounds[0], y_bounds[1])


def _permutation(targets: np.ndarray) -> sp.csr_array:
    m = targets.size
    return from_triplets(np.arange(m), targets, np.ones(m), (m, m))


def neighbor_matrices(mesh: PeriodicMesh2D) -> Tuple[sp.csr_array, sp.csr_array]:
    """``P_r[i, j] = 1`` iff ``j`` is the right neighbour of ``i``; ``P_u`` likewise."""
    return _permutation(mesh.right), _permutation(mesh.up)


def node_coordinates(mesh: PeriodicMesh2D, op: SbpOperator) -> Tuple[np.ndarray, np.ndarray]:
    """Physical node positions, each of shape ``(m, N+1, N+1)`` indexed ``[k, j, i]``.

    ``i`` runs along x and ``j`` along y; node ``N`` coincides with node 0 of
    the next element.
    """
    if op.N != mesh.N:
        raise MeshError(f"operator has N={op.N}, mesh has N={mesh.N}")
    kx, ky = mesh.element_coords(np.arange(mesh.m))
    t = np.arange(mesh.N + 1) / mesh.N
    x = mesh.x_min + (kx[:, None] + t[None, :]) * mesh.dx
    y = mesh.y_min + (ky[:, None] + t[None, :]) * mesh.dy
    X = np.broadcast_to(x[:, None, :], (mesh.m, mesh.N + 1, mesh.N + 1)).copy()
    Y = np.broadcast_to(y[:, :, None], (mesh.m, mesh.N + 1, mesh.N + 1)).copy()
    return X, Y


# {{{ DOF layout

# (x offset, y offset) of the stored index range: 0 for Lagrange, 1 for histopolation
SPACES = {
    "W0": (0, 0),
    "W1x": (0, 1),
    "W1y": (1, 0),
    "W2": (1, 1),
}


@dataclass(frozen=True)
class DofLayout:
    mesh: PeriodicMesh2D
    space: str

    def __post_init__(self) -> None:
        if self.space not in SPACES:
            raise MeshError(f"unknown space {self.space!r}")

    @property
    def size(self) -> int:
        return self.mesh.n_dofs

    @property
    def block(self) -> int:
        return self.mesh.N * self.mesh.N

    def index(self, k, i, j):
        """Global index of local coefficient ``(i, j)`` in element ``k``."""
        ox, oy = SPACES[self.space]
        N = self.mesh.N
        i = np.asarray(i) - ox
        j = np.asarray(j) - oy
        if np.any((i < 0) | (i >= N) | (j < 0) | (j >= N)):
            raise IndexError("local index outside the stored range")
        return np.asarray(k) * self.block + j * N + i

    def location(self, g):
        """Inverse of :meth:`index`: ``(k, i, j)``."""
        ox, oy = SPACES[self.space]
        N = self.mesh.N
        g = np.asarray(g)
        k, r = np.divmod(g, self.block)
        j, i = np.divmod(r, N)
        return k, i + ox, j + oy


# }}}
