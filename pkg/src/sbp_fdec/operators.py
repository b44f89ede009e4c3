"""Global 2D operators on a periodic mesh and the single-element 3D complex.

Kronecker factors are ordered (element) (x) (y) (x-direction), so the
rightmost factor runs fastest, matching the x-fastest DOF layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from . import linalg
from .linalg import kron
from .mesh import PeriodicMesh2D, neighbor_matrices
from .mimetic import ElementOps, element_ops
from .sbp import SbpOperator


def _kron3(a, b, c) -> sp.csr_array:
    return kron(kron(a, b), c)


@dataclass(frozen=True)
class GlobalOperators2D:
    """Assembled operators; every matrix is a :class:`scipy.sparse.csr_array`.

    ``mass_hat`` acts on Lagrange x Lagrange coefficients, ``mass_x`` on
    nodal values of ``E^x`` (``V_y E^x``), ``mass_y`` on nodal values of
    ``E^y`` and ``mass`` on full nodal element data.  ``K_x``/``K_y`` are the
    energy matrices of the two electric components.
    """

    mesh: PeriodicMesh2D
    elem: ElementOps = field(repr=False)
    mass_hat: sp.csr_array = field(repr=False)
    mass_x: sp.csr_array = field(repr=False)
    mass_y: sp.csr_array = field(repr=False)
    mass: sp.csr_array = field(repr=False)
    diff_x: sp.csr_array = field(repr=False)
    diff_y: sp.csr_array = field(repr=False)
    deriv_x: sp.csr_array = field(repr=False)
    deriv_y: sp.csr_array = field(repr=False)
    vander_x: sp.csr_array = field(repr=False)
    vander_y: sp.csr_array = field(repr=False)
    K_x: sp.csr_array = field(repr=False)
    K_y: sp.csr_array = field(repr=False)

    @property
    def n(self) -> int:
        return self.mesh.n_dofs

    @property
    def mass_hat_diag(self) -> np.ndarray:
        return self.mass_hat.diagonal()

    @property
    def vander_xy(self) -> sp.csr_array:
        """Nodal evaluation of histopolation x histopolation data, ``(m(N+1)^2, mN^2)``."""
        m = self.mesh
        return _kron3(linalg.identity(m.m), self.elem.V, self.elem.V) / (m.dx * m.dy)


def assemble_mass(mesh: PeriodicMesh2D, elem: ElementOps):
    """``(mass_hat, mass_x, mass_y, mass)`` as diagonal sparse matrices."""
    if elem.N != mesh.N:
        raise ValueError(f"operator has N={elem.N}, mesh has N={mesh.N}")
    I = linalg.identity(mesh.m)
    w = linalg.diag(elem.weights)
    wh = linalg.diag(elem.weights_hat)
    s = mesh.dx * mesh.dy
    return (
        s * _kron3(I, wh, wh),
        s * _kron3(I, w, wh),
        s * _kron3(I, wh, w),
        s * _kron3(I, w, w),
    )


def assemble_diff(mesh: PeriodicMesh2D, elem: ElementOps):
    """``(diff_x, diff_y, deriv_x, deriv_y, vander_x, vander_y)``."""
    if elem.N != mesh.N:
        raise ValueError(f"operator has N={elem.N}, mesh has N={mesh.N}")
    Im = linalg.identity(mesh.m)
    IN = linalg.identity(mesh.N)
    Pr, Pu = neighbor_matrices(mesh)
    diff_x = _kron3(Im, IN, elem.diff_hat) + _kron3(Pr, IN, elem.diff_tilde)
    diff_y = _kron3(Im, elem.diff_hat, IN) + _kron3(Pu, elem.diff_tilde, IN)
    deriv_x = (_kron3(Im, IN, elem.D_hat) + _kron3(Pr, IN, elem.D_tilde)) / mesh.dx
    deriv_y = (_kron3(Im, elem.D_hat, IN) + _kron3(Pu, elem.D_tilde, IN)) / mesh.dy
    vander_x = _kron3(Im, IN, elem.V) / mesh.dx
    vander_y = _kron3(Im, elem.V, IN) / mesh.dy
    return tuple(linalg.as_csr(a) for a in (diff_x, diff_y, deriv_x, deriv_y, vander_x, vander_y))


def assemble(mesh: PeriodicMesh2D, op: SbpOperator) -> GlobalOperators2D:
    elem = element_ops(op)
    mass_hat, mass_x, mass_y, mass = assemble_mass(mesh, elem)
    diff_x, diff_y, deriv_x, deriv_y, vander_x, vander_y = assemble_diff(mesh, elem)
    K_x = linalg.as_csr(vander_y.T @ mass_x @ vander_y)
    K_y = linalg.as_csr(vander_x.T @ mass_y @ vander_x)
    return GlobalOperators2D(
        mesh=mesh,
        elem=elem,
        mass_hat=mass_hat,
        mass_x=mass_x,
        mass_y=mass_y,
        mass=mass,
        diff_x=diff_x,
        diff_y=diff_y,
        deriv_x=deriv_x,
        deriv_y=deriv_y,
        vander_x=vander_x,
        vander_y=vander_y,
        K_x=K_x,
        K_y=K_y,
    )


@dataclass(frozen=True)
class VectorCalculus2D:
    """Coefficient-level 2D operators as sparse block matrices.

    ``grad`` and ``curl`` map a scalar to a stacked ``(x, y)`` pair, ``rot``
    (vector-to-scalar curl) and ``div`` map a stacked pair to a scalar.
    """

    grad: sp.csr_array
    curl: sp.csr_array
    rot: sp.csr_array
    div: sp.csr_array


def discrete_vector_calculus(ops: GlobalOperators2D) -> VectorCalculus2D:
    Dx, Dy = ops.diff_x, ops.diff_y
    return VectorCalculus2D(
        grad=linalg.as_csr(sp.vstack([Dx, Dy])),
        curl=linalg.as_csr(sp.vstack([Dy, -Dx])),
        rot=linalg.as_csr(sp.hstack([-Dy, Dx])),
        div=linalg.as_csr(sp.hstack([Dx, Dy])),
    )


def poisson_matrix(ops: GlobalOperators2D) -> Tuple[sp.csr_array, sp.csr_array]:
    """Poisson matrix ``J`` and block-diagonal energy matrix ``K``.

    The semi-discrete scheme reads ``dU/dt = J K U`` with ``U = (E^x, E^y, B^z)``
    and energy ``H = U^T K U / 2``.
    """
    inv = linalg.diag(1.0 / ops.mass_hat_diag)
    Dx, Dy = ops.diff_x, ops.diff_y
    J = sp.block_array(
        [
            [None, None, Dy @ inv],
            [None, None, -(Dx @ inv)],
            [-(inv @ Dy.T), inv @ Dx.T, None],
        ]
    )
    K = sp.block_diag([ops.K_x, ops.K_y, ops.mass_hat])
    return linalg.as_csr(J), linalg.as_csr(K)


def system_matrix(ops: GlobalOperators2D) -> sp.csr_array:
    """``J @ K`` assembled once, for fast right-hand-side evaluation."""
    inv = linalg.diag(1.0 / ops.mass_hat_diag)
    Dx, Dy = ops.diff_x, ops.diff_y
    L = sp.block_array(
        [
            [None, None, Dy],
            [None, None, -Dx],
            [-(inv @ Dy.T @ ops.K_x), inv @ Dx.T @ ops.K_y, None],
        ]
    )
    return linalg.as_csr(L)


# {{{ 3D single element


@dataclass(frozen=True)
class DeRham3D:
    """Single-element 3D complex on the reference cube.

    Coefficient spaces per component (directions x, y, z; ``l`` Lagrange with
    ``N + 1`` values, ``h`` histopolation with ``N``): 0-forms ``lll``, 1-forms
    ``(hll, lhl, llh)``, 2-forms ``(lhh, hlh, hhl)``, 3-forms ``hhh``.  The
    ``nodal_*`` maps evaluate coefficients at the ``(N+1)^3`` grid nodes.
    """

    N: int
    grad: sp.csr_array = field(repr=False)
    curl: sp.csr_array = field(repr=False)
    div: sp.csr_array = field(repr=False)
    nodal_1: sp.csr_array = field(repr=False)
    nodal_2: sp.csr_array = field(repr=False)
    nodal_3: sp.csr_array = field(repr=False)

    def sizes(self):
        n, l = self.N, self.N + 1
        return l**3, 3 * n * l * l, 3 * n * n * l, n**3


def assemble_3d_complex(op: SbpOperator) -> DeRham3D:
    elem = element_ops(op)
    N = op.N
    L = linalg.identity(N + 1)
    H = linalg.identity(N)
    d = sp.csr_array(elem.diff)
    V = sp.csr_array(elem.V)

    def k3(z, y, x):
        return reduce(kron, (z, y, x))

    grad = sp.vstack([k3(L, L, d), k3(L, d, L), k3(d, L, L)])
    curl = sp.block_array(
        [
            [None, -k3(d, H, L), k3(H, d, L)],
            [k3(d, L, H), None, -k3(H, L, d)],
            [-k3(L, d, H), k3(L, H, d), None],
        ]
    )
    div = sp.hstack([k3(H, H, d), k3(H, d, H), k3(d, H, H)])
    nodal_1 = sp.block_diag([k3(L, L, V), k3(L, V, L), k3(V, L, L)])
    nodal_2 = sp.block_diag([k3(V, V, L), k3(V, L, V), k3(L, V, V)])
    nodal_3 = k3(V, V, V)
    return DeRham3D(
        N=N,
        grad=linalg.as_csr(grad),
        curl=linalg.as_csr(curl),
        div=linalg.as_csr(div),
        nodal_1=linalg.as_csr(nodal_1),
        nodal_2=linalg.as_csr(nodal_2),
        nodal_3=linalg.as_csr(nodal_3),
    )


# }}}
