import numpy as np
import pytest
import scipy.sparse as sp
from numpy.testing import assert_allclose, assert_array_equal

from sbp_fdec.mesh import build_mesh
from sbp_fdec.operators import (
    assemble,
    assemble_3d_complex,
    discrete_vector_calculus,
    poisson_matrix,
    system_matrix,
)
from sbp_fdec.sbp import get_operator, sbp_24, sbp_36


def _maxabs(a):
    a = sp.csr_array(a)
    return float(np.max(np.abs(a.data), initial=0.0))


def loop_diff_x(mesh, u):
    """x-differences of owned nodal data, neighbour node 0 closing each row."""
    N = mesh.N
    u = u.reshape(mesh.m, N, N)
    out = np.empty_like(u)
    for k in range(mesh.m):
        for j in range(N):
            for i in range(N):
                nxt = u[k, j, i + 1] if i + 1 < N else u[mesh.right[k], j, 0]
                out[k, j, i] = nxt - u[k, j, i]
    return out.ravel()


def loop_diff_y(mesh, u):
    N = mesh.N
    u = u.reshape(mesh.m, N, N)
    out = np.empty_like(u)
    for k in range(mesh.m):
        for j in range(N):
            for i in range(N):
                nxt = u[k, j + 1, i] if j + 1 < N else u[mesh.up[k], 0, i]
                out[k, j, i] = nxt - u[k, j, i]
    return out.ravel()


def test_difference_operators_match_loops(ops_rect):
    rng = np.random.default_rng(0)
    u = rng.standard_normal(ops_rect.n)
    assert_allclose(ops_rect.diff_x @ u, loop_diff_x(ops_rect.mesh, u), atol=1e-14)
    assert_allclose(ops_rect.diff_y @ u, loop_diff_y(ops_rect.mesh, u), atol=1e-14)


def test_derivative_factorisation_2d(ops_rect):
    assert _maxabs(ops_rect.deriv_x - ops_rect.vander_x @ ops_rect.diff_x) <= 1e-13
    assert _maxabs(ops_rect.deriv_y - ops_rect.vander_y @ ops_rect.diff_y) <= 1e-13


def test_deriv_x_is_elementwise_1d_derivative(ops_rect):
    mesh, D = ops_rect.mesh, ops_rect.elem.op.D
    N = mesh.N
    u = np.random.default_rng(2).standard_normal(ops_rect.n).reshape(mesh.m, N, N)
    got = (ops_rect.deriv_x @ u.ravel()).reshape(mesh.m, N, N + 1)
    for k in range(mesh.m):
        for j in range(N):
            row = np.append(u[k, j], u[mesh.right[k], j, 0])
            assert_allclose(got[k, j], D @ row / mesh.dx, atol=1e-12)
    got = (ops_rect.deriv_y @ u.ravel()).reshape(mesh.m, N + 1, N)
    for k in range(mesh.m):
        for i in range(N):
            col = np.append(u[k, :, i], u[mesh.up[k], 0, i])
            assert_allclose(got[k, :, i], D @ col / mesh.dy, atol=1e-12)


def test_differences_commute_exactly():
    for mx, my in [(1, 1), (2, 3), (3, 3)]:
        ops = assemble(build_mesh(mx, my, 7), sbp_24(8))
        c = ops.diff_x @ ops.diff_y - ops.diff_y @ ops.diff_x
        c.eliminate_zeros()
        assert c.nnz == 0
        assert_array_equal(np.unique(ops.diff_x.data), [-1.0, 1.0])


@pytest.mark.parametrize("mx,my,name,n", [(1, 1, "sbp_24", 8), (3, 2, "sbp_24", 9),
                                          (3, 3, "sbp_36", 12)])
def test_complex_exactness_2d(mx, my, name, n):
    ops = assemble(build_mesh(mx, my, n - 1), get_operator(name, n))
    vc = discrete_vector_calculus(ops)
    assert _maxabs(vc.rot @ vc.grad) <= 1e-14
    assert _maxabs(vc.div @ vc.curl) <= 1e-14


@pytest.mark.parametrize("op", [sbp_24(8), sbp_24(9), sbp_36(12)], ids=lambda o: f"{o.name}-{o.n_nodes}")
def test_complex_exactness_3d(op):
    c = assemble_3d_complex(op)
    n0, n1, n2, n3 = c.sizes()
    assert c.grad.shape == (n1, n0) and c.curl.shape == (n2, n1) and c.div.shape == (n3, n2)
    assert _maxabs(c.curl @ c.grad) <= 1e-14
    assert _maxabs(c.div @ c.curl) <= 1e-14


def test_3d_gradient_of_linear_field():
    op = sbp_24(8)
    c = assemble_3d_complex(op)
    x = op.nodes
    Z, Y, X = np.meshgrid(x, x, x, indexing="ij")
    f = (2 * X - Y + 3 * Z).ravel()
    g = c.nodal_1 @ (c.grad @ f)
    n = x.size**3
    assert_allclose(g[:n], 2.0, atol=1e-12)
    assert_allclose(g[n:2 * n], -1.0, atol=1e-12)
    assert_allclose(g[2 * n:], 3.0, atol=1e-12)


def test_mass_matrices(ops_rect):
    area = ops_rect.mesh.L_x * ops_rect.mesh.L_y
    assert ops_rect.mass_hat_diag.sum() == pytest.approx(area, rel=1e-13)
    assert ops_rect.mass.diagonal().sum() == pytest.approx(area, rel=1e-13)
    assert np.all(ops_rect.mass_hat_diag > 0)


def test_energy_matrices_symmetric_positive(ops_rect):
    for K in (ops_rect.K_x, ops_rect.K_y):
        assert _maxabs(K - K.T) <= 1e-15
        assert np.linalg.eigvalsh(K.toarray()).min() > 0


def test_poisson_structure(ops_rect):
    J, K = poisson_matrix(ops_rect)
    assert _maxabs(J + J.T) == 0.0
    assert_allclose((J @ K).toarray(), system_matrix(ops_rect).toarray(), atol=1e-12)


def test_cfl_example_weight():
    ops = assemble(build_mesh(2, 2, 11), sbp_24(12))
    assert ops.mass_hat_diag.min() == pytest.approx((17 / 264) ** 2, rel=1e-14)
