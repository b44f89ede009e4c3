from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from sbp_fdec import sbp
from sbp_fdec.sbp import (
    SBP_24_COEFFS,
    OperatorError,
    format_coefficients,
    get_operator,
    load_operator_file,
    parse_coefficients,
    sbp_24,
    sbp_36,
    verify_sbp,
)

SIZES_24 = st.integers(8, 60)
SIZES_36 = st.integers(12, 60)


@given(SIZES_24)
def test_sbp24_structure(n):
    op = sbp_24(n)
    rep = verify_sbp(op)
    assert rep.passed, str(rep)
    assert_allclose(op.M @ op.D + op.D.T @ op.M, op.B, atol=1e-12)


@given(SIZES_36)
def test_sbp36_structure(n):
    rep = verify_sbp(sbp_36(n))
    assert rep.passed, str(rep)


def test_sbp24_boundary_row_and_weights():
    op = sbp_24(10)
    h = 1.0 / 9
    assert_allclose(op.D[0, :4] * h, [-24 / 17, 59 / 34, -4 / 17, -3 / 34], rtol=1e-15)
    assert_allclose(op.weights[:4] / h, [17 / 48, 59 / 48, 43 / 48, 49 / 48], rtol=1e-15)
    assert_allclose(op.weights[4:6] / h, 1.0)
    # right boundary mirrors the left with a sign flip
    assert_allclose(op.D[::-1, ::-1], -op.D, atol=1e-12)


@pytest.mark.parametrize("name,n,order", [("sbp_24", 16, 2), ("sbp_36", 20, 3)])
def test_polynomial_exactness_against_analytic_derivative(name, n, order):
    op = get_operator(name, n)
    x = op.nodes
    for k in range(order + 1):
        assert_allclose(op.D @ x**k, k * x ** max(k - 1, 0) if k else 0.0, atol=1e-11)
    # one order higher is no longer exact near the boundary
    k = order + 1
    assert np.max(np.abs(op.D @ x**k - k * x ** (k - 1))) > 1e-8


@pytest.mark.parametrize("name,n", [("sbp_24", 12), ("sbp_36", 14)])
def test_quadrature_integrates_by_parts(name, n):
    op = get_operator(name, n)
    rng = np.random.default_rng(0)
    u, v = rng.standard_normal((2, n))
    lhs = u @ op.M @ (op.D @ v) + (op.D @ u) @ op.M @ v
    assert lhs == pytest.approx(u[-1] * v[-1] - u[0] * v[0], abs=1e-11)


@pytest.mark.parametrize("name,n", [("sbp_24", 16), ("sbp_36", 24)])
def test_weights_integrate_smooth_function(name, n):
    op = get_operator(name, n)
    approx = op.weights @ np.exp(op.nodes)
    assert approx == pytest.approx(np.e - 1.0, rel=1e-5)


def test_too_few_nodes():
    with pytest.raises(OperatorError):
        sbp_24(7)
    with pytest.raises(OperatorError):
        sbp_36(11)
    with pytest.raises(OperatorError):
        get_operator("sbp_99", 12)


def test_scaled_operator_keeps_sbp():
    op = sbp_24(9).scaled(2.5)
    assert op.h == pytest.approx(2.5 / 8)
    assert verify_sbp(op).passed


def test_coefficient_text_roundtrip():
    text = format_coefficients(SBP_24_COEFFS)
    back = parse_coefficients(text)
    assert back == SBP_24_COEFFS
    assert isinstance(back.block[0][0], Fraction)


def test_packaged_sbp36_file_loads(tmp_path):
    src = sbp._packaged_coefficients("sbp_36.txt")
    path = tmp_path / "op.txt"
    path.write_text(format_coefficients(src))
    op = load_operator_file(path, 12)
    assert_allclose(op.D, sbp_36(12).D, rtol=0, atol=0)


def test_classical_variant_is_also_valid(tmp_path):
    coeffs = sbp._packaged_coefficients("sbp_36_classical.txt")
    path = tmp_path / "classical.txt"
    path.write_text(format_coefficients(coeffs))
    assert verify_sbp(load_operator_file(path, 13)).passed


def test_corrupted_file_rejected(tmp_path):
    coeffs = SBP_24_COEFFS
    bad_block = ((Fraction(-3, 2),) + coeffs.block[0][1:],) + coeffs.block[1:]
    bad = type(coeffs)(bad_block, coeffs.stencil, coeffs.boundary_weights, 2, 4)
    path = tmp_path / "bad.txt"
    path.write_text(format_coefficients(bad))
    with pytest.raises(OperatorError):
        load_operator_file(path, 12)
    rep = verify_sbp(load_operator_file(path, 12, check=False))
    assert not rep.checks["sbp_identity"] and not rep.checks["row_sum"]
    assert "FAIL" in str(rep)


def test_malformed_file_rejected():
    with pytest.raises(ValueError):
        parse_coefficients("1\n2\n")
    with pytest.raises(ValueError):
        parse_coefficients("2, 2, 3, 1, 2\n1/0\n")
