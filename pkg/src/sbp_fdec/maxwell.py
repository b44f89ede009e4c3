"""Semi-discrete 2D transverse-electric Maxwell equations.

State coefficients (each a length ``m N^2`` vector in the mesh DOF layout):

* ``ex``: integrals of ``E^x`` over y sub-intervals along x nodes,
* ``ey``: integrals of ``E^y`` over x sub-intervals along y nodes,
* ``bz``: nodal values of ``B^z``.

The weak form evolves ``d ex/dt = diff_y bz``, ``d ey/dt = -diff_x bz`` and
``mass_hat d bz/dt = diff_x^T K_y ey - diff_y^T K_x ex``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from .mesh import node_coordinates
from .operators import GlobalOperators2D


@dataclass(frozen=True)
class MaxwellState:
    ex: np.ndarray
    ey: np.ndarray
    bz: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        for name in ("ex", "ey", "bz"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if not (self.ex.shape == self.ey.shape == self.bz.shape):
            raise ValueError("state components must have equal length")

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.ex, self.ey, self.bz])

    @classmethod
    def from_vector(cls, u: np.ndarray, t: float = 0.0) -> "MaxwellState":
        ex, ey, bz = np.split(np.asarray(u, dtype=np.float64), 3)
        return cls(ex, ey, bz, t)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.as_vector()).all())


def zero_state(ops: GlobalOperators2D, t: float = 0.0) -> MaxwellState:
    n = ops.n
    return MaxwellState(np.zeros(n), np.zeros(n), np.zeros(n), t)


def random_state(ops: GlobalOperators2D, rng: np.random.Generator) -> MaxwellState:
    n = ops.n
    return MaxwellState(rng.standard_normal(n), rng.standard_normal(n), rng.standard_normal(n))


# {{{ test problem

Field = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class TestCase:
    """Closed-form solution on a rectangle.

    ``ex_line(x, y0, y1, t)`` integrates ``E^x`` in y along a vertical line and
    ``ey_line(x0, x1, y, t)`` integrates ``E^y`` in x; when missing, the
    integrals are evaluated by composite Gauss-Legendre quadrature.
    """

    name: str
    ex: Field
    ey: Field
    bz: Field
    bounds: Tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    ex_line: Optional[Callable] = None
    ey_line: Optional[Callable] = None

    __test__ = False  # not a pytest class


_S2 = math.sqrt(2.0)


def _standing_wave() -> TestCase:
    pi = np.pi

    def ex(x, y, t):
        return -np.cos(pi * x + pi) * np.sin(pi * y + pi) * np.sin(_S2 * pi * t) / _S2

    def ey(x, y, t):
        return np.sin(pi * x + pi) * np.cos(pi * y + pi) * np.sin(_S2 * pi * t) / _S2

    def bz(x, y, t):
        return np.cos(pi * x + pi) * np.cos(pi * y + pi) * np.cos(_S2 * pi * t)

    def anti_sin(a):
        # antiderivative of sin(pi s + pi)
        return -np.cos(pi * a + pi) / pi

    def ex_line(x, y0, y1, t):
        return (
            -np.cos(pi * x + pi) * (anti_sin(y1) - anti_sin(y0)) * np.sin(_S2 * pi * t) / _S2
        )

    def ey_line(x0, x1, y, t):
        return np.cos(pi * y + pi) * (anti_sin(x1) - anti_sin(x0)) * np.sin(_S2 * pi * t) / _S2

    return TestCase("standing_wave", ex, ey, bz, ex_line=ex_line, ey_line=ey_line)


STANDING_WAVE = _standing_wave()


def line_integral(f: Callable[[np.ndarray], np.ndarray], a, b, points: int = 10) -> np.ndarray:
    """Composite Gauss-Legendre rule: ``points`` nodes on each ``[a, b]``."""
    s, w = np.polynomial.legendre.leggauss(points)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    vals = sum(wk * f(mid + half * sk) for sk, wk in zip(s, w))
    return half * vals


def _grids(ops: GlobalOperators2D):
    mesh = ops.mesh
    X, Y = node_coordinates(mesh, ops.elem.op)
    return X, Y, mesh.N


def exact_reduction(
    ops: GlobalOperators2D,
    case: TestCase,
    t: float,
    quadrature: bool = False,
) -> MaxwellState:
    """Degrees of freedom of the exact solution at time ``t``.

    ``bz`` takes nodal samples; ``ex``/``ey`` take sub-interval line integrals,
    in closed form when the test case provides them unless ``quadrature``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    X, Y, N = _grids(ops)
    # owned nodes 0..N-1; sub-interval j spans nodes j and j+1
    x, y = X[:, :N, :N], Y[:, :N, :N]
    x1, y1 = X[:, :N, 1:], Y[:, 1:, :N]
    bz = case.bz(x, y, t)

    if case.ex_line is not None and not quadrature:
        ex = case.ex_line(x, y, y1, t)
    else:
        ex = line_integral(lambda s: case.ex(x, s, t), y, y1)
    if case.ey_line is not None and not quadrature:
        ey = case.ey_line(x, x1, y, t)
    else:
        ey = line_integral(lambda s: case.ey(s, y, t), x, x1)
    return MaxwellState(ex.ravel(), ey.ravel(), bz.ravel(), t)


def initial_state(ops: GlobalOperators2D, case: TestCase = STANDING_WAVE) -> MaxwellState:
    return exact_reduction(ops, case, 0.0)


# }}}


# {{{ right-hand sides


def rhs_weak(ops: GlobalOperators2D, state: MaxwellState) -> MaxwellState:
    """Time derivative of ``state`` (returned with the same ``t``)."""
    dex = ops.diff_y @ state.bz
    dey = -(ops.diff_x @ state.bz)
    rhs = ops.diff_x.T @ (ops.K_y @ state.ey) - ops.diff_y.T @ (ops.K_x @ state.ex)
    return MaxwellState(dex, dey, rhs / ops.mass_hat_diag, state.t)


def rhs_strong_faraday(ops: GlobalOperators2D, state: MaxwellState) -> np.ndarray:
    """``d bz/dt`` from element-local derivatives of the nodal electric field.

    Away from the lower/left element edges this is the local SBP derivative;
    on them it is the weighted average of the two one-sided derivatives plus a
    jump penalty, both scaled by ``1 / (w_0 + w_N)``.  Equal to the weak form
    by the SBP property.
    """
    mesh = ops.mesh
    N, m = mesh.N, mesh.m
    D = ops.elem.op.D
    w0, wN = ops.elem.weights[0], ops.elem.weights[-1]
    left, down = mesh.left, mesh.down

    ey = (ops.vander_x @ state.ey).reshape(m, N, N + 1)  # [k, y node, x node]
    ex = (ops.vander_y @ state.ex).reshape(m, N + 1, N)  # [k, y node, x node]

    dey = np.einsum("si,kli->kls", D, ey)
    x_part = -dey[:, :, :N] / mesh.dx
    x_part[:, :, 0] = (
        ey[left, :, N] - ey[:, :, 0] - w0 * dey[:, :, 0] - wN * dey[left, :, N]
    ) / (mesh.dx * (w0 + wN))

    dex = np.einsum("lj,kjs->kls", D, ex)
    y_part = -dex[:, :N, :] / mesh.dy
    y_part[:, 0, :] = (
        ex[down, N, :] - ex[:, 0, :] - w0 * dex[:, 0, :] - wN * dex[down, N, :]
    ) / (mesh.dy * (w0 + wN))

    return (x_part - y_part).ravel()


# }}}


# {{{ diagnostics


def hamiltonian(ops: GlobalOperators2D, state: MaxwellState) -> float:
    return 0.5 * float(
        state.ex @ (ops.K_x @ state.ex)
        + state.ey @ (ops.K_y @ state.ey)
        + state.bz @ (ops.mass_hat_diag * state.bz)
    )


def energy_gradient(ops: GlobalOperators2D, state: MaxwellState) -> np.ndarray:
    return np.concatenate(
        [ops.K_x @ state.ex, ops.K_y @ state.ey, ops.mass_hat_diag * state.bz]
    )


class Divergence(NamedTuple):
    coeff: np.ndarray
    nodal: np.ndarray
    max_abs_nodal: float
    max_abs_coeff: float


def divergence(ops: GlobalOperators2D, state: MaxwellState) -> Divergence:
    coeff = ops.diff_x @ state.ex + ops.diff_y @ state.ey
    nodal = ops.vander_xy @ coeff
    return Divergence(
        coeff,
        nodal,
        float(np.max(np.abs(nodal), initial=0.0)),
        float(np.max(np.abs(coeff), initial=0.0)),
    )


def _error_norms(ops: GlobalOperators2D, ax, ay, eb) -> Tuple[float, float]:
    e2 = 0.5 * (ax @ (ops.mass_x @ ax) + ay @ (ops.mass_y @ ay))
    b2 = eb @ (ops.mass_hat_diag * eb)
    return math.sqrt(max(e2, 0.0)), math.sqrt(max(b2, 0.0))


def l2_errors(
    ops: GlobalOperators2D,
    state: MaxwellState,
    case: TestCase = STANDING_WAVE,
) -> Tuple[float, float]:
    """``(err_E, err_B)`` in the discrete L2 norms of the nodal grids.

    The electric field is reconstructed at the nodes (``V E``) and compared
    with point samples of the exact field in the ``mass_x``/``mass_y`` norms;
    ``err_E`` is the root mean square of the two component errors.  ``err_B``
    compares nodal ``B^z`` in the ``mass_hat`` norm.
    """
    X, Y, N = _grids(ops)
    t = state.t
    ax = ops.vander_y @ state.ex - case.ex(X[:, :, :N], Y[:, :, :N], t).ravel()
    ay = ops.vander_x @ state.ey - case.ey(X[:, :N, :], Y[:, :N, :], t).ravel()
    eb = state.bz - case.bz(X[:, :N, :N], Y[:, :N, :N], t).ravel()
    return _error_norms(ops, ax, ay, eb)


def l2_difference(ops: GlobalOperators2D, a: MaxwellState, b: MaxwellState) -> Tuple[float, float]:
    """Same norms as :func:`l2_errors`, between two discrete states."""
    return _error_norms(
        ops,
        ops.vander_y @ (a.ex - b.ex),
        ops.vander_x @ (a.ey - b.ey),
        a.bz - b.bz,
    )


# }}}
