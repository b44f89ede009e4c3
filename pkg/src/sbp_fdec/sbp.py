"""Diagonal-norm first-derivative SBP operators on the reference element [0, 1].

An operator with ``N + 1`` equidistant nodes has spacing ``h = 1/N``; ``D``
carries the ``1/h`` factor and the weights carry ``h``, so that

    diag(w) D + D^T diag(w) = B,    B = diag(-1, 0, ..., 0, 1).

Two families are registered:

``sbp_24``
    interior order 4, boundary order 2, 4-row boundary blocks.
``sbp_36``
    interior order 6, boundary order 3, 6-row boundary blocks.  The
    coefficients are read from ``data/sbp_36.txt`` and verified on load.

Operator data files hold one value per line (integers or ``p/q``
rationals, ``#`` comment lines ignored) in the order::

    block_rows, block_cols, stencil_len, boundary_order, interior_order
    block_rows * block_cols boundary-block entries of D (row-major, h = 1)
    stencil_len interior stencil entries of D (h = 1, centred)
    block_rows boundary weights (h = 1)

The right boundary block is the left block mirrored with reversed sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

F = Fraction

SBP_TOL = 1e-13
RANK_TOL = 1e-10


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class SbpOperator:
    """A 1D SBP operator: nodal derivative ``D`` and quadrature ``weights``.

    ``length`` is the element length the operator is scaled to (1 for the
    reference element).
    """

    name: str
    D: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    boundary_order: int
    interior_order: int
    block_rows: int
    length: float = 1.0

    @property
    def n_nodes(self) -> int:
        return self.D.shape[0]

    @property
    def N(self) -> int:
        return self.n_nodes - 1

    @property
    def h(self) -> float:
        return self.length / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_nodes)

    @property
    def M(self) -> np.ndarray:
        return np.diag(self.weights)

    @property
    def B(self) -> np.ndarray:
        return boundary_matrix(self.n_nodes)

    def scaled(self, length: float) -> "SbpOperator":
        """The same operator on an element of the given length."""
        if length <= 0:
            raise OperatorError("element length must be positive")
        s = length / self.length
        return replace(self, D=self.D / s, weights=self.weights * s, length=length)


def boundary_matrix(n: int) -> np.ndarray:
    b = np.zeros((n, n))
    b[0, 0] = -1.0
    b[-1, -1] = 1.0
    return b


@dataclass(frozen=True)
class OperatorCoefficients:
    """Exact unit-spacing coefficients of an SBP family."""

    block: Tuple[Tuple[Fraction, ...], ...]
    stencil: Tuple[Fraction, ...]
    boundary_weights: Tuple[Fraction, ...]
    boundary_order: int
    interior_order: int

    @property
    def min_nodes(self) -> int:
        # left and right boundary blocks must not overlap
        return 2 * len(self.block)


def assemble(name: str, coeffs: OperatorCoefficients, n_nodes: int) -> SbpOperator:
    """Build the ``n_nodes``-point operator on [0, 1] from its coefficients."""
    if n_nodes < coeffs.min_nodes:
        raise OperatorError(
            f"{name} needs at least {coeffs.min_nodes} nodes, got {n_nodes}"
        )
    block = np.array([[float(v) for v in row] for row in coeffs.block])
    rows, cols = block.shape
    if cols > n_nodes:
        raise OperatorError(f"{name}: boundary block wider than {n_nodes} nodes")
    stencil = np.array([float(v) for v in coeffs.stencil])
    half = len(stencil) // 2

    D = np.zeros((n_nodes, n_nodes))
    for i in range(rows, n_nodes - rows):
        D[i, i - half : i + half + 1] = stencil
    D[:rows, :cols] = block
    D[n_nodes - rows :, n_nodes - cols :] = -block[::-1, ::-1]

    w = np.ones(n_nodes)
    bw = np.array([float(v) for v in coeffs.boundary_weights])
    w[:rows] = bw
    w[n_nodes - rows :] = bw[::-1]

    N = n_nodes - 1
    return SbpOperator(
        name=name,
        D=D * N,
        weights=w / N,
        boundary_order=coeffs.boundary_order,
        interior_order=coeffs.interior_order,
        block_rows=rows,
    )


SBP_24_COEFFS = OperatorCoefficients(
    block=(
        (F(-24, 17), F(59, 34), F(-4, 17), F(-3, 34), F(0), F(0)),
        (F(-1, 2), F(0), F(1, 2), F(0), F(0), F(0)),
        (F(4, 43), F(-59, 86), F(0), F(59, 86), F(-4, 43), F(0)),
        (F(3, 98), F(0), F(-59, 98), F(0), F(32, 49), F(-4, 49)),
    ),
    stencil=(F(1, 12), F(-2, 3), F(0), F(2, 3), F(-1, 12)),
    boundary_weights=(F(17, 48), F(59, 48), F(43, 48), F(49, 48)),
    boundary_order=2,
    interior_order=4,
)


def _parse_rationals(lines: Sequence[str]) -> List[Fraction]:
    values = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(Fraction(line))
        except (ValueError, ZeroDivisionError) as exc:
            raise OperatorError(f"bad coefficient line {line!r}") from exc
    return values


def parse_coefficients(text: str) -> OperatorCoefficients:
    """Parse an operator data file (see module docstring for the layout)."""
    v = _parse_rationals(text.splitlines())
    if len(v) < 5:
        raise OperatorError("operator file header incomplete")
    header = v[:5]
    if any(x.denominator != 1 or x < 0 for x in header):
        raise OperatorError("operator file header must hold non-negative integers")
    rows, cols, slen, p, q = (int(x) for x in header)
    expected = 5 + rows * cols + slen + rows
    if len(v) != expected:
        raise OperatorError(f"operator file holds {len(v)} values, expected {expected}")
    if slen % 2 != 1:
        raise OperatorError("interior stencil length must be odd")
    body = v[5:]
    block = tuple(tuple(body[r * cols : (r + 1) * cols]) for r in range(rows))
    stencil = tuple(body[rows * cols : rows * cols + slen])
    weights = tuple(body[rows * cols + slen :])
    return OperatorCoefficients(block, stencil, weights, p, q)


def format_coefficients(coeffs: OperatorCoefficients) -> str:
    rows = len(coeffs.block)
    cols = len(coeffs.block[0])
    vals = [rows, cols, len(coeffs.stencil), coeffs.boundary_order, coeffs.interior_order]
    vals += [v for row in coeffs.block for v in row]
    vals += list(coeffs.stencil) + list(coeffs.boundary_weights)
    return "\n".join(str(Fraction(v)) for v in vals) + "\n"


@lru_cache(maxsize=None)
def _packaged_coefficients(filename: str) -> OperatorCoefficients:
    text = resources.files("sbp_fdec").joinpath("data").joinpath(filename).read_text()
    return parse_coefficients(text)


def load_operator_file(path: Union[str, Path], n_nodes: int, check: bool = True) -> SbpOperator:
    """Build an operator from a data file, optionally gated by :func:`verify_sbp`."""
    path = Path(path)
    op = assemble(path.stem, parse_coefficients(path.read_text()), n_nodes)
    if check:
        report = verify_sbp(op)
        if not report.passed:
            raise OperatorError(f"{path}: operator fails verification\n{report}")
    return op


def sbp_24(n_nodes: int) -> SbpOperator:
    """Interior order 4, boundary order 2; needs ``n_nodes >= 8``."""
    return assemble("sbp_24", SBP_24_COEFFS, n_nodes)


def sbp_36(n_nodes: int) -> SbpOperator:
    """Interior order 6, boundary order 3; needs ``n_nodes >= 12``."""
    op = assemble("sbp_36", _packaged_coefficients("sbp_36.txt"), n_nodes)
    report = verify_sbp(op)
    if not report.passed:
        raise OperatorError(f"packaged sbp_36 coefficients fail verification\n{report}")
    return op


OPERATORS: Dict[str, Callable[[int], SbpOperator]] = {
    "sbp_24": sbp_24,
    "sbp_36": sbp_36,
}


def operator_ids() -> Tuple[str, ...]:
    return tuple(OPERATORS)


def get_operator(name: str, n_nodes: int) -> SbpOperator:
    try:
        factory = OPERATORS[name]
    except KeyError:
        raise OperatorError(
            f"unknown operator {name!r}; known: {', '.join(operator_ids())}"
        ) from None
    return factory(n_nodes)


# {{{ verification


@dataclass(frozen=True)
class SbpReport:
    """Maximum deviations of the structural SBP checks.

    Monomial deviations are relative to ``max|D|``; the others are absolute.
    """

    name: str
    sbp_identity: float
    row_sum: float
    boundary_exactness: float
    interior_exactness: float
    rank_deficiency: int
    min_weight: float
    tol: float = SBP_TOL

    @property
    def checks(self) -> Dict[str, bool]:
        return {
            "sbp_identity": self.sbp_identity <= self.tol,
            "row_sum": self.row_sum <= self.tol,
            "boundary_exactness": self.boundary_exactness <= self.tol,
            "interior_exactness": self.interior_exactness <= self.tol,
            "rank": self.rank_deficiency == 1,
            "positive_weights": self.min_weight > 0.0,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def __str__(self) -> str:
        values = {
            "sbp_identity": f"{self.sbp_identity:.3e}",
            "row_sum": f"{self.row_sum:.3e}",
            "boundary_exactness": f"{self.boundary_exactness:.3e}",
            "interior_exactness": f"{self.interior_exactness:.3e}",
            "rank": f"deficiency {self.rank_deficiency}",
            "positive_weights": f"min weight {self.min_weight:.3e}",
        }
        return "\n".join(
            f"{'PASS' if ok else 'FAIL'} {self.name} {key}: {values[key]}"
            for key, ok in self.checks.items()
        )


def verify_sbp(op: SbpOperator, tol: float = SBP_TOL) -> SbpReport:
    D, w = op.D, op.weights
    n = op.n_nodes
    sbp = np.max(np.abs(np.diag(w) @ D + D.T @ np.diag(w) - op.B))
    row_sum = np.max(np.abs(D.sum(axis=1)))

    scale = max(np.max(np.abs(D)), 1.0)
    x = op.nodes / op.length
    nb = min(op.block_rows, n)
    bmask = np.zeros(n, dtype=bool)
    bmask[:nb] = True
    bmask[n - nb :] = True

    def exactness(order: int, mask: np.ndarray) -> float:
        if not mask.any():
            return 0.0
        worst = 0.0
        for k in range(order + 1):
            d = D @ x**k * op.length
            exact = k * x ** max(k - 1, 0) if k else np.zeros(n)
            worst = max(worst, np.max(np.abs(d - exact)[mask]))
        return worst / scale

    sv = np.linalg.svd(D, compute_uv=False)
    deficiency = int(np.sum(sv < RANK_TOL * sv[0]))
    return SbpReport(
        name=op.name,
        sbp_identity=float(sbp),
        row_sum=float(row_sum),
        boundary_exactness=float(exactness(op.boundary_order, bmask)),
        interior_exactness=float(exactness(op.interior_order, ~bmask)),
        rank_deficiency=deficiency,
        min_weight=float(np.min(w)),
        tol=tol,
    )


# }}}
