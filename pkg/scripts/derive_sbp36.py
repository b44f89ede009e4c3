"""Derive the diagonal-norm (3,6) first-derivative SBP family and write its data files.

The norm is fixed; the order-3 boundary conditions on the antisymmetric part
``Q = H D - B/2`` leave one free parameter ``q45 = Q[4, 5]``.  Two members are
written: the calibrated default and the classical choice.

    python3 scripts/derive_sbp36.py [--check]
"""

import argparse
from pathlib import Path

import sympy as sp

R = sp.Rational
DATA = Path(__file__).resolve().parents[1] / "src" / "sbp_fdec" / "data"

H = [R(13649, 43200), R(12013, 8640), R(2711, 4320), R(5359, 4320), R(7877, 8640), R(43801, 43200)]
STENCIL = {1: R(3, 4), 2: R(-3, 20), 3: R(1, 60)}
VARIANTS = {
    "sbp_36.txt": (
        R(1762271, 2500000),
        [
            "Boundary-block free parameter q_{4,5} = 1762271/2500000, calibrated so the",
            "standing-wave convergence data of the reference implementation is reproduced.",
            "The classical choice 342523/518400 ships as sbp_36_classical.txt.",
        ],
    ),
    "sbp_36_classical.txt": (
        R(342523, 518400),
        ["Boundary-block free parameter q_{4,5} = 342523/518400 (classical choice)."],
    ),
}


def boundary_block():
    """Solve the order conditions on a 16-point grid; returns ``(D_block(q45), q45)``."""
    n = 16
    Hd = H + [1] * (n - 12) + H[::-1]
    q = {(i, j): sp.Symbol(f"q{i}{j}") for i in range(6) for j in range(i + 1, 6)}
    Q = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            d = j - i
            inside = (i < 6 and j < 6) or (i >= n - 6 and j >= n - 6)
            if abs(d) in STENCIL and not inside:
                Q[i, j] = STENCIL[abs(d)] * (1 if d > 0 else -1)
    for (i, j), s in q.items():
        Q[i, j], Q[j, i] = s, -s
        Q[n - 1 - i, n - 1 - j], Q[n - 1 - j, n - 1 - i] = -s, s
    Q[0, 0], Q[n - 1, n - 1] = R(-1, 2), R(1, 2)

    eqs = []
    for k in range(4):
        v = sp.Matrix([sp.Integer(i) ** k for i in range(n)])
        dv = sp.Matrix([k * sp.Integer(i) ** (k - 1) if k else 0 for i in range(n)])
        r = Q * v
        eqs += [sp.expand(r[i] - Hd[i] * dv[i]) for i in range(6)]
    sol = sp.solve(eqs, list(q.values()), dict=True)[0]
    free = set(q.values()) - set(sol)
    assert free == {q[(4, 5)]}, free
    Qs = Q.subs(sol)
    block = sp.Matrix(6, 9, lambda i, j: sp.simplify(Qs[i, j] / Hd[i]))
    return block, q[(4, 5)]


def render(block, notes):
    lines = [
        "# Diagonal-norm first-derivative SBP operator, boundary order 3, interior order 6.",
        "# Unit grid spacing; divide D by h and multiply the weights by h for spacing h.",
        *(f"# {line}" for line in notes),
        "#",
        "# Layout, one value per line (integers or p/q rationals), '#' lines ignored:",
        "#   block_rows, block_cols, stencil_len, boundary_order, interior_order",
        "#   block_rows*block_cols boundary-block entries of D, row-major",
        "#   stencil_len interior stencil entries of D, offsets -(len//2)..+(len//2)",
        "#   block_rows boundary weights",
        "6", "9", "7", "3", "6",
    ]
    lines += [str(v) for v in block]
    lines += [str(v) for v in (R(-1, 60), R(3, 20), R(-3, 4), 0, R(3, 4), R(-3, 20), R(1, 60))]
    lines += [str(v) for v in H]
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare with shipped files, do not write")
    args = ap.parse_args()
    block, q45 = boundary_block()
    status = 0
    for name, (value, notes) in VARIANTS.items():
        text = render(block.subs(q45, value), notes)
        path = DATA / name
        if args.check:
            same = path.read_text() == text
            print(f"{name}: {'matches' if same else 'DIFFERS'}")
            status |= not same
        else:
            path.write_text(text)
            print(f"wrote {path}")
    raise SystemExit(status)


if __name__ == "__main__":
    main()
