"""Element-refinement error tables for both operators (SSPRK3, dt = 2e-5, T = 1).

    python3 scripts/reproduce_tables.py [--levels-p2 1 2 4] [--levels-p3 1 2] [--jobs 2]

Writes results/table_<operator>_<points>pts.csv and prints the rows.
"""

import argparse
from pathlib import Path

from sbp_fdec.cli import ConvergenceStudy, RunConfig, cmd_convergence

OUT = Path(__file__).resolve().parents[1] / "results"


def study(operator, points, levels):
    base = RunConfig(operator=operator, points=points, scheme="ssprk3", dt=2e-5,
                     end_time=1.0, stride=10**9)
    return ConvergenceStudy(base=base, mode="elements", levels=tuple(levels))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels-p2", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--levels-p3", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    for op, pts, levels in (("sbp_24", 8, args.levels_p2), ("sbp_36", 12, args.levels_p3)):
        path = OUT / f"table_{op}_{pts}pts.csv"
        _, text = cmd_convergence(study(op, pts, levels), path, args.jobs)
        print(f"# {op}, {pts} points\n{text}")


if __name__ == "__main__":
    main()
