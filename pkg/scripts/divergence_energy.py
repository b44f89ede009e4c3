"""Divergence and energy diagnostics on the coarse mesh for every operator/integrator pair.

    python3 scripts/divergence_energy.py [--end-time 1] [--cfl 1]

Writes results/diag_<operator>_<scheme>.csv and prints a one-line summary each.
"""

import argparse
from pathlib import Path

from sbp_fdec.cli import RunConfig, cmd_simulate

OUT = Path(__file__).resolve().parents[1] / "results"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--end-time", type=float, default=1.0)
    ap.add_argument("--cfl", type=float, default=1.0)
    ap.add_argument("--stride", type=int, default=1)
    args = ap.parse_args()
    for op in ("sbp_24", "sbp_36"):
        for scheme in ("ssprk3", "crank_nicolson"):
            cfg = RunConfig(operator=op, elements_x=2, elements_y=2, points=12, scheme=scheme,
                            cfl=args.cfl, end_time=args.end_time, stride=args.stride)
            res, _ = cmd_simulate(cfg, OUT / f"diag_{op}_{scheme}.csv")
            h0 = res.samples[0].energy
            div = max(s.div_max_nodal for s in res.samples)
            drift = max(abs(s.energy_drift) for s in res.samples) / h0
            print(f"{op:7s} {scheme:15s} steps={res.n_steps:6d} max|div|={div:.3e} "
                  f"max|dH|/H0={drift:.3e} final dH={res.samples[-1].energy_drift:+.3e}")


if __name__ == "__main__":
    main()
