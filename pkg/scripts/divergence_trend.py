"""Long run checking that the nodal divergence shows no growth trend.

    python3 scripts/divergence_trend.py [--steps 10000] [--scheme ssprk3] [--operator sbp_24]

Compares the maximum divergence over the last and first 10% of the samples.
"""

import argparse

import numpy as np

from sbp_fdec.integrators import IntegratorConfig, cfl_timestep, integrate
from sbp_fdec.mesh import build_mesh
from sbp_fdec.operators import assemble
from sbp_fdec.sbp import get_operator


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--scheme", default="ssprk3")
    ap.add_argument("--operator", default="sbp_24")
    ap.add_argument("--stride", type=int, default=10)
    args = ap.parse_args()
    ops = assemble(build_mesh(2, 2, 11), get_operator(args.operator, 12))
    dt = cfl_timestep(ops, 1.0)
    cfg = IntegratorConfig(args.scheme, end_time=args.steps * dt, dt=dt, stride=args.stride)
    res = integrate(cfg, ops)
    div = np.array([s.div_max_nodal for s in res.samples[1:]])
    k = max(len(div) // 10, 1)
    first, last = div[:k].max(), div[-k:].max()
    print(f"steps={res.n_steps} t={res.state.t:.3f} first10%={first:.3e} last10%={last:.3e} "
          f"ratio={last / first:.3f} overall max={div.max():.3e}")


if __name__ == "__main__":
    main()
