"""Modified-energy drift of the CMT datum against the fixed step size.

    python3 scripts/energy_drift.py --n 128 --alpha 0.1 --t-end 1.0
"""

import argparse

from sqg_alpha import spectral as sp
from sqg_alpha.diagnostics import modified_energy
from sqg_alpha.initial import make_initial_condition
from sqg_alpha.model import recover_theta, state_from_theta
from sqg_alpha.timestepper import IntegratorConfig, integrate


def drift(n, alpha, t_end, dt):
    s0 = state_from_theta(make_initial_condition("cmt", {}, sp.make_grid(n)), alpha)
    e0 = modified_energy(recover_theta(s0), alpha)
    s1 = integrate(s0, IntegratorConfig(t_end=t_end, dt_fixed=dt, courant=1.0))
    return abs(modified_energy(recover_theta(s1), alpha) - e0) / e0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--alpha", type=float, default=0.1)
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--dts", type=float, nargs="+", default=[0.016, 0.008, 0.004, 0.002, 0.001])
    args = ap.parse_args()
    prev = None
    print("dt,relative_drift,ratio_to_previous")
    for dt in args.dts:
        d = drift(args.n, args.alpha, args.t_end, dt)
        ratio = prev / d if prev is not None and d > 0 else float("nan")
        print(f"{dt!r},{d:.6e},{ratio:.3f}")
        prev = d


if __name__ == "__main__":
    main()
