"""Distance of alpha-runs of the CMT datum from an unregularized reference."""

import argparse

from sqg_alpha import spectral as sp
from sqg_alpha.diagnostics import convergence_metric, spectral_pad
from sqg_alpha.initial import make_initial_condition
from sqg_alpha.model import recover_theta, state_from_theta
from sqg_alpha.sweep import default_resolution
from sqg_alpha.timestepper import IntegratorConfig, integrate


def final_theta(n, alpha, t_end):
    s = state_from_theta(make_initial_condition("cmt", {}, sp.make_grid(n)), alpha)
    return recover_theta(integrate(s, IntegratorConfig(t_end=t_end)))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-end", type=float, default=0.2)
    ap.add_argument("--n-ref", type=int, default=256)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.1, 0.05, 0.025])
    args = ap.parse_args()
    ref = final_theta(args.n_ref, 0.0, args.t_end)
    print("alpha,n,metric")
    for a in args.alphas:
        n = default_resolution(a)
        th = spectral_pad(final_theta(n, a, args.t_end), args.n_ref)
        print(f"{a!r},{n},{convergence_metric(th, ref, a):.6e}")


if __name__ == "__main__":
    main()
