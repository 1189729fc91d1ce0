"""Alpha sweep of the CMT datum with the blow-up verdict.

    python3 scripts/cmt_sweep.py --t-end 0.5 --alphas 0.2 0.1 0.05 0.025 --out cmt_sweep
"""

import argparse

from sqg_alpha.initial import ICSpec
from sqg_alpha.io import save_sweep
from sqg_alpha.sweep import SweepConfig, eps_sup, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=0.5)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.025])
    ap.add_argument("--parallelism", type=int, default=1)
    ap.add_argument("--out", default="cmt_sweep")
    args = ap.parse_args()
    times = [args.t_end * (i + 1) / args.samples for i in range(args.samples)]
    cfg = SweepConfig(ic=ICSpec("cmt"), t_end=args.t_end, sample_times=times,
                      alphas=args.alphas, parallelism=args.parallelism)
    res = run_sweep(cfg)
    save_sweep(res, args.out)
    print("t,epsilon_hat,residual")
    for t, (e, r) in sorted(res.liminf_estimates.items()):
        print(f"{t!r},{e:.6e},{r:.3e}")
    print(f"VERDICT {res.verdict.value} eps_sup={eps_sup(res):.17g} "
          f"threshold={res.threshold:.6g}")


if __name__ == "__main__":
    main()
