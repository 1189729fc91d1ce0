"""Command-line entry points: ``run``, ``sweep``, ``diagnose``, ``ic``, ``plot``.

Exit codes: 0 success, 1 bad configuration or input, 2 numerical overflow.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import spectral as sp
from .diagnostics import convergence_metric, l2_squared, grad_l2_squared, modified_energy
from .diagnostics import record as diagnostics_record
from .diagnostics import spectral_pad
from .errors import ConfigurationError, NumericalOverflowError, SnapshotError
from .initial import GENERATOR, ICSpec, make_initial_condition
from .io import (
    ConfigReader,
    DiagnosticsWriter,
    Snapshot,
    emit_plot_scripts,
    read_snapshot,
    read_snapshot_raw,
    save_sweep,
    write_snapshot,
)
from .model import State, recover_theta, state_from_theta
from .sweep import SweepConfig, default_resolution, eps_sup, geometric_alphas, run_sweep
from .timestepper import IntegratorConfig, integrate


@dataclass
class RunConfig:
    ic: ICSpec
    alpha: float
    n: int
    integrator: IntegratorConfig
    output_dir: Path
    snapshot_interval: Optional[float] = None
    ic_file: Optional[Path] = None


def _ic_spec(cfg: ConfigReader) -> ICSpec:
    params = cfg.prefixed("ic")
    name = params.pop("name", None)
    seed = params.pop("seed", None)
    params.pop("file", None)
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigurationError(f"{cfg.where('ic.seed')}: expected an integer seed")
    if name is None and not cfg.has("ic.file"):
        raise ConfigurationError(f"{cfg.where('ic.name')}: required field missing")
    return ICSpec(str(name) if name is not None else "file", params, seed)


def load_run_config(path) -> RunConfig:
    cfg = ConfigReader.from_file(path)
    ic_file = cfg.get_path("ic.file")
    ic = _ic_spec(cfg)
    alpha = cfg.get_float("alpha",
                          required=ic_file is None, nonnegative=True)
    n = cfg.get_int("n", required=ic_file is None)
    try:
        integ = IntegratorConfig(
            t_end=cfg.get_float("integrator.t_end", required=True),
            courant=cfg.get_float("integrator.courant", 0.5),
            dt_max=cfg.get_float("integrator.dt_max", 1e-2),
            dt_fixed=cfg.get_float("integrator.dt_fixed"),
            callback_interval=cfg.get_float("integrator.callback_interval", required=True),
        )
    except ConfigurationError as exc:
        raise ConfigurationError(f"{cfg.source}: integrator: {exc}") from None
    out = cfg.get_path("output_dir", default=".")
    snap = cfg.get_float("snapshot_interval", positive=True)
    cfg.check_unused()
    if n is not None:
        try:
            sp.make_grid(n)
        except ConfigurationError as exc:
            raise cfg.wrap("n", exc) from None
    if alpha is not None and alpha > 1:
        raise cfg.wrap("alpha", ValueError(f"alpha must lie in [0, 1], got {alpha}"))
    if snap is not None:
        ratio = snap / integ.callback_interval
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise cfg.wrap("snapshot_interval",
                           ValueError("must be a multiple of integrator.callback_interval"))
    return RunConfig(ic, alpha, n, integ, out, snap, ic_file)


def load_sweep_config(path) -> tuple[SweepConfig, Path]:
    cfg = ConfigReader.from_file(path)
    ic = _ic_spec(cfg)
    if ic.name == "file":
        raise cfg.wrap("ic.file", ValueError("sweeps need a named initial condition"))
    alphas = cfg.get_floats("alphas")
    if alphas is None:
        alphas = geometric_alphas(cfg.get_float("alpha0", 0.1, positive=True),
                                  cfg.get_int("levels", 6))
    min_n = cfg.get_int("resolution.min_n", 16)
    t_end = cfg.get_float("t_end", required=True, nonnegative=True)
    sample_times = cfg.get_floats("sample_times", required=True)
    kwargs = dict(
        courant=cfg.get_float("integrator.courant", 0.5),
        dt_max=cfg.get_float("integrator.dt_max", 1e-2),
        parallelism=cfg.get_int("parallelism", 1),
        threshold=cfg.get_float("threshold"),
    )
    out = cfg.get_path("output_dir", default="sweep_out")
    cfg.check_unused()
    try:
        sc = SweepConfig(ic=ic, t_end=t_end, sample_times=sample_times, alphas=alphas,
                         resolution_rule=_ResolutionRule(min_n), **kwargs)
        sc.resolutions()
    except ConfigurationError as exc:
        raise ConfigurationError(f"{cfg.source}: {exc}") from None
    return sc, out


@dataclass(frozen=True)
class _ResolutionRule:
    min_n: int

    def __call__(self, alpha: float) -> int:
        return default_resolution(alpha, self.min_n)


# --- commands ----------------------------------------------------------------

def cmd_run(args) -> int:
    rc = load_run_config(args.config)
    if rc.ic_file is not None:
        state = read_snapshot(rc.ic_file)
        if rc.alpha is not None and rc.alpha != state.alpha:
            state = state_from_theta(recover_theta(state), rc.alpha, state.t)
        if rc.n is not None and rc.n != state.grid.n:
            raise ConfigurationError(
                f"{args.config}: n={rc.n} disagrees with snapshot n={state.grid.n}")
    else:
        grid = sp.make_grid(rc.n)
        theta0 = make_initial_condition(rc.ic.name, rc.ic.params, grid, seed=rc.ic.seed)
        state = state_from_theta(theta0, rc.alpha)
    if rc.integrator.t_end < state.t:
        raise ConfigurationError(f"{args.config}: integrator.t_end precedes the initial time")

    out = rc.output_dir
    out.mkdir(parents=True, exist_ok=True)
    meta = {"ic": rc.ic.name, "params": rc.ic.params, "seed": rc.ic.seed,
            "alpha": state.alpha, "n": state.grid.n}
    if rc.ic.name == "random_smooth":
        meta["generator"] = GENERATOR
    (out / "run.json").write_text(json.dumps(meta, indent=2, default=str) + "\n")

    snap_every = None
    if rc.snapshot_interval is not None:
        snap_every = round(rc.snapshot_interval / rc.integrator.callback_interval)
    count = [0]

    with DiagnosticsWriter(out / "diagnostics.csv") as writer:
        def emit(t, s: State):
            writer.write(diagnostics_record(s))
            if snap_every and count[0] % snap_every == 0:
                write_snapshot(s, out / f"snap_{count[0]:06d}.snap")
            count[0] += 1

        try:
            integrate(state, rc.integrator, emit)
        except NumericalOverflowError as exc:
            print(f"numerical overflow; run truncated at t={exc.last_good_t!r}",
                  file=sys.stderr)
            return 2
    return 0


def cmd_sweep(args) -> int:
    sc, out = load_sweep_config(args.config)
    result = run_sweep(sc)
    save_sweep(result, out)
    print(f"VERDICT {result.verdict.value} eps_sup={eps_sup(result):.17g}")
    return 0


def _norms(label: str, snap: Snapshot) -> str:
    theta = sp.from_values(snap.theta)
    return (f"{label}: n={snap.n} alpha={snap.alpha!r} t={snap.t!r} "
            f"l2={l2_squared(theta) ** 0.5:.17g} grad_l2={grad_l2_squared(theta) ** 0.5:.17g} "
            f"linf={abs(snap.theta).max():.17g} "
            f"energy_modified={modified_energy(theta, snap.alpha):.17g}")


def cmd_diagnose(args) -> int:
    a, b = read_snapshot_raw(args.a), read_snapshot_raw(args.b)
    alpha = args.alpha if args.alpha is not None else a.alpha
    if alpha < 0:
        raise ConfigurationError(f"--alpha must be nonnegative, got {alpha}")
    ta, tb = sp.from_values(a.theta), sp.from_values(b.theta)
    n = max(a.n, b.n)
    ta, tb = spectral_pad(ta, n), spectral_pad(tb, n)
    print(_norms("a", a))
    print(_norms("b", b))
    print(f"convergence_metric={convergence_metric(ta, tb, alpha):.17g} alpha={alpha!r}")
    return 0


def cmd_ic(args) -> int:
    grid = sp.make_grid(args.n)
    params = {}
    for item in args.param or []:
        if "=" not in item:
            raise ConfigurationError(f"--param expects name=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            params[k] = int(v)
        except ValueError:
            try:
                params[k] = float(v)
            except ValueError:
                raise ConfigurationError(f"--param {k}: expected a number, got {v!r}") from None
    theta = make_initial_condition(args.name, params, grid, seed=args.seed)
    write_snapshot(Snapshot(args.n, args.alpha, 0.0, theta.values), args.out)
    return 0


def cmd_plot(args) -> int:
    for p in emit_plot_scripts(args.input, args.out):
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqg-alpha",
                                description="Inviscid alpha-regularized SQG solver")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="single integration")
    r.add_argument("--config", required=True)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="alpha sweep and blow-up verdict")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("diagnose", help="compare two snapshots")
    d.add_argument("--a", required=True)
    d.add_argument("--b", required=True)
    d.add_argument("--alpha", type=float)
    d.set_defaults(func=cmd_diagnose)

    i = sub.add_parser("ic", help="write an initial-condition snapshot")
    i.add_argument("--name", required=True)
    i.add_argument("--n", type=int, required=True)
    i.add_argument("--seed", type=int)
    i.add_argument("--alpha", type=float, default=0.0)
    i.add_argument("--param", action="append", metavar="NAME=VALUE")
    i.add_argument("--out", required=True)
    i.set_defaults(func=cmd_ic)

    pl = sub.add_parser("plot", help="emit gnuplot scripts")
    pl.add_argument("--input", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, SnapshotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
