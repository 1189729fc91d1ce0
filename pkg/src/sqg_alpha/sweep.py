"""Ensembles of runs over decreasing alpha and the blow-up verdict.

For each alpha the regularized problem is integrated from the same initial
datum and the indicator ``B(alpha, t) = alpha * ||grad theta^alpha(t)||`` is
recorded.  A smooth limit solution gives ``B = O(alpha)``, so the intercept of
an affine fit over the smallest alphas estimates the liminf as alpha -> 0.
"""

from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from . import spectral as sp
from .diagnostics import DiagnosticsRecord, h1_norm, record
from .errors import ConfigurationError, InsufficientDataError, NumericalOverflowError
from .initial import ICSpec, make_initial_condition
from .model import state_from_theta
from .timestepper import IntegratorConfig, integrate

MIN_CELLS_PER_ALPHA = 4
FIT_LEVELS = 4


class Verdict(str, enum.Enum):
    NO_BLOWUP_EVIDENCE = "NO_BLOWUP_EVIDENCE"
    BLOWUP_INDICATED = "BLOWUP_INDICATED"
    INCONCLUSIVE = "INCONCLUSIVE"


def default_resolution(alpha: float, min_n: int = 16) -> int:
    """Smallest power of two >= max(min_n, ceil(4 / alpha))."""
    need = max(min_n, math.ceil(MIN_CELLS_PER_ALPHA / alpha - 1e-9))
    return 1 << (need - 1).bit_length()


def geometric_alphas(alpha0: float = 0.1, levels: int = 6) -> list[float]:
    return [alpha0 * 2.0**-j for j in range(levels)]


@dataclass
class SweepConfig:
    ic: ICSpec
    t_end: float
    sample_times: Sequence[float]
    alphas: Sequence[float] = field(default_factory=geometric_alphas)
    resolution_rule: Callable[[float], int] = default_resolution
    courant: float = 0.5
    dt_max: float = 1e-2
    parallelism: int = 1
    threshold: Optional[float] = None

    def __post_init__(self):
        self.alphas = [float(a) for a in self.alphas]
        self.sample_times = sorted(float(t) for t in self.sample_times)
        if not self.alphas:
            raise ConfigurationError("alphas must be nonempty")
        if any(not (0 < a <= 1) for a in self.alphas):
            raise ConfigurationError(f"alphas must lie in (0, 1]: {self.alphas}")
        if any(b >= a for a, b in zip(self.alphas, self.alphas[1:])):
            raise ConfigurationError(f"alphas must be strictly decreasing: {self.alphas}")
        if not self.sample_times:
            raise ConfigurationError("sample_times must be nonempty")
        if self.sample_times[0] < 0 or self.sample_times[-1] > self.t_end:
            raise ConfigurationError(
                f"sample_times must lie in [0, t_end={self.t_end}]: {self.sample_times}")
        if len(set(self.sample_times)) != len(self.sample_times):
            raise ConfigurationError("sample_times contains duplicates")
        if self.parallelism < 1:
            raise ConfigurationError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.threshold is not None and not self.threshold > 0:
            raise ConfigurationError(f"threshold must be positive, got {self.threshold}")

    def resolutions(self) -> dict[float, int]:
        out = {}
        for a in self.alphas:
            n = int(self.resolution_rule(a))
            if n < 8 or n % 2:
                raise ConfigurationError(f"resolution rule gave invalid n={n} for alpha={a}")
            if n * a < MIN_CELLS_PER_ALPHA:
                raise ConfigurationError(
                    f"alpha={a} is under-resolved at n={n} (n*alpha={n * a:.3g} < 4)")
            out[a] = n
        return out

    def echo(self) -> dict:
        return {
            "ic": asdict(self.ic),
            "t_end": self.t_end,
            "sample_times": list(self.sample_times),
            "alphas": list(self.alphas),
            "resolutions": {repr(a): n for a, n in self.resolutions().items()},
            "courant": self.courant,
            "dt_max": self.dt_max,
            "parallelism": self.parallelism,
            "threshold": self.threshold,
        }


@dataclass
class RunOutcome:
    alpha: float
    n: int
    records: list[DiagnosticsRecord]
    truncated_at: Optional[float] = None


@dataclass
class SweepResult:
    config: SweepConfig
    per_alpha: dict[float, list[DiagnosticsRecord]]
    resolutions: dict[float, int]
    truncated: dict[float, Optional[float]]
    theta0_h1: float
    threshold: float
    liminf_estimates: dict[float, tuple[float, float]] = field(default_factory=dict)
    verdict: Optional[Verdict] = None
    metadata: dict = field(default_factory=dict)

    def indicator_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(alphas, B) for runs that reached sample time ``t``, alpha ascending."""
        pairs = []
        for a, series in self.per_alpha.items():
            for r in series:
                if r.t == t:
                    pairs.append((a, r.blowup_indicator))
                    break
        pairs.sort()
        a = np.array([p[0] for p in pairs], dtype=float)
        b = np.array([p[1] for p in pairs], dtype=float)
        return a, b


def _run_one(alpha: float, n: int, ic: ICSpec, t_end: float,
             sample_times: Sequence[float], courant: float, dt_max: float) -> RunOutcome:
    grid = sp.make_grid(n)
    theta0 = make_initial_condition(ic.name, ic.params, grid, seed=ic.seed)
    state = state_from_theta(theta0, alpha)
    records = []
    for ts in sample_times:
        if ts > state.t:
            cfg = IntegratorConfig(t_end=ts, courant=courant, dt_max=dt_max)
            try:
                state = integrate(state, cfg)
            except NumericalOverflowError as exc:
                return RunOutcome(alpha, n, records, truncated_at=exc.last_good_t)
        records.append(record(state))
    return RunOutcome(alpha, n, records)


def _run_star(args):
    return _run_one(*args)


def affine_intercept(alphas, values, levels: int = FIT_LEVELS) -> tuple[float, float]:
    """Least-squares fit ``values ~ c0 + c1 * alpha`` over the smallest alphas.

    Returns ``(max(c0, 0), rms residual)``.
    """
    a = np.asarray(alphas, dtype=float)
    b = np.asarray(values, dtype=float)
    if a.shape != b.shape or a.size < 3:
        raise InsufficientDataError(f"need >= 3 alpha levels, got {a.size}")
    order = np.argsort(a)[: min(levels, a.size)]
    a, b = a[order], b[order]
    A = np.column_stack([np.ones_like(a), a])
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = b - A @ coef
    return max(float(coef[0]), 0.0), float(np.sqrt(np.mean(resid**2)))


def estimate_liminf(result: SweepResult, t: float) -> tuple[float, float]:
    alphas, values = result.indicator_at(t)
    if alphas.size < 3:
        raise InsufficientDataError(
            f"only {alphas.size} alpha levels completed at t={t}; need 3")
    return affine_intercept(alphas, values)


def blowup_verdict(result: SweepResult, threshold: Optional[float] = None) -> Verdict:
    """Band classification of the supremum over time of the liminf estimates."""
    if threshold is None:
        threshold = result.threshold
    if not result.liminf_estimates:
        return Verdict.INCONCLUSIVE
    t_sup, (eps_sup, resid) = max(result.liminf_estimates.items(), key=lambda kv: kv[1][0])
    if eps_sup > threshold and resid < eps_sup / 3:
        return Verdict.BLOWUP_INDICATED
    if eps_sup < threshold / 10:
        return Verdict.NO_BLOWUP_EVIDENCE
    return Verdict.INCONCLUSIVE


def eps_sup(result: SweepResult) -> float:
    return max((e for e, _ in result.liminf_estimates.values()), default=0.0)


def finalize(result: SweepResult) -> SweepResult:
    """Populate liminf estimates and the verdict from the per-alpha series."""
    result.liminf_estimates = {}
    for t in result.config.sample_times:
        try:
            result.liminf_estimates[t] = estimate_liminf(result, t)
        except InsufficientDataError:
            continue
    if result.threshold <= 0:
        # zero datum: the trajectory is identically zero for every alpha
        result.verdict = Verdict.NO_BLOWUP_EVIDENCE
    else:
        result.verdict = blowup_verdict(result)
    return result


def run_sweep(cfg: SweepConfig) -> SweepResult:
    t0 = time.perf_counter()
    resolutions = cfg.resolutions()
    jobs = [(a, resolutions[a], cfg.ic, cfg.t_end, cfg.sample_times, cfg.courant, cfg.dt_max)
            for a in cfg.alphas]
    if cfg.parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            outcomes = list(pool.map(_run_star, jobs))
    else:
        outcomes = [_run_star(j) for j in jobs]

    n_ref = resolutions[cfg.alphas[0]]
    theta0 = make_initial_condition(cfg.ic.name, cfg.ic.params, sp.make_grid(n_ref),
                                    seed=cfg.ic.seed)
    norm0 = h1_norm(sp.forward(theta0))
    threshold = cfg.threshold if cfg.threshold is not None else 0.05 * norm0

    result = SweepResult(
        config=cfg,
        per_alpha={o.alpha: o.records for o in outcomes},
        resolutions=resolutions,
        truncated={o.alpha: o.truncated_at for o in outcomes},
        theta0_h1=norm0,
        threshold=threshold,
        metadata={
            "code_version": __version__,
            "ic_generator": "numpy.random.PCG64" if cfg.ic.name == "random_smooth" else None,
            "wall_clock_s": time.perf_counter() - t0,
        },
    )
    return finalize(result)
