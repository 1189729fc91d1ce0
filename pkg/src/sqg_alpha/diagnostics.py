"""Scalar functionals tracked along trajectories.

All quadratures are done in spectral space via Parseval; L-infinity values are
taken at grid points.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass, fields
from typing import Optional, Sequence

import numpy as np

from . import spectral as sp
from .errors import ConfigurationError
from .model import State, recover_theta
from .spectral import SpectralField

CSV_COLUMNS = (
    "t",
    "energy_modified",
    "l2",
    "grad_l2",
    "linf_max",
    "linf_min",
    "blowup_indicator",
    "blowup_indicator_sq",
    "mean",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    energy_modified: float
    l2: float
    grad_l2: float
    linf_max: float
    linf_min: float
    blowup_indicator: float
    blowup_indicator_sq: float
    mean: float

    def as_row(self) -> tuple[float, ...]:
        return astuple(self)

    @classmethod
    def from_row(cls, row: Sequence) -> DiagnosticsRecord:
        if len(row) != len(CSV_COLUMNS):
            raise ConfigurationError(
                f"expected {len(CSV_COLUMNS)} columns, got {len(row)}")
        return cls(*(float(x) for x in row))

    @property
    def linf(self) -> float:
        return max(abs(self.linf_max), abs(self.linf_min))


assert tuple(f.name for f in fields(DiagnosticsRecord)) == CSV_COLUMNS


def l2_squared(theta: SpectralField) -> float:
    return float(np.sum(np.abs(theta.coeffs) ** 2))


def grad_l2_squared(theta: SpectralField) -> float:
    return float(np.sum(theta.grid.k2 * np.abs(theta.coeffs) ** 2))


def modified_energy(theta: SpectralField, alpha: float) -> float:
    """Integral of theta^2 + alpha^2 |grad theta|^2 over the unit square."""
    return float(np.sum(theta.grid.helmholtz_symbol(alpha) * np.abs(theta.coeffs) ** 2))


def h1_norm(theta: SpectralField) -> float:
    """Full H1 norm, sqrt(||theta||^2 + ||grad theta||^2)."""
    return float(np.sqrt(l2_squared(theta) + grad_l2_squared(theta)))


def blowup_indicator(theta: SpectralField, alpha: float, squared: bool = False) -> float:
    """alpha * ||grad theta||_L2, or its square when ``squared`` is set."""
    if not alpha > 0:
        raise ConfigurationError(f"blow-up indicator needs alpha > 0, got {alpha}")
    g2 = grad_l2_squared(theta)
    return alpha**2 * g2 if squared else alpha * float(np.sqrt(g2))


def record(state: State) -> DiagnosticsRecord:
    theta = recover_theta(state)
    alpha = state.alpha
    l2sq = l2_squared(theta)
    g2 = grad_l2_squared(theta)
    values = sp.inverse(theta, check=False).values
    return DiagnosticsRecord(
        t=float(state.t),
        energy_modified=l2sq + alpha**2 * g2,
        l2=float(np.sqrt(l2sq)),
        grad_l2=float(np.sqrt(g2)),
        linf_max=float(values.max()),
        linf_min=float(values.min()),
        blowup_indicator=alpha * float(np.sqrt(g2)),
        blowup_indicator_sq=alpha**2 * g2,
        mean=theta.mean,
    )


@dataclass(frozen=True)
class MaxPrincipleReport:
    max_linf: float
    theta0_linf: float
    violation: float
    relative_violation: float
    min_value: float
    positivity_checked: bool
    positivity_violation: Optional[float]

    @property
    def ok(self) -> bool:
        return self.violation == 0.0 and not self.positivity_violation


def max_principle_report(series: Sequence[DiagnosticsRecord], theta0_linf: float,
                         theta0_min: Optional[float] = None) -> MaxPrincipleReport:
    """Summarize sup-norm growth relative to the initial sup-norm.

    Positivity is checked when the initial minimum (``theta0_min``, defaulting
    to the first record's minimum) is nonnegative.
    """
    if not series:
        raise ConfigurationError("max_principle_report needs a nonempty series")
    max_linf = max(r.linf for r in series)
    violation = max(0.0, max_linf - theta0_linf)
    rel = violation / theta0_linf if theta0_linf > 0 else violation
    min_value = min(r.linf_min for r in series)
    if theta0_min is None:
        theta0_min = series[0].linf_min
    checked = theta0_min >= 0
    pos = max(0.0, -min_value) if checked else None
    return MaxPrincipleReport(max_linf, theta0_linf, violation, rel, min_value, checked, pos)


def convergence_metric(theta_a: SpectralField, theta_b: SpectralField, alpha: float) -> float:
    """||a - b||^2 + alpha^2 ||grad(a - b)||^2 on a common grid."""
    if theta_a.grid.n != theta_b.grid.n:
        raise ConfigurationError(
            f"grid mismatch n={theta_a.grid.n} vs n={theta_b.grid.n}; pad first")
    return modified_energy(theta_a - theta_b, alpha)


def spectral_pad(F: SpectralField, n_target: int) -> SpectralField:
    """Embed coefficients into a finer grid (zero padding).

    A Nyquist coefficient is split evenly between +n/2 and -n/2 on the finer
    grid so that samples at the shared points are unchanged.
    """
    n = F.grid.n
    if n_target < n or n_target % 2:
        raise ConfigurationError(f"cannot pad n={n} to n={n_target}")
    if n_target == n:
        return SpectralField(F.grid, F.coeffs.copy())
    grid = sp.make_grid(n_target)
    k = np.rint(np.fft.fftfreq(n) * n).astype(int)
    c = F.coeffs
    h = n // 2
    # duplicate the Nyquist row/column to +n/2 with half weight on each
    idx = np.concatenate([k, [h]])
    src = np.concatenate([np.arange(n), [h]])
    weight = np.where(np.abs(idx) == h, 0.5, 1.0)
    big = np.zeros((n_target, n_target), dtype=complex)
    rows = idx % n_target
    big[np.ix_(rows, rows)] = c[np.ix_(src, src)] * np.outer(weight, weight)
    return SpectralField(grid, big)


def energy_spectrum(theta: SpectralField) -> list[tuple[int, float]]:
    """Shell sums of |c_k|^2 over m - 1/2 <= |k| < m + 1/2, m = 1..n/2."""
    grid = theta.grid
    shell = np.floor(grid.kmag + 0.5).astype(int)
    power = np.abs(theta.coeffs) ** 2
    sums = np.bincount(shell.ravel(), weights=power.ravel())
    out = []
    for m in range(1, grid.n // 2 + 1):
        out.append((m, float(sums[m]) if m < len(sums) else 0.0))
    return out
