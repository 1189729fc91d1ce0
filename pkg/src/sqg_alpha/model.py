"""Right-hand side of the inviscid alpha-regularized SQG system.

The prognostic variable is ``theta_tilde = (1 - alpha^2 Laplacian) theta``;
velocity comes from ``psi = (-Laplacian)^(-1/2) theta`` and ``v = perp grad psi``.
With alpha = 0 this is plain SQG.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import spectral as sp
from .errors import ConfigurationError, NumericalOverflowError
from .spectral import SpectralField


@dataclass(frozen=True)
class ModelParams:
    alpha: float = 0.0
    dealias_nonlinearity: bool = True

    def __post_init__(self):
        a = self.alpha
        if not (np.isfinite(a) and 0.0 <= a <= 1.0):
            raise ConfigurationError(f"alpha must lie in [0, 1], got {a!r}")


@dataclass(frozen=True, eq=False)
class State:
    """Immutable snapshot of the prognostic variable at time ``t``."""

    theta_tilde: SpectralField
    t: float = 0.0
    params: ModelParams = field(default_factory=ModelParams)

    @property
    def grid(self):
        return self.theta_tilde.grid

    @property
    def alpha(self) -> float:
        return self.params.alpha

    def with_theta_tilde(self, theta_tilde: SpectralField, t: float) -> State:
        return replace(self, theta_tilde=theta_tilde, t=t)


def state_from_theta(theta0: SpectralField | sp.PhysicalField, alpha: float = 0.0,
                     t: float = 0.0, dealias_nonlinearity: bool = True) -> State:
    """Build a state whose recovered theta equals ``theta0``."""
    if isinstance(theta0, sp.PhysicalField):
        theta0 = sp.forward(theta0)
    params = ModelParams(alpha=alpha, dealias_nonlinearity=dealias_nonlinearity)
    return State(sp.helmholtz_apply(theta0, alpha), float(t), params)


def recover_theta(state: State) -> SpectralField:
    return sp.helmholtz_inverse(state.theta_tilde, state.alpha)


def velocity(theta: SpectralField) -> tuple[SpectralField, SpectralField]:
    """SQG velocity of ``theta``; the mean of theta does not contribute."""
    return sp.perp_gradient(sp.inv_frac_laplacian_half(theta))


def nonlinear_divergence(theta: SpectralField, v: tuple[SpectralField, SpectralField],
                         dealias_output: bool = True) -> SpectralField:
    """Pseudo-spectral div(v theta).

    Inputs are expected to be band-limited to the dealias mask already.
    """
    v1, v2 = v
    th = sp.inverse(theta, check=False).values
    u1 = sp.inverse(v1, check=False).values
    u2 = sp.inverse(v2, check=False).values
    with np.errstate(over="ignore", invalid="ignore"):
        f1 = u1 * th
        f2 = u2 * th
    if not (np.isfinite(f1).all() and np.isfinite(f2).all()):
        raise NumericalOverflowError("non-finite flux in div(v theta)")
    grid = theta.grid
    out = sp.divergence(sp.forward(sp.PhysicalField(grid, f1)),
                        sp.forward(sp.PhysicalField(grid, f2)))
    # divergence symbols vanish at k = 0; make it exact
    out.coeffs[0, 0] = 0.0
    return sp.dealias(out) if dealias_output else out


def rhs(state: State) -> SpectralField:
    """d theta_tilde / dt = -div(v theta)."""
    theta = recover_theta(state)
    v = velocity(theta)
    if state.params.dealias_nonlinearity:
        theta = sp.dealias(theta)
        v = (sp.dealias(v[0]), sp.dealias(v[1]))
    flux = nonlinear_divergence(theta, v, dealias_output=state.params.dealias_nonlinearity)
    return -flux
