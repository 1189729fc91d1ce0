"""Initial-condition registry."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .spectral import TWO_PI, Grid, PhysicalField

GENERATOR = "numpy.random.PCG64"


@dataclass(frozen=True)
class ICSpec:
    name: str
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None


def _zero(grid, params, seed):
    return np.zeros((grid.n, grid.n))


def _single_mode(grid, params, seed):
    k1 = params.get("k1", 0)
    k2 = params.get("k2", 1)
    amp = float(params.get("amplitude", 1.0))
    if int(k1) != k1 or int(k2) != k2:
        raise ConfigurationError(f"single_mode wavevector must be integer, got ({k1}, {k2})")
    x, y = grid.coords()
    return amp * np.cos(TWO_PI * (int(k1) * x + int(k2) * y))


def _cmt(grid, params, seed):
    x, y = grid.coords()
    return np.sin(TWO_PI * x) * np.sin(TWO_PI * y) + np.cos(TWO_PI * y)


def _random_smooth(grid, params, seed):
    k0 = float(params.get("k0", 4.0))
    if not k0 > 0:
        raise ConfigurationError(f"random_smooth needs k0 > 0, got {k0}")
    rng = np.random.Generator(np.random.PCG64(seed))
    noise = np.fft.fft2(rng.standard_normal((grid.n, grid.n)))
    mag = np.abs(noise)
    phase = np.divide(noise, mag, out=np.ones_like(noise), where=mag > 0)
    coeffs = np.exp(-grid.kmag**2 / k0**2) * phase
    coeffs[0, 0] = 0.0
    coeffs /= np.sqrt(np.sum(np.abs(coeffs) ** 2))
    return np.fft.ifft2(coeffs).real * grid.n**2


def _offset_checkerboard(grid, params, seed):
    # nonnegative datum used for the positivity check
    x, y = grid.coords()
    mean = float(params.get("mean", 2.0))
    return mean + np.cos(TWO_PI * x) * np.cos(TWO_PI * y)


REGISTRY = {
    "zero": _zero,
    "single_mode": _single_mode,
    "cmt": _cmt,
    "random_smooth": _random_smooth,
    "offset_checkerboard": _offset_checkerboard,
}

# accepted parameter names per initial condition
PARAMS = {
    "zero": (),
    "single_mode": ("k1", "k2", "amplitude"),
    "cmt": (),
    "random_smooth": ("k0",),
    "offset_checkerboard": ("mean",),
}


def make_initial_condition(name: str, params: Optional[dict], grid: Grid,
                           seed: Optional[int] = None) -> PhysicalField:
    try:
        build = REGISTRY[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown initial condition {name!r}; choose from {sorted(REGISTRY)}") from None
    params = dict(params or {})
    unknown = sorted(set(params) - set(PARAMS[name]))
    if unknown:
        raise ConfigurationError(
            f"initial condition {name!r} takes no parameter(s) {unknown}; "
            f"accepted: {list(PARAMS[name])}")
    if name == "random_smooth" and seed is None:
        seed = 0
    return PhysicalField(grid, build(grid, params, seed))
