"""Fourier machinery on the periodic unit square [0, 1]^2.

Fields are sampled on an n x n grid, ``values[i, j]`` being the value at
``(i*dx, j*dx)``; axis 0 is x and axis 1 is y.  Spectral coefficients use the
basis ``exp(2*pi*i*k.x)`` and are normalized so that a mode's coefficient equals
its physical amplitude (``cos(2*pi*k.x)`` has coefficients 1/2 at +k and -k).
With this scaling, ``sum |c_k|^2`` is the L2 norm squared over the unit square.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import ConfigurationError, DataIntegrityError

TWO_PI = 2.0 * np.pi

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform n x n grid with cached wavevector and multiplier tables."""

    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise ConfigurationError(f"grid size must be an integer, got {self.n!r}")
        if self.n < 8 or self.n % 2:
            raise ConfigurationError(f"grid size must be even and >= 8, got {self.n}")

    @property
    def dx(self) -> float:
        return 1.0 / self.n

    @cached_property
    def wave(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer wavevector components (k1, k2) in FFT slot order."""
        k = np.rint(np.fft.fftfreq(self.n) * self.n).astype(np.int64)
        k1, k2 = np.meshgrid(k, k, indexing="ij")
        k1.flags.writeable = False
        k2.flags.writeable = False
        return k1, k2

    @cached_property
    def kmag(self) -> np.ndarray:
        """Integer-lattice magnitude |k|."""
        k1, k2 = self.wave
        return np.sqrt(k1**2 + k2**2, dtype=float)

    @cached_property
    def k2(self) -> np.ndarray:
        """Physical |2 pi k|^2, the symbol of -Laplacian."""
        return (TWO_PI * self.kmag) ** 2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        k1, k2 = self.wave
        cut = self.n // 3
        return (np.abs(k1) <= cut) & (np.abs(k2) <= cut)

    @cached_property
    def ddx(self) -> tuple[np.ndarray, np.ndarray]:
        """First-derivative symbols (2 pi i k1, 2 pi i k2).

        The Nyquist row/column is zeroed so odd derivatives of real fields stay
        real.
        """
        k1, k2 = self.wave
        nyq = -self.n // 2
        d1 = 1j * TWO_PI * np.where(k1 == nyq, 0, k1)
        d2 = 1j * TWO_PI * np.where(k2 == nyq, 0, k2)
        return d1, d2

    @cached_property
    def inv_kmag(self) -> np.ndarray:
        """1 / (2 pi |k|) with the zero mode mapped to 0."""
        out = np.zeros_like(self.kmag)
        nz = self.kmag > 0
        out[nz] = 1.0 / (TWO_PI * self.kmag[nz])
        return out

    def helmholtz_symbol(self, alpha: float) -> np.ndarray:
        """1 + 4 pi^2 alpha^2 |k|^2."""
        return 1.0 + alpha**2 * self.k2

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.n) * self.dx
        return np.meshgrid(x, x, indexing="ij")


@lru_cache(maxsize=None)
def make_grid(n: int) -> Grid:
    return Grid(int(n) if isinstance(n, np.integer) else n)


@dataclass(frozen=True)
class PhysicalField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.n, self.grid.n):
            raise ConfigurationError(
                f"values shape {self.values.shape} does not match grid n={self.grid.n}"
            )


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a real field.

    Supports the linear-space operations needed by the time integrator.
    """

    grid: Grid
    coeffs: np.ndarray

    def __add__(self, other: SpectralField) -> SpectralField:
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: SpectralField) -> SpectralField:
        _same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, c: float) -> SpectralField:
        return SpectralField(self.grid, c * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> SpectralField:
        return SpectralField(self.grid, -self.coeffs)

    @property
    def mean(self) -> float:
        return float(self.coeffs[0, 0].real)

    def mean_free(self) -> SpectralField:
        c = self.coeffs.copy()
        c[0, 0] = 0.0
        return SpectralField(self.grid, c)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.coeffs).all())

    @classmethod
    def zeros(cls, grid: Grid) -> SpectralField:
        return cls(grid, np.zeros((grid.n, grid.n), dtype=complex))


def _same_grid(a, b):
    if a.grid.n != b.grid.n:
        raise ConfigurationError(f"grid mismatch: n={a.grid.n} vs n={b.grid.n}")


def _mirror(c: np.ndarray) -> np.ndarray:
    """Array whose slot k holds c(-k)."""
    return np.roll(np.flip(c, axis=(0, 1)), 1, axis=(0, 1))


def symmetry_defect(F: SpectralField) -> float:
    """max |c(-k) - conj(c(k))|."""
    return float(np.max(np.abs(_mirror(F.coeffs) - np.conj(F.coeffs))))


def forward(f: PhysicalField) -> SpectralField:
    n = f.grid.n
    return SpectralField(f.grid, np.fft.fft2(f.values) / (n * n))


def inverse(F: SpectralField, check: bool = True) -> PhysicalField:
    """Real field with coefficients ``F``.

    Raises DataIntegrityError when ``F`` is not conjugate symmetric to within
    1e-10 (scaled by the largest coefficient when that exceeds 1).
    """
    c = F.coeffs
    if check:
        scale = max(1.0, float(np.max(np.abs(c))) if c.size else 1.0)
        defect = symmetry_defect(F)
        if not defect <= SYMMETRY_TOL * scale:
            raise DataIntegrityError(
                f"coefficients are not conjugate symmetric (defect {defect:.3e})"
            )
    n = F.grid.n
    return PhysicalField(F.grid, np.fft.ifft2(c).real * (n * n))


def from_values(values: np.ndarray) -> SpectralField:
    """Shortcut: forward transform of a raw n x n array."""
    values = np.asarray(values, dtype=float)
    return forward(PhysicalField(make_grid(values.shape[0]), values))


def to_values(F: SpectralField) -> np.ndarray:
    return inverse(F).values


def _apply(F: SpectralField, symbol) -> SpectralField:
    return SpectralField(F.grid, symbol * F.coeffs)


def frac_laplacian_half(F: SpectralField) -> SpectralField:
    """(-Laplacian)^(1/2): multiply by 2 pi |k|."""
    return _apply(F, TWO_PI * F.grid.kmag)


def inv_frac_laplacian_half(F: SpectralField) -> SpectralField:
    """(-Laplacian)^(-1/2) on the mean-free subspace; the zero mode is dropped."""
    return _apply(F, F.grid.inv_kmag)


def laplacian(F: SpectralField) -> SpectralField:
    return _apply(F, -F.grid.k2)


def helmholtz_inverse(F: SpectralField, alpha: float) -> SpectralField:
    """(1 - alpha^2 Laplacian)^(-1)."""
    if alpha < 0:
        raise ConfigurationError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 0:
        return SpectralField(F.grid, F.coeffs.copy())
    return _apply(F, 1.0 / F.grid.helmholtz_symbol(alpha))


def helmholtz_apply(F: SpectralField, alpha: float) -> SpectralField:
    """(1 - alpha^2 Laplacian)."""
    if alpha < 0:
        raise ConfigurationError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 0:
        return SpectralField(F.grid, F.coeffs.copy())
    return _apply(F, F.grid.helmholtz_symbol(alpha))


def gradient(F: SpectralField) -> tuple[SpectralField, SpectralField]:
    d1, d2 = F.grid.ddx
    return _apply(F, d1), _apply(F, d2)


def perp_gradient(Psi: SpectralField) -> tuple[SpectralField, SpectralField]:
    """(-d/dy, d/dx) applied to a stream function."""
    d1, d2 = Psi.grid.ddx
    return _apply(Psi, -d2), _apply(Psi, d1)


def divergence(v1: SpectralField, v2: SpectralField) -> SpectralField:
    _same_grid(v1, v2)
    d1, d2 = v1.grid.ddx
    return SpectralField(v1.grid, d1 * v1.coeffs + d2 * v2.coeffs)


def dealias(F: SpectralField) -> SpectralField:
    """2/3-rule truncation: keep |k1|, |k2| <= n // 3."""
    return SpectralField(F.grid, np.where(F.grid.dealias_mask, F.coeffs, 0.0))


def inner(a: SpectralField, b: SpectralField) -> float:
    """L2 pairing over the unit square, evaluated by Parseval."""
    _same_grid(a, b)
    return float(np.real(np.vdot(b.coeffs, a.coeffs)))


def l2_norm(F: SpectralField) -> float:
    return float(np.sqrt(np.sum(np.abs(F.coeffs) ** 2)))
