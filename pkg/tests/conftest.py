import numpy as np
import pytest
from hypothesis import settings

from sqg_alpha import spectral as sp

settings.register_profile("default", deadline=None, max_examples=30)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def random_band_limited(n, rng, amplitude=1.0, mean=0.0):
    """Real field supported on the dealias mask, Nyquist-free."""
    grid = sp.make_grid(n)
    F = sp.dealias(sp.from_values(rng.standard_normal((n, n))))
    c = F.coeffs
    c[0, 0] = mean
    scale = np.sqrt(np.sum(np.abs(c) ** 2) - abs(mean) ** 2)
    if scale > 0:
        nz = np.ones_like(c, dtype=bool)
        nz[0, 0] = False
        c[nz] *= amplitude / scale
    return sp.SpectralField(grid, c)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
