import numpy as np
import pytest
from hypothesis import given, strategies as st

from sqg_alpha import spectral as sp
from sqg_alpha.diagnostics import (
    CSV_COLUMNS,
    DiagnosticsRecord,
    blowup_indicator,
    convergence_metric,
    energy_spectrum,
    h1_norm,
    max_principle_report,
    modified_energy,
    record,
    spectral_pad,
)
from sqg_alpha.errors import ConfigurationError
from sqg_alpha.initial import make_initial_condition
from sqg_alpha.model import state_from_theta
from sqg_alpha.timestepper import IntegratorConfig, integrate

from conftest import random_band_limited
from oracles import trapezoid_integral

TWO_PI = 2 * np.pi


def field(n, fn):
    g = sp.make_grid(n)
    x, y = g.coords()
    return sp.from_values(fn(TWO_PI * x, TWO_PI * y))


def cos_y(n=16):
    return field(n, lambda X, Y: np.cos(Y))


def cmt(n=32):
    return field(n, lambda X, Y: np.sin(X) * np.sin(Y) + np.cos(Y))


def fake_record(t, lo, hi):
    return DiagnosticsRecord(t, 1.0, 1.0, 1.0, hi, lo, 0.0, 0.0, 0.0)


class TestModifiedEnergy:
    def test_single_mode(self):
        e = modified_energy(cos_y(), 0.1)
        assert abs(e - 0.5 * (1 + 4 * np.pi**2 * 0.01)) < 1e-12
        assert abs(e - 0.697392) < 1e-6

    def test_zero(self):
        assert modified_energy(sp.SpectralField.zeros(sp.make_grid(16)), 0.3) == 0

    def test_cmt(self):
        assert abs(modified_energy(cmt(), 0.0) - 0.75) < 1e-12
        # alpha^2 term carries ||grad theta||^2 = 4 pi^2
        assert abs(modified_energy(cmt(), 0.1) - (0.75 + 0.01 * 4 * np.pi**2)) < 1e-11

    def test_matches_physical_quadrature(self, rng):
        th = random_band_limited(32, rng)
        g1, g2 = sp.gradient(th)
        alpha = 0.2
        phys = trapezoid_integral(sp.to_values(th) ** 2
                                  + alpha**2 * (sp.to_values(g1) ** 2 + sp.to_values(g2) ** 2))
        assert abs(modified_energy(th, alpha) - phys) < 1e-10


class TestIndicator:
    def test_single_mode(self):
        b = blowup_indicator(cos_y(), 0.01)
        assert abs(b - 0.01 * np.pi * np.sqrt(2)) < 1e-12
        assert abs(b - 0.0444288) < 1e-7
        assert abs(blowup_indicator(cos_y(), 0.01, squared=True) - b**2) < 1e-15

    def test_zero(self):
        assert blowup_indicator(sp.SpectralField.zeros(sp.make_grid(16)), 0.1) == 0

    @pytest.mark.parametrize("alpha", [0.0, -0.1])
    def test_rejects_nonpositive_alpha(self, alpha):
        with pytest.raises(ConfigurationError):
            blowup_indicator(cos_y(), alpha)

    def test_bound_along_evolution(self):
        th0 = cmt(32)
        bound = h1_norm(th0)
        s = state_from_theta(th0, 0.1)
        recs = []
        integrate(s, IntegratorConfig(t_end=0.3, callback_interval=0.1),
                  lambda t, st: recs.append(record(st)))
        for r in recs:
            assert r.blowup_indicator <= bound + 1e-8
            assert r.l2 <= bound + 1e-8


class TestRecord:
    def test_columns(self):
        assert CSV_COLUMNS == ("t", "energy_modified", "l2", "grad_l2", "linf_max",
                               "linf_min", "blowup_indicator", "blowup_indicator_sq", "mean")

    @given(st.integers(0, 2**32 - 1), st.floats(0, 1))
    def test_energy_consistency(self, seed, alpha):
        th = random_band_limited(16, np.random.default_rng(seed), mean=0.4)
        r = record(state_from_theta(th, alpha))
        assert abs(r.energy_modified - (r.l2**2 + alpha**2 * r.grad_l2**2)) \
            <= 1e-12 * r.energy_modified
        assert all(np.isfinite(r.as_row()))
        assert abs(r.mean - 0.4) < 1e-14

    def test_single_mode_values(self):
        r = record(state_from_theta(cos_y(16), 0.1, t=0.25))
        assert r.t == 0.25
        assert abs(r.l2 - np.sqrt(0.5)) < 1e-12
        assert abs(r.grad_l2 - np.pi * np.sqrt(2)) < 1e-12
        assert abs(r.linf_max - 1) < 1e-12 and abs(r.linf_min + 1) < 1e-12

    def test_row_roundtrip(self):
        r = record(state_from_theta(cmt(16), 0.1))
        assert DiagnosticsRecord.from_row(r.as_row()) == r


class TestMaxPrinciple:
    def test_constant_series(self):
        rep = max_principle_report([fake_record(t, -1.0, 1.0) for t in range(5)], 1.0)
        assert rep.violation == 0 and rep.ok

    def test_flags_violation(self):
        series = [fake_record(0, -1.0, 1.0), fake_record(1, -0.5, 1.05)]
        rep = max_principle_report(series, 1.0)
        assert abs(rep.violation - 0.05) < 1e-15
        assert not rep.ok

    def test_positivity(self):
        series = [fake_record(0, 0.0, 2.0), fake_record(1, -0.01, 2.0)]
        rep = max_principle_report(series, 2.0)
        assert rep.positivity_checked
        assert abs(rep.positivity_violation - 0.01) < 1e-15

    def test_positivity_skipped_for_signed_data(self):
        rep = max_principle_report([fake_record(0, -1.0, 1.0)], 1.0)
        assert not rep.positivity_checked and rep.positivity_violation is None

    def test_empty(self):
        with pytest.raises(ConfigurationError):
            max_principle_report([], 1.0)

    def test_steady_run(self):
        g = sp.make_grid(32)
        th0 = make_initial_condition("single_mode", {}, g)
        recs = []
        integrate(state_from_theta(th0, 0.1), IntegratorConfig(t_end=1.0, callback_interval=0.1),
                  lambda t, s: recs.append(record(s)))
        rep = max_principle_report(recs, float(np.abs(th0.values).max()))
        assert rep.violation <= 1e-10


class TestConvergenceMetric:
    def test_identical(self):
        assert convergence_metric(cmt(), cmt(), 0.1) == 0

    def test_against_zero(self):
        z = sp.SpectralField.zeros(sp.make_grid(16))
        assert abs(convergence_metric(cos_y(), z, 0.0) - 0.5) < 1e-12

    @given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1))
    def test_alpha_monotone(self, seed, alpha):
        rng = np.random.default_rng(seed)
        a, b = random_band_limited(16, rng), random_band_limited(16, rng)
        assert convergence_metric(a, b, alpha) >= convergence_metric(a, b, 0.0)

    def test_grid_mismatch(self):
        with pytest.raises(ConfigurationError):
            convergence_metric(cos_y(16), cos_y(32), 0.0)


class TestPad:
    def test_same_size(self):
        F = cmt(16)
        assert np.array_equal(spectral_pad(F, 16).coeffs, F.coeffs)

    def test_single_mode(self):
        out = sp.to_values(spectral_pad(cos_y(16), 32))
        x, y = sp.make_grid(32).coords()
        assert np.abs(out - np.cos(TWO_PI * y)).max() < 1e-12

    def test_common_points_agree(self, rng):
        f = rng.standard_normal((16, 16))  # includes Nyquist content
        padded = sp.to_values(spectral_pad(sp.from_values(f), 48))
        assert np.abs(padded[::3, ::3] - f).max() < 1e-12

    def test_norm_preserved(self, rng):
        F = random_band_limited(16, rng)
        assert spectral_pad(F, 64).coeffs.shape == (64, 64)
        assert sp.l2_norm(spectral_pad(F, 64)) == pytest.approx(sp.l2_norm(F), abs=1e-15)

    @pytest.mark.parametrize("n", [8, 17])
    def test_rejects(self, n):
        with pytest.raises(ConfigurationError):
            spectral_pad(cos_y(16), n)


class TestSpectrum:
    def test_single_mode(self):
        spec = dict(energy_spectrum(cos_y(16)))
        assert abs(spec[1] - 0.5) < 1e-12
        assert all(abs(v) < 1e-24 for m, v in spec.items() if m != 1)
        assert sorted(spec) == list(range(1, 9))

    def test_zero(self):
        assert all(v == 0 for _, v in energy_spectrum(sp.SpectralField.zeros(sp.make_grid(16))))

    @given(st.integers(0, 2**32 - 1))
    def test_parseval_partition(self, seed):
        th = random_band_limited(32, np.random.default_rng(seed), mean=0.8)
        total = sum(v for _, v in energy_spectrum(th))
        assert abs(total - (sp.l2_norm(th) ** 2 - th.mean**2)) < 1e-12
