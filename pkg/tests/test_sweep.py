import numpy as np
import pytest
from hypothesis import given, strategies as st

from sqg_alpha.diagnostics import DiagnosticsRecord
from sqg_alpha.errors import ConfigurationError, InsufficientDataError
from sqg_alpha.initial import ICSpec
from sqg_alpha.sweep import (
    SweepConfig,
    SweepResult,
    Verdict,
    affine_intercept,
    blowup_verdict,
    default_resolution,
    estimate_liminf,
    finalize,
    geometric_alphas,
    run_sweep,
)

ALPHAS = geometric_alphas(0.1, 6)


def synthetic_result(fn, alphas=ALPHAS, times=(0.5,), threshold=0.05):
    """SweepResult whose indicator at (alpha, t) is fn(alpha, t)."""
    cfg = SweepConfig(ic=ICSpec("zero"), t_end=max(times), sample_times=times,
                      alphas=alphas, resolution_rule=lambda a: 4096)
    per_alpha = {
        a: [DiagnosticsRecord(t, 0, 0, 0, 0, 0, fn(a, t), fn(a, t) ** 2, 0) for t in times]
        for a in alphas
    }
    res = SweepResult(cfg, per_alpha, {a: 4096 for a in alphas}, {a: None for a in alphas},
                      theta0_h1=1.0, threshold=threshold)
    return finalize(res)


class TestConfig:
    def test_default_alphas(self):
        assert ALPHAS == [0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125]

    @pytest.mark.parametrize("alpha,n", [(0.1, 64), (0.05, 128), (0.2, 32), (0.5, 16),
                                         (0.003125, 2048)])
    def test_resolution_rule(self, alpha, n):
        assert default_resolution(alpha) == n
        assert n * alpha >= 4

    def test_empty_sample_times(self):
        with pytest.raises(ConfigurationError):
            SweepConfig(ic=ICSpec("zero"), t_end=1.0, sample_times=[])

    @pytest.mark.parametrize("alphas", [[0.1, 0.1], [0.05, 0.1], [0.1, -0.1], []])
    def test_bad_alphas(self, alphas):
        with pytest.raises(ConfigurationError):
            SweepConfig(ic=ICSpec("zero"), t_end=1.0, sample_times=[1.0], alphas=alphas)

    def test_sample_time_past_end(self):
        with pytest.raises(ConfigurationError):
            SweepConfig(ic=ICSpec("zero"), t_end=1.0, sample_times=[2.0])

    def test_underresolved_rule_refused(self):
        cfg = SweepConfig(ic=ICSpec("zero"), t_end=1.0, sample_times=[1.0],
                          alphas=[0.1], resolution_rule=lambda a: 32)
        with pytest.raises(ConfigurationError, match="under-resolved"):
            cfg.resolutions()


class TestEstimator:
    def test_linear_signature(self):
        res = synthetic_result(lambda a, t: 0.5 * a)
        eps, resid = res.liminf_estimates[0.5]
        assert eps == pytest.approx(0.0, abs=1e-15)
        assert resid < 1e-15

    def test_affine(self):
        res = synthetic_result(lambda a, t: 0.3 + 0.5 * a)
        eps, resid = estimate_liminf(res, 0.5)
        assert abs(eps - 0.3) < 1e-12 and resid < 1e-14

    def test_uses_smallest_four(self):
        # the large-alpha levels are off the line and must be ignored
        res = synthetic_result(lambda a, t: 0.3 + 0.5 * a if a < 0.03 else 9.0)
        assert abs(res.liminf_estimates[0.5][0] - 0.3) < 1e-12

    def test_negative_intercept_clamped(self):
        res = synthetic_result(lambda a, t: -0.2 + 3 * a)
        assert res.liminf_estimates[0.5][0] == 0.0

    def test_insufficient(self):
        res = synthetic_result(lambda a, t: a, alphas=[0.1, 0.05])
        with pytest.raises(InsufficientDataError):
            estimate_liminf(res, 0.5)
        with pytest.raises(InsufficientDataError):
            affine_intercept([0.1, 0.05], [1.0, 2.0])

    def test_noise_monte_carlo(self):
        rng = np.random.default_rng(7)
        sigma = 1e-3
        a = np.array(sorted(ALPHAS)[:4])
        # independent oracle: intercept standard deviation from (X^T X)^-1
        X = np.column_stack([np.ones(4), a])
        sd = sigma * np.sqrt(np.linalg.inv(X.T @ X)[0, 0])
        assert 5e-3 > 3 * sd
        estimates = []
        for _ in range(400):
            noise = dict(zip(ALPHAS, rng.normal(0, sigma, len(ALPHAS))))
            res = synthetic_result(lambda al, t: 0.3 + 0.5 * al + noise[al])
            estimates.append(res.liminf_estimates[0.5][0])
        estimates = np.array(estimates)
        assert np.all(np.abs(estimates - 0.3) <= 5e-3)
        assert abs(estimates.std() - sd) < 0.15 * sd


class TestVerdict:
    def test_no_evidence(self):
        res = synthetic_result(lambda a, t: 0.5 * a, times=(0.1, 0.2))
        assert res.verdict is Verdict.NO_BLOWUP_EVIDENCE

    def test_blowup(self):
        res = synthetic_result(lambda a, t: 0.3 + 0.5 * a)
        assert blowup_verdict(res, 0.05) is Verdict.BLOWUP_INDICATED

    def test_blowup_with_small_residual(self):
        res = synthetic_result(lambda a, t: 0.3 + 0.5 * a)
        res.liminf_estimates = {0.5: (0.3, 1e-3)}
        assert blowup_verdict(res, 0.05) is Verdict.BLOWUP_INDICATED

    def test_large_residual_is_inconclusive(self):
        res = synthetic_result(lambda a, t: 0.3)
        res.liminf_estimates = {0.5: (0.3, 0.2)}
        assert blowup_verdict(res, 0.05) is Verdict.INCONCLUSIVE

    def test_band(self):
        res = synthetic_result(lambda a, t: 0.04 + 0.5 * a)
        assert blowup_verdict(res, 0.05) is Verdict.INCONCLUSIVE

    @given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=6),
           st.tuples(st.floats(0, 1), st.floats(0, 1)))
    def test_sup_monotone(self, estimates, extra):
        res = synthetic_result(lambda a, t: a)
        res.liminf_estimates = {float(i): e for i, e in enumerate(estimates)}
        from sqg_alpha.sweep import eps_sup

        before = eps_sup(res)
        res.liminf_estimates[99.0] = extra
        assert eps_sup(res) >= before


class TestRunSweep:
    def _cfg(self, **kw):
        base = dict(ic=ICSpec("single_mode"), t_end=0.2, sample_times=[0.0, 0.1, 0.2],
                    alphas=[0.2, 0.1, 0.05])
        base.update(kw)
        return SweepConfig(**base)

    def test_steady_state(self):
        res = run_sweep(self._cfg())
        assert res.verdict is Verdict.NO_BLOWUP_EVIDENCE
        for a, series in res.per_alpha.items():
            b = [r.blowup_indicator for r in series]
            assert np.ptp(b) < 1e-10
            assert abs(b[0] - a * np.pi * np.sqrt(2)) < 1e-12
            assert [r.t for r in series] == [0.0, 0.1, 0.2]
        for eps, _ in res.liminf_estimates.values():
            assert abs(eps) < 1e-10

    def test_deterministic(self):
        a = run_sweep(self._cfg(ic=ICSpec("cmt"), t_end=0.05, sample_times=[0.05]))
        b = run_sweep(self._cfg(ic=ICSpec("cmt"), t_end=0.05, sample_times=[0.05]))
        assert a.per_alpha == b.per_alpha
        assert a.liminf_estimates == b.liminf_estimates
        assert a.verdict == b.verdict

    def test_parallel_matches_serial(self):
        cfg = dict(ic=ICSpec("cmt"), t_end=0.05, sample_times=[0.05])
        a = run_sweep(self._cfg(**cfg))
        b = run_sweep(self._cfg(parallelism=2, **cfg))
        assert a.per_alpha == b.per_alpha

    def test_zero_ic(self):
        res = run_sweep(self._cfg(ic=ICSpec("zero")))
        assert res.verdict is Verdict.NO_BLOWUP_EVIDENCE

    def test_bound_respected(self):
        res = run_sweep(self._cfg(ic=ICSpec("cmt"), t_end=0.1, sample_times=[0.05, 0.1]))
        for series in res.per_alpha.values():
            for r in series:
                assert r.blowup_indicator <= res.theta0_h1 + 1e-8

    def test_overflowing_run_is_truncated_not_fatal(self, monkeypatch):
        import sqg_alpha.sweep as sw
        from sqg_alpha.errors import NumericalOverflowError

        real = sw.integrate

        def flaky(state, cfg, callbacks=None):
            if state.alpha == 0.05 and cfg.t_end > 0.1:
                raise NumericalOverflowError("boom", t=state.t, last_good_t=state.t)
            return real(state, cfg, callbacks)

        monkeypatch.setattr(sw, "integrate", flaky)
        res = run_sweep(self._cfg())
        assert res.truncated[0.05] == 0.1
        assert [r.t for r in res.per_alpha[0.05]] == [0.0, 0.1]
        assert 0.2 not in res.liminf_estimates  # only two levels reached t=0.2
        assert 0.1 in res.liminf_estimates
