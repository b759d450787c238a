import math

import numpy as np
import pytest

from meff import coefficients as C
from meff.asymptotics import (
    Model,
    PlateauBand,
    ScanPoint,
    ScanSeries,
    bracket_limit,
    fit_rate,
    geometric_grid,
    model_select,
    scan,
    thread_count,
)
from meff.quadrature import ConvergenceError, CutoffConfig, IntegralResult


def series_from(f, lams, name="syn"):
    return ScanSeries(name, tuple(ScanPoint(x, f(x), 0.0) for x in lams))


GRID = [10.0, 31.6, 100.0, 316.0, 1000.0, 3162.0, 10000.0]


class TestFitRate:
    @pytest.mark.parametrize("model,f,coef", [
        (Model.LAMBDA2, lambda x: 7.0 * x * x, 7.0),
        (Model.LOG, lambda x: 3.0 * math.log(x) + 1.0, 3.0),
        (Model.LOG2, lambda x: -2.0 * math.log(x) ** 2 + 5.0, -2.0),
        (Model.SQRT, lambda x: 0.25 * math.sqrt(x), 0.25),
    ])
    def test_exact_recovery(self, model, f, coef):
        fit = fit_rate(series_from(f, GRID), model)
        assert fit.coefficient == pytest.approx(coef, rel=1e-8)
        assert fit.residual < 1e-10

    def test_constant_series_gets_zero_slope(self):
        fit = fit_rate(series_from(lambda x: 5.0, GRID), Model.LOG)
        assert fit.coefficient == pytest.approx(0.0, abs=1e-12)
        assert fit.intercept == pytest.approx(5.0, rel=1e-12)

    def test_plateau_is_top_decade_band(self):
        fit = fit_rate(series_from(lambda x: x * x, GRID), Model.LAMBDA2)
        assert fit.plateau == (pytest.approx(1.0), pytest.approx(1.0))

    def test_degenerate_design(self):
        s = ScanSeries("syn", (ScanPoint(10.0, 1.0, 0.0),
                               ScanPoint(20.0, 2.0, 0.0),
                               ScanPoint(30.0, 3.0, 0.0)))
        bad = ScanSeries("syn", tuple(
            ScanPoint(x, 1.0, 0.0, ok=(i < 2))
            for i, x in enumerate([10.0, 20.0, 30.0])))
        with pytest.raises(ValueError):
            fit_rate(bad, Model.LOG)
        fit_rate(s, Model.LOG)  # three valid points are enough

    def test_failed_points_skipped(self):
        pts = tuple(ScanPoint(x, x * x if x < 5000 else -1e9, 0.0,
                              ok=x < 5000) for x in GRID)
        fit = fit_rate(ScanSeries("syn", pts), Model.LAMBDA2)
        assert fit.coefficient == pytest.approx(1.0, rel=1e-10)


class TestModelSelect:
    def test_exact_lambda2(self):
        ranked = model_select(series_from(lambda x: 7 * x * x, GRID))
        assert ranked[0].model is Model.LAMBDA2
        assert ranked[0].coefficient == pytest.approx(7.0)

    def test_exact_sqrt(self):
        ranked = model_select(series_from(lambda x: 2 * math.sqrt(x), GRID))
        assert ranked[0].model is Model.SQRT

    def test_tie_prefers_slower_growth(self):
        # A constant series fits all four models exactly; LOG must win.
        ranked = model_select(series_from(lambda x: 4.0, GRID))
        assert ranked[0].model is Model.LOG

    def test_preconditions(self):
        with pytest.raises(ValueError):
            model_select(series_from(lambda x: x, [10.0, 20.0, 40.0, 80.0]))
        short = series_from(lambda x: x, [10.0, 20.0, 30.0])
        with pytest.raises(ValueError):
            model_select(short)


class TestScan:
    def test_named_coefficient(self):
        series = scan("a1", CutoffConfig(1.0, 10.0), [10.0, 100.0, 1000.0])
        vals = [p.value for p in series.points]
        assert vals == sorted(vals)
        assert all(v > 0 for v in vals)

    def test_e2_scan_negative_decreasing(self):
        series = scan("e2", CutoffConfig(1.0, 10.0), [10.0, 100.0, 1000.0])
        vals = [p.value for p in series.points]
        assert all(v < 0 for v in vals)
        assert vals == sorted(vals, reverse=True)

    def test_empty_range_point(self):
        series = scan("a1", CutoffConfig(1.0, 1.0), [1.0, 10.0, 100.0])
        assert series.points[0].value == 0.0

    def test_callable_with_failure_marks_point(self):
        def flaky(cfg):
            if cfg.lambda_over_m > 50:
                raise ConvergenceError("nope", IntegralResult(1.0, 9.9, 10))
            return IntegralResult(cfg.lambda_over_m, 0.0, 1)

        series = scan(flaky, CutoffConfig(1.0, 10.0), [10.0, 20.0, 100.0])
        assert [p.ok for p in series.points] == [True, True, False]
        assert series.points[2].value == 1.0

    def test_thread_pool_matches_serial(self, monkeypatch):
        lams = [10.0, 100.0, 1000.0]
        serial = scan("a1", CutoffConfig(1.0, 10.0), lams)
        monkeypatch.setenv("MEFF_THREADS", "4")
        assert thread_count() == 4
        threaded = scan("a1", CutoffConfig(1.0, 10.0), lams)
        assert [p.value for p in serial.points] == \
            [p.value for p in threaded.points]

    def test_rejects_cutoffs_below_kappa(self):
        with pytest.raises(ValueError):
            scan("a1", CutoffConfig(2.0, 10.0), [1.0, 10.0, 100.0])


class TestBands:
    def test_a1_band_narrows_as_scan_extends(self):
        base = CutoffConfig(1.0, 10.0)
        widths = []
        for top in (1e4, 1e5, 1e6):
            series = scan("a1", base, geometric_grid(100.0, top, 5))
            band = bracket_limit(series, Model.LOG)
            widths.append(band.width_ratio)
        assert widths[2] < widths[1] < widths[0]

    def test_raw_value_band(self):
        s = series_from(lambda x: 3.0 + 1e-4 * math.log(x), GRID)
        band = bracket_limit(s, model=None)
        assert isinstance(band, PlateauBand)
        assert band.is_plateau

    def test_geometric_grid(self):
        grid = geometric_grid(100.0, 1.0e4, 5)
        assert grid[0] == pytest.approx(100.0)
        assert grid[-1] == pytest.approx(1.0e4)
        assert len(grid) == 11
        with pytest.raises(ValueError):
            geometric_grid(10.0, 1.0)


class TestE4Band:
    def test_e4_band_strictly_negative_and_bounded(self):
        series = scan("E4", CutoffConfig(1.0, 10.0), [1e2, 1e3, 1e4],
                      rel_tol=1e-7)
        band = bracket_limit(series, Model.LAMBDA2)
        assert band.hi < 0.0
        mid = abs(band.mid)
        assert -10.0 * mid <= band.lo <= band.hi <= -0.1 * mid

    def test_e4_best_model_is_quadratic(self):
        series = scan("E4", CutoffConfig(1.0, 10.0),
                      geometric_grid(1e2, 1e4, 2), rel_tol=1e-7)
        best = model_select(series)[0]
        assert best.model is Model.LAMBDA2
        assert best.coefficient < 0.0

    def test_a1_best_model_is_log(self):
        series = scan("a1", CutoffConfig(1.0, 10.0),
                      geometric_grid(1e2, 1e6, 3))
        assert model_select(series)[0].model is Model.LOG
