import math

import numpy as np
import pytest

from meff.quadrature import (
    MEASURE_6D,
    ConvergenceError,
    CutoffConfig,
    Region,
    integrate_1d,
    integrate_2d,
    mc_integrate_6d,
    shell_volume,
)


class TestCutoffConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            CutoffConfig(2.0, 1.0)
        with pytest.raises(ValueError):
            CutoffConfig(-1.0, 1.0)
        with pytest.raises(ValueError):
            CutoffConfig(1.0, 10.0, lam_split=2.0)

    def test_empty_range_allowed(self):
        assert CutoffConfig(1.0, 1.0).empty


class TestIntegrate1D:
    def test_rational_example(self):
        res = integrate_1d(lambda r: r * r / (r + 2.0), 1.0, 3.0)
        assert res.value == pytest.approx(4.0 * math.log(5.0 / 3.0), rel=1e-12)
        assert res.n_eval >= 15

    def test_empty_range(self):
        res = integrate_1d(lambda r: r, 2.0, 2.0)
        assert res.value == 0.0 and res.abs_err == 0.0

    @pytest.mark.parametrize("top", [10.0, 1e3, 1e6])
    def test_soft_propagator_example(self, top):
        res = integrate_1d(lambda r: 1.0 / (0.5 * r + 1.0), 1.0, top)
        assert res.value == pytest.approx(2.0 * math.log((top + 2.0) / 3.0),
                                          rel=1e-10)

    def test_scalar_callable_supported(self):
        res = integrate_1d(math.sin, 0.0, math.pi)
        assert res.value == pytest.approx(2.0, rel=1e-12)

    def test_rel_tol_validation(self):
        with pytest.raises(ValueError):
            integrate_1d(lambda r: r, 0.0, 1.0, rel_tol=1.0)
        with pytest.raises(ValueError):
            integrate_1d(lambda r: r, 1.0, 0.0)

    def test_convergence_error_carries_best_estimate(self):
        f = lambda x: np.sin(1.0 / x) / x
        with pytest.raises(ConvergenceError) as exc:
            integrate_1d(f, 1e-9, 1.0, rel_tol=1e-13, max_intervals=32)
        best = exc.value.result
        assert math.isfinite(best.value) and best.abs_err > 0

    def test_error_estimate_honesty(self):
        # True error <= 10x reported error in >= 95% of randomized cases.
        rng = np.random.default_rng(5)
        good = total = 0
        for _ in range(80):
            k = rng.integers(1, 6)
            c = rng.uniform(0.5, 4.0)
            a, b = sorted(rng.uniform(0.1, 20.0, 2))
            if b - a < 1e-3:
                continue
            exact = (b ** (k + 1) - a ** (k + 1)) / (k + 1) \
                + c * (math.log(b) - math.log(a))
            res = integrate_1d(lambda r: r**k + c / r, a, b, rel_tol=1e-10)
            total += 1
            if abs(res.value - exact) <= 10.0 * max(res.abs_err, 1e-15):
                good += 1
        assert good / total >= 0.95


class TestIntegrate2D:
    def test_unit_area(self):
        cfg = CutoffConfig(1.0, 2.0)
        res = integrate_2d(lambda r1, r2: np.ones_like(r1), cfg)
        assert res.value == pytest.approx(1.0, rel=1e-12)

    def test_region_additivity_random_integrands(self):
        rng = np.random.default_rng(11)
        cfg = CutoffConfig(0.7, 80.0, 3.5)
        for _ in range(20):
            a, b = rng.uniform(-1.0, 1.5, 2)
            c = rng.uniform(0.1, 2.0)

            def f(r1, r2, a=a, b=b, c=c):
                return r1**a * r2**b / (c + r1 + r2)

            full = integrate_2d(f, cfg, Region.FULL, 1e-9)
            parts = [integrate_2d(f, cfg, reg, 1e-9)
                     for reg in (Region.I, Region.II1, Region.II2)]
            total = sum(p.value for p in parts)
            budget = full.abs_err + sum(p.abs_err for p in parts) + 1e-13
            assert abs(full.value - total) <= 10.0 * budget

    def test_region_geometry(self):
        # Indicator masses: region areas of [1, L]^2 split at ratio lam.
        lam, top = 3.0, 30.0
        cfg = CutoffConfig(1.0, top, lam)
        one = lambda r1, r2: np.ones_like(r1)
        full = integrate_2d(one, cfg, Region.FULL, 1e-10).value
        ii1 = integrate_2d(one, cfg, Region.II1, 1e-10).value
        ii2 = integrate_2d(one, cfg, Region.II2, 1e-10).value
        mid = integrate_2d(one, cfg, Region.I, 1e-10).value
        # area of {1<=x<=L/lam, lam*x<=y<=L} = L^2/(2 lam) - L + lam/2
        expected = top**2 / (2 * lam) - top + lam / 2.0
        assert ii1 == pytest.approx(expected, rel=1e-10)
        assert ii2 == pytest.approx(expected, rel=1e-10)
        assert full == pytest.approx((top - 1.0) ** 2, rel=1e-10)
        assert mid == pytest.approx(full - 2 * expected, rel=1e-10)

    def test_empty_region_when_split_exceeds_box(self):
        cfg = CutoffConfig(1.0, 2.0, 3.0)  # lam*kappa > lambda: II parts empty
        res = integrate_2d(lambda r1, r2: np.ones_like(r1), cfg, Region.II1)
        assert res.value == 0.0

    def test_sqrt_growth_of_collinear_integral(self):
        # II 1/eMinus ~ sqrt(lambda): exponent 0.5 +- 0.05.  The asymptotic
        # exponent is read off the top decade of the scan (the global slope
        # over 1e2..1e5 still carries the log-size transient).
        vals = []
        lams = [1e2, 1e3, 1e4, 1e5]
        for lam in lams:
            cfg = CutoffConfig(1.0, lam)
            f = lambda r1, r2: 1.0 / (0.5 * (r1 - r2) ** 2 + r1 + r2)
            vals.append(integrate_2d(f, cfg, Region.FULL, 1e-7).value)
        slope = math.log(vals[-1] / vals[-2]) / math.log(lams[-1] / lams[-2])
        assert slope == pytest.approx(0.5, abs=0.05)


class TestMonteCarlo:
    def test_constant_integrand_exact(self):
        cfg = CutoffConfig(1.0, 2.0)
        res = mc_integrate_6d(lambda k1, k2: np.ones(len(k1)), cfg, 10000, 3)
        exact = MEASURE_6D * ((4.0 * math.pi / 3.0) * 7.0) ** 2
        assert res.value == exact
        assert shell_volume(cfg) == pytest.approx((4 * math.pi / 3) * 7.0)

    def test_odd_integrand_consistent_with_zero(self):
        cfg = CutoffConfig(1.0, 2.0)
        res = mc_integrate_6d(lambda k1, k2: k1[:, 2], cfg, 100_000, 17)
        assert abs(res.value) <= 3.0 * res.abs_err

    def test_deterministic_for_fixed_seed(self):
        cfg = CutoffConfig(1.0, 5.0)
        f = lambda k1, k2: np.linalg.norm(k1, axis=1) * np.linalg.norm(k2, axis=1)
        a = mc_integrate_6d(f, cfg, 150_000, 123)
        b = mc_integrate_6d(f, cfg, 150_000, 123)
        assert a.value == b.value and a.abs_err == b.abs_err

    def test_radial_density_reproduces_polynomial_moment(self):
        # E[|k1|^2] under the r^2-density sampling has a closed form.
        cfg = CutoffConfig(1.0, 3.0)
        f = lambda k1, k2: np.sum(k1 * k1, axis=1)
        res = mc_integrate_6d(f, cfg, 400_000, 8)
        shell = shell_volume(cfg)
        exact = MEASURE_6D * shell * (4 * math.pi / 5.0) * (3.0**5 - 1.0)
        assert abs(res.value - exact) <= 3.0 * res.abs_err
