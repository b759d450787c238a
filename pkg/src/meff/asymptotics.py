"""Divergence-rate estimation from cutoff scans.

A scan evaluates one coefficient on an increasing cutoff grid; a rate fit
regresses the values against one of the four candidate growth models

    LOG: log x      LOG2: (log x)^2      SQRT: sqrt(x)      LAMBDA2: x^2

by least squares *in value space* (with intercept).  Log-log slopes cannot
separate LOG from LOG2 at reachable cutoffs, linear-space residuals can.
Limit constants are reported as plateau bands (min/max of value/model over
the top decade), never as point estimates: the underlying statements are
two-sided bounds with unknown constants.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import coefficients
from .quadrature import ConvergenceError, CutoffConfig, IntegralResult

__all__ = [
    "Model",
    "ScanPoint",
    "ScanSeries",
    "RateFit",
    "PlateauBand",
    "geometric_grid",
    "scan",
    "fit_rate",
    "model_select",
    "bracket_limit",
    "thread_count",
]


class Model(str, enum.Enum):
    LOG = "LOG"
    LOG2 = "LOG2"
    SQRT = "SQRT"
    LAMBDA2 = "LAMBDA2"


_MODEL_FN = {
    Model.LOG: lambda x: np.log(x),
    Model.LOG2: lambda x: np.log(x) ** 2,
    Model.SQRT: lambda x: np.sqrt(x),
    Model.LAMBDA2: lambda x: x**2,
}

# Tie-break preference: slower-growing first.
_GROWTH_RANK = {Model.LOG: 0, Model.LOG2: 1, Model.SQRT: 2, Model.LAMBDA2: 3}


@dataclass(frozen=True)
class ScanPoint:
    lambda_over_m: float
    value: float
    abs_err: float
    ok: bool = True


@dataclass(frozen=True)
class ScanSeries:
    coefficient_name: str
    points: tuple[ScanPoint, ...]

    def __post_init__(self) -> None:
        lams = [p.lambda_over_m for p in self.points]
        if len(lams) < 3:
            raise ValueError("a scan needs at least 3 points")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError("scan cutoffs must be strictly increasing")

    def valid(self) -> list[ScanPoint]:
        return [p for p in self.points if p.ok]


@dataclass(frozen=True)
class RateFit:
    model: Model
    coefficient: float
    intercept: float
    residual: float  # RMS of fit residuals / RMS of values
    plateau: tuple[float, float]  # min/max of value/model over top decade


@dataclass(frozen=True)
class PlateauBand:
    lo: float
    hi: float
    mid: float
    width_ratio: float  # (hi - lo) / |mid|
    is_plateau: bool


def thread_count() -> int:
    """Worker cap from MEFF_THREADS (default 1 = serial)."""
    raw = os.environ.get("MEFF_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def geometric_grid(lo: float, hi: float, per_decade: int = 5) -> list[float]:
    """Geometric cutoff grid, endpoints included."""
    if not (0 < lo < hi) or per_decade < 1:
        raise ValueError("need 0 < lo < hi and per_decade >= 1")
    n = max(2, int(round(math.log10(hi / lo) * per_decade)) + 1)
    return list(np.geomspace(lo, hi, n))


def scan(coefficient, cfg_base: CutoffConfig, lambdas,
         rel_tol: float = 1.0e-8, name: str | None = None) -> ScanSeries:
    """Evaluate a coefficient on a cutoff grid, carrying quadrature errors.

    ``coefficient`` is a registry name (see ``coefficients.evaluate``) or a
    callable ``cfg -> IntegralResult | float``.  Points whose evaluation does
    not converge are kept but marked ``ok=False`` with the best estimate.
    Points run in a thread pool capped by MEFF_THREADS; output order is the
    input order either way.
    """
    lams = [float(x) for x in lambdas]
    if any(x < cfg_base.kappa_over_m for x in lams):
        raise ValueError("scan cutoffs must be >= kappa/m")
    if callable(coefficient):
        label = name or getattr(coefficient, "__name__", "coefficient")

        def eval_one(lam: float) -> ScanPoint:
            cfg = replace(cfg_base, lambda_over_m=lam)
            try:
                out = coefficient(cfg)
            except ConvergenceError as exc:
                return ScanPoint(lam, exc.result.value, exc.result.abs_err, ok=False)
            if isinstance(out, IntegralResult):
                return ScanPoint(lam, out.value, out.abs_err)
            return ScanPoint(lam, float(out), 0.0)
    else:
        label = name or str(coefficient)

        def eval_one(lam: float) -> ScanPoint:
            cfg = replace(cfg_base, lambda_over_m=lam)
            try:
                rep = coefficients.evaluate(str(coefficient), cfg, rel_tol)
            except ConvergenceError as exc:
                return ScanPoint(lam, exc.result.value, exc.result.abs_err, ok=False)
            return ScanPoint(lam, rep.result.value, rep.result.abs_err)

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = tuple(pool.map(eval_one, lams))
    else:
        points = tuple(eval_one(lam) for lam in lams)
    return ScanSeries(coefficient_name=label, points=points)


def _plateau(lams: np.ndarray, vals: np.ndarray, model: Model) -> tuple[float, float]:
    top = lams >= lams.max() / 10.0
    scaled = vals[top] / _MODEL_FN[model](lams[top])
    return float(scaled.min()), float(scaled.max())


def fit_rate(series: ScanSeries, model: Model) -> RateFit:
    """Least-squares fit value = coefficient * model(lambda) + intercept."""
    pts = series.valid()
    if len(pts) < 3:
        raise ValueError("need at least 3 valid points to fit")
    lams = np.array([p.lambda_over_m for p in pts])
    vals = np.array([p.value for p in pts])
    mx = _MODEL_FN[model](lams)
    if np.ptp(mx) == 0.0:
        raise ValueError("degenerate design: model values are all equal")
    design = np.column_stack([mx, np.ones_like(mx)])
    (coef, intercept), *_ = np.linalg.lstsq(design, vals, rcond=None)
    resid = vals - design @ [coef, intercept]
    scale = math.sqrt(float(np.mean(vals * vals)))
    residual = math.sqrt(float(np.mean(resid * resid))) / max(scale, 1e-300)
    return RateFit(
        model=model,
        coefficient=float(coef),
        intercept=float(intercept),
        residual=residual,
        plateau=_plateau(lams, vals, model),
    )


def model_select(series: ScanSeries) -> list[RateFit]:
    """All four models ranked by residual; ties go to the slower model.

    Needs >= 4 valid points spanning >= 2 decades; residuals below 1e-10 are
    treated as exact fits (tied), which makes the ranking deterministic for
    noiseless synthetic data.
    """
    pts = series.valid()
    if len(pts) < 4:
        raise ValueError("model selection needs at least 4 valid points")
    span = pts[-1].lambda_over_m / pts[0].lambda_over_m
    if span < 99.0:
        raise ValueError("model selection needs a scan spanning >= 2 decades")
    fits = [fit_rate(series, m) for m in Model]
    return sorted(
        fits,
        key=lambda f: (f.residual if f.residual > 1e-10 else 0.0,
                       _GROWTH_RANK[f.model]),
    )


def bracket_limit(series: ScanSeries, model: Model | None = None,
                  width_tol: float = 0.5) -> PlateauBand:
    """Top-decade band of value/model (raw values if model is None).

    ``is_plateau`` holds when the band width is below ``width_tol`` times the
    band midpoint magnitude; the band endpoints stand in for the unknown
    two-sided limit constants.
    """
    pts = series.valid()
    if len(pts) < 2:
        raise ValueError("need at least 2 valid points")
    lams = np.array([p.lambda_over_m for p in pts])
    vals = np.array([p.value for p in pts])
    scaled = vals / _MODEL_FN[model](lams) if model is not None else vals
    top = lams >= lams.max() / 10.0
    lo = float(scaled[top].min())
    hi = float(scaled[top].max())
    mid = 0.5 * (lo + hi)
    width = (hi - lo) / abs(mid) if mid != 0.0 else math.inf
    return PlateauBand(lo=lo, hi=hi, mid=mid, width_ratio=width,
                       is_plateau=width <= width_tol)
