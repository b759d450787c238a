"""Figure rendering for the report path.

Writes PNG files next to the report's delimited output: scaled-value plateau
plots for the rate criteria and an overview of the cancellation scan.  All
figures are rendered headless (Agg).
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from . import asymptotics as asy  # noqa: E402
from .asymptotics import Model, ScanSeries  # noqa: E402

__all__ = ["render_rate_figure", "render_cancellation_figure",
           "render_report_figures"]

_MODEL_LABEL = {
    Model.LOG: "log(lambda/m)",
    Model.LOG2: "log^2(lambda/m)",
    Model.SQRT: "sqrt(lambda/m)",
    Model.LAMBDA2: "(lambda/m)^2",
}


def _scaled(series: ScanSeries, model: Model):
    pts = series.valid()
    lams = np.array([p.lambda_over_m for p in pts])
    vals = np.array([p.value for p in pts])
    return lams, vals / asy._MODEL_FN[model](lams)


def render_rate_figure(series: ScanSeries, model: Model, path: Path,
                       target: float | None = None,
                       title: str | None = None) -> Path:
    """Plot value/model against the cutoff with the top-decade band shaded."""
    lams, scaled = _scaled(series, model)
    band = asy.bracket_limit(series, model)
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.semilogx(lams, scaled, "o-", color="tab:blue", lw=1.2, ms=4)
    ax.axhspan(band.lo, band.hi, color="tab:blue", alpha=0.15,
               label="top-decade band")
    if target is not None:
        ax.axhline(target, color="tab:red", ls="--", lw=1.0, label="target")
    ax.set_xlabel("lambda/m")
    ax.set_ylabel(f"{series.coefficient_name} / {_MODEL_LABEL[model]}")
    ax.set_title(title or series.coefficient_name)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_cancellation_figure(first: ScanSeries, counter: ScanSeries,
                               diff: ScanSeries, path: Path) -> Path:
    """Quadratic pieces of E3 and their difference, scaled by (lambda/m)^2."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.4))
    for series, style, label in ((first, "o-", "soft-photon term"),
                                 (counter, "s--", "counter term")):
        lams, scaled = _scaled(series, Model.LAMBDA2)
        ax1.semilogx(lams, np.abs(scaled), style, ms=4, lw=1.2, label=label)
    ax1.set_xlabel("lambda/m")
    ax1.set_ylabel("|value| / (lambda/m)^2")
    ax1.set_title("quadratic pieces of E3")
    ax1.legend(fontsize=8)
    pts = diff.valid()
    lams = [p.lambda_over_m for p in pts]
    vals = [p.value for p in pts]
    ax2.semilogx(lams, vals, "o-", color="tab:green", ms=4, lw=1.2)
    ax2.set_xlabel("lambda/m")
    ax2.set_ylabel("difference")
    ax2.set_title("their pointwise difference")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_report_figures(ctx, outdir: Path) -> list[Path]:
    """Render whatever scans the report context has cached."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for key, value in list(ctx._cache.items()):
        if key[0] == "scan" and key[1] == "a1":
            written.append(render_rate_figure(
                value, Model.LOG, outdir / "a1_rate.png",
                target=4.0 / (3.0 * math.pi**2), title="a1 against log growth"))
        elif key[0] == "scan" and key[1] == "E4":
            written.append(render_rate_figure(
                value, Model.LAMBDA2, outdir / "e4_rate.png",
                title="E4 against quadratic growth"))
        elif key[0] == "cancellation":
            first, counter, diff = value
            written.append(render_cancellation_figure(
                first, counter, diff, outdir / "cancellation.png"))
        elif key[0] == "fund_sqrt":
            written.append(render_rate_figure(
                value, Model.SQRT, outdir / "fundamental_sqrt.png",
                title="II 1/eMinus against sqrt growth"))
        elif key[0] == "fund_log":
            written.append(render_rate_figure(
                value, Model.LOG, outdir / "fundamental_log.png",
                title="II K1,1/(r1 r2) against log growth"))
    return written
