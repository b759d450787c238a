"""Command-line front end.

Subcommands: ``compute`` (coefficient values as CSV), ``scan``/``fit``
(cutoff scans and rate fits), ``catalog`` (term table as CSV), ``report``
(the verification suite, optionally with figures), and ``oracle`` (6D Monte
Carlo cross-checks).  Output is plain CSV / UTF-8 text, byte-identical for
identical configuration.  Exit codes: 0 success, 2 usage error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import asymptotics as asy
from . import catalog
from . import coefficients as coeff
from . import report as report_mod
from .asymptotics import Model, ScanSeries
from .quadrature import ConvergenceError, CutoffConfig, mc_integrate_6d

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

COMPUTE_HEADER = "name,kappa_over_m,lambda_over_m,value,abs_err,method"
SCAN_HEADER = "lambda_over_m,value,abs_err"
ORACLE_HEADER = "name,kappa_over_m,lambda_over_m,mc_value,mc_std_err,reduced_value,z"


def _fmt(x: float) -> str:
    return repr(float(x))


class UsageError(Exception):
    pass


def _read_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"bad config line (want key=value): {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _resolve(args, config: dict[str, str], key: str, cast, default):
    """Precedence: command-line flag > config file > built-in default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return cast(config[key])
    return default


def _parse_grid(spec: str) -> list[float]:
    try:
        lo, hi, per_decade = spec.split(":")
        return asy.geometric_grid(float(lo), float(hi), int(per_decade))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad --lambda-grid {spec!r}; want lo:hi:per_decade") from exc


def _write(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kappa-over-m", type=float, default=None, dest="kappa_over_m")
    p.add_argument("--rel-tol", type=float, default=None, dest="rel_tol")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meff",
        description="Effective-mass coefficients and divergence rates of the "
                    "spin-1/2 Pauli-Fierz model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="evaluate coefficients at one cutoff pair")
    _add_common(p)
    p.add_argument("--coeff", default=None,
                   help=f"comma list from {','.join(coeff.COEFFICIENT_NAMES)}")
    p.add_argument("--lambda-over-m", type=float, default=None, dest="lambda_over_m")

    p = sub.add_parser("scan", help="evaluate one coefficient on a cutoff grid")
    _add_common(p)
    p.add_argument("--coeff", default=None, help="one coefficient name")
    p.add_argument("--lambda-grid", default=None, dest="lambda_grid",
                   help="lo:hi:per_decade")

    p = sub.add_parser("fit", help="scan plus growth-model fit")
    _add_common(p)
    p.add_argument("--coeff", default=None, help="one coefficient name")
    p.add_argument("--lambda-grid", default=None, dest="lambda_grid")
    p.add_argument("--model", default=None,
                   choices=[m.value for m in Model],
                   help="fit one model (default: rank all four)")

    p = sub.add_parser("catalog", help="dump the 38-term catalog as CSV")
    _add_common(p)

    p = sub.add_parser("report", help="run the verification suite")
    _add_common(p)
    p.add_argument("--lambda-max-1d", type=float, default=None, dest="lambda_max_1d")
    p.add_argument("--lambda-max-2d", type=float, default=None, dest="lambda_max_2d")
    p.add_argument("--mc-samples", type=int, default=None, dest="mc_samples")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering even when --out is a directory")

    p = sub.add_parser("oracle", help="6D Monte Carlo cross-checks")
    _add_common(p)
    p.add_argument("--lambda-over-m", type=float, default=None, dest="lambda_over_m")
    p.add_argument("--mc-samples", type=int, default=None, dest="mc_samples")
    p.add_argument("--seed", type=int, required=True)

    return parser


def _cfg_from(args, config, default_lambda: float) -> CutoffConfig:
    kappa = _resolve(args, config, "kappa_over_m", float, 1.0)
    lam = _resolve(args, config, "lambda_over_m", float, default_lambda)
    return CutoffConfig(kappa, lam)


def cmd_compute(args, config) -> int:
    cfg = _cfg_from(args, config, 1.0e4)
    rel_tol = _resolve(args, config, "rel_tol", float, 1.0e-8)
    names_raw = _resolve(args, config, "coeff", str, None)
    if not names_raw:
        raise UsageError("compute needs --coeff")
    names = [n.strip() for n in names_raw.split(",") if n.strip()]
    unknown = [n for n in names if n not in coeff.COEFFICIENT_NAMES]
    if unknown:
        raise UsageError(f"unknown coefficient(s) {unknown}; "
                         f"choose from {coeff.COEFFICIENT_NAMES}")
    lines = [COMPUTE_HEADER]
    failures = []
    for name in names:
        try:
            rep = coeff.evaluate(name, cfg, rel_tol)
            res = rep.result
            method = rep.method
        except ConvergenceError as exc:
            res = exc.result
            method = "quadrature-2d(non-converged)"
            failures.append(name)
        lines.append(f"{name},{_fmt(cfg.kappa_over_m)},{_fmt(cfg.lambda_over_m)},"
                     f"{_fmt(res.value)},{_fmt(res.abs_err)},{method}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_NUMERICAL if failures else EXIT_OK


def _scan_series(args, config) -> tuple[ScanSeries, str]:
    name = _resolve(args, config, "coeff", str, None)
    if not name or name not in coeff.COEFFICIENT_NAMES:
        raise UsageError(f"need --coeff, one of {coeff.COEFFICIENT_NAMES}")
    grid_spec = _resolve(args, config, "lambda_grid", str, None)
    if not grid_spec:
        raise UsageError("need --lambda-grid lo:hi:per_decade")
    kappa = _resolve(args, config, "kappa_over_m", float, 1.0)
    rel_tol = _resolve(args, config, "rel_tol", float, 1.0e-8)
    grid = _parse_grid(grid_spec)
    base = CutoffConfig(kappa, max(grid))
    return asy.scan(name, base, grid, rel_tol), name


def _scan_csv(series: ScanSeries) -> list[str]:
    lines = [SCAN_HEADER]
    for p in series.points:
        lines.append(f"{_fmt(p.lambda_over_m)},{_fmt(p.value)},{_fmt(p.abs_err)}")
    return lines


def cmd_scan(args, config) -> int:
    series, _ = _scan_series(args, config)
    _write("\n".join(_scan_csv(series)) + "\n", args.out)
    return EXIT_OK if all(p.ok for p in series.points) else EXIT_NUMERICAL


def cmd_fit(args, config) -> int:
    series, _ = _scan_series(args, config)
    model = _resolve(args, config, "model", str, None)
    if model is not None:
        fits = [asy.fit_rate(series, Model(model))]
    else:
        fits = asy.model_select(series)
    lines = _scan_csv(series)
    for f in fits:
        lines.append(f"# fit: model={f.model.value} coefficient={_fmt(f.coefficient)} "
                     f"residual={_fmt(f.residual)} plateau_lo={_fmt(f.plateau[0])} "
                     f"plateau_hi={_fmt(f.plateau[1])}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(p.ok for p in series.points) else EXIT_NUMERICAL


def cmd_catalog(args, config) -> int:
    lines = [catalog.CSV_HEADER] + catalog.csv_rows()
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_report(args, config) -> int:
    ctx = report_mod.ReportContext(
        kappa_over_m=_resolve(args, config, "kappa_over_m", float, 1.0),
        lambda_max_1d=_resolve(args, config, "lambda_max_1d", float, 1.0e6),
        lambda_max_2d=_resolve(args, config, "lambda_max_2d", float, 1.0e4),
        rel_tol=_resolve(args, config, "rel_tol", float, 1.0e-8),
        mc_samples=_resolve(args, config, "mc_samples", int, 1_000_000),
        seed=_resolve(args, config, "seed", int, 20240),
    )
    results = report_mod.run_all(ctx)
    text = report_mod.format_report(ctx, results)
    sys.stdout.write(text)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.txt").write_text(text)
        for key, value in list(ctx._cache.items()):
            if key[0] == "scan":
                path = outdir / f"scan_{key[1]}.csv"
                path.write_text("\n".join(_scan_csv(value)) + "\n")
            elif key[0] == "cancellation":
                for series in value:
                    path = outdir / f"scan_{series.coefficient_name}.csv"
                    path.write_text("\n".join(_scan_csv(series)) + "\n")
        if not args.no_figures:
            from . import figures
            figures.render_report_figures(ctx, outdir)
    return EXIT_OK if all(r.passed for r in results) else 1


def cmd_oracle(args, config) -> int:
    cfg = _cfg_from(args, config, 10.0)
    rel_tol = _resolve(args, config, "rel_tol", float, 1.0e-8)
    n = _resolve(args, config, "mc_samples", int, 1_000_000)
    seed = args.seed
    rows = [ORACLE_HEADER]
    checks = (
        ("E0", coeff.e0_raw_integrand,
         lambda: coeff.E0_coeff(cfg, rel_tol).value),
        ("E3_sigma_term", coeff.e3_sigma_integrand, lambda: 0.0),
        ("E4", coeff.e4_raw_integrand,
         lambda: coeff.E4_coeff(cfg, rel_tol).value),
    )
    for i, (name, integrand, reduced_fn) in enumerate(checks):
        mc = mc_integrate_6d(integrand, cfg, n, seed + i)
        reduced = reduced_fn()
        z = (mc.value - reduced) / mc.abs_err if mc.abs_err > 0 else 0.0
        rows.append(f"{name},{_fmt(cfg.kappa_over_m)},{_fmt(cfg.lambda_over_m)},"
                    f"{_fmt(mc.value)},{_fmt(mc.abs_err)},{_fmt(reduced)},{_fmt(z)}")
    _write("\n".join(rows) + "\n", args.out)
    return EXIT_OK


_COMMANDS = {
    "compute": cmd_compute,
    "scan": cmd_scan,
    "fit": cmd_fit,
    "catalog": cmd_catalog,
    "report": cmd_report,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _read_config(getattr(args, "config", None))
        return _COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"numerical failure: {exc} (best estimate "
              f"{exc.result.value!r} +- {exc.result.abs_err!r})", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
