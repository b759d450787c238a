"""Adaptive cutoff-box integration and a 6D Monte Carlo oracle.

Three engines:

* :func:`integrate_1d` -- globally adaptive Gauss-Kronrod (G7, K15) with
  interval bisection, for the radial coefficient integrals.
* :func:`integrate_2d` -- adaptive tensor G7/K15 over the radial box
  ``[kappa/m, lambda/m]**2`` or one of the ratio regions I / II1 / II2.
  Cells are x-simple sets ``{x in [a,b], lo(x) <= y <= hi(x)}`` with linear
  ``lo``/``hi`` (rectangles plus the trapezoids produced by clipping against
  the lines ``r1 = r2/lam`` and ``r1 = lam*r2``); each cell is mapped
  logarithmically in both directions before the tensor rule is applied, and
  the cell with the largest error estimate is split along its longer
  logarithmic side.
* :func:`mc_integrate_6d` -- plain Monte Carlo over two momentum shells with
  the flat-form-factor measure ``1/(4 (2 pi)^6) dk1 dk2``, radii drawn with
  density ~ r**2 (inverse CDF of the shell) and isotropic directions.

Everything is deterministic: fixed rules, fixed batch sizes, and pairwise
numpy summation, so results do not depend on scheduling.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CutoffConfig",
    "Region",
    "IntegralResult",
    "ConvergenceError",
    "integrate_1d",
    "integrate_2d",
    "mc_integrate_6d",
    "MEASURE_6D",
    "shell_volume",
]

#: Flat form-factor measure prefactor for the raw two-photon integrals.
MEASURE_6D = 1.0 / (4.0 * (2.0 * math.pi) ** 6)


@dataclass(frozen=True)
class CutoffConfig:
    """Dimensionless infrared/ultraviolet cutoffs and the region split ratio.

    ``kappa_over_m == lambda_over_m`` is allowed and makes every cutoff
    integral empty (identically zero); several coefficient contracts rely on
    that degenerate case.
    """

    kappa_over_m: float = 1.0
    lambda_over_m: float = 1.0e4
    lam_split: float = 3.0

    def __post_init__(self) -> None:
        if not (0.0 < self.kappa_over_m <= self.lambda_over_m):
            raise ValueError(
                "cutoffs must satisfy 0 < kappa/m <= lambda/m, got "
                f"{self.kappa_over_m} and {self.lambda_over_m}"
            )
        if self.lam_split < 3.0:
            raise ValueError(f"lam_split must be >= 3, got {self.lam_split}")

    @property
    def empty(self) -> bool:
        return self.kappa_over_m == self.lambda_over_m


class Region(str, enum.Enum):
    """Partition of the radial box by the ratio r1/r2 against lam_split."""

    FULL = "full"
    I = "I"      # 1/lam < r1/r2 < lam
    II1 = "II1"  # r1/r2 <= 1/lam   (r1 soft)
    II2 = "II2"  # r1/r2 >= lam     (r2 soft)


@dataclass(frozen=True)
class IntegralResult:
    """Value, error estimate, and evaluation count of one integration."""

    value: float
    abs_err: float
    n_eval: int

    def scaled(self, c: float) -> "IntegralResult":
        return IntegralResult(c * self.value, abs(c) * self.abs_err, self.n_eval)


class ConvergenceError(RuntimeError):
    """Adaptive refinement hit its subdivision cap; carries the best estimate."""

    def __init__(self, message: str, result: IntegralResult):
        super().__init__(message)
        self.result = result


# 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
_XGK_HALF = (
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
)
_WGK_HALF = (
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
)
_WG_HALF = (0.129484966168870, 0.279705391489277, 0.381830050505119,
            0.417959183673469)


def _build_rule():
    nodes = np.concatenate([[-x for x in _XGK_HALF[:-1]], [0.0],
                            list(reversed(_XGK_HALF[:-1]))])
    wk = np.concatenate([_WGK_HALF[:-1], [_WGK_HALF[-1]],
                         list(reversed(_WGK_HALF[:-1]))])
    wg = np.zeros(15)
    # Gauss nodes sit at the odd Kronrod positions 1,3,...,13.
    half = list(_WG_HALF[:-1])
    gauss = half + [_WG_HALF[-1]] + list(reversed(half))
    wg[1:14:2] = gauss
    order = np.argsort(nodes)
    return nodes[order], wk[order], wg[order]


_NODES, _WK, _WG = _build_rule()


def _wrap_callable(f, n_args: int):
    """Adapt ``f`` to vectorized evaluation, counting calls.

    Tries array input first; falls back to per-point evaluation for scalar
    callables.  Returns (eval_fn, counter_dict).
    """
    state = {"n": 0, "vector": None}

    def call(*arrays):
        arrays = [np.asarray(a, dtype=float) for a in arrays]
        state["n"] += arrays[0].size
        if state["vector"] is not False:
            try:
                y = np.asarray(f(*arrays), dtype=float)
                if y.shape == arrays[0].shape:
                    state["vector"] = True
                    return y
            except Exception:
                pass
            state["vector"] = False
        flat = [a.ravel() for a in arrays]
        y = np.array([float(f(*vals)) for vals in zip(*flat)])
        return y.reshape(arrays[0].shape)

    return call, state


def _check_rel_tol(rel_tol: float) -> None:
    if not (1.0e-14 <= rel_tol <= 1.0e-2):
        raise ValueError(f"rel_tol must lie in [1e-14, 1e-2], got {rel_tol}")


def _gk_panel(call, a: float, b: float):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * _NODES
    y = call(x)
    vk = half * float(np.dot(_WK, y))
    vg = half * float(np.dot(_WG, y))
    resabs = half * float(np.dot(_WK, np.abs(y)))
    err = abs(vk - vg) + 50.0 * np.finfo(float).eps * resabs
    return vk, err


def integrate_1d(f, a: float, b: float, rel_tol: float = 1.0e-10,
                 max_intervals: int = 8192) -> IntegralResult:
    """Adaptive 1D quadrature of ``f`` on ``[a, b]``.

    Bisects the interval with the largest G7/K15 discrepancy until the summed
    error estimate drops below ``max(rel_tol*|value|, 1e-14)``.  ``f`` may be
    scalar or numpy-vectorized.

    Raises
    ------
    ConvergenceError
        If the cap on subdivisions is reached; the exception carries the best
        estimate in ``.result``.
    """
    _check_rel_tol(rel_tol)
    if a > b:
        raise ValueError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return IntegralResult(0.0, 0.0, 1)
    call, state = _wrap_callable(f, 1)
    val, err = _gk_panel(call, a, b)
    heap = [(-err, 0)]
    panels = {0: (a, b, val, err)}
    next_id = 1
    while True:
        total_val = math.fsum(p[2] for p in panels.values())
        total_err = math.fsum(p[3] for p in panels.values())
        if total_err <= max(rel_tol * abs(total_val), 1.0e-14):
            return IntegralResult(total_val, total_err, state["n"])
        if len(panels) >= max_intervals:
            raise ConvergenceError(
                f"no convergence after {len(panels)} intervals",
                IntegralResult(total_val, total_err, state["n"]),
            )
        while True:
            neg_err, pid = heapq.heappop(heap)
            if pid in panels and -neg_err == panels[pid][3]:
                break
        pa, pb, _, _ = panels.pop(pid)
        mid = 0.5 * (pa + pb)
        for lo, hi in ((pa, mid), (mid, pb)):
            v, e = _gk_panel(call, lo, hi)
            panels[next_id] = (lo, hi, v, e)
            heapq.heappush(heap, (-e, next_id))
            next_id += 1


# --- 2D cells ---------------------------------------------------------------
# A cell is (ax, bx, lo0, lo1, hi0, hi1): x in [ax,bx], lo0+lo1*x <= y <= hi0+hi1*x.


def _cell_rule(call, cell):
    ax, bx, lo0, lo1, hi0, hi1 = cell
    cu = 0.5 * (math.log(ax) + math.log(bx))
    hu = 0.5 * (math.log(bx) - math.log(ax))
    x = np.exp(cu + hu * _NODES)
    jx = x * hu
    lo = lo0 + lo1 * x
    hi = hi0 + hi1 * x
    ratio = np.log(hi / lo)
    s = 0.5 * (_NODES + 1.0)
    y = lo[:, None] * np.exp(ratio[:, None] * s[None, :])
    jy = y * (0.5 * ratio[:, None])
    fx = call(np.broadcast_to(x[:, None], y.shape), y)
    g = fx * jx[:, None] * jy
    vk = float(_WK @ g @ _WK)
    vg = float(_WG @ g @ _WG)
    resabs = float(_WK @ np.abs(g) @ _WK)
    err = abs(vk - vg) + 50.0 * np.finfo(float).eps * resabs
    return vk, err


def _split_cell(cell):
    ax, bx, lo0, lo1, hi0, hi1 = cell
    xm = math.sqrt(ax * bx)
    lo_m = lo0 + lo1 * xm
    hi_m = hi0 + hi1 * xm
    x_extent = math.log(bx / ax)
    y_extent = math.log(hi_m / lo_m) if hi_m > lo_m else 0.0
    if x_extent >= y_extent:
        return (ax, xm, lo0, lo1, hi0, hi1), (xm, bx, lo0, lo1, hi0, hi1)
    if lo1 == 0.0 and hi1 == 0.0:
        ym = math.sqrt(lo0 * hi0)
        return (ax, bx, lo0, 0.0, ym, 0.0), (ax, bx, ym, 0.0, hi0, 0.0)
    m0, m1 = 0.5 * (lo0 + hi0), 0.5 * (lo1 + hi1)
    return (ax, bx, lo0, lo1, m0, m1), (ax, bx, m0, m1, hi0, hi1)


def _initial_cells(cfg: CutoffConfig, region: Region):
    k, lam_uv, lam = cfg.kappa_over_m, cfg.lambda_over_m, cfg.lam_split
    if cfg.empty:
        return []
    if region is Region.FULL:
        return [(k, lam_uv, k, 0.0, lam_uv, 0.0)]
    if region is Region.II1:
        # r2 >= lam*r1 within the box: x in [k, lam_uv/lam], y in [lam*x, lam_uv]
        if lam * k >= lam_uv:
            return []
        return [(k, lam_uv / lam, 0.0, lam, lam_uv, 0.0)]
    if region is Region.II2:
        # r1 >= lam*r2: x in [lam*k, lam_uv], y in [k, x/lam]
        if lam * k >= lam_uv:
            return []
        return [(lam * k, lam_uv, k, 0.0, 0.0, 1.0 / lam)]
    # Region I: y between max(k, x/lam) and min(lam_uv, lam*x); the max/min
    # switch at x = lam*k and x = lam_uv/lam, so build single-piece cells.
    breaks = sorted({k, min(lam * k, lam_uv), max(lam_uv / lam, k), lam_uv})
    cells = []
    for ax, bx in zip(breaks[:-1], breaks[1:]):
        if bx <= ax:
            continue
        xm = math.sqrt(ax * bx)
        lo = (k, 0.0) if k >= xm / lam else (0.0, 1.0 / lam)
        hi = (lam_uv, 0.0) if lam_uv <= lam * xm else (0.0, lam)
        cells.append((ax, bx, lo[0], lo[1], hi[0], hi[1]))
    return cells


def integrate_2d(f, cfg: CutoffConfig, region: Region = Region.FULL,
                 rel_tol: float = 1.0e-8, max_cells: int = 60000) -> IntegralResult:
    """Adaptive 2D quadrature of ``f(r1, r2)`` over a cutoff-box region.

    The FULL box equals I + II1 + II2 up to boundary lines of measure zero,
    and the returned estimates of the four region integrals are additive
    within their combined error estimates.
    """
    _check_rel_tol(rel_tol)
    cells = _initial_cells(cfg, region)
    if not cells:
        return IntegralResult(0.0, 0.0, 1)
    call, state = _wrap_callable(f, 2)
    store = {}
    heap = []
    for i, cell in enumerate(cells):
        v, e = _cell_rule(call, cell)
        store[i] = (cell, v, e)
        heapq.heappush(heap, (-e, i))
    next_id = len(cells)
    while True:
        total_val = math.fsum(v for _, v, _ in store.values())
        total_err = math.fsum(e for _, _, e in store.values())
        if total_err <= max(rel_tol * abs(total_val), 1.0e-14):
            return IntegralResult(total_val, total_err, state["n"])
        if len(store) >= max_cells:
            raise ConvergenceError(
                f"no convergence after {len(store)} cells",
                IntegralResult(total_val, total_err, state["n"]),
            )
        while True:
            neg_err, cid = heapq.heappop(heap)
            if cid in store and -neg_err == store[cid][2]:
                break
        cell, _, _ = store.pop(cid)
        for part in _split_cell(cell):
            v, e = _cell_rule(call, part)
            store[next_id] = (part, v, e)
            heapq.heappush(heap, (-e, next_id))
            next_id += 1


# --- 6D Monte Carlo ----------------------------------------------------------

_MC_BATCH = 1 << 16


def shell_volume(cfg: CutoffConfig) -> float:
    """Volume of one momentum shell kappa/m <= |k| <= lambda/m."""
    return 4.0 * math.pi / 3.0 * (cfg.lambda_over_m**3 - cfg.kappa_over_m**3)


def _draw_shell(rng, n: int, cfg: CutoffConfig):
    k3, l3 = cfg.kappa_over_m**3, cfg.lambda_over_m**3
    r = np.cbrt(k3 + rng.random(n) * (l3 - k3))
    z = 1.0 - 2.0 * rng.random(n)
    phi = 2.0 * math.pi * rng.random(n)
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([r * s * np.cos(phi), r * s * np.sin(phi), r * z])


def mc_integrate_6d(integrand, cfg: CutoffConfig, n_samples: int,
                    seed: int) -> IntegralResult:
    """Monte Carlo estimate of ``int dk integrand(k1, k2)``.

    Includes the ``1/(4 (2 pi)^6)`` measure prefactor; ``abs_err`` is one
    sample standard error.  Identical (seed, n_samples) reproduce the result
    bit for bit: the sample stream is consumed in fixed-size batches
    regardless of ``n_samples``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if cfg.empty:
        return IntegralResult(0.0, 0.0, 1)
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n_samples:
        n = min(_MC_BATCH, n_samples - done)
        k1 = _draw_shell(rng, n, cfg)
        k2 = _draw_shell(rng, n, cfg)
        y = np.asarray(integrand(k1, k2), dtype=float)
        total += float(np.sum(y))
        total_sq += float(np.sum(y * y))
        done += n
    mean = total / n_samples
    var = max(0.0, total_sq / n_samples - mean * mean)
    if n_samples > 1:
        var *= n_samples / (n_samples - 1.0)
    weight = MEASURE_6D * shell_volume(cfg) ** 2
    return IntegralResult(
        weight * mean, weight * math.sqrt(var / n_samples), n_samples
    )
