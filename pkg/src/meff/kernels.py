"""Angular kernels of the two-photon energy denominators.

Integrating the photon-pair denominator ``E(k1,k2) = R + r1*r2*cos(theta)``
over the relative angle reduces every cutoff integral in this package to the
radial ``(r1, r2)`` plane.  The surviving one-dimensional angular integrals

    K1p   = int_0^pi          r1*r2*sin(t) / (R + r1*r2*cos(t))**p  dt
    Kh1p  = int_0^pi  cos(t) * r1*r2*sin(t) / (R + r1*r2*cos(t))**p  dt
    K2p   = int_0^pi  (1 - cos(t)**2)        * ...                   dt
    Kh23  = int_0^pi  (1 - cos(t)**2)*cos(t) * ...                   dt

all have closed forms in

    R     = (r1**2 + r2**2)/2 + r1 + r2
    E+-   = R +- r1*r2  (= (r1 +- r2)**2/2 + r1 + r2)
    zeta  = r1*r2/R     (always in (0, 1))

plus alternating-free Taylor series in ``zeta``.  The closed forms subtract
nearly equal terms as ``zeta -> 0`` (they lose roughly ``zeta**-2 * eps``
relative accuracy), so the hybrid evaluator switches to the series below
``ZETA_SWITCH``.  A graded-panel Gauss-Legendre quadrature of the defining
angular integrals serves as an independent oracle for tests.

All evaluators accept scalars or numpy arrays in ``r1``/``r2`` (broadcast),
are pure, and are safe to call concurrently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Family",
    "RadialPoint",
    "EnergyDenoms",
    "KernelRequest",
    "UnsupportedKernelError",
    "SUPPORTED_CASES",
    "ZETA_SWITCH",
    "SERIES_TERMS",
    "calE",
    "energy_denoms",
    "kernel_closed",
    "kernel_series",
    "kernel_series_bound",
    "kernel_eval",
    "angular_oracle",
    "eval_closed",
    "eval_series",
    "eval_kernel",
    "atanh_tail",
    "k11_deficit",
]

# Below this zeta the closed forms have lost more than ~4 digits to
# cancellation while the 60-term series tail is < zeta**120; the two branches
# overlap safely on [ZETA_SWITCH/2, 2*ZETA_SWITCH].
ZETA_SWITCH = 0.05
SERIES_TERMS = 60


class Family(str, enum.Enum):
    """Kernel family, named by the angular weight in the defining integral."""

    K1 = "K1"        # weight 1
    K2 = "K2"        # weight (1 - cos^2)
    KHAT1 = "Khat1"  # weight cos
    KHAT2 = "Khat2"  # weight (1 - cos^2) cos


#: The (family, power) pairs with a printed closed form.
SUPPORTED_CASES = frozenset(
    {
        (Family.K1, 1),
        (Family.K1, 2),
        (Family.K1, 3),
        (Family.K2, 1),
        (Family.K2, 2),
        (Family.K2, 3),
        (Family.KHAT1, 1),
        (Family.KHAT1, 2),
        (Family.KHAT2, 3),
    }
)


class UnsupportedKernelError(ValueError):
    """Raised for a (family, power) pair without a printed closed form."""


@dataclass(frozen=True)
class RadialPoint:
    """Radial photon momenta in units of the bare mass."""

    r1: float
    r2: float

    def __post_init__(self) -> None:
        if not (self.r1 > 0.0 and self.r2 > 0.0):
            raise ValueError(f"radial momenta must be positive, got {self!r}")


@dataclass(frozen=True)
class EnergyDenoms:
    """Energy denominators attached to one radial point.

    ``eMinus`` is computed as ``(r1-r2)**2/2 + r1 + r2`` so that it never
    cancels; it is bounded below by ``r1 + r2``.
    """

    calE1: float
    calE2: float
    calR: float
    ePlus: float
    eMinus: float
    zeta: float


@dataclass(frozen=True)
class KernelRequest:
    """Selects one angular kernel at one radial point."""

    family: Family
    p: int
    point: RadialPoint

    def __post_init__(self) -> None:
        if (self.family, self.p) not in SUPPORTED_CASES:
            raise UnsupportedKernelError(
                f"no closed form for ({self.family.value}, p={self.p})"
            )


def calE(r):
    """Single-photon denominator ``r**2/2 + r`` (dispersion omega(k)=|k|)."""
    r = np.asarray(r, dtype=float)
    return 0.5 * r * r + r


def energy_denoms(point: RadialPoint) -> EnergyDenoms:
    """All scalar denominators for one radial point."""
    r1, r2 = point.r1, point.r2
    e1 = float(calE(r1))
    e2 = float(calE(r2))
    big_r = e1 + e2
    q = r1 * r2
    e_minus = 0.5 * (r1 - r2) ** 2 + r1 + r2
    return EnergyDenoms(
        calE1=e1,
        calE2=e2,
        calR=big_r,
        ePlus=big_r + q,
        eMinus=e_minus,
        zeta=q / big_r,
    )


def _split(r1, r2):
    """Broadcast inputs and return (R, zeta)."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    big_r = calE(r1) + calE(r2)
    zeta = r1 * r2 / big_r
    return big_r, zeta


def atanh_tail(z):
    """``log((1+z)/(1-z)) - 2z`` without cancellation (= K1,1 - 2*zeta)."""
    return _log_ratio_tail(np.asarray(z, dtype=float), order=1)


def _log_ratio_tail(z, order: int):
    """Tail of ``log((1+z)/(1-z))`` after ``order`` leading odd terms.

    order=1 drops ``2z``; order=2 drops ``2z + (2/3) z**3``.  Below 0.25 the
    tail is summed termwise (60 terms leave a < z**120 remainder, exact to
    roundoff); above, the subtraction from ``log1p`` loses < 2 digits.
    """
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 0.25
    z_safe = np.where(small, z, 0.0)
    z2 = z_safe * z_safe
    acc = np.zeros_like(z_safe)
    power = z_safe ** (2 * order + 1)
    for m in range(order, SERIES_TERMS):
        acc = acc + (2.0 / (2 * m + 1)) * power
        power = power * z2
    closed = np.log1p(2.0 * z / (1.0 - z)) - 2.0 * z
    if order == 2:
        closed = closed - (2.0 / 3.0) * z**3
    out = np.where(small, acc, closed)
    return out if out.shape else float(out)


def eval_closed(family: Family, p: int, r1, r2):
    """Closed-form kernel value, vectorized over ``r1``/``r2``.

    The expressions are the printed ones rewritten in ``(R, zeta)``; e.g.
    ``K2,1 = (1/(r1*r2)**2) * (2*R*r1*r2 - E+*E-*log(E+/E-))`` equals
    ``L - (L - 2*zeta)/zeta**2`` with ``L = log(E+/E-)``.  The rewriting is
    exact algebra: the nearly-cancelling brackets all reduce to tails of
    ``log((1+z)/(1-z))``, which :func:`_log_ratio_tail` evaluates without
    cancellation, so the printed values are reproduced to ~1e-13 relative on
    the whole domain (a naive transcription loses all accuracy as zeta -> 0).
    """
    if (family, p) not in SUPPORTED_CASES:
        raise UnsupportedKernelError(f"no closed form for ({family}, p={p})")
    big_r, z = _split(r1, r2)
    one_m = 1.0 - z * z
    log_ratio = np.log1p(2.0 * z / (1.0 - z))  # log(E+/E-), no cancellation
    if family is Family.K1:
        if p == 1:
            return log_ratio
        if p == 2:
            return 2.0 * z / (big_r * one_m)
        return 2.0 * z / (big_r * big_r * one_m * one_m)  # p == 3
    tail = _log_ratio_tail(z, order=1)  # log(E+/E-) - 2 zeta
    if family is Family.K2:
        if p == 1:
            return log_ratio - tail / (z * z)
        if p == 2:
            return 2.0 * tail / (big_r * z * z)
        return (2.0 * z**3 / one_m - tail) / (big_r * big_r * z * z)  # p == 3
    if family is Family.KHAT1:
        if p == 1:
            return -tail / z
        return (tail - 2.0 * z**3 / one_m) / (big_r * z)  # p == 2
    # KHAT2, p == 3: 3L - 6z - 2z^3/(1-z^2) = 3*(L - 2z - 2z^3/3) - 2z^5/(1-z^2)
    tail2 = _log_ratio_tail(z, order=2)
    return (3.0 * tail2 - 2.0 * z**5 / one_m) / (big_r * big_r * z**3)


# Series data: (family, p) -> (prefactor(R, zeta), coefficient(m)) such that
# kernel = prefactor * sum_{m=0}^{n_max-1} coefficient(m) * zeta**(2m).
# Each printed series is single-signed; the K2,1 series is the printed one
# with the (1 - zeta**-2) tail regrouped term by term:
#   4/3 z + 2/3 z^3 + sum_{n>=2} (1-z^-2) 2/(2n+1) z^(2n+1)
#   = sum_{m>=0} 4/((2m+1)(2m+3)) z^(2m+1).
def _series_terms(family: Family, p: int, m: np.ndarray) -> np.ndarray:
    if family is Family.K1:
        if p == 1:
            return 2.0 / (2 * m + 1)
        if p == 2:
            return np.ones_like(m, dtype=float)
        return 2.0 * m + 2.0
    if family is Family.K2:
        if p == 1:
            return 4.0 / ((2 * m + 1) * (2 * m + 3))
        if p == 2:
            return 1.0 / (2 * m + 3)
        return (2.0 * m + 2.0) / (2 * m + 3)
    if family is Family.KHAT1:
        if p == 1:
            return 2.0 / (2 * m + 3)
        return (2.0 * m + 2.0) / (2 * m + 3)
    return (2.0 * m + 2.0) / (2 * m + 5)  # KHAT2, 3


def _series_prefactor(family: Family, p: int, big_r, z):
    if family is Family.K1:
        return z if p == 1 else (2.0 * z / big_r if p == 2 else z / big_r**2)
    if family is Family.K2:
        return z if p == 1 else (4.0 * z / big_r if p == 2 else 2.0 * z / big_r**2)
    if family is Family.KHAT1:
        return -z * z if p == 1 else -2.0 * z * z / big_r
    return -2.0 * z * z / big_r**2  # KHAT2, 3


def eval_series(family: Family, p: int, r1, r2, n_max: int = SERIES_TERMS):
    """Partial sum of the zeta-Taylor series, vectorized.

    ``n_max`` counts retained terms of the printed series.  The truncation
    error is bounded by the first omitted term times ``1/(1 - zeta**2)**2``
    (every family satisfies c_{n+j} <= c_n * (j+1), so the tail is dominated
    by a differentiated geometric series; the squared factor covers the
    linearly growing coefficients of the p=3 power kernel).
    """
    if (family, p) not in SUPPORTED_CASES:
        raise UnsupportedKernelError(f"no closed form for ({family}, p={p})")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    big_r, z = _split(r1, r2)
    if np.any(z >= 1.0):
        raise ValueError("zeta >= 1: series out of its disc of convergence")
    m = np.arange(n_max)
    coef = _series_terms(family, p, m)
    z2 = z * z
    acc = np.zeros_like(z2)
    power = np.ones_like(z2)
    for c in coef:
        acc = acc + c * power
        power = power * z2
    return _series_prefactor(family, p, big_r, z) * acc


def kernel_series_bound(family: Family, p: int, r1, r2, n_max: int):
    """Upper bound on the series truncation error after ``n_max`` terms."""
    big_r, z = _split(r1, r2)
    first_omitted = _series_terms(family, p, np.asarray([n_max]))[0]
    tail = first_omitted * z ** (2 * n_max) / (1.0 - z * z) ** 2
    return np.abs(_series_prefactor(family, p, big_r, z)) * tail


def eval_kernel(family: Family, p: int, r1, r2):
    """Hybrid evaluator: series below ZETA_SWITCH, closed form above."""
    if (family, p) not in SUPPORTED_CASES:
        raise UnsupportedKernelError(f"no closed form for ({family}, p={p})")
    big_r, z = _split(r1, r2)
    out = np.where(
        z < ZETA_SWITCH,
        eval_series(family, p, r1, r2, SERIES_TERMS),
        eval_closed(family, p, r1, r2),
    )
    return out if out.shape else float(out)


def kernel_closed(req: KernelRequest) -> float:
    """Closed form at one point (see :func:`eval_closed`)."""
    return float(eval_closed(req.family, req.p, req.point.r1, req.point.r2))


def kernel_series(req: KernelRequest, n_max: int = SERIES_TERMS) -> float:
    """Series partial sum at one point (see :func:`eval_series`)."""
    return float(eval_series(req.family, req.p, req.point.r1, req.point.r2, n_max))


def kernel_eval(req: KernelRequest) -> float:
    """Hybrid closed/series evaluation at one point."""
    return float(eval_kernel(req.family, req.p, req.point.r1, req.point.r2))


_ANGULAR_WEIGHT = {
    Family.K1: lambda c: np.ones_like(c),
    Family.KHAT1: lambda c: c,
    Family.K2: lambda c: 1.0 - c * c,
    Family.KHAT2: lambda c: (1.0 - c * c) * c,
}


@lru_cache(maxsize=None)
def _gauss_nodes(n: int):
    return np.polynomial.legendre.leggauss(n)


def angular_oracle(req: KernelRequest, n_nodes: int = 256) -> float:
    """Quadrature of the defining angular integral; independent ground truth.

    Substituting ``c = cos(theta)`` gives ``int_{-1}^{1} w(c) * r1*r2 /
    (R + r1*r2*c)**p dc``.  The integrand peaks at ``c = -1`` where the
    denominator approaches ``E- = R(1-zeta)``, so the interval is split into
    panels geometric in ``1 + zeta*c`` and each panel gets a Gauss-Legendre
    rule; ``n_nodes`` is the total node budget.  Used only in tests.
    """
    if n_nodes < 16:
        raise ValueError("n_nodes must be >= 16")
    d = energy_denoms(req.point)
    z = d.zeta
    q = req.point.r1 * req.point.r2
    # Panel breakpoints, geometric in t = 1 + zeta*c over [1-z, 1+z].
    t_edges = [1.0 - z]
    while t_edges[-1] * 4.0 < 1.0 + z:
        t_edges.append(t_edges[-1] * 4.0)
    t_edges.append(1.0 + z)
    c_edges = [(t - 1.0) / z for t in t_edges]
    c_edges[0], c_edges[-1] = -1.0, 1.0
    n_panels = len(c_edges) - 1
    per_panel = max(8, n_nodes // n_panels)
    nodes, weights = _gauss_nodes(per_panel)
    weight_fn = _ANGULAR_WEIGHT[req.family]
    total = 0.0
    for lo, hi in zip(c_edges[:-1], c_edges[1:]):
        half = 0.5 * (hi - lo)
        c = 0.5 * (hi + lo) + half * nodes
        f = weight_fn(c) * q / (d.calR + q * c) ** req.p
        total += half * float(np.dot(weights, f))
    return total


def k11_deficit(r1, r2):
    """``K1,1(r1,r2) - 2*r1*r2/calE(r2)`` evaluated stably.

    The two terms agree through O((r1/r2)**3) for r1 << r2; the identity
    ``2*zeta - 2*q/E2 = -2*q*E1/(R*E2)`` (with R = E1 + E2) removes the
    leading cancellation and :func:`atanh_tail` supplies the rest.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    e1 = calE(r1)
    e2 = calE(r2)
    big_r = e1 + e2
    q = r1 * r2
    return atanh_tail(q / big_r) - 2.0 * q * e1 / (big_r * e2)
