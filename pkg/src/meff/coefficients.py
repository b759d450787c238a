"""Perturbative effective-mass coefficients of the spin-1/2 model.

Second order is elementary: closed antiderivatives give the self-energy
constant ``e2``, the finite one-photon integrals ``ea``/``eb``, and the
order-e^2 slope ``c1``/``a1`` (with and without the spin term).

Fourth order keeps the three explicitly known two-photon integrals E0, E3,
E4.  Their six-dimensional momentum forms are reduced exactly to the radial
plane with the angular kernels; with ``E1 = calE(r1)``, ``E2 = calE(r2)``,
``q = r1*r2`` and the stable difference ``D = K1,1 - 2q/E2``:

    E0  = 1/(8 (2 pi)^4)  * II[ (4 r2^2/E1^2) D
                                + (q/(E1 E2)) (K1,1 + Kh1,1 - K2,1) ]
    E3  = 1/(32 (2 pi)^4) * II[ (4 r1^4 r2^2/E1^4) D
                                - (2 q^3/(E1 E2)) Kh2,3 ]
    E41 = -1/(32 (2 pi)^4) * II[ 4 r1^4 r2^2 K1,1 / E1^4 ]
    E42 = +1/(32 (2 pi)^4) * II[ 2 r1^4 r2^2 K2,1 / (E1^3 E2) ]

where ``II`` integrates ``dr1 dr2`` over the cutoff box; the prefactors are
the displayed 1/4 and 1/16 times the solid angles (4 pi)(2 pi) over the
``1/(4 (2 pi)^6)`` measure.  The spin-trace
term of E4 averages to zero over the azimuth (it is proportional to
``(k1 x k2)`` at fixed opening angle), so it appears only in the raw Monte
Carlo integrands used for cross-validation.

E4 carries the quadratic ultraviolet divergence; E3's two pieces realize the
cancellation that protects it, and :func:`cancellation_report` recomputes the
pieces separately for diagnosis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import Family, calE, eval_kernel, k11_deficit
from .quadrature import CutoffConfig, IntegralResult, Region, integrate_2d

__all__ = [
    "CoefficientReport",
    "SeriesCoefficients",
    "CancellationReport",
    "FlowPoint",
    "COEFFICIENT_NAMES",
    "e2_coeff",
    "ea_coeff",
    "eb_coeff",
    "c1_coeff",
    "a1_coeff",
    "a1_spinless",
    "a1_spin_part",
    "E0_coeff",
    "E3_coeff",
    "E4_coeff",
    "E4_split",
    "cancellation_report",
    "meff_series",
    "meff_ratio",
    "renorm_flow",
    "evaluate",
    "e2_integrand",
    "polarization_pair",
    "sigma_z_sum",
    "e0_raw_integrand",
    "e3_sigma_integrand",
    "e4_raw_integrand",
    "fundamental_inv_eminus",
    "fundamental_k11_over_q",
]

_PREF_1D = 1.0 / (2.0 * math.pi**2)   # 4 pi / (2 pi)^3
_PREF_2D = 1.0 / (32.0 * math.pi**4)  # (4 pi)(2 pi) / (4 (2 pi)^6)


@dataclass(frozen=True)
class CoefficientReport:
    """One evaluated coefficient with its provenance."""

    name: str
    cfg: CutoffConfig
    result: IntegralResult
    method: str  # closed-form | quadrature-2d | quadrature-1d | monte-carlo


@dataclass(frozen=True)
class SeriesCoefficients:
    """Expansion data for m_eff/m = 1 + a1 e^2 + a2 e^4 + O(e^6).

    ``c2_dominant`` keeps only the explicitly known fourth-order integrals
    (E0 + E3 + 2*E4; the doubling is the real-part pairing of the single
    off-diagonal entry).  By construction a1 = (2/3) c1 and
    a2_dominant = (2/3) c2_dominant + (2/3)^2 c1^2.
    """

    a1: float
    a2_dominant: float
    c1: float
    c2_dominant: float
    e2: float


@dataclass(frozen=True)
class CancellationReport:
    """Pieces of E3's quadratically divergent pair, for diagnosis.

    ``first_term`` is the K1,1 part of E3 alone; ``counter_term`` is the
    factorized subtraction exactly as it appears in E3 (equal to
    ``e2_coeff * eb_coeff / 2`` under this package's normalizations);
    ``difference`` integrates their stable pointwise difference.  The first
    two grow like (lambda/m)^2 with opposite signs; the difference does not.
    """

    cfg: CutoffConfig
    first_term: IntegralResult
    counter_term: IntegralResult
    difference: IntegralResult

    @property
    def lambda_sq(self) -> float:
        return self.cfg.lambda_over_m**2

    def ratios(self) -> tuple[float, float, float]:
        """(first, counter, difference) each divided by (lambda/m)^2."""
        s = self.lambda_sq
        return (self.first_term.value / s, self.counter_term.value / s,
                self.difference.value / s)


@dataclass(frozen=True)
class FlowPoint:
    """One step of the mass-renormalization flow."""

    lam: float
    mass: float
    m_eff: float


# --- second order: closed antiderivatives -------------------------------------


def e2_integrand(r):
    """Radial integrand of the self-energy constant: r^2/(r+2)."""
    r = np.asarray(r, dtype=float)
    return r * r / (r + 2.0)


def _e2_antideriv(r: float) -> float:
    return 0.5 * r * r - 2.0 * r + 4.0 * math.log(r + 2.0)


def e2_coeff(cfg: CutoffConfig) -> float:
    """Self-energy constant -(1/(8 pi^2)) int r^2/(r+2) dr; always <= 0."""
    lo, hi = cfg.kappa_over_m, cfg.lambda_over_m
    return -(_e2_antideriv(hi) - _e2_antideriv(lo)) / (8.0 * math.pi**2)


def _ea_antideriv(r: float) -> float:
    # int dr / (r (r+2)^2) = (1/4) log(r/(r+2)) + 1/(2 (r+2))
    return 0.25 * math.log(r / (r + 2.0)) + 0.5 / (r + 2.0)


def ea_coeff(cfg: CutoffConfig) -> float:
    """One-photon integral (1/(2 pi^2)) int r/calE(r)^2 dr; finite as UV -> oo.

    The single-photon reduction gives the radial density
    ``r/calE^2 = 4/(r (r+2)^2)``.
    """
    lo, hi = cfg.kappa_over_m, cfg.lambda_over_m
    return 2.0 / math.pi**2 * (_ea_antideriv(hi) - _ea_antideriv(lo))


def _eb_antideriv(r: float) -> float:
    # int r/(r+2)^4 dr with u = r+2
    u = r + 2.0
    return -0.5 / (u * u) + 2.0 / (3.0 * u**3)


def eb_coeff(cfg: CutoffConfig) -> float:
    """One-photon integral (1/(2 pi^2)) int r^5/calE(r)^4 dr; finite as UV -> oo.

    The reduction gives ``r^5/calE^4 = 16 r/(r+2)^4``.
    """
    lo, hi = cfg.kappa_over_m, cfg.lambda_over_m
    return 8.0 / math.pi**2 * (_eb_antideriv(hi) - _eb_antideriv(lo))


def _rad_a_antideriv(r: float) -> float:
    # int r/calE dr = int dr/(r/2 + 1)
    return 2.0 * math.log(0.5 * r + 1.0)


def _rad_b_antideriv(r: float) -> float:
    # int r^5/calE^3 dr = int r^2/(r/2+1)^3 dr with u = r/2 + 1
    u = 0.5 * r + 1.0
    return 8.0 * (math.log(u) + 2.0 / u - 0.5 / (u * u))


def c1_coeff(cfg: CutoffConfig) -> float:
    """Order-e^2 slope of m/m_eff: (1/(2 pi^2)) [int r/calE + (1/4) int r^5/calE^3]."""
    lo, hi = cfg.kappa_over_m, cfg.lambda_over_m
    part_a = _rad_a_antideriv(hi) - _rad_a_antideriv(lo)
    part_b = _rad_b_antideriv(hi) - _rad_b_antideriv(lo)
    return _PREF_1D * (part_a + 0.25 * part_b)


def a1_coeff(cfg: CutoffConfig) -> float:
    """First effective-mass coefficient a1 = (2/3) c1; grows like log(UV)."""
    return (2.0 / 3.0) * c1_coeff(cfg)


def a1_spinless(cfg: CutoffConfig) -> float:
    """a1 without the magnetic-moment term (drops the r^5/calE^3 integral)."""
    lo, hi = cfg.kappa_over_m, cfg.lambda_over_m
    return (2.0 / 3.0) * _PREF_1D * (_rad_a_antideriv(hi) - _rad_a_antideriv(lo))


def a1_spin_part(cfg: CutoffConfig) -> float:
    """The spin enhancement a1 - a1_spinless = (1/(12 pi^2)) int r^5/calE^3 dr."""
    lo, hi = cfg.kappa_over_m, cfg.lambda_over_m
    return (_rad_b_antideriv(hi) - _rad_b_antideriv(lo)) / (12.0 * math.pi**2)


#: Asymptotic slope of a1 against log(lambda/m).
A1_LOG_SLOPE = 4.0 / (3.0 * math.pi**2)


# --- fourth order: reduced two-photon integrands -------------------------------


def _e0_radial(r1, r2):
    e1 = calE(r1)
    e2 = calE(r2)
    q = r1 * r2
    k11 = eval_kernel(Family.K1, 1, r1, r2)
    kh11 = eval_kernel(Family.KHAT1, 1, r1, r2)
    k21 = eval_kernel(Family.K2, 1, r1, r2)
    return (4.0 * r2 * r2 / (e1 * e1) * k11_deficit(r1, r2)
            + q / (e1 * e2) * (k11 + kh11 - k21))


def _e3_radial(r1, r2):
    e1 = calE(r1)
    e2 = calE(r2)
    q = r1 * r2
    kh23 = eval_kernel(Family.KHAT2, 3, r1, r2)
    return (4.0 * r1**4 * r2**2 / e1**4 * k11_deficit(r1, r2)
            - 2.0 * q**3 / (e1 * e2) * kh23)


def _e3_first_radial(r1, r2):
    e1 = calE(r1)
    return 4.0 * r1**4 * r2**2 / e1**4 * eval_kernel(Family.K1, 1, r1, r2)


def _e3_difference_radial(r1, r2):
    e1 = calE(r1)
    return 4.0 * r1**4 * r2**2 / e1**4 * k11_deficit(r1, r2)


def _e41_radial(r1, r2):
    return -_e3_first_radial(r1, r2)


def _e42_radial(r1, r2):
    e1 = calE(r1)
    e2 = calE(r2)
    return 2.0 * r1**4 * r2**2 / (e1**3 * e2) * eval_kernel(Family.K2, 1, r1, r2)


def _e4_radial(r1, r2):
    return _e41_radial(r1, r2) + _e42_radial(r1, r2)


def E0_coeff(cfg: CutoffConfig, rel_tol: float = 1.0e-8,
             region: Region = Region.FULL) -> IntegralResult:
    """Fourth-order constant E0 (two A vertices, two spin vertices)."""
    if cfg.empty:
        return IntegralResult(0.0, 0.0, 1)
    return integrate_2d(_e0_radial, cfg, region, rel_tol).scaled(0.25 * _PREF_2D)


def E3_coeff(cfg: CutoffConfig, rel_tol: float = 1.0e-8,
             region: Region = Region.FULL) -> IntegralResult:
    """Fourth-order constant E3, with its subtraction kept inside the integrand.

    Keeping the factorized counter-piece pointwise inside ``D`` realizes the
    quadratic-divergence cancellation before any large numbers form.
    """
    if cfg.empty:
        return IntegralResult(0.0, 0.0, 1)
    return integrate_2d(_e3_radial, cfg, region, rel_tol).scaled(_PREF_2D / 16.0)


def E4_coeff(cfg: CutoffConfig, rel_tol: float = 1.0e-8,
             region: Region = Region.FULL) -> IntegralResult:
    """Fourth-order constant E4; negative and ~ -(lambda/m)^2 for large cutoff."""
    if cfg.empty:
        return IntegralResult(0.0, 0.0, 1)
    return integrate_2d(_e4_radial, cfg, region, rel_tol).scaled(_PREF_2D / 16.0)


def E4_split(cfg: CutoffConfig, rel_tol: float = 1.0e-8,
             region: Region = Region.FULL) -> tuple[IntegralResult, IntegralResult]:
    """(E41, E42): E41 carries the -(lambda/m)^2 part, E42 is log^2-bounded."""
    if cfg.empty:
        zero = IntegralResult(0.0, 0.0, 1)
        return zero, zero
    e41 = integrate_2d(_e41_radial, cfg, region, rel_tol).scaled(_PREF_2D / 16.0)
    e42 = integrate_2d(_e42_radial, cfg, region, rel_tol).scaled(_PREF_2D / 16.0)
    return e41, e42


def cancellation_report(cfg: CutoffConfig, rel_tol: float = 1.0e-8) -> CancellationReport:
    """Separate the quadratically divergent pair inside E3.

    The counter term factorizes into radial integrals and is computed from
    the closed forms: ``-(1/(32 pi^4)) * I2 * Ib = e2_coeff * eb_coeff / 2``.
    """
    if cfg.empty:
        zero = IntegralResult(0.0, 0.0, 1)
        return CancellationReport(cfg, zero, zero, zero)
    first = integrate_2d(_e3_first_radial, cfg, Region.FULL, rel_tol)
    first = first.scaled(_PREF_2D / 16.0)
    counter_val = 0.5 * e2_coeff(cfg) * eb_coeff(cfg)
    counter = IntegralResult(counter_val, 1e-14 * abs(counter_val), 2)
    diff = integrate_2d(_e3_difference_radial, cfg, Region.FULL, rel_tol)
    diff = diff.scaled(_PREF_2D / 16.0)
    return CancellationReport(cfg, first, counter, diff)


# --- assembly ------------------------------------------------------------------


def meff_series(cfg: CutoffConfig, rel_tol: float = 1.0e-8) -> SeriesCoefficients:
    """Assemble the dominant-term truncation of the e^2 and e^4 coefficients."""
    c1 = c1_coeff(cfg)
    c2_dom = (E0_coeff(cfg, rel_tol).value + E3_coeff(cfg, rel_tol).value
              + 2.0 * E4_coeff(cfg, rel_tol).value)
    a1 = (2.0 / 3.0) * c1
    a2 = (2.0 / 3.0) * c2_dom + (2.0 / 3.0) ** 2 * c1 * c1
    return SeriesCoefficients(a1=a1, a2_dominant=a2, c1=c1, c2_dominant=c2_dom,
                              e2=e2_coeff(cfg))


def meff_ratio(e: float, cfg: CutoffConfig, rel_tol: float = 1.0e-8) -> float:
    """m_eff/m truncated at the dominant fourth-order terms.

    ``1 + a1 e^2 + a2_dominant e^4``; exact only at e = 0, >= 1 for small e.
    """
    if e == 0.0:
        return 1.0
    s = meff_series(cfg, rel_tol)
    return 1.0 + s.a1 * e * e + s.a2_dominant * e**4


def renorm_flow(e: float, beta: float, b: float, lambdas, kappa0: float = 1.0,
                rel_tol: float = 1.0e-8, lam_split: float = 3.0) -> list[FlowPoint]:
    """Scan the cutoff-removal scheme m = (b*lam)**beta, kappa = kappa0*lam**beta.

    Reports (lam, m, m_eff) per cutoff; makes no convergence claim.  Note
    kappa/m stays fixed along the scan while lambda/m grows like
    lam**(1-beta), so the quartic term eventually dominates for any e != 0.
    """
    if beta >= 0.0:
        raise ValueError("beta must be negative")
    if b <= 0.0:
        raise ValueError("b must be positive")
    lams = [float(x) for x in lambdas]
    if any(x2 <= x1 for x1, x2 in zip(lams, lams[1:])):
        raise ValueError("lambdas must be strictly increasing")
    out = []
    for lam in lams:
        m = (b * lam) ** beta
        kappa = kappa0 * lam**beta
        cfg = CutoffConfig(kappa / m, lam / m, lam_split)
        out.append(FlowPoint(lam=lam, mass=m, m_eff=m * meff_ratio(e, cfg, rel_tol)))
    return out


# --- raw 6D integrands (Monte Carlo cross-validation) ---------------------------


def polarization_pair(k):
    """Two transverse unit vectors completing k/|k| to a right-handed frame.

    Vectorized over rows of ``k``; any smooth-away-from-axis choice works
    because every use below sums over both polarizations.
    """
    k = np.asarray(k, dtype=float)
    r = np.linalg.norm(k, axis=-1, keepdims=True)
    khat = k / r
    ref = np.where(np.abs(khat[..., 2:3]) < 0.9,
                   np.broadcast_to([0.0, 0.0, 1.0], khat.shape),
                   np.broadcast_to([1.0, 0.0, 0.0], khat.shape))
    e1 = np.cross(khat, ref)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(khat, e1)
    return e1, e2


def sigma_z_sum(k1, k2):
    """Spin-trace combination sum_{l1,l2} [(k1 x e1) x (k2 x e2)]_z  ((k1 x e1).(k2 x e2)).

    Built from explicit polarization bases; antisymmetric under k1 <-> k2 and
    even under reflection of either momentum.
    """
    u = [np.cross(k1, e) for e in polarization_pair(k1)]
    v = [np.cross(k2, e) for e in polarization_pair(k2)]
    total = np.zeros(np.asarray(k1).shape[:-1])
    for uu in u:
        for vv in v:
            total = total + np.cross(uu, vv)[..., 2] * np.sum(uu * vv, axis=-1)
    return total


def _norms(k1, k2):
    r1 = np.linalg.norm(k1, axis=-1)
    r2 = np.linalg.norm(k2, axis=-1)
    e1 = 0.5 * r1 * r1 + r1
    e2 = 0.5 * r2 * r2 + r2
    ksum = k1 + k2
    e12 = 0.5 * np.sum(ksum * ksum, axis=-1) + r1 + r2
    dot = np.sum(k1 * k2, axis=-1)
    return r1, r2, e1, e2, e12, dot


def e0_raw_integrand(k1, k2):
    """Raw momentum-space integrand whose measure integral is E0."""
    r1, r2, e1, e2, e12, dot = _norms(k1, k2)
    chat = dot / (r1 * r2)
    return 0.25 / (r1 * r2) * (
        4.0 * r2**2 / (e1 * e1 * e12)
        - 4.0 * r2**2 / (e1 * e1 * e2)
        + dot * (1.0 + chat) / (e1 * e2 * e12)
    )


def e3_sigma_integrand(k1, k2):
    """The antisymmetric spin-trace term dropped from E3 (integrates to zero)."""
    r1, r2, e1, e2, e12, dot = _norms(k1, k2)
    return (1.0 / 16.0) / (r1 * r2) * sigma_z_sum(k1, k2) * dot / (e1 * e2 * e12**3)


def e4_raw_integrand(k1, k2):
    """Raw momentum-space integrand whose measure integral is E4."""
    r1, r2, e1, e2, e12, dot = _norms(k1, k2)
    chat = dot / (r1 * r2)
    poly = -2.0 * r1**2 * r2**2 * (1.0 - chat * chat) + sigma_z_sum(k1, k2)
    return -(1.0 / 16.0) / (r1 * r2) * (
        4.0 * r1**4 * r2**2 / (e1**4 * e12)
        + poly * r1**2 / (e1**3 * e2 * e12)
    )


# --- fundamental box integrals (rate benchmarks) --------------------------------


def fundamental_inv_eminus(cfg: CutoffConfig, rel_tol: float = 1.0e-7) -> IntegralResult:
    """II 1/eMinus over the box; grows like sqrt(lambda/m)."""
    def f(r1, r2):
        return 1.0 / (0.5 * (r1 - r2) ** 2 + r1 + r2)
    return integrate_2d(f, cfg, Region.FULL, rel_tol)


def fundamental_k11_over_q(cfg: CutoffConfig, rel_tol: float = 1.0e-7) -> IntegralResult:
    """II K1,1/(r1 r2) over the box; grows like log(lambda/m)."""
    def f(r1, r2):
        return eval_kernel(Family.K1, 1, r1, r2) / (r1 * r2)
    return integrate_2d(f, cfg, Region.FULL, rel_tol)


# --- registry -------------------------------------------------------------------

_CLOSED_FORM = {
    "e2": e2_coeff,
    "ea": ea_coeff,
    "eb": eb_coeff,
    "c1": c1_coeff,
    "a1": a1_coeff,
    "a1_spinless": a1_spinless,
}

COEFFICIENT_NAMES = ("e2", "ea", "eb", "c1", "a1", "a1_spinless",
                     "E0", "E3", "E4", "E41", "E42", "a2_dominant")


def evaluate(name: str, cfg: CutoffConfig, rel_tol: float = 1.0e-8) -> CoefficientReport:
    """Evaluate a named coefficient; the uniform entry point for scans and the CLI."""
    if name in _CLOSED_FORM:
        v = _CLOSED_FORM[name](cfg)
        res = IntegralResult(v, 1e-15 * abs(v), 1)
        return CoefficientReport(name, cfg, res, "closed-form")
    if name == "E0":
        return CoefficientReport(name, cfg, E0_coeff(cfg, rel_tol), "quadrature-2d")
    if name == "E3":
        return CoefficientReport(name, cfg, E3_coeff(cfg, rel_tol), "quadrature-2d")
    if name == "E4":
        return CoefficientReport(name, cfg, E4_coeff(cfg, rel_tol), "quadrature-2d")
    if name == "E41":
        return CoefficientReport(name, cfg, E4_split(cfg, rel_tol)[0], "quadrature-2d")
    if name == "E42":
        return CoefficientReport(name, cfg, E4_split(cfg, rel_tol)[1], "quadrature-2d")
    if name == "a2_dominant":
        s = meff_series(cfg, rel_tol)
        e0 = E0_coeff(cfg, rel_tol)
        e3 = E3_coeff(cfg, rel_tol)
        e4 = E4_coeff(cfg, rel_tol)
        err = (2.0 / 3.0) * (e0.abs_err + e3.abs_err + 2.0 * e4.abs_err)
        n = e0.n_eval + e3.n_eval + e4.n_eval
        return CoefficientReport(
            name, cfg, IntegralResult(s.a2_dominant, err, n), "quadrature-2d"
        )
    raise KeyError(f"unknown coefficient {name!r}; choose from {COEFFICIENT_NAMES}")
