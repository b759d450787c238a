"""Effective-mass perturbation coefficients of the spin-1/2 Pauli-Fierz model.

Library layout:

* :mod:`meff.kernels` -- closed-form / series angular kernels plus the
  quadrature oracle for the two-photon energy denominators.
* :mod:`meff.quadrature` -- adaptive 1D/2D cutoff-box integration and the
  6D Monte Carlo engine.
* :mod:`meff.coefficients` -- the expansion coefficients (e2, ea, eb, c1,
  a1, E0, E3, E4, ...), their assembly into m_eff/m, and the
  mass-renormalization flow probe.
* :mod:`meff.catalog` -- the static 38-term classification.
* :mod:`meff.asymptotics` -- cutoff scans, growth-model fits, plateau bands.
* :mod:`meff.report` -- the verification suite behind ``meff report``.
"""

from .asymptotics import Model, RateFit, ScanSeries, fit_rate, model_select, scan
from .catalog import Order, TermDescriptor, list_terms, parity_filter, predicted_order
from .coefficients import (
    CancellationReport,
    CoefficientReport,
    SeriesCoefficients,
    E0_coeff,
    E3_coeff,
    E4_coeff,
    E4_split,
    a1_coeff,
    a1_spinless,
    c1_coeff,
    cancellation_report,
    e2_coeff,
    ea_coeff,
    eb_coeff,
    evaluate,
    meff_ratio,
    meff_series,
    renorm_flow,
)
from .kernels import (
    EnergyDenoms,
    Family,
    KernelRequest,
    RadialPoint,
    angular_oracle,
    energy_denoms,
    kernel_closed,
    kernel_eval,
    kernel_series,
)
from .quadrature import (
    ConvergenceError,
    CutoffConfig,
    IntegralResult,
    Region,
    integrate_1d,
    integrate_2d,
    mc_integrate_6d,
)

__version__ = "0.1.0"
