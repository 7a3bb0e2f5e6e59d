"""Numerical toolkit for dilation-generated systems {phi(nx)} on L2(0,1)."""

from .dilation_basis import (
    DilatedSystem,
    DualSystem,
    GramSummary,
    SineVector,
    bari_g_residual,
    biorthogonality_check,
    dilation_generator_check,
    dual_coefficients,
    evaluate,
    evaluate_uniform,
    gram_matrix,
    phi_coefficients,
    riesz_corridor,
)
from .dirichlet_arith import (
    CoeffVector,
    Decay,
    dirichlet_convolve,
    dirichlet_inverse,
    divisors,
    is_completely_multiplicative,
    mobius,
    mobius_sieve,
)
from .expansion import (
    ExpansionResult,
    QuadConfig,
    Region,
    ScanReport,
    analyze,
    halfplane_scan,
    sine_coefficients,
    stability_report,
    synthesize,
)
from .special_fn import SeriesValue, dirichlet_series, phi_polylog, polylog_circle, zeta

__version__ = "0.1.0"
