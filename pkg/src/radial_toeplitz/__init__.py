"""Spectra of Toeplitz operators with radial symbols in Bergman, Bargmann and
Agmon-Hormander spaces: explicit eigenvalues, counting functions, asymptotic
laws and the oscillatory-cancelation experiments.
"""

__version__ = "0.1.0"

from .logreal import LogReal
from .symbols import (
    DecayClass,
    RadialSymbol,
    classify_decay,
    decompose_signs,
    evaluate,
    exact_support_radius,
    parse_symbol,
)
from .specfun import (
    bessel_i,
    bessel_i_log,
    bessel_j_log,
    bessel_l2_ball,
    bessel_l2_ball_log,
    log_gamma,
    power_from_bessel,
)
from .quadrature import (
    QuadratureResult,
    abs_oscillatory_moment,
    bessel_weighted,
    moment_compact,
    moment_gaussian,
    oscillatory_moment,
)
from .spectra import (
    EigenvalueEntry,
    SpaceSpec,
    SpectrumTable,
    eigenvalue,
    multiplicity,
    spectrum,
    table_from_json,
    table_to_csv,
    table_to_json,
)
from .ordering import (
    BijectionPrefix,
    OrderedSpectrum,
    counting,
    dense_subsequence,
    inverse_sum_ratio,
    order_spectrum,
    reorder_share,
    sharpness_bijection,
)
from .asymptotics import (
    AsymptoticLaw,
    ComparisonReport,
    compare,
    log_slope_fit,
    predicted_law,
    run_counterexample,
    run_periphery,
)
from . import backend

__all__ = [
    "LogReal",
    "DecayClass", "RadialSymbol", "classify_decay", "decompose_signs",
    "evaluate", "exact_support_radius", "parse_symbol",
    "bessel_i", "bessel_i_log", "bessel_j_log", "bessel_l2_ball",
    "bessel_l2_ball_log", "log_gamma", "power_from_bessel",
    "QuadratureResult", "abs_oscillatory_moment", "bessel_weighted",
    "moment_compact", "moment_gaussian", "oscillatory_moment",
    "EigenvalueEntry", "SpaceSpec", "SpectrumTable", "eigenvalue",
    "multiplicity", "spectrum", "table_from_json", "table_to_csv",
    "table_to_json",
    "BijectionPrefix", "OrderedSpectrum", "counting", "dense_subsequence",
    "inverse_sum_ratio", "order_spectrum", "reorder_share",
    "sharpness_bijection",
    "AsymptoticLaw", "ComparisonReport", "compare", "log_slope_fit",
    "predicted_law", "run_counterexample", "run_periphery",
    "backend",
]
