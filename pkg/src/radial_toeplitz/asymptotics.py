"""Closed-form counting asymptotics per space, comparison of computed
counting functions against them, and the two headline experiments: the
oscillatory-cancelation counterexample and the sign-at-the-periphery check.

The laws predict n(lambda) ~ C |log lambda|^p / (log|log lambda|)^s; limits
at lambda -> 0 are unreachable, so comparisons report max-over-grid ratios on
log-spaced grids reaching 1e-40 as the limsup proxy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .logreal import LogReal
from .ordering import counting
from .quadrature import abs_oscillatory_moment, oscillatory_moment
from .spectra import EigenvalueEntry, SpaceSpec, SpectrumTable, spectrum
from .symbols import DecayClass, RadialSymbol, exact_support_radius, parse_symbol


@dataclass(frozen=True)
class AsymptoticLaw:
    """n(lambda) ~ coefficient |log lambda|^log_power / (log|log lambda|)^loglog_power."""

    coefficient: float
    log_power: float
    loglog_power: float

    def __post_init__(self):
        if not self.coefficient > 0:
            raise ValueError("law coefficient must be positive")

    def predict(self, lam: float) -> float:
        L = abs(math.log(lam))
        out = self.coefficient * L ** self.log_power
        if self.loglog_power:
            out /= math.log(L) ** self.loglog_power
        return out


def predicted_law(space: SpaceSpec, cls: DecayClass) -> AsymptoticLaw:
    """The counting-function law for a symbol of the given decay class.

    Bergman kinds require CompactSupport(b) (the coefficient depends on
    b/R); Bargmann and Agmon-Hormander kinds accept CompactSupport or
    RapidDecay and their coefficients are support-independent.
    """
    d = space.d
    if space.is_bergman:
        if cls.tag != "CompactSupport":
            raise ValueError(
                f"{space.kind} law needs a CompactSupport class, got {cls.tag}")
        logek = 2.0 * abs(math.log(cls.parameter / space.R))
        if space.kind == "BergmanComplex":
            return AsymptoticLaw(logek ** (-d) / math.factorial(d), d, 0.0)
        return AsymptoticLaw(2.0 * logek ** (-(d - 1)) / math.factorial(d - 1), d - 1, 0.0)
    if cls.tag not in ("CompactSupport", "RapidDecay"):
        raise ValueError(
            f"{space.kind} law needs CompactSupport or RapidDecay, got {cls.tag}")
    if space.kind == "BargmannComplex":
        return AsymptoticLaw(1.0 / math.factorial(d), d, d)
    if space.kind in ("BargmannHarmonic", "BargmannHelmholtz"):
        return AsymptoticLaw(2.0 / math.factorial(d - 1), d - 1, d - 1)
    # AgmonHormander: eigenvalues decay like squares, halving the powers
    return AsymptoticLaw(2.0 / math.factorial(d - 1), (d - 1) / 2.0, (d - 1) / 2.0)


@dataclass(frozen=True)
class ComparisonReport:
    lambdas: tuple
    n_computed: tuple
    n_predicted: tuple
    ratios: tuple
    max_ratio: float
    final_ratio: float


def compare(table: SpectrumTable, law: AsymptoticLaw, lambda_grid) -> ComparisonReport:
    """ratio(lambda) = n(lambda)/law(lambda) over the grid; max-over-grid is
    the limsup proxy, the final entry the deepest-lambda snapshot."""
    lams = tuple(sorted(float(l) for l in lambda_grid))
    ns, preds, ratios = [], [], []
    for lam in lams:
        n, _, _ = counting(table, lam)
        pred = law.predict(lam)
        ns.append(n)
        preds.append(pred)
        ratios.append(n / pred if pred > 0 else 0.0)
    return ComparisonReport(lams, tuple(ns), tuple(preds), tuple(ratios),
                            max(ratios) if ratios else 0.0,
                            ratios[0] if ratios else 0.0)


def log_slope_fit(table: SpectrumTable, k_range) -> tuple:
    """Least-squares fit -log|Lambda_k| ~ a (k log k) + b k over k_range.

    The two-regressor model keeps Stirling's subleading -k term out of the
    leading coefficient.  Raises on a zero eigenvalue inside the range.
    """
    k_lo, k_hi = k_range
    if not (k_hi > k_lo >= 10):
        raise ValueError(f"need k_hi > k_lo >= 10, got ({k_lo}, {k_hi})")
    ks, ys = [], []
    for e in table.entries:
        if k_lo <= e.k <= k_hi:
            if e.value.sign == 0:
                raise ValueError(f"zero eigenvalue at k={e.k} inside the fit range")
            ks.append(e.k)
            ys.append(-e.value.log_abs)
    ks = np.asarray(ks, dtype=float)
    ys = np.asarray(ys, dtype=float)
    A = np.column_stack([ks * np.log(ks), ks])
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    return float(coef[0]), float(coef[1])


# ---------------------------------------------------------------------------
# Experiments


def oscillatory_symbol_text(p: float, q: float) -> str:
    return f"exp(-r^{2 * p:g}+r^2)*sin(r^{2 * q:g})"


@dataclass(frozen=True)
class CounterexampleReport:
    p: float
    q: float
    k_max: int
    fit_range: tuple
    slope_v: float
    slope_v_linear: float
    slope_abs: float
    slope_abs_linear: float
    separation: float
    bound_margin_log: float
    table_v: SpectrumTable
    table_abs: SpectrumTable
    assertions: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())


def run_counterexample(p: float, q: float, k_max: int, tol: float = 1e-8) -> CounterexampleReport:
    """Cancelation experiment in the d=1 complex Bargmann space.

    Lambda_k(V_pq) = 2 I(k) / Gamma(k+1) with the oscillatory moments I(k);
    Lambda_k(|V_pq|) uses the positive between-zeros sums.  Fits the slopes of
    -log|Lambda_k| against k log k over the top two thirds of the range, and
    checks the rotation bound |I(k)| <= Gamma((k+1)/q)/(2q) at every k.
    """
    space = SpaceSpec("BargmannComplex", 1)
    sym_text = oscillatory_symbol_text(p, q)
    entries_v, entries_abs = [], []
    bound_margin = -math.inf
    for k in range(k_max + 1):
        ik = oscillatory_moment(p, q, k, tol)
        bound_log = gammaln((k + 1) / q) - math.log(2 * q)
        if not ik.value.is_zero():
            bound_margin = max(bound_margin, ik.value.log_abs - bound_log)
        lam = ik.value.scale_log(math.log(2.0) - gammaln(k + 1.0))
        entries_v.append(EigenvalueEntry(k, lam, 1, tol))
        mk = abs_oscillatory_moment(p, q, k, tol)
        lam_abs = mk.value.scale_log(math.log(2.0) - gammaln(k + 1.0))
        entries_abs.append(EigenvalueEntry(k, lam_abs, 1, tol))
    table_v = SpectrumTable(space, sym_text, tuple(entries_v), k_max, tol)
    table_abs = SpectrumTable(space, f"abs({sym_text})", tuple(entries_abs), k_max, tol)

    fit_range = (max(k_max // 3, 10), k_max)
    a_v, b_v = log_slope_fit(table_v, fit_range)
    a_abs, b_abs = log_slope_fit(table_abs, fit_range)

    target_abs = (p - 1.0) / p
    target_v = (q - 1.0) / q
    assertions = {
        "slope_abs_window": bool(target_abs - 0.05 <= a_abs <= target_abs + 0.05),
        "slope_v_window": bool(0.9 * target_v <= a_v <= 1.2 * target_v),
        "separation": bool(a_v - a_abs >= 0.15),
        "rotation_bound": bool(bound_margin <= 1e-9),
    }
    return CounterexampleReport(p, q, k_max, fit_range, a_v, b_v, a_abs, b_abs,
                                a_v - a_abs, float(bound_margin), table_v, table_abs,
                                assertions)


@dataclass(frozen=True)
class PeripheryReport:
    space: SpaceSpec
    symbol_text: str
    k_max: int
    esr: float
    largest_negative_k: int | None
    n_negative: int
    lambdas: tuple
    positive_ratios: tuple
    ratio_at_min_lambda: float
    assertions: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())


def run_periphery(V: RadialSymbol, space: SpaceSpec, k_max: int,
                  tol: float = 1e-10, lambda_grid=None,
                  max_k0: int = 20, ratio_window=(0.85, 1.15)) -> PeripheryReport:
    """Sign-at-the-periphery experiment: with V >= 0 near its support radius,
    only finitely many Lambda_k are negative and the positive spectrum obeys
    the compact-support law for b = ESR(V)."""
    esr = exact_support_radius(V)
    if not math.isfinite(esr):
        raise ValueError("periphery experiment needs a compact-support symbol")
    lo = max([b for b in V.breakpoints if b < esr], default=0.0)
    probe = np.linspace(lo + 1e-6, esr - 1e-6, 64)
    if np.any(V(probe) < 0):
        raise ValueError("symbol must be nonnegative on the outermost support piece")

    table = spectrum(space, V, k_max, tol)
    negatives = [e.k for e in table.entries if e.value.sign < 0]
    largest_neg = max(negatives) if negatives else None
    n_neg = sum(e.multiplicity for e in table.entries if e.value.sign < 0)

    if lambda_grid is None:
        lambda_grid = np.logspace(-40, -5, 36)
    law = predicted_law(space, DecayClass("CompactSupport", esr))
    lams = sorted(float(l) for l in lambda_grid)
    ratios = []
    for lam in lams:
        _, n_plus, _ = counting(table, lam)
        ratios.append(n_plus / law.predict(lam))
    k0 = (largest_neg + 1) if largest_neg is not None else 0
    assertions = {
        "finitely_many_negative": bool(k0 <= max_k0),
        "positive_tail_ratio": bool(ratio_window[0] <= ratios[0] <= ratio_window[1]),
    }
    return PeripheryReport(space, V.text, k_max, float(esr), largest_neg, n_neg,
                           tuple(lams), tuple(ratios), float(ratios[0]), assertions)
