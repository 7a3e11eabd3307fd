"""Per-space eigenvalue formulas Lambda_k with multiplicities, assembled into
spectrum tables.

The seven spaces share one dispatch: Bergman kinds integrate over the ball of
radius R, Bargmann kinds against the Gaussian weight on the whole space, and
the Agmon-Hormander space integrates undamped over the symbol's support.
Everything is carried as LogReal; |log Lambda_k| ~ k log k is business as
usual here.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from math import comb

from scipy.special import gammaln

from .errors import SupportUnknownError
from .logreal import LogReal
from .quadrature import QuadratureResult, bessel_weighted, moment_compact, moment_gaussian
from .specfun import bessel_i_log, bessel_l2_ball_log
from .symbols import RadialSymbol, decompose_signs, exact_support_radius

KINDS = (
    "BergmanComplex", "BergmanHarmonic", "BergmanHelmholtz",
    "BargmannComplex", "BargmannHarmonic", "BargmannHelmholtz",
    "AgmonHormander",
)
BERGMAN_KINDS = ("BergmanComplex", "BergmanHarmonic", "BergmanHelmholtz")
COMPLEX_KINDS = ("BergmanComplex", "BargmannComplex")


@dataclass(frozen=True)
class SpaceSpec:
    """One of the seven spaces; R is the ball radius (Bergman kinds only)."""

    kind: str
    d: int
    R: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        dmin = 1 if self.kind in COMPLEX_KINDS else 2
        if self.d < dmin:
            raise ValueError(f"{self.kind} requires d >= {dmin}, got {self.d}")
        if self.kind in BERGMAN_KINDS:
            if self.R is None or not (self.R > 0):
                raise ValueError(f"{self.kind} requires a positive ball radius R")
        elif self.R is not None:
            raise ValueError(f"{self.kind} takes no ball radius")

    @property
    def is_bergman(self) -> bool:
        return self.kind in BERGMAN_KINDS


@dataclass(frozen=True)
class EigenvalueEntry:
    k: int
    value: LogReal
    multiplicity: int
    tol: float


@dataclass(frozen=True)
class SpectrumTable:
    """Lambda_k for k = 0..k_max at one tolerance.

    abs_tail, when present, holds (Lambda_{k_max-1}(|V|), Lambda_{k_max}(|V|));
    it is the rigorous envelope used as the counting-function stopping rule
    (|Lambda_k(V)| may oscillate, Lambda_k(|V|) may not).
    """

    space: SpaceSpec
    symbol_text: str
    entries: tuple
    k_max: int
    tol: float
    abs_tail: tuple | None = None

    def values(self):
        return [e.value for e in self.entries]


def multiplicity(space: SpaceSpec, k: int) -> int:
    """Dimension of the degree-k eigenspace.

    Complex kinds count homogeneous polynomials, C(k+d-1, d-1); the real
    kinds count spherical harmonics in d variables,
    C(k+d-1, d-1) - C(k+d-3, d-1) (second term absent for k < 2).
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    d = space.d
    if space.kind in COMPLEX_KINDS:
        return comb(k + d - 1, d - 1)
    dim = comb(k + d - 1, d - 1)
    if k >= 2:
        dim -= comb(k + d - 3, d - 1)
    return dim


_ESR_CACHE: dict[str, float] = {}


def _esr_or_inf(V: RadialSymbol) -> float:
    if V.text not in _ESR_CACHE:
        try:
            _ESR_CACHE[V.text] = exact_support_radius(V)
        except SupportUnknownError:
            _ESR_CACHE[V.text] = math.inf
    return _ESR_CACHE[V.text]


def _gauss_bessel_norm_log(nu: float) -> LogReal:
    # int_0^inf J_nu(r)^2 e^{-r^2} r dr = (1/2) e^{-1/2} I_nu(1/2); validated
    # against quadrature across nu in the test suite before being trusted here
    return bessel_i_log(nu, 0.5).scale_log(math.log(0.5) - 0.5)


def eigenvalue(space: SpaceSpec, V: RadialSymbol, k: int, tol: float) -> EigenvalueEntry:
    """Lambda_k of the Toeplitz operator with symbol V in the given space."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    d, R = space.d, space.R
    if space.is_bergman:
        esr = _esr_or_inf(V)
        if math.isfinite(esr) and esr > R:
            raise ValueError(
                f"symbol support radius {esr:g} exceeds the ball radius R={R:g}")

    kind = space.kind
    if kind == "BergmanComplex":
        s = 2 * k + 2 * d - 1
        mom = moment_compact(V, s, R, tol)
        val = mom.value.scale_log(math.log(s + 1) - (s + 1) * math.log(R))
    elif kind == "BergmanHarmonic":
        s = 2 * k + d - 1
        mom = moment_compact(V, s, R, tol)
        val = mom.value.scale_log(math.log(s + 1) - (s + 1) * math.log(R))
    elif kind == "BergmanHelmholtz":
        nu = k + (d - 2) / 2.0
        num = bessel_weighted(V, nu, "ball", tol, R=R)
        den = bessel_l2_ball_log(nu, R)
        val = num.value / den
    elif kind == "BargmannComplex":
        mom = moment_gaussian(V, 2 * k + 2 * d - 1, tol)
        val = mom.value.scale_log(math.log(2.0) - gammaln(k + d))
    elif kind == "BargmannHarmonic":
        mom = moment_gaussian(V, 2 * k + d - 1, tol)
        val = mom.value.scale_log(math.log(2.0) - gammaln(k + d / 2.0))
    elif kind == "BargmannHelmholtz":
        nu = k + (d - 2) / 2.0
        num = bessel_weighted(V, nu, "gaussian", tol)
        val = num.value / _gauss_bessel_norm_log(nu)
    elif kind == "AgmonHormander":
        nu = k + (d - 2) / 2.0
        num = bessel_weighted(V, nu, "plain", tol)
        val = num.value.scale_log(math.log(math.pi))
    else:  # pragma: no cover
        raise AssertionError(kind)
    return EigenvalueEntry(k, val, multiplicity(space, k), tol)


def spectrum(space: SpaceSpec, V: RadialSymbol, k_max: int, tol: float,
             with_abs_tail: bool = True) -> SpectrumTable:
    """Entries for k = 0..k_max; deterministic given (space, V, k_max, tol).

    The first quadrature failure aborts with the failing k named.  Entries
    are independent; evaluation order carries no state.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    entries = []
    for k in range(k_max + 1):
        try:
            entries.append(eigenvalue(space, V, k, tol))
        except (ArithmeticError, ValueError) as exc:
            raise type(exc)(f"eigenvalue computation failed at k={k}: {exc}") from exc
    abs_tail = None
    if with_abs_tail:
        _, _, Vabs = decompose_signs(V)
        lo = max(k_max - 1, 0)
        abs_tail = tuple(eigenvalue(space, Vabs, kk, tol).value for kk in (lo, k_max))
    return SpectrumTable(space, V.text, tuple(entries), k_max, tol, abs_tail)


# ---------------------------------------------------------------------------
# Serialization (external interface)


def table_to_json(table: SpectrumTable) -> str:
    space = {"kind": table.space.kind, "d": table.space.d}
    if table.space.R is not None:
        space["R"] = table.space.R
    doc = {
        "space": space,
        "symbol": table.symbol_text,
        "tol": table.tol,
        "entries": [
            {"k": e.k, "sign": e.value.sign, "log_abs": e.value.log_abs,
             "multiplicity": e.multiplicity}
            for e in table.entries
        ],
    }
    return json.dumps(doc)


def table_from_json(text: str) -> SpectrumTable:
    doc = json.loads(text)
    space = SpaceSpec(doc["space"]["kind"], doc["space"]["d"], doc["space"].get("R"))
    tol = doc["tol"]
    entries = tuple(
        EigenvalueEntry(e["k"], LogReal.from_log(e["sign"], e["log_abs"]),
                        e["multiplicity"], tol)
        for e in doc["entries"]
    )
    return SpectrumTable(space, doc["symbol"], entries, entries[-1].k if entries else -1, tol)


def table_to_csv(table: SpectrumTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "sign", "log_abs", "multiplicity"])
    for e in table.entries:
        w.writerow([e.k, e.value.sign, repr(e.value.log_abs), e.multiplicity])
    return buf.getvalue()
