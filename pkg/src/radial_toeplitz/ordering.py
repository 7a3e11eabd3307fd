"""Multiplicity expansion, monotone reordering, counting functions, and the
reordering combinatorics (bijection share bounds, the sharp construction,
controllably dense subsequences, inverse-value sums).

Spectra here have multiplicities growing like k^(d-1), so ordered spectra are
kept as run-length encoded (value, count) lists; nothing ever materializes a
million repeated eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisViolationError, InsufficientKMaxError
from .logreal import LogReal
from .spectra import SpectrumTable


@dataclass(frozen=True)
class OrderedSpectrum:
    """Nonincreasing runs of s-numbers and of the signed sequences.

    Each run is (magnitude: LogReal, count); runs are strictly decreasing in
    magnitude.  Eigenvalues equal to quadrature tolerance merge into one run
    (their internal order is unobservable in any counting function).
    """

    s_runs: tuple
    pos_runs: tuple
    neg_runs: tuple

    def total(self) -> int:
        return sum(c for _, c in self.s_runs)


def _runs(items, merge_log_tol):
    # items: (log_abs, count); build strictly-decreasing runs
    items = sorted(items, key=lambda t: -t[0])
    runs = []
    for log_abs, count in items:
        if runs and runs[-1][0] - log_abs <= merge_log_tol:
            runs[-1][1] += count
        else:
            runs.append([log_abs, count])
    return tuple((LogReal.from_log(1, la), c) for la, c in runs)


def order_spectrum(table: SpectrumTable) -> OrderedSpectrum:
    """Run-length encoded monotone reordering; zero eigenvalues are dropped."""
    merge = table.tol
    pos = [(e.value.log_abs, e.multiplicity) for e in table.entries if e.value.sign > 0]
    neg = [(e.value.log_abs, e.multiplicity) for e in table.entries if e.value.sign < 0]
    return OrderedSpectrum(
        s_runs=_runs(pos + neg, merge),
        pos_runs=_runs(pos, merge),
        neg_runs=_runs(neg, merge),
    )


def counting(table: SpectrumTable, lam: float):
    """(n, n_plus, n_minus) at threshold lam: n_pm = sum of multiplicities
    over +-Lambda_k > lam (strict), n = n_plus + n_minus.

    When the table carries its |V|-envelope tail, the stopping rule
    Lambda_{k_max}(|V|) < lam is enforced; a violation raises
    InsufficientKMaxError naming the extension needed.
    """
    if not (lam > 0):
        raise ValueError(f"lambda must be positive, got {lam}")
    log_lam = math.log(lam)
    if table.abs_tail is not None:
        prev, last = table.abs_tail
        if not (last.sign == 0 or last.log_abs < log_lam):
            slope = last.log_abs - prev.log_abs
            if slope < 0:
                k_needed = table.k_max + int(math.ceil((log_lam - last.log_abs) / slope)) + 1
            else:
                k_needed = 2 * table.k_max + 1
            raise InsufficientKMaxError(lam, table.k_max, k_needed)
    n_plus = sum(e.multiplicity for e in table.entries
                 if e.value.sign > 0 and e.value.log_abs > log_lam)
    n_minus = sum(e.multiplicity for e in table.entries
                  if e.value.sign < 0 and e.value.log_abs > log_lam)
    return n_plus + n_minus, n_plus, n_minus


# ---------------------------------------------------------------------------
# Bijection combinatorics


class BijectionPrefix:
    """An injective map k -> m_k from [0, N] into the nonnegative integers.

    F_beta denotes the value set {m_k : m_k <= beta k}; the share bound says
    #(F_beta n [0, N]) >= (beta-1)/beta * N for any bijection of Z_+.
    """

    def __init__(self, values):
        arr = np.asarray(values, dtype=np.int64)
        if arr.ndim != 1 or len(np.unique(arr)) != arr.size:
            raise ValueError("map values must be a 1-d injective sequence")
        if np.any(arr < 0):
            raise ValueError("map values must be nonnegative")
        self.m = arr

    @property
    def n(self) -> int:
        return self.m.size - 1

    def value(self, k: int) -> int:
        return int(self.m[k])

    def f_values(self, beta: float, N: int) -> np.ndarray:
        """Sorted elements of F_beta within [0, N]."""
        k = np.arange(self.m.size)
        mask = (self.m <= beta * k) & (self.m <= N)
        return np.sort(self.m[mask])

    def count_f(self, beta: float, N: int) -> int:
        return int(self.f_values(beta, N).size)


class SharpnessBijection(BijectionPrefix):
    """The sharp construction: m_k = floor(beta k) + 1 off powers of two,
    with the power-of-two slots assigned the smallest unused targets in
    ascending order to restore bijectivity.

    The fill-in slot for the i-th leftover value is k = 2^i, so covering all
    values below N uses astronomically large k; the object therefore answers
    value-side queries (membership of each v <= horizon in F_beta) lazily
    instead of materializing the map.  Queries beyond the construction
    horizon raise.
    """

    def __init__(self, beta: float, horizon: int):
        if beta <= 1:
            raise ValueError(f"beta must exceed 1, got {beta}")
        self.beta = float(beta)
        self.horizon = int(horizon)
        v = np.arange(self.horizon + 1, dtype=np.int64)
        # v is a rule value iff some non-power k has floor(beta k) + 1 == v
        k_cand = np.ceil((v - 1) / self.beta).astype(np.int64)
        k_cand = np.maximum(k_cand, 0)
        hit = (np.floor(self.beta * k_cand).astype(np.int64) + 1 == v) & (v >= 1)
        hit &= ~_is_power_of_two(k_cand)
        self._rule_value = hit
        leftovers = v[~hit]
        self._leftovers = leftovers            # i-th leftover fills slot k = 2^i
        self._rank = {int(val): i for i, val in enumerate(leftovers)}

    @property
    def n(self) -> int:
        return self.horizon

    def value(self, k: int) -> int:
        if not _is_power_of_two(np.int64(k)):
            return int(math.floor(self.beta * k) + 1)
        i = int(np.log2(k))
        if i >= self._leftovers.size:
            raise ValueError(f"fill-in slot k=2^{i} exceeds construction horizon")
        return int(self._leftovers[i])

    def f_values(self, beta: float, N: int) -> np.ndarray:
        if N > self.horizon:
            raise ValueError(f"query N={N} exceeds construction horizon {self.horizon}")
        # rule values never land in F (floor(beta k)+1 > beta k); leftovers
        # fill slot 2^i and belong iff value <= beta * 2^i
        left = self._leftovers[self._leftovers <= N]
        i = np.arange(left.size, dtype=np.float64)
        with np.errstate(over="ignore"):
            ok = left <= beta * np.exp2(i)
        return left[ok]

    def count_f(self, beta: float, N: int) -> int:
        return int(self.f_values(beta, N).size)


def _is_power_of_two(k):
    k = np.asarray(k)
    return (k > 0) & ((k & (k - 1)) == 0)


def reorder_share(b: BijectionPrefix, beta: float, N: int) -> int:
    """#(F_beta n [0, N]): how many map values stay below beta times their
    index and below N.  The share bound guarantees >= (beta-1)/beta * N - 1
    for any full bijection."""
    if beta <= 1:
        raise ValueError(f"beta must exceed 1, got {beta}")
    if N > b.n:
        raise ValueError(f"N={N} outside the prefix [0, {b.n}]")
    return b.count_f(beta, N)


def sharpness_bijection(beta: float, N: int) -> SharpnessBijection:
    """The construction attaining the share bound: count_f/N -> (beta-1)/beta."""
    return SharpnessBijection(beta, N)


def dense_subsequence(a, b, beta: float):
    """Indices k_1 < k_2 < ... with |a_{k_l}| <= b_{floor(k_l / beta)} and
    k_l <= floor(beta/(beta-1) l) + 1.

    Requires the nonincreasing rearrangement a* of |a| to satisfy a*_j <= b_j
    (raises HypothesisViolationError otherwise).  b must be positive and
    nonincreasing.
    """
    if beta <= 1:
        raise ValueError(f"beta must exceed 1, got {beta}")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if b.size < a.size:
        raise ValueError("b must be at least as long as a")
    if np.any(b <= 0) or np.any(np.diff(b) > 0):
        raise ValueError("b must be positive and nonincreasing")
    order = np.argsort(-np.abs(a), kind="stable")  # j-th largest |a| sits at order[j]
    a_star = np.abs(a)[order]
    bad = np.where(a_star > b[: a.size])[0]
    if bad.size:
        j = int(bad[0])
        raise HypothesisViolationError(
            f"a*_{j} = {a_star[j]:g} exceeds b_{j} = {b[j]:g}")
    j = np.arange(a.size)
    in_f = order <= beta * j
    return np.sort(order[in_f])


def inverse_sum_ratio(b: BijectionPrefix, beta: float, N: int) -> float:
    """(log N)^{-1} sum of 1/m over m in F_beta n [1, N]; the share bound
    makes the limsup at least (beta-1)/beta."""
    if N < 2:
        raise ValueError("N must be >= 2")
    vals = b.f_values(beta, N)
    vals = vals[vals >= 1]
    return float(np.sum(1.0 / vals) / math.log(N))
