"""Signed magnitudes in natural-log scale.

Eigenvalues here routinely have magnitudes like exp(-1e5), far below the
smallest subnormal double.  A ``LogReal`` keeps the sign separately and the
magnitude as ``log|x|``, so products, quotients and sums stay exact in range.
Multiplication and addition are associative to within ~1 ulp per operation on
``log_abs``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class LogReal:
    """A real number stored as (sign, log|x|); sign == 0 iff log_abs == -inf."""

    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if (self.sign == 0) != (self.log_abs == -math.inf):
            raise ValueError(
                f"sign=0 iff log_abs=-inf violated: sign={self.sign}, log_abs={self.log_abs}"
            )

    @staticmethod
    def zero() -> "LogReal":
        return LogReal(0, -math.inf)

    @staticmethod
    def one() -> "LogReal":
        return LogReal(1, 0.0)

    @staticmethod
    def from_float(x: float) -> "LogReal":
        if x == 0.0:
            return LogReal.zero()
        if math.isnan(x):
            raise ValueError("cannot represent NaN")
        return LogReal(1 if x > 0 else -1, math.log(abs(x)))

    @staticmethod
    def from_log(sign: int, log_abs: float) -> "LogReal":
        if sign == 0 or log_abs == -math.inf:
            return LogReal.zero()
        return LogReal(1 if sign > 0 else -1, float(log_abs))

    def to_float(self) -> float:
        """Convert to a double; underflows to 0.0 and overflows to +-inf."""
        if self.sign == 0:
            return 0.0
        if self.log_abs > 709.0:
            return math.inf * self.sign
        return self.sign * math.exp(self.log_abs)

    def is_zero(self) -> bool:
        return self.sign == 0

    def __abs__(self) -> "LogReal":
        return LogReal(abs(self.sign), self.log_abs)

    def __neg__(self) -> "LogReal":
        return LogReal(-self.sign, self.log_abs)

    def __mul__(self, other: "LogReal") -> "LogReal":
        s = self.sign * other.sign
        if s == 0:
            return LogReal.zero()
        return LogReal(s, self.log_abs + other.log_abs)

    def __truediv__(self, other: "LogReal") -> "LogReal":
        if other.sign == 0:
            raise ZeroDivisionError("LogReal division by zero")
        if self.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.log_abs - other.log_abs)

    def __add__(self, other: "LogReal") -> "LogReal":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.log_abs >= other.log_abs else (other, self)
        v = hi.sign + lo.sign * math.exp(lo.log_abs - hi.log_abs)
        if v == 0.0:
            return LogReal.zero()
        return LogReal(1 if v > 0 else -1, hi.log_abs + math.log(abs(v)))

    def __sub__(self, other: "LogReal") -> "LogReal":
        return self + (-other)

    def scale_log(self, dlog: float) -> "LogReal":
        """Multiply by exp(dlog) without leaving the log domain."""
        if self.sign == 0:
            return self
        return LogReal(self.sign, self.log_abs + dlog)

    def powi(self, n: int) -> "LogReal":
        if n == 0:
            return LogReal.one()
        if self.sign == 0:
            return LogReal.zero()
        s = 1 if (self.sign == 1 or n % 2 == 0) else -1
        return LogReal(s, self.log_abs * n)

    # Ordering compares the represented real values.
    def _cmp_key(self):
        return (self.sign, self.sign * self.log_abs)

    def __lt__(self, other) -> bool:
        other = _coerce(other)
        if self.sign != other.sign:
            return self.sign < other.sign
        return self.sign * self.log_abs < other.sign * other.log_abs

    def __le__(self, other) -> bool:
        other = _coerce(other)
        return self < other or self == other

    def __gt__(self, other) -> bool:
        return _coerce(other) < self

    def __ge__(self, other) -> bool:
        return _coerce(other) <= self

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogReal(0)"
        return f"LogReal({'+' if self.sign > 0 else '-'}exp({self.log_abs:.6g}))"


def _coerce(x) -> LogReal:
    if isinstance(x, LogReal):
        return x
    if isinstance(x, (int, float)):
        return LogReal.from_float(float(x))
    raise TypeError(f"cannot compare LogReal with {type(x)!r}")


def logsumexp_signed(signs, logs):
    """Signed log-sum-exp over arrays; returns (sign, log_abs) of the sum."""
    import numpy as np

    signs = np.asarray(signs, dtype=float)
    logs = np.asarray(logs, dtype=float)
    live = signs != 0
    if not np.any(live):
        return 0, -math.inf
    m = float(np.max(logs[live]))
    v = float(np.sum(signs[live] * np.exp(logs[live] - m)))
    if v == 0.0:
        return 0, -math.inf
    return (1 if v > 0 else -1), m + math.log(abs(v))
