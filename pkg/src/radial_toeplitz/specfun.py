"""Log-domain special functions: log-Gamma, Bessel J at large real order on
bounded arguments, modified Bessel I, and the two Bessel identities the
eigenvalue formulas lean on (the L2 ball integral and the Neumann expansion
of r^(2m) in squared Bessel functions).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, jv

from . import backend
from .errors import AccuracyLossError
from .logreal import LogReal

R_MAX = 50.0

_EPS = np.finfo(float).eps


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0; relative error <= 1e-13 on [1e-2, 1e6]."""
    if x <= 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return float(gammaln(x))


def bessel_j_log(nu: float, r, r_max: float = R_MAX):
    """J_nu(r) as LogReal via the factored power series.

    J_nu(r) = (r/2)^nu / Gamma(nu+1) * sum_m (-1)^m (r^2/4)^m / (m! (nu+1)..(nu+m));
    the prefactor stays in the log domain, the normalized tail in linear.
    Guaranteed relative error <= 1e-11 in the regime nu >= r.  Raises
    AccuracyLossError when nu < r/2 and the alternating tail cancels past the
    double-precision budget (use a standard-precision routine there instead).
    """
    scalar = np.ndim(r) == 0
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(rr <= 0) or np.any(rr > r_max):
        raise ValueError(f"r must lie in (0, {r_max}]")
    if nu < 0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    tail, peak = backend.kernels().bessel_j_tail(float(nu), rr)
    rel_err = _EPS * peak / np.maximum(np.abs(tail), 1e-300)
    rescue = rel_err > 1e-12
    if np.any(rescue):
        if nu < np.max(rr[rescue]) / 2:
            worst = float(rr[int(np.argmax(rel_err))])
            raise AccuracyLossError(
                f"series cancellation too severe at nu={nu:g}, r={worst:g} "
                f"(estimated relative error {float(np.max(rel_err)):.2e}); "
                "use a standard-precision routine for small orders")
        # transition zone nu ~ r: the alternating tail cancels, but the
        # magnitude is ~nu^(-1/3), comfortably representable; take jv there
        tail = np.where(rescue, np.nan, tail)
    pref = nu * np.log(rr / 2.0) - gammaln(nu + 1.0)
    out = []
    for i, t in enumerate(tail):
        if np.isnan(t):
            v = float(jv(nu, rr[i]))
            out.append(LogReal.from_float(v))
        elif t == 0.0:
            out.append(LogReal.zero())
        else:
            out.append(LogReal.from_log(int(np.sign(t)), pref[i] + math.log(abs(t))))
    return out[0] if scalar else out


def bessel_j_log_arrays(nu: float, r: np.ndarray):
    """(sign, log|J_nu|) over an array of radii, choosing per point between
    scipy's jv (accurate wherever it does not underflow) and the factored
    series (the large-order regime).  Internal workhorse for quadrature."""
    r = np.asarray(r, dtype=float)
    sign = np.zeros_like(r)
    logabs = np.full_like(r, -np.inf)
    pos = r > 0
    if not np.any(pos):
        if nu == 0.0:
            sign[~pos], logabs[~pos] = 1.0, 0.0
        return sign, logabs
    rp = r[pos]
    with np.errstate(divide="ignore"):
        lead = nu * np.log(rp / 2.0) - gammaln(nu + 1.0)
    use_jv = lead > -600.0
    s = np.zeros_like(rp)
    l = np.full_like(rp, -np.inf)
    if np.any(use_jv):
        v = jv(nu, rp[use_jv])
        with np.errstate(divide="ignore"):
            s[use_jv] = np.sign(v)
            l[use_jv] = np.where(v == 0.0, -np.inf, np.log(np.abs(v)))
    if np.any(~use_jv):
        tail, _peak = backend.kernels().bessel_j_tail(float(nu), rp[~use_jv])
        with np.errstate(divide="ignore"):
            s[~use_jv] = np.sign(tail)
            l[~use_jv] = np.where(tail == 0.0, -np.inf,
                                  lead[~use_jv] + np.log(np.abs(tail)))
    sign[pos] = s
    logabs[pos] = l
    if nu == 0.0 and np.any(~pos):
        sign[~pos], logabs[~pos] = 1.0, 0.0
    return sign, logabs


def bessel_i(nu: float, x: float) -> float:
    """Modified Bessel I_nu(x) for x in (0, 10] by its all-positive series."""
    if not (0.0 < x <= 10.0):
        raise ValueError(f"x must lie in (0, 10], got {x}")
    if nu < 0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    lr = bessel_i_log(nu, x)
    return lr.to_float()


def bessel_i_log(nu: float, x: float) -> LogReal:
    """I_nu(x) as a LogReal; series has no cancellation, error <= 1e-12."""
    tail = backend.kernels().bessel_i_tail(float(nu), np.array([float(x)]))[0]
    pref = nu * math.log(x / 2.0) - gammaln(nu + 1.0)
    return LogReal.from_log(1, pref + math.log(tail))


def bessel_l2_ball(nu: float, R: float, r_max: float = R_MAX) -> float:
    """int_0^R J_nu(r)^2 r dr via (R^2/2)[J_nu^2 - J_(nu-1) J_(nu+1)].

    Falls back to direct quadrature for nu < 1, where the identity would need
    a negative-order evaluation.
    """
    return bessel_l2_ball_log(nu, R, r_max).to_float()


def bessel_l2_ball_log(nu: float, R: float, r_max: float = R_MAX) -> LogReal:
    if not (0.0 < R <= r_max):
        raise ValueError(f"R must lie in (0, {r_max}]")
    if nu < 0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    if nu < 1.0:
        return _l2_ball_quadrature(nu, R)
    rr = np.array([R])
    terms = []
    for order in (nu, nu - 1.0, nu + 1.0):
        s, l = bessel_j_log_arrays(order, rr)
        terms.append(LogReal.from_log(int(s[0]), float(l[0])))
    jc, jm, jp = terms
    diff = jc * jc - jm * jp
    return diff.scale_log(2.0 * math.log(R) - math.log(2.0))


def _l2_ball_quadrature(nu: float, R: float) -> LogReal:
    # deferred import: quadrature builds on this module's J evaluator
    from .quadrature import bessel_square_ball_log
    return bessel_square_ball_log(nu, R, tol=1e-12)


def power_from_bessel(m: int, r: float, terms: int, r_max: float = R_MAX) -> float:
    """Partial Neumann sum approximating r^(2m) from squared Bessel values.

    Uses r^(2m) = 2^(2m+1) (m!)^2/(2m)! sum_(j>=m) j Gamma(m+j)/Gamma(j-m+1) J_j(r)^2,
    with the j = 0 term halved in the degenerate m = 0 case.  The coefficient
    layout was re-derived by power matching against the product series of
    J_j^2 and cross-checked against extended-precision sums.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    if not (0.0 < r <= r_max):
        raise ValueError(f"r must lie in (0, {r_max}]")
    m = int(m)
    js = np.arange(m, m + terms, dtype=float)
    rr = np.full(js.shape, float(r))
    log_j2 = np.empty_like(js)
    for i, j in enumerate(js):
        s, l = bessel_j_log_arrays(float(j), rr[i:i + 1])
        log_j2[i] = 2.0 * l[0]
    if m == 0:
        with np.errstate(divide="ignore"):
            log_coef = np.where(js == 0.0, math.log(0.5), 0.0)
        log_pref = math.log(2.0)
    else:
        log_coef = np.log(js) + gammaln(m + js) - gammaln(js - m + 1.0)
        log_pref = (2 * m + 1) * math.log(2.0) + 2.0 * gammaln(m + 1.0) - gammaln(2 * m + 1.0)
    logs = log_coef + log_j2
    top = float(np.max(logs))
    if top == -np.inf:
        return 0.0
    total = float(np.sum(np.exp(logs - top)))
    return math.exp(log_pref + top + math.log(total))
