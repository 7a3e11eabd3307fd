"""High-accuracy weighted integrals of radial symbols in the log domain.

All tolerances are relative in linear scale, carried additively on log
magnitudes; integrands are evaluated as (sign, log|f|) pairs so that moments
like int V r^999 e^{-r^2} dr keep full relative accuracy when the answer is
exp(-2500).

The adaptive engine bisects Gauss-Legendre panels, comparing a 24-point and a
16-point rule per panel for the error estimate, with an explicit round-off
floor so that cancellation-dominated integrals report honest errors instead
of looping forever.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from . import backend
from .errors import NonIntegrableError, ToleranceNotMetError
from .logreal import LogReal, logsumexp_signed
from .specfun import R_MAX, bessel_j_log_arrays
from .symbols import RadialSymbol, exact_support_radius, classify_decay, tail_truncation_radius
from .errors import SupportUnknownError

_EPS = np.finfo(float).eps
_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}

TOL_MIN, TOL_MAX = 1e-14, 1e-2


def _gl(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = leggauss(n)
    return _GL_CACHE[n]


def _check_tol(tol: float):
    if not (TOL_MIN < tol < TOL_MAX):
        raise ValueError(f"tol must lie in ({TOL_MIN:g}, {TOL_MAX:g}), got {tol:g}")


@dataclass(frozen=True)
class QuadratureResult:
    """Integral value with provenance.

    abs_error_estimate is the natural log of the estimated absolute error
    (log-domain, consistent with LogReal magnitudes).
    """

    value: LogReal
    abs_error_estimate: float
    evaluations: int

    def meets(self, tol: float) -> bool:
        if self.value.is_zero():
            return True
        return self.abs_error_estimate <= self.value.log_abs + math.log(tol)


# ---------------------------------------------------------------------------
# Adaptive panel engine


class _Panel:
    __slots__ = ("lo", "hi", "sign", "logval", "logerr", "scale")

    def __init__(self, lo, hi, sign, logval, logerr, scale):
        self.lo, self.hi = lo, hi
        self.sign, self.logval, self.logerr, self.scale = sign, logval, logerr, scale


def _eval_panel(flog, lo, hi):
    x24, w24 = _gl(24)
    x16, w16 = _gl(16)
    h2 = (hi - lo) / 2.0
    r = np.concatenate([(x24 + 1.0) * h2 + lo, (x16 + 1.0) * h2 + lo])
    sign, logabs = flog(r)
    if np.any(np.isnan(logabs[sign != 0])):
        raise ValueError(f"integrand evaluated to NaN on panel [{lo:g}, {hi:g}]")
    live = sign != 0
    if not np.any(live):
        return _Panel(lo, hi, 0, -np.inf, -np.inf, -np.inf)
    m = float(np.max(logabs[live]))
    scaled = np.where(live, sign * np.exp(logabs - m), 0.0)
    s24 = float(np.dot(w24, scaled[:24]))
    s16 = float(np.dot(w16, scaled[24:]))
    abs24 = float(np.dot(w24, np.abs(scaled[:24])))
    lh = math.log(h2)
    # GL-24 applied to e^{kappa x} has relative error ~ (e kappa / 96)^48;
    # rule-difference alone underestimates on such edge spikes because both
    # rules miss them the same way
    lr = logabs[:24][live[:24]]
    kappa = float(np.max(lr) - np.min(lr)) if lr.size > 1 else 0.0
    spike = min(1.0, (math.e * kappa / 96.0) ** 48) * abs24
    err_lin = max(abs(s24 - s16), 40.0 * _EPS * abs24, spike)
    logerr = m + math.log(err_lin) + lh if err_lin > 0 else -np.inf
    if s24 == 0.0:
        return _Panel(lo, hi, 0, -np.inf, logerr, m + lh)
    return _Panel(lo, hi, int(np.sign(s24)), m + math.log(abs(s24)) + lh, logerr, m + lh)


def _integrate_adaptive(flog, pieces, tol, max_panels=4000, init_width=None):
    """Integrate flog over the finite pieces; returns (LogReal, logerr, evals)."""
    panels = []
    evals = 0
    for lo, hi in pieces:
        if not (hi > lo):
            continue
        n0 = 2
        if init_width is not None:
            n0 = max(n0, int(math.ceil((hi - lo) / init_width)))
        edges = np.linspace(lo, hi, n0 + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            panels.append(_eval_panel(flog, a, b))
            evals += 40
    if not panels:
        return LogReal.zero(), -np.inf, max(evals, 1)

    heap = [(-p.logerr, i) for i, p in enumerate(panels)]
    heapq.heapify(heap)
    store = list(panels)

    def totals():
        live = [p for p in store if p is not None]
        sgn, logv = logsumexp_signed([p.sign for p in live], [p.logval for p in live])
        errs = [p.logerr for p in live if p.logerr > -np.inf]
        scales = [p.scale for p in live if p.scale > -np.inf]
        logerr = -np.inf
        if errs:
            m = max(errs)
            logerr = m + math.log(sum(math.exp(e - m) for e in errs))
        scale = max(scales) if scales else -np.inf
        return sgn, logv, logerr, scale

    log_tol = math.log(tol)
    while True:
        sgn, logv, logerr, scale = totals()
        floor = scale + math.log(_EPS) + math.log(max(len([p for p in store if p]), 1)) + 2.0
        target = max((logv + log_tol) if sgn != 0 else -np.inf, floor)
        if logerr <= target:
            return LogReal.from_log(sgn, logv), logerr, evals
        if len(store) >= max_panels:
            raise ToleranceNotMetError(
                f"panel budget {max_panels} exhausted (achieved log error {logerr:.3g}, "
                f"value log {logv:.3g})",
                LogReal.from_log(sgn, logv), logerr)
        while True:
            negerr, idx = heapq.heappop(heap)
            p = store[idx]
            if p is not None and -negerr == p.logerr:
                break
        store[idx] = None
        mid = (p.lo + p.hi) / 2.0
        for a, b in ((p.lo, mid), (mid, p.hi)):
            child = _eval_panel(flog, a, b)
            evals += 40
            store.append(child)
            heapq.heappush(heap, (-child.logerr, len(store) - 1))


def _split_at(lo, hi, cuts):
    pts = [lo] + sorted(c for c in cuts if lo < c < hi) + [hi]
    return list(zip(pts[:-1], pts[1:]))


def _ysub_pieces(c, R, breaks, span):
    """Windowed pieces in y = c log(R/r) coordinates, one per breakpoint
    interval.  The e^{-y} weight makes each interval's mass sit at its left
    end, so every interval is truncated ``span`` units after its own start
    (the deepest intervals matter when the symbol vanishes near r = R)."""
    ycuts = sorted(c * math.log(R / b) for b in breaks)
    edges = [0.0] + ycuts
    pieces = []
    for i, lo in enumerate(edges):
        hi = edges[i + 1] if i + 1 < len(edges) else lo + span
        pieces.append((lo, min(hi, lo + span)))
    return pieces


# ---------------------------------------------------------------------------
# Moments


def moment_compact(V: RadialSymbol, s: float, R: float, tol: float) -> QuadratureResult:
    """int_0^R V(r) r^s dr as a LogReal with relative error <= tol.

    For large s the integrand mass sits against the right endpoint like r^s;
    the substitution r = R e^{-y/(s+1)} turns the weight into e^{-y} and
    places nodes there.  Indicator breakpoints always become panel edges.
    """
    _check_tol(tol)
    if s < 0:
        raise ValueError(f"s must be >= 0, got {s}")
    if not (0 < R < math.inf):
        raise ValueError(f"R must be finite and positive, got {R}")
    breaks = [b for b in V.breakpoints if 0.0 < b < R]

    if s > 64.0:
        c = s + 1.0
        Y = -math.log(tol) + 35.0
        pieces = _ysub_pieces(c, R, breaks, Y)

        def flog(y):
            r = R * np.exp(-y / c)
            sgn, lg = V.signed_log(r)
            return sgn, lg - y

        val, logerr, evals = _integrate_adaptive(flog, pieces, tol, init_width=8.0)
        pref = c * math.log(R) - math.log(c)
        return QuadratureResult(val.scale_log(pref), logerr + pref, evals)

    pieces = _split_at(0.0, R, breaks)

    def flog(r):
        sgn, lg = V.signed_log(r)
        with np.errstate(divide="ignore"):
            return sgn, lg + s * np.log(r)

    val, logerr, evals = _integrate_adaptive(flog, pieces, tol)
    return QuadratureResult(val, logerr, evals)


def _window_pieces(phi_logs, signs, grid, breaks, tol):
    live = signs != 0
    if not np.any(live):
        return None, -np.inf
    m = float(np.max(phi_logs[live]))
    thresh = m - (-math.log(tol) + 40.0)
    idx = np.where(live & (phi_logs >= thresh))[0]
    lo = grid[max(int(idx[0]) - 1, 0)]
    hi = grid[min(int(idx[-1]) + 1, len(grid) - 1)]
    return _split_at(lo, hi, breaks), m


def moment_gaussian(V: RadialSymbol, s: float, tol: float) -> QuadratureResult:
    """int_0^inf V(r) r^s e^{-r^2} dr as a LogReal, relative error <= tol.

    Nodes are windowed around the sampled peak of the log-integrand (near
    r* = sqrt(s/2) for bounded V); growth that the Gaussian weight fails to
    damp by the configured radius cap raises NonIntegrableError.
    """
    _check_tol(tol)
    if s < 0:
        raise ValueError(f"s must be >= 0, got {s}")
    breaks = list(V.breakpoints)
    rstar = math.sqrt(s / 2.0) if s > 0 else 0.5

    def phi(r):
        sgn, lg = V.signed_log(r)
        with np.errstate(divide="ignore"):
            return sgn, lg + s * np.log(r) - r * r

    cap = min(max(rstar + 8.0, (max(breaks) + 3.0) if breaks else 0.0, 12.0), R_MAX)
    evals = 0
    while True:
        grid = np.unique(np.concatenate([
            np.linspace(1e-9, cap, 481),
            np.asarray([b + d for b in breaks for d in (-1e-9, 1e-9) if 0 < b + d < cap]),
            np.asarray([rstar] if 0 < rstar < cap else []),
        ]))
        sgn, lg = phi(grid)
        evals += len(grid)
        live = sgn != 0
        if not np.any(live):
            return QuadratureResult(LogReal.zero(), -np.inf, evals)
        m = float(np.max(lg[live]))
        tail_hot = live & (grid > cap - 1.0) & (lg > m - (-math.log(tol) + 40.0))
        if not np.any(tail_hot):
            break
        if cap >= R_MAX:
            raise NonIntegrableError(
                f"integrand of gaussian moment of {V.text!r} (s={s:g}) still "
                f"significant at r={R_MAX:g}; growth not damped")
        cap = min(cap + 10.0, R_MAX)

    pieces, _ = _window_pieces(lg, sgn, grid, breaks, tol)
    val, logerr, ev = _integrate_adaptive(phi, pieces, tol, init_width=2.0)
    return QuadratureResult(val, logerr, evals + ev)


def bessel_weighted(V: RadialSymbol, nu: float, weight, tol: float,
                    R: float | None = None) -> QuadratureResult:
    """int V(r) J_nu(r)^2 r w(r) dr with w one of:

    - weight="ball": w = 1 on [0, R] (R required, <= r_max);
    - weight="gaussian": w = e^{-r^2} on [0, inf);
    - weight="plain": w = 1 on [0, ESR(V)] (compact support required;
      certified rapidly-decaying symbols integrate to their negligibility
      radius instead).
    """
    _check_tol(tol)
    if nu < 0:
        raise ValueError(f"nu must be >= 0, got {nu}")
    if weight == "ball":
        if R is None or not (0 < R <= R_MAX):
            raise ValueError(f"ball weight requires R in (0, {R_MAX}]")
        return _bessel_ball(V, nu, R, tol)
    if weight == "plain":
        try:
            b = exact_support_radius(V)
        except SupportUnknownError:
            b = math.inf
        if not math.isfinite(b):
            cls = classify_decay(V)
            if cls.tag not in ("StretchedExp", "RapidDecay"):
                raise ValueError(
                    "plain weight requires a compact-support (or certified "
                    f"rapidly decaying) symbol; {V.text!r} is {cls.tag}")
            grid = np.linspace(1e-6, R_MAX, 512)
            sgn, lg = V.signed_log(grid)
            top = float(np.max(lg[sgn != 0])) if np.any(sgn != 0) else 0.0
            b = tail_truncation_radius(V, top + math.log(tol) - 60.0)
        if b == 0.0:
            return QuadratureResult(LogReal.zero(), -np.inf, 1)
        return _bessel_ball(V, nu, b, tol)
    if weight == "gaussian":
        return _bessel_gaussian(V, nu, tol)
    raise ValueError(f"unknown weight {weight!r}; expected ball, gaussian or plain")


def _bessel_ball(V, nu, R, tol):
    breaks = [b for b in V.breakpoints if 0.0 < b < R]
    seff = 2.0 * nu + 1.0

    if seff > 64.0:
        c = seff + 1.0
        Y = -math.log(tol) + 35.0
        pieces = _ysub_pieces(c, R, breaks, Y)

        def flog(y):
            r = R * np.exp(-y / c)
            sgn, lg = V.signed_log(r)
            js, jl = bessel_j_log_arrays(nu, r)
            with np.errstate(divide="ignore"):
                return sgn * js * js, lg + 2.0 * jl + 2.0 * np.log(r) - math.log(c)

        val, logerr, evals = _integrate_adaptive(flog, pieces, tol, init_width=8.0)
        return QuadratureResult(val, logerr, evals)

    pieces = _split_at(0.0, R, breaks)

    def flog(r):
        sgn, lg = V.signed_log(r)
        js, jl = bessel_j_log_arrays(nu, r)
        with np.errstate(divide="ignore"):
            return sgn * js * js, lg + 2.0 * jl + np.log(r)

    val, logerr, evals = _integrate_adaptive(flog, pieces, tol)
    return QuadratureResult(val, logerr, evals)


def _bessel_gaussian(V, nu, tol):
    breaks = list(V.breakpoints)
    rstar = max(math.sqrt(nu), 0.5)

    def phi(r):
        sgn, lg = V.signed_log(r)
        js, jl = bessel_j_log_arrays(nu, r)
        with np.errstate(divide="ignore"):
            return sgn * js * js, lg + 2.0 * jl + np.log(r) - r * r

    cap = min(max(rstar + 8.0, (max(breaks) + 3.0) if breaks else 0.0, 12.0), R_MAX)
    evals = 0
    while True:
        grid = np.unique(np.concatenate([
            np.linspace(1e-9, cap, 481),
            np.asarray([b + d for b in breaks for d in (-1e-9, 1e-9) if 0 < b + d < cap]),
        ]))
        sgn, lg = phi(grid)
        evals += len(grid)
        live = sgn != 0
        if not np.any(live):
            return QuadratureResult(LogReal.zero(), -np.inf, evals)
        m = float(np.max(lg[live]))
        tail_hot = live & (grid > cap - 1.0) & (lg > m - (-math.log(tol) + 40.0))
        if not np.any(tail_hot):
            break
        if cap >= R_MAX:
            raise NonIntegrableError(
                f"gaussian-weighted Bessel integrand of {V.text!r} still "
                f"significant at r={R_MAX:g}")
        cap = min(cap + 10.0, R_MAX)

    pieces, _ = _window_pieces(lg, sgn, grid, breaks, tol)
    val, logerr, ev = _integrate_adaptive(phi, pieces, tol, init_width=2.0)
    return QuadratureResult(val, logerr, evals + ev)


def bessel_square_ball_log(nu: float, R: float, tol: float = 1e-12) -> LogReal:
    """Direct quadrature of int_0^R J_nu(r)^2 r dr (identity cross-check)."""

    def flog(r):
        js, jl = bessel_j_log_arrays(nu, r)
        with np.errstate(divide="ignore"):
            return js * js, 2.0 * jl + np.log(r)

    val, _err, _ev = _integrate_adaptive(flog, _split_at(0.0, R, []), tol)
    return val


# ---------------------------------------------------------------------------
# Oscillatory moments (the cancelation counterexample integrals)


def _chunk0(k, p, q, take_abs, n=64):
    """int_0^pi t^{(k+1)/q - 1} e^{-t^{p/q}} sin t dt via t = v^q.

    The substitution clears every fractional power: the integrand becomes
    q v^k e^{-v^p} sin(v^q), smooth on [0, pi^{1/q}], so plain Gauss-Legendre
    is spectrally accurate even near t = 0 where t^{a-1} blows up.
    """
    x, w = _gl(n)
    vmax = math.pi ** (1.0 / q)
    v = (x + 1.0) * (vmax / 2.0)
    g = q * v ** float(k) * np.exp(-v ** p) * np.sin(v ** q)
    if take_abs:
        g = np.abs(g)
    return float(np.dot(w, g)) * (vmax / 2.0)


def _envelope_window(a, pq, tol):
    """Segment range [j_lo, j_hi] where t^{a-1} e^{-t^pq} matters."""
    drop = -math.log(tol) + 40.0
    if a > 1.0:
        tpeak = ((a - 1.0) / pq) ** (1.0 / pq)
        env_peak = (a - 1.0) * math.log(tpeak) - tpeak ** pq
    else:
        tpeak, env_peak = 1.0, 0.0

    def env(t):
        return (a - 1.0) * math.log(t) - t ** pq

    j_hi = max(int(tpeak / math.pi) + 2, 3)
    while env(j_hi * math.pi) > env_peak - drop:
        j_hi = int(j_hi * 1.25) + 8
        if j_hi > 50_000_000:
            raise ToleranceNotMetError("oscillatory envelope window too wide",
                                       LogReal.zero(), math.inf)
    j_lo = 1
    if a > 1.0:
        while j_lo + 1 < tpeak / math.pi and env((j_lo + 1) * math.pi) < env_peak - drop:
            j_lo += 1
    return j_lo, j_hi, env_peak


def oscillatory_moment(p: float, q: float, k: int, tol: float,
                       method: str = "auto") -> QuadratureResult:
    """I(k) = int_0^inf e^{-r^{2p}} sin(r^{2q}) r^{2k+1} dr as a signed LogReal.

    After t = r^{2q} this is (2q)^{-1} int_0^inf t^{(k+1)/q - 1} e^{-t^{p/q}}
    sin t dt.  Between-zeros summation with iterated-averaging acceleration is
    used while double precision can absorb the cancellation; past that budget
    the integration path is rotated to the positive imaginary axis, where the
    integrand decays like e^{-tau} with only O(1) phase variation.  A bound
    check |I(k)| <= Gamma((k+1)/q)/(2q) comes for free from the rotated form.
    """
    _check_tol(tol)
    if not (p > 1 and q > p):
        raise ValueError(f"need q > p > 1, got p={p}, q={q}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    a = (k + 1.0) / q
    pq = p / q
    if method not in ("auto", "segments", "rotated"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        _jl, _jh, env_peak = _envelope_window(a, pq, tol)
        cancel = env_peak + math.log(math.pi) - (gammaln(a) - math.log(2 * q))
        if _EPS * math.exp(min(cancel, 700.0)) < tol / 10.0:
            try:
                return _osc_segments(k, p, q, tol, take_abs=False)
            except ToleranceNotMetError:
                pass
        return _osc_rotated(k, p, q, tol)
    if method == "segments":
        return _osc_segments(k, p, q, tol, take_abs=False)
    return _osc_rotated(k, p, q, tol)


def abs_oscillatory_moment(p: float, q: float, k: int, tol: float) -> QuadratureResult:
    """Same weight with |sin|: int_0^inf e^{-r^{2p}} |sin(r^{2q})| r^{2k+1} dr.

    Positive between-zeros sums, so no cancellation budget applies; this is
    the production route for Lambda_k(|V_pq|) in the cancelation experiment.
    """
    _check_tol(tol)
    if not (p > 1 and q > p):
        raise ValueError(f"need q > p > 1, got p={p}, q={q}")
    return _osc_segments(k, p, q, tol, take_abs=True)


def _osc_segments(k, p, q, tol, take_abs):
    a = (k + 1.0) / q
    pq = p / q
    j_lo, j_hi, env_peak = _envelope_window(a, pq, tol)
    x, w = _gl(24)
    kern = backend.kernels()
    drop = -math.log(tol) + 40.0
    include0 = a <= 1.5 or (a - 1.0) * math.log(math.pi) - math.pi ** pq > env_peak - drop
    c0 = _chunk0(k, p, q, take_abs) if include0 else 0.0
    n_seg = j_hi - j_lo + 1
    chunks = np.empty(n_seg)
    evals = 64 if include0 else 0
    pos = 0
    batch = 200_000
    while pos < n_seg:
        nb = min(batch, n_seg - pos)
        chunks[pos:pos + nb] = kern.osc_segment_sums(
            a, pq, j_lo + pos, nb, x, w, env_peak, 1 if take_abs else 0)
        evals += nb * 24
        pos += nb

    peak_mag = float(np.max(np.abs(chunks))) if n_seg else 0.0
    abs_sum = float(np.sum(np.abs(chunks)))
    if take_abs:
        total_scaled = float(np.sum(chunks))
        accel_err_scaled = 0.0
    else:
        # iterated averaging (Euler-type) of the alternating partial sums
        partial = np.cumsum(chunks)
        t = partial[-min(len(partial), 33):].copy()
        last_diff = abs(float(t[-1] - t[-2])) if len(t) > 1 else 0.0
        while len(t) > 1 and abs(t[-1] - t[-2]) > 1e-18 * max(abs(t[-1]), peak_mag):
            t = 0.5 * (t[:-1] + t[1:])
            last_diff = abs(float(t[-1] - t[-2])) if len(t) > 1 else last_diff
        total_scaled = float(t[-1])
        accel_err_scaled = last_diff

    # tail beyond the cutoff: envelope value there times a width factor
    t_hi = (j_hi + 1) * math.pi
    trunc_log = (a - 1.0) * math.log(t_hi) - t_hi ** pq + math.log(t_hi) + 3.0
    round_scaled = _EPS * (abs_sum + peak_mag) * 2.0

    parts_sign = [int(np.sign(c0)), int(np.sign(total_scaled))]
    parts_log = [math.log(abs(c0)) if c0 else -np.inf,
                 env_peak + math.log(abs(total_scaled)) if total_scaled else -np.inf]
    sgn, logv = logsumexp_signed(parts_sign, parts_log)
    err_lin_log = env_peak + math.log(max(round_scaled + accel_err_scaled, 1e-300))
    logerr = float(np.logaddexp(err_lin_log, trunc_log))

    pref = -math.log(2.0 * q)
    value = LogReal.from_log(sgn, logv + pref if sgn else -math.inf)
    logerr = logerr + pref
    res = QuadratureResult(value, logerr, evals)
    if not res.meets(tol * 1.001):
        raise ToleranceNotMetError(
            f"between-zeros acceleration stalled (cancellation beyond double "
            f"precision); best log|I|={logv + pref:.4g}, log err={logerr:.4g}",
            value, logerr)
    return res


def _osc_rotated(k, p, q, tol):
    """Rotate the path to t = i tau: I = (2q)^{-1} Im[e^{i pi a/2} J] with

        J = int_0^inf tau^{a-1} e^{-tau} e^{-w tau^{p/q}} dtau,
        w = e^{i pi p/(2q)} = ctheta + i stheta,

    so e^{-w tau^{p/q}} = e^{-ctheta tau^{p/q}} [cos(stheta tau^{p/q})
    - i sin(stheta tau^{p/q})].  The rotated integrand decays like e^{-tau}
    with O(1) phase variation over the Gamma-type peak, so no cancellation
    budget applies; this is the production route for large k.  The first unit
    of the tau axis is mapped through tau = v^q, clearing all fractional
    powers at the origin.
    """
    a = (k + 1.0) / q
    pq = p / q
    ctheta = math.cos(math.pi * pq / 2.0)
    stheta = math.sin(math.pi * pq / 2.0)
    peak = max(a - 1.0, 0.1)
    hi = peak + 40.0 * math.sqrt(max(a, 1.0)) + 40.0

    def flog_tail(trig):
        def flog(tau):
            with np.errstate(divide="ignore"):
                base = (a - 1.0) * np.log(tau) - tau - ctheta * tau ** pq
            osc = trig(stheta * tau ** pq)
            with np.errstate(divide="ignore"):
                return np.sign(osc), base + np.where(osc == 0.0, -np.inf, np.log(np.abs(osc)))
        return flog

    def flog_first(trig):
        def flog(v):
            with np.errstate(divide="ignore"):
                base = k * np.log(v) - v ** q - ctheta * v ** p + math.log(q)
            osc = trig(stheta * v ** p)
            with np.errstate(divide="ignore"):
                return np.sign(osc), base + np.where(osc == 0.0, -np.inf, np.log(np.abs(osc)))
        return flog

    def compute(engine_tol):
        evals = 0
        parts = []
        for trig in (np.cos, np.sin):
            v0, e0, n0 = _integrate_adaptive(flog_first(trig), [(0.0, 1.0)], engine_tol)
            v1, e1, n1 = _integrate_adaptive(flog_tail(trig), _split_at(1.0, hi, [peak]),
                                             engine_tol, init_width=max(2.0, math.sqrt(max(a, 1.0))))
            parts.append((v0 + v1, np.logaddexp(e0, e1)))
            evals += n0 + n1
        (re_j, re_err), (im_j, im_err) = parts
        im_j = -im_j  # Im of e^{-i stheta tau^pq} carries the minus sign
        # Im[e^{i pi a/2} (re + i im)] = sin(pi a/2) re + cos(pi a/2) im
        ca, sa = math.cos(math.pi * a / 2.0), math.sin(math.pi * a / 2.0)
        term1 = re_j.scale_log(math.log(abs(sa))) if sa != 0 else LogReal.zero()
        term1 = term1 if sa >= 0 else -term1
        term2 = im_j.scale_log(math.log(abs(ca))) if ca != 0 else LogReal.zero()
        term2 = term2 if ca >= 0 else -term2
        val = term1 + term2
        err = float(np.logaddexp(re_err, im_err))
        return val, err, evals

    engine_tol = max(tol / 4.0, 2e-14)
    val, err, evals = compute(engine_tol)
    if not val.is_zero() and err > val.log_abs + math.log(tol):
        # the Im combination cancelled; retighten relative to the small result
        gap = err - (val.log_abs + math.log(tol))
        engine_tol = max(engine_tol * math.exp(-gap - 1.0), 2e-14)
        val, err, evals2 = compute(engine_tol)
        evals += evals2
    pref = -math.log(2.0 * q)
    res = QuadratureResult(val.scale_log(pref) if not val.is_zero() else val,
                           err + pref, evals)
    if not res.meets(tol * 1.001):
        raise ToleranceNotMetError(
            f"rotated-path evaluation cannot reach tol={tol:g} "
            f"(value log {res.value.log_abs:.4g}, err log {res.abs_error_estimate:.4g})",
            res.value, res.abs_error_estimate)
    return res
