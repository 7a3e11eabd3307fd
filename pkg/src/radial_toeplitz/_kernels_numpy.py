"""Pure-numpy implementations of the hot kernels.

Reference semantics for the numba twins in ``_kernels_numba``; selected at
runtime via RADIAL_TOEPLITZ_BACKEND=numpy (see ``backend``).
"""

import numpy as np

from ._ops import (
    OP_NUM, OP_R, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POW, OP_NEG,
    OP_EXP, OP_SIN, OP_COS, OP_CHI, OP_ABS, OP_POS, LINEAR_EXP_CAP,
)

NAME = "numpy"


def _signed_log(v):
    sign = np.sign(v)
    with np.errstate(divide="ignore"):
        logabs = np.where(v == 0.0, -np.inf, np.log(np.abs(v)))
    return sign, logabs


def _restore_linear(s, l):
    return s * np.exp(np.minimum(l, LINEAR_EXP_CAP))


def _add_signed(s1, l1, s2, l2):
    m = np.maximum(l1, l2)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    v = s1 * np.exp(l1 - m_safe) + s2 * np.exp(l2 - m_safe)
    sign = np.sign(v)
    with np.errstate(divide="ignore"):
        logabs = np.where(v == 0.0, -np.inf, m_safe + np.log(np.abs(v)))
    logabs = np.where(m == -np.inf, -np.inf, logabs)
    sign = np.where(m == -np.inf, 0.0, sign)
    return sign, logabs


def eval_program(ops, arg1, arg2, r, nstack):
    """Run a compiled symbol program over radii ``r``.

    Returns (sign, log_abs) float64 arrays of V(r) in the signed-log domain.
    """
    n = r.shape[0]
    sgn = np.empty((nstack, n))
    lga = np.empty((nstack, n))
    top = -1
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for i in range(ops.shape[0]):
            op = ops[i]
            if op == OP_NUM:
                top += 1
                s, l = _signed_log(np.full(n, arg1[i]))
                sgn[top], lga[top] = s, l
            elif op == OP_R:
                top += 1
                s, l = _signed_log(r)
                sgn[top], lga[top] = s, l
            elif op == OP_CHI:
                top += 1
                inside = (r >= arg1[i]) & (r <= arg2[i])
                sgn[top] = np.where(inside, 1.0, 0.0)
                lga[top] = np.where(inside, 0.0, -np.inf)
            elif op == OP_ADD or op == OP_SUB:
                s2, l2 = sgn[top], lga[top]
                top -= 1
                if op == OP_SUB:
                    s2 = -s2
                sgn[top], lga[top] = _add_signed(sgn[top], lga[top], s2, l2)
            elif op == OP_MUL:
                s2, l2 = sgn[top], lga[top]
                top -= 1
                sgn[top] = sgn[top] * s2
                lga[top] = np.where(sgn[top] == 0.0, -np.inf, lga[top] + l2)
            elif op == OP_DIV:
                s2, l2 = sgn[top], lga[top]
                top -= 1
                s = sgn[top] * s2
                l = lga[top] - l2
                zero_den = s2 == 0.0
                sgn[top] = np.where(zero_den, np.sign(sgn[top]) * 1.0, s)
                lga[top] = np.where(zero_den,
                                    np.where(sgn[top] == 0.0, -np.inf, np.inf),
                                    np.where(s == 0.0, -np.inf, l))
            elif op == OP_POW:
                c = arg1[i]
                s, l = sgn[top], lga[top]
                if c == 0.0:
                    sgn[top] = np.ones(n)
                    lga[top] = np.zeros(n)
                else:
                    c_int = c == np.round(c)
                    if c_int and int(round(c)) % 2 == 0:
                        new_s = np.where(s == 0.0, 0.0, 1.0)
                    elif c_int:
                        new_s = s
                    else:
                        # non-integer power of a negative base is undefined
                        new_s = np.where(s < 0.0, np.nan, s)
                    sgn[top] = new_s
                    lga[top] = np.where(s == 0.0, -np.inf if c > 0 else np.inf, l * c)
            elif op == OP_NEG:
                sgn[top] = -sgn[top]
            elif op == OP_ABS:
                sgn[top] = np.abs(sgn[top])
            elif op == OP_POS:
                keep = sgn[top] > 0.0
                sgn[top] = np.where(keep, sgn[top], 0.0)
                lga[top] = np.where(keep, lga[top], -np.inf)
            elif op == OP_EXP:
                x = _restore_linear(sgn[top], lga[top])
                sgn[top] = np.where(x == -np.inf, 0.0, 1.0)
                lga[top] = x
            elif op == OP_SIN or op == OP_COS:
                x = _restore_linear(sgn[top], lga[top])
                v = np.sin(x) if op == OP_SIN else np.cos(x)
                sgn[top], lga[top] = _signed_log(v)
    return sgn[0].copy(), lga[0].copy()


def bessel_j_tail(nu, x):
    """Normalized tail of the factored J series at each x.

    Sums sum_m (-1)^m (x^2/4)^m / (m! (nu+1)...(nu+m)); returns (tail,
    max_term) where max_term tracks the worst intermediate magnitude for
    cancellation accounting.
    """
    n = x.shape[0]
    tail = np.ones(n)
    term = np.ones(n)
    peak = np.ones(n)
    q = x * x / 4.0
    for m in range(1, 400):
        term = term * (-q) / (m * (nu + m))
        tail += term
        np.maximum(peak, np.abs(term), out=peak)
        if np.all(np.abs(term) <= 1e-17 * (np.abs(tail) + 1e-300)):
            break
    return tail, peak


def bessel_i_tail(nu, x):
    """All-positive tail sum_m (x^2/4)^m / (m! (nu+1)...(nu+m))."""
    n = x.shape[0]
    tail = np.ones(n)
    term = np.ones(n)
    q = x * x / 4.0
    for m in range(1, 400):
        term = term * q / (m * (nu + m))
        tail += term
        if np.all(term <= 1e-17 * tail):
            break
    return tail


def osc_segment_sums(a, pq, j_start, n_seg, xg, wg, scale_log, take_abs):
    """Gauss-Legendre integrals of t^(a-1) e^(-t^pq) sin(t) between zeros.

    Segment j covers [(j_start+j) pi, (j_start+j+1) pi]; sin is reduced
    exactly via the segment parity.  Results are scaled by exp(-scale_log).
    """
    j = j_start + np.arange(n_seg)
    lo = j * np.pi
    u = (xg[None, :] + 1.0) * (np.pi / 2.0)          # u in (0, pi)
    t = lo[:, None] + u
    with np.errstate(divide="ignore"):
        env = (a - 1.0) * np.log(t) - t ** pq - scale_log
    s = np.sin(u)
    if not take_abs:
        parity = np.where(j % 2 == 0, 1.0, -1.0)
        s = s * parity[:, None]
    vals = np.exp(env) * s
    return (vals @ wg) * (np.pi / 2.0)
