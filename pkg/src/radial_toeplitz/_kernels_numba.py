"""Numba-jitted twins of the kernels in ``_kernels_numpy``.

Same contracts, element-at-a-time loops.  Import of this module is guarded
by ``backend``; anything importable here must match the numpy semantics
bit-for-bit at the level the tests compare (1 ulp-ish).
"""

import math

import numpy as np
from numba import njit

from ._ops import (
    OP_NUM, OP_R, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POW, OP_NEG,
    OP_EXP, OP_SIN, OP_COS, OP_CHI, OP_ABS, OP_POS, LINEAR_EXP_CAP,
)

NAME = "numba"


@njit(cache=True)
def _add_signed_scalar(s1, l1, s2, l2):
    if s1 == 0.0:
        return s2, l2
    if s2 == 0.0:
        return s1, l1
    if l1 >= l2:
        m, v = l1, s1 + s2 * math.exp(l2 - l1)
    else:
        m, v = l2, s2 + s1 * math.exp(l1 - l2)
    if v == 0.0:
        return 0.0, -np.inf
    if v > 0.0:
        return 1.0, m + math.log(v)
    return -1.0, m + math.log(-v)


@njit(cache=True)
def eval_program(ops, arg1, arg2, r, nstack):
    n = r.shape[0]
    out_s = np.empty(n)
    out_l = np.empty(n)
    nops = ops.shape[0]
    for e in range(n):
        rv = r[e]
        st_s = np.empty(nstack)
        st_l = np.empty(nstack)
        top = -1
        for i in range(nops):
            op = ops[i]
            if op == OP_NUM:
                top += 1
                v = arg1[i]
                if v == 0.0:
                    st_s[top], st_l[top] = 0.0, -np.inf
                elif v > 0.0:
                    st_s[top], st_l[top] = 1.0, math.log(v)
                else:
                    st_s[top], st_l[top] = -1.0, math.log(-v)
            elif op == OP_R:
                top += 1
                if rv == 0.0:
                    st_s[top], st_l[top] = 0.0, -np.inf
                else:
                    st_s[top], st_l[top] = 1.0, math.log(rv)
            elif op == OP_CHI:
                top += 1
                if arg1[i] <= rv <= arg2[i]:
                    st_s[top], st_l[top] = 1.0, 0.0
                else:
                    st_s[top], st_l[top] = 0.0, -np.inf
            elif op == OP_ADD or op == OP_SUB:
                s2, l2 = st_s[top], st_l[top]
                top -= 1
                if op == OP_SUB:
                    s2 = -s2
                st_s[top], st_l[top] = _add_signed_scalar(st_s[top], st_l[top], s2, l2)
            elif op == OP_MUL:
                s2, l2 = st_s[top], st_l[top]
                top -= 1
                s = st_s[top] * s2
                if s == 0.0:
                    st_s[top], st_l[top] = 0.0, -np.inf
                else:
                    st_s[top], st_l[top] = s, st_l[top] + l2
            elif op == OP_DIV:
                s2, l2 = st_s[top], st_l[top]
                top -= 1
                if s2 == 0.0:
                    if st_s[top] == 0.0:
                        st_s[top], st_l[top] = 0.0, -np.inf
                    else:
                        st_l[top] = np.inf
                else:
                    s = st_s[top] * s2
                    if s == 0.0:
                        st_s[top], st_l[top] = 0.0, -np.inf
                    else:
                        st_s[top], st_l[top] = s, st_l[top] - l2
            elif op == OP_POW:
                c = arg1[i]
                s, l = st_s[top], st_l[top]
                if c == 0.0:
                    st_s[top], st_l[top] = 1.0, 0.0
                elif s == 0.0:
                    if c > 0.0:
                        st_s[top], st_l[top] = 0.0, -np.inf
                    else:
                        st_s[top], st_l[top] = 0.0, np.inf
                else:
                    if c == round(c):
                        if int(round(c)) % 2 == 0:
                            st_s[top] = 1.0
                        # odd integer keeps sign
                    elif s < 0.0:
                        st_s[top] = np.nan
                    st_l[top] = l * c
            elif op == OP_NEG:
                st_s[top] = -st_s[top]
            elif op == OP_ABS:
                st_s[top] = abs(st_s[top])
            elif op == OP_POS:
                if st_s[top] <= 0.0:
                    st_s[top], st_l[top] = 0.0, -np.inf
            elif op == OP_EXP:
                x = st_s[top] * math.exp(min(st_l[top], LINEAR_EXP_CAP))
                if x == -np.inf:
                    st_s[top], st_l[top] = 0.0, -np.inf
                else:
                    st_s[top], st_l[top] = 1.0, x
            elif op == OP_SIN or op == OP_COS:
                x = st_s[top] * math.exp(min(st_l[top], LINEAR_EXP_CAP))
                v = math.sin(x) if op == OP_SIN else math.cos(x)
                if v == 0.0:
                    st_s[top], st_l[top] = 0.0, -np.inf
                elif v > 0.0:
                    st_s[top], st_l[top] = 1.0, math.log(v)
                else:
                    st_s[top], st_l[top] = -1.0, math.log(-v)
        out_s[e] = st_s[0]
        out_l[e] = st_l[0]
    return out_s, out_l


@njit(cache=True)
def bessel_j_tail(nu, x):
    n = x.shape[0]
    tail = np.empty(n)
    peak = np.empty(n)
    for e in range(n):
        q = x[e] * x[e] / 4.0
        t = 1.0
        s = 1.0
        pk = 1.0
        for m in range(1, 400):
            t = t * (-q) / (m * (nu + m))
            s += t
            at = abs(t)
            if at > pk:
                pk = at
            if at <= 1e-17 * (abs(s) + 1e-300):
                break
        tail[e] = s
        peak[e] = pk
    return tail, peak


@njit(cache=True)
def bessel_i_tail(nu, x):
    n = x.shape[0]
    tail = np.empty(n)
    for e in range(n):
        q = x[e] * x[e] / 4.0
        t = 1.0
        s = 1.0
        for m in range(1, 400):
            t = t * q / (m * (nu + m))
            s += t
            if t <= 1e-17 * s:
                break
        tail[e] = s
    return tail


@njit(cache=True)
def osc_segment_sums(a, pq, j_start, n_seg, xg, wg, scale_log, take_abs):
    out = np.empty(n_seg)
    ng = xg.shape[0]
    half = np.pi / 2.0
    for jj in range(n_seg):
        j = j_start + jj
        lo = j * np.pi
        acc = 0.0
        for g in range(ng):
            u = (xg[g] + 1.0) * half
            t = lo + u
            env = (a - 1.0) * math.log(t) - t ** pq - scale_log
            s = math.sin(u)
            acc += wg[g] * math.exp(env) * s
        if (not take_abs) and (j % 2 == 1):
            acc = -acc
        out[jj] = acc * half
    return out
