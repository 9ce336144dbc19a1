# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Same algorithms as pykernels (that module is the readable reference),
restated in C: scalar special functions, the nested-rule adaptive
integrator specialized to the two pipeline integrands, the Newton fit,
and a window sweep that releases the GIL so row blocks parallelize.
"""

from libc.math cimport INFINITY, NAN, exp, fabs, fmax, hypot, isfinite, isnan, log
from libc.stdlib cimport free, malloc

import numpy as np

NAME = "compiled"

cdef enum:
    C_OK = 0
    C_CAP = 1
    C_FAILED = 2

# Fit outcome codes shared with the pure-Python backend.
CODE_OK = C_OK
CODE_CAP = C_CAP
CODE_FAILED = C_FAILED

cdef double ASYM_MIN = 6.0
cdef double LN_SQRT_2PI = 0.9189385332046727417803297364056176


cdef double c_digamma(double x) noexcept nogil:
    cdef double shift = 0.0
    cdef double w, s
    while x < ASYM_MIN:
        shift += 1.0 / x
        x += 1.0
    w = 1.0 / (x * x)
    s = 691.0 / 32760.0 - w / 12.0
    s = 1.0 / 132.0 - w * s
    s = 1.0 / 240.0 - w * s
    s = 1.0 / 252.0 - w * s
    s = 1.0 / 120.0 - w * s
    s = 1.0 / 12.0 - w * s
    return log(x) - 0.5 / x - w * s - shift


cdef double c_ln_gamma(double x) noexcept nogil:
    cdef double shift = 0.0
    cdef double w, s
    while x < ASYM_MIN:
        shift += log(x)
        x += 1.0
    w = 1.0 / (x * x)
    s = 1.0 / 156.0 - w * 3617.0 / 122400.0
    s = 691.0 / 360360.0 - w * s
    s = 1.0 / 1188.0 - w * s
    s = 1.0 / 1680.0 - w * s
    s = 1.0 / 1260.0 - w * s
    s = 1.0 / 360.0 - w * s
    s = 1.0 / 12.0 - w * s
    return (x - 0.5) * log(x) - x + LN_SQRT_2PI + s / x - shift


def digamma(x):
    """psi(x) for x > 0, scalar or array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and not (np.all(np.isfinite(arr)) and np.all(arr > 0.0)):
        raise ValueError("digamma requires finite x > 0")
    scalar = arr.ndim == 0
    flat = np.ascontiguousarray(arr).reshape(-1)
    out = np.empty(flat.shape[0], dtype=np.float64)
    cdef double[::1] src = flat
    cdef double[::1] dst = out
    cdef Py_ssize_t i, n = src.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = c_digamma(src[i])
    return float(out[0]) if scalar else out.reshape(arr.shape)


def ln_gamma(x):
    """ln Gamma(x) for x > 0, scalar or array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and not (np.all(np.isfinite(arr)) and np.all(arr > 0.0)):
        raise ValueError("ln_gamma requires finite x > 0")
    scalar = arr.ndim == 0
    flat = np.ascontiguousarray(arr).reshape(-1)
    out = np.empty(flat.shape[0], dtype=np.float64)
    cdef double[::1] src = flat
    cdef double[::1] dst = out
    cdef Py_ssize_t i, n = src.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = c_ln_gamma(src[i])
    return float(out[0]) if scalar else out.reshape(arr.shape)


# Gauss-7/Kronrod-15 pair, nonnegative half; mirrored at module init.
cdef double[8] XGK
cdef double[8] WGK
cdef double[4] WG
cdef double[15] NODES15
cdef double[15] WK15
cdef double[15] WG15

XGK[0] = 0.991455371120812639206854697526329
XGK[1] = 0.949107912342758524526189684047851
XGK[2] = 0.864864423359769072789712788640926
XGK[3] = 0.741531185599394439863864773280788
XGK[4] = 0.586087235467691130294144838258730
XGK[5] = 0.405845151377397166906606412076961
XGK[6] = 0.207784955007898467600689403773245
XGK[7] = 0.0
WGK[0] = 0.022935322010529224963732008058970
WGK[1] = 0.063092092629978553290700663189204
WGK[2] = 0.104790010322250183839876322541518
WGK[3] = 0.140653259715525918745189590510238
WGK[4] = 0.169004726639267902826583426598550
WGK[5] = 0.190350578064785409913256402421014
WGK[6] = 0.204432940075298892414161999234649
WGK[7] = 0.209482141084727828012999174891714
WG[0] = 0.129484966168869693270611432679082
WG[1] = 0.279705391489276667901467771423780
WG[2] = 0.381830050505118944950369775488975
WG[3] = 0.417959183673469387755102040816327


def _init_rule():
    cdef int i
    for i in range(7):
        NODES15[i] = -XGK[i]
        NODES15[14 - i] = XGK[i]
        WK15[i] = WGK[i]
        WK15[14 - i] = WGK[i]
        WG15[i] = 0.0
        WG15[14 - i] = 0.0
    NODES15[7] = 0.0
    WK15[7] = WGK[7]
    for i in range(3):
        WG15[2 * i + 1] = WG[i]
        WG15[13 - 2 * i] = WG[i]
    WG15[7] = WG[3]


_init_rule()


cdef enum:
    KIND_ENTROPY = 0
    KIND_AFFINITY = 1


cdef struct IntegrandParams:
    double lcp       # log-normalizer of the heavy-tailed law
    double lcq       # log-normalizer of the Gamma law
    double alpha
    double gamma
    double looks
    double rate      # looks / sigma2 of the Gamma law
    double hint


cdef double eval_integrand(int kind, IntegrandParams* p, double t) noexcept nogil:
    cdef double om = 1.0 - t
    cdef double z = p.hint * t / om
    cdef double w = p.hint / (om * om)
    cdef double lz = log(z)
    cdef double lp = (
        p.lcp + (p.looks - 1.0) * lz + (p.alpha - p.looks) * log(p.gamma + p.looks * z)
    )
    cdef double lq
    if kind == KIND_ENTROPY:
        if lp > -740.0:
            return -exp(lp) * lp * w
        return 0.0
    lq = p.lcq + (p.looks - 1.0) * lz - p.rate * z
    return exp(0.5 * (lp + lq)) * w


cdef void gk_panel(
    int kind, IntegrandParams* p, double lo, double hi, double* val, double* err
) noexcept nogil:
    cdef double c = 0.5 * (lo + hi)
    cdef double h = 0.5 * (hi - lo)
    cdef double ik = 0.0
    cdef double ig = 0.0
    cdef double y
    cdef int i
    for i in range(15):
        y = eval_integrand(kind, p, c + h * NODES15[i])
        ik += WK15[i] * y
        ig += WG15[i] * y
    val[0] = h * ik
    err[0] = fabs(h * (ik - ig))


cdef int c_adaptive(
    int kind,
    IntegrandParams* p,
    double rel_tol,
    double abs_tol,
    int max_subdiv,
    double* out_val,
    double* out_err,
) noexcept nogil:
    """Bisect the worst panel of (0, 1); panels summed in creation order
    exactly like the reference implementation.  Returns 1 on convergence."""
    cdef double* lo = <double*> malloc(4 * max_subdiv * sizeof(double))
    if lo == NULL:
        out_val[0] = NAN
        out_err[0] = INFINITY
        return 0
    cdef double* hi = lo + max_subdiv
    cdef double* val = lo + 2 * max_subdiv
    cdef double* err = lo + 3 * max_subdiv
    cdef int n = 1
    cdef int i, worst, ok
    cdef double total, errsum, mid, emax
    lo[0] = 0.0
    hi[0] = 1.0
    gk_panel(kind, p, 0.0, 1.0, &val[0], &err[0])
    ok = 0
    while True:
        total = 0.0
        errsum = 0.0
        for i in range(n):
            total += val[i]
            errsum += err[i]
        if isnan(total):
            errsum = INFINITY
            break
        if errsum <= fmax(rel_tol * fabs(total), abs_tol):
            ok = 1
            break
        if n >= max_subdiv:
            break
        worst = 0
        emax = err[0]
        for i in range(1, n):
            if err[i] > emax:
                emax = err[i]
                worst = i
        mid = 0.5 * (lo[worst] + hi[worst])
        lo[n] = mid
        hi[n] = hi[worst]
        gk_panel(kind, p, mid, hi[worst], &val[n], &err[n])
        hi[worst] = mid
        gk_panel(kind, p, lo[worst], mid, &val[worst], &err[worst])
        n += 1
    out_val[0] = total
    out_err[0] = errsum
    free(lo)
    return ok


cdef double g0_logconst(double alpha, double gamma, double looks) noexcept nogil:
    return (
        looks * log(looks)
        + c_ln_gamma(looks - alpha)
        - alpha * log(gamma)
        - c_ln_gamma(-alpha)
        - c_ln_gamma(looks)
    )


cdef int c_g0_entropy(
    double alpha, double gamma, double looks, double hint,
    double rel_tol, double abs_tol, int max_subdiv,
    double* out_val, double* out_err,
) noexcept nogil:
    cdef IntegrandParams p
    p.lcp = g0_logconst(alpha, gamma, looks)
    p.lcq = 0.0
    p.alpha = alpha
    p.gamma = gamma
    p.looks = looks
    p.rate = 0.0
    p.hint = hint
    return c_adaptive(KIND_ENTROPY, &p, rel_tol, abs_tol, max_subdiv, out_val, out_err)


cdef int c_hellinger(
    double alpha, double gamma, double looks, double sigma2, double hint,
    double rel_tol, double abs_tol, int max_subdiv,
    double* out_val, double* out_err,
) noexcept nogil:
    """out_val receives the raw distance 1 - affinity."""
    cdef IntegrandParams p
    cdef int ok
    p.lcp = g0_logconst(alpha, gamma, looks)
    p.lcq = looks * log(looks / sigma2) - c_ln_gamma(looks)
    p.alpha = alpha
    p.gamma = gamma
    p.looks = looks
    p.rate = looks / sigma2
    p.hint = hint
    ok = c_adaptive(KIND_AFFINITY, &p, rel_tol, abs_tol, max_subdiv, out_val, out_err)
    out_val[0] = 1.0 - out_val[0]
    return ok


def g0_entropy(double alpha, double gamma, double looks, double hint,
               double rel_tol, double abs_tol, int max_subdiv):
    """Differential entropy of the heavy-tailed law; (value, error, converged)."""
    cdef double val, err
    cdef int ok
    with nogil:
        ok = c_g0_entropy(alpha, gamma, looks, hint, rel_tol, abs_tol,
                          max_subdiv, &val, &err)
    return val, err, bool(ok)


def hellinger_g0_gamma(double alpha, double gamma, double looks, double sigma2,
                       double hint, double rel_tol, double abs_tol, int max_subdiv):
    """Raw (unclamped) Hellinger distance to the Gamma law; (value, error, converged)."""
    cdef double val, err
    cdef int ok
    with nogil:
        ok = c_hellinger(alpha, gamma, looks, sigma2, hint, rel_tol, abs_tol,
                         max_subdiv, &val, &err)
    return val, err, bool(ok)


cdef void c_score_log(
    double a, double g, const double* z, Py_ssize_t n, double looks,
    double* r1, double* r2,
) noexcept nogil:
    cdef double alpha = -exp(a)
    cdef double gam = exp(g)
    cdef double s_log = 0.0
    cdef double s_inv = 0.0
    cdef double gl
    cdef Py_ssize_t i
    for i in range(n):
        gl = gam + looks * z[i]
        s_log += log(gl)
        s_inv += 1.0 / gl
    r1[0] = c_digamma(-alpha) - c_digamma(looks - alpha) - log(gam) + s_log / n
    r2[0] = -alpha / gam + (alpha - looks) * s_inv / n


cdef int c_fit_g0(
    const double* z, Py_ssize_t n, double looks,
    double tol, int max_iter, double cap, double step_max,
    double* out_alpha, double* out_gamma, int* out_conv, int* out_iters,
    double* out_rnorm,
) noexcept nogil:
    cdef double m1 = 0.0
    cdef double m2 = 0.0
    cdef double pos_min = INFINITY
    cdef double pos_max = -INFINITY
    cdef Py_ssize_t i, npos = 0
    cdef double v
    for i in range(n):
        v = z[i]
        m1 += v
        m2 += v * v
        if v > 0.0:
            npos += 1
            if v < pos_min:
                pos_min = v
            if v > pos_max:
                pos_max = v
    m1 /= n
    m2 /= n
    out_conv[0] = 0
    out_iters[0] = 0
    if npos < 2 or pos_min == pos_max:
        out_alpha[0] = NAN
        out_gamma[0] = NAN
        out_rnorm[0] = INFINITY
        return C_FAILED

    cdef double ratio = m2 / (m1 * m1) * looks / (looks + 1.0)
    cdef double a0 = 0.0
    if ratio > 1.0:
        a0 = (1.0 - 2.0 * ratio) / (ratio - 1.0)
    if not a0 < -2.2:
        a0 = -3.0
    if a0 < -45.0:
        a0 = -45.0
    cdef double g0 = -m1 * (a0 + 1.0)

    cdef double a = log(-a0)
    cdef double g = log(g0)
    cdef double r1, r2, ninf
    cdef double h = 1e-6
    cdef double p1, p2, q1, q2, j00, j01, j10, j11, det, da, dg, big
    cdef double n0, lam, at, gt, t1, t2, nt
    cdef int steps = 0
    cdef int it, accepted
    cdef double s1, s2
    c_score_log(a, g, z, n, looks, &r1, &r2)
    ninf = fmax(fabs(r1), fabs(r2))
    for it in range(max_iter):
        if ninf <= tol:
            out_alpha[0] = -exp(a)
            out_gamma[0] = exp(g)
            out_conv[0] = 1
            out_iters[0] = steps
            out_rnorm[0] = ninf
            return C_OK
        if exp(a) > cap:
            break
        c_score_log(a + h, g, z, n, looks, &p1, &p2)
        c_score_log(a - h, g, z, n, looks, &q1, &q2)
        j00 = (p1 - q1) / (2.0 * h)
        j10 = (p2 - q2) / (2.0 * h)
        c_score_log(a, g + h, z, n, looks, &p1, &p2)
        c_score_log(a, g - h, z, n, looks, &q1, &q2)
        j01 = (p1 - q1) / (2.0 * h)
        j11 = (p2 - q2) / (2.0 * h)
        det = j00 * j11 - j01 * j10
        if not isfinite(det) or fabs(det) < 1e-300:
            out_alpha[0] = -exp(a)
            out_gamma[0] = exp(g)
            out_iters[0] = steps
            out_rnorm[0] = ninf
            return C_FAILED
        da = (-r1 * j11 + r2 * j01) / det
        dg = (-r2 * j00 + r1 * j10) / det
        big = fmax(fabs(da), fabs(dg))
        if big > step_max:
            da *= step_max / big
            dg *= step_max / big
        n0 = hypot(r1, r2)
        lam = 1.0
        accepted = 0
        while lam >= 5.960464477539063e-08:  # 2**-24
            at = a + lam * da
            gt = g + lam * dg
            c_score_log(at, gt, z, n, looks, &t1, &t2)
            nt = hypot(t1, t2)
            if isfinite(nt) and nt < n0 * (1.0 - 1e-4 * lam):
                a = at
                g = gt
                r1 = t1
                r2 = t2
                accepted = 1
                break
            lam *= 0.5
        if not accepted:
            out_alpha[0] = -exp(a)
            out_gamma[0] = exp(g)
            out_iters[0] = steps
            out_rnorm[0] = ninf
            return C_FAILED
        steps += 1
        ninf = fmax(fabs(r1), fabs(r2))

    out_iters[0] = steps
    if ninf <= tol:
        out_alpha[0] = -exp(a)
        out_gamma[0] = exp(g)
        out_conv[0] = 1
        out_rnorm[0] = ninf
        return C_OK
    if exp(a) > cap:
        out_alpha[0] = -cap
        out_gamma[0] = (cap - 1.0) * m1
        c_score_log(log(cap), log(out_gamma[0]), z, n, looks, &s1, &s2)
        out_rnorm[0] = fmax(fabs(s1), fabs(s2))
        return C_CAP
    out_alpha[0] = -exp(a)
    out_gamma[0] = exp(g)
    out_rnorm[0] = ninf
    return C_FAILED


def fit_g0(z, double looks, double tol, int max_iter, double cap, double step_max):
    """Damped Newton fit; returns (alpha, gamma, converged, iterations,
    resid_inf, code) exactly like the reference implementation."""
    arr = np.ascontiguousarray(z, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        return float("nan"), float("nan"), False, 0, float("inf"), CODE_FAILED
    cdef double[::1] zv = arr
    cdef double alpha, gamma, rnorm
    cdef int conv, iters, code
    with nogil:
        code = c_fit_g0(&zv[0], zv.shape[0], looks, tol, max_iter, cap, step_max,
                        &alpha, &gamma, &conv, &iters, &rnorm)
    return alpha, gamma, bool(conv), iters, rnorm, code


cdef int c_clamp_unit(double d, double err, double* out) noexcept nogil:
    cdef double slack = 10.0 * err + 1e-12
    if d < 0.0:
        if d >= -slack:
            out[0] = 0.0
            return 1
        out[0] = d
        return 0
    if d > 1.0:
        if d <= 1.0 + slack:
            out[0] = 1.0
            return 1
        out[0] = d
        return 0
    out[0] = d
    return 1


def window_block(
    double[:, ::1] padded,
    int side,
    int stride,
    double looks,
    int row0,
    int row1,
    int out_w,
    double tol,
    int max_iter,
    double cap,
    double step_max,
    double rel_tol,
    double abs_tol,
    int max_subdiv,
    double[:, ::1] out_mean,
    double[:, ::1] out_alpha,
    double[:, ::1] out_gamma,
    double[:, ::1] out_entropy,
    double[:, ::1] out_distance,
    double[:, ::1] out_complexity,
    unsigned char[:, ::1] out_status,
):
    """Fill output rows [row0, row1); see the reference implementation for
    the per-window pipeline.  Releases the GIL for the whole sweep."""
    cdef Py_ssize_t nwin = <Py_ssize_t> side * side
    cdef double* win = <double*> malloc(nwin * sizeof(double))
    if win == NULL:
        raise MemoryError("window scratch buffer")
    cdef int i, j, a, b, r, c, code, conv, iters, ok
    cdef double m, wmin, wmax, v, alpha, gamma, rnorm
    cdef double hd, e1, dr, e2, d, ent
    try:
        with nogil:
            for i in range(row0, row1):
                r = i * stride
                for j in range(out_w):
                    c = j * stride
                    m = 0.0
                    wmin = INFINITY
                    wmax = -INFINITY
                    for a in range(side):
                        for b in range(side):
                            v = padded[r + a, c + b]
                            win[a * side + b] = v
                            m += v
                            if v < wmin:
                                wmin = v
                            if v > wmax:
                                wmax = v
                    m /= nwin
                    out_mean[i, j] = m
                    if wmin == wmax and m > 0.0:
                        # zero sample variance: extreme of the textureless limit
                        alpha = -cap
                        gamma = (cap - 1.0) * m
                        code = C_CAP
                    else:
                        code = c_fit_g0(win, nwin, looks, tol, max_iter, cap,
                                        step_max, &alpha, &gamma, &conv, &iters,
                                        &rnorm)
                    ok = 1
                    if code == C_FAILED or not isfinite(alpha) or m <= 0.0:
                        ok = 0
                    if ok:
                        ok = c_g0_entropy(alpha, gamma, looks, m, rel_tol,
                                          abs_tol, max_subdiv, &hd, &e1)
                        if ok:
                            ok = c_hellinger(alpha, gamma, looks, m, m, rel_tol,
                                             abs_tol, max_subdiv, &dr, &e2)
                        if ok and not (isfinite(hd) and isfinite(dr)):
                            ok = 0
                    if ok:
                        ok = c_clamp_unit(dr, e2, &d)
                    if not ok:
                        out_alpha[i, j] = NAN
                        out_gamma[i, j] = NAN
                        out_entropy[i, j] = NAN
                        out_distance[i, j] = NAN
                        out_complexity[i, j] = NAN
                        out_status[i, j] = C_FAILED
                        continue
                    ent = -hd
                    out_alpha[i, j] = alpha
                    out_gamma[i, j] = gamma
                    out_entropy[i, j] = ent
                    out_distance[i, j] = d
                    out_complexity[i, j] = ent * d
                    out_status[i, j] = <unsigned char> code
    finally:
        free(win)
