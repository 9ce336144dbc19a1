"""Pure-Python kernel backend.

Reference implementation of the numerical hot paths: special functions,
adaptive Gauss-Kronrod integration on the half line, the heavy-tailed
intensity-law fit, and the per-window feature sweep.  The compiled
backend (_ckernels) implements the same algorithms step for step; this
module is the fallback and the readable specification of both.
"""

import math

import numpy as np

NAME = "python"

# Fit outcome codes shared with the compiled backend.
CODE_OK = 0
CODE_CAP = 1
CODE_FAILED = 2

# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

# Above this point the asymptotic series are accurate to ~1e-13 or better;
# below it arguments are shifted up by the recurrences psi(x) = psi(x+1) - 1/x
# and ln G(x) = ln G(x+1) - ln x.
_ASYM_MIN = 6.0


def _digamma_asym(y):
    """Asymptotic psi(y) for y >= _ASYM_MIN, Bernoulli terms through y^-14."""
    w = 1.0 / (y * y)
    s = 691.0 / 32760.0 - w / 12.0
    s = 1.0 / 132.0 - w * s
    s = 1.0 / 240.0 - w * s
    s = 1.0 / 252.0 - w * s
    s = 1.0 / 120.0 - w * s
    s = 1.0 / 12.0 - w * s
    return np.log(y) - 0.5 / y - w * s


def _ln_gamma_asym(y):
    """Stirling ln Gamma(y) for y >= _ASYM_MIN, terms through y^-15."""
    w = 1.0 / (y * y)
    s = 1.0 / 156.0 - w * 3617.0 / 122400.0
    s = 691.0 / 360360.0 - w * s
    s = 1.0 / 1188.0 - w * s
    s = 1.0 / 1680.0 - w * s
    s = 1.0 / 1260.0 - w * s
    s = 1.0 / 360.0 - w * s
    s = 1.0 / 12.0 - w * s
    return (y - 0.5) * np.log(y) - y + 0.5 * math.log(2.0 * math.pi) + s / y


def digamma(x):
    """psi(x) for x > 0, scalar or array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and not (np.all(np.isfinite(arr)) and np.all(arr > 0.0)):
        raise ValueError("digamma requires finite x > 0")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr).copy()
    shift = np.zeros_like(arr)
    small = arr < _ASYM_MIN
    while np.any(small):
        shift[small] += 1.0 / arr[small]
        arr[small] += 1.0
        small = arr < _ASYM_MIN
    out = _digamma_asym(arr) - shift
    return float(out[0]) if scalar else out.reshape(np.shape(x))


def ln_gamma(x):
    """ln Gamma(x) for x > 0, scalar or array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and not (np.all(np.isfinite(arr)) and np.all(arr > 0.0)):
        raise ValueError("ln_gamma requires finite x > 0")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr).copy()
    shift = np.zeros_like(arr)
    small = arr < _ASYM_MIN
    while np.any(small):
        shift[small] += np.log(arr[small])
        arr[small] += 1.0
        small = arr < _ASYM_MIN
    out = _ln_gamma_asym(arr) - shift
    return float(out[0]) if scalar else out.reshape(np.shape(x))


# ---------------------------------------------------------------------------
# Gauss(7)/Kronrod(15) adaptive integration on (0, 1)
# ---------------------------------------------------------------------------

# Nonnegative abscissae and weights of the nested pair; odd indices are the
# embedded Gauss-7 nodes.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def _build_rule():
    nodes = np.empty(15)
    wk = np.empty(15)
    wg = np.zeros(15)
    for i in range(7):
        nodes[i] = -_XGK[i]
        nodes[14 - i] = _XGK[i]
        wk[i] = wk[14 - i] = _WGK[i]
    nodes[7] = 0.0
    wk[7] = _WGK[7]
    for i in range(3):
        wg[2 * i + 1] = wg[13 - 2 * i] = _WG[i]
    wg[7] = _WG[3]
    return nodes, wk, wg


GK_NODES, GK_WK, GK_WG = _build_rule()


def adaptive_unit(fvec, rel_tol, abs_tol, max_subdiv):
    """Integrate fvec over (0, 1) by bisecting the worst panel.

    fvec maps an array of points in (0, 1) to integrand values.  Each
    panel is scored by the Kronrod-15 estimate with |K15 - G7| as its
    error bound; the panel with the largest bound is split until the
    summed bound meets max(rel_tol*|integral|, abs_tol) or the panel
    count hits max_subdiv.  Returns (value, error_bound, converged);
    panels are summed in creation order so results are reproducible.
    """

    def panel(lo, hi):
        c = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        y = fvec(c + h * GK_NODES)
        ik = h * float(np.dot(GK_WK, y))
        ig = h * float(np.dot(GK_WG, y))
        return [lo, hi, ik, abs(ik - ig)]

    segs = [panel(0.0, 1.0)]
    while True:
        total = math.fsum(s[2] for s in segs)
        err = math.fsum(s[3] for s in segs)
        if math.isnan(total):
            return total, math.inf, False
        if err <= max(rel_tol * abs(total), abs_tol):
            return total, err, True
        if len(segs) >= max_subdiv:
            return total, err, False
        worst = max(range(len(segs)), key=lambda i: segs[i][3])
        lo, hi = segs[worst][:2]
        mid = 0.5 * (lo + hi)
        segs[worst] = panel(lo, mid)
        segs.append(panel(mid, hi))


# ---------------------------------------------------------------------------
# log densities (z > 0 branch only; the z = 0 conventions live upstream)
# ---------------------------------------------------------------------------


def _g0_logconst(alpha, gamma, looks):
    return (
        looks * math.log(looks)
        + ln_gamma(looks - alpha)
        - alpha * math.log(gamma)
        - ln_gamma(-alpha)
        - ln_gamma(looks)
    )


def _gamma_logconst(sigma2, looks):
    return looks * math.log(looks / sigma2) - ln_gamma(looks)


def g0_entropy(alpha, gamma, looks, hint, rel_tol, abs_tol, max_subdiv):
    """Differential entropy -int f ln f of the heavy-tailed intensity law.

    Integrates over (0, inf) through the map z = hint*t/(1-t).
    Returns (value, error_bound, converged).
    """
    lc = _g0_logconst(alpha, gamma, looks)
    lm1 = looks - 1.0
    aml = alpha - looks

    def fvec(t):
        om = 1.0 - t
        z = hint * t / om
        lf = lc + lm1 * np.log(z) + aml * np.log(gamma + looks * z)
        w = hint / (om * om)
        return np.where(lf > -740.0, -np.exp(lf) * lf, 0.0) * w

    return adaptive_unit(fvec, rel_tol, abs_tol, max_subdiv)


def hellinger_g0_gamma(alpha, gamma, looks, sigma2, hint, rel_tol, abs_tol, max_subdiv):
    """Hellinger distance between the fitted heavy-tailed law and the
    pure-speckle Gamma law with mean sigma2, both at the same looks.

    Computed as 1 - int sqrt(f_p f_q); the affinity integrand underflows
    cleanly to zero wherever either density does.  Returns the raw
    (unclamped) distance with (error_bound, converged).
    """
    lcp = _g0_logconst(alpha, gamma, looks)
    lcq = _gamma_logconst(sigma2, looks)
    lm1 = looks - 1.0
    aml = alpha - looks
    lrate = looks / sigma2

    def fvec(t):
        om = 1.0 - t
        z = hint * t / om
        lz = np.log(z)
        lp = lcp + lm1 * lz + aml * np.log(gamma + looks * z)
        lq = lcq + lm1 * lz - lrate * z
        return np.exp(0.5 * (lp + lq)) * hint / (om * om)

    val, err, ok = adaptive_unit(fvec, rel_tol, abs_tol, max_subdiv)
    return 1.0 - val, err, ok


# ---------------------------------------------------------------------------
# maximum-likelihood fit of the heavy-tailed law
# ---------------------------------------------------------------------------


def _score(alpha, gamma, z, looks):
    """Stationarity conditions of the sample log-likelihood in (alpha, gamma)."""
    gl = gamma + looks * z
    r1 = (
        digamma(-alpha)
        - digamma(looks - alpha)
        - math.log(gamma)
        + float(np.mean(np.log(gl)))
    )
    r2 = -alpha / gamma + (alpha - looks) * float(np.mean(1.0 / gl))
    return r1, r2


def _score_log(a, g, z, looks):
    """Score at alpha = -exp(a), gamma = exp(g); the solver works in logs."""
    return _score(-math.exp(a), math.exp(g), z, looks)


def fit_g0(z, looks, tol, max_iter, cap, step_max):
    """Damped Newton solve of the score equations.

    Returns (alpha, gamma, converged, iterations, resid_inf, code) with
    code CODE_OK, CODE_CAP (texture cap hit, textureless fallback
    parameters returned) or CODE_FAILED (degenerate sample, singular
    Jacobian, stalled line search, or iteration budget exhausted).
    """
    z = np.ascontiguousarray(z, dtype=np.float64)
    n = z.size
    m1 = float(z.mean())
    pos = z[z > 0.0]
    if pos.size < 2 or float(pos.min()) == float(pos.max()):
        return math.nan, math.nan, False, 0, math.inf, CODE_FAILED

    # Moment-based start: the second-moment ratio pins alpha when texture
    # is moderate; very heavy or absent texture gets a generic start.
    m2 = float(np.mean(z * z))
    ratio = m2 / (m1 * m1) * looks / (looks + 1.0)
    a0 = (1.0 - 2.0 * ratio) / (ratio - 1.0) if ratio > 1.0 else 0.0
    if not a0 < -2.2:
        a0 = -3.0
    if a0 < -45.0:
        a0 = -45.0
    g0 = -m1 * (a0 + 1.0)

    a = math.log(-a0)
    g = math.log(g0)
    r1, r2 = _score_log(a, g, z, looks)
    ninf = max(abs(r1), abs(r2))
    h = 1e-6
    steps = 0
    for _ in range(max_iter):
        if ninf <= tol:
            return -math.exp(a), math.exp(g), True, steps, ninf, CODE_OK
        if math.exp(a) > cap:
            break
        # central-difference Jacobian in the log coordinates
        p1, p2 = _score_log(a + h, g, z, looks)
        q1, q2 = _score_log(a - h, g, z, looks)
        j00 = (p1 - q1) / (2.0 * h)
        j10 = (p2 - q2) / (2.0 * h)
        p1, p2 = _score_log(a, g + h, z, looks)
        q1, q2 = _score_log(a, g - h, z, looks)
        j01 = (p1 - q1) / (2.0 * h)
        j11 = (p2 - q2) / (2.0 * h)
        det = j00 * j11 - j01 * j10
        if not math.isfinite(det) or abs(det) < 1e-300:
            return -math.exp(a), math.exp(g), False, steps, ninf, CODE_FAILED
        da = (-r1 * j11 + r2 * j01) / det
        dg = (-r2 * j00 + r1 * j10) / det
        big = max(abs(da), abs(dg))
        if big > step_max:
            da *= step_max / big
            dg *= step_max / big
        n0 = math.hypot(r1, r2)
        lam = 1.0
        accepted = False
        while lam >= 2.0 ** -24:
            at = a + lam * da
            gt = g + lam * dg
            t1, t2 = _score_log(at, gt, z, looks)
            nt = math.hypot(t1, t2)
            if math.isfinite(nt) and nt < n0 * (1.0 - 1e-4 * lam):
                a, g, r1, r2 = at, gt, t1, t2
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            return -math.exp(a), math.exp(g), False, steps, ninf, CODE_FAILED
        steps += 1
        ninf = max(abs(r1), abs(r2))

    if ninf <= tol:
        return -math.exp(a), math.exp(g), True, steps, ninf, CODE_OK
    if math.exp(a) > cap:
        alpha = -cap
        gamma = (cap - 1.0) * m1
        s1, s2 = _score(alpha, gamma, z, looks)
        return alpha, gamma, False, steps, max(abs(s1), abs(s2)), CODE_CAP
    return -math.exp(a), math.exp(g), False, steps, ninf, CODE_FAILED


# ---------------------------------------------------------------------------
# sliding-window feature sweep
# ---------------------------------------------------------------------------


def clamp_unit(d, err):
    """Clamp d into [0, 1] when it is out by no more than the quadrature
    slack; values further out signal a numerical problem.

    Returns (clamped, ok).
    """
    slack = 10.0 * err + 1e-12
    if d < 0.0:
        return (0.0, True) if d >= -slack else (d, False)
    if d > 1.0:
        return (1.0, True) if d <= 1.0 + slack else (d, False)
    return d, True


def window_block(
    padded,
    side,
    stride,
    looks,
    row0,
    row1,
    out_w,
    tol,
    max_iter,
    cap,
    step_max,
    rel_tol,
    abs_tol,
    max_subdiv,
    out_mean,
    out_alpha,
    out_gamma,
    out_entropy,
    out_distance,
    out_complexity,
    out_status,
):
    """Fill output rows [row0, row1) of the per-window feature grids.

    For each window: sample mean, heavy-tailed fit, entropy of the fitted
    law under the sign convention that pure speckle at these scales is
    positive (the negated differential entropy), Hellinger distance to
    the equal-mean pure-speckle law, and their product.  Status is 0 for
    a converged fit, 1 for the textureless fallback, 2 for failure.
    """
    nan = math.nan
    for i in range(row0, row1):
        r = i * stride
        for j in range(out_w):
            c = j * stride
            win = np.ascontiguousarray(padded[r : r + side, c : c + side]).ravel()
            m = float(win.mean())
            out_mean[i, j] = m
            if float(win.min()) == float(win.max()) and m > 0.0:
                # zero sample variance: extreme of the textureless limit
                alpha, gamma, code = -cap, (cap - 1.0) * m, CODE_CAP
            else:
                alpha, gamma, _, _, _, code = fit_g0(
                    win, looks, tol, max_iter, cap, step_max
                )
            ok = code != CODE_FAILED and math.isfinite(alpha) and m > 0.0
            if ok:
                hd, _, ok1 = g0_entropy(
                    alpha, gamma, looks, m, rel_tol, abs_tol, max_subdiv
                )
                dr, e2, ok2 = hellinger_g0_gamma(
                    alpha, gamma, looks, m, m, rel_tol, abs_tol, max_subdiv
                )
                ok = ok1 and ok2 and math.isfinite(hd) and math.isfinite(dr)
            if ok:
                d, ok = clamp_unit(dr, e2)
            if not ok:
                out_alpha[i, j] = nan
                out_gamma[i, j] = nan
                out_entropy[i, j] = nan
                out_distance[i, j] = nan
                out_complexity[i, j] = nan
                out_status[i, j] = CODE_FAILED
                continue
            ent = -hd
            out_alpha[i, j] = alpha
            out_gamma[i, j] = gamma
            out_entropy[i, j] = ent
            out_distance[i, j] = d
            out_complexity[i, j] = ent * d
            out_status[i, j] = code
