"""Compiled inner loops.

Maps are passed to kernels as a flat parameter vector plus the right-bridge
coefficients, so that every kernel is a pure function of plain arrays:

    p = [parity, D, A, w, W, a0, shift, x_crit]
    bc = ascending local power-basis coefficients of the right bridge on [w, W]

parity is 1.0 for the circle (odd) family and 0.0 for the interval family.
"""

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi

# Critical-hit guard: distances below this are treated as exact hits.
CRIT_GUARD = 1e-300

# grid kernels recompute rotated trig values exactly this often
RESYNC = 64


@njit(cache=True, error_model="numpy", inline="always")
def poly_jet(c, t):
    """Value, first and second derivative of sum(c[k] * t**k)."""
    v = 0.0
    d1 = 0.0
    d2 = 0.0
    for k in range(c.shape[0] - 1, -1, -1):
        d2 = d2 * t + d1
        d1 = d1 * t + v
        v = v * t + c[k]
    return v, d1, 2.0 * d2


@njit(cache=True, error_model="numpy", inline="always")
def wrap01(v):
    r = v - math.floor(v)
    if r >= 1.0:
        r = 0.0
    return r


@njit(cache=True, error_model="numpy", inline="always")
def ipow(u, n):
    r = 1.0
    for _ in range(n):
        r *= u
    return r


@njit(cache=True, error_model="numpy", inline="always")
def map_jet(p, bc, x):
    """(h, h', h'') at x. Circle values are returned in [0, 1)."""
    D = int(p[1])
    A = p[2]
    w = p[3]
    W = p[4]
    if p[0] == 1.0:
        u = wrap01(x) - 0.5
        au = abs(u)
        if au <= w:
            u2 = ipow(u, D - 2)
            v = A * u2 * u * u
            d1 = D * A * u2 * u
            d2 = D * (D - 1) * A * u2
        elif au < W:
            s = 1.0 if u > 0 else -1.0
            b0, b1, b2 = poly_jet(bc, au - w)
            v = s * b0
            d1 = b1
            d2 = s * b2
        else:
            v = 2.0 * u
            d1 = 2.0
            d2 = 0.0
        return wrap01(v), d1, d2
    u = x
    au = abs(u)
    a0 = p[5]
    if au <= w:
        u2 = ipow(u, D - 2)
        v = a0 - A * u2 * u * u
        d1 = -D * A * u2 * u
        d2 = -D * (D - 1) * A * u2
    elif au < W:
        s = 1.0 if u > 0 else -1.0
        b0, b1, b2 = poly_jet(bc, au - w)
        v = b0
        d1 = s * b1
        d2 = b2
    else:
        v = a0 + p[6] - u * u
        d1 = -2.0 * u
        d2 = -2.0
    return v, d1, d2


@njit(cache=True, error_model="numpy")
def map_jet_array(p, bc, xs):
    n = xs.shape[0]
    out = np.empty((3, n))
    for i in range(n):
        v, d1, d2 = map_jet(p, bc, xs[i])
        out[0, i] = v
        out[1, i] = d1
        out[2, i] = d2
    return out


@njit(cache=True, error_model="numpy", inline="always")
def forcing_jet_cs(ks, ca, sa, c1, s1):
    """Trigonometric polynomial jet from c1, s1 = cos, sin of 2 pi theta.

    Frequencies must be ascending integers; multiples are stepped by angle
    addition instead of fresh trig calls.
    """
    v = 0.0
    d1 = 0.0
    d2 = 0.0
    k = 1
    c = c1
    s = s1
    for j in range(ks.shape[0]):
        kj = int(ks[j])
        while k < kj:
            c, s = c * c1 - s * s1, s * c1 + c * s1
            k += 1
        om = TWO_PI * kj
        v += ca[j] * c + sa[j] * s
        d1 += om * (sa[j] * c - ca[j] * s)
        d2 -= om * om * (ca[j] * c + sa[j] * s)
    return v, d1, d2


@njit(cache=True, error_model="numpy", inline="always")
def forcing_jet(ks, ca, sa, theta):
    """b(theta), b'(theta), b''(theta) for a trigonometric polynomial."""
    if ks.shape[0] == 0:
        return 0.0, 0.0, 0.0
    return forcing_jet_cs(ks, ca, sa, math.cos(TWO_PI * theta), math.sin(TWO_PI * theta))


@njit(cache=True, error_model="numpy", inline="always")
def forcing_value(ks, ca, sa, theta):
    v = 0.0
    for j in range(ks.shape[0]):
        om = TWO_PI * ks[j]
        v += ca[j] * math.cos(om * theta) + sa[j] * math.sin(om * theta)
    return v


@njit(cache=True, error_model="numpy", inline="always")
def fiber_step(p, bc, ks, ca, sa, alpha, theta, x):
    """f(theta, x) and df/dx for the skew product."""
    h, d1, _ = map_jet(p, bc, x)
    v = alpha * forcing_value(ks, ca, sa, theta) + h
    if p[0] == 1.0:
        v = wrap01(v)
    return v, d1


@njit(cache=True, error_model="numpy", inline="always")
def crit_distance(p, x):
    if p[0] == 1.0:
        return abs(wrap01(x) - 0.5)
    return abs(x - p[7])


# ---------------------------------------------------------------------------
# orbits over digit streams


@njit(cache=True, error_model="numpy")
def window_init(digits, d, L):
    w = 0
    for k in range(L):
        w = w * d + digits[k]
    return w


@njit(cache=True, error_model="numpy")
def fiber_orbit(p, bc, ks, ca, sa, alpha, d, L, digits, x0, n, xs, dh):
    """Fill xs[0..n] with the fiber orbit and dh[0..n-1] with h'(x_j).

    theta_j is read from the digit window, so the base orbit is exact.
    """
    dL = float(d) ** L
    top = 1
    for _ in range(L - 1):
        top *= d
    w = window_init(digits, d, L)
    x = x0
    xs[0] = x
    for j in range(n):
        th = w / dL
        h, h1, _ = map_jet(p, bc, x)
        dh[j] = h1
        x = alpha * forcing_value(ks, ca, sa, th) + h
        if p[0] == 1.0:
            x = wrap01(x)
        xs[j + 1] = x
        w = (w % top) * d + digits[j + L]
    return x


@njit(cache=True, error_model="numpy")
def log2_accumulate(E, S, comp, v):
    """Add log2|v| as integer exponent plus compensated mantissa sum."""
    m, e = math.frexp(abs(v))
    t = math.log2(m)
    s = S + t
    if abs(S) >= abs(t):
        comp += (S - s) + t
    else:
        comp += (t - s) + S
    return E + e, s, comp


@njit(cache=True, error_model="numpy")
def vertical_log2(p, bc, ks, ca, sa, alpha, d, L, digits, x0, n, guard):
    """Birkhoff sum of log2|h'(x_j)|, j < n, as (exponent, mantissa, hit).

    hit is the first index with |x_j - x~| < guard, or -1.
    """
    dL = float(d) ** L
    top = 1
    for _ in range(L - 1):
        top *= d
    w = window_init(digits, d, L)
    x = x0
    E = 0
    S = 0.0
    comp = 0.0
    for j in range(n):
        if crit_distance(p, x) < guard:
            return E, S + comp, j
        th = w / dL
        h, h1, _ = map_jet(p, bc, x)
        E, S, comp = log2_accumulate(E, S, comp, h1)
        x = alpha * forcing_value(ks, ca, sa, th) + h
        if p[0] == 1.0:
            x = wrap01(x)
        w = (w % top) * d + digits[j + L]
    return E, S + comp, -1


@njit(cache=True, error_model="numpy")
def classify_orbit(dist, n, N, R0, Rm, diam, root_alpha, m, out_nu, out_kind, out_r):
    """Situations along one orbit.

    dist[nu] is the distance of the orbit point to the critical point.  A
    step is II when the segment may meet J(m), I when it meets J(0) but not
    J(m).  I-candidates closer than N to the previous I are absorbed.
    Returns (records, absorbed).
    """
    cnt = 0
    absorbed = 0
    last = -(1 << 62)
    for nu in range(1, n + 1):
        md = dist[nu] - diam
        if md < Rm:
            out_nu[cnt] = nu
            out_kind[cnt] = 2
            out_r[cnt] = m
            cnt += 1
        elif md < R0:
            if nu < last + N:
                absorbed += 1
                continue
            r = int(math.ceil(math.log(root_alpha / md)))
            if r < 1:
                r = 1
            if r > m:
                r = m
            out_nu[cnt] = nu
            out_kind[cnt] = 1
            out_r[cnt] = r
            cnt += 1
            last = nu
    return cnt, absorbed


# ---------------------------------------------------------------------------
# curves


@njit(cache=True, error_model="numpy", inline="always")
def _curve_point(p, bc, ks, ca, sa, alpha, d, x0, bks, bca, bsa, cs, sn, n, circ):
    # cs[j], sn[j] are cos, sin of 2 pi theta_j; theta_0 is also the curve parameter
    v, X1, X2 = forcing_jet_cs(bks, bca, bsa, cs[0], sn[0])
    X = x0 + v
    if circ:
        X = wrap01(X)
    for j in range(n):
        b, b1, b2 = forcing_jet_cs(ks, ca, sa, cs[j], sn[j])
        h, h1, h2 = map_jet(p, bc, X)
        Y = alpha * b + h
        Y1 = (alpha * b1 + h1 * X1) / d
        Y2 = (alpha * b2 + h2 * X1 * X1 + h1 * X2) / (d * d)
        if circ:
            Y = wrap01(Y)
        X, X1, X2 = Y, Y1, Y2
    return X, X1, X2


@njit(cache=True, error_model="numpy")
def propagate_curve(p, bc, ks, ca, sa, alpha, d, x0, bks, bca, bsa, offs, scales, ts, out):
    """Jets of the curve phi^n(graph X0 | omega) at image parameters ts.

    theta_j = offs[j] + scales[j] * t are the base points along the branch
    (j = 0..n-1); derivatives follow the exact recursions
    Y' = (df/dtheta + df/dx X') / g' and
    Y'' = (d2f/dtheta2 + d2f/dx2 X'^2 + df/dx X'') / g'^2 for g = d theta.
    """
    n = offs.shape[0]
    circ = p[0] == 1.0
    cs = np.empty(n)
    sn = np.empty(n)
    for i in range(ts.shape[0]):
        t = ts[i]
        for j in range(n):
            th = offs[j] + scales[j] * t
            cs[j] = math.cos(TWO_PI * th)
            sn[j] = math.sin(TWO_PI * th)
        X, X1, X2 = _curve_point(p, bc, ks, ca, sa, alpha, d, x0, bks, bca, bsa, cs, sn, n, circ)
        out[0, i] = X
        out[1, i] = X1
        out[2, i] = X2


@njit(cache=True, error_model="numpy")
def propagate_curve_grid(p, bc, ks, ca, sa, alpha, d, x0, bks, bca, bsa, offs, scales, g, out):
    """propagate_curve on the grid t = i / g.

    The base angles advance by a fixed step, so cos and sin are rotated
    forward and recomputed exactly every RESYNC points.
    """
    n = offs.shape[0]
    circ = p[0] == 1.0
    cs = np.empty(n)
    sn = np.empty(n)
    rc = np.empty(n)
    rs = np.empty(n)
    for j in range(n):
        rc[j] = math.cos(TWO_PI * scales[j] / g)
        rs[j] = math.sin(TWO_PI * scales[j] / g)
    for i in range(g):
        if i % RESYNC == 0:
            t = i / g
            for j in range(n):
                th = offs[j] + scales[j] * t
                cs[j] = math.cos(TWO_PI * th)
                sn[j] = math.sin(TWO_PI * th)
        else:
            for j in range(n):
                c = cs[j]
                cs[j] = c * rc[j] - sn[j] * rs[j]
                sn[j] = sn[j] * rc[j] + c * rs[j]
        X, X1, X2 = _curve_point(p, bc, ks, ca, sa, alpha, d, x0, bks, bca, bsa, cs, sn, n, circ)
        out[0, i] = X
        out[1, i] = X1
        out[2, i] = X2

