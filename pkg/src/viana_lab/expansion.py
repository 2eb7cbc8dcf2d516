"""Expansion estimates, deep returns, exceptional sets and exponents.

All Monte Carlo work is split by sample index.  Each sample draws from its
own counter-based stream keyed by (seed, index), and results are merged in
index order, so every estimator is a pure function of its inputs and the
seed regardless of the worker count.
"""

from __future__ import annotations

import math
import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize, stats

from . import _kernels as K
from .constants import ExpansionConstants, compute_p, j_radius
from .curves import AdmissibleCurve, make_curve
from .errors import PreconditionViolated
from .maps import SkewProduct, invariant_domain
from .streams import BasePoint, base_point, stream, window_digits

CRIT_GUARD = K.CRIT_GUARD
LN2 = math.log(2.0)
CHUNK = 256


# ---------------------------------------------------------------------------
# parallel plumbing


def _chunks(count, chunk=CHUNK):
    return [(lo, min(count, lo + chunk)) for lo in range(0, count, chunk)]


def run_indexed(fn, count: int, workers: int = 1, chunk: int = CHUNK, **kw):
    """Concatenate ``fn(lo, hi, **kw)`` over fixed index chunks.

    Chunk boundaries do not depend on ``workers``, so neither does the
    result.
    """
    parts = _chunks(count, chunk)
    if workers <= 1 or len(parts) <= 1:
        out = [fn(lo, hi, **kw) for lo, hi in parts]
    else:
        ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as ex:
            futs = [ex.submit(fn, lo, hi, **kw) for lo, hi in parts]
            out = [f.result() for f in futs]
    return [row for part in out for row in part]


def default_workers() -> int:
    env = os.environ.get("VIANA_LAB_WORKERS")
    return max(1, int(env)) if env else 1


# ---------------------------------------------------------------------------
# orbits


def _kernel_args(sp: SkewProduct):
    ks, ca, sa = sp.forcing_arrays
    return sp.map.params, sp.map.bridge_coeffs, ks, ca, sa, float(sp.alpha)


def fiber_orbit(sp: SkewProduct, theta, x: float, n: int):
    """(xs, h'(x_j)) for j < n along the orbit of (theta, x); theta exact."""
    bp = base_point(theta, sp.d, n)
    xs = np.empty(n + 1)
    dh = np.empty(n)
    K.fiber_orbit(*_kernel_args(sp), sp.d, window_digits(sp.d), bp.digits, float(x), n, xs, dh)
    return xs, dh


def _log_product(dh) -> float:
    a = np.abs(dh)
    if np.any(a == 0.0):
        return -math.inf
    return math.fsum(np.log(a))


def _crit_dist(sp: SkewProduct, x):
    return sp.map.crit_distance(x)


# ---------------------------------------------------------------------------
# lemma reports


@dataclass(frozen=True)
class LemmaReport:
    lemma: str
    theta: float
    x: float
    steps: int
    log_product: float
    log_bound: float
    holds: bool
    extra: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.log_product - self.log_bound

    def row(self):
        d = asdict(self)
        d.pop("extra")
        d.update(self.extra)
        d["margin"] = self.margin
        return d


def _theta_float(theta):
    return theta.theta if isinstance(theta, BasePoint) else float(theta)


def verify_escape_near(sp: SkewProduct, consts: ExpansionConstants, theta, x: float) -> LemmaReport:
    """N-step product vs |x - x~|**(D-1) alpha**(-1 + eta/(D-1)).

    The variant with eta/D (what the chain of estimates actually delivers
    before its last step) is reported as ``margin_eta_over_D``.
    """
    D, a = consts.D, consts.alpha
    u = float(_crit_dist(sp, x))
    if not u < 2 * consts.root_alpha:
        raise PreconditionViolated(f"|x - x~| = {u:.6g} >= 2 alpha^(1/D) = {2 * consts.root_alpha:.6g}")
    N = consts.bigN
    _, dh = fiber_orbit(sp, theta, x, N)
    lp = _log_product(dh)
    if u == 0.0:
        return LemmaReport("escape-near", _theta_float(theta), float(x), N, lp, -math.inf, True,
                           {"margin_eta_over_D": math.inf})
    lb = (D - 1) * math.log(u) + (-1 + consts.eta / (D - 1)) * math.log(a)
    lb_alt = (D - 1) * math.log(u) + (-1 + consts.eta / D) * math.log(a)
    return LemmaReport("escape-near", _theta_float(theta), float(x), N, lp, lb, lp >= lb,
                       {"margin_eta_over_D": lp - lb_alt})


def verify_escape_mid(sp: SkewProduct, consts: ExpansionConstants, theta, x: float) -> LemmaReport:
    """p(x)-step product vs sigma1**p(x) / kappa, plus p(x) <= N."""
    u = float(_crit_dist(sp, x))
    if not consts.root_alpha * (1 - 1e-12) <= u < consts.delta1:
        raise PreconditionViolated(
            f"|x - x~| = {u:.6g} outside [alpha^(1/D), delta1) = [{consts.root_alpha:.6g}, {consts.delta1:.6g})"
        )
    p = compute_p(consts, x, check_regime=False)
    _, dh = fiber_orbit(sp, theta, x, p)
    lp = _log_product(dh)
    lb = -math.log(consts.kappa) + p * math.log(consts.sigma1)
    ok_p = p <= consts.bigN
    return LemmaReport("escape-mid", _theta_float(theta), float(x), p, lp, lb, lp >= lb and ok_p,
                       {"p": p, "p_le_N": ok_p})


def verify_long_range(sp: SkewProduct, consts: ExpansionConstants, theta, x: float, k: int) -> LemmaReport:
    """k-step product vs C2 alpha**((D-1)/D) sigma2**k (and C2 sigma2**k on a return).

    ``extra`` carries the largest C2 for which the applicable inequalities
    hold (``log_c2_feasible``) and, for orbits staying off the inner
    interval, the uniform-expansion check against sigma0**k.
    """
    D, a = consts.D, consts.alpha
    xs, dh = fiber_orbit(sp, theta, x, k)
    dist = _crit_dist(sp, xs)
    if k and np.any(dist[:k] < consts.root_alpha):
        j = int(np.argmax(dist[:k] < consts.root_alpha))
        raise PreconditionViolated(f"orbit enters J(0) at step {j} < k = {k}")
    lp = _log_product(dh)
    base = ((D - 1) / D) * math.log(a) + k * math.log(consts.sigma2)
    feas = [lp - base]
    returned = bool(dist[k] < consts.delta1) if k >= 1 else False
    if returned:
        feas.append(lp - k * math.log(consts.sigma2))
    log_c2 = min(feas)
    far = bool(np.all(dist[:k] >= consts.delta1))
    extra = {"returned": returned, "log_c2_feasible": log_c2, "far": far,
             "far_holds": (lp >= k * math.log(consts.sigma0) - 1e-9) if far else True}
    if consts.C2 is None:
        holds = extra["far_holds"]
        lb = base
    else:
        c2 = math.log(consts.C2)
        lb = c2 + (k * math.log(consts.sigma2) if returned else base)
        holds = log_c2 >= c2 and extra["far_holds"]
    return LemmaReport("long-range", _theta_float(theta), float(x), k, lp, lb, holds, extra)


def _sample_x(rng, sp: SkewProduct, dom):
    if sp.map.is_circle:
        return float(rng.random())
    return float(dom.sample(rng.random()))


def _escape_chunk(lo, hi, sp, consts, regime, seed):
    out = []
    c = consts.x_tilde
    for i in range(lo, hi):
        rng = stream(seed, i, "escape-near" if regime == "a" else "escape-mid")
        sign = 1.0 if rng.random() < 0.5 else -1.0
        if regime == "a":
            u = 2 * consts.root_alpha * rng.random()
        else:
            # log-uniform over [alpha^(1/D), delta1)
            u = consts.root_alpha * (consts.delta1 / consts.root_alpha) ** rng.random()
            u = min(max(u, consts.root_alpha), consts.delta1 * (1 - 1e-12))
        x = c + sign * u
        if sp.map.is_circle:
            x %= 1.0
        steps = consts.bigN + 2
        bp = BasePoint.random(rng, sp.d, steps)
        rep = (verify_escape_near if regime == "a" else verify_escape_mid)(sp, consts, bp, x)
        out.append(rep)
    return out


def escape_batch(sp, consts, regime: str, count: int, seed: int, workers: int = 1):
    """Reports for ``count`` random points in regime ``a`` or ``b``."""
    if regime not in ("a", "b"):
        raise ValueError("regime must be 'a' or 'b'")
    return run_indexed(_escape_chunk, count, workers, sp=sp, consts=consts, regime=regime, seed=seed)


def _long_range_chunk(lo, hi, sp, consts, kmax, seed):
    dom = invariant_domain(sp)
    out = []
    for i in range(lo, hi):
        rng = stream(seed, i, "long-range")
        x = _sample_x(rng, sp, dom)
        bp = BasePoint.random(rng, sp.d, kmax + 2)
        xs, _ = fiber_orbit(sp, bp, x, kmax)
        dist = _crit_dist(sp, xs)
        deep = np.nonzero(dist < consts.root_alpha)[0]
        ka = int(min(kmax, deep[0])) if deep.size else kmax
        out.append(verify_long_range(sp, consts, bp, x, ka))
        back = np.nonzero(dist[1:ka + 1] < consts.delta1)[0]
        if back.size:
            kb = int(back[-1] + 1)
            if kb != ka:
                out.append(verify_long_range(sp, consts, bp, x, kb))
    return out


def long_range_batch(sp, consts, count: int, seed: int, kmax: int = 200, workers: int = 1):
    return run_indexed(_long_range_chunk, count, workers, sp=sp, consts=consts, kmax=kmax, seed=seed)


def calibrate_C2(reports) -> float:
    """Largest C2 for which every report's inequalities hold."""
    vals = [r.extra["log_c2_feasible"] for r in reports if r.lemma == "long-range"]
    if not vals:
        return 1.0
    return float(math.exp(min(vals)))


# ---------------------------------------------------------------------------
# deep returns


@dataclass(frozen=True)
class DecayTable:
    r: tuple
    radius: tuple
    hits: tuple
    samples: int
    fractions: tuple
    slope: float
    intercept: float
    five_beta: float
    five_beta_final: float
    C3: float
    monotone: bool
    proof_scaling: bool
    below: tuple = ()

    def rows(self):
        below = self.below or (False,) * len(self.r)
        return [
            {"r": r, "radius": rad, "hits": h, "samples": self.samples, "fraction": f, "below_threshold": b}
            for r, rad, h, f, b in zip(self.r, self.radius, self.hits, self.fractions, below)
        ]


def _ensemble_chunk(lo, hi, sp, steps, seed, modes):
    """|Y_steps - x~| for one random admissible curve per sample."""
    rng = stream(seed, lo, "curves")
    n = hi - lo
    ks = np.arange(1, modes + 1, dtype=float)
    a = rng.standard_normal((n, modes)) / ks ** 2
    b = rng.standard_normal((n, modes)) / ks ** 2
    fill = rng.uniform(0.2, 1.0, n)
    om = 2 * np.pi * ks
    scale = fill * sp.alpha / ((om ** 2) * (np.abs(a) + np.abs(b))).sum(1)
    a *= scale[:, None]
    b *= scale[:, None]
    if sp.map.is_circle:
        x0 = rng.random(n)
    else:
        dom = invariant_domain(sp)
        x0 = dom.sample(rng.random(n))
    th = rng.random(n)
    arg = th[:, None] * om[None, :]
    X = x0 + (np.cos(arg) * a + np.sin(arg) * b).sum(1)
    m = sp.map
    for _ in range(steps):
        bval = sp.forcing.jet(th)[0]
        X = sp.alpha * bval + m(X)
        if m.is_circle:
            X = np.mod(X, 1.0)
        th = np.mod(th * sp.d, 1.0)
    return list(_crit_dist(sp, X))


def _curve_chunk(lo, hi, sp, curve, steps, size, seed):
    rng = stream(seed, lo, "curves")
    th = (np.arange(lo, hi) + rng.random(hi - lo)) / size
    X = np.asarray(curve.values(th)[0])
    m = sp.map
    for _ in range(steps):
        X = sp.alpha * sp.forcing.jet(th)[0] + m(X)
        if m.is_circle:
            X = np.mod(X, 1.0)
        th = np.mod(th * sp.d, 1.0)
    return list(_crit_dist(sp, X))


def strip_radius(consts: ExpansionConstants, r: float, proof_scaling: bool = False) -> float:
    """Radius of J(r - 2), or of J((r - 2)(D - 1)**2) with ``proof_scaling``."""
    s = (r - 2) * ((consts.D - 1) ** 2 if proof_scaling else 1)
    return j_radius(consts, consts.alpha, consts.D, s, allow_negative=True)


def deep_return_decay(sp: SkewProduct, consts: ExpansionConstants, curve: Optional[AdmissibleCurve] = None,
                      r_values=None, samples: int = 2 ** 20, seed: int = 0, proof_scaling: bool = False,
                      workers: int = 1, modes: int = 6, z: float = 2.5758293035489004) -> DecayTable:
    """Fraction of parameters whose M-th iterate lies in the strip J(r - 2).

    With ``curve`` the fraction is over a jittered grid of ``samples``
    parameters of that curve.  Without it every sample is one parameter on
    its own random admissible curve, which averages the per-curve measures
    over an ensemble and resolves much smaller strips.
    """
    M = consts.bigM
    if r_values is None:
        r_values = [consts.r0 + i for i in range(7)]
    r_values = [float(r) for r in r_values]
    if curve is None:
        dist = np.array(run_indexed(_ensemble_chunk, samples, workers, chunk=4096, sp=sp, steps=M,
                                    seed=seed, modes=modes))
    else:
        dist = np.array(run_indexed(_curve_chunk, samples, workers, chunk=4096, sp=sp, curve=curve, steps=M,
                                    size=samples, seed=seed))
    radius = [strip_radius(consts, r, proof_scaling) for r in r_values]
    hits = [int(np.count_nonzero(dist < R)) for R in radius]
    frac = [h / samples for h in hits]
    below = tuple(r < consts.r0 - 1e-12 for r in r_values)
    kept = [(r, f) for r, f, b in zip(r_values, frac, below) if not b]
    monotone = True
    fk = [f for _, f in kept]
    for f0, f1 in zip(fk, fk[1:]):
        sd = math.sqrt(max(f0 * (1 - f0), 1.0 / samples) / samples)
        if f1 > f0 + z * math.sqrt(2) * sd:
            monotone = False
    pos = [(r, f) for r, f in kept if f > 0]
    if len(pos) >= 2:
        fit = stats.linregress([p[0] for p in pos], [math.log(p[1]) for p in pos])
        slope, icpt = float(fit.slope), float(fit.intercept)
    else:
        slope, icpt = float("nan"), float("nan")
    fb = 5 * consts.beta_regime
    C3 = max((f * math.exp(fb * r) for r, f in kept), default=0.0)
    return DecayTable(tuple(r_values), tuple(radius), tuple(hits), samples, tuple(frac), slope, icpt, fb,
                      5 * consts.beta_final, C3, monotone, proof_scaling, below)


def critical_seeking_x0(sp: SkewProduct, steps: int, points: int = 4097) -> float:
    """An x0 whose unforced orbit hits the critical point after ``steps`` steps."""
    m = sp.map
    c = m.critical_point
    if m.is_circle:
        xs = np.linspace(0.0, 1.0, points)
    else:
        dom = invariant_domain(sp)
        xs = np.linspace(dom.lo, dom.hi, points)

    def F(x):
        y = np.asarray(x, dtype=float)
        for _ in range(steps):
            y = m(y)
        diff = y - c
        return np.mod(diff + 0.5, 1.0) - 0.5 if m.is_circle else diff

    v = F(xs)
    for i in range(points - 1):
        if v[i] == 0.0:
            return float(xs[i])
        if v[i] * v[i + 1] < 0 and abs(v[i] - v[i + 1]) < 0.5:
            return float(optimize.brentq(lambda t: float(F(t)), xs[i], xs[i + 1], xtol=1e-15))
    raise PreconditionViolated("no orbit reaches the critical point")


# ---------------------------------------------------------------------------
# situations


@dataclass(frozen=True)
class SituationRecord:
    nu: int
    kind: str
    r: int
    in_g: bool


@dataclass(frozen=True)
class SituationRun:
    records: tuple
    absorbed: int
    n: int
    m: int
    l: int
    diameter: float

    @property
    def has_II(self) -> bool:
        return any(r.kind == "II" for r in self.records)

    def sum_G(self) -> int:
        return sum(r.r for r in self.records if r.kind == "I" and r.in_g)

    def spacing_ok(self, N: int) -> bool:
        nus = [r.nu for r in self.records if r.kind == "I"]
        return all(b - a >= N for a, b in zip(nus, nus[1:])) and (len(nus) - 1) * N <= self.n


def situation_scales(consts: ExpansionConstants, n: int):
    m = math.isqrt(n)
    if m <= consts.bigM:
        raise PreconditionViolated(f"need m = isqrt(n) > M = {consts.bigM}, got m = {m}")
    l = m - consts.bigM
    diam = consts.alpha * (consts.d - consts.alpha) ** (-l)
    return m, l, diam


def _classify(sp, consts, dist, n):
    m, l, diam = situation_scales(consts, n)
    R0 = consts.root_alpha
    Rm = R0 * math.exp(-m)
    nu = np.empty(n, dtype=np.int64)
    kind = np.empty(n, dtype=np.int64)
    rr = np.empty(n, dtype=np.int64)
    cnt, absorbed = K.classify_orbit(dist, n, consts.bigN, R0, Rm, diam, R0, m, nu, kind, rr)
    recs = tuple(
        SituationRecord(int(nu[i]), "I" if kind[i] == 1 else "II", int(rr[i]),
                        bool(kind[i] == 1 and rr[i] >= consts.r0))
        for i in range(cnt)
    )
    return SituationRun(recs, int(absorbed), n, m, l, diam)


def classify_situations(sp: SkewProduct, consts: ExpansionConstants, curve: AdmissibleCurve, n: int,
                        theta) -> SituationRun:
    """I/II situations for nu = 1..n along the orbit of theta on ``curve``.

    The segment over the element containing theta has fiber diameter at
    most alpha (d - alpha)**(-l); a step counts as meeting a strip when the
    orbit point lies within that slack of it.
    """
    situation_scales(consts, n)
    bp = base_point(theta, sp.d, n + 1)
    x0 = float(curve.values(np.array([bp.theta]))[0][0])
    xs, _ = fiber_orbit(sp, bp, x0, n)
    return _classify(sp, consts, _crit_dist(sp, xs), n)


def default_curve(sp: SkewProduct, seed: int, grid_size: int = 2 ** 10) -> AdmissibleCurve:
    dom = None if sp.map.is_circle else (lambda d: (d.lo, d.hi))(invariant_domain(sp))
    return make_curve("random", sp.alpha, circle=sp.map.is_circle, grid_size=grid_size,
                      rng=stream(seed, 0, "curves"), domain=dom)


def _situations_chunk(lo, hi, sp, consts, curve, n_values, grid, seed):
    out = []
    nmax = max(n_values)
    L = window_digits(sp.d)
    for i in range(lo, hi):
        rng = stream(seed, i, "b2")
        # stratified grid point, exact tail drawn from the stream
        th = (i + rng.random()) / grid
        bp = BasePoint.from_float(th, sp.d, nmax + 1, rng=rng)
        x0 = float(curve.values(np.array([bp.theta]))[0][0])
        xs = np.empty(nmax + 1)
        dh = np.empty(nmax)
        K.fiber_orbit(*_kernel_args(sp), sp.d, L, bp.digits, x0, nmax, xs, dh)
        dist = _crit_dist(sp, xs)
        row = {"index": i, "theta": bp.theta}
        for n in n_values:
            run = _classify(sp, consts, dist[: n + 1], n)
            row[n] = (run.has_II, run.sum_G(), sum(1 for r in run.records if r.kind == "I"), run.absorbed,
                      run.spacing_ok(consts.bigN))
        out.append(row)
    return out


@dataclass(frozen=True)
class ExceptionalEstimate:
    n: int
    samples: int
    b2_hits: int
    b1_hits: int
    cn: float
    mean_I: float
    absorbed: int
    spacing_ok: bool

    @property
    def b2(self) -> float:
        return self.b2_hits / self.samples if self.samples else 0.0

    @property
    def b1(self) -> float:
        return self.b1_hits / self.samples if self.samples else 0.0

    def wilson(self, which: str = "b2", level: float = 0.99):
        k = self.b2_hits if which == "b2" else self.b1_hits
        ci = stats.binomtest(k, self.samples).proportion_ci(level, method="wilson")
        return float(ci.low), float(ci.high)


def exceptional_sets(sp: SkewProduct, consts: ExpansionConstants, n_values, sample_count: int, seed: int,
                     curve: Optional[AdmissibleCurve] = None, workers: int = 1):
    """B1 and B2 hit counts for each n from one pass over the samples.

    Parameters come from a stratified grid jittered per seed; each is
    extended with random digits so the base orbit stays exact.
    """
    n_values = sorted(int(n) for n in n_values)
    for n in n_values:
        situation_scales(consts, n)
    curve = curve or default_curve(sp, seed)
    rows = run_indexed(_situations_chunk, sample_count, workers, sp=sp, consts=consts, curve=curve,
                       n_values=n_values, grid=sample_count, seed=seed)
    out = []
    for n in n_values:
        cn = consts.c * n
        b2 = sum(1 for r in rows if r[n][0])
        b1 = sum(1 for r in rows if not r[n][0] and r[n][1] >= cn)
        mean_I = float(np.mean([r[n][2] for r in rows])) if rows else 0.0
        absorbed = sum(r[n][3] for r in rows)
        ok = all(r[n][4] for r in rows)
        out.append(ExceptionalEstimate(n, sample_count, b2, b1, cn, mean_I, absorbed, ok))
    return out


def estimate_B2(sp, consts, n: int, sample_count: int, seed: int, **kw) -> float:
    return exceptional_sets(sp, consts, [n], sample_count, seed, **kw)[0].b2


def estimate_B1(sp, consts, n: int, sample_count: int, seed: int, **kw) -> float:
    return exceptional_sets(sp, consts, [n], sample_count, seed, **kw)[0].b1


def b2_envelope(estimates):
    """Fit C at the smallest n and compare every n against C exp(-sqrt(n)/4)."""
    est = sorted(estimates, key=lambda e: e.n)
    n0 = est[0]
    C = n0.b2 * math.exp(math.sqrt(n0.n) / 4)
    rows = []
    for e in est:
        env = C * math.exp(-math.sqrt(e.n) / 4)
        rows.append({"n": e.n, "fraction": e.b2, "envelope": env, "ok": e.b2 <= env * (1 + 1e-12)})
    return C, rows


def sqrt_decay_fit(estimates, which: str = "b1"):
    """Slope of log(fraction) against sqrt(n); nan with fewer than two positive points."""
    pts = [(math.sqrt(e.n), getattr(e, which)) for e in estimates if getattr(e, which) > 0]
    if len(pts) < 2:
        return float("nan")
    return float(stats.linregress([p[0] for p in pts], [math.log(p[1]) for p in pts]).slope)


# ---------------------------------------------------------------------------
# exponents


@dataclass(frozen=True)
class ExponentEstimate:
    theta: float
    x: float
    steps: int
    vertical: float
    horizontal: float
    hit_critical: bool


def horizontal_exponent(d: int, n: int) -> float:
    """Birkhoff average of log|g'| for g = d theta, accumulated like the vertical one."""
    m, e = math.frexp(float(d))
    return (e + math.log2(m)) * LN2 if n else float("nan")


def _vertical(sp, digits, x, n):
    E, S, hit = K.vertical_log2(*_kernel_args(sp), sp.d, window_digits(sp.d), digits, float(x), n, CRIT_GUARD)
    if hit >= 0:
        return -math.inf, True
    return ((E + S) / n) * LN2, False


def vertical_exponent(sp: SkewProduct, theta, x: float, n: int) -> ExponentEstimate:
    """Finite-time exponents (1/n) sum log|df/dx| and (1/n) sum log|g'| over j < n."""
    if n <= 0:
        raise PreconditionViolated("n must be positive")
    bp = base_point(theta, sp.d, n)
    v, hit = _vertical(sp, bp.digits, x, n)
    return ExponentEstimate(_theta_float(theta), float(x), n, v, horizontal_exponent(sp.d, n), hit)


def _census_chunk(lo, hi, sp, n, seed):
    dom = invariant_domain(sp)
    out = []
    for i in range(lo, hi):
        rng = stream(seed, i, "census")
        x = _sample_x(rng, sp, dom)
        bp = BasePoint.random(rng, sp.d, n)
        v, hit = _vertical(sp, bp.digits, x, n)
        out.append(ExponentEstimate(bp.theta, x, n, v, horizontal_exponent(sp.d, n), hit))
    return out


@dataclass(frozen=True)
class CensusSummary:
    count: int
    steps: int
    positive: int
    hits: int
    fraction_positive: float
    quantiles: dict
    mean: float
    histogram: tuple
    bin_edges: tuple


QUANTILES = (0.0, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 1.0)


def summarize_census(estimates, n: int, bins: int = 20) -> CensusSummary:
    if not estimates:
        return CensusSummary(0, n, 0, 0, float("nan"), {}, float("nan"), (), ())
    v = np.array([e.vertical for e in estimates])
    fin = v[np.isfinite(v)]
    hits = int(sum(e.hit_critical for e in estimates))
    pos = int(np.count_nonzero(v > 0))
    q = {str(p): float(np.quantile(fin, p)) for p in QUANTILES} if fin.size else {}
    hist, edges = np.histogram(fin, bins=bins) if fin.size else (np.array([]), np.array([]))
    return CensusSummary(len(v), n, pos, hits, pos / len(v), q, float(fin.mean()) if fin.size else float("nan"),
                         tuple(int(h) for h in hist), tuple(float(e) for e in edges))


def exponent_census(sp: SkewProduct, n: int, count: int, seed: int, workers: int = 1):
    """(estimates, summary) for ``count`` random points; deterministic per seed."""
    est = run_indexed(_census_chunk, count, workers, chunk=8, sp=sp, n=n, seed=seed) if count else []
    return est, summarize_census(est, n)
