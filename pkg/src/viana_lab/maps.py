"""One-dimensional maps with a degenerate critical point and their skew products.

Two families are supported:

* ``odd``: a circle map that is ``2x mod 1`` away from ``x = 1/2`` and the
  power ``A (x - 1/2)**D`` (``D`` odd) near it;
* ``even``: an interval map that is the flat power ``a0 - A x**D`` (``D``
  even) near ``0`` and a quadratic ``a0 + shift - x**2`` far from it.

The inner and outer pieces are joined by quintic bridges matching value,
first and second derivative at both ends.  Maps are immutable; evaluation
goes through the compiled kernels in :mod:`viana_lab._kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import optimize
from scipy.interpolate import BPoly, PPoly

from . import _kernels as K
from .errors import (
    BoundViolated,
    BudgetExceeded,
    ConfigError,
    DegenerateWidth,
    MonotonicityViolated,
    NoBracket,
    NoReferenceOrbit,
    NotInvariant,
)

SLOPE_TARGET = 7.0 / 4.0
GRID_POINTS = 2 ** 16
BOUND_SLACK = 1e-6
SLOPE_TOL = 1e-9
LANDING_TOL = 1e-9

ODD_DEFAULT_WIDTHS = (0.1, 0.25)


def even_default_inner(order: int, slope_target: float = SLOPE_TARGET, outer: float = 1.0) -> float:
    """Inner half-width for which the even bridge is a cubic with linear h''.

    Such a bridge has monotone h' and h'' by construction.  For order 2 the
    answer is 7/8 and the map is the pure quadratic.
    """
    D, st, W = order, slope_target, outer

    def gap(w):
        return (W - w) * ((D - 1) * st / w + 2.0) - 2.0 * (2.0 * W - st)

    return float(optimize.brentq(gap, st / (2.0 * W) * 0.5, W * (1 - 1e-12), xtol=1e-15))


@dataclass(frozen=True)
class MapSpec:
    parity: str = "odd"
    order: int = 3
    inner_half_width: Optional[float] = None
    outer_half_width: Optional[float] = None
    a0: Optional[float] = None
    slope_target: float = SLOPE_TARGET
    landing_time: int = 3

    def resolved(self) -> "MapSpec":
        """Fill default widths and validate the invariants."""
        if self.parity not in ("odd", "even"):
            raise ConfigError(f"parity must be 'odd' or 'even', got {self.parity!r}")
        D = int(self.order)
        if D < 2:
            raise ConfigError(f"critical order must be >= 2, got {D}")
        if self.parity == "odd" and D % 2 == 0:
            raise ConfigError(f"odd family needs an odd order, got {D}")
        if self.parity == "even" and D % 2 == 1:
            raise ConfigError(f"even family needs an even order, got {D}")
        if self.parity == "odd":
            w, W = ODD_DEFAULT_WIDTHS
        else:
            W = 1.0 if self.outer_half_width is None else float(self.outer_half_width)
            w = even_default_inner(D, self.slope_target, W) if W > 0 else 0.0
        w = w if self.inner_half_width is None else float(self.inner_half_width)
        W = W if self.outer_half_width is None else float(self.outer_half_width)
        if not 0.0 < w < W:
            raise ConfigError(f"need 0 < inner_half_width < outer_half_width, got {w} and {W}")
        if self.parity == "odd" and W >= 0.5:
            raise ConfigError("outer interval centred at 1/2 must not contain 0 (outer_half_width < 1/2)")
        if self.parity == "even" and W != 1.0:
            raise ConfigError("even family uses the outer interval (-1, 1)")
        if self.slope_target <= 0:
            raise ConfigError("slope_target must be positive")
        if self.a0 is not None and not 1.0 < self.a0 < 2.0:
            raise ConfigError(f"a0 must lie in (1, 2), got {self.a0}")
        return replace(self, order=D, inner_half_width=w, outer_half_width=W)


@dataclass(frozen=True)
class Bridge:
    """Quintic on ``[lo, hi]`` stored in the local power basis about ``lo``."""

    lo: float
    hi: float
    coeffs: np.ndarray = field(repr=False)

    def __call__(self, x, nu=0):
        x = np.asarray(x, dtype=float)
        t = x - self.lo
        c = np.polynomial.polynomial.polyder(self.coeffs, nu) if nu else self.coeffs
        return np.polynomial.polynomial.polyval(t, c)

    def monotonicity(self, points=GRID_POINTS):
        """Signs of the finite differences of p' and p'' on a dense grid."""
        x = np.linspace(self.lo, self.hi, points)
        out = {}
        for nu in (1, 2):
            diff = np.diff(self(x, nu))
            scale = max(np.abs(self(x, nu)).max(), 1.0)
            tol = 1e-12 * scale
            out[nu] = bool(np.all(diff >= -tol) or np.all(diff <= tol))
        return out


@dataclass(frozen=True)
class ReferenceOrbit:
    target: float
    multiplier: float
    landing_time: int
    residual: float


@dataclass(frozen=True)
class DegenerateMap:
    spec: MapSpec
    amplitude: float
    bridge_right: Bridge
    bridge_left: Bridge
    critical_point: float
    outer_shift: float = 0.0
    reference_orbit: Optional[ReferenceOrbit] = None

    @property
    def is_circle(self) -> bool:
        return self.spec.parity == "odd"

    @property
    def order(self) -> int:
        return self.spec.order

    @property
    def params(self) -> np.ndarray:
        s = self.spec
        return np.array(
            [
                1.0 if self.is_circle else 0.0,
                float(s.order),
                self.amplitude,
                s.inner_half_width,
                s.outer_half_width,
                0.0 if s.a0 is None else s.a0,
                self.outer_shift,
                self.critical_point,
            ]
        )

    @property
    def bridge_coeffs(self) -> np.ndarray:
        return np.ascontiguousarray(self.bridge_right.coeffs, dtype=float)

    def jet(self, x) -> np.ndarray:
        """Array of shape (3, n) holding h, h', h'' at the points x."""
        xs = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        return K.map_jet_array(self.params, self.bridge_coeffs, xs)

    def __call__(self, x):
        return _shaped(self.jet(x)[0], x)

    def derivative(self, x, order=1):
        return _shaped(self.jet(x)[order], x)

    def crit_distance(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_circle:
            return np.abs(np.mod(x, 1.0) - 0.5)
        return np.abs(x - self.critical_point)


def _shaped(values, like):
    if np.ndim(like) == 0:
        return float(values[0])
    return values.reshape(np.shape(like))


def solve_amplitude(order: int, half_width: float, slope_target: float = SLOPE_TARGET) -> float:
    """Amplitude A of ``A u**order`` whose slope at ``|u| = half_width`` is slope_target."""
    if order < 2 or not 0.0 < half_width < 1.0 or slope_target <= 0:
        raise ConfigError(f"invalid amplitude request: order={order}, half_width={half_width}")
    with np.errstate(all="ignore"):
        A = slope_target / (order * np.float64(half_width) ** (order - 1))
    if not np.isfinite(A):
        raise DegenerateWidth(f"amplitude overflows for half_width={half_width}, order={order}")
    return float(A)


def build_bridge(left_jet, right_jet, interval, check_monotone=True) -> Bridge:
    """Unique quintic matching (value, d1, d2) at both ends of ``interval``.

    With ``check_monotone`` the first and second derivatives must be monotone
    on a 2**16 grid, otherwise MonotonicityViolated is raised.
    """
    lo, hi = map(float, interval)
    jets = [list(map(float, left_jet)), list(map(float, right_jet))]
    if not hi > lo or not np.all(np.isfinite(jets)):
        raise ConfigError(f"bridge needs finite jets and a non-degenerate interval, got {interval}")
    pp = PPoly.from_bernstein_basis(BPoly.from_derivatives([lo, hi], jets))
    coeffs = pp.c[::-1, 0].copy()
    bridge = Bridge(lo, hi, coeffs)
    if check_monotone:
        mono = bridge.monotonicity()
        bad = [f"h{'′' * nu}" for nu, ok in mono.items() if not ok]
        if bad:
            raise MonotonicityViolated(f"bridge on [{lo}, {hi}] is not monotone in {', '.join(bad)}")
    return bridge


def _bridge_jets(spec: MapSpec, A: float):
    D, w, W, st = spec.order, spec.inner_half_width, spec.outer_half_width, spec.slope_target
    curv = D * (D - 1) * A * w ** (D - 2)
    if spec.parity == "odd":
        return (A * w ** D, st, curv), (2.0 * W, 2.0, 0.0), 0.0
    a0 = 0.0 if spec.a0 is None else spec.a0
    # h' on the bridge is the cubic Hermite interpolant of its end jets; the
    # outer quadratic is shifted vertically so that values join up.
    y0, y1, m0, m1 = -st, -2.0 * W, -curv, -2.0
    L = W - w
    hw = a0 - A * w ** D
    hW = hw + L * (y0 + y1) / 2.0 + L * L * (m0 - m1) / 12.0
    shift = hW - a0 + W * W
    return (hw, y0, m0), (hW, y1, m1), shift


def _assemble(spec: MapSpec) -> DegenerateMap:
    spec = spec.resolved()
    A = solve_amplitude(spec.order, spec.inner_half_width, spec.slope_target)
    left, right, shift = _bridge_jets(spec, A)
    w, W = spec.inner_half_width, spec.outer_half_width
    br = build_bridge(left, right, (w, W), check_monotone=False)
    bl = Bridge(-W, -w, _mirror(br, -1.0 if spec.parity == "odd" else 1.0))
    return DegenerateMap(
        spec=spec,
        amplitude=A,
        bridge_right=br,
        bridge_left=bl,
        critical_point=0.5 if spec.parity == "odd" else 0.0,
        outer_shift=shift,
    )


def _mirror(br: Bridge, sign: float) -> np.ndarray:
    # left bridge about its own left end -W: q(t) = sign * p(L - t)
    L = br.hi - br.lo
    p = np.polynomial.polynomial.Polynomial(br.coeffs)
    return sign * p(np.polynomial.polynomial.Polynomial([L, -1.0])).coef


def build_map(spec: MapSpec, strict: bool = False) -> DegenerateMap:
    """Build and verify a map, then attach its reference orbit.

    The hard bounds (|h'| <= 4, endpoint slope calibration, |h'| <= target on
    the inner piece and >= target off it) raise BoundViolated.  The remaining
    invariants are reported by :func:`check_map`; with ``strict`` any failed
    check raises.
    """
    spec = spec.resolved()
    if spec.parity == "even" and spec.a0 is None:
        spec = replace(spec, a0=calibrate_preperiodic(spec, spec.landing_time))
    m = _assemble(spec)
    report = check_map(m)
    for name in HARD_CHECKS:
        if not report[name].ok:
            raise BoundViolated(f"{name}: value {report[name].value:.6g} vs limit {report[name].limit:.6g}")
    if strict:
        for name, chk in report.items():
            if not chk.ok:
                exc = MonotonicityViolated if name.startswith("bridge_monotone") else BoundViolated
                raise exc(f"{name}: value {chk.value:.6g} vs limit {chk.limit:.6g}")
    return replace(m, reference_orbit=locate_reference_orbit(m))


def evaluate(m: DegenerateMap, x: float, deriv_order: int = 0) -> float:
    if deriv_order not in (0, 1, 2):
        raise ConfigError("deriv_order must be 0, 1 or 2")
    v = K.map_jet(m.params, m.bridge_coeffs, float(x))
    return float(v[deriv_order])


@dataclass(frozen=True)
class Check:
    value: float
    limit: float
    ok: bool
    kind: str = "le"


HARD_CHECKS = ("endpoint_slope", "max_abs_h1", "inner_slope", "outer_slope")


def pieces(m: DegenerateMap, points=GRID_POINTS):
    """Dense sample grids per piece: inner, bridges, outer."""
    s = m.spec
    c, w, W = m.critical_point, s.inner_half_width, s.outer_half_width
    grids = {
        "inner": np.linspace(c - w, c + w, points),
        "bridge_left": np.linspace(c - W, c - w, points),
        "bridge_right": np.linspace(c + w, c + W, points),
    }
    if m.is_circle:
        grids["outer"] = np.linspace(c + W, c + 1 - W, points)
    else:
        hi = max(2.0, W + 1.0)
        grids["outer"] = np.concatenate([np.linspace(-hi, -W, points // 2), np.linspace(W, hi, points // 2)])
    return grids


def check_map(m: DegenerateMap, points=GRID_POINTS):
    """Evaluate every map invariant on dense grids; returns {name: Check}."""
    s = m.spec
    D, w, st = s.order, s.inner_half_width, s.slope_target
    grids = pieces(m, points)
    jets = {k: m.jet(v) for k, v in grids.items()}
    if not m.is_circle and s.a0 is not None:
        # outside the invariant interval the quadratic is never visited
        lim = s.a0 + 0.1
        g = grids["outer"]
        keep = np.abs(g) <= lim
        jets["outer"] = jets["outer"][:, keep]
    c = m.critical_point
    ends = np.abs(m.jet(np.array([c - w, c + w]))[1])
    everything = np.concatenate(list(jets.values()), axis=1)
    h2_bound = 7.0 * (D - 1) / (4.0 * 2.0 * w)
    out = {}
    out["endpoint_slope"] = Check(float(np.max(np.abs(ends - st))), SLOPE_TOL, bool(np.all(np.abs(ends - st) <= SLOPE_TOL)))
    mx1 = float(np.abs(everything[1]).max())
    out["max_abs_h1"] = Check(mx1, 4.0, mx1 <= 4.0)
    mx2 = float(np.abs(everything[2]).max())
    out["max_abs_h2"] = Check(mx2, h2_bound * (1 + BOUND_SLACK), mx2 <= h2_bound * (1 + BOUND_SLACK))
    # the inner power alone reaches (D-1) * slope / w = twice the stated bound
    out["max_abs_h2_inner_attainable"] = Check(mx2, 2 * h2_bound * (1 + BOUND_SLACK), mx2 <= 2 * h2_bound * (1 + BOUND_SLACK))
    inner = float(np.abs(jets["inner"][1]).max())
    out["inner_slope"] = Check(inner, st * (1 + SLOPE_TOL), inner <= st * (1 + SLOPE_TOL))
    off = np.concatenate([jets[k][1] for k in ("bridge_left", "bridge_right", "outer")])
    lo = float(np.abs(off).min())
    out["outer_slope"] = Check(lo, st * (1 - SLOPE_TOL), lo >= st * (1 - SLOPE_TOL), "ge")
    br = np.abs(np.concatenate([jets["bridge_left"][1], jets["bridge_right"][1]]))
    mxb = float(br.max())
    out["bridge_slope_max"] = Check(mxb, 2.0, mxb <= 2.0 * (1 + SLOPE_TOL))
    for side in ("bridge_left", "bridge_right"):
        for nu, label in ((1, "h1"), (2, "h2")):
            d = np.diff(jets[side][nu])
            tol = 1e-12 * max(np.abs(jets[side][nu]).max(), 1.0)
            ok = bool(np.all(d >= -tol) or np.all(d <= tol))
            out[f"bridge_monotone_{label}_{side.split('_')[1]}"] = Check(float(np.sum(np.diff(np.sign(d[np.abs(d) > tol])) != 0)), 0.0, ok)
    if m.is_circle:
        ex = [abs(evaluate(m, 0.5)), abs(evaluate(m, 0.0))]
        g = grids["outer"]
        ex.append(float(np.abs(jets["outer"][1] - 2.0).max()))
        ex.append(float(np.abs(jets["outer"][2]).max()))
        out["odd_exactness"] = Check(max(ex), 0.0, max(ex) == 0.0)
    return out


def locate_reference_orbit(m: DegenerateMap, budget: int = 64, tol: float = LANDING_TOL) -> ReferenceOrbit:
    """Expanding fixed point onto which the critical orbit lands."""
    if m.is_circle:
        if evaluate(m, m.critical_point) != 0.0 or evaluate(m, 0.0, 1) != 2.0:
            raise NoReferenceOrbit("circle map does not send 1/2 to the fixed point 0")
        return ReferenceOrbit(0.0, 2.0, 1, 0.0)
    fixed = _expanding_fixed_points(m)
    if not fixed:
        raise NoReferenceOrbit("no expanding fixed point")
    x = m.critical_point
    for k in range(1, budget + 1):
        x = evaluate(m, x)
        for q in fixed:
            if abs(x - q) <= tol:
                return ReferenceOrbit(q, abs(evaluate(m, q, 1)), k, abs(x - q))
    raise NoReferenceOrbit(f"critical orbit does not land on {fixed} within {budget} steps")


def _expanding_fixed_points(m: DegenerateMap):
    a0 = m.spec.a0
    xs = np.linspace(-a0 - 0.5, a0 + 0.5, 4001)
    g = m(xs) - xs
    roots = []
    for i in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0)[0]:
        r = optimize.brentq(lambda t: evaluate(m, t) - t, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if abs(evaluate(m, r, 1)) > 1.0 and not any(abs(r - q) < 1e-12 for q in roots):
            roots.append(float(r))
    return roots


def _positive_fixed_point(m: DegenerateMap) -> float:
    a0 = m.spec.a0
    return optimize.brentq(lambda t: evaluate(m, t) - t, 0.0, a0, xtol=1e-16, rtol=4 * np.finfo(float).eps)


def _landing_residual(spec: MapSpec, a: float, ell: int) -> float:
    m = _assemble(replace(spec, a0=a))
    x = m.critical_point
    for _ in range(ell):
        x = evaluate(m, x)
    return x - _positive_fixed_point(m)


def calibrate_preperiodic(spec: MapSpec, ell: int = 3, tol: float = 1e-12, bracket=None) -> float:
    """a0 such that the critical orbit lands on the positive fixed point after ell steps."""
    spec = spec.resolved()
    if spec.parity != "even":
        raise ConfigError("pre-periodic calibration applies to the even family only")
    F = lambda a: _landing_residual(spec, a, ell)  # noqa: E731
    if bracket is None:
        grid = np.linspace(1.0 + 1e-6, 2.0 - 1e-6, 401)
        vals = np.array([F(a) for a in grid])
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if idx.size == 0:
            raise NoBracket("no sign change of the landing residual in (1, 2)")
        bracket = (grid[idx[0]], grid[idx[0] + 1])
    # a0 must stay inside the open interval (1, 2)
    lo, hi = max(float(bracket[0]), 1.0 + 1e-12), min(float(bracket[1]), 2.0 - 1e-12)
    flo, fhi = F(lo), F(hi)
    if np.sign(flo) * np.sign(fhi) > 0:
        raise NoBracket(f"landing residual has the same sign at {lo} and {hi}")
    a = optimize.bisect(F, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    res = abs(F(a))
    if res > tol:
        raise NoBracket(f"bisection stalled with residual {res:.3g} > {tol:.3g}")
    return float(a)


# ---------------------------------------------------------------------------
# skew products


@dataclass(frozen=True)
class Forcing:
    """Trigonometric polynomial sum(a_k cos 2 pi k t + b_k sin 2 pi k t)."""

    ks: tuple = (1,)
    cos: tuple = (0.0,)
    sin: tuple = (1.0,)

    def arrays(self):
        return (
            np.asarray(self.ks, dtype=float),
            np.asarray(self.cos, dtype=float),
            np.asarray(self.sin, dtype=float),
        )

    def jet(self, theta):
        th = np.asarray(theta, dtype=float)[..., None]
        k, a, b = self.arrays()
        om = 2 * np.pi * k
        c, s = np.cos(om * th), np.sin(om * th)
        v = (a * c + b * s).sum(-1)
        d1 = (om * (b * c - a * s)).sum(-1)
        d2 = (-(om ** 2) * (a * c + b * s)).sum(-1)
        return v, d1, d2

    def cd_norm(self, D: int) -> float:
        """Coefficient bound on max_{j<=D} sup |b^(j)|."""
        k, a, b = self.arrays()
        amp = np.abs(a) + np.abs(b)
        return float(max(np.sum((2 * np.pi * k) ** j * amp) for j in range(D + 1)))


@dataclass(frozen=True)
class InvariantDomain:
    lo: float = 0.0
    hi: float = 1.0
    circle: bool = True

    def sample(self, u):
        return self.lo + (self.hi - self.lo) * np.asarray(u)


@dataclass(frozen=True)
class SkewProduct:
    d: int
    alpha: float
    map: DegenerateMap
    forcing: Forcing = Forcing()

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 16:
            raise ConfigError(f"base degree d must be an integer >= 16, got {self.d}")
        if not 0.0 < self.alpha:
            raise ConfigError("alpha must be positive")

    @property
    def forcing_arrays(self):
        return self.forcing.arrays()

    def apply(self, theta, x):
        return skew_apply(self, theta, x)


def skew_apply(sp: SkewProduct, theta, x):
    theta = np.asarray(theta, dtype=float)
    b = sp.forcing.jet(theta)[0]
    h = sp.map(x)
    xn = sp.alpha * b + h
    if sp.map.is_circle:
        xn = np.mod(xn, 1.0)
        xn = np.where(xn >= 1.0, 0.0, xn)
    tn = np.mod(sp.d * theta, 1.0)
    if np.ndim(tn) == 0:
        return float(tn), float(xn)
    return tn, xn


def skew_jacobian(sp: SkewProduct, theta, x):
    """(g', df/dtheta, df/dx); the derivative matrix is lower triangular."""
    _, b1, _ = sp.forcing.jet(theta)
    dx = sp.map.derivative(x)
    g1 = np.full(np.shape(theta), float(sp.d)) if np.ndim(theta) else float(sp.d)
    dth = sp.alpha * b1
    if np.ndim(dth) == 0:
        dth = float(dth)
    return g1, dth, dx


def skew_hessian(sp: SkewProduct, theta, x):
    """(d2f/dtheta2, d2f/dtheta dx, d2f/dx2, g'')."""
    _, _, b2 = sp.forcing.jet(theta)
    return sp.alpha * b2, np.zeros_like(b2), sp.map.derivative(x, 2), np.zeros_like(b2)


def make_perturbed_skew(sp: SkewProduct, coefficients) -> SkewProduct:
    """Add ``alpha * sum(a cos 2 pi k t + b sin 2 pi k t)`` to the forcing.

    ``coefficients`` is an iterable of (k, a, b) in units of alpha.  The
    C^D distance to the unperturbed map, alpha times the coefficient bound,
    may not exceed alpha.
    """
    extra = [(int(k), float(a), float(b)) for k, a, b in coefficients]
    if not extra:
        return sp
    delta = Forcing(tuple(e[0] for e in extra), tuple(e[1] for e in extra), tuple(e[2] for e in extra))
    norm = delta.cd_norm(sp.map.order)
    if norm > 1.0:
        raise BudgetExceeded(f"C^{sp.map.order} distance {norm:.4g} alpha exceeds alpha")
    merged = {}
    for k, a, b in zip(sp.forcing.ks, sp.forcing.cos, sp.forcing.sin):
        merged[int(k)] = [a, b]
    for k, a, b in extra:
        cur = merged.setdefault(k, [0.0, 0.0])
        cur[0] += a
        cur[1] += b
    ks = tuple(sorted(merged))
    f = Forcing(ks, tuple(merged[k][0] for k in ks), tuple(merged[k][1] for k in ks))
    return replace(sp, forcing=f)


def invariant_domain(sp: SkewProduct, margin: float = 1e-3, points: int = 4097) -> InvariantDomain:
    """Forward-invariant fiber domain; the whole circle for the odd family."""
    m = sp.map
    if m.is_circle:
        return InvariantDomain()
    th = np.linspace(0.0, 1.0, points, endpoint=False)
    b = sp.forcing.jet(th)[0]
    bmax, bmin = sp.alpha * b.max(), sp.alpha * b.min()
    hi = float(m(m.critical_point) + bmax + margin)
    lo = float(m(hi) + bmin - margin)
    xs = np.linspace(lo, hi, points)
    img = m(xs)
    top, bot = float(img.max() + bmax), float(img.min() + bmin)
    if not (lo < bot and top < hi):
        raise NotInvariant(f"image [{bot:.6g}, {top:.6g}] escapes [{lo:.6g}, {hi:.6g}]")
    return InvariantDomain(lo, hi, circle=False)


def sample_map(m: DegenerateMap, points: int = 1025) -> np.ndarray:
    """Rows (x, h, h', h'') over one period / the outer interval."""
    if m.is_circle:
        xs = np.linspace(0.0, 1.0, points, endpoint=False)
    else:
        a0 = m.spec.a0
        xs = np.linspace(-a0, a0, points)
    j = m.jet(xs)
    return np.column_stack([xs, j[0], j[1], j[2]])


def default_skew(alpha: float = 1e-6, d: int = 16, spec: Optional[MapSpec] = None) -> SkewProduct:
    return SkewProduct(d=d, alpha=alpha, map=build_map(spec or MapSpec()))
