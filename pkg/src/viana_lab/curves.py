"""Admissible curves, Markov partitions and curve iteration.

A curve is the graph of ``X: S^1 -> fiber`` with ``|X'|, |X''| <= alpha``.
Iterated curves are not stored as resampled data: a curve remembers its
base trigonometric polynomial and the branch it was pushed along (a
partition element of ``theta -> d theta``), and every evaluation reruns the
forward orbit from the base point.  Values and derivatives at any parameter
are therefore exact up to rounding, and the derivatives come from the
chain-rule recursions rather than from differencing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels as K
from .errors import AdmissibilityLost, IndexOutOfRange, NoSeparatedSets, NotAdmissible
from .maps import SkewProduct

DEFAULT_GRID = 2 ** 14
REFINE = 16
ADMISSIBLE_RTOL = 1e-12


@dataclass(frozen=True)
class BaseCurve:
    """X0(theta) = x0 + sum(a_k cos 2 pi k theta + b_k sin 2 pi k theta)."""

    x0: float
    ks: tuple = ()
    cos: tuple = ()
    sin: tuple = ()

    def arrays(self):
        return (
            np.asarray(self.ks, dtype=float),
            np.asarray(self.cos, dtype=float),
            np.asarray(self.sin, dtype=float),
        )

    def derivative_bounds(self):
        """Coefficient bounds on sup|X'| and sup|X''|."""
        k, a, b = self.arrays()
        amp = np.abs(a) + np.abs(b)
        om = 2 * np.pi * k
        return float(np.sum(om * amp)), float(np.sum(om * om * amp))


@dataclass(frozen=True)
class PartitionElement:
    """[k / d**n, (k + 1) / d**n), an element of the level-n Markov partition."""

    level: int
    index: int
    d: int = 16

    def __post_init__(self):
        if self.level < 0:
            raise IndexOutOfRange(f"level must be >= 0, got {self.level}")
        if not 0 <= self.index < self.d ** self.level:
            raise IndexOutOfRange(f"index {self.index} outside [0, {self.d}**{self.level})")

    @property
    def name(self) -> str:
        return f"{self.level}:{self.index}"

    def interval(self):
        den = self.d ** self.level
        return Fraction(self.index, den), Fraction(self.index + 1, den)

    def digits(self):
        """Base-d digits of the index, most significant first."""
        out, k = [], self.index
        for _ in range(self.level):
            out.append(k % self.d)
            k //= self.d
        return out[::-1]

    def contains(self, theta) -> bool:
        lo, hi = self.interval()
        return lo <= Fraction(theta) < hi


def partition_element(n: int, k: int, d: int = 16) -> PartitionElement:
    if n < 1:
        raise IndexOutOfRange(f"partition level must be >= 1, got {n}")
    return PartitionElement(n, k, d)


def preimage_branches(theta: float, d: int = 16):
    """The d pre-images (theta + j) / d, ordered by branch digit j."""
    return [(theta + j) / d for j in range(d)]


def _chain(level: int, index: int, d: int):
    """Base points theta_j = offs[j] + scales[j] * t along a branch."""
    offs = np.empty(level)
    scales = np.empty(level)
    for j in range(level):
        den = d ** (level - j)
        offs[j] = float(Fraction(index % den, den))
        scales[j] = 1.0 / den if den < 2 ** 1023 else 0.0
    return offs, scales


@dataclass(frozen=True, eq=False)
class AdmissibleCurve:
    """Curve phi^level(graph X0 | omega), omega = [index / d**level, ...).

    ``samples`` holds (X, X', X'') on the uniform grid of ``grid_size``
    points and is verified against the admissibility bounds on creation.
    """

    base: BaseCurve
    alpha: float
    grid_size: int = DEFAULT_GRID
    level: int = 0
    index: int = 0
    sp: Optional[SkewProduct] = None
    circle: bool = True
    samples: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = self.grid_size
        if g < 2 or g & (g - 1):
            raise NotAdmissible(f"grid size must be a power of two, got {g}")
        if self.level and self.sp is None:
            raise NotAdmissible("iterated curves need their skew product")
        object.__setattr__(self, "samples", self._grid_jet())

    @property
    def d(self) -> int:
        return self.sp.d if self.sp is not None else 16

    @property
    def theta(self) -> np.ndarray:
        return np.arange(self.grid_size) / self.grid_size

    @property
    def X(self):
        return self.samples[0]

    def jet(self, t) -> np.ndarray:
        """(X, X', X'') at parameters t; shape (3, len(t))."""
        t = np.ascontiguousarray(np.atleast_1d(np.asarray(t, dtype=float)))
        bk, ba, bb = self.base.arrays()
        if self.level == 0:
            v, d1, d2 = _trig_jet(bk, ba, bb, t)
            x = self.base.x0 + v
            if self.circle:
                x = np.mod(x, 1.0)
            return np.vstack([x, d1, d2])
        sp = self.sp
        offs, scales = _chain(self.level, self.index, sp.d)
        ks, ca, sa = sp.forcing_arrays
        out = np.empty((3, t.size))
        K.propagate_curve(sp.map.params, sp.map.bridge_coeffs, ks, ca, sa, sp.alpha, float(sp.d),
                          float(self.base.x0), bk, ba, bb, offs, scales, t, out)
        return out

    def _grid_jet(self) -> np.ndarray:
        if self.level == 0:
            return self.jet(self.theta)
        sp = self.sp
        offs, scales = _chain(self.level, self.index, sp.d)
        ks, ca, sa = sp.forcing_arrays
        bk, ba, bb = self.base.arrays()
        out = np.empty((3, self.grid_size))
        K.propagate_curve_grid(sp.map.params, sp.map.bridge_coeffs, ks, ca, sa, sp.alpha, float(sp.d),
                               float(self.base.x0), bk, ba, bb, offs, scales, self.grid_size, out)
        return out

    def values(self, t):
        j = self.jet(t)
        return j[0], j[1]

    def bounds(self):
        """(max|X'|, max|X''|) over the samples."""
        return float(np.abs(self.samples[1]).max()), float(np.abs(self.samples[2]).max())

    def is_admissible(self) -> bool:
        m1, m2 = self.bounds()
        lim = self.alpha * (1 + ADMISSIBLE_RTOL)
        return m1 <= lim and m2 <= lim

    def table(self) -> np.ndarray:
        """Rows (theta, X, X', X'')."""
        return np.column_stack([self.theta, self.samples.T])


def _trig_jet(ks, ca, sa, t):
    if ks.size == 0:
        z = np.zeros_like(t)
        return z, z.copy(), z.copy()
    om = 2 * np.pi * ks
    arg = np.outer(t, om)
    c, s = np.cos(arg), np.sin(arg)
    v = c @ ca + s @ sa
    d1 = (om * (c * sa - s * ca)).sum(1)
    d2 = -(om * om * (c * ca + s * sa)).sum(1)
    return v, d1, d2


def make_curve(kind: str, alpha: float, circle: bool = True, grid_size: int = DEFAULT_GRID,
               x0: float = 0.3, amplitude: float = 0.0, k: int = 1, phase: float = 0.0,
               rng: Optional[np.random.Generator] = None, modes: int = 6, fill: Optional[float] = None,
               domain=None) -> AdmissibleCurve:
    """Test-fixture curves: ``constant``, ``sine`` or ``random``.

    ``random`` draws a trigonometric polynomial with ``modes`` frequencies
    scaled so that the coefficient bound on |X''| is ``fill * alpha``; the
    offset is uniform over ``domain`` (lo, hi) when given.
    """
    if kind == "constant":
        base = BaseCurve(float(x0))
    elif kind == "sine":
        base = BaseCurve(float(x0), (int(k),), (amplitude * math.sin(phase),), (amplitude * math.cos(phase),))
    elif kind == "random":
        if rng is None:
            raise NotAdmissible("random curves need a generator")
        ks = np.arange(1, modes + 1)
        a = rng.standard_normal(modes) / ks ** 2
        b = rng.standard_normal(modes) / ks ** 2
        f = rng.uniform(0.2, 1.0) if fill is None else float(fill)
        scale = f * alpha / np.sum((2 * np.pi * ks) ** 2 * (np.abs(a) + np.abs(b)))
        lo, hi = (0.0, 1.0) if domain is None else domain
        base = BaseCurve(float(rng.uniform(lo, hi)), tuple(int(v) for v in ks), tuple(a * scale), tuple(b * scale))
    else:
        raise NotAdmissible(f"unknown curve kind {kind!r}")
    curve = AdmissibleCurve(base, float(alpha), grid_size, circle=circle)
    if not curve.is_admissible():
        m1, m2 = curve.bounds()
        raise NotAdmissible(f"max|X'| = {m1:.6g}, max|X''| = {m2:.6g} exceed alpha = {alpha:.6g}")
    if domain is not None and not circle:
        lo, hi = domain
        if curve.X.min() <= lo or curve.X.max() >= hi:
            raise NotAdmissible("curve leaves the invariant domain")
    return curve


def iterate_over_element(curve: AdmissibleCurve, sp: SkewProduct, omega: PartitionElement) -> AdmissibleCurve:
    """phi^n(graph X | omega) for omega in the level-n partition, as a new curve."""
    if omega.d != sp.d:
        raise IndexOutOfRange(f"element has d={omega.d}, map has d={sp.d}")
    if curve.sp is not None and curve.sp is not sp:
        raise AdmissibilityLost("curve was built over a different skew product")
    out = AdmissibleCurve(
        curve.base,
        curve.alpha,
        curve.grid_size,
        level=curve.level + omega.level,
        index=curve.index * sp.d ** omega.level + omega.index,
        sp=sp,
        circle=sp.map.is_circle,
    )
    if not out.is_admissible():
        m1, m2 = out.bounds()
        raise AdmissibilityLost(
            f"image over {omega.name}: max|Y'| = {m1:.6g}, max|Y''| = {m2:.6g}, alpha = {curve.alpha:.6g}"
        )
    return out


def iterate_once(curve: AdmissibleCurve, sp: SkewProduct, omega: PartitionElement) -> AdmissibleCurve:
    if omega.level != 1:
        raise IndexOutOfRange(f"iterate_once needs a level-1 element, got level {omega.level}")
    return iterate_over_element(curve, sp, omega)


# ---------------------------------------------------------------------------
# full-circle images: Y_j(theta) = f(g^{j-1} theta, Y_{j-1}(theta))


def forward_iterates(curve: AdmissibleCurve, sp: SkewProduct, steps: int, thetas):
    """Arrays (vals, ders) of shape (steps + 1, len(thetas)).

    ders holds the derivative in the original parameter theta.
    """
    th = np.asarray(thetas, dtype=float).copy()
    X, X1 = curve.values(th)
    vals = np.empty((steps + 1, th.size))
    ders = np.empty_like(vals)
    vals[0], ders[0] = X, X1
    scale = 1.0
    m = sp.map
    for j in range(steps):
        b, b1, _ = sp.forcing.jet(th)
        jet = m.jet(X)
        X1 = sp.alpha * b1 * scale + jet[1] * X1
        X = sp.alpha * b + jet[0]
        if m.is_circle:
            X = np.mod(X, 1.0)
        scale *= sp.d
        th = np.mod(th * sp.d, 1.0)
        vals[j + 1], ders[j + 1] = X, X1
    return vals, ders


class ImageFunction:
    """theta -> Y_steps(theta) for a curve pushed forward over the whole circle."""

    def __init__(self, curve: AdmissibleCurve, sp: SkewProduct, steps: int = 1):
        self.curve, self.sp, self.steps = curve, sp, steps
        self.circle = sp.map.is_circle

    def values(self, thetas):
        vals, ders = forward_iterates(self.curve, self.sp, self.steps, thetas)
        return vals[-1], ders[-1]


def jittered_grid(size: int, rng: Optional[np.random.Generator]) -> np.ndarray:
    """Stratified grid (i + u_i) / size; uniform midpoints without rng."""
    i = np.arange(size)
    u = 0.5 if rng is None else rng.random(size)
    return (i + u) / size


def oscillation(values, circle: bool = False) -> float:
    """sup - inf; on the circle, the length of the shortest covering arc."""
    v = np.asarray(values.X if isinstance(values, AdmissibleCurve) else values, dtype=float)
    if v.size == 0:
        return 0.0
    if not circle:
        return float(v.max() - v.min())
    s = np.sort(np.mod(v, 1.0))
    gaps = np.diff(np.concatenate([s, [s[0] + 1.0]]))
    return float(1.0 - gaps.max())


def _inside(v, lo, hi, circle):
    if circle:
        return np.mod(v - lo, 1.0) < (hi - lo)
    return (v > lo) & (v < hi)


def strip_measure(fn, interval, grid_size: int = DEFAULT_GRID, refine: int = REFINE, circle: Optional[bool] = None) -> float:
    """Lebesgue measure of {theta : X(theta) in I} for I = (lo, hi).

    ``fn`` is anything with ``values(thetas) -> (X, X')``.  Cells whose
    endpoints disagree, or whose range could reach I, are re-evaluated on
    ``refine`` sub-cells.
    """
    lo, hi = map(float, interval)
    if circle is None:
        circle = getattr(fn, "circle", False)
    if hi <= lo:
        return 0.0
    if circle and hi - lo >= 1.0:
        return 1.0
    h = 1.0 / grid_size
    edges = np.arange(grid_size + 1) * h
    v, v1 = fn.values(edges)
    inside = _inside(v, lo, hi, circle)
    slack = np.maximum(np.abs(v1[:-1]), np.abs(v1[1:])) * h * 1.5 + 1e-15
    if circle:
        dlo = np.abs(np.mod(v - lo + 0.5, 1.0) - 0.5)
        dhi = np.abs(np.mod(v - hi + 0.5, 1.0) - 0.5)
    else:
        dlo, dhi = np.abs(v - lo), np.abs(v - hi)
    near = np.minimum(np.minimum(dlo[:-1], dlo[1:]), np.minimum(dhi[:-1], dhi[1:])) <= slack
    full = inside[:-1] & inside[1:] & ~near
    mixed = (inside[:-1] != inside[1:]) | near
    total = full.sum() * h
    cells = np.nonzero(mixed)[0]
    if cells.size:
        sub = (cells[:, None] + (np.arange(refine) + 0.5)[None, :] / refine) * h
        sv, _ = fn.values(sub.ravel())
        total += _inside(sv, lo, hi, circle).sum() * h / refine
    return float(total)


def strip_measure_bound(length: float, alpha: float) -> float:
    r = length / alpha
    return 4 * r + 2 * math.sqrt(r)


# ---------------------------------------------------------------------------
# branch images


def branch_images(curve: AdmissibleCurve, sp: SkewProduct, thetas) -> np.ndarray:
    """Z_j(theta) = f(theta_j, X(theta_j)) over the d pre-images theta_j."""
    th = np.asarray(thetas, dtype=float)
    out = np.empty((sp.d, th.size))
    for j in range(sp.d):
        pre = (th + j) / sp.d
        X, _ = curve.values(pre)
        b = sp.forcing.jet(pre)[0]
        z = sp.alpha * b + sp.map(X)
        out[j] = np.mod(z, 1.0) if sp.map.is_circle else z
    return out


@dataclass(frozen=True)
class Separation:
    H1: tuple
    H2: tuple
    min_sep: float
    matrix: np.ndarray = field(repr=False)


def branch_separation(curve: AdmissibleCurve, sp: SkewProduct, grid_size: int = 2 ** 12,
                      threshold: Optional[float] = None) -> Separation:
    """Branch sets H1, H2 of size >= ceil(d/16) with images kept apart.

    The pairwise separation min_theta |Z_j1 - Z_j2| is computed for every
    pair; sets are seeded with the best pair and grown greedily.
    """
    thr = sp.alpha / 100 if threshold is None else threshold
    th = np.arange(grid_size) / grid_size
    Z = branch_images(curve, sp, th)
    diff = Z[:, None, :] - Z[None, :, :]
    if sp.map.is_circle:
        diff = np.mod(diff + 0.5, 1.0) - 0.5
    S = np.abs(diff).min(axis=2)
    np.fill_diagonal(S, 0.0)
    need = math.ceil(sp.d / 16)
    j1, j2 = np.unravel_index(np.argmax(S), S.shape)
    H1, H2 = [int(j1)], [int(j2)]
    while len(H1) < need or len(H2) < need:
        grow = H1 if len(H1) <= len(H2) else H2
        other = H2 if grow is H1 else H1
        free = [j for j in range(sp.d) if j not in H1 and j not in H2]
        if not free:
            break
        best = max(free, key=lambda j: S[j, other].min())
        grow.append(best)
    sep = float(S[np.ix_(H1, H2)].min())
    if len(H1) < need or len(H2) < need or sep < thr:
        raise NoSeparatedSets(f"best sets {H1}, {H2} separate by {sep:.6g} < {thr:.6g}")
    return Separation(tuple(sorted(H1)), tuple(sorted(H2)), sep, S)


# ---------------------------------------------------------------------------
# calibration


def calibrate_C1(curves, sp: SkewProduct, lengths, steps: int = 3, grid_size: int = 2 ** 12,
                 rng: Optional[np.random.Generator] = None) -> float:
    """Largest ratio measure / sqrt(|I| / alpha) over iterates 1..steps.

    Intervals are centred on a random point of each iterate so the strip is
    actually visited.
    """
    rng = rng or np.random.default_rng(0)
    worst = 0.0
    for curve in curves:
        for j in range(1, steps + 1):
            fn = ImageFunction(curve, sp, j)
            for L in lengths:
                c, _ = fn.values(np.array([rng.random()]))
                I = (float(c[0]) - L / 2, float(c[0]) + L / 2)
                meas = strip_measure(fn, I, grid_size, circle=sp.map.is_circle)
                worst = max(worst, meas / math.sqrt(L / sp.alpha))
    return worst
