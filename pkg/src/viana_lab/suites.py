"""Verification suites shared by the command line and the acceptance tests.

Each suite returns a :class:`SuiteResult`: one row per case, an overall
verdict and a few summary numbers for output headers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expansion as E
from .constants import ExpansionConstants, derive_constants
from .curves import (
    AdmissibleCurve,
    ImageFunction,
    branch_separation,
    strip_measure_bound,
    make_curve,
    oscillation,
    strip_measure,
)
from .errors import NoSeparatedSets
from .maps import MapSpec, SkewProduct, build_map, check_map, default_skew, invariant_domain
from .streams import stream


@dataclass
class SuiteResult:
    name: str
    rows: list
    ok: bool
    summary: dict = field(default_factory=dict)


def _domain(sp):
    return None if sp.map.is_circle else (lambda d: (d.lo, d.hi))(invariant_domain(sp))


def _random_curve(sp, seed, index, grid):
    return make_curve("random", sp.alpha, circle=sp.map.is_circle, grid_size=grid,
                      rng=stream(seed, index, "curves"), domain=_domain(sp))


def _lift(curve: AdmissibleCurve, sp: SkewProduct, level: int, index: int) -> AdmissibleCurve:
    # built directly so a violation is measured, not raised
    return AdmissibleCurve(curve.base, curve.alpha, curve.grid_size, level=level, index=index, sp=sp,
                           circle=sp.map.is_circle)


def map_suite(orders=(3, 4, 5), points: int = 2 ** 16) -> SuiteResult:
    """Construction checks for each order; odd orders on the circle, even on the interval."""
    rows, ok = [], True
    for D in orders:
        spec = MapSpec(parity="odd" if D % 2 else "even", order=D)
        m = build_map(spec)
        for name, chk in check_map(m, points).items():
            rows.append({"order": D, "check": name, "value": chk.value, "limit": chk.limit, "ok": chk.ok})
            if name != "max_abs_h2_inner_attainable" and name != "bridge_slope_max":
                ok &= chk.ok
    return SuiteResult("map", rows, ok)


def curve_bounds_suite(alphas=(1e-3, 1e-6), seeds: int = 20, level4: int = 200, grid: int = 2 ** 14,
                  d: int = 16, seed: int = 0, spec=None) -> SuiteResult:
    """Derivative bounds of curves pushed over all of P1 and random elements of P4."""
    rows, ok = [], True
    for alpha in alphas:
        sp = default_skew(alpha, d, spec)
        for s in range(seeds):
            curve = _random_curve(sp, seed, s, grid)
            ks = stream(seed, s, "elements").integers(0, d ** 4, size=level4)
            elems = [(1, k) for k in range(d)] + [(4, int(k)) for k in ks]
            for level, k in elems:
                y = _lift(curve, sp, level, k)
                m1, m2 = y.bounds()
                good = m1 <= alpha and m2 <= alpha and m1 <= 13 * alpha / 15
                ok &= good
                rows.append({"alpha": alpha, "seed": s, "level": level, "index": k,
                             "max_d1_over_alpha": m1 / alpha, "max_d2_over_alpha": m2 / alpha, "ok": good})
    worst1 = max(r["max_d1_over_alpha"] for r in rows)
    worst2 = max(r["max_d2_over_alpha"] for r in rows)
    return SuiteResult("curve-bounds", rows, ok, {"worst_d1": worst1, "worst_d2": worst2, "cases": len(rows)})


def strip_suite(count: int = 100, alpha: float = 1e-6, d: int = 16, seed: int = 0,
                  grid: int = 2 ** 14, spec=None) -> SuiteResult:
    """One-step strip measure against 4|I|/alpha + 2 sqrt(|I|/alpha).

    Intervals are centred on a point of the image so they are visited.
    """
    sp = default_skew(alpha, d, spec)
    rows, ok = [], True
    for i in range(count):
        rng = stream(seed, i, "intervals")
        curve = _random_curve(sp, seed, i, grid)
        fn = ImageFunction(curve, sp, 1)
        L = alpha * rng.uniform(1e-3, 1.0)
        c = float(fn.values(np.array([rng.random()]))[0][0])
        meas = strip_measure(fn, (c - L / 2, c + L / 2), grid, circle=sp.map.is_circle)
        bound = strip_measure_bound(L, alpha)
        good = meas <= bound
        ok &= good
        rows.append({"case": i, "length_over_alpha": L / alpha, "measure": meas, "bound": bound, "ok": good})
    return SuiteResult("strip", rows, ok, {"worst_ratio": max(r["measure"] / r["bound"] for r in rows)})


def oscillation_suite(alphas=(1e-3, 1e-6), seeds: int = 20, chains: int = 50, d: int = 16, seed: int = 0,
                      grid: int = 2 ** 12, spec=None) -> SuiteResult:
    """osc(Y_j) <= 4 osc(Y_{j-1}) + 2 alpha along chains of length M, and osc(Y_M) < sqrt(alpha)."""
    rows, ok = [], True
    for alpha in alphas:
        sp = default_skew(alpha, d, spec)
        M = derive_constants(sp.map, d, alpha, strict=False).bigM
        circ = sp.map.is_circle
        for s in range(seeds):
            curve = _random_curve(sp, seed, s, grid)
            ks = stream(seed, s, "elements").integers(0, d ** M, size=chains)
            for k in ks:
                prev = oscillation(curve.X, circ)
                rec_ok = True
                for j in range(1, M + 1):
                    y = _lift(curve, sp, j, int(k) // d ** (M - j))
                    cur = oscillation(y.X, circ)
                    rec_ok &= cur <= 4 * prev + 2 * alpha
                    prev = cur
                final_ok = prev < math.sqrt(alpha)
                good = rec_ok and final_ok
                ok &= good
                rows.append({"alpha": alpha, "seed": s, "index": int(k), "osc_final": prev,
                             "recursion_ok": rec_ok, "final_ok": final_ok, "ok": good})
    return SuiteResult("oscillation", rows, ok)


def separation_suite(alpha: float = 1e-6, d: int = 16, seed: int = 0, grid: int = 2 ** 12, spec=None) -> SuiteResult:
    sp = default_skew(alpha, d, spec)
    curve = _random_curve(sp, seed, 0, grid)
    try:
        sep = branch_separation(curve, sp, grid)
        row = {"H1": " ".join(map(str, sep.H1)), "H2": " ".join(map(str, sep.H2)), "min_sep": sep.min_sep,
               "threshold": alpha / 100, "ok": True}
    except NoSeparatedSets as exc:
        row = {"H1": "", "H2": "", "min_sep": float("nan"), "threshold": alpha / 100, "ok": False,
               "error": str(exc)}
    return SuiteResult("separation", [row], row["ok"])


def escape_suite(sp: SkewProduct, consts: ExpansionConstants, count: int = 1000, seed: int = 0,
                  workers: int = 1) -> SuiteResult:
    rows, ok = [], True
    for regime in ("a", "b"):
        reps = E.escape_batch(sp, consts, regime, count, seed, workers)
        for rep in reps:
            ok &= rep.holds
            row = {"regime": regime, **rep.row(), "Ccal": consts.Ccal}
            row.setdefault("p", "")
            row.setdefault("p_le_N", "")
            row.setdefault("margin_eta_over_D", "")
            rows.append(row)
    fails = sum(1 for r in rows if not r["holds"])
    return SuiteResult("escape", rows, ok, {"failures": fails, "cases": len(rows), "Ccal": consts.Ccal,
                                         "N": consts.bigN})


def long_range_suite(sp: SkewProduct, consts: ExpansionConstants, count: int = 1000, seed: int = 0,
                  kmax: int = 200, workers: int = 1):
    """Calibrate C2 on one batch and check a fresh batch against it."""
    cal = E.long_range_batch(sp, consts, count, seed, kmax, workers)
    C2 = E.calibrate_C2(cal)
    c2 = consts.with_calibration(C2=C2)
    reps = E.long_range_batch(sp, c2, count, seed + 1, kmax, workers)
    rows = [{**rep.row(), "C2": C2} for rep in reps]
    ok = all(rep.holds for rep in reps)
    fails = sum(1 for rep in reps if not rep.holds)
    return SuiteResult("long-range", rows, ok, {"C2": C2, "failures": fails, "cases": len(rows)}), c2


def deep_return_suite(sp: SkewProduct, consts: ExpansionConstants, r_values=None, samples: int = 2 ** 20,
                  seed: int = 0, workers: int = 1, proof_scaling: bool = False) -> SuiteResult:
    t = E.deep_return_decay(sp, consts, r_values=r_values, samples=samples, seed=seed, workers=workers,
                            proof_scaling=proof_scaling)
    ok = t.monotone and math.isfinite(t.slope) and t.slope < 0
    return SuiteResult("deep-returns", t.rows(), ok, {"slope": t.slope, "five_beta": t.five_beta,
                                             "five_beta_final": t.five_beta_final, "C3": t.C3,
                                             "monotone": t.monotone})
