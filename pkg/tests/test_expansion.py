import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viana_lab import _kernels as K
from viana_lab import expansion as E
from viana_lab.constants import derive_constants
from viana_lab.curves import make_curve
from viana_lab.errors import PreconditionViolated
from viana_lab.maps import default_skew, evaluate
from viana_lab.streams import BasePoint

SP = default_skew(1e-6)
CONSTS = derive_constants(SP.map, 16, 1e-6)


# plumbing


def _squares(lo, hi, offset):
    return [i * i + offset for i in range(lo, hi)]


def test_run_indexed_order_and_workers():
    one = E.run_indexed(_squares, 1000, 1, chunk=64, offset=3)
    two = E.run_indexed(_squares, 1000, 2, chunk=64, offset=3)
    assert one == two == [i * i + 3 for i in range(1000)]
    assert E.run_indexed(_squares, 0, 2, offset=0) == []


def test_default_workers_env(monkeypatch):
    monkeypatch.setenv("VIANA_LAB_WORKERS", "3")
    assert E.default_workers() == 3
    monkeypatch.delenv("VIANA_LAB_WORKERS")
    assert E.default_workers() == 1


# fiber orbits against a pure-python oracle with exact base points


def _oracle_orbit(sp, k, x, n):
    theta = Fraction(k, 2 ** 52)
    xs = [x]
    for _ in range(n):
        x = (sp.alpha * math.sin(2 * math.pi * float(theta)) + evaluate(sp.map, x)) % 1.0
        theta = (theta * sp.d) % 1
        xs.append(x)
    return xs


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 52 - 1), st.floats(0.0, 1.0, exclude_max=True))
def test_fiber_orbit_matches_oracle(k, x):
    sp = default_skew(1e-3)
    xs, dh = E.fiber_orbit(sp, k / 2 ** 52, x, 20)
    ref = _oracle_orbit(sp, k, x, 20)
    gap = np.abs(np.mod(xs - np.array(ref) + 0.5, 1.0) - 0.5)
    assert gap.max() < 1e-9
    np.testing.assert_allclose(dh, sp.map.derivative(xs[:-1]), rtol=1e-12, atol=1e-12)


# lemma reports


def test_escape_near_vacuous_at_critical_point():
    rep = E.verify_escape_near(SP, CONSTS, 0.3, 0.5)
    assert rep.holds and rep.log_product == -math.inf and rep.steps == CONSTS.bigN


def test_escape_near_precondition():
    with pytest.raises(PreconditionViolated):
        E.verify_escape_near(SP, CONSTS, 0.3, 0.5 + 3 * CONSTS.root_alpha)


def test_escape_near_bound_formula():
    x = 0.5 + 0.5 * CONSTS.root_alpha
    rep = E.verify_escape_near(SP, CONSTS, 0.3, x)
    D, a, eta = CONSTS.D, CONSTS.alpha, CONSTS.eta
    lb = (D - 1) * math.log(abs(x - 0.5)) + (-1 + eta / (D - 1)) * math.log(a)
    assert rep.log_bound == pytest.approx(lb, rel=1e-12)
    assert rep.holds == (rep.log_product >= lb)
    assert rep.margin == rep.log_product - rep.log_bound


def test_escape_mid_edges():
    with pytest.raises(PreconditionViolated):
        E.verify_escape_mid(SP, CONSTS, 0.3, 0.5 + 0.5 * CONSTS.root_alpha)
    with pytest.raises(PreconditionViolated):
        E.verify_escape_mid(SP, CONSTS, 0.3, 0.5 + 1.01 * CONSTS.delta1)
    rep = E.verify_escape_mid(SP, CONSTS, 0.3, 0.5 + 0.5 * CONSTS.delta1)
    assert rep.extra["p_le_N"] and rep.steps == rep.extra["p"]
    assert rep.log_bound == pytest.approx(-math.log(CONSTS.kappa) + rep.steps * math.log(CONSTS.sigma1))


def test_long_range_empty_product():
    rep = E.verify_long_range(SP, CONSTS, 0.3, 0.1, 0)
    assert rep.log_product == 0.0 and rep.holds


def test_long_range_far_orbit_at_fixed_point():
    # (0, 0) is fixed with h' = 2 and stays at distance 1/2 from x~
    rep = E.verify_long_range(SP, CONSTS, 0.0, 0.0, 50)
    assert rep.log_product == pytest.approx(50 * math.log(2), rel=1e-15)
    assert rep.extra["far"] and rep.extra["far_holds"] and rep.holds
    assert not rep.extra["returned"]


def test_long_range_rejects_deep_entry():
    with pytest.raises(PreconditionViolated):
        E.verify_long_range(SP, CONSTS, 0.0, 0.5, 1)


def test_calibrated_c2_makes_every_report_hold():
    reps = E.long_range_batch(SP, CONSTS, 40, seed=5, kmax=60)
    C2 = E.calibrate_C2(reps)
    c = CONSTS.with_calibration(C2=C2)
    again = E.long_range_batch(SP, c, 40, seed=5, kmax=60)
    assert all(r.holds for r in again)
    assert E.calibrate_C2([]) == 1.0


def test_escape_batch_is_deterministic_across_workers():
    a = E.escape_batch(SP, CONSTS, "b", 300, seed=2, workers=1)
    b = E.escape_batch(SP, CONSTS, "b", 300, seed=2, workers=2)
    assert [r.row() for r in a] == [r.row() for r in b]
    with pytest.raises(ValueError):
        E.escape_batch(SP, CONSTS, "c", 1, seed=0)


# deep returns


def test_strip_radius_scaling():
    r = CONSTS.r0 + 3
    assert E.strip_radius(CONSTS, r) == pytest.approx(CONSTS.root_alpha * math.exp(-(r - 2)), rel=1e-14)
    assert E.strip_radius(CONSTS, r, True) == pytest.approx(CONSTS.root_alpha * math.exp(-4 * (r - 2)), rel=1e-14)


def test_decay_table_basic_shape():
    rs = [CONSTS.r0 - 1, CONSTS.r0, CONSTS.r0 + 2, 60.0]
    tab = E.deep_return_decay(SP, CONSTS, r_values=rs, samples=2 ** 14, seed=1)
    assert tab.below == (True, False, False, False)
    assert tab.hits[-1] == 0
    assert list(tab.hits) == sorted(tab.hits, reverse=True)
    assert tab.monotone
    assert tab.five_beta == pytest.approx(5 * CONSTS.beta_regime)
    assert len(tab.rows()) == 4


def test_critical_seeking_x0_lands():
    x0 = E.critical_seeking_x0(SP, 3)
    x = x0
    for _ in range(3):
        x = evaluate(SP.map, x)
    assert abs(x - 0.5) < 1e-9


# situations


def _oracle_classify(dist, n, N, R0, Rm, diam, m):
    recs, absorbed, last = [], 0, None
    for nu in range(1, n + 1):
        md = dist[nu] - diam
        if md < Rm:
            recs.append((nu, 2, m))
        elif md < R0:
            if last is not None and nu - last < N:
                absorbed += 1
                continue
            r = min(max(math.ceil(math.log(R0 / md)), 1), m)
            recs.append((nu, 1, r))
            last = nu
    return recs, absorbed


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 0.05), min_size=30, max_size=30), st.integers(1, 6))
def test_classify_orbit_matches_oracle(dist, N):
    dist = np.array(dist)
    n, R0, m, diam = 29, 0.02, 5, 1e-4
    Rm = R0 * math.exp(-m)
    nu = np.empty(n, np.int64)
    kind = np.empty(n, np.int64)
    rr = np.empty(n, np.int64)
    cnt, absorbed = K.classify_orbit(dist, n, N, R0, Rm, diam, R0, m, nu, kind, rr)
    got = [(int(nu[i]), int(kind[i]), int(rr[i])) for i in range(cnt)]
    assert (got, absorbed) == _oracle_classify(dist, n, N, R0, Rm, diam, m)


def test_situation_scales():
    m, l, diam = E.situation_scales(CONSTS, 400)
    assert (m, l) == (20, 20 - CONSTS.bigM)
    assert diam == pytest.approx(1e-6 * (16 - 1e-6) ** -l)
    assert diam < CONSTS.root_alpha * math.exp(-m)
    with pytest.raises(PreconditionViolated):
        E.situation_scales(CONSTS, 9)


def test_fixed_fiber_has_no_situations():
    curve = E.default_curve(SP, 0)
    flat = make_curve("constant", 1e-6, x0=0.0)
    run = E.classify_situations(SP, CONSTS, flat, 400, 0.0)
    assert run.records == () and run.absorbed == 0 and not run.has_II
    run = E.classify_situations(SP, CONSTS, curve, 400, 0.123)
    assert run.spacing_ok(CONSTS.bigN)


def test_exceptional_sets_deterministic():
    a = E.exceptional_sets(SP, CONSTS, [400, 900], 200, seed=3, workers=1)
    b = E.exceptional_sets(SP, CONSTS, [900, 400], 200, seed=3, workers=2)
    assert a == b
    lo, hi = a[0].wilson("b1")
    assert lo <= a[0].b1 <= hi


def test_envelope_and_fit_helpers():
    mk = lambda n, h2, h1: E.ExceptionalEstimate(n, 1000, h2, h1, 0.0, 0.0, 0, True)  # noqa: E731
    est = [mk(400, 100, 500), mk(900, 30, 300), mk(1600, 10, 100)]
    C, rows = E.b2_envelope(est)
    assert C == pytest.approx(0.1 * math.exp(5))
    assert rows[0]["ok"]
    assert [r["ok"] for r in rows[1:]] == [0.03 <= C * math.exp(-7.5), 0.01 <= C * math.exp(-10)]
    slope = E.sqrt_decay_fit(est, "b1")
    assert slope < 0
    assert math.isnan(E.sqrt_decay_fit([mk(400, 0, 0), mk(900, 0, 1)], "b2"))


# exponents


def test_vertical_exponent_at_fixed_point_is_log2():
    est = E.vertical_exponent(SP, 0.0, 0.0, 1000)
    assert est.vertical == math.log(2)
    assert not est.hit_critical


def test_vertical_exponent_critical_hit():
    est = E.vertical_exponent(SP, 0.0, 0.5, 10)
    assert est.hit_critical and est.vertical == -math.inf


def test_horizontal_exponent():
    assert E.horizontal_exponent(16, 100000) == pytest.approx(math.log(16), abs=1e-12)
    assert E.horizontal_exponent(17, 5) == pytest.approx(math.log(17), abs=1e-15)
    with pytest.raises(PreconditionViolated):
        E.vertical_exponent(SP, 0.0, 0.0, 0)


def test_vertical_exponent_matches_direct_sum():
    bp = BasePoint.random(np.random.default_rng(9), 16, 500)
    xs, dh = E.fiber_orbit(SP, bp, 0.31, 500)
    est = E.vertical_exponent(SP, bp, 0.31, 500)
    assert est.vertical == pytest.approx(math.fsum(np.log(np.abs(dh))) / 500, rel=1e-10)


def test_census_empty_and_deterministic():
    est, summ = E.exponent_census(SP, 100, 0, seed=0)
    assert est == [] and summ.count == 0
    a, sa = E.exponent_census(SP, 500, 24, seed=4, workers=1)
    b, sb = E.exponent_census(SP, 500, 24, seed=4, workers=3)
    assert a == b and sa == sb
    assert sa.fraction_positive == sa.positive / 24
