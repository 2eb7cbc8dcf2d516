"""Derived constants for the expansion estimates.

Everything the expansion lemmas need is collected in one immutable record,
:class:`ExpansionConstants`.  :func:`derive_constants` fills it from a built
map, the base degree ``d`` and the forcing size ``alpha``, then checks every
inequality that ties the constants together; a failed inequality raises
:class:`~viana_lab.errors.ConstraintViolated` carrying its name.

The generic "large constant depending only on the map" is replaced by a
single calibrated ``Ccal`` (default 1).  The remaining unspecified constants
(C1, C2, C3) start empty and are filled in by the empirical passes in
:mod:`viana_lab.curves` and :mod:`viana_lab.expansion`.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

import numpy as np

from .errors import AlphaTooLarge, ConstraintViolated, PreconditionViolated
from .maps import DegenerateMap

RHO_MARGIN = 1e-3
SIGMA0_MARGIN = 1e-3
DEFAULT_KAPPA = 0.5
# The default odd widths give delta1/delta0 = 0.1/0.25 = 0.4, and no width
# pair admits a tenth without pushing |h'| above 4 on the bridges.
DEFAULT_RATIO_CAP = 0.5


@dataclass(frozen=True)
class ExpansionConstants:
    D: int
    d: int
    alpha: float
    ell: int
    rho: float
    q_tilde: float
    x_tilde: float
    delta0: float
    delta1: float
    rho1: float
    rho2: float
    eta: float
    kappa: float
    sigma0: float
    sigma1: float
    sigma2: float
    bigM: int
    bigN: int
    bigK: float
    gamma1: float
    gamma2: float
    beta_regime: float
    beta_final: float
    r0: float
    c: float
    ratio_cap: float = DEFAULT_RATIO_CAP
    Ccal: float = 1.0
    C1: Optional[float] = None
    C2: Optional[float] = None
    C3: Optional[float] = None
    Cstar: float = 1.0

    @property
    def beta(self) -> float:
        return self.beta_regime

    @property
    def root_alpha(self) -> float:
        """The D-th root of alpha, radius of J(0)."""
        return self.alpha ** (1.0 / self.D)

    def with_calibration(self, **kw) -> "ExpansionConstants":
        allowed = {"Ccal", "C1", "C2", "C3", "Cstar"}
        bad = set(kw) - allowed
        if bad:
            raise KeyError(f"not a calibrated constant: {sorted(bad)}")
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_json_default)

    @classmethod
    def from_dict(cls, data: dict) -> "ExpansionConstants":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})

    @classmethod
    def from_json(cls, text: str) -> "ExpansionConstants":
        return cls.from_dict(json.loads(text))


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(type(o))


def compute_M(alpha: float) -> int:
    """Largest M with 32**M * alpha < 1."""
    alpha = float(alpha)
    if not alpha > 0:
        raise PreconditionViolated(f"alpha must be positive, got {alpha}")
    if alpha * 32.0 >= 1.0:
        raise AlphaTooLarge(alpha)
    M = 1
    # powers of two scale floats exactly, so the comparison is exact
    while alpha * 32.0 ** (M + 1) < 1.0:
        M += 1
    return M


def _ceil_log(ratio: float, base: float) -> int:
    """Smallest integer k >= 0 with base**k >= ratio."""
    if ratio <= 1.0:
        return 0
    k = math.ceil(math.log(ratio) / math.log(base))
    # guard the ceiling against rounding in the logarithms
    while k > 0 and base ** (k - 1) >= ratio:
        k -= 1
    while base ** k < ratio:
        k += 1
    return k


def compute_N(consts: ExpansionConstants, alpha: Optional[float] = None) -> int:
    """Escape time ell + min{k >= 0 : rho2**k * Ccal * alpha >= delta0}."""
    a = consts.alpha if alpha is None else float(alpha)
    return consts.ell + _ceil_log(consts.delta0 / (consts.Ccal * a), consts.rho2)


def compute_p(consts: ExpansionConstants, x: float, x_tilde: Optional[float] = None, D: Optional[int] = None,
              check_regime: bool = True) -> int:
    """Escape time for a start at distance |x - x_tilde| from the critical point."""
    D = consts.D if D is None else int(D)
    xt = consts.x_tilde if x_tilde is None else float(x_tilde)
    u = _dist(x, xt, consts)
    if check_regime and not (consts.root_alpha * (1 - 1e-12) <= u < consts.delta1):
        raise PreconditionViolated(
            f"|x - x~| = {u:.6g} outside [alpha^(1/D), delta1) = [{consts.root_alpha:.6g}, {consts.delta1:.6g})"
        )
    if u == 0.0:
        return consts.bigN
    p = consts.ell + _ceil_log(consts.delta0 / (consts.Ccal * u ** D), consts.rho2)
    if check_regime and p > consts.bigN:
        raise ConstraintViolated("p(x) <= N", f"p={p} > N={consts.bigN} at |x - x~|={u:.6g}")
    return p


def _dist(x, xt, consts):
    u = abs(float(x) - xt)
    # circle distance for the odd family (critical point at 1/2)
    if consts.D % 2 == 1 and xt == 0.5:
        u = abs(((float(x) - xt + 0.5) % 1.0) - 0.5)
    return u


def j_radius(consts: Optional[ExpansionConstants], alpha: float, D: int, r: float,
             allow_negative: bool = False) -> float:
    """Radius of J(r): alpha**(1/D) * exp(-r).

    ``allow_negative`` admits r < 0, which the shifted strips J(r - 2) need.
    """
    if r < 0 and not allow_negative:
        raise PreconditionViolated(f"r must be >= 0, got {r}")
    return float(alpha) ** (1.0 / D) * math.exp(-r)


def default_delta0(m: DegenerateMap, rho1: float, rho2: float, points: int = 4097) -> float:
    """Largest half-width of J around the target with rho1 < |h'| < rho2 on it.

    J must also avoid the outer interval (odd family) or the inner interval
    (even family), so the orbit inside J never sees the flat piece.
    """
    ref = m.reference_orbit
    q = ref.target
    s = m.spec
    if m.is_circle:
        # h' is exactly 2 off the outer interval; J = (-delta0, delta0)
        return 0.5 - s.outer_half_width
    cap = abs(q) - s.inner_half_width
    lo, hi = 0.0, cap
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        xs = np.linspace(q - mid, q + mid, points)
        dh = np.abs(m.derivative(xs))
        if np.all((dh > rho1) & (dh < rho2)):
            lo = mid
        else:
            hi = mid
    return lo


def derive_constants(m: DegenerateMap, d: int, alpha: float, overrides: Optional[dict] = None,
                     strict: bool = True) -> ExpansionConstants:
    """Derive and validate every constant.

    ``overrides`` may set rho2, sigma0, eta, kappa, delta0, ratio_cap, Ccal,
    gamma2 and the calibrated C1, C2, C3, Cstar.  With ``strict`` the first
    failed inequality raises ConstraintViolated; otherwise the record is
    returned and :func:`validate` lists the failures.
    """
    ov = dict(overrides or {})
    unknown = set(ov) - {"rho2", "sigma0", "eta", "kappa", "delta0", "ratio_cap", "Ccal",
                         "gamma2", "C1", "C2", "C3", "Cstar"}
    if unknown:
        raise KeyError(f"unknown constant overrides: {sorted(unknown)}")
    alpha = float(alpha)
    M = compute_M(alpha)
    ref = m.reference_orbit
    if ref is None:
        raise PreconditionViolated("map has no reference orbit")
    D = m.order
    rho = ref.multiplier
    rho2 = float(ov.get("rho2", rho + RHO_MARGIN))
    sigma0 = float(ov.get("sigma0", m.spec.slope_target - SIGMA0_MARGIN))
    sigma1 = rho2 ** (1.0 / (D + 1))
    sigma2 = min(sigma0, sigma1)
    if "eta" in ov:
        eta = float(ov["eta"])
    else:
        # sigma2 depends on eta only through rho2, which is held fixed here,
        # so the iteration settles after one step
        eta = 1.0 / 3.0
        for _ in range(50):
            new = math.log(sigma2) / (4.0 * math.log(32.0)) if sigma2 > 1 else 0.0
            if abs(new - eta) <= 1e-16:
                break
            eta = new
    lower = rho2 ** (1.0 - eta / D)
    rho1 = 0.5 * (lower + rho)
    delta0 = float(ov.get("delta0", default_delta0(m, rho1, rho2)))
    delta1 = m.spec.inner_half_width
    Ccal = float(ov.get("Ccal", 1.0))
    ell = ref.landing_time
    N = ell + _ceil_log(delta0 / (Ccal * alpha), rho2) if delta0 > 0 else ell
    K = 400.0 * math.exp(2.0 * (D - 1) ** 2)
    gamma1 = 2.0 * (D - 1) ** 2 * eta / math.log(8.0 * K)
    log_inv = math.log(1.0 / alpha)
    gamma2 = float(ov.get("gamma2", eta * log_inv / N))
    consts = ExpansionConstants(
        D=D,
        d=int(d),
        alpha=alpha,
        ell=ell,
        rho=rho,
        q_tilde=ref.target,
        x_tilde=m.critical_point,
        delta0=delta0,
        delta1=delta1,
        rho1=rho1,
        rho2=rho2,
        eta=eta,
        kappa=float(ov.get("kappa", DEFAULT_KAPPA)),
        sigma0=sigma0,
        sigma1=sigma1,
        sigma2=sigma2,
        bigM=M,
        bigN=N,
        bigK=K,
        gamma1=gamma1,
        gamma2=gamma2,
        beta_regime=eta / (5.0 * (D - 1)),
        beta_final=gamma1 / 5.0 * math.log(100.0 / 99.0),
        r0=(1.0 / (D - 1)) * (1.0 / D - 2.0 * eta / (D - 1)) * log_inv,
        c=min(gamma2, math.log(sigma2)) / (D + 1) if sigma2 > 0 else float("nan"),
        ratio_cap=float(ov.get("ratio_cap", DEFAULT_RATIO_CAP)),
        Ccal=Ccal,
        C1=ov.get("C1"),
        C2=ov.get("C2"),
        C3=ov.get("C3"),
        Cstar=float(ov.get("Cstar", 1.0)),
    )
    if strict:
        for name, ok, msg in validate(consts):
            if not ok:
                raise ConstraintViolated(name, msg)
    return consts


def validate(c: ExpansionConstants):
    """List of (name, holds, detail) for every constant inequality."""
    out = []

    def add(name, ok, msg):
        out.append((name, bool(ok), msg))

    add("32^M alpha < 1", c.alpha * 32.0 < 1.0 and c.bigM >= 1, f"alpha={c.alpha:.6g}, M={c.bigM}")
    add("0 < eta <= 1/3", 0.0 < c.eta <= 1.0 / 3.0, f"eta={c.eta:.6g}")
    add("0 < kappa < 1", 0.0 < c.kappa < 1.0, f"kappa={c.kappa:.6g}")
    add("rho1 < rho < rho2", c.rho1 < c.rho < c.rho2, f"{c.rho1:.6g}, {c.rho:.6g}, {c.rho2:.6g}")
    lower = c.rho2 ** (1.0 - c.eta / c.D)
    add("rho1 > rho2^(1-eta/D)", c.rho1 > lower, f"rho1={c.rho1:.8g}, rho2^(1-eta/D)={lower:.8g}")
    add("sigma2 > 1", c.sigma2 > 1.0, f"sigma2={c.sigma2:.6g}")
    add("delta0 > 0", c.delta0 > 0.0, f"delta0={c.delta0:.6g}")
    ratio = c.delta1 / c.delta0 if c.delta0 > 0 else math.inf
    add("delta1/delta0 <= ratio_cap", ratio <= c.ratio_cap, f"ratio={ratio:.6g}, cap={c.ratio_cap:.6g}")
    add("M < N", c.bigM < c.bigN, f"M={c.bigM}, N={c.bigN}")
    add("r0 > 0", c.r0 > 0.0, f"r0={c.r0:.6g}")
    add("c > 0", c.c > 0.0, f"c={c.c:.6g}")
    return out
