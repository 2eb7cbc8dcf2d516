"""Command line entry point ``viana-lab``.

Exit codes: 0 success, 2 bad configuration, 3 construction failure,
4 violated constant constraint, 5 failed lemma check.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from . import expansion as E
from . import suites as S
from .config import ExperimentConfig, field_names, load_config, parse_config_text, parse_value
from .constants import derive_constants, validate
from .errors import ConfigError, ConstraintViolated, ConstructionError, LabError, PreconditionViolated
from .maps import HARD_CHECKS, SkewProduct, build_map, check_map, sample_map
from .output import header, write_atomic, write_table

EXIT_OK, EXIT_CONFIG, EXIT_CONSTRUCTION, EXIT_CONSTRAINT, EXIT_LEMMA = 0, 2, 3, 4, 5
LEMMAS = ("curve-bounds", "strip", "escape", "long-range", "deep-returns", "separation", "oscillation")
SITUATION_N = (400, 900, 1600, 2500)
CENSUS_N = (100000,)


def _columns(rows):
    cols = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


def _info(msg):
    print(msg, file=sys.stderr)


def _setup(cfg: ExperimentConfig, strict: bool = True, order=None, d=None, alpha=None):
    spec = cfg.map_spec(order)
    m = build_map(spec)
    d = cfg.d if d is None else d
    alpha = cfg.alpha if alpha is None else alpha
    sp = SkewProduct(d=d, alpha=alpha, map=m)
    consts = derive_constants(m, d, alpha, cfg.overrides(), strict=strict)
    return m, sp, consts


def _head(cfg, command, consts, **meta):
    failed = [name for name, ok, _ in validate(consts) if not ok]
    return header(command, cfg.hash(), cfg.seed, consts.to_dict(), constraint_failures=failed, **meta)


def cmd_build_map(cfg: ExperimentConfig) -> int:
    m, sp, consts = _setup(cfg)
    rows = [{"x": r[0], "h": r[1], "h1": r[2], "h2": r[3]} for r in sample_map(m)]
    ref = m.reference_orbit
    meta = {"amplitude": m.amplitude, "critical_point": m.critical_point, "outer_shift": m.outer_shift,
            "a0": m.spec.a0, "inner_half_width": m.spec.inner_half_width,
            "outer_half_width": m.spec.outer_half_width}
    if ref is not None:
        meta.update(q_tilde=ref.target, rho=ref.multiplier, ell=ref.landing_time, residual=ref.residual)
    write_table(cfg.out, _head(cfg, "build-map", consts, **meta), ["x", "h", "h1", "h2"], rows)
    base = cfg.out[:-4] if cfg.out.endswith(".csv") else cfg.out
    write_atomic(base + ".constants.json", consts.to_json() + "\n")
    _info(f"wrote {cfg.out} and {base}.constants.json")
    return EXIT_OK


def cmd_check_map(cfg: ExperimentConfig) -> int:
    m = build_map(cfg.map_spec())
    checks = check_map(m)
    rows = [{"check": k, "value": c.value, "limit": c.limit, "kind": c.kind, "ok": c.ok, "hard": k in HARD_CHECKS}
            for k, c in checks.items()]
    head = header("check-map", cfg.hash(), cfg.seed, {}, order=m.order, parity=m.spec.parity)
    write_table(cfg.out, head, _columns(rows), rows)
    for r in rows:
        if not r["ok"]:
            _info(f"{'FAIL' if r['hard'] else 'warn'} {r['check']}: {r['value']:.6g} vs {r['limit']:.6g}")
    hard_ok = all(r["ok"] for r in rows if r["hard"])
    return EXIT_OK if hard_ok else EXIT_CONSTRUCTION


def cmd_lemma_check(cfg: ExperimentConfig, lemma: str) -> int:
    if lemma not in LEMMAS:
        raise ConfigError(f"--lemma must be one of {', '.join(LEMMAS)}")
    _, sp, consts = _setup(cfg)
    spec = cfg.map_spec()
    if lemma == "curve-bounds":
        res = S.curve_bounds_suite((cfg.alpha,), cfg.curve_seeds, cfg.level4_elements, cfg.grid_size, cfg.d,
                              cfg.seed, spec)
    elif lemma == "strip":
        res = S.strip_suite(100, cfg.alpha, cfg.d, cfg.seed, cfg.grid_size, spec)
    elif lemma == "oscillation":
        res = S.oscillation_suite((cfg.alpha,), cfg.curve_seeds, 50, cfg.d, cfg.seed, min(cfg.grid_size, 2 ** 12),
                                  spec)
    elif lemma == "separation":
        res = S.separation_suite(cfg.alpha, cfg.d, cfg.seed, cfg.grid_size, spec)
    elif lemma == "escape":
        res = S.escape_suite(sp, consts, cfg.sample_count, cfg.seed, cfg.workers)
    elif lemma == "long-range":
        res, consts = S.long_range_suite(sp, consts, cfg.sample_count, cfg.seed, workers=cfg.workers)
    else:
        res = S.deep_return_suite(sp, consts, cfg.r_values, cfg.decay_samples, cfg.seed, cfg.workers,
                              cfg.proof_scaling)
    head = _head(cfg, "lemma-check", consts, lemma=lemma, ok=res.ok, **res.summary)
    write_table(cfg.out, head, _columns(res.rows), res.rows)
    _info(f"lemma {lemma}: {'PASS' if res.ok else 'FAIL'} {res.summary}")
    return EXIT_OK if res.ok else EXIT_LEMMA


def cmd_situations(cfg: ExperimentConfig) -> int:
    _, sp, consts = _setup(cfg)
    ns = cfg.n_values or SITUATION_N
    est = E.exceptional_sets(sp, consts, ns, cfg.sample_count, cfg.seed, workers=cfg.workers)
    C, env = E.b2_envelope(est)
    rows = []
    for e, en in zip(est, env):
        b2lo, b2hi = e.wilson("b2")
        b1lo, b1hi = e.wilson("b1")
        rows.append({"n": e.n, "samples": e.samples, "b2_hits": e.b2_hits, "b2": e.b2, "b2_lo": b2lo,
                     "b2_hi": b2hi, "b2_envelope": en["envelope"], "b1_hits": e.b1_hits, "b1": e.b1,
                     "b1_lo": b1lo, "b1_hi": b1hi, "cn": e.cn, "mean_I": e.mean_I, "absorbed": e.absorbed,
                     "spacing_ok": e.spacing_ok})
    head = _head(cfg, "situations", consts, sampling="uniform grid jittered per seed, random digit tails",
                 b2_C=C, b1_sqrt_slope=E.sqrt_decay_fit(est, "b1"), b2_sqrt_slope=E.sqrt_decay_fit(est, "b2"))
    write_table(cfg.out, head, _columns(rows), rows)
    return EXIT_OK


CENSUS_COLUMNS = ["index", "theta", "x", "steps", "vertical", "horizontal", "hit_critical"]


def _census(cfg, sp, n):
    est, summary = E.exponent_census(sp, n, cfg.sample_count, cfg.seed, cfg.workers)
    rows = [{"index": i, "theta": e.theta, "x": e.x, "steps": e.steps, "vertical": e.vertical,
             "horizontal": e.horizontal, "hit_critical": e.hit_critical} for i, e in enumerate(est)]
    return rows, summary


def cmd_exponents(cfg: ExperimentConfig) -> int:
    _, sp, consts = _setup(cfg, strict=False)
    n = (cfg.n_values or CENSUS_N)[0]
    rows, summary = _census(cfg, sp, n)
    head = _head(cfg, "exponents", consts, census=summary.__dict__)
    write_table(cfg.out, head, CENSUS_COLUMNS, rows)
    _info(f"fraction positive {summary.fraction_positive:.6g}, median {summary.quantiles.get('0.5')}")
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig) -> int:
    folder = cfg.out[:-4] if cfg.out.endswith(".csv") else cfg.out
    ns = cfg.n_values or CENSUS_N
    index, failed = [], False
    for D in cfg.orders:
        for d in cfg.ds:
            for alpha in cfg.alphas:
                for n in ns:
                    name = f"census_D{D}_d{d}_a{alpha:.3g}_n{n}.csv"
                    row = {"order": D, "d": d, "alpha": alpha, "n": n, "file": name, "status": "ok",
                           "fraction_positive": None, "median": None}
                    try:
                        _, sp, consts = _setup(cfg, strict=False, order=D, d=d, alpha=alpha)
                        rows, summary = _census(cfg, sp, n)
                        sub = replace(cfg, order=D, parity="odd" if D % 2 else "even", d=d, alpha=alpha,
                                      n_values=(n,))
                        head = _head(sub, "sweep", consts, census=summary.__dict__)
                        write_table(os.path.join(folder, name), head, CENSUS_COLUMNS, rows)
                        row.update(fraction_positive=summary.fraction_positive,
                                   median=summary.quantiles.get("0.5"))
                    except (ConstructionError, ConstraintViolated, ConfigError) as exc:
                        failed = True
                        row.update(file="", status=f"{type(exc).__name__}: {exc}")
                    index.append(row)
    head = header("sweep", cfg.hash(), cfg.seed, {}, grid={"orders": list(cfg.orders), "ds": list(cfg.ds),
                                                          "alphas": list(cfg.alphas), "n_values": list(ns)})
    write_table(os.path.join(folder, "index.csv"), head, _columns(index), index)
    return EXIT_CONSTRUCTION if failed else EXIT_OK


COMMANDS = {
    "build-map": cmd_build_map,
    "check-map": cmd_check_map,
    "lemma-check": cmd_lemma_check,
    "situations": cmd_situations,
    "exponents": cmd_exponents,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file")
    for name in field_names():
        flag = "--" + name.replace("_", "-")
        common.add_argument(flag, dest=name, default=None, metavar="VALUE")
    p = argparse.ArgumentParser(prog="viana-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "lemma-check":
            sp.add_argument("--lemma", required=True, choices=LEMMAS)
    return p


def resolve_config(args) -> ExperimentConfig:
    flags = {}
    for name in field_names():
        v = getattr(args, name, None)
        if v is not None:
            flags[name] = parse_value(name, v)
    cfg = load_config(args.config, flags)
    in_file = bool(args.config) and _file_sets(args.config, "workers")
    if "workers" not in flags and not in_file and os.environ.get("VIANA_LAB_WORKERS"):
        try:
            cfg = replace(cfg, workers=int(os.environ["VIANA_LAB_WORKERS"]))
        except ValueError as exc:
            raise ConfigError("VIANA_LAB_WORKERS must be an integer") from exc
    return cfg.validate()


def _file_sets(path, key) -> bool:
    with open(path, encoding="utf-8") as fh:
        return key in parse_config_text(fh.read())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "lemma-check":
            return cmd_lemma_check(cfg, args.lemma)
        return COMMANDS[args.command](cfg)
    except (ConfigError, PreconditionViolated) as exc:
        _info(f"config error: {exc}")
        return EXIT_CONFIG
    except ConstructionError as exc:
        _info(f"construction error: {type(exc).__name__}: {exc}")
        return EXIT_CONSTRUCTION
    except ConstraintViolated as exc:
        _info(f"constraint violated: {exc}")
        return EXIT_CONSTRAINT
    except LabError as exc:
        _info(f"error: {type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
