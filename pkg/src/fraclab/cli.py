"""Command-line front end: config parsing, dispatch, CSV/JSON report writing.

Usage::

    fraclab <eigen|verify|certify|semilinear|fraclap> --config run.json [overrides]

A run is described by one JSON config file; the flags ``--s``, ``--n``,
``--tol`` (and a few command-specific ones) override single entries for quick
runs.  ``s`` and ``n`` may be lists, in which case the command sweeps over
them in a worker pool (``--jobs``) and writes results in config order.  The
environment variable ``FRACLAB_SEED`` overrides the config seed.

Exit codes: 0 success / all checks pass, 1 a verification or certificate
failed (or a runtime tolerance was not met), 2 config error.

All floating-point output is printed with 17 significant digits so reruns
with identical configs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .analysis import (
    hadamard_check,
    ibp_check,
    l2_identity_check,
    lemma21_check,
    pohozaev_check,
    polynomial_bump,
    report_to_dict,
    ros_oton_serra_check,
    solve_context,
)
from .domain import (
    Domain1D,
    boundary_points,
    domain_from_json,
    sample_boundary_2d,
)
from .errors import (
    ArgumentError,
    ConfigError,
    DimensionMismatchError,
    DomainCollisionError,
    ExpressionError,
    FracLabError,
    OverlapError,
    RangeError,
    SupercriticalError,
    SupportError,
)
from .fields import (
    DEFAULT_SEED,
    admissible_s_interval,
    check_c1_c2,
    check_c_condition,
    field_from_json,
    identity_field,
    min_flux,
    nonexistence_threshold,
)
from .assembly import frac_laplacian_pointwise
from .solve import pairs_to_json, solve_semilinear

__all__ = ["RunConfig", "main"]

_IDENTITIES = (
    "pohozaev",
    "ros-oton-serra",
    "ibp",
    "l2-radial",
    "lemma21",
    "hadamard",
)

_CONFIG_ERRORS = (
    ConfigError,
    ArgumentError,
    RangeError,
    SupportError,
    SupercriticalError,
    DimensionMismatchError,
    DomainCollisionError,
    ExpressionError,
    OverlapError,
)


def _fmt(v) -> str:
    """17-significant-digit rendering for every float we emit."""
    return "%.17g" % float(v)


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

_ALLOWED_KEYS = {
    "domain",
    "s",
    "n",
    "beta",
    "field",
    "identity",
    "k",
    "k2",
    "k_max",
    "even_only",
    "p",
    "tol",
    "quad_tols",
    "bump",
    "bp_side",
    "h",
    "semilinear_tol",
    "checks",
    "flux_tol",
    "samples",
    "boundary_m",
    "seed",
    "jobs",
    "out",
    "dump_matrices",
    "points",
    "grid",
    "R",
    "quad_tol",
}


@dataclass(frozen=True)
class RunConfig:
    """Validated, normalized run description (sweep lists already expanded)."""

    command: str
    domain: dict
    s_list: tuple[float, ...]
    n_list: tuple[int, ...]
    beta: float
    field: Optional[dict]
    identity: Optional[str]
    k: int
    k2: int
    k_max: int
    even_only: bool
    p: Optional[float]
    tol: float
    quad_tols: tuple[float, ...]
    bump: Optional[dict]
    bp_side: str
    h: Optional[float]
    semilinear_tol: float
    checks: Optional[tuple]
    flux_tol: float
    samples: int
    boundary_m: int
    seed: int
    jobs: Optional[int]
    out: str
    dump_matrices: bool
    points: Optional[tuple[float, ...]]
    grid: Optional[dict]
    R: Optional[float]
    quad_tol: Optional[float]
    given: frozenset


def _numbers(v, name) -> tuple[float, ...]:
    if isinstance(v, bool):
        raise ConfigError(f"'{name}' must be a number or list of numbers")
    if isinstance(v, (int, float)):
        return (float(v),)
    if (
        isinstance(v, (list, tuple))
        and v
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
    ):
        return tuple(float(x) for x in v)
    raise ConfigError(f"'{name}' must be a number or non-empty list of numbers")


def _integers(v, name) -> tuple[int, ...]:
    vals = _numbers(v, name)
    out = []
    for x in vals:
        if x != int(x):
            raise ConfigError(f"'{name}' entries must be integers, got {x}")
        out.append(int(x))
    return tuple(out)


def _one_int(v, name, lo=1) -> int:
    if isinstance(v, (list, tuple)):
        raise ConfigError(f"'{name}' must be a single integer")
    (x,) = _integers(v, name)
    if x < lo:
        raise ConfigError(f"'{name}' must be >= {lo}, got {x}")
    return x


def _one_float(v, name) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"'{name}' must be a number")
    return float(v)


def make_config(command: str, data: dict, given=None) -> RunConfig:
    """Validate a plain config dict (from JSON + overrides) into a RunConfig."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - _ALLOWED_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    given = frozenset(given if given is not None else data.keys())

    domain = data.get("domain", {"intervals": [[-1.0, 1.0]]})
    if not isinstance(domain, dict):
        raise ConfigError("'domain' must be an object")

    s_list = _numbers(data.get("s", 0.5), "s")
    for s in s_list:
        if not (0.0 < s < 1.0):
            raise ConfigError(f"s must lie in (0, 1), got {s}")

    n_list = _integers(data.get("n", 256), "n")
    for n in n_list:
        if not (8 <= n <= 2048) or (n & (n - 1)) != 0:
            raise ConfigError(
                f"n must be a power of two between 8 and 2048, got {n}"
            )

    beta = _one_float(data.get("beta", 2.0), "beta")

    identity = data.get("identity")
    if identity is not None and identity not in _IDENTITIES:
        raise ConfigError(
            f"identity must be one of {', '.join(_IDENTITIES)}; got '{identity}'"
        )

    k = _one_int(data.get("k", 1), "k")
    k2 = _one_int(data.get("k2", 2), "k2")
    k_max = _one_int(data.get("k_max", 6), "k_max")
    if max(k, k2, k_max) > 12:
        raise ConfigError("mode indices are limited to k <= 12")

    p = data.get("p")
    if p is not None:
        p = _one_float(p, "p")
        if p <= 2.0:
            raise ConfigError(f"p must exceed 2, got {p}")

    tol = _one_float(data.get("tol", 0.05), "tol")
    if tol <= 0.0:
        raise ConfigError(f"tol must be positive, got {tol}")

    quad_tols = _numbers(data.get("quad_tols", [1e-6, 1e-8]), "quad_tols")
    if any(t <= 0.0 for t in quad_tols):
        raise ConfigError("quad_tols entries must be positive")

    bump = data.get("bump")
    if bump is not None:
        if not isinstance(bump, dict) or set(bump) - {"center", "halfwidth", "power"}:
            raise ConfigError(
                "'bump' must be an object with keys center, halfwidth, power"
            )

    bp_side = data.get("bp_side", "right")
    if bp_side not in ("left", "right"):
        raise ConfigError(f"bp_side must be 'left' or 'right', got '{bp_side}'")

    h = data.get("h")
    if h is not None:
        h = _one_float(h, "h")
        if h <= 0.0:
            raise ConfigError(f"h must be positive, got {h}")

    semilinear_tol = _one_float(data.get("semilinear_tol", 1e-12), "semilinear_tol")

    checks = data.get("checks")
    if checks is not None:
        if not isinstance(checks, (list, tuple)) or not checks:
            raise ConfigError("'checks' must be a non-empty list")
        checks = tuple(checks)

    flux_tol = _one_float(data.get("flux_tol", -1e-6), "flux_tol")
    samples = _one_int(data.get("samples", 10_000), "samples")
    boundary_m = _one_int(data.get("boundary_m", 400), "boundary_m", lo=2)
    seed = _one_int(data.get("seed", DEFAULT_SEED), "seed", lo=0)

    jobs = data.get("jobs")
    if jobs is not None:
        jobs = _one_int(jobs, "jobs")

    out = data.get("out", ".")
    if not isinstance(out, str):
        raise ConfigError("'out' must be a directory path string")

    points = data.get("points")
    if points is not None:
        points = _numbers(points, "points")

    grid = data.get("grid")
    if grid is not None:
        if not isinstance(grid, dict) or set(grid) != {"lo", "hi", "count"}:
            raise ConfigError("'grid' must be an object with keys lo, hi, count")
        if _one_int(grid["count"], "grid.count") < 1:
            raise ConfigError("grid.count must be >= 1")

    R = data.get("R")
    if R is not None:
        R = _one_float(R, "R")
        if R <= 0.0:
            raise ConfigError(f"R must be positive, got {R}")

    quad_tol = data.get("quad_tol")
    if quad_tol is not None:
        quad_tol = _one_float(quad_tol, "quad_tol")
        if quad_tol <= 0.0:
            raise ConfigError(f"quad_tol must be positive, got {quad_tol}")

    return RunConfig(
        command=command,
        domain=domain,
        s_list=s_list,
        n_list=n_list,
        beta=beta,
        field=data.get("field"),
        identity=identity,
        k=k,
        k2=k2,
        k_max=k_max,
        even_only=bool(data.get("even_only", False)),
        p=p,
        tol=tol,
        quad_tols=quad_tols,
        bump=bump,
        bp_side=bp_side,
        h=h,
        semilinear_tol=semilinear_tol,
        checks=checks,
        flux_tol=flux_tol,
        samples=samples,
        boundary_m=boundary_m,
        seed=seed,
        jobs=jobs,
        out=out,
        dump_matrices=bool(data.get("dump_matrices", False)),
        points=points,
        grid=grid,
        R=R,
        quad_tol=quad_tol,
        given=given,
    )


def _load_config(args) -> RunConfig:
    data: dict = {}
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError("config file must contain a JSON object")
    given = set(data.keys())

    env_seed = os.environ.get("FRACLAB_SEED")
    if env_seed is not None:
        try:
            data["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(
                f"FRACLAB_SEED must be an integer, got {env_seed!r}"
            ) from None
        given.add("seed")

    for attr, key in (
        ("s", "s"),
        ("n", "n"),
        ("tol", "tol"),
        ("seed", "seed"),
        ("jobs", "jobs"),
        ("out", "out"),
        ("identity", "identity"),
        ("k", "k"),
        ("k2", "k2"),
        ("k_max", "k_max"),
        ("p", "p"),
        ("R", "R"),
        ("quad_tol", "quad_tol"),
    ):
        v = getattr(args, attr, None)
        if v is not None:
            data[key] = v
            given.add(key)
    for flag in ("even_only", "dump_matrices"):
        if getattr(args, flag, None):
            data[flag] = True
            given.add(flag)
    return make_config(args.command, data, given)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _outpath(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    return str(v)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _matrix_text(mat: np.ndarray) -> str:
    mat = np.asarray(mat, dtype=float)
    lines = [f"{mat.shape[0]} {mat.shape[1]}"]
    for row in mat:
        lines.append(" ".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _domain_1d(cfg: RunConfig) -> Domain1D:
    dom = domain_from_json(cfg.domain)
    if not isinstance(dom, Domain1D):
        raise ConfigError(f"'{cfg.command}' needs a 1D interval domain")
    return dom


def _field_or_default(cfg: RunConfig, dom: Domain1D):
    if cfg.field is not None:
        return field_from_json(cfg.field)
    lo, hi = dom.hull
    return identity_field(1, box=[(lo - 1.0, hi + 1.0)])


def _run_tasks(fn, tasks, jobs):
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(int(jobs), len(tasks)))
    if jobs == 1 or len(tasks) == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))


def _suffix(s: float, n: int, multi: bool) -> str:
    return f"_s{s:g}_n{n}" if multi else ""


# ---------------------------------------------------------------------------
# eigen
# ---------------------------------------------------------------------------

def _eigen_task(arg):
    cfg, s, n = arg
    dom = _domain_1d(cfg)
    ctx = solve_context(dom, s, n, cfg.beta, cfg.even_only)
    if cfg.k_max > len(ctx.pairs):
        raise ConfigError(
            f"k_max = {cfg.k_max} exceeds the {len(ctx.pairs)} available modes"
        )
    pairs = ctx.pairs[: cfg.k_max]
    rows = []
    prev = None
    for pr in pairs:
        gap = float("nan") if prev is None else pr.value - prev
        rows.append((pr.k, pr.value, gap))
        prev = pr.value
    out = {
        "s": s,
        "n": n,
        "rows": rows,
        "json": pairs_to_json(dom, s, ctx.mesh, pairs),
    }
    if cfg.dump_matrices:
        out["mass"] = _matrix_text(ctx.forms.mass)
        out["stiffness"] = _matrix_text(ctx.forms.stiffness)
    return out


def cmd_eigen(cfg: RunConfig) -> int:
    tasks = [(cfg, s, n) for s in cfg.s_list for n in cfg.n_list]
    multi = len(tasks) > 1
    results = _run_tasks(_eigen_task, tasks, cfg.jobs)
    for (_, s, n), res in zip(tasks, results):
        base = "eigen" + _suffix(s, n, multi)
        _write_csv(_outpath(cfg, base + ".csv"), ("k", "lambda", "gap"), res["rows"])
        with open(_outpath(cfg, base + ".json"), "w", encoding="utf-8") as fh:
            fh.write(res["json"])
            fh.write("\n")
        if cfg.dump_matrices:
            for kind in ("mass", "stiffness"):
                with open(
                    _outpath(cfg, f"{base}_{kind}.txt"), "w", encoding="utf-8"
                ) as fh:
                    fh.write(res[kind])
        print(
            f"eigen: s = {_fmt(s)}  n = {n}"
            + ("  (even modes only)" if cfg.even_only else "")
        )
        print("  k  lambda  gap")
        for krow, lam, gap in res["rows"]:
            print(f"  {krow}  {_fmt(lam)}  {_fmt(gap)}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_task(arg):
    cfg, s = arg
    dom = _domain_1d(cfg)
    rows = []

    if cfg.identity == "hadamard":
        bps = [b for b in boundary_points(dom) if b.side == cfg.bp_side]
        rep = hadamard_check(
            dom, s, cfg.k, bps[-1], cfg.h, cfg.even_only, n=max(cfg.n_list), beta=cfg.beta
        )
        ok = rep.rel_error <= cfg.tol
        rows.append(("hadamard", s, rep.n, rep.fd_slope, rep.formula, rep.rel_error, ok))
        rd = report_to_dict(rep)
        rd["identity"] = "hadamard"
        return {"rows": rows, "report": rd, "passed": ok}

    if cfg.identity == "lemma21":
        bump = polynomial_bump(**cfg.bump) if cfg.bump else polynomial_bump()
        X = _field_or_default(cfg, dom)
        history: tuple = ()
        rep = None
        for qt in sorted(cfg.quad_tols, reverse=True):
            rep = lemma21_check(bump, X, s, qt, domain=dom, history=history)
            history = rep.history
            rows.append(
                (
                    "lemma21",
                    s,
                    rep.n,
                    rep.lhs,
                    rep.rhs,
                    rep.rel_residual,
                    rep.rel_residual <= cfg.tol,
                )
            )
        return {
            "rows": rows,
            "report": report_to_dict(rep),
            "passed": rep.rel_residual <= cfg.tol,
        }

    X = _field_or_default(cfg, dom)
    history = ()
    rep = None
    for n in sorted(cfg.n_list):
        ctx = solve_context(dom, s, n, cfg.beta, cfg.even_only)
        if max(cfg.k, cfg.k2 if cfg.identity == "ibp" else 1) > len(ctx.pairs):
            raise ConfigError("requested mode index exceeds the solved modes")
        if cfg.identity in ("pohozaev", "ros-oton-serra") and cfg.p is not None:
            sol = solve_semilinear(ctx.forms, cfg.p, tol=cfg.semilinear_tol)
        else:
            sol = ctx.pairs[cfg.k - 1]
        if cfg.identity == "pohozaev":
            rep = pohozaev_check(dom, s, sol, X, mesh=ctx.mesh, history=history)
        elif cfg.identity == "ros-oton-serra":
            rep = ros_oton_serra_check(dom, s, sol, mesh=ctx.mesh, history=history)
        elif cfg.identity == "ibp":
            rep = ibp_check(
                dom, s, ctx.pairs[cfg.k - 1], ctx.pairs[cfg.k2 - 1], X,
                mesh=ctx.mesh, history=history,
            )
        elif cfg.identity == "l2-radial":
            rep = l2_identity_check(dom, s, sol, mesh=ctx.mesh, history=history)
        history = rep.history
        rows.append(
            (
                cfg.identity,
                s,
                n,
                rep.lhs,
                rep.rhs,
                rep.rel_residual,
                rep.rel_residual <= cfg.tol,
            )
        )
    return {
        "rows": rows,
        "report": report_to_dict(rep),
        "passed": rep.rel_residual <= cfg.tol,
    }


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.identity is None:
        raise ConfigError("'verify' needs an 'identity' entry")
    tasks = [(cfg, s) for s in cfg.s_list]
    results = _run_tasks(_verify_task, tasks, cfg.jobs)
    rows = []
    reports = []
    all_pass = True
    for res in results:
        rows.extend(res["rows"])
        reports.append(res["report"])
        all_pass = all_pass and res["passed"]
    _write_csv(
        _outpath(cfg, "verify.csv"),
        ("identity", "s", "n", "lhs", "rhs", "rel_residual", "pass"),
        rows,
    )
    _write_json(_outpath(cfg, "verify.json"), reports)
    for ident, s, n, lhs, rhs, rel, ok in rows:
        print(
            f"{ident}: s = {_fmt(s)}  n = {n}  lhs = {_fmt(lhs)}  "
            f"rhs = {_fmt(rhs)}  rel = {_fmt(rel)}  "
            + ("pass" if ok else "FAIL")
        )
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------

def _boundary_sample(cfg: RunConfig):
    dom = domain_from_json(cfg.domain)
    if isinstance(dom, Domain1D):
        return [((bp.x,), (bp.normal,)) for bp in boundary_points(dom)]
    return sample_boundary_2d(dom, cfg.boundary_m)


def _fraction_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def cmd_certify(cfg: RunConfig) -> int:
    if cfg.field is None:
        raise ConfigError("'certify' needs a 'field' entry")
    X = field_from_json(cfg.field)
    checks = cfg.checks
    if checks is None:
        checks = ("c-condition",) + (("min-flux",) if "domain" in cfg.given else ())

    rows = []
    docs = []
    failed = False
    last_constants: Optional[tuple] = None  # (c1, c2) from the latest certificate

    for spec in checks:
        if isinstance(spec, str):
            spec = {"kind": spec}
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ConfigError("each check must be a kind string or {'kind': ...}")
        kind = spec["kind"]

        if kind == "c-condition":
            cert = check_c_condition(X, m=cfg.samples, seed=cfg.seed)
            c = cert.constants[0]
            last_constants = (X.dim * c, c)
            rows.append((kind, _fmt(c), "", cert.verdict))
            docs.append(cert.to_json())
            failed = failed or cert.verdict != "pass"
            print(f"c-condition: c = {_fmt(c)}  verdict = {cert.verdict}")
        elif kind == "c1c2-condition":
            cert = check_c1_c2(X, m=cfg.samples, seed=cfg.seed)
            c1, c2 = cert.constants
            last_constants = (c1, c2)
            rows.append((kind, f"{_fmt(c1)};{_fmt(c2)}", "", cert.verdict))
            docs.append(cert.to_json())
            failed = failed or cert.verdict != "pass"
            print(
                f"c1c2-condition: c1 = {_fmt(c1)}  c2 = {_fmt(c2)}  "
                f"verdict = {cert.verdict}"
            )
        elif kind == "min-flux":
            flux = min_flux(X, _boundary_sample(cfg))
            verdict = "pass" if flux >= cfg.flux_tol else "fail"
            rows.append((kind, "", flux, verdict))
            docs.append({"kind": kind, "min_flux": flux, "verdict": verdict})
            failed = failed or verdict != "pass"
            print(f"min-flux: min_flux = {_fmt(flux)}  verdict = {verdict}")
        elif kind == "threshold":
            if "c1" in spec or "c2" in spec:
                c1 = _one_float(spec.get("c1"), "threshold.c1")
                c2 = _one_float(spec.get("c2"), "threshold.c2")
            elif last_constants is not None:
                c1, c2 = last_constants
            else:
                raise ConfigError(
                    "threshold check needs c1/c2 or a preceding certificate"
                )
            N = int(spec.get("N", X.dim))
            d0 = 2 * Fraction(c1).limit_denominator(10**6) / Fraction(
                c2
            ).limit_denominator(10**6) - N
            line = f"p > {2 * N}/({_fraction_str(d0)}-2s)"
            print(f"threshold: {line}")
            lo_s, hi_s = admissible_s_interval(c1, c2, N)
            print(f"threshold: admissible s in ({_fmt(lo_s)}, {_fmt(hi_s)})")
            values = []
            for s in cfg.s_list:
                pstar = nonexistence_threshold(c1, c2, N, s)
                values.append([s, pstar])
                rows.append(
                    (kind, f"{_fmt(c1)};{_fmt(c2)};{_fmt(s)};{_fmt(pstar)}", "", "pass")
                )
                print(f"threshold: s = {_fmt(s)} -> p* = {_fmt(pstar)}")
            docs.append(
                {
                    "kind": kind,
                    "c1": c1,
                    "c2": c2,
                    "N": N,
                    "line": line,
                    "admissible_s": [lo_s, hi_s],
                    "values": values,
                }
            )
        else:
            raise ConfigError(f"unknown certify check kind '{kind}'")

    _write_csv(
        _outpath(cfg, "certify.csv"),
        ("kind", "constants", "min_flux", "verdict"),
        rows,
    )
    _write_json(_outpath(cfg, "certify.json"), docs)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# semilinear
# ---------------------------------------------------------------------------

def cmd_semilinear(cfg: RunConfig) -> int:
    if cfg.p is None:
        raise ConfigError("'semilinear' needs a 'p' entry")
    dom = _domain_1d(cfg)
    combos = [(s, n) for s in cfg.s_list for n in cfg.n_list]
    multi = len(combos) > 1
    for s, n in combos:
        ctx = solve_context(dom, s, n, cfg.beta, even_only=False)
        sol = solve_semilinear(ctx.forms, cfg.p, tol=cfg.semilinear_tol)
        base = "semilinear" + _suffix(s, n, multi)
        segs = ctx.mesh.interior_to_full(sol.u)
        doc = {
            "s": s,
            "p": cfg.p,
            "n": n,
            "domain": [list(iv) for iv in dom.intervals],
            "residual": sol.residual,
            "iterations": sol.iterations,
            "nehari_gap": sol.nehari_gap,
            "nodal": [[float(v) for v in seg] for seg in segs],
        }
        _write_json(_outpath(cfg, base + ".json"), doc)
        rows = []
        for seg_nodes, seg_vals in zip(ctx.mesh.nodes, segs):
            rows.extend(
                (float(x), float(v)) for x, v in zip(seg_nodes, seg_vals)
            )
        _write_csv(_outpath(cfg, base + ".csv"), ("x", "u"), rows)
        print(
            f"semilinear: s = {_fmt(s)}  p = {_fmt(cfg.p)}  n = {n}  "
            f"iterations = {sol.iterations}  residual = {_fmt(sol.residual)}  "
            f"nehari_gap = {_fmt(sol.nehari_gap)}  "
            f"sup_u = {_fmt(float(np.max(np.abs(sol.u))))}"
        )
    return 0


# ---------------------------------------------------------------------------
# fraclap
# ---------------------------------------------------------------------------

def cmd_fraclap(cfg: RunConfig) -> int:
    bump = polynomial_bump(**cfg.bump) if cfg.bump else polynomial_bump()
    lo_sup, hi_sup = bump.support
    center = 0.5 * (lo_sup + hi_sup)
    halfwidth = 0.5 * (hi_sup - lo_sup)
    if cfg.points is not None:
        xs = list(cfg.points)
    elif cfg.grid is not None:
        xs = [
            float(v)
            for v in np.linspace(
                float(cfg.grid["lo"]), float(cfg.grid["hi"]), int(cfg.grid["count"])
            )
        ]
    else:
        xs = [
            float(v)
            for v in np.linspace(
                center - 0.9 * halfwidth, center + 0.9 * halfwidth, 19
            )
        ]
    multi = len(cfg.s_list) > 1
    for s in cfg.s_list:
        rows = []
        for x in xs:
            reach = abs(x - center) + halfwidth
            R = cfg.R if cfg.R is not None else 8.0 * (reach + 1.0)
            tail_sup = 0.0 if R >= reach else None
            fv = frac_laplacian_pointwise(
                bump, s, float(x), R=R, tol=cfg.quad_tol, tail_sup=tail_sup
            )
            rows.append((float(x), fv.value, fv.error))
        name = "fraclap" + (f"_s{s:g}" if multi else "") + ".csv"
        _write_csv(_outpath(cfg, name), ("x", "value", "error"), rows)
        print(f"fraclap: s = {_fmt(s)}  points = {len(rows)}")
        for x, v, e in rows:
            print(f"  x = {_fmt(x)}  value = {_fmt(v)}  error <= {_fmt(e)}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "eigen": cmd_eigen,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "semilinear": cmd_semilinear,
    "fraclap": cmd_fraclap,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--s", type=float, action="append", help="override s (repeatable)")
    common.add_argument("--n", type=int, action="append", help="override n (repeatable)")
    common.add_argument("--tol", type=float, help="pass/fail tolerance")
    common.add_argument("--seed", type=int, help="RNG seed override")
    common.add_argument("--jobs", type=int, help="worker pool size for sweeps")
    common.add_argument("--out", help="output directory (default '.')")

    parser = argparse.ArgumentParser(
        prog="fraclab",
        description="Verification toolkit for nonlocal Pohozaev-type identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eigen", parents=[common], help="solve the eigenproblem")
    pe.add_argument("--k-max", dest="k_max", type=int, help="number of modes")
    pe.add_argument("--even-only", dest="even_only", action="store_true", default=None)
    pe.add_argument(
        "--dump-matrices", dest="dump_matrices", action="store_true", default=None,
        help="also write mass/stiffness matrices as text",
    )

    pv = sub.add_parser("verify", parents=[common], help="run an identity check")
    pv.add_argument("--identity", choices=_IDENTITIES)
    pv.add_argument("--k", type=int, help="mode index")
    pv.add_argument("--k2", type=int, help="second mode index (ibp)")
    pv.add_argument("--p", type=float, help="semilinear exponent (pohozaev)")
    pv.add_argument("--even-only", dest="even_only", action="store_true", default=None)

    sub.add_parser("certify", parents=[common], help="field/geometry certificates")

    ps = sub.add_parser("semilinear", parents=[common], help="solve the semilinear problem")
    ps.add_argument("--p", type=float, help="nonlinearity exponent")

    pf = sub.add_parser("fraclap", parents=[common], help="pointwise operator values")
    pf.add_argument("--R", type=float, help="principal-value split radius")
    pf.add_argument("--quad-tol", dest="quad_tol", type=float, help="target tolerance")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        return _COMMANDS[args.command](cfg)
    except _CONFIG_ERRORS as exc:
        print(f"fraclab: config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"fraclab: config error: {exc}", file=sys.stderr)
        return 2
    except FracLabError as exc:
        print(f"fraclab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
