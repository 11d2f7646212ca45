"""Command-line front end: norm sweeps, analytic bounds, witness certificates,
critical-point scans and a structured-vs-dense micro benchmark.

Every command emits one machine-readable record (JSON by default, CSV with
--format csv).  Records are deterministic: identical flags give identical
output except for the wall-time meta field, and ``stability_hash`` is the
SHA-256 of the record with that field excluded.

Exit codes: 0 success, 2 usage error, 3 internal-consistency failure
(a numerically checked theorem violated, i.e. a bug).
"""

from __future__ import annotations

import argparse
import csv
import gc
import hashlib
import io
import json
import math
import sys
import time

import numpy as np

from . import __version__
from ._env import default_dense_cap, default_max_iter, default_threads, default_tol
from .analytic import (
    DeltaBoundParams,
    delta_upper_bound,
    f_of_s,
    lacunary_constants,
    lacunary_norm,
    lacunary_t_opt,
    pq_constant,
    s_star,
)
from .critical import scan_critical
from .errors import InternalConsistencyError, LnormError
from .generators import (
    C,
    GeneratorSequence,
    L,
    StructuredMatrix,
    materialize_dense,
    matvec,
)
from .normest import log_fit_extrapolation, truncation_sweep
from .witness import (
    build_as_witness,
    build_lacunary_witness,
    build_pnorm_witness,
    certify_as_witness,
    certify_lacunary_witness,
    certify_pnorm_witness,
)
from . import _kernels

TOOL = "lnorm"
SCHEMA = 1

_CSV_HEADERS = {
    "norm": ["M", "value", "residual", "iterations", "lower_certificate"],
    "bounds": ["name", "k", "value"],
    "witness": ["name", "value"],
    "critical": ["s", "verdict", "witness_ratio", "witness_eps", "sweep_max",
                 "upper_bound"],
    "bench": ["M", "structured_seconds", "dense_seconds", "speedup"],
}


class UsageError(Exception):
    pass


# ----------------------------- record plumbing -----------------------------


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def _record(command: str, params: dict, rows: list[dict], wall_time: float,
            extra_meta: dict | None = None) -> dict:
    params = {k: _jsonable(v) for k, v in params.items()}
    rows = [{k: _jsonable(v) for k, v in row.items()} for row in rows]
    core = {"schema": SCHEMA, "command": command, "params": params, "rows": rows}
    digest = hashlib.sha256(
        json.dumps(core, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    meta = {
        "tool": TOOL,
        "version": __version__,
        "deterministic": True,
        "wall_time_s": wall_time,
        "stability_hash": digest,
    }
    if extra_meta:
        meta.update({k: _jsonable(v) for k, v in extra_meta.items()})
    core["meta"] = meta
    return core


def _render(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2, sort_keys=True) + "\n"
    headers = _CSV_HEADERS[record["command"]]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=headers, lineterminator="\n")
    writer.writeheader()
    for row in record["rows"]:
        writer.writerow({k: row.get(k, "") for k in headers})
    return buf.getvalue()


def _emit(record: dict, fmt: str, out: str | None) -> None:
    text = _render(record, fmt)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


# ----------------------------- argument helpers -----------------------------


def _parse_sizes(raw: str) -> list[int]:
    try:
        sizes = [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"--sizes must be a comma-separated list of integers: {raw!r}") from exc
    if not sizes:
        raise UsageError("--sizes must contain at least one size")
    return sizes


def _parse_grid(raw: str) -> list[float]:
    parts = raw.split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid must look like lo:hi:step, got {raw!r}")
    try:
        lo, hi, step = (float(tok) for tok in parts)
    except ValueError as exc:
        raise UsageError(f"--grid must be numeric lo:hi:step, got {raw!r}") from exc
    if step <= 0 or hi < lo:
        raise UsageError(f"--grid needs step > 0 and hi >= lo, got {raw!r}")
    grid = []
    k = 0
    while True:
        val = lo + k * step
        if val > hi + 1e-12 * max(1.0, abs(hi)):
            break
        grid.append(val)
        k += 1
    if not grid:
        raise UsageError(f"--grid {raw!r} produced no points")
    return grid


def _family_matrix(args) -> StructuredMatrix:
    if args.family in ("as", "cesaro"):
        if args.s is None:
            raise UsageError(f"--family {args.family} requires --s")
        gen = (GeneratorSequence.a_s(args.s) if args.family == "as"
               else GeneratorSequence.cesaro(args.s))
        return StructuredMatrix(L if args.family == "as" else C, gen)
    if args.N is None:
        raise UsageError("--family lacunary requires --N")
    return StructuredMatrix(C, GeneratorSequence.lacunary(args.N))


# ----------------------------- subcommands -----------------------------


def cmd_norm(args) -> dict:
    mat = _family_matrix(args)
    sizes = _parse_sizes(args.sizes)
    t0 = time.perf_counter()
    estimates = truncation_sweep(mat, args.p, sizes, tol=args.tol,
                                 max_iter=args.max_iter, threads=args.threads)
    wall = time.perf_counter() - t0
    rows = [
        {"M": e.truncation, "value": e.value, "residual": e.residual,
         "iterations": e.iterations, "lower_certificate": e.lower_certificate}
        for e in estimates
    ]
    params = {"family": args.family, "s": args.s, "N": args.N, "p": args.p,
              "sizes": sizes, "tol": args.tol if args.tol is not None else default_tol()}
    extra = {}
    if args.extrapolate:
        fit = log_fit_extrapolation(estimates)
        extra["extrapolation_heuristic"] = fit
        extra["extrapolation_note"] = (
            "least-squares fit of value ~ c - b/log(M); exploratory only, "
            "no convergence rate is known")
    return _record("norm", params, rows, wall, extra)


def cmd_bounds(args) -> dict:
    if args.s is None and args.N is None:
        raise UsageError("bounds requires --s and/or --N")
    t0 = time.perf_counter()
    rows: list[dict] = []

    def add(name: str, value, k=""):
        rows.append({"name": name, "k": k, "value": value})

    add("s_star", s_star())
    if args.s is not None:
        params = DeltaBoundParams.default_for(args.s, n_max=args.n_max)
        report = delta_upper_bound(params, GeneratorSequence.a_s(args.s))
        add("f_s", f_of_s(args.s))
        add("delta_upper_bound", report.value)
        add("delta_sup_term", report.detail["sup_term"])
        add("delta_head_term", report.detail["head"])
    if args.p is not None:
        add("pq_constant", pq_constant(args.p))
        add("q_conjugate", args.p / (args.p - 1.0))
    if args.N is not None:
        t = lacunary_t_opt(args.N) if args.t == "opt" else float(args.t)
        add("lacunary_norm", lacunary_norm(args.N))
        add("t_opt", lacunary_t_opt(args.N))
        add("t_used", t)
        for k in range(args.kmax + 1):
            consts = lacunary_constants(args.N, t, k)
            add("eta_k", consts.eta_k, k)
        add("eta_limit", lacunary_constants(args.N, t, 0).eta_limit)
    wall = time.perf_counter() - t0
    params = {"s": args.s, "p": args.p, "N": args.N, "t": args.t,
              "kmax": args.kmax, "n_max": args.n_max}
    return _record("bounds", params, rows, wall)


def cmd_witness(args) -> dict:
    t0 = time.perf_counter()
    rows: list[dict] = []

    def add(name: str, value):
        rows.append({"name": name, "value": value})

    if args.kind == "as":
        if args.s is None:
            raise UsageError("--kind as requires --s")
        eps = "auto" if args.eps == "auto" else float(args.eps)
        w = build_as_witness(args.s, args.M, eps)
        cert = certify_as_witness(w)
        add("ratio", cert.ratio)
        add("pointwise_ok", cert.pointwise_ok)
        add("eps", cert.eps)
        add("tail_bound", cert.tail_bound)
        add("max_route_gap", cert.max_route_gap)
        add("target", 4.0)
    elif args.kind == "pnorm":
        if args.s is None:
            raise UsageError("--kind pnorm requires --s")
        w = build_pnorm_witness(args.s, args.p, args.m)
        cert = certify_pnorm_witness(w)
        add("ratio", cert.ratio)
        add("self_bound_ok", cert.self_bound_ok)
        add("self_bound_slack", cert.slack)
        add("gamma_m", cert.gamma)
        add("xnorm_p_p", cert.xnorm_pp)
        add("target", pq_constant(args.p))
    else:
        if args.N is None:
            raise UsageError("--kind lacunary requires --N")
        w = build_lacunary_witness(args.N, args.levels)
        cert = certify_lacunary_witness(w)
        add("ratio_sq", cert.ratio_sq)
        add("bound_ok", cert.bound_ok)
        add("rayleigh_bound", cert.rayleigh_bound)
        add("limit", cert.limit)
        add("norm_sq", w.norm_sq)
    wall = time.perf_counter() - t0
    params = {"kind": args.kind, "s": args.s, "M": args.M, "eps": args.eps,
              "p": args.p, "m": args.m, "N": args.N, "levels": args.levels}
    return _record("witness", params, rows, wall)


def cmd_critical(args) -> dict:
    grid = _parse_grid(args.grid)
    if args.p == 2.0:
        lo, hi = grid[0], grid[-1]
        for special in (s_star(), 1.0 / (2.0 * math.sqrt(2.0))):
            if lo <= special <= hi:
                grid.append(special)
        grid = sorted(set(grid))
    t0 = time.perf_counter()
    scan = scan_critical(args.p, grid, M_max=args.Mmax, tol=args.tol,
                         witness_M=args.witness_M, threads=args.threads)
    wall = time.perf_counter() - t0
    rows = [
        {"s": pt.s, "verdict": pt.verdict, "witness_ratio": pt.witness_ratio,
         "witness_eps": pt.witness_eps, "sweep_max": pt.sweep_max,
         "upper_bound": pt.upper_bound}
        for pt in scan.points
    ]
    params = {"p": args.p, "grid": args.grid, "Mmax": args.Mmax,
              "witness_M": args.witness_M}
    extra = {"bracket_low": scan.bracket[0], "bracket_high": scan.bracket[1],
             "target": scan.target}
    return _record("critical", params, rows, wall, extra)


def cmd_bench(args) -> dict:
    if args.reps < 1:
        raise UsageError(f"--reps must be >= 1, got {args.reps}")
    sizes = _parse_sizes(args.sizes)
    cap = default_dense_cap()
    mat = StructuredMatrix(L, GeneratorSequence.a_s(1.0))
    _kernels.warmup()
    t0 = time.perf_counter()
    rows = []
    structured_times = []
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        best: dict[int, float] = {M: math.inf for M in sizes}
        dense_best: dict[int, float | None] = {M: None for M in sizes}
        # two passes with a full untimed batch first: one cold call is not
        # enough to ramp the clock, and per-call dispatch jitter swamps
        # microsecond calls, so batches are timed and averaged
        for _ in range(2):
            for M in sizes:
                x = np.full(M, 1.0 / math.sqrt(M))
                batch = max(1, 65536 // M)
                for _ in range(batch):
                    matvec(mat, x)
                for _ in range(args.reps):
                    t1 = time.perf_counter()
                    for _ in range(batch):
                        matvec(mat, x)
                    best[M] = min(best[M], (time.perf_counter() - t1) / batch)
                if M <= cap:
                    dense = materialize_dense(mat, M)
                    dense @ x
                    prev = dense_best[M]
                    cur = math.inf if prev is None else prev
                    for _ in range(args.reps):
                        t1 = time.perf_counter()
                        dense @ x
                        cur = min(cur, time.perf_counter() - t1)
                    dense_best[M] = cur
        for M in sizes:
            structured_times.append(best[M])
            rows.append({
                "M": M,
                "structured_seconds": best[M],
                "dense_seconds": dense_best[M],
                "speedup": (dense_best[M] / best[M])
                           if dense_best[M] is not None else None,
            })
    finally:
        if gc_was_enabled:
            gc.enable()
    wall = time.perf_counter() - t0
    exponent = None
    if len(sizes) >= 2:
        exponent = float(np.polyfit(np.log(sizes), np.log(structured_times), 1)[0])
    params = {"sizes": sizes, "reps": args.reps, "dense_cap": cap}
    extra = {"fitted_exponent": exponent}
    return _record("bench", params, rows, wall, extra)


# ----------------------------- parser -----------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL,
        description="operator norms of structured infinite matrices: "
                    "estimates, bounds, certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="write the record to a file")

    p_norm = sub.add_parser("norm", help="truncation sweep of a norm estimate")
    p_norm.add_argument("--family", choices=("as", "cesaro", "lacunary"), required=True)
    p_norm.add_argument("--s", type=float, default=None)
    p_norm.add_argument("--N", type=int, default=None)
    p_norm.add_argument("--p", type=float, default=2.0)
    p_norm.add_argument("--sizes", default="256,1024,4096")
    p_norm.add_argument("--tol", type=float, default=None)
    p_norm.add_argument("--max-iter", type=int, default=None, dest="max_iter")
    p_norm.add_argument("--threads", type=int, default=default_threads())
    p_norm.add_argument("--extrapolate", action="store_true")
    common(p_norm)

    p_bounds = sub.add_parser("bounds", help="evaluate the analytic constants")
    p_bounds.add_argument("--s", type=float, default=None)
    p_bounds.add_argument("--p", type=float, default=None)
    p_bounds.add_argument("--N", type=int, default=None)
    p_bounds.add_argument("--t", default="opt")
    p_bounds.add_argument("--kmax", type=int, default=8)
    p_bounds.add_argument("--n-max", type=int, default=10**6, dest="n_max")
    common(p_bounds)

    p_wit = sub.add_parser("witness", help="build and certify a lower-bound vector")
    p_wit.add_argument("--kind", choices=("as", "pnorm", "lacunary"), required=True)
    p_wit.add_argument("--s", type=float, default=None)
    p_wit.add_argument("--M", type=int, default=10**5)
    p_wit.add_argument("--eps", default="auto")
    p_wit.add_argument("--p", type=float, default=2.0)
    p_wit.add_argument("--m", type=int, default=10**4)
    p_wit.add_argument("--N", type=int, default=None)
    p_wit.add_argument("--levels", type=int, default=16)
    common(p_wit)

    p_crit = sub.add_parser("critical", help="scan for the norm-plateau onset")
    p_crit.add_argument("--p", type=float, default=2.0)
    p_crit.add_argument("--grid", default="0.25:0.40:0.005")
    p_crit.add_argument("--Mmax", type=int, default=2**14)
    p_crit.add_argument("--witness-M", type=int, default=2**14, dest="witness_M")
    p_crit.add_argument("--tol", type=float, default=None)
    p_crit.add_argument("--threads", type=int, default=default_threads())
    common(p_crit)

    p_bench = sub.add_parser("bench", help="structured vs dense matvec timing")
    p_bench.add_argument("--sizes", default="1024,2048,4096,8192,16384")
    p_bench.add_argument("--reps", type=int, default=11)
    common(p_bench)

    return parser


_DISPATCH = {
    "norm": cmd_norm,
    "bounds": cmd_bounds,
    "witness": cmd_witness,
    "critical": cmd_critical,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        record = _DISPATCH[args.command](args)
    except UsageError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 2
    except InternalConsistencyError as exc:
        print(f"{TOOL}: internal consistency failure: {exc}", file=sys.stderr)
        return 3
    except (LnormError, ValueError) as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 2
    _emit(record, args.format, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
