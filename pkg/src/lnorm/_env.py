"""Runtime defaults, overridable through LNORM_* environment variables."""

from __future__ import annotations

import os

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
DEFAULT_DENSE_CAP = 4096


def _env(name: str, cast, fallback):
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise ValueError(f"{name}={raw!r} is not a valid {cast.__name__}") from exc


def default_tol() -> float:
    return _env("LNORM_TOL", float, DEFAULT_TOL)


def default_max_iter() -> int:
    return _env("LNORM_MAX_ITER", int, DEFAULT_MAX_ITER)


def default_dense_cap() -> int:
    return _env("LNORM_DENSE_CAP", int, DEFAULT_DENSE_CAP)


def default_threads() -> int:
    return _env("LNORM_THREADS", int, os.cpu_count() or 1)
