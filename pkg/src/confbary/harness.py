"""Experiment drivers behind the ``qcdf`` and ``bench`` commands."""

from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .ensembles import EnsembleSpec, rng_for, sample_uniform_sphere
from .errors import ConfbaryError
from .linalg import jacobi_eigh
from .solvers import Method, SolverConfig, Status, solve

QUANTILES = (0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99)
BANDS = (0, 10, 50)


def q_values(n: int, d: int, N: int, seed: int, chunk: int = 4096) -> np.ndarray:
    """Contraction numbers ``q`` at the origin of ``N`` equal-weight uniform clouds.

    Instance ``i`` uses the stream ``rng_for(seed, i)``; the eigenvalues of
    the whole batch come from one batched Jacobi solve per chunk.
    """
    if n < 1 or d < 2 or N < 0:
        raise ValueError("need n >= 1, d >= 2 and N >= 0")
    out = np.empty(N)
    eye = np.eye(d)
    for start in range(0, N, chunk):
        idx = range(start, min(start + chunk, N))
        x = np.stack([sample_uniform_sphere(d, rng_for(seed, i), n) for i in idx])
        com = x.mean(axis=1)
        residual = np.linalg.norm(com, axis=1)
        m = np.einsum("kni,knj->kij", x, x) / n
        lam = jacobi_eigh(eye - m)[:, 0]
        with np.errstate(divide="ignore"):
            q = np.where(lam > 0.0, 4.0 * residual / lam**2, np.inf)
        out[start : start + len(idx)] = q
    return out


def qcdf_table(q) -> tuple[np.ndarray, np.ndarray]:
    """Sorted ``q`` values and the empirical CDF ``(k + 1) / N`` at each."""
    qs = np.sort(np.asarray(q, dtype=float))
    return qs, np.arange(1, len(qs) + 1) / len(qs)


def qcdf_summary(q) -> dict:
    q = np.asarray(q, dtype=float)
    return {
        "samples": int(q.size),
        "quantiles": {f"{p:g}": float(np.quantile(q, p)) for p in QUANTILES},
        "max": float(q.max()),
        "p_q_gt_0.99": float(np.mean(q > 0.99)),
        "p_q_lt_1": float(np.mean(q < 1.0)),
    }


def run_bench(
    spec: EnsembleSpec,
    methods,
    eps_list,
    cfg: SolverConfig | None = None,
    timing: bool = True,
    workers: int = 1,
) -> list[dict]:
    """Solve every instance of ``spec`` with every method and tolerance.

    Returns one row per (method, eps, instance) in that nesting order. Solver
    failures are recorded in ``status`` and never abort the run. Wall times
    use a monotonic clock and are ``nan`` when ``timing`` is off.
    """
    cfg = cfg or SolverConfig()
    methods = [Method(m) for m in methods]

    def one(job):
        method, eps, i = job
        mu = spec.measure(i)
        c = dataclasses.replace(cfg, method=method, epsilon=eps)
        t0 = time.perf_counter()
        try:
            res = solve(mu, None, c)
            its, status, bound = res.iterations, res.status.value, res.error_bound
        except ConfbaryError as exc:
            its, status, bound = -1, f"{Status.PRECISION_LIMIT.value}: {exc}", math.inf
        wall = time.perf_counter() - t0 if timing else math.nan
        return {
            "method": method.value,
            "eps": float(eps),
            "index": i,
            "iterations": its,
            "status": status,
            "error_bound": float(bound),
            "wall_time_s": wall,
        }

    jobs = [(m, e, i) for m in methods for e in eps_list for i in range(spec.N)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, jobs))
    return [one(j) for j in jobs]


def bench_summary(rows: list[dict]) -> list[dict]:
    """Per (method, eps) iteration statistics with central percentile bands.

    Band ``p`` spans the ``p/2`` and ``100 - p/2`` percentiles, so band 0 is
    the full range and band 50 the interquartile range.
    """
    groups: dict = {}
    for r in rows:
        groups.setdefault((r["method"], r["eps"]), []).append(r)
    out = []
    for (method, eps), rs in groups.items():
        its = np.array([r["iterations"] for r in rs], dtype=float)
        walls = np.array([r["wall_time_s"] for r in rs], dtype=float)
        conv = np.array([r["status"] == Status.CONVERGED.value for r in rs])
        entry = {
            "method": method,
            "eps": eps,
            "instances": len(rs),
            "converged": int(conv.sum()),
            "mean_iterations": float(its.mean()),
            "median_iterations": float(np.median(its)),
            "max_iterations": float(its.max()),
            "bands": {
                str(p): [float(np.percentile(its, p / 2)), float(np.percentile(its, 100 - p / 2))]
                for p in BANDS
            },
            "mean_wall_time_s": float(np.mean(walls)) if np.all(np.isfinite(walls)) else None,
        }
        out.append(entry)
    return out
