"""Monte Carlo harness: logical error rate per unit simulating time.

Trial ``i`` of a job draws from its own stream,
``SeedSequence(seed, spawn_key=(i,))``, and trials are grouped in fixed
chunks whose integer tallies are summed. Results therefore do not depend on
how many worker processes ran the chunks or in which order they finished.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import NormalDist
from typing import Iterable, Mapping, Sequence

import numpy as np

from .decoder import TrialDecoder
from .lattice import LatticeConfig, cached_lattice
from .noise import (Mtqc2Removal, NoiseParams, Variant, mechanism_probabilities, threshold_to_loss)

log = logging.getLogger(__name__)

CHUNK = 250
Z99 = NormalDist().inv_cdf(0.995)

__all__ = [
    "SimJob", "SimResult", "ThresholdEstimate", "NoCrossing", "run_job", "run_grid",
    "find_threshold", "extrapolate_distance", "threshold_to_loss", "wilson_interval",
]


@dataclass(frozen=True)
class SimJob:
    """One (lattice, noise point) Monte Carlo job.

    ``eta``, ``n``, ``m`` and ``n_rep`` are provenance only: the sampler uses
    ``p_z`` and ``p_f`` directly.
    """

    d: int
    p_z: float
    p_f: float = 0.0
    variant: Variant = Variant.MTQC2
    trials: int = 10_000
    seed: int = 0
    T: int | None = None
    eta: float | None = None
    n: int | None = None
    m: int = 2
    n_rep: int = 1
    mtqc2_model: Mtqc2Removal = Mtqc2Removal.STATED
    backend: str = "pymatching"

    def __post_init__(self):
        LatticeConfig(self.d, self.T)
        if self.T is None:
            object.__setattr__(self, "T", 4 * self.d + 1)
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        object.__setattr__(self, "mtqc2_model", Mtqc2Removal(self.mtqc2_model))
        if self.trials < 1:
            raise ValueError(f"trial budget must be >= 1, got {self.trials}")
        if not 0.0 <= self.p_z <= 1.0:
            raise ValueError(f"p_z must lie in [0, 1], got {self.p_z}")
        if not 0.0 <= self.p_f <= 1.0:
            raise ValueError(f"p_f must lie in [0, 1], got {self.p_f}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_noise(cls, d: int, noise: NoiseParams, p_z: float | None = None, **kw) -> "SimJob":
        """Job at the removal rate implied by ``noise``; ``p_z`` defaults to the noise point's own."""
        return cls(d=d, p_z=noise.p_z if p_z is None else p_z, p_f=noise.p_f, variant=noise.variant,
                   eta=noise.eta, n=noise.n, m=noise.m, n_rep=noise.n_rep, **kw)

    @property
    def mechanisms(self) -> tuple[float, ...]:
        return mechanism_probabilities(self.p_f, self.variant, self.mtqc2_model)


@dataclass(frozen=True)
class SimResult:
    """Aggregated outcome of a job.

    ``block_failures`` counts non-lost trials whose residual error crosses the
    x = 0 boundary an odd number of times in total; it is a whole-volume
    diagnostic reported next to the per-time rate.
    """

    job: SimJob
    trials: int
    lost: int
    erroneous_times: int
    total_times: int
    block_failures: int
    p_L: float
    ci99: float
    ci_low: float
    ci_high: float
    logical_loss_rate: float

    @property
    def block_failure_rate(self) -> float:
        kept = self.trials - self.lost
        return self.block_failures / kept if kept else math.nan

    def record(self) -> dict:
        """Flat output record."""
        j = self.job
        return {
            "variant": j.variant.value,
            "d": j.d,
            "T": j.T,
            "n": j.n,
            "m": j.m,
            "N_rep": j.n_rep,
            "eta": j.eta,
            "p_f": j.p_f,
            "p_Z": j.p_z,
            "trials": self.trials,
            "logical_loss_rate": self.logical_loss_rate,
            "p_L": None if math.isnan(self.p_L) else self.p_L,
            "ci99": None if math.isnan(self.ci99) else self.ci99,
            "seed": j.seed,
        }


def wilson_interval(k: int, n: int, z: float = Z99) -> tuple[float, float]:
    """Wilson score interval for ``k`` successes in ``n`` Bernoulli draws."""
    if n <= 0:
        return math.nan, math.nan
    p = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    centre = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _trial_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))


def _run_chunk(job: SimJob, start: int, stop: int) -> tuple[int, int, int]:
    """Tallies (lost, erroneous times, block failures) for trials ``start .. stop-1``."""
    lat = cached_lattice(job.d, job.T)
    dec = TrialDecoder(lat, job.mechanisms, job.p_z, backend=job.backend)
    low_edge = dec.g.ends[:, 1] == lat.n_cells
    lost = errs = blocks = 0
    if not dec.draw_removals and job.backend == "pymatching":
        dephased = np.stack([dec.sample(_trial_rng(job.seed, i))[1] for i in range(start, stop)])
        residual = dephased ^ dec.correction_batch(dephased)
        for row in residual:
            errs += len(dec.spanning_times(row))
        blocks = int((((residual & low_edge).sum(axis=1)) % 2).sum())
        return lost, errs, blocks
    for i in range(start, stop):
        removed, dephased = dec.sample(_trial_rng(job.seed, i))
        out, residual, labels = dec.decode_residual(removed, dephased)
        if out.logical_loss:
            lost += 1
            continue
        errs += len(out.erroneous_times)
        blocks += dec.low_crossing_parity(residual, labels)
    return lost, errs, blocks


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]


def _aggregate(job: SimJob, tallies: Iterable[tuple[int, int, int]]) -> SimResult:
    lost = errs = blocks = 0
    for a, b, c in tallies:
        lost += a
        errs += b
        blocks += c
    kept = job.trials - lost
    total = kept * job.T
    if total:
        p_l = errs / total
        lo, hi = wilson_interval(errs, total)
        half = 0.5 * (hi - lo)
    else:
        p_l = lo = hi = half = math.nan
    return SimResult(job=job, trials=job.trials, lost=lost, erroneous_times=errs, total_times=total,
                     block_failures=blocks, p_L=p_l, ci99=half, ci_low=lo, ci_high=hi,
                     logical_loss_rate=lost / job.trials)


def _star_chunk(args):
    return _run_chunk(*args)


def default_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover - non-Linux
        return max(1, os.cpu_count() or 1)


def run_jobs(jobs: Sequence[SimJob], workers: int = 1) -> list[SimResult]:
    """Run several jobs, sharing one worker pool; output order follows ``jobs``."""
    tasks = [(k, (job, s, e)) for k, job in enumerate(jobs) for s, e in _chunks(job.trials)]
    if workers <= 1 or len(tasks) <= 1:
        tallies = [_run_chunk(*t) for _, t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(_star_chunk, [t for _, t in tasks], chunksize=1))
    per_job: list[list] = [[] for _ in jobs]
    for (k, _), tally in zip(tasks, tallies):
        per_job[k].append(tally)
    results = [_aggregate(job, per_job[k]) for k, job in enumerate(jobs)]
    for r in results:
        log.info("d=%d p_Z=%.5g p_f=%.4g: p_L=%.5g +- %.2g (lost %.3g)", r.job.d, r.job.p_z,
                 r.job.p_f, r.p_L, r.ci99, r.logical_loss_rate)
    return results


def run_job(job: SimJob, workers: int = 1) -> SimResult:
    """Run every trial of ``job`` and aggregate; bit-identical for any ``workers``."""
    return run_jobs([job], workers)[0]


def run_grid(ds: Sequence[int], p_zs: Sequence[float], workers: int = 1, **job_kw) -> list[SimResult]:
    """One job per (d, p_Z) pair, d-major."""
    jobs = [SimJob(d=d, p_z=p, **job_kw) for d in ds for p in p_zs]
    return run_jobs(jobs, workers)


# -- threshold and extrapolation -----------------------------------------------------------


class NoCrossing(ValueError):
    """Raised when two curves do not intersect inside the scanned grid."""


@dataclass(frozen=True)
class ThresholdEstimate:
    """Crossing of the two largest distances, with the spread over all adjacent pairs."""

    p_th: float
    uncertainty: float
    pair_crossings: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)


def _pair_crossing(ps, la, lb) -> tuple[float | None, str]:
    """First upward zero of ``lb - la`` (larger d minus smaller d) by linear interpolation."""
    gaps = [(p, b - a) for p, a, b in zip(ps, la, lb) if math.isfinite(a) and math.isfinite(b)]
    if len(gaps) < 2:
        return None, "too few points with nonzero p_L"
    for (p0, g0), (p1, g1) in zip(gaps, gaps[1:]):
        if g0 < 0.0 <= g1:
            return p0 + (p1 - p0) * (-g0) / (g1 - g0), "ok"
    if all(g < 0 for _, g in gaps):
        return None, "no crossing: larger d is better at every grid point (crossing above the grid)"
    if all(g >= 0 for _, g in gaps):
        return None, "no crossing: larger d is worse at every grid point (crossing below the grid)"
    return None, "no crossing: gap changes sign only downward"


def find_threshold(curves: Mapping[tuple[int, float], float] | Sequence[SimResult]) -> ThresholdEstimate:
    """Threshold dephasing rate from pairwise crossings of log p_L curves.

    Args:
        curves: either ``SimResult`` objects or a mapping ``(d, p_Z) -> p_L``.

    Raises:
        NoCrossing: the two largest distances do not cross on the grid.
    """
    if isinstance(curves, Mapping):
        table = dict(curves)
    else:
        table = {(r.job.d, r.job.p_z): r.p_L for r in curves}
    ds = sorted({d for d, _ in table})
    if len(ds) < 2:
        raise ValueError("need at least two code distances")
    crossings: dict = {}
    notes: dict = {}
    for da, db in zip(ds, ds[1:]):
        ps = sorted({p for d, p in table if d == da} & {p for d, p in table if d == db})
        if len(ps) < 3:
            raise ValueError(f"need at least three shared p_Z points for d={da},{db}")
        la = [math.log(table[(da, p)]) if table[(da, p)] > 0 else -math.inf for p in ps]
        lb = [math.log(table[(db, p)]) if table[(db, p)] > 0 else -math.inf for p in ps]
        c, note = _pair_crossing(ps, la, lb)
        crossings[(da, db)] = c
        notes[(da, db)] = note
    top = crossings[(ds[-2], ds[-1])]
    if top is None:
        raise NoCrossing(f"d={ds[-2]},{ds[-1]}: {notes[(ds[-2], ds[-1])]}")
    found = [c for c in crossings.values() if c is not None]
    return ThresholdEstimate(p_th=top, uncertainty=max(found) - min(found),
                             pair_crossings=crossings, diagnostics=notes)


def extrapolate_distance(a: float, b: float, d_b: int, p_target: float) -> int:
    """Distance reaching ``p_target`` assuming p_L falls by ``a/b`` per step of 2 in d.

    Args:
        a: p_L at ``d_b - 2``.
        b: p_L at ``d_b``.
        d_b: the larger simulated distance.
        p_target: desired logical error rate.

    Returns:
        The smallest odd distance at least as large as the continuous solution.
    """
    if not (0.0 < b < 1.0 and 0.0 < a < 1.0):
        raise ValueError("a and b must lie in (0, 1)")
    if a <= b:
        raise ValueError("extrapolation invalid: p_L does not decrease with d")
    if p_target <= 0.0:
        raise ValueError("p_target must be positive")
    d = d_b + 2.0 * math.log(b / p_target) / math.log(a / b)
    up = math.ceil(d - 1e-9)
    return up if up % 2 else up + 1


def threshold_report(est: ThresholdEstimate, m: int = 2, n_rep: int = 3) -> dict:
    """Threshold with its unencoded and repetition-encoded loss equivalents."""
    return {
        "p_Z_th": est.p_th,
        "uncertainty": est.uncertainty,
        "eta_th": threshold_to_loss(est.p_th, m, 1),
        "eta_th_enc": threshold_to_loss(est.p_th, m, n_rep),
        "N_rep": n_rep,
        "pairs": {f"{a},{b}": c for (a, b), c in est.pair_crossings.items()},
    }


def job_dict(job: SimJob) -> dict:
    out = asdict(job)
    out["variant"] = job.variant.value
    out["mtqc2_model"] = job.mtqc2_model.value
    return out
