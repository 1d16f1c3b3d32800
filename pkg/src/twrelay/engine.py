"""Deterministic, parallelizable Monte-Carlo estimation of outage and of
the coherent-combining statistic w.

Trials are partitioned into fixed-size blocks; block j draws its channels
from substream (master_seed, j), so trial i's randomness is a fixed
function of (master_seed, i) alone.  Per-point tallies are integers and
their reduction is commutative, which makes every estimate bit-identical
for any worker count or scheduling order.

The per-scheme SNR expressions here are the algebraic closed forms of the
general beamformed SNR (validated against it in the test suite); they
exist so a block of trials is a handful of numpy reductions instead of a
Python loop.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .beamform import SCHEMES
from .channel import sample_channel_block, substream
from .errors import TargetOutOfRangeError

#: Trials per substream block.  Part of the reproducibility contract: the
#: same master seed only reproduces the same draws under the same block size.
TRIAL_BLOCK = 1 << 16


@dataclass(frozen=True)
class SweepConfig:
    """One outage sweep: scheme, threshold, SNR grid, and randomness."""

    n: int
    scheme: str
    gamma_th: float
    rho_grid_db: tuple[float, ...]
    trials: int
    master_seed: int
    either_source: bool = False  # count outage when either source fails

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")
        if not self.gamma_th > 0:
            raise ValueError(f"gamma_th must be positive, got {self.gamma_th}")
        grid = tuple(float(v) for v in self.rho_grid_db)
        if not grid:
            raise ValueError("rho grid must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("rho grid must be strictly increasing")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        object.__setattr__(self, "rho_grid_db", grid)


@dataclass(frozen=True)
class OutagePoint:
    rho_db: float
    outage: float
    stderr: float
    trials: int


@dataclass(frozen=True)
class OutageCurve:
    points: tuple[OutagePoint, ...]


@dataclass(frozen=True)
class CdfEstimate:
    """Empirical CDF of w on a fixed threshold grid."""

    thresholds: tuple[float, ...]
    cdf: tuple[float, ...]
    trials: int


@dataclass(frozen=True)
class WMomentReport:
    """Empirical mean of w against the two candidate asymptotic constants."""

    n: int
    trials: int
    mean: float
    stderr: float
    claimed_constant: float     # 1 + (n-1) pi^2 / 2, as published
    derived_constant: float     # 1 + (n-1) pi^2 / 16, from the unit-power moments
    closer: str                 # "claimed" or "derived"


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def _block_bounds(trials: int):
    """(block_index, count) covering `trials` in TRIAL_BLOCK-sized pieces."""
    n_blocks = (trials + TRIAL_BLOCK - 1) // TRIAL_BLOCK
    for j in range(n_blocks):
        yield j, min(TRIAL_BLOCK, trials - j * TRIAL_BLOCK)


def _run_blocks(worker, trials: int, threads: int) -> list:
    """Run `worker(block_index, count)` over all blocks, in any order, and
    return results sorted by block index."""
    jobs = list(_block_bounds(trials))
    if threads == 0:
        threads = min(32, os.cpu_count() or 1)
    if threads <= 1 or len(jobs) <= 1:
        return [worker(j, c) for j, c in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda jc: worker(*jc), jobs))


def _scheme_snr1(scheme: str, habs: np.ndarray, gabs: np.ndarray,
                 hg_mixed: np.ndarray, rho: float, either: bool):
    """Per-trial SNR at source 1 (and source 2 when `either`) for one block.

    habs/gabs are (count, n) moduli; hg_mixed is the complex row sum of
    h_m * g_m needed by the direct scheme.
    """
    n = habs.shape[1]
    x1 = np.sum(habs * habs, axis=1)
    x2 = np.sum(gabs * gabs, axis=1)
    if scheme == "proposed":
        sig = np.sum(habs * gabs, axis=1) ** 2
        den1 = 2.0 * x1 + x2 + n / rho
        den2 = 2.0 * x2 + x1 + n / rho
    elif scheme == "direct":
        sig = np.abs(hg_mixed) ** 2
        den1 = 2.0 * x1 + x2 + n / rho
        den2 = 2.0 * x2 + x1 + n / rho
    elif scheme == "selection":
        num = (habs * gabs) ** 2          # per-antenna signal power
        u2 = habs * habs
        v2 = gabs * gabs
        d1 = 2.0 * u2 + v2 + 1.0 / rho
        d2 = 2.0 * v2 + u2 + 1.0 / rho
        # max-min rule; argmax returns the smallest index on ties
        k = np.argmax(num / np.maximum(d1, d2), axis=1)
        rows = np.arange(habs.shape[0])
        sig = num[rows, k]
        den1 = d1[rows, k]
        den2 = d2[rows, k]
    else:  # pragma: no cover - guarded by SweepConfig
        raise ValueError(f"unknown scheme {scheme!r}")
    snr1 = sig * rho / den1
    if not either:
        return snr1, None
    return snr1, sig * rho / den2


def estimate_outage(cfg: SweepConfig, threads: int = 1) -> OutageCurve:
    """Empirical outage (at source 1) per grid point, with binomial stderr.

    The same trials (hence the same channel draws) are reused across the
    SNR grid, which keeps curves smooth and comparisons paired.
    """
    rhos = [db_to_linear(db) for db in cfg.rho_grid_db]

    def worker(block: int, count: int) -> np.ndarray:
        h, g = sample_channel_block(cfg.n, substream(cfg.master_seed, block), count)
        habs = np.abs(h)
        gabs = np.abs(g)
        hg_mixed = np.sum(h * g, axis=1) if cfg.scheme == "direct" else None
        counts = np.zeros(len(rhos), dtype=np.int64)
        for i, rho in enumerate(rhos):
            snr1, snr2 = _scheme_snr1(cfg.scheme, habs, gabs, hg_mixed, rho,
                                      cfg.either_source)
            fail = snr1 < cfg.gamma_th
            if snr2 is not None:
                fail |= snr2 < cfg.gamma_th
            counts[i] = np.count_nonzero(fail)
        return counts

    totals = sum(_run_blocks(worker, cfg.trials, threads))
    points = []
    for db, hits in zip(cfg.rho_grid_db, totals):
        p_hat = hits / cfg.trials
        stderr = math.sqrt(p_hat * (1.0 - p_hat) / cfg.trials)
        points.append(OutagePoint(db, p_hat, stderr, cfg.trials))
    return OutageCurve(tuple(points))


def _w_block(n: int, seed: int, block: int, count: int) -> np.ndarray:
    h, g = sample_channel_block(n, substream(seed, block), count)
    habs = np.abs(h)
    gabs = np.abs(g)
    s = np.sum(habs * gabs, axis=1)
    x1 = np.sum(habs * habs, axis=1)
    x2 = np.sum(gabs * gabs, axis=1)
    return s * s / (x1 * x2 / n)


def estimate_w_cdf(n: int, thresholds, trials: int, seed: int,
                   threads: int = 1) -> CdfEstimate:
    """Empirical CDF Pr{w <= t} of the combining statistic."""
    thr = np.asarray(sorted(float(t) for t in thresholds))
    if thr.size == 0:
        raise ValueError("thresholds must be nonempty")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    def worker(block: int, count: int) -> np.ndarray:
        w = np.sort(_w_block(n, seed, block, count))
        return np.searchsorted(w, thr, side="right").astype(np.int64)

    counts = sum(_run_blocks(worker, trials, threads))
    return CdfEstimate(tuple(thr.tolist()),
                       tuple((counts / trials).tolist()), trials)


def w_moment_check(n: int, trials: int, seed: int, threads: int = 1) -> WMomentReport:
    """Empirical E[w] versus the published large-n constant and the
    constant rederived from the unit-power Rayleigh moments."""
    if trials < 10_000:
        raise ValueError(f"moment check needs trials >= 10000, got {trials}")

    def worker(block: int, count: int):
        w = _w_block(n, seed, block, count)
        return float(np.sum(w)), float(np.sum(w * w))

    parts = _run_blocks(worker, trials, threads)
    sum_w = math.fsum(p[0] for p in parts)
    sum_w2 = math.fsum(p[1] for p in parts)
    mean = sum_w / trials
    var = max(sum_w2 / trials - mean * mean, 0.0)
    stderr = math.sqrt(var / trials)
    claimed = 1.0 + 0.5 * (n - 1) * math.pi**2
    derived = 1.0 + (n - 1) * math.pi**2 / 16.0
    closer = "claimed" if abs(mean - claimed) < abs(mean - derived) else "derived"
    return WMomentReport(n, trials, mean, stderr, claimed, derived, closer)


def required_snr_at(curve: OutageCurve, target_outage: float) -> float:
    """SNR (dB) at which the curve crosses `target_outage`, by log-linear
    interpolation between grid points.  Exact grid hits short-circuit."""
    if not 0 < target_outage:
        raise TargetOutOfRangeError(f"target outage must be positive, got {target_outage}")
    pts = curve.points
    for pt in pts:
        if pt.outage == target_outage:
            return pt.rho_db
    for left, right in zip(pts, pts[1:]):
        if left.outage > target_outage > right.outage and right.outage > 0:
            span = math.log10(left.outage) - math.log10(right.outage)
            frac = (math.log10(left.outage) - math.log10(target_outage)) / span
            return left.rho_db + frac * (right.rho_db - left.rho_db)
    raise TargetOutOfRangeError(
        f"target outage {target_outage} is not crossed by the curve "
        f"(range {min(p.outage for p in pts)} .. {max(p.outage for p in pts)})")
