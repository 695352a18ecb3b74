"""Seeded experiment orchestration: empirical distances with error bars.

The engine turns a sampler into an empirical pmf, measures both distances
to the matched centered binomial, bootstraps confidence intervals, and
reports the analytic sampling-noise floor alongside every estimate (an
empirical distance to a fixed law is biased upward by roughly that floor,
so dominance checks must budget for it explicitly).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .lattice import LatticePMF, empirical_pmf, loc_distance, tv_distance
from .binomial import CenteringParams, centering_params, centered_binomial

BOOTSTRAP_RESAMPLES = 200
# Rate fits drop points whose distance is within this factor of the floor.
FLOOR_DROP_FACTOR = 3.0


def noise_floor(reference: LatticePMF, reps: int) -> tuple[float, float]:
    """Expected (tv, loc) inflation when estimating the reference pmf from
    reps samples: sum_k sqrt(p_k(1-p_k)/reps)/2 and the max analogue."""
    p = reference.probs
    sd = np.sqrt(p * (1.0 - p) / reps)
    return float(sd.sum() / 2.0), float(sd.max())


@dataclass(frozen=True)
class ExperimentResult:
    config_echo: dict
    reps: int
    seed: int
    empirical: LatticePMF
    sigma2_used: float
    params: CenteringParams
    tv: float
    tv_ci: tuple[float, float]
    loc: float
    loc_ci: tuple[float, float]
    tv_floor: float
    loc_floor: float
    bound_l1: float = math.nan
    bound_l2: float = math.nan
    wall_time: float = 0.0

    def csv_row(self) -> dict:
        row = dict(self.config_echo)
        row.update(reps=self.reps, seed=self.seed, sigma2=self.sigma2_used,
                   bound_l1=self.bound_l1, bound_l2=self.bound_l2,
                   emp_tv=self.tv, emp_tv_lo=self.tv_ci[0], emp_tv_hi=self.tv_ci[1],
                   emp_loc=self.loc, emp_loc_lo=self.loc_ci[0],
                   emp_loc_hi=self.loc_ci[1],
                   tv_floor=self.tv_floor, loc_floor=self.loc_floor,
                   wall_time=self.wall_time)
        return row


def run_experiment(sampler, cfg, reps: int, seed: int,
                   sigma2: float, anchor: float,
                   bound_l1: float = math.nan,
                   bound_l2: float = math.nan) -> ExperimentResult:
    """Sample, compare to the matched centered binomial, bootstrap the CIs.

    sampler(cfg, reps, seed) must return reps values on the lattice
    Z + anchor and be deterministic in (cfg, reps, seed).
    """
    if sigma2 <= 1.0:
        raise ValueError(f"need sigma2 > 1, got {sigma2}")
    t0 = time.perf_counter()
    samples = np.asarray(sampler(cfg, reps, seed), dtype=float)
    emp = empirical_pmf(samples, anchor)
    cp = centering_params(sigma2, anchor)
    ref = centered_binomial(cp)
    tv = tv_distance(emp, ref)
    loc = loc_distance(emp, ref)
    tv_bs, loc_bs = _bootstrap(emp, ref, reps, seed)
    tvf, locf = noise_floor(ref, reps)
    echo = cfg if isinstance(cfg, dict) else {"config": repr(cfg)}
    return ExperimentResult(
        config_echo=echo, reps=reps, seed=seed, empirical=emp,
        sigma2_used=sigma2, params=cp, tv=tv,
        tv_ci=(min(tv, tv_bs[0]), max(tv, tv_bs[1])),
        loc=loc, loc_ci=(min(loc, loc_bs[0]), max(loc, loc_bs[1])),
        tv_floor=tvf, loc_floor=locf,
        bound_l1=bound_l1, bound_l2=bound_l2,
        wall_time=time.perf_counter() - t0)


def _bootstrap(emp: LatticePMF, ref: LatticePMF, reps: int, seed: int):
    rng = np.random.default_rng(np.random.SeedSequence(entropy=[seed, 0xB00]))
    tvs = np.empty(BOOTSTRAP_RESAMPLES)
    locs = np.empty(BOOTSTRAP_RESAMPLES)
    counts = rng.multinomial(reps, emp.probs, size=BOOTSTRAP_RESAMPLES)
    for b in range(BOOTSTRAP_RESAMPLES):
        nz = np.flatnonzero(counts[b])
        resampled = LatticePMF(emp.offset, emp.min_index + int(nz[0]),
                               counts[b][nz[0]:nz[-1] + 1] / reps)
        tvs[b] = tv_distance(resampled, ref)
        locs[b] = loc_distance(resampled, ref)
    lo, hi = 2.5, 97.5
    return ((float(np.percentile(tvs, lo)), float(np.percentile(tvs, hi))),
            (float(np.percentile(locs, lo)), float(np.percentile(locs, hi))))


@dataclass(frozen=True)
class RateFit:
    xs: list[float]
    ys: list[float]
    slope: float
    slope_ci: tuple[float, float]
    intercept: float
    dropped: list[float] = field(default_factory=list)


def fit_rate(points) -> RateFit:
    """Least-squares slope of log distance against log scale.

    The slope CI is the leave-one-out spread of the refitted slopes.
    """
    pts = sorted(points)
    if len(pts) < 3:
        raise ValueError("need at least 3 points for a rate fit")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    if any(x <= 0 for x in xs) or len(set(xs)) != len(xs):
        raise ValueError("scales must be positive and strictly increasing")
    if any(y <= 0 for y in ys):
        raise ValueError("distances must be positive for a log-log fit")
    lx = np.log(xs)
    ly = np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    loo = []
    for i in range(len(pts)):
        mask = np.arange(len(pts)) != i
        s, _ = np.polyfit(lx[mask], ly[mask], 1)
        loo.append(float(s))
    return RateFit(xs=xs, ys=ys, slope=float(slope),
                   slope_ci=(min(loo), max(loo)), intercept=float(intercept))


def filter_floor(points, floors, factor: float = FLOOR_DROP_FACTOR):
    """Drop (scale, distance) points whose distance is within factor of the
    corresponding noise floor."""
    kept, dropped = [], []
    for (x, y), f in zip(points, floors):
        (kept if y > factor * f else dropped).append((x, y))
    return kept, dropped
