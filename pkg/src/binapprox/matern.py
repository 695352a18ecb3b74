"""Hard-core thinning of a Poisson process on the unit d-torus.

A Poisson pattern with intensity lam is thinned by deleting every point
that has another point inside its closed cube of side r (torus metric);
the observable is the number of retained points.  Exact mean and variance
come from closed forms and tensor quadrature; the simulator is the
Monte Carlo cross-check and the source of empirical distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_EXACT_DIM = 3
QUAD_NODES = 64


@dataclass(frozen=True)
class MaternConfig:
    d: int
    lam: float
    r: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"need d >= 1, got {self.d}")
        if self.lam <= 0:
            raise ValueError(f"need lam > 0, got {self.lam}")
        if not 0.0 < self.r <= 1.0 / 7.0:
            raise ValueError(f"need 0 < r <= 1/7, got {self.r}")

    @property
    def a(self) -> float:
        return self.lam * self.r ** self.d

    @classmethod
    def from_intensity_product(cls, d: int, lam: float, a: float) -> "MaternConfig":
        return cls(d=d, lam=lam, r=(a / lam) ** (1.0 / d))


@dataclass(frozen=True)
class PointPattern:
    points: np.ndarray      # shape (k, d), coordinates in [0,1)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.points.shape[-1] if np.ndim(self.points) == 2 else 1)
        object.__setattr__(self, "points", pts)
        if pts.size and (pts.min() < 0.0 or pts.max() >= 1.0):
            raise ValueError("coordinates must lie in [0,1)")

    def __len__(self) -> int:
        return self.points.shape[0]


def _torus_delta(x: np.ndarray) -> np.ndarray:
    """Coordinate-wise torus distance from signed differences."""
    y = np.abs(x)
    return np.minimum(y, 1.0 - y)


def thin_pattern(points: np.ndarray, r: float) -> np.ndarray:
    """Keep the points with no other point in their closed side-r cube."""
    pts = np.asarray(points, dtype=float)
    k = pts.shape[0]
    if k <= 1:
        return pts.copy()
    delta = _torus_delta(pts[:, None, :] - pts[None, :, :])
    near = np.all(delta <= r / 2.0, axis=-1)
    np.fill_diagonal(near, False)
    keep = ~near.any(axis=1)
    return pts[keep]


def simulate_pattern(cfg: MaternConfig, seed) -> PointPattern:
    """One realization of the thinned process."""
    rng = np.random.default_rng(seed)
    tau = rng.poisson(cfg.lam)
    pts = rng.random((tau, cfg.d))
    return PointPattern(thin_pattern(pts, cfg.r))


def _counts_chunk_1d(cfg: MaternConfig, reps: int, seed_seq) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    taus = rng.poisson(cfg.lam, reps)
    total = int(taus.sum())
    if total == 0:
        return np.zeros(reps, dtype=np.int64)
    xs = rng.random(total, dtype=np.float32)
    # Sort a single rep-index + coordinate key instead of lexsorting the
    # pair: only the sorted values are needed, which is ~20x faster.  The
    # float64 key is exact enough (rep index <= 2e7 leaves 27 mantissa bits
    # for the coordinate, far below the float32 grid spacing).
    key = np.sort(np.repeat(np.arange(reps, dtype=np.int64), taus) + xs.astype(np.float64))
    rid = np.floor(key).astype(np.int64)
    xs = (key - rid).astype(np.float32)
    # Segment bookkeeping: first and last flat index of each rep's points.
    ends = np.cumsum(taus)
    starts = ends - taus
    idx = np.arange(total)
    seg_start = starts[rid]
    seg_end = ends[rid]
    left = np.where(idx > seg_start, idx - 1, seg_end - 1)
    right = np.where(idx < seg_end - 1, idx + 1, seg_start)
    gap_left = xs - xs[left]
    gap_left[idx == seg_start] += 1.0
    gap_right = xs[right] - xs
    gap_right[idx == seg_end - 1] += 1.0
    half = np.float32(cfg.r / 2.0)
    singleton = taus[rid] == 1
    keep = singleton | ((gap_left > half) & (gap_right > half))
    return np.bincount(rid[keep], minlength=reps).astype(np.int64)


CHUNK_POINTS = 2 * 10 ** 7


def simulate_counts(cfg: MaternConfig, reps: int, seed: int) -> np.ndarray:
    """reps independent retained-point counts, deterministic in seed."""
    if reps < 1:
        raise ValueError("need reps >= 1")
    root = np.random.SeedSequence(entropy=seed)
    if cfg.d == 1:
        chunk_reps = max(1, int(CHUNK_POINTS / max(cfg.lam, 1.0)))
        out = []
        done = 0
        children = root.spawn(-(-reps // chunk_reps))
        for child in children:
            m = min(chunk_reps, reps - done)
            out.append(_counts_chunk_1d(cfg, m, child))
            done += m
        return np.concatenate(out)
    counts = np.empty(reps, dtype=np.int64)
    for i, child in enumerate(root.spawn(reps)):
        rng = np.random.default_rng(child)
        tau = rng.poisson(cfg.lam)
        pts = rng.random((tau, cfg.d))
        counts[i] = thin_pattern(pts, cfg.r).shape[0]
    return counts


def mean_total(cfg: MaternConfig) -> float:
    """Expected number of retained points: lam * exp(-a)."""
    return cfg.lam * math.exp(-cfg.a)


def _second_moment_integral(cfg: MaternConfig) -> float:
    """Integral of the pair-density over the interaction shell.

    The shell is the side-2r cube minus the side-r cube around the origin;
    inside it the pair density is lam^2 exp(-lam * union volume of the two
    side-r cubes), with per-coordinate overlap (r - |x_i|)+.
    """
    r, lam, d = cfg.r, cfg.lam, cfg.d
    if d > MAX_EXACT_DIM:
        raise ValueError(f"exact integral only for d <= {MAX_EXACT_DIM}")
    # Integrate over the positive orthant of each cube and scale by 2^d;
    # the integrand is smooth there (no |x| kink).
    def cube_integral(half_side: float) -> float:
        nodes, weights = np.polynomial.legendre.leggauss(QUAD_NODES)
        x = 0.5 * half_side * (nodes + 1.0)
        w = 0.5 * half_side * weights
        grids = np.meshgrid(*([x] * d), indexing="ij")
        overlap = np.ones_like(grids[0])
        for g in grids:
            overlap *= np.clip(r - g, 0.0, None)
        f = np.exp(-lam * (2.0 * r ** d - overlap))
        wgrid = np.ones_like(f)
        for axis, _ in enumerate(grids):
            shape = [1] * d
            shape[axis] = QUAD_NODES
            wgrid = wgrid * w.reshape(shape)
        return float((f * wgrid).sum()) * 2 ** d

    return cube_integral(r) - cube_integral(r / 2.0)


def variance_total(cfg: MaternConfig, mc_error: bool = False) -> tuple[float, float]:
    """(exact variance, closed-form lower bound) of the retained count.

    Exact value via the pair-correlation integral; the lower bound is
    lam*exp(-a)*(1 - a*exp(-a)).
    """
    lam, r, d, a = cfg.lam, cfg.r, cfg.d, cfg.a
    mu = mean_total(cfg)
    shell = _second_moment_integral(cfg)
    m_total = lam ** 2 * (shell + (1.0 - (2.0 * r) ** d) * math.exp(-2.0 * a))
    exact = mu + m_total - mu ** 2
    lower = mu * (1.0 - a * math.exp(-a))
    return exact, lower


def error_bound(cfg: MaternConfig, l: int) -> float:
    """Assembled centered-binomial approximation bound, of order lam^{-l/2}
    at fixed intensity product a."""
    if l not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {l}")
    d, a = cfg.d, cfg.a
    m = int(1.0 / (6.0 * cfg.r))
    md = m ** d
    if (l == 1 and md <= 2) or (l == 2 and md <= 3):
        raise ValueError(f"too few blocks (m^d={md}) for order {l}")
    p0 = math.exp(-a)
    p1 = a * math.exp(-(3 ** d) * a)
    pmin = min(0.5, p0, p1)
    if l == 1:
        c = 2.0 / math.sqrt(pmin * (md - 2))
    else:
        c = 8.0 / (pmin * (md - 3))
    sigma2, _ = variance_total(cfg)
    if sigma2 <= 1.0:
        raise ValueError(f"variance {sigma2} must exceed 1")
    theta_integral = mean_total(cfg) * 26.0 * 7 ** d * c
    return (theta_integral + 1.75) / sigma2


def empirical_distance(cfg: MaternConfig, reps: int, seed: int):
    """Monte Carlo distance of the centered retained count to its matched
    centered binomial, with bootstrap error bars and the assembled bounds."""
    from .engine import run_experiment

    mu = mean_total(cfg)
    sigma2, _ = variance_total(cfg)
    anchor = (-mu) % 1.0

    def sampler(_cfg, m, s):
        return simulate_counts(cfg, m, s) - mu

    bounds = {}
    for l in (1, 2):
        try:
            bounds[l] = error_bound(cfg, l)
        except ValueError:
            bounds[l] = math.nan
    echo = {"app": "matern", "d": cfg.d, "lam": cfg.lam, "r": cfg.r,
            "a": cfg.a}
    return run_experiment(sampler, echo, reps, seed, sigma2, anchor,
                          bound_l1=bounds[1], bound_l2=bounds[2])
