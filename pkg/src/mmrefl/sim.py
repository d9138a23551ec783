"""Exact-geometry Monte Carlo engine.

Samples deployments, resolves visibility and first-order specular
reflections with real segment geometry, draws Rayleigh fading, and
estimates coverage, mean path lengths, and association probabilities.

Every object blocks line of sight (zero transmission); the serving
reflector is transparent only at its own specular point. Trials are
independent work units with RNG streams keyed by (seed, trial index) and
a fixed chunk partition, so results are bitwise identical for any worker
count.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from multiprocessing import get_context
from typing import Optional

import numpy as np

from . import analytic
from .geom import (Point, Segment, segments_cross_origin_batch,
                   segments_intersect_batch, specular_batch)
from .quadrature import QuadratureSpec
from .sampling import (BLOCKER, REFLECTOR, NetworkParams, ObjectSegment,
                       derive_beta, sample_ppp, trial_rng, window_for_min_bs)

NEAREST_REFLECTOR_ONLY = "nearest"
ALL_REFLECTORS = "all"

DIRECT = "direct"
REFLECTED = "reflected"
NONE = "none"

_CHUNK = 512  # fixed trial partition; independent of worker count

# window floor: halfwidth at least this many analytic mean direct distances
_WINDOW_MEAN_RD_FACTOR = 4.0


@dataclass(frozen=True)
class Deployment:
    bs: np.ndarray                      # (N, 2) BS positions
    objects: list[ObjectSegment]
    window_halfwidth: float
    ue: Point = Point(0.0, 0.0)


@dataclass(frozen=True)
class TrialResult:
    r_d: float                          # inf when no visible BS
    r_r: float                          # inf when no reflected path
    association: str                    # direct / reflected / none
    serving_bs: Optional[int] = None
    serving_reflector: Optional[int] = None
    sinr: Optional[float] = None


@dataclass(frozen=True)
class Estimate:
    mean: float
    ci_halfwidth: float
    n_trials: int


def wilson_interval(k: int, n: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if n == 0:
        return 0.0, 1.0
    p = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def effective_window(params: NetworkParams, min_mean_bs: float = 100.0,
                     spec: Optional[QuadratureSpec] = None) -> float:
    """Window halfwidth: BS-count floor, mean-direct-distance floor, explicit max."""
    h = window_for_min_bs(params, min_mean_bs)
    mean_rd = analytic.mean_direct_distance(params, spec or QuadratureSpec())
    return max(h, _WINDOW_MEAN_RD_FACTOR * mean_rd)


# ---------------------------------------------------------------------------
# Deployment sampling
# ---------------------------------------------------------------------------

def _sample_arrays(params: NetworkParams, h: float, rng: np.random.Generator):
    """One deployment as raw arrays. Draw order is a determinism contract:
    BS process first, then object centers, lengths, orientations, thinning."""
    bs = sample_ppp(params.lambda_bs, h, rng)
    centers = sample_ppp(params.lambda_obj, h, rng)
    m = centers.shape[0]
    lengths = rng.uniform(params.L1, params.L2, size=m)
    orientations = rng.uniform(0.0, 2.0 * math.pi, size=m)
    is_reflector = rng.random(m) < params.delta
    half = 0.5 * lengths
    hv = np.column_stack((half * np.cos(orientations), half * np.sin(orientations)))
    seg_a = centers - hv
    seg_b = centers + hv
    return bs, centers, lengths, orientations, is_reflector, seg_a, seg_b


def sample_deployment(params: NetworkParams, rng: np.random.Generator,
                      window_halfwidth: Optional[float] = None) -> Deployment:
    h = window_halfwidth if window_halfwidth is not None else effective_window(params)
    bs, centers, lengths, orientations, is_reflector, _, _ = \
        _sample_arrays(params, h, rng)
    objects = [
        ObjectSegment(Point(float(c[0]), float(c[1])), float(l), float(o),
                      REFLECTOR if refl else BLOCKER)
        for c, l, o, refl in zip(centers, lengths, orientations, is_reflector)
    ]
    return Deployment(bs=bs, objects=objects, window_halfwidth=h)


def _deployment_arrays(deployment: Deployment):
    objs = deployment.objects
    m = len(objs)
    centers = np.empty((m, 2))
    seg_a = np.empty((m, 2))
    seg_b = np.empty((m, 2))
    is_reflector = np.zeros(m, dtype=bool)
    for i, o in enumerate(objs):
        a, b = o.endpoints()
        centers[i] = (o.center.x, o.center.y)
        seg_a[i] = (a.x, a.y)
        seg_b[i] = (b.x, b.y)
        is_reflector[i] = o.kind == REFLECTOR
    return centers, seg_a, seg_b, is_reflector


# ---------------------------------------------------------------------------
# Visibility and reflections
# ---------------------------------------------------------------------------

def _visible_from_origin(points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray,
                         exclude: Optional[int] = None) -> np.ndarray:
    """Which points see the origin past every object segment."""
    if points.shape[0] == 0 or seg_a.shape[0] == 0:
        return np.ones(points.shape[0], dtype=bool)
    hits = segments_cross_origin_batch(points, seg_a, seg_b)
    if exclude is not None:
        hits[:, exclude] = False
    return ~hits.any(axis=1)


def is_visible(p: Point, deployment: Deployment) -> bool:
    """True iff the UE-to-p segment crosses no object."""
    pts = np.array([[p.x, p.y]])
    _, seg_a, seg_b, _ = _deployment_arrays(deployment)
    return bool(_visible_from_origin(pts, seg_a, seg_b)[0])


def nearest_visible_bs(deployment: Deployment):
    """(index, distance) of the closest visible BS, or None."""
    _, seg_a, seg_b, _ = _deployment_arrays(deployment)
    idx, r_d = _nearest_visible_arrays(deployment.bs, seg_a, seg_b)
    return None if idx < 0 else (idx, r_d)


def _nearest_visible_arrays(bs: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray):
    if bs.shape[0] == 0:
        return -1, math.inf
    vis = _visible_from_origin(bs, seg_a, seg_b)
    if not vis.any():
        return -1, math.inf
    r = np.hypot(bs[:, 0], bs[:, 1])
    r_masked = np.where(vis, r, np.inf)
    idx = int(np.argmin(r_masked))
    return idx, float(r_masked[idx])


def _center_visible_reflectors(centers, seg_a, seg_b, is_reflector):
    """Reflector indices whose centers are visible (own segment excluded)."""
    ridx = np.flatnonzero(is_reflector)
    if ridx.size == 0:
        return ridx
    hits = segments_cross_origin_batch(centers[ridx], seg_a, seg_b)
    hits[np.arange(ridx.size), ridx] = False
    return ridx[~hits.any(axis=1)]


def _paths_via_reflector(bs, seg_a, seg_b, j):
    """Admissible specular paths off object j: (bs indices, q points, lengths).

    Both legs must clear every OTHER object; the reflecting segment itself
    meets the legs only at the specular point by construction.
    """
    n = bs.shape[0]
    if n == 0:
        return (np.empty(0, dtype=int), np.empty((0, 2)), np.empty(0))
    valid, q, length = specular_batch(bs, seg_a[j], seg_b[j])
    cand = np.flatnonzero(valid)
    if cand.size == 0:
        return (cand, np.empty((0, 2)), np.empty(0))
    others = np.ones(seg_a.shape[0], dtype=bool)
    others[j] = False
    oa, ob = seg_a[others], seg_b[others]
    if oa.shape[0]:
        qc = q[cand]
        leg1 = segments_intersect_batch(bs[cand], qc, oa, ob).any(axis=1)
        leg2 = segments_intersect_batch(np.zeros_like(qc), qc, oa, ob).any(axis=1)
        clear = ~(leg1 | leg2)
        cand = cand[clear]
    return cand, q[cand], length[cand]


def _reflections_arrays(bs, centers, seg_a, seg_b, is_reflector, mode):
    """All admissible (bs index, reflector index, path length) triples."""
    out_bs, out_refl, out_len = [], [], []
    if mode == NEAREST_REFLECTOR_ONLY:
        vis_r = _center_visible_reflectors(centers, seg_a, seg_b, is_reflector)
        if vis_r.size == 0:
            return (np.empty(0, dtype=int), np.empty(0, dtype=int), np.empty(0))
        dist = np.hypot(centers[vis_r, 0], centers[vis_r, 1])
        targets = [int(vis_r[np.argmin(dist)])]
    elif mode == ALL_REFLECTORS:
        targets = list(np.flatnonzero(is_reflector))
    else:
        raise ValueError(f"unknown reflection mode: {mode!r}")
    for j in targets:
        cand, _, length = _paths_via_reflector(bs, seg_a, seg_b, j)
        if cand.size:
            out_bs.append(cand)
            out_refl.append(np.full(cand.size, j))
            out_len.append(length)
    if not out_bs:
        return (np.empty(0, dtype=int), np.empty(0, dtype=int), np.empty(0))
    return (np.concatenate(out_bs), np.concatenate(out_refl),
            np.concatenate(out_len))


def enumerate_reflections(deployment: Deployment,
                          mode: str = NEAREST_REFLECTOR_ONLY):
    """List of (bs index, reflector index, path length) admissible paths."""
    centers, seg_a, seg_b, is_reflector = _deployment_arrays(deployment)
    b, r, ln = _reflections_arrays(deployment.bs, centers, seg_a, seg_b,
                                   is_reflector, mode)
    return [(int(bi), int(ri), float(li)) for bi, ri, li in zip(b, r, ln)]


# ---------------------------------------------------------------------------
# Trials
# ---------------------------------------------------------------------------

def run_trial(params: NetworkParams, rng: np.random.Generator,
              mode: str = NEAREST_REFLECTOR_ONLY,
              thresholds: Optional[np.ndarray] = None,
              window_halfwidth: Optional[float] = None,
              sum_all_reflected_interferers: bool = False):
    """One deployment -> TrialResult (+ covered flags when thresholds given).

    thresholds are linear SINR values. Interference follows the serving
    path: for a direct link, every other visible BS plus the reflected
    path as one interferer; for a reflected link, every visible BS.
    """
    h = window_halfwidth if window_halfwidth is not None else effective_window(params)
    bs, centers, _, _, is_reflector, seg_a, seg_b = _sample_arrays(params, h, rng)

    idx_d, r_d = _nearest_visible_arrays(bs, seg_a, seg_b)
    rb, rr_, rlen = _reflections_arrays(bs, centers, seg_a, seg_b,
                                        is_reflector, mode)
    if rlen.size:
        jbest = int(np.argmin(rlen))
        r_r = float(rlen[jbest])
        refl_bs, refl_obj = int(rb[jbest]), int(rr_[jbest])
    else:
        r_r, refl_bs, refl_obj = math.inf, None, None

    if r_d == math.inf and r_r == math.inf:
        result = TrialResult(math.inf, math.inf, NONE)
        if thresholds is None:
            return result, None
        return result, np.zeros(len(thresholds), dtype=bool)

    serving_direct = r_d < r_r
    if serving_direct:
        association, sbs, srefl = DIRECT, idx_d, None
    else:
        association, sbs, srefl = REFLECTED, refl_bs, refl_obj

    if thresholds is None:
        return TrialResult(r_d, r_r, association, sbs, srefl), None

    alpha = params.alpha
    n0 = params.noise_over_ptx
    h_bs = rng.exponential(size=bs.shape[0])
    h_f = rng.exponential()

    vis = _visible_from_origin(bs, seg_a, seg_b)
    r_all = np.hypot(bs[:, 0], bs[:, 1])
    if serving_direct:
        signal = h_bs[idx_d] * r_d ** -alpha
        mask = vis.copy()
        mask[idx_d] = False
        interference = float(np.sum(h_bs[mask] * r_all[mask] ** -alpha))
        if math.isfinite(r_r):
            interference += h_f * r_r ** -alpha
        if sum_all_reflected_interferers and rlen.size > 1:
            # beyond-model extra: every other enumerated reflected path interferes
            extra = np.delete(rlen, jbest)
            interference += float(np.sum(rng.exponential(size=extra.size)
                                         * extra ** -alpha))
    else:
        signal = h_f * r_r ** -alpha
        interference = float(np.sum(h_bs[vis] * r_all[vis] ** -alpha))

    sinr = signal / (n0 + interference) if (n0 + interference) > 0 else math.inf
    result = TrialResult(r_d, r_r, association, sbs, srefl, sinr)
    return result, sinr > thresholds

# ---------------------------------------------------------------------------
# Parallel estimation harness
# ---------------------------------------------------------------------------

class _Tally:
    """Order-independent accumulator for trial statistics."""

    __slots__ = ("n", "covered", "n_direct", "n_reflected", "n_none",
                 "sum_rd", "sum_rd2", "n_rd", "sum_rr", "sum_rr2", "n_rr",
                 "rd_samples", "rr_samples", "mode_disagree")

    def __init__(self, n_thresholds: int, keep_samples: bool):
        self.n = 0
        self.covered = np.zeros(n_thresholds, dtype=np.int64)
        self.n_direct = 0
        self.n_reflected = 0
        self.n_none = 0
        self.sum_rd = 0.0
        self.sum_rd2 = 0.0
        self.n_rd = 0
        self.sum_rr = 0.0
        self.sum_rr2 = 0.0
        self.n_rr = 0
        self.rd_samples = [] if keep_samples else None
        self.rr_samples = [] if keep_samples else None
        self.mode_disagree = 0

    def add(self, res: TrialResult, covered):
        self.n += 1
        if covered is not None:
            self.covered += covered
        if res.association == DIRECT:
            self.n_direct += 1
        elif res.association == REFLECTED:
            self.n_reflected += 1
        else:
            self.n_none += 1
        if math.isfinite(res.r_d):
            self.sum_rd += res.r_d
            self.sum_rd2 += res.r_d * res.r_d
            self.n_rd += 1
            if self.rd_samples is not None:
                self.rd_samples.append(res.r_d)
        if math.isfinite(res.r_r):
            self.sum_rr += res.r_r
            self.sum_rr2 += res.r_r * res.r_r
            self.n_rr += 1
            if self.rr_samples is not None:
                self.rr_samples.append(res.r_r)

    def merge(self, other: "_Tally"):
        self.n += other.n
        self.covered += other.covered
        self.n_direct += other.n_direct
        self.n_reflected += other.n_reflected
        self.n_none += other.n_none
        self.sum_rd += other.sum_rd
        self.sum_rd2 += other.sum_rd2
        self.n_rd += other.n_rd
        self.sum_rr += other.sum_rr
        self.sum_rr2 += other.sum_rr2
        self.n_rr += other.n_rr
        self.mode_disagree += other.mode_disagree
        if self.rd_samples is not None and other.rd_samples is not None:
            self.rd_samples.extend(other.rd_samples)
            self.rr_samples.extend(other.rr_samples)
        return self


def _run_chunk(job) -> _Tally:
    (params, seed, start, stop, thresholds, mode, h, keep_samples,
     track_disagreement) = job
    tally = _Tally(0 if thresholds is None else len(thresholds), keep_samples)
    for i in range(start, stop):
        rng = trial_rng(seed, i)
        res, covered = run_trial(params, rng, mode=mode, thresholds=thresholds,
                                 window_halfwidth=h)
        tally.add(res, covered)
        if track_disagreement:
            rng2 = trial_rng(seed, i)
            res2, _ = run_trial(params, rng2, mode=ALL_REFLECTORS,
                                window_halfwidth=h)
            if not math.isclose(res.r_r, res2.r_r, rel_tol=1e-12):
                tally.mode_disagree += 1
    return tally


def run_trials(params: NetworkParams, n_trials: int, seed: int,
               mode: str = NEAREST_REFLECTOR_ONLY,
               thresholds_db: Optional[list] = None,
               workers: Optional[int] = None,
               window_halfwidth: Optional[float] = None,
               keep_samples: bool = False,
               track_disagreement: bool = False) -> _Tally:
    """Run n_trials trials and reduce chunk tallies in fixed chunk order."""
    if n_trials < 1:
        raise ValueError("n_trials >= 1 required")
    thresholds = None if thresholds_db is None else \
        np.asarray([10.0 ** (t / 10.0) for t in thresholds_db])
    h = window_halfwidth if window_halfwidth is not None else effective_window(params)
    jobs = [(params, seed, lo, min(lo + _CHUNK, n_trials), thresholds, mode, h,
             keep_samples, track_disagreement)
            for lo in range(0, n_trials, _CHUNK)]
    workers = workers if workers is not None else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(jobs)))

    total = _Tally(0 if thresholds is None else len(thresholds), keep_samples)
    if workers == 1:
        for job in jobs:
            total.merge(_run_chunk(job))
    else:
        ctx = get_context("fork")
        with ctx.Pool(workers) as pool:
            for tally in pool.imap(_run_chunk, jobs):
                total.merge(tally)
    return total


def estimate_coverage(params: NetworkParams, thresholds_db: list, n_trials: int,
                      seed: int, mode: str = NEAREST_REFLECTOR_ONLY,
                      workers: Optional[int] = None,
                      window_halfwidth: Optional[float] = None):
    """Per-threshold covered proportion with Wilson 95% intervals.

    Returns a list of dicts: T_dB, coverage, ci_lo, ci_hi, n_trials.
    """
    if n_trials < 100:
        raise ValueError("n_trials >= 100 required")
    tally = run_trials(params, n_trials, seed, mode, thresholds_db, workers,
                       window_halfwidth)
    rows = []
    for t_db, k in zip(thresholds_db, tally.covered):
        lo, hi = wilson_interval(int(k), tally.n)
        rows.append({"T_dB": float(t_db), "coverage": k / tally.n,
                     "ci_lo": lo, "ci_hi": hi, "n_trials": tally.n})
    return rows


def _mean_estimate(s: float, s2: float, n: int, z: float = 1.959963984540054):
    if n == 0:
        return Estimate(math.nan, math.nan, 0)
    mean = s / n
    var = max(s2 / n - mean * mean, 0.0)
    half = z * math.sqrt(var / n) if n > 1 else math.inf
    return Estimate(mean, half, n)


def estimate_mean_distances(params: NetworkParams, n_trials: int, seed: int,
                            mode: str = NEAREST_REFLECTOR_ONLY,
                            workers: Optional[int] = None,
                            window_halfwidth: Optional[float] = None):
    """Conditional means of finite r_d / r_r plus no-path fractions.

    Returns (rd: Estimate, rr: Estimate, frac_no_direct, frac_no_reflect).
    """
    if n_trials < 1000:
        raise ValueError("n_trials >= 1000 required")
    t = run_trials(params, n_trials, seed, mode, None, workers, window_halfwidth)
    rd = _mean_estimate(t.sum_rd, t.sum_rd2, t.n_rd)
    rr = _mean_estimate(t.sum_rr, t.sum_rr2, t.n_rr)
    return rd, rr, 1.0 - t.n_rd / t.n, 1.0 - t.n_rr / t.n


def estimate_association(params: NetworkParams, n_trials: int, seed: int,
                         mode: str = NEAREST_REFLECTOR_ONLY,
                         workers: Optional[int] = None,
                         window_halfwidth: Optional[float] = None):
    """(p_d, p_r) empirical fractions with Wilson 95% halfwidths."""
    t = run_trials(params, n_trials, seed, mode, None, workers, window_halfwidth)
    out = []
    for k in (t.n_direct, t.n_reflected):
        lo, hi = wilson_interval(k, t.n)
        out.append(Estimate(k / t.n, 0.5 * (hi - lo), t.n))
    return out[0], out[1]


def collect_distance_samples(params: NetworkParams, n_trials: int, seed: int,
                             mode: str = NEAREST_REFLECTOR_ONLY,
                             workers: Optional[int] = None,
                             window_halfwidth: Optional[float] = None):
    """Raw finite r_d / r_r samples (for KS-style validation)."""
    t = run_trials(params, n_trials, seed, mode, None, workers,
                   window_halfwidth, keep_samples=True)
    return (np.sort(np.asarray(t.rd_samples)), np.sort(np.asarray(t.rr_samples)),
            t.n)


def visibility_samples(params: NetworkParams, n_deployments: int, seed: int,
                       window_halfwidth: Optional[float] = None):
    """(distance, visible) for one random BS per deployment.

    One link per deployment keeps the Bernoulli samples independent of the
    shared blockage field across links.
    """
    h = window_halfwidth if window_halfwidth is not None else effective_window(params)
    rs, vises = [], []
    for i in range(n_deployments):
        rng = trial_rng(seed, i)
        bs, _, _, _, _, seg_a, seg_b = _sample_arrays(params, h, rng)
        if bs.shape[0] == 0:
            continue
        j = int(rng.integers(bs.shape[0]))
        p = bs[j:j + 1]
        vis = _visible_from_origin(p, seg_a, seg_b)[0]
        rs.append(float(np.hypot(p[0, 0], p[0, 1])))
        vises.append(bool(vis))
    return np.asarray(rs), np.asarray(vises, dtype=bool)


def mode_disagreement_rate(params: NetworkParams, n_trials: int, seed: int,
                           workers: Optional[int] = None,
                           window_halfwidth: Optional[float] = None) -> float:
    """Fraction of trials where nearest-only and all-reflector r_r differ.

    Reports how often the center-visibility proxy picks a different shortest
    reflected path than full enumeration.
    """
    t = run_trials(params, n_trials, seed, NEAREST_REFLECTOR_ONLY, None,
                   workers, window_halfwidth, track_disagreement=True)
    return t.mode_disagree / t.n
