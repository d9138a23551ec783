"""Model parameters and sampling of the marked Poisson processes.

Base stations and object centers are homogeneous PPPs on a square window
centered on the user; objects are segments with uniform length and
orientation, independently thinned into reflectors (probability delta)
and blockers. Every trial owns a counter-based RNG stream keyed by
(seed, trial index) so results do not depend on how trials are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geom import Point

BLOCKER = "blocker"
REFLECTOR = "reflector"


@dataclass(frozen=True)
class NetworkParams:
    lambda_bs: float           # BS density per m^2
    lambda_obj: float          # object (blockage+reflector) density per m^2
    delta: float               # reflector fraction of objects
    L1: float                  # object length lower bound, m
    L2: float                  # object length upper bound, m
    alpha: float = 4.0         # path-loss exponent
    sigma2: float = 0.0        # noise power over transmit power (linear)
    p_tx: float = 1.0          # transmit power (linear)
    window_halfwidth: Optional[float] = None  # explicit window override, m

    def __post_init__(self):
        if not self.lambda_bs > 0.0:
            raise ValueError("lambda_bs > 0 required")
        if self.lambda_obj < 0.0:
            raise ValueError("lambda_obj >= 0 required")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("0 <= delta <= 1 required")
        if not 0.0 < self.L1 <= self.L2:
            raise ValueError("0 < L1 <= L2 required")
        if not self.alpha > 2.0:
            raise ValueError("alpha > 2 required")
        if self.sigma2 < 0.0:
            raise ValueError("sigma2 >= 0 required")
        if not self.p_tx > 0.0:
            raise ValueError("p_tx > 0 required")
        if self.window_halfwidth is not None and not self.window_halfwidth > 0.0:
            raise ValueError("window_halfwidth > 0 required")

    @property
    def lambda_reflector(self) -> float:
        return self.delta * self.lambda_obj

    @property
    def lambda_blocker(self) -> float:
        return (1.0 - self.delta) * self.lambda_obj

    @property
    def mean_object_length(self) -> float:
        return 0.5 * (self.L1 + self.L2)

    @property
    def noise_over_ptx(self) -> float:
        return self.sigma2 / self.p_tx


@dataclass(frozen=True)
class ObjectSegment:
    center: Point
    length: float
    orientation: float  # radians in [0, 2pi)
    kind: str           # BLOCKER or REFLECTOR

    def endpoints(self) -> tuple[Point, Point]:
        hx = 0.5 * self.length * math.cos(self.orientation)
        hy = 0.5 * self.length * math.sin(self.orientation)
        return (Point(self.center.x - hx, self.center.y - hy),
                Point(self.center.x + hx, self.center.y + hy))


def derive_beta(params: NetworkParams) -> float:
    """Per-meter blocking rate: 2 * lambda_obj * E[l] / pi."""
    return 2.0 * params.lambda_obj * params.mean_object_length / math.pi


def window_for_min_bs(params: NetworkParams, min_mean_bs: float = 100.0) -> float:
    """Smallest halfwidth whose window holds min_mean_bs BSs on average.

    An explicit params.window_halfwidth wins when larger.
    """
    if min_mean_bs < 1:
        raise ValueError("min_mean_bs >= 1 required")
    h = 0.5 * math.sqrt(min_mean_bs / params.lambda_bs)
    if params.window_halfwidth is not None:
        h = max(h, params.window_halfwidth)
    return h


def sample_ppp(density: float, window_halfwidth: float,
               rng: np.random.Generator) -> np.ndarray:
    """Poisson point sample on the centered square, returned as an (N, 2) array."""
    if density < 0.0:
        raise ValueError("density >= 0 required")
    area = (2.0 * window_halfwidth) ** 2
    n = rng.poisson(density * area)
    return rng.uniform(-window_halfwidth, window_halfwidth, size=(n, 2))


def sample_object_arrays(params: NetworkParams, window_halfwidth: float,
                         rng: np.random.Generator):
    """Object marks as arrays: (centers (M,2), lengths, orientations, is_reflector).

    Draw order is part of the determinism contract: centers, lengths,
    orientations, then the reflector thinning.
    """
    centers = sample_ppp(params.lambda_obj, window_halfwidth, rng)
    m = centers.shape[0]
    lengths = rng.uniform(params.L1, params.L2, size=m)
    orientations = rng.uniform(0.0, 2.0 * math.pi, size=m)
    is_reflector = rng.random(m) < params.delta
    return centers, lengths, orientations, is_reflector


def sample_objects(params: NetworkParams, rng: np.random.Generator,
                   window_halfwidth: Optional[float] = None) -> list[ObjectSegment]:
    """Sample the marked object process as ObjectSegment records."""
    h = window_halfwidth if window_halfwidth is not None \
        else window_for_min_bs(params)
    centers, lengths, orientations, is_reflector = \
        sample_object_arrays(params, h, rng)
    return [
        ObjectSegment(Point(float(c[0]), float(c[1])), float(l), float(o),
                      REFLECTOR if refl else BLOCKER)
        for c, l, o, refl in zip(centers, lengths, orientations, is_reflector)
    ]


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based stream for one trial: Philox keyed by seed, jumped per trial."""
    return np.random.Generator(np.random.Philox(key=seed).jumped(trial_index))
