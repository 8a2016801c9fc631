"""Discrete-event M/M/1 validation of the analytic download-time model.

Each base station is modelled as two independent M/M/1 queues: an edge queue
receiving the cache-hit share of requests and a backhaul queue receiving the
misses.  The simulator replays Lindley's recursion over exponential
interarrival and service draws, so its mean sojourn times can be compared
against the closed-form predictions.

Reproducibility contract: all randomness flows from ``numpy``'s
``SeedSequence``.  A station's two queues draw from two children of
``SeedSequence(entropy=seed, spawn_key=(station,))``, which makes every
station's sample path a pure function of ``(seed, station)`` — independent
of how many stations are simulated or in what order.  Exponential variates
are generated as ``-log1p(-U)/rate`` from ``Generator.random``, a fixed
choice so that results stay bit-identical across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .objective import echr

__all__ = [
    "SimConfig",
    "SimResult",
    "mm1_sojourn_times",
    "simulate_mm1",
    "simulate_station",
    "simulate_cluster",
]

_CI_FACTOR = 1.96  # normal 95% two-sided


@dataclass(frozen=True)
class SimConfig:
    """Simulation run parameters.

    ``warmup`` arrivals are discarded from the front of every queue's sample
    path to wash out the empty-system start; by default 1% of the run.
    """

    seed: int = 0
    n_arrivals: int = 100_000
    warmup: int | None = None

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.n_arrivals < 1:
            raise ValueError("n_arrivals must be at least 1")
        warmup = self.effective_warmup
        if not 0 <= warmup < self.n_arrivals:
            raise ValueError("warmup must satisfy 0 <= warmup < n_arrivals")

    @property
    def effective_warmup(self):
        return self.n_arrivals // 100 if self.warmup is None else self.warmup


@dataclass(frozen=True)
class SimResult:
    """Measured sojourn times for one base station.

    ``mean_sojourn_e`` / ``mean_sojourn_b`` are the edge and backhaul queue
    means (``None`` for a side that received no traffic), ``mean_adt`` is the
    hit-ratio-weighted mixture, ``ci_halfwidth`` its 95% normal half-width,
    and ``samples`` the number of retained sojourn samples.
    """

    mean_sojourn_e: float | None
    mean_sojourn_b: float | None
    mean_adt: float
    ci_halfwidth: float
    samples: int


def _exponential(rng, rate, size):
    # -log1p(-U) maps U in [0, 1) to (0, inf) without ever taking log(0).
    return -np.log1p(-rng.random(size)) / rate


def mm1_sojourn_times(lam, mu, n_arrivals, rng):
    """Sojourn times of the first ``n_arrivals`` customers of an M/M/1 queue.

    Runs Lindley's recursion in vectorized form: with arrival times ``A`` and
    cumulative services ``cumS``, the departure of customer ``k`` is
    ``cumS_k + max_{j<=k}(A_j - cumS_{j-1})``, so the whole path is one
    ``cumsum`` and one running maximum.
    """
    gaps = _exponential(rng, lam, n_arrivals)
    services = _exponential(rng, mu, n_arrivals)
    arrivals = np.cumsum(gaps)
    cum_services = np.cumsum(services)
    departures = cum_services + np.maximum.accumulate(arrivals - (cum_services - services))
    return departures - arrivals


def _mean_ci(samples):
    m = samples.size
    mean = float(samples.mean())
    if m < 2:
        return mean, math.inf
    ci = _CI_FACTOR * float(samples.std(ddof=1)) / math.sqrt(m)
    return mean, ci


def simulate_mm1(lam, mu, config):
    """Estimate the stationary mean sojourn time of an M/M/1 queue.

    Returns ``(mean, ci_halfwidth)`` after discarding the warmup prefix.  The
    analytic value is ``1 / (mu - lam)``; the estimate converges to it as the
    run length grows.
    """
    lam = float(lam)
    mu = float(mu)
    if not 0 < lam < mu:
        raise ValueError(f"need 0 < lam < mu for a stable queue, got lam={lam}, mu={mu}")
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    sojourn = mm1_sojourn_times(lam, mu, config.n_arrivals, rng)
    return _mean_ci(sojourn[config.effective_warmup :])


def simulate_station(placement, scenario, station, config):
    """Simulate one base station's edge/backhaul pair under ``placement``.

    The cache hit ratio ``h`` splits the station's arrivals into an edge
    stream of rate ``lam*h`` and a backhaul stream of rate ``lam*(1-h)``;
    each stream feeds its own M/M/1 queue.  The reported mean download time
    is ``h * mean_e + (1-h) * mean_b`` with the half-widths combined in
    quadrature.  A side with zero traffic is skipped and reported as ``None``.
    """
    traffic = scenario.traffic
    if not 0 <= station < traffic.station_count:
        raise ValueError(f"station index {station} out of range")
    h = min(max(echr(placement, scenario.library), 0.0), 1.0)
    lam = float(traffic.lam[station])
    mu_e = float(traffic.mu_e[station])
    mu_b = float(traffic.mu_b[station])

    children = np.random.SeedSequence(entropy=config.seed, spawn_key=(station,)).spawn(2)
    warmup = config.effective_warmup
    kept = config.n_arrivals - warmup

    def run(rate, mu, seed_seq):
        rng = np.random.default_rng(seed_seq)
        sojourn = mm1_sojourn_times(rate, mu, config.n_arrivals, rng)
        return _mean_ci(sojourn[warmup:])

    if h == 0.0:
        mean_b, ci_b = run(lam, mu_b, children[1])
        return SimResult(None, mean_b, mean_b, ci_b, kept)
    if h == 1.0:
        mean_e, ci_e = run(lam, mu_e, children[0])
        return SimResult(mean_e, None, mean_e, ci_e, kept)

    mean_e, ci_e = run(lam * h, mu_e, children[0])
    mean_b, ci_b = run(lam * (1.0 - h), mu_b, children[1])
    mean = h * mean_e + (1.0 - h) * mean_b
    ci = math.hypot(h * ci_e, (1.0 - h) * ci_b)
    return SimResult(mean_e, mean_b, mean, ci, 2 * kept)


def simulate_cluster(placement, scenario, config):
    """Run :func:`simulate_station` for every base station, in station order."""
    return [
        simulate_station(placement, scenario, station, config)
        for station in range(scenario.traffic.station_count)
    ]
