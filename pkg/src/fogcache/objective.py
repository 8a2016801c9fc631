"""The analytic performance model.

Every request stream in the cluster sees the same edge-cache-hit ratio
(ECHR) ``h``: the popularity-weighted total of cached portions.  Each base
station then behaves as a pair of independent M/M/1 queues — hit traffic of
rate ``lam * h`` served at ``mu_e``, miss traffic of rate ``lam * (1 - h)``
served at ``mu_b`` — giving the per-station average download time (ADT)

    d(h) = h / (mu_e - lam * h) + (1 - h) / (mu_b - lam * (1 - h))

and the overall objective ``D(h)``: the arrival-rate-weighted mean of the
per-station times.  ``D`` depends on a placement only through the scalar
``h``, so all derivative code is factored through that scalar; this is what
gives the solver its closed-form update.

``D`` is defined (and strictly convex) on the open interval of hit ratios
where every station keeps both queues stable; that interval always contains
[0, 1] thanks to the stability chain ``lam < mu_b < mu_e``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Placement, validate_placement, unflatten_placement

__all__ = [
    "QueueSplit",
    "AdtReport",
    "echr",
    "queue_split",
    "adt_of_echr",
    "overall_adt",
    "grad_overall_adt",
    "d2_adt_dh2",
    "adt_curve",
    "adt_slope",
    "adt_curvature",
    "stable_echr_interval",
    "require_equal_sizes",
]


def require_equal_sizes(library):
    """The download-time model assumes one shared content size; enforce it."""
    sizes = library.sizes
    if np.any(sizes != sizes[0]):
        raise ValueError(
            "the download-time model requires equal content sizes; "
            "got sizes ranging %g..%g" % (sizes.min(), sizes.max())
        )


def _as_matrix(placement):
    if isinstance(placement, Placement):
        return placement.matrix
    return np.asarray(placement, dtype=float)


def echr(placement, library):
    """Expected cache hit ratio of a placement.

    The popularity-weighted total cached portion
    ``sum_f P_r(f) * sum_i P(i, f)``; equivalently the inner product ``c . p``
    with ``c`` the popularity vector replicated once per node.  Linear in the
    placement.
    """
    matrix = _as_matrix(placement)
    if matrix.ndim != 2 or matrix.shape[1] != library.count:
        raise ValueError(
            f"placement with {matrix.shape[-1] if matrix.ndim else 0} contents does "
            f"not match a library of {library.count}"
        )
    return float(library.popularity @ matrix.sum(axis=0))


def stable_echr_interval(traffic):
    """Open interval of hit ratios keeping every station's queues stable.

    Returns ``(lo, hi)`` with ``lo = max_i (1 - mu_b_i / lam_i)`` and
    ``hi = min_i (mu_e_i / lam_i)``; always a strict superset of [0, 1] for a
    valid traffic profile.
    """
    lo = float(np.max(1.0 - traffic.mu_b / traffic.lam))
    hi = float(np.min(traffic.mu_e / traffic.lam))
    return lo, hi


def _require_stable(h, traffic):
    lo, hi = stable_echr_interval(traffic)
    h = np.asarray(h, dtype=float)
    if np.any(h <= lo) or np.any(h >= hi):
        raise ValueError(
            f"hit ratio outside the stable range ({lo:g}, {hi:g}); "
            "some station queue would be overloaded"
        )
    return h


def _maybe_scalar(values, scalar_input):
    return float(values) if scalar_input else values


def adt_curve(h, traffic):
    """Overall ADT ``D(h)`` at hit ratio ``h`` (vectorized over ``h``).

    Defined on the whole stable interval, which extends beyond [0, 1]; the
    root finders rely on that headroom.  Raises ``ValueError`` when any value
    leaves the stable range.
    """
    scalar = np.ndim(h) == 0
    h = _require_stable(h, traffic)[..., np.newaxis]
    lam, mu_e, mu_b = traffic.lam, traffic.mu_e, traffic.mu_b
    per_station = h / (mu_e - lam * h) + (1.0 - h) / (mu_b - lam * (1.0 - h))
    return _maybe_scalar(np.sum(traffic.weights * per_station, axis=-1), scalar)


def adt_slope(h, traffic):
    """First derivative ``dD/dh`` (vectorized over ``h``)."""
    scalar = np.ndim(h) == 0
    h = _require_stable(h, traffic)[..., np.newaxis]
    lam, mu_e, mu_b = traffic.lam, traffic.mu_e, traffic.mu_b
    per_station = mu_e / (mu_e - lam * h) ** 2 - mu_b / (mu_b - lam * (1.0 - h)) ** 2
    return _maybe_scalar(np.sum(traffic.weights * per_station, axis=-1), scalar)


def adt_curvature(h, traffic):
    """Second derivative ``d2D/dh2``; strictly positive on the stable range."""
    scalar = np.ndim(h) == 0
    h = _require_stable(h, traffic)[..., np.newaxis]
    lam, mu_e, mu_b = traffic.lam, traffic.mu_e, traffic.mu_b
    per_station = (
        2.0 * mu_e * lam / (mu_e - lam * h) ** 3
        + 2.0 * mu_b * lam / (mu_b - lam * (1.0 - h)) ** 3
    )
    return _maybe_scalar(np.sum(traffic.weights * per_station, axis=-1), scalar)


def adt_of_echr(h, lam, mu_e, mu_b):
    """Average download time of one station at hit ratio ``h``.

    The two-term M/M/1 mixture with hit share ``h``.  ``h`` must lie in
    [0, 1] and the rates must satisfy ``0 < lam < mu_b < mu_e``, which makes
    both queue denominators strictly positive.
    """
    h = np.asarray(h, dtype=float)
    scalar = h.ndim == 0
    if np.any(h < 0.0) or np.any(h > 1.0):
        raise ValueError("hit ratio must lie in [0, 1]")
    lam, mu_e, mu_b = float(lam), float(mu_e), float(mu_b)
    if not 0.0 < lam < mu_b < mu_e:
        raise ValueError(f"rates must satisfy 0 < lam < mu_b < mu_e; got lam={lam:g}, mu_b={mu_b:g}, mu_e={mu_e:g}")
    value = h / (mu_e - lam * h) + (1.0 - h) / (mu_b - lam * (1.0 - h))
    return _maybe_scalar(value, scalar)


@dataclass(frozen=True, eq=False)
class QueueSplit:
    """Per-station arrival rates of the two provision paths."""

    lambda_e: np.ndarray
    lambda_b: np.ndarray

    def __post_init__(self):
        lambda_e = np.asarray(self.lambda_e, dtype=float)
        lambda_b = np.asarray(self.lambda_b, dtype=float)
        if lambda_e.shape != lambda_b.shape:
            raise ValueError("lambda_e and lambda_b must have equal length")
        if np.any(lambda_e < 0.0) or np.any(lambda_b < 0.0):
            raise ValueError("split arrival rates must be nonnegative")
        object.__setattr__(self, "lambda_e", lambda_e)
        object.__setattr__(self, "lambda_b", lambda_b)


def queue_split(h, traffic):
    """Split every station's arrivals by the hit ratio.

    ``lambda_e = lam * h`` goes to the cache-hit queue and the exact
    complement ``lambda_b = lam - lambda_e`` to the cloud queue, so the two
    parts always sum back to ``lam`` bit-exactly.
    """
    h = float(h)
    if not 0.0 <= h <= 1.0:
        raise ValueError("hit ratio must lie in [0, 1]")
    lambda_e = traffic.lam * h
    return QueueSplit(lambda_e, traffic.lam - lambda_e)


@dataclass(frozen=True, eq=False)
class AdtReport:
    """Full download-time breakdown of a placement.

    ``h_e``/``h_b`` are the hit and miss shares (they sum to 1); ``t_e`` and
    ``t_b`` the per-station mean sojourn times of the two queues;
    ``per_station`` the station ADTs and ``overall`` their traffic-weighted
    mean — the optimization objective.
    """

    h_e: float
    h_b: float
    t_e: np.ndarray
    t_b: np.ndarray
    per_station: np.ndarray
    overall: float


def overall_adt(placement, scenario):
    """Evaluate the full download-time report of a feasible placement."""
    require_equal_sizes(scenario.library)
    validate_placement(placement, scenario.library, scenario.cluster)
    traffic = scenario.traffic
    h = echr(placement, scenario.library)
    # Guard against tolerance-level overshoot of the hit share.
    h = min(max(h, 0.0), 1.0)
    split = queue_split(h, traffic)
    t_e = 1.0 / (traffic.mu_e - split.lambda_e)
    t_b = 1.0 / (traffic.mu_b - split.lambda_b)
    per_station = h * t_e + (1.0 - h) * t_b
    overall = float(traffic.weights @ per_station)
    return AdtReport(h_e=h, h_b=1.0 - h, t_e=t_e, t_b=t_b, per_station=per_station, overall=overall)


def grad_overall_adt(p, scenario):
    """Gradient of the overall ADT at a feasible placement vector.

    Because the objective reaches the placement only through the hit ratio,
    the gradient is ``dD/dh`` times the replicated popularity vector: entries
    for the same content are equal across nodes.  Accepts the node-major
    vector form (or a matrix/Placement) and returns a flat vector of length
    ``N * F``.
    """
    library, cluster = scenario.library, scenario.cluster
    require_equal_sizes(library)
    if isinstance(p, Placement):
        matrix = p.matrix
    else:
        p = np.asarray(p, dtype=float)
        matrix = unflatten_placement(p, cluster.node_count, library.count) if p.ndim == 1 else p
    validate_placement(matrix, library, cluster)
    h = echr(matrix, library)
    slope = adt_slope(min(max(h, 0.0), 1.0), scenario.traffic)
    return np.tile(slope * library.popularity, cluster.node_count)


def d2_adt_dh2(h, scenario):
    """Second derivative of the overall ADT in the hit ratio, at ``h`` in [0, 1].

    Strictly positive — the witness that the objective is convex.
    """
    h = np.asarray(h, dtype=float)
    if np.any(h < 0.0) or np.any(h > 1.0):
        raise ValueError("hit ratio must lie in [0, 1]")
    return adt_curvature(h if h.ndim else float(h), scenario.traffic)
