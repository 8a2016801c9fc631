"""Closed-form heuristic: storage-limited vs. provision-limited hit ratios.

Minimizing the overall download time over placements reduces to choosing one
scalar — the ECHR ``h`` — and realizing it with any feasible placement.  Two
candidate optima exist:

* ``h_csl`` (cache-storage-limited): the largest hit ratio the cluster's
  storage can realize at all; the optimum whenever capacity is the
  bottleneck, since below the stationary point the download time only
  improves as ``h`` grows.
* ``h_cpl`` (content-provision-limited): the stationary point of the
  download-time curve, optimal when service rates — not storage — are the
  bottleneck.  For identical stations it has a closed form; otherwise it is
  the root of the derivative.

The convexity of the download-time curve makes ``h* = min(h_csl, h_cpl)``
the exact optimum of the relaxed scalar problem.  For identical stations the
two regimes swap at a threshold arrival rate ``lambda*``: storage-limited
below it, provision-limited above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import FEASIBILITY_TOL, Placement
from .objective import adt_slope, require_equal_sizes

__all__ = [
    "HeuristicResult",
    "echr_csl",
    "echr_cpl",
    "lambda_threshold",
    "placement_from_echr",
    "heuristic_solve",
]


def _greedy_fractions(library, cluster, h_target=None):
    """Per-content cached portions chosen greedily by popularity density.

    Walks contents in decreasing ``popularity / size`` order (which is plain
    popularity order whenever sizes are equal), taking as much of each content
    as the remaining pooled capacity — and, when ``h_target`` is given, the
    remaining hit-ratio budget — allows.  Greedy is exact for this continuous
    knapsack, so with ``h_target=None`` the result maximizes the ECHR.
    """
    popularity, sizes = library.popularity, library.sizes
    order = np.argsort(-(popularity / sizes), kind="stable")
    fractions = np.zeros(library.count)
    remaining_capacity = cluster.total_capacity
    remaining_hit = math.inf if h_target is None else float(h_target)
    for f in order:
        if remaining_capacity <= 0.0 or remaining_hit <= 0.0:
            break
        take = min(1.0, remaining_capacity / sizes[f], remaining_hit / popularity[f])
        fractions[f] = take
        remaining_capacity -= take * sizes[f]
        remaining_hit -= take * popularity[f]
    return fractions


def _assign_first_fit(fractions, library, cluster):
    """Materialize per-content portions as a node-level placement matrix.

    Contents are visited in index order; each content's storage demand is
    placed on the first node with spare capacity, spilling over to later
    nodes as needed.  Any feasible assignment yields the same objective, so
    this fixed rule simply makes the output canonical.
    """
    matrix = np.zeros((cluster.node_count, library.count))
    spare = cluster.capacities.astype(float).copy()
    for f in range(library.count):
        demand = fractions[f] * library.sizes[f]
        if demand <= 0.0:
            continue
        for i in range(cluster.node_count):
            if demand <= 0.0:
                break
            amount = min(spare[i], demand)
            if amount <= 0.0:
                continue
            matrix[i, f] = amount / library.sizes[f]
            spare[i] -= amount
            demand -= amount
    return Placement(matrix)


def echr_csl(library, cluster):
    """Largest realizable ECHR and a placement achieving it.

    Solves ``max sum_f P_r(f) x_f`` subject to the pooled capacity bound and
    ``0 <= x_f <= 1`` by greedy fractional selection in decreasing
    popularity-per-size density; the greedy is the exact optimum of this
    continuous knapsack.  Pooling the node capacities loses nothing because
    fractional portions can always be split across nodes.

    Returns
    -------
    (float, Placement)
    """
    fractions = _greedy_fractions(library, cluster)
    h_csl = float(min(library.popularity @ fractions, 1.0))
    return h_csl, _assign_first_fit(fractions, library, cluster)


def echr_cpl(traffic):
    """Stationary point of the download-time curve, clamped to [0, 1].

    For identical stations the stationarity condition balances the two queue
    terms and solves in closed form::

        h = ((mu_e - sqrt(mu_e * mu_b)) * sqrt(mu_b) + lam * sqrt(mu_e))
            / (lam * (sqrt(mu_b) + sqrt(mu_e)))

    For heterogeneous traffic the derivative is strictly increasing, so its
    root on [0, 1] is found by bisection (to 1e-12), clamping to an endpoint
    when no interior root exists.  The clamp also covers extreme rate ratios
    where the closed-form stationary point leaves the physical range.
    """
    if traffic.homogeneous:
        lam = float(traffic.lam[0])
        root_e = math.sqrt(float(traffic.mu_e[0]))
        root_b = math.sqrt(float(traffic.mu_b[0]))
        h = ((float(traffic.mu_e[0]) - root_e * root_b) * root_b + lam * root_e) / (
            lam * (root_b + root_e)
        )
        return float(min(max(h, 0.0), 1.0))
    if adt_slope(0.0, traffic) >= 0.0:
        return 0.0
    if adt_slope(1.0, traffic) <= 0.0:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if adt_slope(mid, traffic) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def lambda_threshold(h_csl, mu_e, mu_b):
    """Arrival rate where the storage- and provision-limited optima coincide.

    For identical stations with rates ``mu_e``/``mu_b`` and a storage bound
    ``h_csl``, returns::

        lambda* = sqrt(mu_b * mu_e) * (sqrt(mu_e) - sqrt(mu_b))
                  / (h_csl * (sqrt(mu_e) + sqrt(mu_b)) - sqrt(mu_e))

    Below ``lambda*`` the storage bound binds (CSL regime); above it the
    stationary point does (CPL).  When the denominator is not positive the
    two curves never cross for any stable arrival rate — storage stays the
    bottleneck throughout — and ``None`` is returned.  A returned value at or
    above ``mu_b`` likewise cannot be reached by stable traffic.
    """
    h_csl = float(h_csl)
    mu_e, mu_b = float(mu_e), float(mu_b)
    if not 0.0 < h_csl <= 1.0:
        raise ValueError("h_csl must lie in (0, 1]")
    if not 0.0 < mu_b < mu_e:
        raise ValueError("rates must satisfy 0 < mu_b < mu_e")
    root_e, root_b = math.sqrt(mu_e), math.sqrt(mu_b)
    denominator = h_csl * (root_e + root_b) - root_e
    if denominator <= 0.0:
        return None
    return root_b * root_e * (root_e - root_b) / denominator


def placement_from_echr(h_target, library, cluster):
    """A canonical feasible placement whose ECHR equals ``h_target``.

    Caches contents greedily in popularity-density order, scaling the last
    content's portion so the popularity-weighted total lands on ``h_target``
    (within 1e-9); node assignment is first-fit in node index order.  Targets
    above the storage bound are unreachable and rejected.
    """
    h_target = float(h_target)
    h_csl = float(min(library.popularity @ _greedy_fractions(library, cluster), 1.0))
    if h_target < -FEASIBILITY_TOL:
        raise ValueError("target hit ratio must be nonnegative")
    if h_target > h_csl + 1e-9:
        raise ValueError(
            f"target hit ratio {h_target:g} exceeds the storage-limited bound {h_csl:g}"
        )
    fractions = _greedy_fractions(library, cluster, h_target=max(h_target, 0.0))
    return _assign_first_fit(fractions, library, cluster)


@dataclass(frozen=True, eq=False)
class HeuristicResult:
    """Outcome of the closed-form heuristic.

    ``regime`` is ``"CSL"`` when the storage bound is the binding one and
    ``"CPL"`` when the stationary point is; ``lambda_star`` is the switch
    threshold (identical-station traffic only, ``None`` when undefined or not
    applicable).  ``placement`` realizes ``h_star`` exactly.
    """

    h_csl: float
    h_cpl: float
    h_star: float
    lambda_star: float | None
    regime: str
    placement: Placement


def heuristic_solve(scenario):
    """Run the full heuristic on a scenario.

    Computes the storage bound and the stationary point, takes
    ``h_star = min(h_csl, h_cpl)`` — the exact optimum of the scalar relaxed
    problem, by convexity — and materializes it as a placement.
    """
    require_equal_sizes(scenario.library)
    library, cluster, traffic = scenario.library, scenario.cluster, scenario.traffic
    h_csl, csl_placement = echr_csl(library, cluster)
    h_cpl = echr_cpl(traffic)
    if h_cpl <= h_csl:
        regime, h_star = "CPL", h_cpl
        placement = placement_from_echr(h_star, library, cluster)
    else:
        regime, h_star = "CSL", h_csl
        placement = csl_placement
    lambda_star = None
    if traffic.homogeneous and h_csl > 0.0:
        lambda_star = lambda_threshold(h_csl, float(traffic.mu_e[0]), float(traffic.mu_b[0]))
    return HeuristicResult(
        h_csl=h_csl,
        h_cpl=h_cpl,
        h_star=h_star,
        lambda_star=lambda_star,
        regime=regime,
        placement=placement,
    )
