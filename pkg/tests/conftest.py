"""Shared fixtures: the reference scenario, frozen oracle values, and
seeded random-instance generators.

The frozen constants below were derived independently of the library code:
closed forms evaluated at high precision plus an exhaustive fine-grid scan
of the objective.  Tests treat them as ground truth.
"""

import numpy as np
import pytest

from fogcache import ContentLibrary, FogCluster, Placement, Scenario, TrafficProfile

# --- reference scenario: 20 Zipf(0.6) contents of unit size, three nodes
# with capacities 2/3/5, homogeneous traffic lam=4, mu_e=8, mu_b=6 ---

#: Capacity-limited hit ratio: popularity mass of the ten most popular
#: contents (total capacity 10 at unit size).
H_CSL = 0.6938043777528711
#: Interior stationary point of the download-time curve.
H_CPL = 0.6602540378443865
#: Arrival rate where the two regimes meet.
LAMBDA_STAR = 3.150118642255122
#: Optimal average download time, attained at H_CPL.
ADT_OPT = 0.19641016151377544
#: Download time of the hit-ratio-maximizing placement (strictly worse).
ADT_AT_CSL = 0.19691287155196438
#: Popularity mass of the nine most popular contents, and the fractional
#: share of the tenth that realizes exactly H_CPL.
TOP9_MASS = 0.6546535443053937
TENTH_FRACTION = 0.1430491523636692
#: Most popular content's probability (Zipf exponent 0.6 over 20 ranks).
TOP_POPULARITY = 0.1558622752858646

# Exhaustive grid scan at resolution 1e-5 over the reachable hit ratios.
GRID_H_BEST = 0.66025
GRID_ADT_BEST = 0.19641016152107993

# Heterogeneous two-station variant: lam=[4,2], mu_e=8, mu_b=6, ample
# storage (capacities [5,5]).  The optimum is the interior stationary point.
HETERO_H_OPT = 0.6761496494625081
HETERO_ADT_OPT = 0.18508830731867457


def make_scenario(lam=4.0, mu_e=8.0, mu_b=6.0, count=20, alpha=0.6, capacities=(2.0, 3.0, 5.0)):
    """Reference-family scenario; traffic is homogeneous across stations."""
    capacities = np.asarray(capacities, dtype=float)
    n = capacities.size
    return Scenario(
        library=ContentLibrary.zipf(count, alpha),
        cluster=FogCluster(capacities),
        traffic=TrafficProfile(
            np.full(n, float(lam)), np.full(n, float(mu_e)), np.full(n, float(mu_b))
        ),
    )


@pytest.fixture
def reference_scenario():
    return make_scenario()


@pytest.fixture
def hetero_scenario():
    return Scenario(
        library=ContentLibrary.zipf(20, 0.6),
        cluster=FogCluster([5.0, 5.0]),
        traffic=TrafficProfile([4.0, 2.0], [8.0, 8.0], [6.0, 6.0]),
    )


def random_scenario(rng, max_nodes=3, max_contents=30):
    """Random valid scenario with equal (unit) content sizes.

    Traffic is identical across stations half the time and per-station
    otherwise; the stability chain holds with margin either way.
    """
    n = int(rng.integers(1, max_nodes + 1))
    f = int(rng.integers(2, max_contents + 1))
    library = ContentLibrary.zipf(f, float(rng.uniform(0.4, 1.2)))
    total = float(rng.uniform(0.15, 1.1)) * f
    cluster = FogCluster(total * rng.dirichlet(np.ones(n)))
    if rng.random() < 0.5:
        mu_b = np.full(n, rng.uniform(1.5, 8.0))
        mu_e = mu_b * rng.uniform(1.25, 3.0)
        lam = mu_b * rng.uniform(0.15, 0.9)
    else:
        mu_b = rng.uniform(1.5, 8.0, size=n)
        mu_e = mu_b * rng.uniform(1.25, 3.0, size=n)
        lam = mu_b * rng.uniform(0.15, 0.9, size=n)
    return Scenario(library, cluster, TrafficProfile(lam, mu_e, mu_b))


def random_feasible_placement(rng, library, cluster, margin=0.95):
    """Random placement strictly inside the feasible set."""
    matrix = rng.uniform(0.0, 1.0, size=(cluster.node_count, library.count))
    totals = matrix.sum(axis=0)
    matrix *= margin * rng.uniform(0.2, 1.0) / np.maximum(totals, 1.0)
    loads = matrix @ library.sizes
    over = loads > margin * cluster.capacities
    scale = np.where(over, margin * cluster.capacities / np.maximum(loads, 1e-300), 1.0)
    matrix *= scale[:, np.newaxis]
    return Placement(matrix)


#: Shapes for random projection instances (at most 8 variables, so the
#: exhaustive projection oracle stays usable).  Weighted toward small
#: instances; the larger ones exercise richer active-set combinations.
PROJECTION_SHAPES = (
    (1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (1, 3), (2, 3), (3, 2),
    (1, 4), (4, 1), (2, 2), (3, 1), (1, 3), (2, 3), (3, 2), (5, 1),
    (1, 5), (6, 1), (1, 6), (4, 2), (2, 4), (7, 1), (1, 7), (8, 1), (1, 8),
)


def random_projection_instance(rng):
    """A random constraint system plus an (often infeasible) query point."""
    n, f = PROJECTION_SHAPES[int(rng.integers(len(PROJECTION_SHAPES)))]
    sizes = rng.uniform(0.5, 2.0, size=f) if rng.random() < 0.5 else np.ones(f)
    popularity = np.sort(rng.dirichlet(np.ones(f)))[::-1]
    library = ContentLibrary(popularity, sizes)
    cluster = FogCluster(float(rng.uniform(0.1, 1.1)) * sizes.sum() * rng.dirichlet(np.ones(n)))
    x = rng.uniform(-0.6, 1.6, size=(n, f))
    return x, library, cluster
