"""Operator-splitting solver for the optimal cache placement problem.

The problem minimizes the overall download time ``D`` over placements
subject to box bounds, per-content totals at most 1, and per-node capacity.
Splitting duplicates the variable — an unconstrained copy ``p`` carrying the
smooth objective and a feasible copy ``z`` carrying the constraints — and
alternates three steps with a scaled dual ``theta``:

* **p-update**: minimize ``D(p) + rho/2 ||p - (z - theta)||^2``.  ``D``
  touches ``p`` only through the scalar hit ratio ``h = c . p`` (``c`` being
  the popularity vector replicated per node), so the minimizer is
  ``v - (D'(h*) / rho) c`` where the scalar ``h*`` solves a strictly
  increasing one-dimensional equation — found by safeguarded Newton/bisection
  instead of any inner iterative solver.
* **z-update**: Euclidean projection of ``p + theta`` onto the feasible set,
  computed by Dykstra's alternating projections (plain cyclic projection
  would land somewhere feasible but not at the projection).
* **dual update**: ``theta += p - z``.

Iteration stops on the usual primal/dual residual thresholds; the feasible
iterate ``z`` is returned as the placement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._roots import increasing_root
from .errors import ProjectionError
from .model import FEASIBILITY_TOL, Placement, validate_placement
from .objective import (
    adt_curvature,
    adt_curve,
    adt_slope,
    echr,
    require_equal_sizes,
    stable_echr_interval,
)

__all__ = [
    "AdmmConfig",
    "AdmmState",
    "AdmmResult",
    "ConstraintSystem",
    "IterationRecord",
    "p_update",
    "project_feasible",
    "solve",
]


@dataclass(frozen=True)
class AdmmConfig:
    """Solver knobs.

    ``rho`` is the augmented-Lagrangian weight (the problem is well scaled at
    the magnitudes of interest, so a constant 1.0 works and no adaptive
    scheme is used).  ``eps_abs``/``eps_rel`` enter the standard residual
    stopping rules; ``projection_tol``/``projection_max_iter`` govern the
    inner Dykstra projection.
    """

    rho: float = 1.0
    eps_abs: float = 1e-6
    eps_rel: float = 1e-4
    max_iter: int = 1000
    projection_tol: float = 1e-10
    projection_max_iter: int = 20000

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not (self.eps_abs > 0 and self.eps_rel > 0 and self.projection_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1 or self.projection_max_iter < 1:
            raise ValueError("iteration caps must be at least 1")


class IterationRecord(NamedTuple):
    """One trace row: the CSV schema of the convergence export."""

    k: int
    objective: float
    primal_residual: float
    dual_residual: float


@dataclass(frozen=True, eq=False)
class AdmmState:
    """Solver state after the last iteration (vectors in node-major order)."""

    p: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    k: int
    primal_residual: float
    dual_residual: float
    objective: float


@dataclass(frozen=True, eq=False)
class AdmmResult:
    """Solution bundle: the feasible placement plus convergence evidence."""

    placement: Placement
    echr: float
    adt: float
    iterations: int
    converged: bool
    trace: list
    state: AdmmState


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """The linear part of the feasible set in stacked-matrix form.

    ``a`` (F x N*F) sums the entries of a node-major placement vector per
    content, bounded by ``a_u`` (all ones); ``b`` (N x N*F) accumulates
    per-node storage use via the content sizes, bounded by ``b_u`` (the
    capacities).  Together with the unit box these define the feasible set.
    """

    a: np.ndarray
    a_u: np.ndarray
    b: np.ndarray
    b_u: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        a_u = np.asarray(self.a_u, dtype=float)
        b_u = np.asarray(self.b_u, dtype=float)
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
            raise ValueError("a and b must be matrices over the same vector length")
        if a_u.shape != (a.shape[0],) or b_u.shape != (b.shape[0],):
            raise ValueError("bound vectors must match their matrices row-for-row")
        if a.shape[0] * b.shape[0] != a.shape[1]:
            raise ValueError("expected N*F columns for F content rows and N node rows")
        for name, value in (("a", a), ("a_u", a_u), ("b", b), ("b_u", b_u)):
            object.__setattr__(self, name, value)

    @classmethod
    def build(cls, library, cluster):
        n, f = cluster.node_count, library.count
        a = np.tile(np.eye(f), (1, n))
        b = np.kron(np.eye(n), library.sizes)
        return cls(a=a, a_u=np.ones(f), b=b, b_u=cluster.capacities.astype(float))

    @property
    def n_contents(self):
        return self.a.shape[0]

    @property
    def n_nodes(self):
        return self.b.shape[0]

    @property
    def sizes(self):
        """Per-content sizes, recovered from the first node block of ``b``."""
        return self.b[0, : self.n_contents]

    @property
    def capacities(self):
        return self.b_u

    def stacked(self):
        """All linear rows as one ``(C, u)`` pair (contents first)."""
        return np.vstack([self.a, self.b]), np.concatenate([self.a_u, self.b_u])


def _max_violation(matrix, sizes, capacities):
    box = max(0.0 - matrix.min(initial=0.0), matrix.max(initial=1.0) - 1.0, 0.0)
    content = max(float(np.max(matrix.sum(axis=0) - 1.0, initial=0.0)), 0.0)
    node = max(float(np.max(matrix @ sizes - capacities, initial=0.0)), 0.0)
    return max(box, content, node)


def project_feasible(x, constraints, tol=1e-10, max_iter=20000):
    """Euclidean projection onto the feasible placement set.

    Dykstra's alternating projections over three simple sets, each of which
    separates over disjoint coordinate blocks and projects in closed form:
    the unit box, the per-content halfspaces (columns of the matrix view),
    and the per-node capacity halfspaces (rows).  Iteration stops when one
    full cycle moves the whole state — the iterate *and* the per-set
    correction terms — less than ``tol`` and the result is feasible within
    the standard tolerance (the iterate alone can pause for a cycle while
    corrections still shift between sets, so watching it would stop early);
    exceeding ``max_iter`` raises
    :class:`~fogcache.errors.ProjectionError` carrying the last iterate.

    ``x`` may be the node-major vector or the matrix; the shape is preserved.
    """
    x = np.asarray(x, dtype=float)
    n, f = constraints.n_nodes, constraints.n_contents
    if x.size != n * f:
        raise ValueError(f"expected {n * f} entries for {n} nodes x {f} contents")
    sizes = constraints.sizes
    capacities = constraints.capacities
    size_sq = float(sizes @ sizes)
    z = x.reshape(n, f).astype(float).copy()
    increments = [np.zeros_like(z) for _ in range(3)]
    movement = np.inf
    for _ in range(max_iter):
        start = z.copy()
        previous = [increment.copy() for increment in increments]
        # Box.
        y = z + increments[0]
        z = np.clip(y, 0.0, 1.0)
        increments[0] = y - z
        # Per-content totals (halfspace per column; uniform shift projects).
        y = z + increments[1]
        shift = np.maximum(y.sum(axis=0) - 1.0, 0.0) / n
        z = y - shift[np.newaxis, :]
        increments[1] = y - z
        # Per-node capacity (halfspace per row; shift along the size vector).
        y = z + increments[2]
        scale = np.maximum(y @ sizes - capacities, 0.0) / size_sq
        z = y - scale[:, np.newaxis] * sizes[np.newaxis, :]
        increments[2] = y - z
        movement = float(
            np.linalg.norm(z - start)
            + sum(np.linalg.norm(new - old) for new, old in zip(increments, previous))
        )
        if movement <= tol and _max_violation(z, sizes, capacities) <= FEASIBILITY_TOL:
            break
    else:
        raise ProjectionError(
            f"projection did not converge within {max_iter} cycles "
            f"(last cycle moved {movement:g})",
            last=z.reshape(x.shape),
            residual=movement,
        )
    return z.reshape(x.shape)


def _tiled_popularity(scenario):
    return np.tile(scenario.library.popularity, scenario.cluster.node_count)


def p_update(z, theta, scenario, rho):
    """Exact minimizer of the smooth half-step.

    Minimizes ``D(p) + rho/2 ||p - v||^2`` with ``v = z - theta``.  Writing
    ``h = c . p``, optimality forces ``p = v - (D'(h) / rho) c``, and taking
    the inner product with ``c`` leaves one scalar equation

        r(h) = h - c . v + (D'(h) / rho) ||c||^2 = 0

    whose left side is strictly increasing (``D`` is convex), diverging at
    the stability boundaries — so the root exists, is unique, and safeguarded
    Newton finds it to 1e-12.  Shapes (vector or matrix) are preserved.
    """
    require_equal_sizes(scenario.library)
    if not rho > 0:
        raise ValueError("rho must be positive")
    z = np.asarray(z, dtype=float)
    theta = np.asarray(theta, dtype=float)
    traffic = scenario.traffic
    c = _tiled_popularity(scenario)
    if z.size != c.size or theta.size != c.size:
        raise ValueError(f"expected vectors of length {c.size}")
    v = z - theta
    cv = float(c @ v.ravel())
    c_sq = float(c @ c)
    lo, hi = stable_echr_interval(traffic)

    def residual(h):
        return h - cv + adt_slope(h, traffic) * c_sq / rho

    def residual_slope(h):
        return 1.0 + adt_curvature(h, traffic) * c_sq / rho

    h_star = increasing_root(residual, residual_slope, lo, hi, tol=1e-12)
    return v - (adt_slope(h_star, traffic) / rho) * c.reshape(z.shape)


def solve(scenario, config=None, p0=None):
    """Run the splitting iteration on a scenario.

    Starts from zero vectors (or a feasible ``p0``) and iterates the three
    updates until both residual thresholds hold:

        ||p - z||        <=  sqrt(N*F) * eps_abs + eps_rel * max(||p||, ||z||)
        rho ||z - z_old||  <=  sqrt(N*F) * eps_abs + eps_rel * rho * ||theta||

    Returns an :class:`AdmmResult` whose placement is the feasible iterate
    ``z`` (``p`` may sit tolerance-level outside the constraints; downstream
    consumers need feasibility, so ``z`` is the one handed back — recorded
    choice).  If the iteration cap is reached, the best-objective iterate
    seen is returned flagged ``converged=False``.  The trace records, per
    iteration, the objective of the feasible iterate and both residuals.
    """
    config = AdmmConfig() if config is None else config
    require_equal_sizes(scenario.library)
    library, cluster, traffic = scenario.library, scenario.cluster, scenario.traffic
    n, f = cluster.node_count, library.count
    constraints = ConstraintSystem.build(library, cluster)

    z = np.zeros((n, f))
    if p0 is not None:
        p0 = np.asarray(p0, dtype=float).reshape(n, f)
        validate_placement(p0, library, cluster)
        z = p0.copy()
    theta = np.zeros((n, f))
    p = np.zeros((n, f))
    scale = np.sqrt(n * f)

    def feasible_objective(matrix):
        h = min(max(echr(matrix, library), 0.0), 1.0)
        return adt_curve(h, traffic)

    trace = []
    best_objective = np.inf
    best_z = z
    best_k = 0
    converged = False
    k = 0
    primal = dual = np.inf
    objective = feasible_objective(z)
    for k in range(1, config.max_iter + 1):
        p = p_update(z, theta, scenario, config.rho)
        z_old = z
        z = project_feasible(
            p + theta, constraints, tol=config.projection_tol, max_iter=config.projection_max_iter
        )
        theta = theta + (p - z)
        primal = float(np.linalg.norm(p - z))
        dual = float(config.rho * np.linalg.norm(z - z_old))
        objective = feasible_objective(z)
        trace.append(IterationRecord(k, objective, primal, dual))
        if objective < best_objective:
            best_objective, best_z, best_k = objective, z, k
        eps_primal = scale * config.eps_abs + config.eps_rel * max(
            np.linalg.norm(p), np.linalg.norm(z)
        )
        eps_dual = scale * config.eps_abs + config.eps_rel * config.rho * np.linalg.norm(theta)
        if primal <= eps_primal and dual <= eps_dual:
            converged = True
            break

    if not converged and best_z is not z:
        z = best_z
        objective = best_objective
        k = best_k
    state = AdmmState(
        p=p.ravel().copy(),
        z=z.ravel().copy(),
        theta=theta.ravel().copy(),
        k=k,
        primal_residual=primal,
        dual_residual=dual,
        objective=objective,
    )
    placement = Placement(z)
    return AdmmResult(
        placement=placement,
        echr=min(max(echr(z, library), 0.0), 1.0),
        adt=objective,
        iterations=k,
        converged=converged,
        trace=trace,
        state=state,
    )
