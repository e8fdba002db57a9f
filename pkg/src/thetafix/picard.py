"""Picard iteration with the diagnostics used to judge convergence.

Stopping is driven by the step distance ``d(x_n, x_{n+1})``; the residual
``d(z, Tz)`` of the returned candidate is reported separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .catalog import SelfMap
from .spaces import EPS_TOL, DomainError, ParameterError, ThetaMetricSpace, distance

CONVERGED = "converged"
MAX_ITERATIONS = "max-iterations"
EXACT = "exact-fixed-point"

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10_000


@dataclass
class PicardTrace:
    x0: object
    iterates: list = field(default_factory=list)
    steps: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.steps)


@dataclass
class FixedPointResult:
    status: str
    z: object
    residual: float
    iterations: int
    trace: PicardTrace

    @property
    def converged(self) -> bool:
        return self.status in (CONVERGED, EXACT)


def picard_iterate(space: ThetaMetricSpace, smap: SelfMap, x0, tol: float = DEFAULT_TOL,
                   max_iter: int = DEFAULT_MAX_ITER) -> FixedPointResult:
    if not tol > 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ParameterError(f"max_iter must be >= 1, got {max_iter}")
    if smap.domain != space.domain:
        raise DomainError(f"map {smap.name!r} does not act on {space.domain}")
    space.check_point(x0)

    trace = PicardTrace(x0, [x0], [])
    x = x0
    status, z = MAX_ITERATIONS, x0
    for _ in range(max_iter):
        y = smap.apply(x)
        d = distance(space, x, y)
        trace.iterates.append(y)
        trace.steps.append(d)
        if y == x:
            status, z = EXACT, x
            break
        if d <= tol:
            status, z = CONVERGED, y
            break
        x = y
    else:
        z = x
    return FixedPointResult(status, z, distance(space, z, smap.apply(z)), len(trace), trace)


@dataclass
class RegularityReport:
    monotone: bool
    final_step: float
    regular: bool


def asymptotic_regularity(trace: PicardTrace, tol: float = DEFAULT_TOL) -> RegularityReport:
    """Do the step distances decrease, and has the last one fallen below ``tol``?"""
    d = trace.steps
    if len(d) < 2:
        raise ValueError(f"need at least 2 steps, trace has {len(d)}")
    monotone = all(b <= a + EPS_TOL for a, b in zip(d, d[1:]))
    return RegularityReport(monotone, d[-1], d[-1] <= tol)


def cauchy_diagnostic(trace: PicardTrace, space: ThetaMetricSpace) -> list[float]:
    """Finite-horizon tail diameters ``max_{i,j in [n, N]} d(x_i, x_j)`` for ``n = 0..N``.

    A lower bound on the true tail supremum, non-increasing in ``n``.
    """
    xs = trace.iterates
    out = [0.0] * len(xs)
    # repeated iterates add nothing to the diameter, so only distinct tail
    # points are compared; keeps cycling traces linear in their length
    tail: list = []
    seen = set()
    current = 0.0
    for n in range(len(xs) - 1, -1, -1):
        x = xs[n]
        if x not in seen:
            for y in tail:
                current = max(current, distance(space, x, y))
            tail.append(x)
            seen.add(x)
        out[n] = current
    return out


@dataclass
class UniquenessReport:
    all_converged: bool
    max_pairwise_distance: float
    unique: bool
    limits: list
    statuses: list[str]


def uniqueness_probe(space: ThetaMetricSpace, smap: SelfMap, starts, tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER) -> UniquenessReport:
    starts = list(starts)
    if len(starts) < 2:
        raise ValueError("uniqueness probe needs at least 2 starts")
    results = [picard_iterate(space, smap, x0, tol, max_iter) for x0 in starts]
    limits = [r.z for r in results]
    spread = max((distance(space, a, b) for a, b in combinations(limits, 2)), default=0.0)
    all_conv = all(r.converged for r in results)
    return UniquenessReport(all_conv, spread, all_conv and spread <= 10 * tol,
                            limits, [r.status for r in results])
