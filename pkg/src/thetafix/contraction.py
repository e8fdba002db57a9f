"""Sampled certification of Z-contractions and modified Z-contractions.

A self-map ``T`` is a Z-contraction for ``zeta`` when
``zeta(d(Tx, Ty), d(x, y)) >= 0`` for all pairs, and a modified one when the
second argument is ``M(x, y) = max(d(x, y), d(x, Tx), d(y, Ty))``.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .axioms import SamplePlan
from .catalog import SelfMap, SimulationFunction
from .spaces import EPS_STRICT, EPS_TOL, DomainError, ThetaMetricSpace, distance

log = logging.getLogger(__name__)

NONNEGATIVE = "nonnegative-on-samples"
VIOLATED = "violated"


@dataclass
class MarginReport:
    kind: str
    pair_count: int
    min_margin: float
    argmin_pair: tuple
    verdict: str
    # min over pairs with x != y; None when there are none
    min_margin_distinct: float | None
    clamped: bool = False

    @property
    def ok(self) -> bool:
        return self.verdict == NONNEGATIVE

    def to_dict(self) -> dict:
        d = asdict(self)
        d["argmin_pair"] = list(self.argmin_pair)
        return d


def sample_points(space: ThetaMetricSpace, smap: SelfMap | None = None,
                  plan: SamplePlan | None = None) -> np.ndarray:
    """All labels of a finite domain, or an equispaced grid plus map breakpoints."""
    if space.is_finite:
        return np.arange(len(space.domain))
    plan = plan or SamplePlan()
    pts = space.domain.grid(plan.domain_points)
    if smap is not None and smap.breakpoints:
        pts = np.union1d(pts, np.asarray(smap.breakpoints, float))
    return pts


def _check_map(space, smap):
    if smap.domain != space.domain:
        raise DomainError(f"map {smap.name!r} is defined on {smap.domain}, space is {space.domain}")


def m_value(space: ThetaMetricSpace, smap: SelfMap, x, y) -> float:
    _check_map(space, smap)
    return max(distance(space, x, y),
               distance(space, x, smap.apply(x)),
               distance(space, y, smap.apply(y)))


def _pair_arrays(space, smap, plan):
    pts = sample_points(space, smap, plan)
    X, Y = np.meshgrid(pts, pts, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    return X, Y, smap.apply_array(X), smap.apply_array(Y)


def _reduce(kind, space, X, Y, margins, nonneg_threshold, strict=False) -> MarginReport:
    k = int(np.argmin(margins))
    m = float(margins[k]) + 0.0
    distinct = X != Y
    m_distinct = float(np.min(margins[distinct])) + 0.0 if distinct.any() else None
    pair = (space.format_point(X[k]), space.format_point(Y[k]))
    if strict:
        ok, clamped = m > nonneg_threshold, False
    else:
        ok = m >= nonneg_threshold
        clamped = ok and m < 0
        if clamped:
            log.warning("%s: min margin %.3g within tolerance of zero at %s; treated as nonnegative",
                        kind, m, pair)
    return MarginReport(kind, int(margins.size), m, pair, NONNEGATIVE if ok else VIOLATED,
                        m_distinct, clamped)


def z_margin(space: ThetaMetricSpace, smap: SelfMap, zeta: SimulationFunction,
             plan: SamplePlan | None = None) -> MarginReport:
    """Minimum of ``zeta(d(Tx, Ty), d(x, y))`` over all sampled ordered pairs."""
    _check_map(space, smap)
    X, Y, TX, TY = _pair_arrays(space, smap, plan)
    margins = np.asarray(zeta.eval(space.pairwise(TX, TY), space.pairwise(X, Y)), float)
    return _reduce("z-margin", space, X, Y, margins, -EPS_TOL)


def modified_z_margin(space: ThetaMetricSpace, smap: SelfMap, zeta: SimulationFunction,
                      plan: SamplePlan | None = None) -> MarginReport:
    """As :func:`z_margin` with ``M(x, y)`` as the second argument."""
    _check_map(space, smap)
    X, Y, TX, TY = _pair_arrays(space, smap, plan)
    M = np.maximum(np.maximum(space.pairwise(X, Y), space.pairwise(X, TX)), space.pairwise(Y, TY))
    margins = np.asarray(zeta.eval(space.pairwise(TX, TY), M), float)
    return _reduce("modified-z-margin", space, X, Y, margins, -EPS_TOL)


def contractivity_check(space: ThetaMetricSpace, smap: SelfMap,
                        plan: SamplePlan | None = None) -> MarginReport:
    """Minimum of ``d(x, y) - d(Tx, Ty)`` over sampled pairs with ``x != y``.

    Passes only when the minimum exceeds ``EPS_STRICT`` (strict contraction).
    """
    _check_map(space, smap)
    X, Y, TX, TY = _pair_arrays(space, smap, plan)
    keep = X != Y
    if not keep.any():
        return MarginReport("contractivity", 0, float("inf"), (), NONNEGATIVE, None)
    X, Y, TX, TY = X[keep], Y[keep], TX[keep], TY[keep]
    margins = space.pairwise(X, Y) - space.pairwise(TX, TY)
    return _reduce("contractivity", space, X, Y, margins, EPS_STRICT, strict=True)
