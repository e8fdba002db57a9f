"""Closed-form simulation functions, B-actions and self-maps, built by name.

Every ``eval``/``apply`` here works elementwise on numpy arrays so the
verifiers can sweep whole grids in one call.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .spaces import (BAction, CatalogError, FiniteDomain, IntervalDomain,
                     ParameterError, PointDomain)


@dataclass(frozen=True)
class SimulationFunction:
    """``zeta(t, s)``: ``t`` is the image distance, ``s`` the source distance."""

    name: str
    eval: Callable = field(compare=False, repr=False)
    params: tuple[float, ...] = ()
    aux: str | None = None

    def __call__(self, t, s):
        return self.eval(t, s)


@dataclass(frozen=True)
class AuxFunction:
    name: str
    role: str  # "eta" or "phi"
    eval: Callable = field(compare=False, repr=False)


ETA_CATALOG = {
    "half": AuxFunction("half", "eta", lambda t: t / 2),
    "ratio": AuxFunction("ratio", "eta", lambda t: t / (1 + t)),
}
PHI_CATALOG = {
    "half": AuxFunction("half", "phi", lambda t: t / 2),
    "sq-ratio": AuxFunction("sq-ratio", "phi", lambda t: t * t / (1 + t)),
}

SIMULATION_KINDS = ("linear", "rational", "eta", "phi")
B_ACTION_KINDS = ("sum", "product-sum", "euclid", "rational", "sqrt-sum")
SELF_MAP_KINDS = ("affine", "reciprocal", "two-piece", "finite-table", "identity", "constant")


def _expect(kind, params, n):
    if len(params) != n:
        raise ParameterError(f"{kind} takes {n} parameter(s), got {len(params)}")


def make_simulation(kind: str, params: Sequence[float] = (), aux: str | None = None) -> SimulationFunction:
    params = tuple(float(p) for p in params)
    if kind == "linear":
        _expect(kind, params, 1)
        (lam,) = params
        if not 0 <= lam < 1:
            raise ParameterError(f"linear simulation needs 0 <= lambda < 1, got {lam}")
        return SimulationFunction(kind, lambda t, s: lam * s - t, params)
    if kind == "rational":
        _expect(kind, params, 0)
        return SimulationFunction(kind, lambda t, s: s / (s + 1) - t, params)
    if kind in ("eta", "phi"):
        _expect(kind, params, 0)
        sub = ETA_CATALOG if kind == "eta" else PHI_CATALOG
        if aux not in sub:
            raise CatalogError(f"{kind} needs aux in {sorted(sub)}, got {aux!r}")
        g = sub[aux].eval
        if kind == "eta":
            return SimulationFunction(kind, lambda t, s: g(s) - t, params, aux)
        return SimulationFunction(kind, lambda t, s: s - g(s) - t, params, aux)
    raise CatalogError(f"unknown simulation kind {kind!r}; known: {SIMULATION_KINDS}")


def make_b_action(kind: str, params: Sequence[float] = ()) -> BAction:
    params = tuple(float(p) for p in params)
    _expect(kind, params, 0)
    forms = {
        "sum": lambda s, t: s + t,
        "product-sum": lambda s, t: s + t + s * t,
        "euclid": lambda s, t: np.sqrt(s * s + t * t),
        "rational": lambda s, t: t * s / (1 + t * s),
        "sqrt-sum": lambda s, t: t + s + np.sqrt(t * s),
    }
    if kind not in forms:
        raise CatalogError(f"unknown B-action kind {kind!r}; known: {B_ACTION_KINDS}")
    return BAction(kind, forms[kind], params)


@dataclass(frozen=True)
class SelfMap:
    """A self-map of a point domain.

    ``breakpoints`` lists interval points where the map is discontinuous;
    samplers always include them.
    """

    name: str
    domain: PointDomain
    func: Callable = field(compare=False, repr=False)
    params: tuple[float, ...] = ()
    table: tuple[int, ...] | None = None
    breakpoints: tuple[float, ...] = ()

    def apply(self, x):
        if isinstance(self.domain, FiniteDomain):
            return self.table[x]
        return float(self.func(float(x)))

    def apply_array(self, xs: np.ndarray) -> np.ndarray:
        if isinstance(self.domain, FiniteDomain):
            return np.asarray(self.table, dtype=int)[np.asarray(xs, dtype=int)]
        xs = np.asarray(xs, dtype=float)
        return np.broadcast_to(np.asarray(self.func(xs), dtype=float), xs.shape).copy()


def _need_interval(kind, domain) -> IntervalDomain:
    if not isinstance(domain, IntervalDomain):
        raise ParameterError(f"{kind} map needs an interval domain")
    return domain


def make_self_map(kind: str, params: Sequence, domain: PointDomain) -> SelfMap:
    if kind == "finite-table":
        if not isinstance(domain, FiniteDomain):
            raise ParameterError("finite-table map needs a finite domain")
        table = tuple(int(p) for p in params)
        if len(table) != len(domain) or not all(0 <= i < len(domain) for i in table):
            raise ParameterError(f"finite-table needs {len(domain)} valid label indices, got {params}")
        return SelfMap(kind, domain, None, tuple(float(i) for i in table), table)

    if kind == "identity":
        _expect(kind, params, 0)
        if isinstance(domain, FiniteDomain):
            return SelfMap(kind, domain, None, (), tuple(range(len(domain))))
        return SelfMap(kind, domain, lambda x: x)

    params = tuple(float(p) for p in params)
    if kind == "constant":
        _expect(kind, params, 1)
        (c,) = params
        if isinstance(domain, FiniteDomain):
            if not (c.is_integer() and 0 <= c < len(domain)):
                raise ParameterError(f"constant map needs a label index, got {c}")
            return SelfMap(kind, domain, None, params, (int(c),) * len(domain))
        if not domain.contains(c):
            raise ParameterError(f"constant {c} outside {domain}")
        return SelfMap(kind, domain, lambda x: c + 0 * x, params)

    dom = _need_interval(kind, domain)
    lo, hi = dom.lower, dom.upper
    if kind == "affine":
        _expect(kind, params, 2)
        a, b = params
        if not a > 1:
            raise ParameterError(f"affine map needs a > 1, got {a}")
        # strict upper bound mirrors b + 1/a < 1 on [0, 1]
        if not (lo / a + b >= lo and hi / a + b < hi):
            raise ParameterError(
                f"affine image [{lo / a + b}, {hi / a + b}] must sit inside [{lo}, {hi}) "
                f"(on [0,1]: need b >= 0 and b + 1/a < 1)")
        return SelfMap(kind, dom, lambda x: x / a + b, params)
    if kind == "reciprocal":
        _expect(kind, params, 0)
        if not lo > -1 or not (lo <= 1 / (1 + hi) and 1 / (1 + lo) <= hi):
            raise ParameterError(f"1/(1+x) does not map [{lo}, {hi}] into itself")
        return SelfMap(kind, dom, lambda x: 1 / (1 + x), params)
    if kind == "two-piece":
        _expect(kind, params, 3)
        c1, c2, split = params
        if not lo < split <= hi:
            raise ParameterError(f"split {split} must lie in ({lo}, {hi}]")
        if not (dom.contains(c1) and dom.contains(c2)):
            raise ParameterError(f"piece values ({c1}, {c2}) must lie in [{lo}, {hi}]")
        return SelfMap(kind, dom, lambda x: np.where(x < split, c1, c2), params,
                       breakpoints=(split,))
    raise CatalogError(f"unknown self-map kind {kind!r}; known: {SELF_MAP_KINDS}")
