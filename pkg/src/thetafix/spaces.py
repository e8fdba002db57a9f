"""Point domains, B-actions and theta-metric spaces.

A theta-metric replaces ``+`` in the triangle inequality with a binary
operation ``theta`` on the nonnegative reals (a *B-action*)::

    d(x, y) <= theta(d(x, z), d(z, y))

Two domain shapes are supported: finite label sets with an explicit distance
table, and closed real intervals with the Euclidean distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

# Slack for non-strict comparisons ``a <= b``.
EPS_TOL = 1e-9
# Strict comparisons ``a < b`` are tested as ``a <= b - EPS_STRICT``.
EPS_STRICT = 1e-12

Point = Union[int, float]


class DomainError(ValueError):
    """A point or argument lies outside the set it must belong to."""


class ParameterError(ValueError):
    """Catalog parameters are invalid for the requested kind."""


class CatalogError(ValueError):
    """Unknown catalog kind."""


@dataclass(frozen=True)
class FiniteDomain:
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(lab) for lab in self.labels))
        if not self.labels:
            raise DomainError("finite domain needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise DomainError(f"duplicate labels in {self.labels}")

    kind = "finite"

    def __len__(self):
        return len(self.labels)

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and not isinstance(x, bool) and 0 <= x < len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"unknown label {label!r}") from None

    def label(self, x: int) -> str:
        return self.labels[x]

    def points(self) -> list[int]:
        return list(range(len(self.labels)))


@dataclass(frozen=True)
class IntervalDomain:
    lower: float
    upper: float

    kind = "interval"

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError("interval bounds must be finite")
        if not lo < hi:
            raise DomainError(f"interval needs lower < upper, got [{lo}, {hi}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def contains(self, x) -> bool:
        return (isinstance(x, (float, int, np.floating, np.integer))
                and not isinstance(x, bool)
                and self.lower <= x <= self.upper)

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.lower, self.upper, n)


PointDomain = Union[FiniteDomain, IntervalDomain]


@dataclass(frozen=True)
class BAction:
    """A symmetric binary operation on ``[0, inf)`` used in the triangle inequality.

    ``eval`` must work elementwise on numpy arrays as well as on floats; the
    axiom checks evaluate it on whole grids at once.
    """

    name: str
    eval: Callable = field(compare=False, repr=False)
    params: tuple[float, ...] = ()

    def __call__(self, s, t):
        return self.eval(s, t)


def theta_eval(action: BAction, s: float, t: float) -> float:
    if not (s >= 0 and t >= 0):
        raise DomainError(f"B-action arguments must be nonnegative, got ({s}, {t})")
    return float(action.eval(s, t))


@dataclass(frozen=True)
class ThetaMetricSpace:
    domain: PointDomain
    action: BAction
    table: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if isinstance(self.domain, FiniteDomain):
            if self.table is None:
                raise DomainError("finite domains need a distance table")
            table = tuple(tuple(float(v) for v in row) for row in self.table)
            n = len(self.domain)
            if len(table) != n or any(len(row) != n for row in table):
                raise DomainError(f"distance table must be {n}x{n}")
            for i in range(n):
                if table[i][i] != 0.0:
                    raise DomainError(f"nonzero diagonal at {self.domain.label(i)!r}")
                for j in range(i + 1, n):
                    if table[i][j] != table[j][i]:
                        raise DomainError(
                            f"asymmetric table at ({self.domain.label(i)!r}, {self.domain.label(j)!r})")
                    if not (table[i][j] > 0 and math.isfinite(table[i][j])):
                        raise DomainError(
                            f"distinct points need a finite positive distance, got {table[i][j]}")
            object.__setattr__(self, "table", table)
        elif self.table is not None:
            raise DomainError("interval domains use the closed-form Euclidean distance")

    @property
    def is_finite(self) -> bool:
        return isinstance(self.domain, FiniteDomain)

    def check_point(self, x) -> None:
        if not self.domain.contains(x):
            raise DomainError(f"point {x!r} is not in {self.domain}")

    def table_array(self) -> np.ndarray:
        return np.array(self.table, dtype=float)

    def pairwise(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Elementwise distances between two broadcastable arrays of points."""
        if self.is_finite:
            return self.table_array()[np.asarray(xs, dtype=int), np.asarray(ys, dtype=int)]
        return np.abs(np.asarray(xs, dtype=float) - np.asarray(ys, dtype=float))

    def format_point(self, x):
        return self.domain.label(x) if self.is_finite else float(x)


def distance(space: ThetaMetricSpace, x: Point, y: Point) -> float:
    space.check_point(x)
    space.check_point(y)
    if space.is_finite:
        return space.table[x][y]
    return abs(float(x) - float(y))


def finite_space(labels: Sequence[str], distances: dict, action: BAction) -> ThetaMetricSpace:
    """Build a finite space from ``{(label_a, label_b): d}`` entries.

    Each unordered pair must be given once; the table is mirrored.
    """
    domain = FiniteDomain(tuple(labels))
    n = len(domain)
    table = [[0.0] * n for _ in range(n)]
    seen = set()
    for (a, b), d in distances.items():
        i, j = domain.index(a), domain.index(b)
        if i == j:
            raise DomainError(f"self-distance for {a!r} is fixed at 0")
        key = frozenset((i, j))
        if key in seen:
            raise DomainError(f"pair ({a!r}, {b!r}) given twice")
        seen.add(key)
        table[i][j] = table[j][i] = float(d)
    missing = [(domain.label(i), domain.label(j))
               for i in range(n) for j in range(i + 1, n) if frozenset((i, j)) not in seen]
    if missing:
        raise DomainError(f"missing distances for pairs {missing}")
    return ThetaMetricSpace(domain, action, tuple(map(tuple, table)))
