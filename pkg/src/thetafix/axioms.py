"""Finite-sample checks of the B-action, theta-metric and simulation axioms.

Universally quantified axioms can only be refuted by sampling, so a passing
axiom is reported as ``holds-on-samples``; ``violated`` always comes with a
witness that reproduces the failure.

Margins are signed slacks: for a check ``a <= b`` the margin is ``b - a``.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import bisect

from .catalog import SimulationFunction
from .spaces import EPS_STRICT, EPS_TOL, BAction, ParameterError, ThetaMetricSpace

log = logging.getLogger(__name__)

HOLDS = "holds-on-samples"
VIOLATED = "violated"


@dataclass(frozen=True)
class SamplePlan:
    grid_step: float = 0.1
    grid_upper: float = 10.0
    n_random: int = 200
    seed: int = 42
    domain_points: int = 101

    def __post_init__(self):
        if not self.grid_step > 0 or not self.grid_upper > 0:
            raise ParameterError("grid step and upper bound must be positive")
        if self.n_random < 0:
            raise ParameterError("random sample count must be >= 0")
        if self.domain_points < 2:
            raise ParameterError("need at least 2 domain points")

    def grid(self) -> np.ndarray:
        n = int(round(self.grid_upper / self.grid_step))
        return np.linspace(0.0, n * self.grid_step, n + 1)

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    def random_values(self, stream: int = 0) -> np.ndarray:
        return self.rng(stream).uniform(0.0, self.grid_upper, self.n_random)


@dataclass(frozen=True)
class SequencePlan:
    """Families ``t_n = L(1 + a/n)``, ``s_n = L(1 + b/n)`` probing the limsup axiom."""

    limits: tuple[float, ...] = (0.1, 1.0, 10.0)
    coefficients: tuple[float, ...] = (-1.0, 0.0, 1.0)
    tail_start: int = 100
    tail_length: int = 1000

    def __post_init__(self):
        if not all(L > 0 for L in self.limits):
            raise ParameterError("sequence limits must be positive")
        if self.tail_start < 2 or self.tail_length < 1:
            raise ParameterError("tail_start must be >= 2 and tail_length >= 1")


@dataclass
class AxiomVerdict:
    axiom: str
    verdict: str
    worst_margin: float
    checked: int
    witness: dict | None = None
    binding: dict | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS


@dataclass
class AxiomReport:
    subject: str
    verdicts: list[AxiomVerdict] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v.holds for v in self.verdicts)

    def __getitem__(self, axiom: str) -> AxiomVerdict:
        for v in self.verdicts:
            if v.axiom == axiom:
                return v
        raise KeyError(axiom)

    def to_dict(self) -> dict:
        return asdict(self)


def _verdict(axiom, margins, violated_mask, describe, binding_mask=None) -> AxiomVerdict:
    """Reduce a flat margin array; witnesses are picked by canonical sample index.

    ``binding_mask`` restricts which samples may be reported as the binding
    (tightest) case; the worst margin is always taken over everything.
    """
    margins = np.asarray(margins, dtype=float).ravel()
    violated_mask = np.asarray(violated_mask, dtype=bool).ravel()
    if margins.size == 0:
        return AxiomVerdict(axiom, HOLDS, float("inf"), 0)
    k = int(np.argmin(margins))
    if binding_mask is not None and np.any(binding_mask):
        binding = describe(int(np.argmin(np.where(binding_mask, margins, np.inf))))
    else:
        binding = describe(k)
    if violated_mask.any():
        # worst violation, first in sample order on ties
        masked = np.where(violated_mask, margins, np.inf)
        w = int(np.argmin(masked))
        return AxiomVerdict(axiom, VIOLATED, float(margins[k]) + 0.0, int(margins.size), describe(w), binding)
    return AxiomVerdict(axiom, HOLDS, float(margins[k]) + 0.0, int(margins.size), binding=binding)


# --------------------------------------------------------------------------
# B-actions

def _b1(action: BAction, plan: SamplePlan) -> AxiomVerdict:
    zero = float(action.eval(0.0, 0.0))
    g = plan.grid()
    rv = plan.random_values(1)
    s = np.concatenate([np.repeat(g, g.size), rv[:-1]]) if rv.size > 1 else np.repeat(g, g.size)
    t = np.concatenate([np.tile(g, g.size), rv[1:]]) if rv.size > 1 else np.tile(g, g.size)
    asym = np.abs(np.asarray(action.eval(s, t), float) - np.asarray(action.eval(t, s), float))
    # slot 0 is the (0, 0) identity, the rest symmetry pairs
    margins = np.concatenate([[-abs(zero)], -asym])
    bad = np.concatenate([[zero != 0.0], asym > 0.0])
    s_all = np.concatenate([[0.0], s])
    t_all = np.concatenate([[0.0], t])

    def describe(k):
        a, b = float(s_all[k]), float(t_all[k])
        return {"s": a, "t": b, "theta_st": float(action.eval(a, b)),
                "theta_ts": float(action.eval(b, a))}

    return _verdict("B1", margins, bad, describe)


def _b2_quadruples(plan: SamplePlan):
    g = plan.grid()
    h = plan.grid_step
    S, T = np.meshgrid(g, g, indexing="ij")
    S, T = S.ravel(), T.ravel()
    quads = [
        (S, T, S + h, T),       # s < u, t = v
        (S, T, S, T + h),       # s = u, t < v
        (S, T, S + h, T + h),   # both strictly larger
    ]
    rng = plan.rng(2)
    n = max(plan.n_random, 1) * 10
    s, t = rng.uniform(0, plan.grid_upper, n), rng.uniform(0, plan.grid_upper, n)
    du, dv = rng.uniform(0, plan.grid_upper / 4, n), rng.uniform(0, plan.grid_upper / 4, n)
    # zero one increment in a third of the draws to exercise the weak-inequality branch
    which = rng.integers(0, 3, n)
    du = np.where(which == 1, 0.0, du)
    dv = np.where(which == 2, 0.0, dv)
    quads.append((s, t, s + du, t + dv))
    return [np.concatenate(c) for c in zip(*quads)]


def _b2(action: BAction, plan: SamplePlan, reading: str) -> AxiomVerdict:
    if reading == "monotone":
        # (s<u and t<=v) or (s<=u and t<v)  =>  theta(s,t) < theta(u,v)
        s, t, u, v = _b2_quadruples(plan)
        premise = ((s < u) & (t <= v)) | ((s <= u) & (t < v))
        s, t, u, v = s[premise], t[premise], u[premise], v[premise]
        margins = np.asarray(action.eval(u, v), float) - np.asarray(action.eval(s, t), float)
        bad = margins < EPS_STRICT
    elif reading == "as-stated":
        # theta(s,t) < theta(u,v)  =>  (s<u and t<=v) or (s<=u and t<v)
        rng = plan.rng(3)
        n = max(plan.n_random, 1) * 10
        s, t, u, v = (rng.uniform(0, plan.grid_upper, n) for _ in range(4))
        lhs, rhs = np.asarray(action.eval(s, t), float), np.asarray(action.eval(u, v), float)
        premise = lhs <= rhs - EPS_STRICT
        s, t, u, v = s[premise], t[premise], u[premise], v[premise]
        concl = ((s < u) & (t <= v)) | ((s <= u) & (t < v))
        # margin: how far the pair is from componentwise order
        margins = np.minimum(u - s, v - t)
        margins = np.where(concl, np.abs(margins), -np.abs(margins))
        bad = ~concl
    else:
        raise ParameterError(f"unknown B2 reading {reading!r}")

    def describe(k):
        q = dict(s=float(s[k]), t=float(t[k]), u=float(u[k]), v=float(v[k]))
        q["theta_st"] = float(action.eval(q["s"], q["t"]))
        q["theta_uv"] = float(action.eval(q["u"], q["v"]))
        return q

    return _verdict("B2", margins, bad, describe)


def _find_partner(action: BAction, r: float, s: float, scan: int = 101):
    """Smallest bracketed ``t`` in ``[0, r]`` with ``theta(t, s) == r``.

    Returns ``(t, residual)``; ``t`` is None when no sign change is found.
    """
    ts = np.linspace(0.0, r, scan)
    f = np.asarray(action.eval(ts, np.full_like(ts, s)), float) - r
    hit = np.flatnonzero(np.abs(f) <= EPS_TOL)
    change = np.flatnonzero(np.signbit(f[:-1]) != np.signbit(f[1:]))
    first_hit = hit[0] if hit.size else scan
    first_change = change[0] if change.size else scan
    if first_hit == scan and first_change == scan:
        return None, float(np.min(np.abs(f)))
    if first_hit <= first_change:
        t = float(ts[first_hit])
    else:
        i = first_change
        t = bisect(lambda x: float(action.eval(x, s)) - r, ts[i], ts[i + 1], xtol=EPS_TOL)
    return t, abs(float(action.eval(t, s)) - r)


def _b3(action: BAction, plan: SamplePlan) -> AxiomVerdict:
    g = plan.grid()
    coarse = g[:: max(1, g.size // 10)]
    rs = {float(action.eval(a, b)) for a in coarse for b in coarse}
    rv = plan.random_values(4)[:20]
    rs.update(float(action.eval(a, b)) for a, b in zip(rv[:-1], rv[1:]))
    rs = sorted(r for r in rs if r > 0)
    rows = []
    for r in rs:
        for s in np.linspace(0.0, r, 11):
            t, resid = _find_partner(action, r, float(s))
            rows.append((r, float(s), t, resid))
    margins = np.array([-row[3] for row in rows])
    bad = np.array([row[2] is None for row in rows], dtype=bool)

    def describe(k):
        r, s, t, resid = rows[k]
        return {"r": r, "s": s, "t": t, "residual": resid}

    return _verdict("B3", margins, bad, describe)


def _b4(action: BAction, plan: SamplePlan) -> AxiomVerdict:
    s = np.concatenate([plan.grid()[1:], plan.random_values(5)])
    s = s[s > 0]
    margins = s - np.asarray(action.eval(s, np.zeros_like(s)), float)

    def describe(k):
        return {"s": float(s[k]), "theta_s0": float(action.eval(float(s[k]), 0.0))}

    return _verdict("B4", margins, margins < -EPS_TOL, describe)


def check_b_action(action: BAction, plan: SamplePlan | None = None, b2_reading: str = "monotone") -> AxiomReport:
    """Check B1-B4 for ``action`` on the plan's samples.

    B2 is read as strict monotonicity by default: componentwise-larger
    arguments give a strictly larger value. ``b2_reading="as-stated"`` checks
    the converse implication instead, which ordinary addition already fails.
    B3 scans ``t`` for a sign change of ``theta(t, s) - r`` and bisects.
    """
    plan = plan or SamplePlan()
    report = AxiomReport(f"b-action:{action.name}")
    report.verdicts = [_b1(action, plan), _b2(action, plan, b2_reading), _b3(action, plan), _b4(action, plan)]
    return report


# --------------------------------------------------------------------------
# theta-metric spaces

def _space_samples(space: ThetaMetricSpace, plan: SamplePlan):
    """Points for pair checks and an (x, y, z) triple array for theta3."""
    if space.is_finite:
        pts = np.arange(len(space.domain))
        X, Y, Z = np.meshgrid(pts, pts, pts, indexing="ij")
        return pts, (X.ravel(), Y.ravel(), Z.ravel())
    grid = space.domain.grid(plan.domain_points)
    rnd = plan.rng(6).uniform(space.domain.lower, space.domain.upper, plan.n_random)
    X, Y, Z = np.meshgrid(grid, grid, grid, indexing="ij")
    trip = [X.ravel(), Y.ravel(), Z.ravel()]
    if rnd.size >= 3:
        trip = [np.concatenate([trip[0], rnd[:-2]]),
                np.concatenate([trip[1], rnd[1:-1]]),
                np.concatenate([trip[2], rnd[2:]])]
    return np.concatenate([grid, rnd]), tuple(trip)


def check_theta_metric(space: ThetaMetricSpace, plan: SamplePlan | None = None) -> AxiomReport:
    """theta1-theta3 on all pairs/triples (finite) or a grid plus random samples (interval).

    Finite domains ignore the plan and enumerate every triple.
    """
    plan = plan or SamplePlan()
    pts, (tx, ty, tz) = _space_samples(space, plan)
    fmt = space.format_point
    report = AxiomReport(f"theta-metric:{space.action.name}")

    P, Q = np.meshgrid(pts, pts, indexing="ij")
    P, Q = P.ravel(), Q.ravel()
    d = space.pairwise(P, Q)
    same = P == Q
    # theta1: d == 0 on the diagonal, d > 0 off it
    m1 = np.where(same, -np.abs(d), d)
    bad1 = np.where(same, d != 0.0, d <= 0.0)
    report.verdicts.append(_verdict(
        "theta1", m1, bad1,
        lambda k: {"x": fmt(P[k]), "y": fmt(Q[k]), "d": float(d[k])}))

    asym = np.abs(d - space.pairwise(Q, P))
    report.verdicts.append(_verdict(
        "theta2", -asym, asym > 0.0,
        lambda k: {"x": fmt(P[k]), "y": fmt(Q[k]), "d_xy": float(space.pairwise(P[k], Q[k])),
                   "d_yx": float(space.pairwise(Q[k], P[k]))}))

    dxy = space.pairwise(tx, ty)
    bound = np.asarray(space.action.eval(space.pairwise(tx, tz), space.pairwise(tz, ty)), float)
    m3 = bound - dxy

    def describe3(k):
        return {"x": fmt(tx[k]), "y": fmt(ty[k]), "z": fmt(tz[k]),
                "d_xy": float(dxy[k]), "bound": float(bound[k]), "margin": float(m3[k])}

    # triples with z equal to x or y are checked but never reported as binding
    proper = (tx != ty) & (tz != tx) & (tz != ty)
    report.verdicts.append(_verdict("theta3", m3, m3 < -EPS_TOL, describe3, proper))
    return report


# --------------------------------------------------------------------------
# simulation functions

def zeta3_tail_max(zeta: SimulationFunction, L: float, alpha: float, beta: float,
                   start: int, stop: int) -> float:
    """``max zeta(t_n, s_n)`` for ``start <= n <= stop``."""
    n = np.arange(start, stop + 1, dtype=float)
    return float(np.max(np.asarray(zeta.eval(L * (1 + alpha / n), L * (1 + beta / n)), float)))


def check_simulation(zeta: SimulationFunction, plan: SamplePlan | None = None,
                     seq_plan: SequencePlan | None = None) -> AxiomReport:
    plan = plan or SamplePlan()
    seq_plan = seq_plan or SequencePlan()
    report = AxiomReport(f"simulation:{zeta.name}" + (f"/{zeta.aux}" if zeta.aux else ""))

    z00 = float(zeta.eval(0.0, 0.0))
    report.verdicts.append(_verdict(
        "zeta1", [-abs(z00)], [z00 != 0.0],
        lambda k: {"t": 0.0, "s": 0.0, "zeta": z00}))

    g = plan.grid()[1:]
    T, S = np.meshgrid(g, g, indexing="ij")
    rv = plan.random_values(7)
    rv = rv[rv > 0]
    t = np.concatenate([T.ravel(), rv[:-1]]) if rv.size > 1 else T.ravel()
    s = np.concatenate([S.ravel(), rv[1:]]) if rv.size > 1 else S.ravel()
    z = np.asarray(zeta.eval(t, s), float)
    m2 = (s - t) - z
    report.verdicts.append(_verdict(
        "zeta2", m2, m2 < EPS_STRICT,
        lambda k: {"t": float(t[k]), "s": float(s[k]), "zeta": float(z[k]), "s_minus_t": float(s[k] - t[k])}))

    rows = []
    nonmono = []
    N = seq_plan.tail_start
    stop = N + seq_plan.tail_length
    for L in seq_plan.limits:
        for a in seq_plan.coefficients:
            for b in seq_plan.coefficients:
                tail = zeta3_tail_max(zeta, L, a, b, N, stop)
                later = zeta3_tail_max(zeta, L, a, b, (N + stop) // 2, stop)
                if later > tail:
                    nonmono.append((L, a, b))
                rows.append((L, a, b, tail))
    m3 = np.array([-row[3] for row in rows])
    report.verdicts.append(_verdict(
        "zeta3", m3, m3 < EPS_STRICT,
        lambda k: {"limit": rows[k][0], "alpha": rows[k][1], "beta": rows[k][2],
                   "tail_start": N, "tail_stop": stop, "tail_max": rows[k][3]}))
    if nonmono:
        # a property of the sequence family, not of zeta
        report.flags.append(f"zeta3 tail maximum increased with tail start for {len(nonmono)} families")
        log.info("zeta3 tail maxima non-monotone for %s", nonmono)
    return report
