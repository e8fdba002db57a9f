"""Config-file experiments: parse, run, and serialize reports.

A config is an INI-style document with the sections ``[space]``,
``[distances]`` (finite domains only), ``[map]``, ``[zeta]``, ``[run]`` and
``[plan]``; see ``docs/config.md`` for the grammar. Unknown sections and keys
are rejected.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import re
import time
from dataclasses import asdict, dataclass, field, fields, replace

from . import __version__
from .axioms import SamplePlan, check_b_action, check_simulation, check_theta_metric
from .catalog import SelfMap, SimulationFunction, make_b_action, make_self_map, make_simulation
from .contraction import contractivity_check, modified_z_margin, z_margin
from .picard import (DEFAULT_MAX_ITER, DEFAULT_TOL, FixedPointResult, asymptotic_regularity,
                     cauchy_diagnostic, picard_iterate, uniqueness_probe)
from .spaces import (FiniteDomain, IntervalDomain, ThetaMetricSpace, finite_space)

SCHEMA_VERSION = 1
MODES = ("verify-axioms", "certify-z", "certify-modified-z", "solve", "full")
CONTRACTIONS = ("standard", "modified")

_KEYS = {
    "space": {"domain", "lower", "upper", "distance", "labels", "action", "action_params"},
    "distances": None,  # free-form "label label = value"
    "map": {"kind", "params"},
    "zeta": {"kind", "params", "aux"},
    "run": {"mode", "contraction", "starts", "tol", "max_iter"},
    "plan": {"grid_step", "grid_upper", "random_samples", "seed", "domain_points"},
}
_REQUIRED = {"space"}


class ConfigError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


@dataclass(frozen=True)
class SpaceSpec:
    domain: str
    action: str
    action_params: tuple[float, ...] = ()
    lower: float | None = None
    upper: float | None = None
    distance: str | None = None
    labels: tuple[str, ...] = ()
    distances: tuple[tuple[str, str, float], ...] = ()

    def build(self) -> ThetaMetricSpace:
        action = make_b_action(self.action, self.action_params)
        if self.domain == "finite":
            return finite_space(self.labels, {(a, b): d for a, b, d in self.distances}, action)
        return ThetaMetricSpace(IntervalDomain(self.lower, self.upper), action)


@dataclass(frozen=True)
class MapSpec:
    kind: str
    # label strings on finite domains, floats otherwise
    params: tuple = ()

    def build(self, space: ThetaMetricSpace) -> SelfMap:
        params = self.params
        if isinstance(space.domain, FiniteDomain):
            params = tuple(space.domain.index(p) for p in params)
        return make_self_map(self.kind, params, space.domain)


@dataclass(frozen=True)
class ZetaSpec:
    kind: str
    params: tuple[float, ...] = ()
    aux: str | None = None

    def build(self) -> SimulationFunction:
        return make_simulation(self.kind, self.params, self.aux)


@dataclass(frozen=True)
class Experiment:
    space: SpaceSpec
    map: MapSpec | None = None
    zeta: ZetaSpec | None = None
    mode: str = "full"
    contraction: str = "standard"
    starts: tuple = ()
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    plan: SamplePlan = field(default_factory=SamplePlan)

    def resolve(self):
        """Build ``(space, map, zeta, start_points)`` from the catalogs."""
        space = self.space.build()
        smap = self.map.build(space) if self.map else None
        zeta = self.zeta.build() if self.zeta else None
        if space.is_finite:
            starts = [space.domain.index(s) for s in self.starts] or space.domain.points()
        else:
            starts = [float(s) for s in self.starts] or [
                space.domain.lower, (space.domain.lower + space.domain.upper) / 2, space.domain.upper]
        for x in starts:
            space.check_point(x)
        return space, smap, zeta, starts

    def with_overrides(self, seed: int | None = None, tol: float | None = None,
                       max_iter: int | None = None, mode: str | None = None) -> "Experiment":
        exp = self
        if seed is not None:
            exp = replace(exp, plan=replace(exp.plan, seed=seed))
        if tol is not None:
            exp = replace(exp, tol=tol)
        if max_iter is not None:
            exp = replace(exp, max_iter=max_iter)
        if mode is not None:
            exp = replace(exp, mode=mode)
        return exp


# --------------------------------------------------------------------------
# parsing

def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return i
            continue
        if current == section and key is not None and re.split(r"\s*[=:]", line, maxsplit=1)[0].strip() == key:
            return i
    return None


def _split(value: str) -> list[str]:
    return [tok for tok in re.split(r"[,\s]+", value.strip()) if tok]


def parse_experiment(text: str) -> Experiment:
    """Parse and fully resolve a config document; raises :class:`ConfigError`."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("expected a [section] header", e.lineno) from e
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as e:
        raise ConfigError(e.message.split(": ", 1)[-1], e.lineno) from e
    except configparser.ParsingError as e:
        lineno, line = e.errors[0]
        raise ConfigError(f"cannot parse {line.strip()!r}", lineno) from e

    for sec in cp.sections():
        if sec not in _KEYS:
            raise ConfigError(f"unknown section [{sec}]", _line_of(text, sec))
        allowed = _KEYS[sec]
        for key in cp[sec]:
            if allowed is not None and key not in allowed:
                raise ConfigError(f"unknown key {key!r} in [{sec}]", _line_of(text, sec, key))
    for sec in _REQUIRED:
        if sec not in cp:
            raise ConfigError(f"missing section [{sec}]")

    def get(sec, key, conv=str, default=None, required=False):
        if sec not in cp or key not in cp[sec]:
            if required:
                raise ConfigError(f"missing key {key!r} in [{sec}]", _line_of(text, sec))
            return default
        raw = cp[sec][key]
        try:
            return conv(raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"bad value for {key!r}: {raw!r} ({e})", _line_of(text, sec, key)) from e

    floats = lambda v: tuple(float(t) for t in _split(v))  # noqa: E731

    domain = get("space", "domain", required=True)
    space_kw = dict(domain=domain, action=get("space", "action", required=True),
                    action_params=get("space", "action_params", floats, ()))
    if domain == "interval":
        space_kw.update(lower=get("space", "lower", float, required=True),
                        upper=get("space", "upper", float, required=True),
                        distance=get("space", "distance", default="euclidean"))
        if space_kw["distance"] != "euclidean":
            raise ConfigError(f"unknown distance {space_kw['distance']!r} (only 'euclidean')",
                              _line_of(text, "space", "distance"))
        for key in ("labels",):
            if key in cp["space"]:
                raise ConfigError(f"{key!r} is only valid for finite domains", _line_of(text, "space", key))
        if "distances" in cp:
            raise ConfigError("[distances] is only valid for finite domains", _line_of(text, "distances"))
    elif domain == "finite":
        for key in ("lower", "upper", "distance"):
            if key in cp["space"]:
                raise ConfigError(f"{key!r} is only valid for interval domains", _line_of(text, "space", key))
        entries = []
        for key, raw in (cp["distances"].items() if "distances" in cp else []):
            pair = key.split()
            if len(pair) != 2:
                raise ConfigError(f"distance keys are two labels, got {key!r}", _line_of(text, "distances", key))
            try:
                entries.append((pair[0], pair[1], float(raw)))
            except ValueError as e:
                raise ConfigError(f"bad distance {raw!r}", _line_of(text, "distances", key)) from e
        space_kw.update(labels=tuple(get("space", "labels", _split, required=True)), distances=tuple(entries))
    else:
        raise ConfigError(f"domain must be 'interval' or 'finite', got {domain!r}",
                          _line_of(text, "space", "domain"))
    space = SpaceSpec(**space_kw)
    finite = domain == "finite"
    point_conv = (lambda v: tuple(_split(v))) if finite else floats

    smap = None
    if "map" in cp:
        smap = MapSpec(get("map", "kind", required=True), get("map", "params", point_conv, ()))
    zeta = None
    if "zeta" in cp:
        zeta = ZetaSpec(get("zeta", "kind", required=True), get("zeta", "params", floats, ()),
                        get("zeta", "aux"))

    mode = get("run", "mode", default="full")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}", _line_of(text, "run", "mode"))
    contraction = get("run", "contraction", default="standard")
    if contraction not in CONTRACTIONS:
        raise ConfigError(f"contraction must be one of {CONTRACTIONS}", _line_of(text, "run", "contraction"))

    plan_kw = {}
    for key, attr, conv in (("grid_step", "grid_step", float), ("grid_upper", "grid_upper", float),
                            ("random_samples", "n_random", int), ("seed", "seed", int),
                            ("domain_points", "domain_points", int)):
        v = get("plan", key, conv)
        if v is not None:
            plan_kw[attr] = v
    try:
        plan = SamplePlan(**plan_kw)
    except ValueError as e:
        raise ConfigError(str(e), _line_of(text, "plan")) from e

    exp = Experiment(space=space, map=smap, zeta=zeta, mode=mode, contraction=contraction,
                     starts=get("run", "starts", point_conv, ()),
                     tol=get("run", "tol", float, DEFAULT_TOL),
                     max_iter=get("run", "max_iter", int, DEFAULT_MAX_ITER), plan=plan)
    _validate(exp, text)
    return exp


def _validate(exp: Experiment, text: str) -> None:
    """Resolve every catalog reference so bad kinds and parameters fail at parse time."""
    def fail(e, section, key=None):
        raise ConfigError(str(e), _line_of(text, section, key) or _line_of(text, section)) from e

    try:
        space = exp.space.build()
    except ValueError as e:
        fail(e, "distances" if exp.space.domain == "finite" else "space")
    if exp.map is not None:
        try:
            exp.map.build(space)
        except ValueError as e:
            fail(e, "map", "params")
    if exp.zeta is not None:
        try:
            exp.zeta.build()
        except ValueError as e:
            fail(e, "zeta", "kind")
    try:
        exp.resolve()
    except ValueError as e:
        fail(e, "run", "starts")
    if not exp.tol > 0:
        raise ConfigError("tol must be positive", _line_of(text, "run", "tol"))
    if exp.max_iter < 1:
        raise ConfigError("max_iter must be >= 1", _line_of(text, "run", "max_iter"))
    needs_map = exp.mode != "verify-axioms"
    if needs_map and exp.map is None:
        raise ConfigError(f"mode {exp.mode!r} needs a [map] section")
    needs_zeta = exp.mode in ("certify-z", "certify-modified-z", "full")
    if needs_zeta and exp.zeta is None:
        raise ConfigError(f"mode {exp.mode!r} needs a [zeta] section")


def _num(v) -> str:
    return repr(float(v))


def experiment_to_text(exp: Experiment) -> str:
    """Canonical config text; ``parse_experiment`` of the result equals ``exp``."""
    sp = exp.space
    out = ["[space]", f"domain = {sp.domain}"]
    if sp.domain == "interval":
        out += [f"lower = {_num(sp.lower)}", f"upper = {_num(sp.upper)}", f"distance = {sp.distance}"]
    else:
        out.append("labels = " + " ".join(sp.labels))
    out.append(f"action = {sp.action}")
    if sp.action_params:
        out.append("action_params = " + ", ".join(map(_num, sp.action_params)))
    if sp.domain == "finite":
        out += ["", "[distances]"] + [f"{a} {b} = {_num(d)}" for a, b, d in sp.distances]
    pt = (lambda v: str(v)) if sp.domain == "finite" else _num
    if exp.map:
        out += ["", "[map]", f"kind = {exp.map.kind}"]
        if exp.map.params:
            out.append("params = " + ", ".join(map(pt, exp.map.params)))
    if exp.zeta:
        out += ["", "[zeta]", f"kind = {exp.zeta.kind}"]
        if exp.zeta.params:
            out.append("params = " + ", ".join(map(_num, exp.zeta.params)))
        if exp.zeta.aux:
            out.append(f"aux = {exp.zeta.aux}")
    out += ["", "[run]", f"mode = {exp.mode}", f"contraction = {exp.contraction}"]
    if exp.starts:
        out.append("starts = " + ", ".join(map(pt, exp.starts)))
    out += [f"tol = {_num(exp.tol)}", f"max_iter = {exp.max_iter}"]
    p = exp.plan
    out += ["", "[plan]", f"grid_step = {_num(p.grid_step)}", f"grid_upper = {_num(p.grid_upper)}",
            f"random_samples = {p.n_random}", f"seed = {p.seed}", f"domain_points = {p.domain_points}"]
    return "\n".join(out) + "\n"


def load_experiment(path) -> Experiment:
    with open(path, encoding="utf-8") as fh:
        return parse_experiment(fh.read())


# --------------------------------------------------------------------------
# running

@dataclass
class RunReport:
    experiment: dict
    config: str
    axioms: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)
    fixed_points: list = field(default_factory=list)
    uniqueness: dict | None = None
    ok: bool = True
    wall_time: float = 0.0
    version: str = __version__
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown report fields {sorted(unknown)}")
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')!r}")
        return cls(**d)


def _fixed_point_dict(space, res: FixedPointResult, tol: float) -> dict:
    fmt = space.format_point
    entry = {
        "start": fmt(res.trace.x0),
        "status": res.status,
        "z": fmt(res.z),
        "residual": res.residual,
        "iterations": res.iterations,
        "iterates": [fmt(x) for x in res.trace.iterates],
        "steps": list(res.trace.steps),
        "cauchy": cauchy_diagnostic(res.trace, space),
        "regularity": None,
    }
    if len(res.trace) >= 2:
        entry["regularity"] = asdict(asymptotic_regularity(res.trace, tol))
    return entry


def run_experiment(exp: Experiment) -> RunReport:
    t0 = time.perf_counter()
    space, smap, zeta, starts = exp.resolve()
    report = RunReport(experiment=_experiment_dict(exp), config=experiment_to_text(exp))
    verdicts = []
    mode = exp.mode

    if mode in ("verify-axioms", "full"):
        report.axioms["b_action"] = check_b_action(space.action, exp.plan).to_dict()
        report.axioms["theta_metric"] = check_theta_metric(space, exp.plan).to_dict()
        if zeta is not None:
            report.axioms["simulation"] = check_simulation(zeta, exp.plan).to_dict()
        verdicts += [all(v["verdict"] == "holds-on-samples" for v in r["verdicts"])
                     for r in report.axioms.values()]

    standard = mode == "certify-z" or (mode == "full" and exp.contraction == "standard")
    modified = mode == "certify-modified-z" or (mode == "full" and exp.contraction == "modified")
    if standard:
        report.margins["z_margin"] = z_margin(space, smap, zeta, exp.plan).to_dict()
        report.margins["contractivity"] = contractivity_check(space, smap, exp.plan).to_dict()
    if modified:
        report.margins["modified_z_margin"] = modified_z_margin(space, smap, zeta, exp.plan).to_dict()
    verdicts += [m["verdict"] == "nonnegative-on-samples" for m in report.margins.values()]

    if mode in ("solve", "full"):
        for x0 in starts:
            res = picard_iterate(space, smap, x0, exp.tol, exp.max_iter)
            report.fixed_points.append(_fixed_point_dict(space, res, exp.tol))
            verdicts.append(res.converged)
        if len(starts) >= 2:
            u = uniqueness_probe(space, smap, starts, exp.tol, exp.max_iter)
            d = asdict(u)
            d["limits"] = [space.format_point(x) for x in u.limits]
            report.uniqueness = d
            verdicts.append(u.unique)

    report.ok = all(verdicts)
    report.wall_time = time.perf_counter() - t0
    return report


def _experiment_dict(exp: Experiment) -> dict:
    d = asdict(exp)
    # json has no tuples; lists keep the echo comparable after a round trip
    return json.loads(json.dumps(d))


# --------------------------------------------------------------------------
# output

def emit_report(report: RunReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "human":
        return _human(report)
    raise ValueError(f"unknown format {fmt!r}")


def _human(report: RunReport) -> str:
    exp = report.experiment
    lines = [f"thetafix {report.version}  mode={exp['mode']}  "
             f"space={exp['space']['domain']}/{exp['space']['action']}",
             ""]
    for name, rep in report.axioms.items():
        lines.append(f"[{name}] {rep['subject']}")
        for v in rep["verdicts"]:
            lines.append(f"  {v['axiom']:<7} {v['verdict']:<17} worst margin {v['worst_margin']:.6g}")
            if v["witness"]:
                lines.append(f"          witness {v['witness']}")
        for flag in rep["flags"]:
            lines.append(f"  note: {flag}")
    for name, m in report.margins.items():
        lines.append(f"[{name}] {m['verdict']}  min {m['min_margin']:.6g} at {tuple(m['argmin_pair'])}"
                     f"  over {m['pair_count']} pairs" + ("  (clamped)" if m["clamped"] else ""))
    for fp in report.fixed_points:
        lines.append(f"[picard] start {fp['start']}: {fp['status']} z={fp['z']} "
                     f"residual={fp['residual']:.3g} iterations={fp['iterations']}")
        if fp["regularity"]:
            r = fp["regularity"]
            lines.append(f"         monotone={r['monotone']} regular={r['regular']} final step={r['final_step']:.3g}")
    if report.uniqueness:
        u = report.uniqueness
        lines.append(f"[uniqueness] unique={u['unique']} spread={u['max_pairwise_distance']:.3g}")
    lines += ["", f"overall: {'PASS' if report.ok else 'FAIL'}  ({report.wall_time:.3f}s)"]
    return "\n".join(lines) + "\n"


def emit_trace_csv(result: FixedPointResult, space: ThetaMetricSpace) -> str:
    """One row per Picard step: ``n, x_n, d_n`` with ``d_n = d(x_n, x_{n+1})``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "x_n", "d_n"])
    for n, d in enumerate(result.trace.steps):
        x = result.trace.iterates[n]
        w.writerow([n, space.format_point(x) if space.is_finite else repr(float(x)), repr(float(d))])
    return buf.getvalue()
