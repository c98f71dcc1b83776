"""Exact clique-width: special cases, twin and universal-vertex
reductions, the SAT ladder over k, and self-checking certificates."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from .derivation import (Derivation, InvariantError, check_models, make_strict,
                         validate_derivation)
from .encoder import ENCODINGS, REPRESENTATIVE, decode_model, encode
from .graph import (CANONICAL_MAX_N, Graph, canonical_form, connected_components, find_twins,
                    find_universal, is_connected, parse_graph6, to_graph6)
from .kexpr import (ExpressionError, Initial, Insert, KExpression, Relabel, Union,
                    check_well_formed, derivation_to_expr, evaluate, expr_to_derivation,
                    max_labels, parse_expr, print_expr, verify_expression)
from .solvers import ERROR, SAT, TIMEOUT, UNSAT, SolverConfig, SolverError, solve

CERT_FORMAT = "cliquewidth-certificate"
CERT_VERSION = 1
STRATEGIES = ("up", "down", "binary")
BOUND_ONLY = "bound-only"


@dataclass
class SearchOptions:
    encoding: str = REPRESENTATIVE
    strategy: str = "down"
    timeout: float | None = None
    parallel: int = 1
    reductions: bool = True
    solver: SolverConfig | None = None

    def __post_init__(self):
        if self.encoding not in ENCODINGS:
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.parallel < 1:
            raise ValueError("parallel width must be at least 1")

    def solver_config(self) -> SolverConfig:
        if self.solver is not None:
            return self.solver
        return SolverConfig.from_env(self.timeout)

    def to_dict(self) -> dict:
        return {"encoding": self.encoding, "strategy": self.strategy, "timeout": self.timeout,
                "parallel": self.parallel, "reductions": self.reductions,
                "solver": self.solver_config().describe()}


@dataclass
class Probe:
    k: int
    t: int
    verdict: str
    seconds: float
    solver: str
    tag: str = ""
    width: int | None = None
    variables: int = 0
    clauses: int = 0
    vertices: list[str] = field(default_factory=list)


@dataclass
class WidthDecision:
    verdict: str
    derivation: Derivation | None
    probe: Probe

    @property
    def bound_only(self) -> bool:
        return self.probe.tag == BOUND_ONLY


def decide_width_at_most(g: Graph, k: int, t: int | None = None, encoding: str = REPRESENTATIVE,
                         solver: SolverConfig | None = None) -> WidthDecision:
    """Solve F(g, k, t). UNSAT proves cwd > k only for t = n - k + 1; with a
    shorter t the verdict is tagged bound-only."""
    n = g.n
    if not 2 <= k <= n:
        raise ValueError(f"k must lie in 2..{n}, got {k}")
    full = n - k + 1
    if t is None:
        t = full
    cfg = solver or SolverConfig.from_env()
    inst = encode(g, k, t, encoding)
    res = solve(inst, cfg)
    probe = Probe(k, t, res.verdict, round(res.seconds, 4), res.solver or cfg.describe(),
                  variables=inst.num_vars, clauses=inst.num_clauses)
    if res.verdict == UNSAT and t < full:
        probe.tag = BOUND_ONLY
    if res.verdict == ERROR:
        raise SolverError(f"solver failed on k={k}: {res.stats.get('error', 'unknown error')}")
    if res.verdict != SAT:
        return WidthDecision(res.verdict, None, probe)
    d = decode_model(res.model, g, k, t)
    rep = validate_derivation(d).extend(check_models(d, g))
    if not rep.ok or d.width() > k:
        raise InvariantError(f"decoded derivation is invalid: {rep.summary()}")
    probe.width = d.width()
    return WidthDecision(SAT, d, probe)


# --------------------------------------------------------------------------
# reductions

@dataclass
class ReductionStep:
    kind: str  # false-twin, true-twin, universal, component-split
    vertex: str | None = None
    partner: str | None = None
    parts: list[list[str]] | None = None


@dataclass
class ReductionTrace:
    steps: list[ReductionStep] = field(default_factory=list)

    def to_list(self) -> list[dict]:
        return [{k: v for k, v in asdict(s).items() if v is not None} for s in self.steps]


def preprocess(g: Graph, names: list[str] | None = None) -> tuple[Graph, list[int], ReductionTrace]:
    """Remove twins and universal vertices until none is left or only two
    vertices remain. Returns the reduced graph, the original index of each
    kept vertex and the trace (in removal order)."""
    names = names or [str(v) for v in range(g.n)]
    kept = list(range(g.n))
    cur = g
    trace = ReductionTrace()
    while cur.n > 2:
        twins = find_twins(cur)
        if twins:
            u, v = twins[0]
            kind = "true-twin" if cur.adjacent(u, v) else "false-twin"
            trace.steps.append(ReductionStep(kind, names[kept[v]], names[kept[u]]))
            drop = v
        else:
            univ = find_universal(cur)
            if not univ:
                break
            drop = univ[0]
            trace.steps.append(ReductionStep("universal", names[kept[drop]]))
        rest = [x for x in range(cur.n) if x != drop]
        cur, _ = cur.induced(rest, name=g.name)
        kept = [kept[x] for x in rest]
    return cur, kept, trace


def _map_leaves(e: KExpression, fn) -> KExpression:
    if isinstance(e, Initial):
        return fn(e)
    if isinstance(e, Union):
        return Union(tuple(_map_leaves(c, fn) for c in e.children))
    if isinstance(e, Relabel):
        return Relabel(e.src, e.dst, _map_leaves(e.child, fn))
    return Insert(e.a, e.b, _map_leaves(e.child, fn))


def rename_vertices(e: KExpression, names: dict[str, str]) -> KExpression:
    return _map_leaves(e, lambda x: Initial(x.label, names.get(x.vertex, x.vertex)))


def lift_expression(e: KExpression, trace: ReductionTrace) -> KExpression:
    """Re-insert removed vertices, last removal first. Needs at most
    max(labels(e), 2) labels."""
    for step in reversed(trace.steps):
        v, u = step.vertex, step.partner
        if step.kind == "false-twin":
            e = _map_leaves(e, lambda x: Union((x, Initial(x.label, v))) if x.vertex == u else x)
        elif step.kind == "true-twin":
            def grow(x):
                if x.vertex != u:
                    return x
                a = x.label
                b = 2 if a == 1 else 1
                return Relabel(b, a, Insert(min(a, b), max(a, b),
                                            Union((Initial(a, u), Initial(b, v)))))
            e = _map_leaves(e, grow)
        elif step.kind == "universal":
            for lab in sorted(set(evaluate(e).label.values()) - {1}):
                e = Relabel(lab, 1, e)
            e = Insert(1, 2, Union((e, Initial(2, v))))
    return e


def trivial_expression(g: Graph, names: list[str]) -> KExpression:
    """One label per vertex; needs n labels."""
    e: KExpression = Initial(1, names[0]) if g.n == 1 else \
        Union(tuple(Initial(v + 1, names[v]) for v in range(g.n)))
    for u, v in g.sorted_edges():
        e = Insert(u + 1, v + 1, e)
    return e


# --------------------------------------------------------------------------
# ladder

def strategy_schedule(n: int, bounds: tuple[int, int], strategy: str, width: int = 1) -> list[int]:
    """Next values of k to probe given cwd in [lo, hi] (hi has a witness)."""
    lo, hi = bounds
    if lo >= hi:
        return []
    if strategy == "up":
        return list(range(lo, min(hi, lo + width)))
    if strategy == "down":
        return list(range(hi - 1, lo - 1, -1))[:width]
    if strategy == "binary":
        span = hi - lo
        ks = {lo + (span * (j + 1)) // (width + 1) for j in range(width)}
        return sorted(min(k, hi - 1) for k in ks)
    raise ValueError(f"unknown strategy {strategy!r}")


@dataclass
class _Outcome:
    lower: int
    upper: int
    expr: KExpression
    evidence: list[Probe] = field(default_factory=list)
    probes: list[Probe] = field(default_factory=list)
    steps: list[ReductionStep] = field(default_factory=list)
    inconclusive: bool = False


def _ladder(g: Graph, names: list[str], opts: SearchOptions) -> _Outcome:
    n = g.n
    lo, hi = 2, n
    expr = trivial_expression(g, names)
    out = _Outcome(lo, hi, expr)
    cfg = opts.solver_config()
    verdicts: dict[int, str] = {}
    relabel = {str(v): names[v] for v in range(n)}

    def run(k):
        return decide_width_at_most(g, k, encoding=opts.encoding, solver=cfg)

    while lo < hi:
        ks = strategy_schedule(n, (lo, hi), opts.strategy, opts.parallel)
        if opts.parallel > 1 and len(ks) > 1:
            with ThreadPoolExecutor(opts.parallel) as pool:
                results = list(pool.map(run, ks))
        else:
            results = [run(k) for k in ks]
        stop = False
        for k, res in sorted(zip(ks, results), key=lambda kr: kr[0]):
            res.probe.vertices = list(names)
            out.probes.append(res.probe)
            verdicts[k] = res.verdict
            if res.verdict == SAT:
                w = res.derivation.width()
                if w < lo:
                    raise InvariantError(f"k={w} derivation contradicts UNSAT below {lo}")
                if w < hi:
                    strict = make_strict(res.derivation, g)
                    e = rename_vertices(derivation_to_expr(strict, g), relabel)
                    hi, expr = w, e
            elif res.verdict == UNSAT:
                if k >= hi:
                    raise InvariantError(f"UNSAT at k={k} although width {hi} has a witness")
                if k + 1 > lo:
                    lo = k + 1
                    out.evidence = [res.probe]
            else:
                stop = True
        _check_monotone(verdicts)
        if stop:
            out.inconclusive = lo < hi
            break
    out.lower, out.upper, out.expr = lo, hi, expr
    return out


def _check_monotone(verdicts: dict[int, str]):
    seen_sat = None
    for k in sorted(verdicts):
        if verdicts[k] == SAT:
            seen_sat = k
        elif verdicts[k] == UNSAT and seen_sat is not None:
            raise InvariantError(f"ladder flips: SAT at k={seen_sat}, UNSAT at k={k}")


def _solve(g: Graph, names: list[str], opts: SearchOptions) -> _Outcome:
    if g.n == 1:
        return _Outcome(1, 1, Initial(1, names[0]))
    if g.m == 0:
        return _Outcome(1, 1, Union(tuple(Initial(1, x) for x in names)))
    if not is_connected(g):
        subs = []
        parts = []
        for h, idx in connected_components(g):
            sub_names = [names[i] for i in idx]
            parts.append(sub_names)
            subs.append(_solve(h, sub_names, opts))
        out = _Outcome(max(s.lower for s in subs), max(s.upper for s in subs),
                       Union(tuple(s.expr for s in subs)))
        out.steps.append(ReductionStep("component-split", parts=parts))
        for s in subs:
            out.probes += s.probes
            out.steps += s.steps
            out.inconclusive |= s.inconclusive
        top = [s for s in subs if s.lower == out.lower]
        out.evidence = top[0].evidence if top else []
        return out
    if opts.reductions:
        h, kept, trace = preprocess(g, names)
        if trace.steps:
            sub = _solve(h, [names[i] for i in kept], opts)
            out = _Outcome(max(sub.lower, 2), max(sub.upper, 2),
                           lift_expression(sub.expr, trace), sub.evidence, sub.probes,
                           trace.steps + sub.steps, sub.inconclusive)
            return out
    return _ladder(g, names, opts)


# --------------------------------------------------------------------------
# certificates

@dataclass
class Certificate:
    graph_name: str | None
    n: int
    m: int
    graph6: str
    canonical: str | None
    status: str  # exact or inconclusive
    cwd: int | None
    lower: int
    upper: int
    expression: str
    derivation: dict
    unsat_evidence: list[dict] = field(default_factory=list)
    probes: list[dict] = field(default_factory=list)
    reductions: list[dict] = field(default_factory=list)
    transcript: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.status == "exact"

    def to_dict(self) -> dict:
        return {"format": CERT_FORMAT, "version": CERT_VERSION, **asdict(self)}

    def to_json(self, indent: int | None = 1) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        if data.get("format") != CERT_FORMAT:
            raise ValueError("not a clique-width certificate")
        if data.get("version") != CERT_VERSION:
            raise ValueError(f"unsupported certificate version {data.get('version')}")
        fields = {k: v for k, v in data.items() if k not in ("format", "version")}
        return cls(**fields)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))

    def graph(self) -> Graph:
        return parse_graph6(self.graph6, name=self.graph_name)


@dataclass
class VerificationReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, bool(ok), detail))

    def transcript(self) -> dict[str, str]:
        return {name: ("ok" if ok else f"FAIL {detail}".strip()) for name, ok, detail in self.checks}

    def failures(self) -> list[str]:
        return [f"{name}: {detail}" for name, ok, detail in self.checks if not ok]


def _floor(g: Graph) -> int:
    return 2 if g.m else 1


def verify_certificate(cert: Certificate | dict, graph: Graph | None = None,
                       resolve: SolverConfig | None = None) -> VerificationReport:
    """Re-check a certificate from its serialized content only. With
    ``resolve`` set, the UNSAT evidence is recomputed with that solver."""
    if isinstance(cert, dict):
        cert = Certificate.from_dict(cert)
    rep = VerificationReport()
    g = cert.graph()
    if graph is not None:
        same = graph.n == g.n and graph.edges == g.edges
        rep.add("graph", same, "" if same else _graph_diff(graph, g))
        g = graph
    rep.add("size", g.n == cert.n and g.m == cert.m, f"n={g.n} m={g.m}")
    k = cert.upper
    try:
        e = parse_expr(cert.expression)
        check_well_formed(e, k)
        ok = verify_expression(e, g, k)
        rep.add("verify_expression", ok, "" if ok else _expr_diff(e, g, k))
    except ExpressionError as err:
        rep.add("verify_expression", False, str(err))
    try:
        d = Derivation.from_dict(cert.derivation)
        v = validate_derivation(d)
        rep.add("validate_derivation", v.ok, v.summary())
        mdl = check_models(d, g) if d.n == g.n else None
        rep.add("check_models", mdl is not None and mdl.ok,
                mdl.summary() if mdl is not None else "universe mismatch")
        rep.add("width", d.width() <= k, f"width {d.width()} vs bound {k}")
    except (ValueError, KeyError, TypeError) as err:
        rep.add("validate_derivation", False, str(err))
    consistent = cert.lower <= cert.upper and (
        (cert.exact and cert.cwd == cert.lower == cert.upper)
        or (not cert.exact and cert.cwd is None and cert.lower < cert.upper))
    rep.add("bounds", consistent, f"status={cert.status} [{cert.lower}, {cert.upper}] cwd={cert.cwd}")
    rep.add("lower-bound", _lower_ok(cert, g, resolve), f"lower {cert.lower}")
    return rep


def _lower_ok(cert: Certificate, g: Graph, resolve: SolverConfig | None) -> bool:
    if cert.lower <= _floor(g):
        return cert.lower >= 1 and (cert.lower == 1 or g.m > 0)
    for ev in cert.unsat_evidence:
        names = ev.get("vertices") or []
        k = ev["k"]
        if ev["verdict"] != UNSAT or ev.get("tag") or k != cert.lower - 1 or ev["t"] != len(names) - k + 1:
            continue
        if resolve is not None:
            ids = sorted(int(x) for x in names)
            h, _ = g.induced(ids)
            if decide_width_at_most(h, k, solver=resolve).verdict != UNSAT:
                continue
        return True
    return False


def _graph_diff(want: Graph, got: Graph) -> str:
    extra = sorted(tuple(sorted(e)) for e in got.edges - want.edges)
    missing = sorted(tuple(sorted(e)) for e in want.edges - got.edges)
    return f"certificate graph has extra edges {extra[:5]} and lacks {missing[:5]}"


def _expr_diff(e: KExpression, g: Graph, k: int) -> str:
    if max_labels(e) > k:
        return f"uses {max_labels(e)} labels, bound is {k}"
    h = evaluate(e).underlying()
    return _graph_diff(g, h) if h.n == g.n else f"expression has {h.n} vertices, graph {g.n}"


def clique_width(g: Graph, opts: SearchOptions | None = None) -> Certificate:
    """Exact clique-width with a certificate, or bounds when a solve times out."""
    opts = opts or SearchOptions()
    if g.n < 1:
        raise ValueError("clique-width needs at least one vertex")
    names = [str(v) for v in range(g.n)]
    out = _solve(g, names, opts)
    exact = out.lower == out.upper
    d = expr_to_derivation(out.expr)
    cert = Certificate(
        graph_name=g.name, n=g.n, m=g.m, graph6=to_graph6(g),
        canonical=canonical_form(g) if g.n <= CANONICAL_MAX_N else None,
        status="exact" if exact else "inconclusive", cwd=out.upper if exact else None,
        lower=out.lower, upper=out.upper, expression=print_expr(out.expr),
        derivation=d.to_dict(),
        unsat_evidence=[asdict(p) for p in out.evidence],
        probes=[asdict(p) for p in out.probes],
        reductions=ReductionTrace(out.steps).to_list(),
        options=opts.to_dict())
    rep = verify_certificate(Certificate.from_json(cert.to_json()), g)
    cert.transcript = rep.transcript()
    if not rep.ok:
        raise InvariantError("certificate failed verification: " + "; ".join(rep.failures()))
    return cert
