"""CNF encodings of "G has a k-derivation of length t".

Variables are numbered by closed-form index functions so an instance can
be decoded, audited or regenerated without a lookup table. Per layer i
(0..t) there are P = n(n-1)/2 component variables and P group variables,
followed by the width variables of the chosen encoding; both width
encodings use n*k variables per layer, for n(n+k-1)(t+1) in total.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .derivation import Derivation, InvariantError, Partition, Template
from .graph import Graph

DIRECT = "direct"
REPRESENTATIVE = "representative"
ENCODINGS = (REPRESENTATIVE, DIRECT)
_SHORT = {DIRECT: "direct", REPRESENTATIVE: "rep"}


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class VarMap:
    n: int
    t: int
    k: int = 0
    encoding: str | None = None

    @property
    def pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    def pair(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        return u * self.n - u * (u + 1) // 2 + (v - u - 1)

    def c(self, u: int, v: int, i: int) -> int:
        return 1 + i * self.pairs + self.pair(u, v)

    def g(self, u: int, v: int, i: int) -> int:
        return 1 + (self.t + 1) * self.pairs + i * self.pairs + self.pair(u, v)

    @property
    def base(self) -> int:
        return 2 * (self.t + 1) * self.pairs

    def r(self, v: int, i: int) -> int:
        return 1 + self.base + i * self.n + v

    def o(self, v: int, a: int, i: int) -> int:
        """Order variable: true means the group number of v in layer i exceeds a."""
        k1 = self.k - 1
        return 1 + self.base + (self.t + 1) * self.n + i * self.n * k1 + v * k1 + (a - 1)

    def l(self, v: int, a: int, i: int) -> int:
        return 1 + self.base + i * self.n * self.k + v * self.k + (a - 1)

    @property
    def total(self) -> int:
        if self.encoding is None:
            return self.base
        return self.base + (self.t + 1) * self.n * self.k

    def describe(self, var: int) -> str:
        """Human-readable name of a variable, for audits."""
        x = var - 1
        P = self.pairs
        if x < self.base:
            fam, rest = ("c", x) if x < (self.t + 1) * P else ("g", x - (self.t + 1) * P)
            i, p = divmod(rest, P)
            u, v = next((u, v) for u, v in itertools.combinations(range(self.n), 2)
                        if self.pair(u, v) == p)
            return f"{fam}[{u},{v},{i}]"
        x -= self.base
        if self.encoding == DIRECT:
            i, rest = divmod(x, self.n * self.k)
            v, a = divmod(rest, self.k)
            return f"l[{v},{a + 1},{i}]"
        if x < (self.t + 1) * self.n:
            i, v = divmod(x, self.n)
            return f"r[{v},{i}]"
        x -= (self.t + 1) * self.n
        i, rest = divmod(x, self.n * (self.k - 1))
        v, a = divmod(rest, self.k - 1)
        return f"o[{v},{a + 1},{i}]"


def expected_variables(n: int, k: int, t: int | None = None) -> int:
    if t is None:
        t = n - k + 1
    return n * (n + k - 1) * (t + 1)


@dataclass
class CnfInstance:
    varmap: VarMap
    clauses: list[tuple[int, ...]] = field(default_factory=list)
    families: list[tuple[str, int, int]] = field(default_factory=list)
    graph_name: str | None = None

    @property
    def num_vars(self) -> int:
        return self.varmap.total

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for name, lo, hi in self.families:
            out[name] = out.get(name, 0) + hi - lo
        return out

    def _family(self, name: str, clauses: Iterable[Sequence[int]]):
        lo = len(self.clauses)
        top = self.varmap.total
        for cl in clauses:
            cl = tuple(cl)
            if not cl:
                raise InvariantError(f"empty clause in family {name}")
            if len(set(cl)) != len(cl) or any(-x in cl for x in cl):
                raise InvariantError(f"clause {cl} in {name} repeats a variable")
            if any(abs(x) > top for x in cl):
                raise InvariantError(f"clause {cl} in {name} uses an unmapped variable")
            self.clauses.append(cl)
        self.families.append((name, lo, len(self.clauses)))


def _base_clauses(g: Graph, vm: VarMap):
    n, t = g.n, vm.t
    c, gv = vm.c, vm.g
    pairs = list(itertools.combinations(range(n), 2))

    def d_block():
        for u, v in pairs:
            yield (-c(u, v, 0),)
            yield (c(u, v, t),)
            for i in range(t + 1):
                yield (c(u, v, i), -gv(u, v, i))
                if i:
                    yield (-c(u, v, i - 1), c(u, v, i))
                    yield (-gv(u, v, i - 1), gv(u, v, i))

    def transitivity():
        for u, v, w in itertools.combinations(range(n), 3):
            for i in range(t + 1):
                for x in (c, gv):
                    yield (-x(u, v, i), -x(v, w, i), x(u, w, i))
                    yield (-x(u, v, i), -x(u, w, i), x(v, w, i))
                    yield (-x(u, w, i), -x(v, w, i), x(u, v, i))

    def edge():
        for u, v in g.sorted_edges():
            for i in range(1, t + 1):
                yield (c(u, v, i - 1), -gv(u, v, i))

    def neighborhood():
        seen = set()
        for i in range(1, t + 1):
            for u in range(n):
                for v in sorted(g.neighbors(u)):
                    for w in range(n):
                        if w == u or w == v or g.adjacent(u, w):
                            continue
                        cl = (c(u, v, i - 1), -gv(v, w, i))
                        if cl not in seen:
                            seen.add(cl)
                            yield cl

    def path():
        seen = set()
        for i in range(1, t + 1):
            for u, v in g.sorted_edges():
                for w in sorted(g.neighbors(u) - {v}):
                    for x in sorted(g.neighbors(v) - {u}):
                        if w == x or g.adjacent(w, x):
                            continue
                        cl = (c(u, v, i - 1), -gv(u, x, i), -gv(v, w, i))
                        key = frozenset(cl)
                        if key not in seen:
                            seen.add(key)
                            yield cl

    return [("D1-D4", d_block()), ("transitivity", transitivity()), ("edge", edge()),
            ("neighborhood", neighborhood()), ("path", path())]


def build_base(g: Graph, t: int, varmap: VarMap | None = None) -> CnfInstance:
    """Clauses saying the c/g variables describe a derivation of g of
    length t, in fixed family order."""
    if t < 1:
        raise EncodingError(f"derivation length t must be >= 1, got {t}")
    if g.n < 2:
        raise EncodingError("encoding needs at least two vertices")
    vm = varmap or VarMap(g.n, t)
    inst = CnfInstance(vm, graph_name=g.name)
    for name, clauses in _base_clauses(g, vm):
        inst._family(name, clauses)
    return inst


def add_direct(inst: CnfInstance, g: Graph, k: int, t: int) -> CnfInstance:
    """Group numbers 1..k per vertex and layer: exactly one number each,
    same group implies same number, same component and same number imply
    same group."""
    if k < 1:
        raise EncodingError("k must be >= 1")
    vm = VarMap(g.n, t, k, DIRECT)
    inst.varmap = vm
    n, l, c, gv = g.n, vm.l, vm.c, vm.g
    layers = range(t + 1)
    inst._family("direct-alo", ([l(v, a, i) for a in range(1, k + 1)] for i in layers for v in range(n)))
    inst._family("direct-amo", ((-l(v, a, i), -l(v, b, i)) for i in layers for v in range(n)
                                for a, b in itertools.combinations(range(1, k + 1), 2)))

    def link():
        for i in layers:
            for u, v in itertools.combinations(range(n), 2):
                for a in range(1, k + 1):
                    yield (-l(u, a, i), l(v, a, i), -gv(u, v, i))
                    yield (-l(v, a, i), l(u, a, i), -gv(u, v, i))
                    yield (-l(u, a, i), -l(v, a, i), -c(u, v, i), gv(u, v, i))

    inst._family("direct-link", link())
    return inst


def add_representative(inst: CnfInstance, g: Graph, k: int, t: int) -> CnfInstance:
    """The smallest vertex of each group is its representative; order
    variables then force the representatives of one component onto strictly
    increasing group numbers in 1..k."""
    if k < 2:
        raise EncodingError("the representative encoding needs k >= 2")
    vm = VarMap(g.n, t, k, REPRESENTATIVE)
    inst.varmap = vm
    n, r, o, c, gv = g.n, vm.r, vm.o, vm.c, vm.g
    layers = range(t + 1)

    def representatives():
        for i in layers:
            for v in range(n):
                yield (r(v, i),) + tuple(gv(u, v, i) for u in range(v))
                for u in range(v):
                    yield (-r(v, i), -gv(u, v, i))

    def width():
        for i in layers:
            for u, v in itertools.combinations(range(n), 2):
                head = (-c(u, v, i), -r(u, i), -r(v, i))
                yield head + (-o(u, k - 1, i),)
                yield head + (o(v, 1, i),)
                for a in range(1, k - 1):
                    yield head + (-o(u, a, i), o(v, a + 1, i))

    inst._family("representative", representatives())
    inst._family("width", width())
    return inst


def encode(g: Graph, k: int, t: int | None = None, encoding: str = REPRESENTATIVE) -> CnfInstance:
    """F(G, k, t); t defaults to n - k + 1, the length that decides cwd <= k."""
    if t is None:
        t = g.n - k + 1
    if encoding not in ENCODINGS:
        raise EncodingError(f"unknown encoding {encoding!r}")
    vm = VarMap(g.n, t, k, encoding)
    inst = build_base(g, t, vm)
    if encoding == DIRECT:
        add_direct(inst, g, k, t)
    else:
        add_representative(inst, g, k, t)
    if inst.num_vars != expected_variables(g.n, k, t):
        raise InvariantError("variable count differs from n(n+k-1)(t+1)")
    return inst


def emit_dimacs(inst: CnfInstance, comments: Sequence[str] = ()) -> str:
    if any(not cl for cl in inst.clauses):
        raise EncodingError("instance contains an empty clause")
    vm = inst.varmap
    enc = _SHORT.get(vm.encoding, "base")
    lines = [f"c graph={inst.graph_name or 'unnamed'} n={vm.n} k={vm.k} t={vm.t} enc={enc}"]
    lines += [f"c {x}" for x in comments]
    lines.append(f"p cnf {inst.num_vars} {inst.num_clauses}")
    lines += [" ".join(map(str, cl)) + " 0" for cl in inst.clauses]
    return "\n".join(lines) + "\n"


def _classes(n: int, same) -> Partition:
    owner = list(range(n))
    for v in range(n):
        for u in range(v):
            if same(u, v):
                owner[v] = owner[u]
                break
    part = Partition.from_labels(owner)
    for u, v in itertools.combinations(range(n), 2):
        if part.same(u, v) != bool(same(u, v)):
            raise InvariantError(f"model is not transitive on pair ({u},{v})")
    return part


def decode_model(model: Sequence[int] | set[int], g: Graph, k: int, t: int | None = None) -> Derivation:
    """Read the derivation encoded by a satisfying assignment; ``model`` is
    a collection of signed literals (or of the true variables)."""
    if t is None:
        t = g.n - k + 1
    true = {x for x in model if x > 0}
    vm = VarMap(g.n, t, k)
    templates = []
    for i in range(t + 1):
        cmp = _classes(g.n, lambda u, v: vm.c(u, v, i) in true)
        grp = _classes(g.n, lambda u, v: vm.g(u, v, i) in true)
        templates.append(Template(cmp, grp))
    return Derivation(tuple(templates))
