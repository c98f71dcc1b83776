"""Simple undirected graphs over vertices ``0..n-1`` and the structural
helpers used around the clique-width search: parsing, graph6, generators,
twins, universal vertices, modules and small-graph canonical forms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np


class GraphError(ValueError):
    pass


class GraphFormatError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if u < 0 or v >= self.n:
                raise GraphError(f"edge ({u},{v}) outside 0..{self.n - 1}")
            norm.add((u, v))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = [set() for _ in range(self.n)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str | None = None) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges), name)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def induced(self, vertices: Iterable[int], name: str | None = None) -> tuple["Graph", list[int]]:
        """Induced subgraph re-indexed to ``0..len-1``; also returns the
        mapping from new index to original vertex."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph.from_edges(len(keep), edges, name), keep

    def relabeled(self, perm: list[int]) -> "Graph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges), self.name)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<Graph{label} n={self.n} m={self.m}>"


# --------------------------------------------------------------------------
# parsers and serializers

def parse_edge_list(text: str, name: str | None = None) -> Graph:
    """Parse ``u v`` lines. An ``n <count>`` header fixes the vertex count,
    otherwise it is the largest index plus one. ``#`` starts a comment."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "n":
            if len(tokens) != 2:
                raise GraphFormatError(f"line {lineno}: malformed header {raw!r}")
            try:
                n = int(tokens[1])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer vertex count {tokens[1]!r}") from None
            continue
        if len(tokens) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer token in {raw!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex index")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at vertex {u}")
        edges.append((u, v))
    top = max((max(e) for e in edges), default=-1) + 1
    if n is None:
        n = top
    elif top > n:
        raise GraphFormatError(f"edge endpoint {top - 1} exceeds declared n={n}")
    return Graph.from_edges(n, edges, name)


def to_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def _g6_pairs(n: int) -> Iterator[tuple[int, int]]:
    # upper triangle, column by column: (0,1),(0,2),(1,2),(0,3),...
    for v in range(1, n):
        for u in range(v):
            yield u, v


def _g6_size(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def to_graph6(g: Graph) -> str:
    bits = [1 if g.adjacent(u, v) else 0 for u, v in _g6_pairs(g.n)]
    bits += [0] * (-len(bits) % 6)
    body = []
    for i in range(0, len(bits), 6):
        x = 0
        for b in bits[i:i + 6]:
            x = (x << 1) | b
        body.append(chr(x + 63))
    return _g6_size(g.n) + "".join(body)


def parse_graph6(line: str, name: str | None = None) -> Graph:
    s = line.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise GraphFormatError("empty graph6 string")
    for pos, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise GraphFormatError(f"graph6 character {ch!r} at position {pos} outside 63..126")
    vals = [ord(ch) - 63 for ch in s]
    if vals[0] != 63:
        n, rest = vals[0], vals[1:]
    elif len(vals) > 1 and vals[1] == 63:
        if len(vals) < 8:
            raise GraphFormatError("truncated graph6 size field")
        n = 0
        for x in vals[2:8]:
            n = (n << 6) | x
        rest = vals[8:]
    else:
        if len(vals) < 4:
            raise GraphFormatError("truncated graph6 size field")
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        rest = vals[4:]
    need = (n * (n - 1) // 2 + 5) // 6
    if len(rest) != need:
        raise GraphFormatError(f"graph6 body has {len(rest)} chars, expected {need} for n={n}")
    edges = []
    k = 0
    for u, v in _g6_pairs(n):
        if (rest[k // 6] >> (5 - k % 6)) & 1:
            edges.append((u, v))
        k += 1
    return Graph.from_edges(n, edges, name)


# --------------------------------------------------------------------------
# generators

PRNG_NAME = "numpy.random.PCG64"


def random_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p); pairs are visited in graph6 order, one uniform
    draw per pair from a PCG64 stream seeded with ``seed``."""
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability {p} outside [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = list(_g6_pairs(n))
    draws = rng.random(len(pairs))
    edges = [e for e, x in zip(pairs, draws) if x < p]
    return Graph.from_edges(n, edges, f"gnp-{n}-{p:g}-{seed}")


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], f"path-{n}")


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"cycle-{n}")


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2), f"complete-{n}")


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)],
                            f"complete-bipartite-{a}-{b}")


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, [], f"empty-{n}")


def grid_graph(rows: int, cols: int) -> Graph:
    def idx(r, c):
        return r * cols + c
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1)))
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c)))
    return Graph.from_edges(rows * cols, edges, f"grid-{rows}x{cols}")


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner, "petersen")


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, int(q ** 0.5) + 1))


def paley_graph(q: int) -> Graph:
    if not _is_prime(q) or q % 4 != 1:
        raise GraphError(f"paley graph needs a prime q = 1 (mod 4), got {q}")
    residues = {(x * x) % q for x in range(1, q)}
    edges = [(u, v) for u, v in itertools.combinations(range(q), 2) if (v - u) % q in residues]
    return Graph.from_edges(q, edges, f"paley-{q}")


def prism_graph(k: int) -> Graph:
    """Cartesian product of the k-cycle with an edge."""
    if k < 3:
        raise GraphError("a prism needs k >= 3")
    edges = []
    for i in range(k):
        j = (i + 1) % k
        edges += [(i, j), (k + i, k + j), (i, k + i)]
    return Graph.from_edges(2 * k, edges, f"prism-{k}")


_GENERATORS = {
    "path": (path_graph, 1),
    "cycle": (cycle_graph, 1),
    "complete": (complete_graph, 1),
    "empty": (empty_graph, 1),
    "complete-bipartite": (complete_bipartite, 2),
    "grid": (grid_graph, 2),
    "petersen": (petersen_graph, 0),
    "paley": (paley_graph, 1),
    "prism": (prism_graph, 1),
}


def generator_names() -> list[str]:
    return sorted(_GENERATORS)


def generate_named(name: str, *params: int) -> Graph:
    """Build a named graph: generator families take integer parameters,
    catalog entries (see :mod:`cliquewidth.catalog`) take none."""
    key = name.lower()
    if key in _GENERATORS:
        fn, arity = _GENERATORS[key]
        if len(params) != arity:
            raise GraphError(f"{name} takes {arity} integer parameter(s), got {len(params)}")
        return fn(*params)
    from .catalog import load_catalog_graph

    if params:
        raise GraphError(f"catalog graph {name} takes no parameters")
    return load_catalog_graph(key)


# --------------------------------------------------------------------------
# structure

def connected_components(g: Graph) -> list[tuple[Graph, list[int]]]:
    """Components in order of smallest vertex, each re-indexed; the list
    maps new index to original vertex."""
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = []
        stack = [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in g.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        out.append(g.induced(comp))
    return out


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


def find_twins(g: Graph) -> list[tuple[int, int]]:
    """All pairs u < v with N(u) - {v} == N(v) - {u} (true and false twins)."""
    return [(u, v) for u, v in itertools.combinations(range(g.n), 2)
            if g.neighbors(u) - {v} == g.neighbors(v) - {u}]


def find_universal(g: Graph) -> list[int]:
    return [v for v in range(g.n) if g.degree(v) == g.n - 1]


def _module_closure(g: Graph, seed: set[int]) -> set[int]:
    module = set(seed)
    changed = True
    while changed:
        changed = False
        for x in range(g.n):
            if x in module:
                continue
            nb = g.neighbors(x)
            hits = sum(1 for y in module if y in nb)
            if 0 < hits < len(module):
                module.add(x)
                changed = True
    return module


def find_nontrivial_module(g: Graph) -> set[int] | None:
    """Some module M with 1 < |M| < n, or None when the graph is prime."""
    for u, v in itertools.combinations(range(g.n), 2):
        m = _module_closure(g, {u, v})
        if len(m) < g.n:
            return m
    return None


def is_module(g: Graph, vertices: Iterable[int]) -> bool:
    m = set(vertices)
    for x in range(g.n):
        if x in m:
            continue
        hits = len(g.neighbors(x) & m)
        if 0 < hits < len(m):
            return False
    return True


def is_prime(g: Graph) -> bool:
    return find_nontrivial_module(g) is None


CANONICAL_MAX_N = 8


def canonical_form(g: Graph) -> str:
    """Lexicographically smallest graph6 string over all vertex orderings.

    Orderings are grown one position at a time; placing a vertex at
    position j fixes column j of the graph6 bit matrix, so only prefixes
    whose columns are minimal so far can lead to the overall minimum.
    """
    n = g.n
    if n > CANONICAL_MAX_N:
        raise GraphError(f"canonical_form supports n <= {CANONICAL_MAX_N}, got n={n}")
    if n <= 1:
        return to_graph6(g)
    adj = [0] * n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    partials = [((v,), 1 << v) for v in range(n)]
    for j in range(1, n):
        best = None
        nxt = []
        for order, used in partials:
            for v in range(n):
                if used >> v & 1:
                    continue
                col = 0
                av = adj[v]
                for w in order:
                    col = (col << 1) | (av >> w & 1)
                if best is None or col < best:
                    best = col
                    nxt = [(order + (v,), used | 1 << v)]
                elif col == best:
                    nxt.append((order + (v,), used | 1 << v))
        partials = nxt
    order = partials[0][0]
    perm = [0] * n
    for pos, v in enumerate(order):
        perm[v] = pos
    return to_graph6(g.relabeled(perm))


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return g.n == h.n and g.m == h.m and canonical_form(g) == canonical_form(h)


ENUMERATE_MAX_N = 7


def enumerate_connected(n: int) -> Iterator[Graph]:
    """One representative per isomorphism class of connected graphs on n
    vertices. Every connected graph has a vertex whose removal leaves it
    connected, so classes on n vertices are found by attaching a new vertex
    to every nonempty subset of a class representative on n - 1 vertices."""
    if n > ENUMERATE_MAX_N:
        raise GraphError(f"enumerate_connected supports n <= {ENUMERATE_MAX_N}")
    if n < 1:
        return
    layer = {canonical_form(Graph.from_edges(1, [])): Graph.from_edges(1, [])}
    for size in range(2, n + 1):
        nxt = {}
        for base in layer.values():
            for mask in range(1, 1 << (size - 1)):
                extra = [(u, size - 1) for u in range(size - 1) if mask >> u & 1]
                cand = Graph.from_edges(size, list(base.edges) + extra)
                key = canonical_form(cand)
                if key not in nxt:
                    nxt[key] = cand
        layer = nxt
    for key in sorted(layer):
        yield parse_graph6(key)
