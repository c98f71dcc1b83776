"""Brute-force clique-width for small graphs, independent of the SAT route.

The search walks over templates directly. A step merges exactly two
components and may coarsen the groups inside the merged component in any
way that respects the modelling conditions. This is complete: a step that
merges several components can be split into binary merges whose groups
are the restrictions of the final grouping (never more groups than the
final one, and only pairs the final step already justifies), and a group
coarsening inside a component that is not being merged can be postponed
to that component's next merge, where the previous component partition is
coarser and so every condition is easier to meet.

``mode="exhaustive"`` drops that argument and tries every coarsening of
every template; it is only feasible for tiny graphs and exists to cross
check the fast mode.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .derivation import Derivation, Partition, Template
from .graph import Graph

EXHAUSTIVE_MAX_N = 5
ORACLE_MAX_N = 7

State = tuple[tuple[int, ...], tuple[int, ...]]


class OracleError(ValueError):
    pass


def _canon(labels) -> tuple[int, ...]:
    seen: dict = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def _width(cmp, grp) -> int:
    per: dict[int, set] = {}
    for c, g in zip(cmp, grp):
        per.setdefault(c, set()).add(g)
    return max((len(s) for s in per.values()), default=0)


def _step_ok(g: Graph, prev_cmp, grp) -> bool:
    """Edge, neighborhood and path conditions for a template whose groups
    are ``grp`` following one whose components are ``prev_cmp``."""
    n = g.n
    pairs = [(v, w) for v in range(n) for w in range(n) if v != w and grp[v] == grp[w]]
    for v, w in pairs:
        if g.adjacent(v, w) and prev_cmp[v] != prev_cmp[w]:
            return False
        for u in g.neighbors(v):
            if u != w and not g.adjacent(u, w) and prev_cmp[u] != prev_cmp[v]:
                return False
    for u, x in pairs:
        for v, w in pairs:
            if len({u, v, w, x}) == 4 and prev_cmp[u] != prev_cmp[v] \
                    and g.adjacent(u, v) and g.adjacent(u, w) and g.adjacent(v, x) \
                    and not g.adjacent(w, x):
                return False
    return True


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in _set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def _merge_successors(g: Graph, state: State, k: int):
    cmp, grp = state
    comps = sorted(set(cmp))
    for a, b in itertools.combinations(comps, 2):
        new_cmp = _canon(a if c == b else c for c in cmp)
        groups = sorted({grp[v] for v in range(g.n) if cmp[v] in (a, b)})
        for part in _set_partitions(groups):
            if len(part) > k:
                continue
            rename = {old: blk[0] for blk in part for old in blk}
            new_grp = _canon(rename.get(x, x) for x in grp)
            if _step_ok(g, cmp, new_grp):
                yield new_cmp, new_grp


def _all_states(n: int, k: int):
    for cmp in map(_canon, _labelings(n)):
        for grp in map(_canon, _labelings(n)):
            if all(cmp[u] == cmp[v] for u in range(n) for v in range(n) if grp[u] == grp[v]) \
                    and _width(cmp, grp) <= k:
                yield cmp, grp


@lru_cache(maxsize=None)
def _labelings(n: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for p in _set_partitions(list(range(n))):
        lab = [0] * n
        for i, blk in enumerate(sorted(p)):
            for v in blk:
                lab[v] = i
        out.append(tuple(lab))
    return tuple(sorted(set(map(_canon, out))))


def _refines(fine, coarse) -> bool:
    return all(coarse[u] == coarse[v] for u in range(len(fine)) for v in range(u)
               if fine[u] == fine[v])


def _exhaustive_successors(g: Graph, state: State, k: int, pool):
    cmp, grp = state
    for s in pool:
        if s != state and _refines(cmp, s[0]) and _refines(grp, s[1]) and _step_ok(g, cmp, s[1]):
            yield s


def oracle_min_derivation(g: Graph, k: int, mode: str = "merge") -> Derivation | None:
    """A derivation of g of width at most k, or None when none exists."""
    n = g.n
    limit = EXHAUSTIVE_MAX_N if mode == "exhaustive" else ORACLE_MAX_N
    if n > limit:
        raise OracleError(f"oracle mode {mode!r} is limited to n <= {limit}")
    if n == 0:
        raise OracleError("empty graph")
    start: State = (tuple(range(n)), tuple(range(n)))
    if k < 1:
        return None
    if n == 1:
        return _to_derivation([start])
    if mode == "exhaustive":
        pool = list(_all_states(n, k))
        succ = lambda s: _exhaustive_successors(g, s, k, pool)
    elif mode == "merge":
        succ = lambda s: _merge_successors(g, s, k)
    else:
        raise OracleError(f"unknown oracle mode {mode!r}")
    dead: set[State] = set()
    path = [start]
    iters = [iter(succ(start))]
    while iters:
        nxt = next(iters[-1], None)
        if nxt is None:
            dead.add(path.pop())
            iters.pop()
            continue
        if nxt in dead or nxt in path:
            continue
        path.append(nxt)
        if len(set(nxt[0])) == 1:
            return _to_derivation(path)
        iters.append(iter(succ(nxt)))
    return None


def _to_derivation(path) -> Derivation:
    return Derivation(tuple(Template(Partition.from_labels(c), Partition.from_labels(gp))
                            for c, gp in path))


def oracle_cwd(g: Graph, mode: str = "merge") -> int:
    """Smallest k for which a width-k derivation exists."""
    if g.n == 0:
        return 0
    k = 1
    while oracle_min_derivation(g, k, mode) is None:
        k += 1
    return k
