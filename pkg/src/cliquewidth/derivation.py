"""Templates and derivations: sequences of (component, group) partition
pairs that characterize clique-width without labels."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import Graph


class DerivationError(ValueError):
    pass


class InvariantError(RuntimeError):
    """Raised when a construction that is guaranteed to succeed does not."""


@dataclass(frozen=True)
class Partition:
    """Partition of ``0..n-1``; blocks are sorted tuples ordered by their
    smallest element, so equal partitions compare and serialize equally."""

    n: int
    blocks: tuple[tuple[int, ...], ...]
    block_of: tuple[int, ...] = field(compare=False, repr=False)

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        bl = [tuple(sorted(b)) for b in blocks]
        if any(not b for b in bl):
            raise DerivationError("partition has an empty block")
        bl.sort()
        owner = [-1] * n
        for i, b in enumerate(bl):
            for v in b:
                if not 0 <= v < n:
                    raise DerivationError(f"vertex {v} outside universe 0..{n - 1}")
                if owner[v] != -1:
                    raise DerivationError(f"vertex {v} in two blocks")
                owner[v] = i
        if -1 in owner:
            raise DerivationError(f"vertex {owner.index(-1)} not covered")
        return cls(n, tuple(bl), tuple(owner))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls.from_blocks(n, ([v] for v in range(n)))

    @classmethod
    def whole(cls, n: int) -> "Partition":
        return cls.from_blocks(n, [range(n)] if n else [])

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Blocks are the classes of equal entries of ``labels``."""
        classes: dict = {}
        for v, lab in enumerate(labels):
            classes.setdefault(lab, []).append(v)
        return cls.from_blocks(len(labels), classes.values())

    def same(self, u: int, v: int) -> bool:
        return self.block_of[u] == self.block_of[v]

    def block(self, v: int) -> tuple[int, ...]:
        return self.blocks[self.block_of[v]]

    def __len__(self):
        return len(self.blocks)

    def to_list(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def is_refinement(fine: Partition, coarse: Partition) -> bool:
    if fine.n != coarse.n:
        raise DerivationError(f"universe mismatch: {fine.n} vs {coarse.n}")
    return all(len({coarse.block_of[v] for v in b}) == 1 for b in fine.blocks)


@dataclass(frozen=True)
class Template:
    cmp: Partition
    grp: Partition

    @classmethod
    def from_lists(cls, n, cmp, grp) -> "Template":
        return cls(Partition.from_blocks(n, cmp), Partition.from_blocks(n, grp))

    @property
    def n(self) -> int:
        return self.cmp.n

    def width(self) -> int:
        counts = [0] * len(self.cmp)
        for g in self.grp.blocks:
            owners = {self.cmp.block_of[v] for v in g}
            if len(owners) == 1:
                counts[owners.pop()] += 1
        return max(counts, default=0)

    def groups_in(self, component: Iterable[int]) -> list[tuple[int, ...]]:
        comp = set(component)
        return [g for g in self.grp.blocks if set(g) <= comp]


@dataclass(frozen=True)
class Derivation:
    templates: tuple[Template, ...]

    def __post_init__(self):
        if not self.templates:
            raise DerivationError("a derivation has at least one template")
        if len({t.n for t in self.templates}) != 1:
            raise DerivationError("templates over different universes")

    @property
    def n(self) -> int:
        return self.templates[0].n

    @property
    def t(self) -> int:
        return len(self.templates) - 1

    def __len__(self):
        return len(self.templates)

    def __getitem__(self, i) -> Template:
        return self.templates[i]

    def width(self) -> int:
        return max(t.width() for t in self.templates)

    def is_strict(self) -> bool:
        return all(len(a.cmp) > len(b.cmp) for a, b in zip(self.templates, self.templates[1:]))

    def to_dict(self) -> dict:
        return {
            "universe": self.n,
            "templates": [{"cmp": t.cmp.to_list(), "grp": t.grp.to_list()} for t in self.templates],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "Derivation":
        n = int(data["universe"])
        return cls(tuple(Template.from_lists(n, t["cmp"], t["grp"]) for t in data["templates"]))

    @classmethod
    def from_json(cls, text: str) -> "Derivation":
        return cls.from_dict(json.loads(text))


@dataclass
class PropertyReport:
    violations: list[tuple[str, int, tuple[int, ...]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, prop: str, index: int, witness: Iterable[int]):
        self.violations.append((prop, index, tuple(witness)))

    def extend(self, other: "PropertyReport") -> "PropertyReport":
        self.violations.extend(other.violations)
        return self

    def kinds(self) -> set[str]:
        return {v[0] for v in self.violations}

    def summary(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"{p} at T{i} witness {w}" for p, i, w in self.violations[:10])


def validate_derivation(d: Derivation) -> PropertyReport:
    """Check D1-D4; one witness per violated condition and template."""
    rep = PropertyReport()
    n = d.n
    if len(d[0].cmp) != n:
        rep.add("D1", 0, next(b for b in d[0].cmp.blocks if len(b) > 1))
    if len(d[-1].cmp) != 1:
        rep.add("D1", d.t, [b[0] for b in d[-1].cmp.blocks])
    for i, tpl in enumerate(d.templates):
        for g in tpl.grp.blocks:
            if len({tpl.cmp.block_of[v] for v in g}) > 1:
                rep.add("D2", i, g)
                break
    for i in range(1, len(d)):
        for prop, fine, coarse in (("D3", d[i - 1].cmp, d[i].cmp), ("D4", d[i - 1].grp, d[i].grp)):
            for b in fine.blocks:
                if len({coarse.block_of[v] for v in b}) > 1:
                    rep.add(prop, i, b)
                    break
    return rep


def _same_group_pairs(tpl: Template) -> list[tuple[int, int]]:
    return [(v, w) for g in tpl.grp.blocks if len(g) > 1 for v in g for w in g if v != w]


def check_models(d: Derivation, g: Graph) -> PropertyReport:
    """Edge, neighborhood and path properties between consecutive
    templates. Witnesses are ordered as (u, v[, w[, x]]) in the roles of the
    property; symmetric duplicates are reported once."""
    if d.n != g.n:
        raise DerivationError(f"universe mismatch: derivation {d.n}, graph {g.n}")
    rep = PropertyReport()
    for i in range(1, len(d)):
        prev = d[i - 1].cmp
        pairs = _same_group_pairs(d[i])
        seen = set()
        for v, w in pairs:
            if v < w and g.adjacent(v, w) and not prev.same(v, w):
                rep.add("edge", i, (v, w))
        for v, w in pairs:
            for u in g.neighbors(v):
                if u == w or g.adjacent(u, w):
                    continue
                if not prev.same(u, v):
                    key = ("neighborhood", frozenset((u, v, w)))
                    if key not in seen:
                        seen.add(key)
                        rep.add("neighborhood", i, (u, v, w))
        for u, x in pairs:
            for v, w in pairs:
                if len({u, v, w, x}) < 4:
                    continue
                if (g.adjacent(u, v) and g.adjacent(u, w) and g.adjacent(v, x)
                        and not g.adjacent(w, x) and not prev.same(u, v)):
                    key = ("path", frozenset(((u, x), (v, w))))
                    alt = ("path", frozenset(((v, w), (u, x))))
                    if key not in seen and alt not in seen:
                        seen.add(key)
                        rep.add("path", i, (u, v, w, x))
    return rep


def is_derivation_of(d: Derivation, g: Graph, k: int | None = None) -> bool:
    if not validate_derivation(d) or not check_models(d, g):
        return False
    return k is None or d.width() <= k


def make_strict(d: Derivation, g: Graph) -> Derivation:
    """Drop templates until the component count strictly decreases; the
    result models the same graph with no larger width or length."""
    if not validate_derivation(d) or not check_models(d, g):
        raise DerivationError("make_strict needs a derivation of the given graph")
    tpls = list(d.templates)
    i = 1
    while i < len(tpls):
        if tpls[i - 1].cmp != tpls[i].cmp:
            i += 1
            continue
        if tpls[i - 1].grp == tpls[i].grp:
            del tpls[i - 1]
        elif i == len(tpls) - 1:
            del tpls[i]
        else:
            # T_{i+1}'s constraints only look at cmp(T_i) == cmp(T_{i-1})
            del tpls[i]
    return Derivation(tuple(tpls))


def k_length(d: Derivation, k: int) -> int:
    """Number of templates with a component of more than k vertices."""
    return sum(1 for t in d.templates if any(len(c) > k for c in t.cmp.blocks))


def shorten(d: Derivation, g: Graph, k: int) -> Derivation:
    """A k-derivation of length at most n - k + 1 from a strict one: keep the
    suffix of templates holding a component larger than k and jump to it
    from T_0 through a copy of the last small template with singleton
    groups."""
    if not validate_derivation(d) or not check_models(d, g) or d.width() > k or not d.is_strict():
        raise DerivationError("shorten needs a strict k-derivation of the given graph")
    n = d.n
    ell = k_length(d, k)
    if ell > n - k:
        raise InvariantError(f"strict derivation with k-length {ell} > n - k = {n - k}")
    j = d.t - ell
    if j == 0:
        return d
    bridge = Template(d[j].cmp, d[0].grp)
    return Derivation((d[0], bridge) + d.templates[j + 1:])
