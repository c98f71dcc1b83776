"""k-expressions: initial labeled vertices combined by disjoint union,
relabeling and cross-label edge insertion.

Text form::

    expr := INT "(" VERTEX ")"
          | "eta_{" INT "," INT "}(" sum ")"
          | "rho_{" INT "->" INT "}(" sum ")"
          | "(" sum ")"
    sum  := expr ("+" expr)*

A sum of two or more terms is a union; so is "(" expr ")", a union with a
single child. Whitespace is ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union as TUnion

from .derivation import (Derivation, DerivationError, InvariantError, Template,
                         check_models, make_strict, validate_derivation)
from .graph import Graph


class ExpressionError(ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Initial:
    label: int
    vertex: str


@dataclass(frozen=True)
class Union:
    children: tuple["KExpression", ...]


@dataclass(frozen=True)
class Relabel:
    src: int
    dst: int
    child: "KExpression"


@dataclass(frozen=True)
class Insert:
    a: int
    b: int
    child: "KExpression"


KExpression = TUnion[Initial, Union, Relabel, Insert]


def _children(e: KExpression) -> tuple:
    if isinstance(e, Initial):
        return ()
    if isinstance(e, Union):
        return e.children
    return (e.child,)


def _postorder(e: KExpression) -> Iterator[KExpression]:
    stack = [(e, False)]
    while stack:
        node, done = stack.pop()
        if done:
            yield node
            continue
        stack.append((node, True))
        for c in reversed(_children(node)):
            stack.append((c, False))


# --------------------------------------------------------------------------
# text form

_TOKEN = re.compile(r"\s*(?:(eta_\{)|(rho_\{)|(->)|(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        while (m := _TOKEN.match(text, pos)) is not None:
            kind = ("ETA", "RHO", "ARROW", "INT", "NAME", "CH")[m.lastindex - 1]
            self.toks.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("EOF", "", len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            raise ExpressionSyntaxError(f"expected {want!r}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def integer(self) -> int:
        return int(self.take("INT")[1])

    def leaf(self) -> Initial:
        label = self.integer()
        self.take("CH", "(")
        kind, val, pos = self.peek()
        if kind not in ("INT", "NAME"):
            raise ExpressionSyntaxError(f"expected vertex name, found {val!r}", pos)
        self.i += 1
        self.take("CH", ")")
        return Initial(label, val)

    def header(self, kind: str, pos: int) -> tuple[str, int, int, int]:
        self.i += 1
        a = self.integer()
        if kind == "ETA":
            self.take("CH", ",")
        else:
            self.take("ARROW")
        b = self.integer()
        self.take("CH", "}")
        self.take("CH", "(")
        if kind == "ETA" and a == b:
            raise ExpressionSyntaxError(f"eta_{{{a},{b}}} needs two distinct labels", pos)
        return (kind, a, b, pos)

    def parse(self) -> KExpression:
        """Shift-reduce over an explicit stack, so nesting depth is not
        bounded by the interpreter's recursion limit."""
        frames: list[tuple[tuple, list]] = [(("TOP", 0, 0, 0), [])]
        want_term = True
        while True:
            kind, val, pos = self.peek()
            if want_term:
                if kind == "INT":
                    frames[-1][1].append(self.leaf())
                    want_term = False
                elif kind in ("ETA", "RHO"):
                    frames.append((self.header(kind, pos), []))
                elif (kind, val) == ("CH", "("):
                    self.i += 1
                    frames.append((("GROUP", 0, 0, pos), []))
                else:
                    raise ExpressionSyntaxError(f"unexpected {val!r}", pos)
                continue
            if (kind, val) == ("CH", "+"):
                self.i += 1
                want_term = True
            elif (kind, val) == ("CH", ")") and len(frames) > 1:
                self.i += 1
                (op, a, b, _), parts = frames.pop()
                if op == "GROUP":
                    node = Union(tuple(parts))
                else:
                    child = parts[0] if len(parts) == 1 else Union(tuple(parts))
                    node = Insert(a, b, child) if op == "ETA" else Relabel(a, b, child)
                frames[-1][1].append(node)
            elif kind == "EOF" and len(frames) == 1:
                parts = frames[0][1]
                return parts[0] if len(parts) == 1 else Union(tuple(parts))
            elif kind == "EOF":
                raise ExpressionSyntaxError("expected ')' before end of input", pos)
            elif len(frames) == 1:
                raise ExpressionSyntaxError(f"trailing input {val!r}", pos)
            else:
                raise ExpressionSyntaxError(f"expected '+' or ')', found {val!r}", pos)


def parse_expr(text: str, k: int | None = None) -> KExpression:
    e = _Parser(text).parse()
    check_well_formed(e, k)
    return e


def _inner(child: KExpression, out: dict[int, str]) -> str:
    text = out.pop(id(child))
    if isinstance(child, Union) and len(child.children) > 1:
        return text[1:-1]
    return text


def print_expr(e: KExpression) -> str:
    out: dict[int, str] = {}
    for node in _postorder(e):
        if isinstance(node, Initial):
            s = f"{node.label}({node.vertex})"
        elif isinstance(node, Union):
            s = "(" + " + ".join(out.pop(id(c)) for c in node.children) + ")"
        elif isinstance(node, Relabel):
            s = f"rho_{{{node.src}->{node.dst}}}({_inner(node.child, out)})"
        else:
            s = f"eta_{{{node.a},{node.b}}}({_inner(node.child, out)})"
        out[id(node)] = s
    return out[id(e)]


def leaves(e: KExpression) -> list[Initial]:
    return [x for x in _postorder(e) if isinstance(x, Initial)]


def max_labels(e: KExpression) -> int:
    best = 0
    for x in _postorder(e):
        if isinstance(x, Initial):
            best = max(best, x.label)
        elif isinstance(x, Relabel):
            best = max(best, x.src, x.dst)
        elif isinstance(x, Insert):
            best = max(best, x.a, x.b)
    return best


def check_well_formed(e: KExpression, k: int | None = None) -> None:
    seen = set()
    for x in _postorder(e):
        labels = ()
        if isinstance(x, Initial):
            if x.vertex in seen:
                raise ExpressionError(f"vertex {x.vertex!r} occurs twice")
            seen.add(x.vertex)
            labels = (x.label,)
        elif isinstance(x, Relabel):
            labels = (x.src, x.dst)
        elif isinstance(x, Insert):
            if x.a == x.b:
                raise ExpressionError(f"eta_{{{x.a},{x.b}}} needs two distinct labels")
            labels = (x.a, x.b)
        elif not x.children:
            raise ExpressionError("union without children")
        for lab in labels:
            if lab < 1 or (k is not None and lab > k):
                raise ExpressionError(f"label {lab} outside 1..{k if k is not None else 'k'}")


# --------------------------------------------------------------------------
# evaluation

@dataclass
class LabeledGraph:
    vertices: list[str]
    label: dict[str, int]
    edges: set[frozenset[str]]

    def classes(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for v in self.vertices:
            out.setdefault(self.label[v], []).append(v)
        return out

    def vertex_ids(self) -> dict[str, int]:
        return vertex_ids(self.vertices)

    def underlying(self) -> Graph:
        ids = self.vertex_ids()
        return Graph.from_edges(len(ids), [tuple(ids[v] for v in e) for e in self.edges])


def vertex_ids(names) -> dict[str, int]:
    """Decimal names are vertex ids; any other naming is ranked in sorted
    order."""
    names = list(names)
    if all(x.isdigit() for x in names):
        return {x: int(x) for x in names}
    return {x: i for i, x in enumerate(sorted(names))}


def _apply(node: KExpression, kids: list[LabeledGraph]) -> LabeledGraph:
    if isinstance(node, Initial):
        return LabeledGraph([node.vertex], {node.vertex: node.label}, set())
    if isinstance(node, Union):
        verts, lab, edges = [], {}, set()
        for kg in kids:
            verts += kg.vertices
            lab.update(kg.label)
            edges |= kg.edges
        return LabeledGraph(verts, lab, edges)
    (kg,) = kids
    lab = dict(kg.label)
    edges = set(kg.edges)
    if isinstance(node, Relabel):
        for v, x in lab.items():
            if x == node.src:
                lab[v] = node.dst
    else:
        side_a = [v for v in kg.vertices if lab[v] == node.a]
        side_b = [v for v in kg.vertices if lab[v] == node.b]
        edges.update(frozenset((x, y)) for x in side_a for y in side_b)
    return LabeledGraph(kg.vertices, lab, edges)


def _annotate(e: KExpression) -> dict[int, LabeledGraph]:
    check_well_formed(e)
    memo: dict[int, LabeledGraph] = {}
    for node in _postorder(e):
        memo[id(node)] = _apply(node, [memo[id(c)] for c in _children(node)])
    return memo


def evaluate(e: KExpression) -> LabeledGraph:
    return _annotate(e)[id(e)]


# --------------------------------------------------------------------------
# expression trees

@dataclass
class TreeNode:
    kind: str  # "leaf", "union", "relabel", "insert"
    expr: KExpression
    children: list["TreeNode"] = field(default_factory=list)
    graph: LabeledGraph | None = None


@dataclass
class ExpressionTree:
    root: TreeNode

    def nodes(self) -> Iterator[TreeNode]:
        stack = [self.root]
        while stack:
            q = stack.pop()
            yield q
            stack.extend(reversed(q.children))

    @property
    def succinct(self) -> bool:
        return all(not (q.kind == "union" and any(c.kind == "union" for c in q.children))
                   for q in self.nodes())

    def count(self, kind: str) -> int:
        return sum(1 for q in self.nodes() if q.kind == kind)


_KIND = {Initial: "leaf", Union: "union", Relabel: "relabel", Insert: "insert"}


def to_succinct_tree(e: KExpression) -> ExpressionTree:
    """Parse tree with directly nested unions merged into one node; every
    node carries the labeled graph its subexpression builds."""
    memo = _annotate(e)
    built: dict[int, TreeNode] = {}
    for node in _postorder(e):
        q = TreeNode(_KIND[type(node)], node, graph=memo[id(node)])
        for c in _children(node):
            child = built.pop(id(c))
            if q.kind == "union" and child.kind == "union":
                q.children.extend(child.children)
            else:
                q.children.append(child)
        built[id(node)] = q
    return ExpressionTree(built[id(e)])


def expr_to_derivation(e: KExpression) -> Derivation:
    """Derivation read off the succinct expression tree: layer i collects the
    union nodes at union-depth t - i + 1 and the shallower leaves; components
    are their vertex sets and groups their label classes."""
    tree = to_succinct_tree(e)
    ids = vertex_ids(tree.root.graph.vertices)
    n = len(ids)
    unions: list[tuple[int, TreeNode]] = []
    leaf_depth: list[tuple[int, TreeNode]] = []
    stack = [(tree.root, 0)]
    while stack:
        q, r = stack.pop()
        if q.kind == "union":
            r += 1
            unions.append((r, q))
        elif q.kind == "leaf":
            leaf_depth.append((r, q))
        stack.extend((c, r) for c in q.children)
    t = max(r for r, _ in leaf_depth)
    templates = []
    for i in range(t + 1):
        depth = t - i + 1
        cmp, grp = [], []
        for r, q in unions:
            if r == depth:
                cmp.append([ids[v] for v in q.graph.vertices])
                grp.extend([ids[v] for v in cls] for cls in q.graph.classes().values())
        for r, q in leaf_depth:
            if r < depth:
                v = ids[q.expr.vertex]
                cmp.append([v])
                grp.append([v])
        templates.append(Template.from_lists(n, cmp, grp))
    return Derivation(tuple(templates))


def _wrap(child: KExpression, ops: list[tuple[str, int, int]]) -> KExpression:
    for op, a, b in ops:
        child = Relabel(a, b, child) if op == "rho" else Insert(a, b, child)
    return child


def derivation_to_expr(d: Derivation, g: Graph) -> KExpression:
    """k-expression for ``g`` from a k-derivation of it.

    One union node per component of each template of the strict form,
    children being the components it absorbs. Labels are fixed top-down:
    in every node a group of the template gets one label, a child reuses its
    parent's label for the first of its groups inside each parent group and
    free labels for the rest, which a relabel then folds in. Each edge is
    inserted right above the lowest union joining its ends.
    """
    rep = validate_derivation(d)
    if rep.ok:
        rep = check_models(d, g)
    if not rep.ok:
        raise DerivationError(f"not a derivation of the graph: {rep.summary()}")
    d = make_strict(d, g)
    k = max(d.width(), 1)
    t = d.t

    # labels[(i, comp)] : group -> label, for comp in cmp(T_i)
    labels: dict[tuple[int, tuple[int, ...]], dict[tuple[int, ...], int]] = {}
    relabels: dict[tuple[int, tuple[int, ...]], list[tuple[str, int, int]]] = {}
    root = d[t].cmp.blocks[0]
    labels[(t, root)] = {grp: a for a, grp in enumerate(d[t].groups_in(root), 1)}
    for i in range(t, 0, -1):
        tpl, below = d[i], d[i - 1]
        for comp in tpl.cmp.blocks:
            mu = labels[(i, comp)]
            for child in (c for c in below.cmp.blocks if c[0] in comp and set(c) <= set(comp)):
                groups = below.groups_in(child)
                primary, extra = {}, []
                for grp in groups:
                    parent = tpl.grp.block(grp[0])
                    if parent in primary:
                        extra.append((grp, mu[parent]))
                    else:
                        primary[parent] = grp
                lab = {grp: mu[parent] for parent, grp in primary.items()}
                free = (a for a in range(1, k + 1) if a not in lab.values())
                ops = []
                for grp, target in extra:
                    a = next(free, None)
                    if a is None:
                        raise InvariantError("ran out of labels while relabeling")
                    lab[grp] = a
                    ops.append(("rho", a, target))
                labels[(i - 1, child)] = lab
                relabels[(i - 1, child)] = ops

    def label_of(i: int, v: int) -> int:
        comp = d[i].cmp.block(v)
        return labels[(i, comp)][d[i].grp.block(v)]

    inserts: dict[tuple[int, tuple[int, ...]], list[tuple[str, int, int]]] = {}
    for u, v in g.sorted_edges():
        i = next(j for j in range(1, t + 1) if d[j].cmp.same(u, v))
        a, b = label_of(i, u), label_of(i, v)
        if a == b:
            raise InvariantError(f"edge {u}{v} joins two vertices of one group")
        comp = d[i].cmp.block(u)
        ops = inserts.setdefault((i, comp), [])
        pair = ("eta", min(a, b), max(a, b))
        if pair in ops:
            continue
        lab = labels[(i, comp)]
        side_a = [x for grp, x_lab in lab.items() if x_lab == pair[1] for x in grp]
        side_b = [x for grp, x_lab in lab.items() if x_lab == pair[2] for x in grp]
        for x in side_a:
            for y in side_b:
                if not g.adjacent(x, y):
                    raise InvariantError(f"inserting {pair} at T{i} would add non-edge {x}{y}")
        ops.append(pair)

    built: dict[tuple[int, tuple[int, ...]], KExpression] = {}
    for v in range(d.n):
        built[(0, (v,))] = Initial(labels[(0, (v,))][(v,)], str(v))
    for i in range(1, t + 1):
        for comp in d[i].cmp.blocks:
            kids = [c for c in d[i - 1].cmp.blocks if set(c) <= set(comp)]
            parts = [_wrap(built.pop((i - 1, c)), relabels[(i - 1, c)]) for c in kids]
            node = parts[0] if len(parts) == 1 else Union(tuple(parts))
            built[(i, comp)] = _wrap(node, inserts.get((i, comp), []))
    return built[(t, root)]


def verify_expression(e: KExpression, g: Graph, k: int) -> bool:
    try:
        check_well_formed(e)
    except ExpressionError:
        return False
    if max_labels(e) > k:
        return False
    lg = evaluate(e)
    if len(lg.vertices) != g.n:
        return False
    ids = lg.vertex_ids()
    if sorted(ids.values()) != list(range(g.n)):
        return False
    return lg.underlying().edges == g.edges
