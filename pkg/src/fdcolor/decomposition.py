"""Neighbor choice, labeled functional digraph, label classes and cycle breaking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import Graph
from .randomness import VertexRandomness


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledDigraph:
    """Out-edge ``x -> head[x]`` with label ``label[x]``; ``None`` for no out-edge.

    Edges whose tail is in ``marked`` were removed by cycle breaking; they are
    kept in ``head``/``label`` so the digraph before removal stays visible.
    """

    graph: Graph
    head: tuple[int | None, ...]
    label: tuple[int | None, ...]
    marked: frozenset[int] = frozenset()

    @property
    def n(self) -> int:
        return len(self.head)

    def out_edge(self, x: int) -> tuple[int, int] | None:
        if self.head[x] is None or x in self.marked:
            return None
        return self.head[x], self.label[x]

    def edges(self) -> list[tuple[int, int, int]]:
        """Surviving edges as ``(tail, head, label)``."""
        return [(x, h, self.label[x]) for x, h in enumerate(self.head)
                if h is not None and x not in self.marked]

    def in_edges(self) -> list[list[int]]:
        ins: list[list[int]] = [[] for _ in range(self.n)]
        for x, h, _ in self.edges():
            ins[h].append(x)
        return ins

    def undirected_edges(self) -> set[tuple[int, int]]:
        return {(min(x, h), max(x, h)) for x, h, _ in self.edges()}

    def dump(self) -> str:
        lines = []
        for x, h in enumerate(self.head):
            if h is None:
                continue
            mark = " [marked]" if x in self.marked else ""
            lines.append(f"{x} -> {h} [label {self.label[x]}]{mark}")
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class Component:
    vertices: tuple[int, ...]
    cyclic: bool

    def __len__(self):
        return len(self.vertices)


def strip_isolated(g: Graph, rnd: VertexRandomness, q: int, arity: int,
                   level: int | None = None, active: Iterable[int] | None = None):
    """Split off isolated vertices and give them uniform colors.

    Returns ``(active, precolored)``: the non-isolated vertices in increasing
    order and a map from each isolated vertex to ``arity`` independent
    uniform symbols in ``1..q``. The graph itself is not relabeled, so the
    residual graph is ``g`` restricted to ``active``.
    """
    level = arity if level is None else level
    candidates = range(g.n) if active is None else sorted(active)
    keep, pre = [], {}
    for v in candidates:
        if g.degree(v):
            keep.append(v)
        else:
            pre[v] = tuple(rnd.uniform_choice(v, f"iso/{level}", c, q) + 1 for c in range(arity))
    return tuple(keep), pre


def build_labeled_digraph(g: Graph, d: int, rnd: VertexRandomness,
                          level: int | None = None,
                          active: Sequence[int] | None = None) -> LabeledDigraph:
    """Every vertex picks a uniform neighbor ``h(x)``; the edge gets label ``o_{h(x)}(x)``.

    ``o_y`` is a uniform injection of the neighbors of ``y`` into ``{1..d}``.
    Everything decided at ``x`` reads only the streams of ``x`` and its
    neighbors.
    """
    level = d if level is None else level
    verts = range(g.n) if active is None else active
    head: list[int | None] = [None] * g.n
    label: list[int | None] = [None] * g.n
    inj: dict[int, dict[int, int]] = {}
    for x in verts:
        nbrs = g.neighbors(x)
        if not nbrs:
            raise DecompositionError(f"vertex {x} is isolated; strip isolated vertices first")
        if len(nbrs) > d:
            raise DecompositionError(f"vertex {x} has degree {len(nbrs)} > {d}")
        head[x] = nbrs[rnd.uniform_choice(x, f"h/{level}", 0, len(nbrs))]
    for x in verts:
        y = head[x]
        if y not in inj:
            inj[y] = rnd.random_injection(y, g.neighbors(y), d, tag=f"o/{level}")
        label[x] = inj[y][x]
    return LabeledDigraph(g, tuple(head), tuple(label))


def extract_components(dg: LabeledDigraph, i: int) -> list[Component]:
    """Maximal directed paths and cycles formed by the surviving label-``i`` edges.

    Paths are listed from source to sink, cycles from their smallest vertex
    along the edge direction; components are ordered by first vertex.
    """
    out: dict[int, int] = {}
    inn: dict[int, int] = {}
    for x, h, lab in dg.edges():
        if lab == i:
            out[x] = h
            if h in inn:
                raise DecompositionError(f"two label-{i} edges enter vertex {h}")
            inn[h] = x
    seen: set[int] = set()
    comps = []
    for v in sorted(set(out) | set(inn)):
        if v in inn or v in seen:
            continue
        chain = [v]
        while chain[-1] in out:
            chain.append(out[chain[-1]])
        seen.update(chain)
        comps.append(Component(tuple(chain), False))
    for v in sorted(out):
        if v in seen:
            continue
        cyc = [v]
        while out[cyc[-1]] != v:
            cyc.append(out[cyc[-1]])
        seen.update(cyc)
        comps.append(Component(tuple(cyc), True))
    comps.sort(key=lambda c: c.vertices[0])
    return comps


def xi_key(rnd: VertexRandomness, x: int, level: int) -> tuple[float, int]:
    # ties are broken by vertex id
    return rnd.uniform(x, f"xi/{level}", 0), x


def marked_edges(head: Sequence[int | None], keys: Sequence) -> frozenset[int]:
    """Tails ``x`` (with indegree >= 1) whose head is a local maximum of ``keys``
    on the directed path ``x -> h(x) -> h(h(x))``."""
    indeg = [0] * len(head)
    for h in head:
        if h is not None:
            indeg[h] += 1
    marked = set()
    for x, h in enumerate(head):
        if h is None or indeg[x] == 0:
            continue
        hh = head[h]
        if keys[h] > keys[x] and keys[h] > keys[hh]:
            marked.add(x)
    return frozenset(marked)


def break_cycles(dg: LabeledDigraph, rnd: VertexRandomness,
                 level: int | None = None,
                 active: Sequence[int] | None = None) -> LabeledDigraph:
    """Remove marked edges so that no directed cycle and no isolated vertex remains.

    Whether ``(x, h(x))`` is marked depends on the labels at ``x``, ``h(x)``
    and ``h(h(x))`` only.
    """
    if active is None:
        active = [x for x in range(dg.n) if dg.graph.degree(x)]
    for x in active:
        if dg.head[x] is None:
            raise DecompositionError(f"vertex {x} has outdegree 0")
    if level is None:
        level = dg.graph.max_degree_bound
    keys: list = [None] * dg.n
    for x in active:
        keys[x] = xi_key(rnd, x, level)
    return LabeledDigraph(dg.graph, dg.head, dg.label, marked_edges(dg.head, keys))


def directed_cycles(dg: LabeledDigraph) -> list[tuple[int, ...]]:
    """Directed cycles among surviving edges (each listed once)."""
    nxt = {x: h for x, h, _ in dg.edges()}
    state: dict[int, int] = {}
    cycles = []
    for s in nxt:
        if s in state:
            continue
        path = []
        v = s
        while v in nxt and v not in state:
            state[v] = 1
            path.append(v)
            v = nxt[v]
        if v in state and state[v] == 1:
            cycles.append(tuple(path[path.index(v):]))
        for u in path:
            state[u] = 2
    return cycles


def functional_digraph(head: Sequence[int], labels: Sequence[int] | None = None) -> LabeledDigraph:
    """Wrap an arbitrary outdegree-1 map as a labeled digraph over its own graph."""
    from .graph import build_graph

    n = len(head)
    und = sorted({(min(x, h), max(x, h)) for x, h in enumerate(head)})
    g = build_graph(und, n)
    if labels is None:
        labels = [1] * n
    return LabeledDigraph(g, tuple(head), tuple(labels))
