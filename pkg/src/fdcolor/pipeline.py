"""The two recursive coloring constructions.

At each level, with residual degree bound ``delta``, isolated vertices are
colored uniformly and set aside, every other vertex picks a labeled out-edge,
the label classes are colored as lines, and the undirected version of the
used edges is deleted before recursing on ``delta - 1``. A vertex's color is
the concatenation of its level blocks, deepest level first, so the block for
level ``delta`` occupies coordinates ``delta*(delta-1)/2 .. delta*(delta+1)/2 - 1``.

``invariant``: label classes of the full digraph, 3 colors, cycles colored by
the cyclic insertion law. ``fiid``: marked edges are removed first so label
classes are paths, 4 colors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .decomposition import (
    Component,
    LabeledDigraph,
    break_cycles,
    build_labeled_digraph,
    extract_components,
    strip_isolated,
)
from .graph import Graph
from .insertion import CYCLE, PATH, VertexStream, sample_line
from .randomness import VertexRandomness

INVARIANT = "invariant"
FIID = "fiid"
VARIANTS = (INVARIANT, FIID)
PALETTE = {INVARIANT: 3, FIID: 4}


class ColoringError(ValueError):
    pass


def arity(d: int) -> int:
    return d * (d + 1) // 2


def block_offset(level: int) -> int:
    return level * (level - 1) // 2


@dataclass
class LevelRecord:
    level: int
    stripped: tuple[int, ...]
    digraph: LabeledDigraph | None
    components: dict[int, list[Component]] = field(default_factory=dict)


@dataclass
class ColorAssignment:
    variant: str
    q: int
    d: int
    colors: tuple[tuple[int, ...], ...]
    levels: list[LevelRecord] = field(default_factory=list)
    seed: int | None = None

    @property
    def n(self) -> int:
        return len(self.colors)

    def block(self, v: int, level: int) -> tuple[int, ...]:
        off = block_offset(level)
        return self.colors[v][off:off + level]

    def flattened(self) -> list[int]:
        return flatten(self.colors, self.q)


def flatten(tuples: Sequence[Sequence[int]], q: int) -> list[int]:
    """Base-``q`` encoding of equal-length symbol tuples (symbols ``1..q``)."""
    if not tuples:
        return []
    width = len(tuples[0])
    out = []
    for t in tuples:
        if len(t) != width:
            raise ColoringError("ragged color tuples")
        code = 0
        for c in t:
            if not 1 <= c <= q:
                raise ColoringError(f"symbol {c} outside 1..{q}")
            code = code * q + (c - 1)
        out.append(code)
    return out


def unflatten(code: int, q: int, width: int) -> tuple[int, ...]:
    digits = []
    for _ in range(width):
        code, r = divmod(code, q)
        digits.append(r + 1)
    return tuple(reversed(digits))


def color_component(comp: Component, q: int, rnd: VertexRandomness,
                    level: int, label: int) -> dict[int, int]:
    """Insertion coloring of one label-class component, keyed by vertex."""
    verts = comp.vertices
    if comp.cyclic and len(verts) == 2:
        # drop one of the two edges at random and color the remaining path
        if rnd.uniform_choice(verts[0], f"cut/{level}/{label}", 0, 2):
            verts = verts[::-1]
        topology = PATH
    else:
        topology = CYCLE if comp.cyclic else PATH
    stream = VertexStream(rnd, verts, f"insert/{level}/{label}")
    line = sample_line(topology, len(verts), q, stream)
    return dict(zip(verts, line.colors))


def _color(g: Graph, rnd: VertexRandomness, variant: str, d: int | None,
           keep_levels: bool) -> ColorAssignment:
    if variant not in VARIANTS:
        raise ColoringError(f"unknown variant {variant!r}")
    d = g.max_degree_bound if d is None else d
    if g.max_degree() > d:
        raise ColoringError(f"graph has degree {g.max_degree()} > bound {d}")
    q = PALETTE[variant]
    colors = [[0] * arity(d) for _ in range(g.n)]
    levels = []
    current = g
    active: Sequence[int] = range(g.n)
    for level in range(d, 0, -1):
        active, pre = strip_isolated(current, rnd, q, arity(level), level=level, active=active)
        for v, sym in pre.items():
            colors[v][:arity(level)] = sym
        record = LevelRecord(level, tuple(sorted(pre)), None)
        if keep_levels:
            levels.append(record)
        if not active:
            break
        dg = build_labeled_digraph(current, level, rnd, level=level, active=active)
        if variant == FIID:
            dg = break_cycles(dg, rnd, level=level, active=active)
        record.digraph = dg
        off = block_offset(level)
        for i in range(1, level + 1):
            comps = extract_components(dg, i)
            record.components[i] = comps
            covered = set()
            for comp in comps:
                if comp.cyclic and variant == FIID:
                    raise ColoringError("directed cycle survived cycle breaking")
                for v, c in color_component(comp, q, rnd, level, i).items():
                    colors[v][off + i - 1] = c
                    covered.add(v)
            for v in active:
                if v not in covered:
                    colors[v][off + i - 1] = rnd.uniform_choice(v, f"off/{level}/{i}", 0, q) + 1
        current = current.without_edges(dg.undirected_edges())
    return ColorAssignment(variant, q, d, tuple(tuple(c) for c in colors), levels, rnd.seed)


def color_invariant(g: Graph, rnd: VertexRandomness, d: int | None = None,
                    keep_levels: bool = True) -> ColorAssignment:
    """2-dependent proper coloring with ``3**(d(d+1)/2)`` colors."""
    return _color(g, rnd, INVARIANT, d, keep_levels)


def color_fiid(g: Graph, rnd: VertexRandomness, d: int | None = None,
               keep_levels: bool = True) -> ColorAssignment:
    """4-dependent finitary-factor proper coloring with ``4**(d(d+1)/2)`` colors."""
    return _color(g, rnd, FIID, d, keep_levels)


def color(g: Graph, rnd: VertexRandomness, variant: str, d: int | None = None,
          keep_levels: bool = True) -> ColorAssignment:
    return _color(g, rnd, variant, d, keep_levels)
