"""Exact joint law of the coloring constructions on tiny graphs.

The law is held as a mixture DAG rather than a table: a node is a residual
edge set at a given level, and each branch of a node records the label-class
components chosen at that level, the exact probability of that choice, and
the residual child node. Every branch accumulates over all neighbor choices,
all injections and, for the ``fiid`` variant, all rank orders of the cycle
breaking labels, so all weights are exact rationals.

Given the branch, coordinates are independent across labels and levels, and
within a coordinate they factor over components. That makes any expectation of
a product of per-coordinate functions cheap (``contract``); dense marginal
tables are built only for small vertex sets.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .decomposition import marked_edges
from .graph import Graph
from .insertion import CYCLE, PATH, exact_line_distribution
from .pipeline import FIID, PALETTE, VARIANTS, arity, block_offset

DEFAULT_MAX_VERTICES = 6
DEFAULT_MAX_EDGES = 8
DEFAULT_DENSE_CAP = 20_000


class ExactCapError(ValueError):
    """Instance too large for exact enumeration."""


# component as (vertices, topology); 2-cycles are stored as 2-vertex paths
Comp = tuple[tuple[int, ...], str]


@dataclass(frozen=True)
class Branch:
    weight: Fraction
    classes: tuple[tuple[Comp, ...], ...]  # index i-1 -> components of label i
    child: tuple[frozenset, int] | None


def _adjacency(n: int, edges: frozenset) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for a in adj:
        a.sort()
    return adj


def _classes(n: int, level: int, tails: Sequence[int], head, label) -> tuple:
    out = []
    for i in range(1, level + 1):
        nxt = {x: head[x] for x in tails if label[x] == i}
        prv = {h: x for x, h in nxt.items()}
        seen = set()
        comps = []
        for v in sorted(set(nxt) | set(prv)):
            if v in prv or v in seen:
                continue
            chain = [v]
            while chain[-1] in nxt:
                chain.append(nxt[chain[-1]])
            seen.update(chain)
            comps.append((tuple(chain), PATH))
        for v in sorted(nxt):
            if v in seen:
                continue
            cyc = [v]
            while nxt[cyc[-1]] != v:
                cyc.append(nxt[cyc[-1]])
            seen.update(cyc)
            comps.append((tuple(cyc), CYCLE if len(cyc) > 2 else PATH))
        out.append(tuple(sorted(comps)))
    return tuple(out)


def _marking_law(head: dict[int, int], active: Sequence[int]) -> list[tuple[frozenset, Fraction]]:
    """Law of the marked-edge set under iid continuous cycle-breaking labels.

    Only vertices that occur in some marking predicate are ranked; labels of
    the others cannot affect the outcome.
    """
    indeg = defaultdict(int)
    for x in active:
        indeg[head[x]] += 1
    relevant = sorted({v for x in active if indeg[x] for v in (x, head[x], head[head[x]])})
    if not relevant:
        return [(frozenset(), Fraction(1))]
    n = max(active) + 1
    hd = [head.get(x) for x in range(n)]
    counts: dict[frozenset, int] = defaultdict(int)
    for perm in itertools.permutations(range(len(relevant))):
        keys = [0] * n
        for v, r in zip(relevant, perm):
            keys[v] = r + 1
        counts[marked_edges(hd, keys)] += 1
    total = math.factorial(len(relevant))
    return [(m, Fraction(c, total)) for m, c in sorted(counts.items(), key=lambda kv: sorted(kv[0]))]


class ExactJoint:
    """Exact law of ``color(g, ., variant)`` summed over all internal randomness."""

    def __init__(self, g: Graph, variant: str, d: int | None = None):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.graph = g
        self.variant = variant
        self.d = g.max_degree_bound if d is None else d
        self.q = PALETTE[variant]
        self.arity = arity(self.d)
        self.nodes: dict[tuple[frozenset, int], list[Branch]] = {}
        self.root = (frozenset(g.edges()), self.d) if self.d else None
        if self.root is not None:
            self._expand(self.root)

    # -- structure -----------------------------------------------------------

    def _expand(self, key):
        stack = [key]
        while stack:
            k = stack.pop()
            if k in self.nodes or k[1] == 0:
                continue
            self.nodes[k] = branches = self._branches(*k)
            for b in branches:
                if b.child is not None and b.child not in self.nodes:
                    stack.append(b.child)

    def _branches(self, edges: frozenset, level: int) -> list[Branch]:
        n = self.graph.n
        adj = _adjacency(n, edges)
        active = [x for x in range(n) if adj[x]]
        child_level = level - 1
        if not active:
            return [Branch(Fraction(1), tuple(() for _ in range(level)),
                           (edges, child_level) if child_level else None)]
        acc: dict[tuple, Fraction] = defaultdict(Fraction)
        p_h = Fraction(1, math.prod(len(adj[x]) for x in active))
        for choice in itertools.product(*(adj[x] for x in active)):
            head = dict(zip(active, choice))
            ins = defaultdict(list)
            for x in active:
                ins[head[x]].append(x)
            if self.variant == FIID:
                markings = _marking_law(head, active)
            else:
                markings = [(frozenset(), Fraction(1))]
            targets = sorted(ins)
            p_inj = Fraction(1, math.prod(math.perm(level, len(ins[y])) for y in targets))
            options = [list(itertools.permutations(range(1, level + 1), len(ins[y]))) for y in targets]
            for labs in itertools.product(*options):
                label = {}
                for y, lab in zip(targets, labs):
                    for x, l in zip(ins[y], lab):
                        label[x] = l
                for marked, p_m in markings:
                    tails = [x for x in active if x not in marked]
                    classes = _classes(n, level, tails, head, label)
                    used = {(min(x, head[x]), max(x, head[x])) for x in tails}
                    child = (edges - used, child_level) if child_level else None
                    acc[(classes, child)] += p_h * p_inj * p_m
        return [Branch(w, c, ch) for (c, ch), w in acc.items()]

    @property
    def branch_count(self) -> int:
        return sum(len(b) for b in self.nodes.values())

    # -- per-coordinate laws ---------------------------------------------------

    def coordinate_law(self, comps: tuple[Comp, ...], S: tuple[int, ...]) -> tuple[np.ndarray, int]:
        """Law of one coordinate restricted to ``S`` given the label-class components,
        as an integer table and its denominator."""
        return _coordinate_law(comps, S, self.q)

    def contract(self, S: Sequence[int], factors: dict[int, np.ndarray]) -> Fraction:
        """``E[prod_c f_c(X_{S,c})]`` for per-coordinate weight tensors.

        ``factors[c]`` has shape ``(q,)*len(S)`` and weights coordinate ``c``
        jointly over ``S``; missing coordinates get weight 1.
        """
        S = tuple(S)
        memo: dict = {}

        def node_value(key) -> Fraction:
            if key is None:
                return Fraction(1)
            if key in memo:
                return memo[key]
            level = key[1]
            off = block_offset(level)
            total = Fraction(0)
            for b in self.nodes[key]:
                num, den = b.weight.numerator, b.weight.denominator
                for i, comps in enumerate(b.classes, 1):
                    f = factors.get(off + i - 1)
                    if f is None:
                        continue
                    law, law_den = self.coordinate_law(comps, S)
                    num *= (law * f).sum()
                    den *= law_den
                    if num == 0:
                        break
                if num:
                    total += Fraction(num, den) * node_value(b.child)
            memo[key] = total
            return total

        return node_value(self.root)

    def total_mass(self) -> Fraction:
        return self.contract((), {})

    def prob_equal(self, u: int, v: int) -> Fraction:
        """Probability that ``u`` and ``v`` receive the same color tuple."""
        eye = np.eye(self.q, dtype=object)
        return self.contract((u, v), {c: eye for c in range(self.arity)})

    def coordinate_prob_equal(self, u: int, v: int, c: int) -> Fraction:
        return self.contract((u, v), {c: np.eye(self.q, dtype=object)})

    def product_moment(self, vectors: dict[int, np.ndarray]) -> Fraction:
        """``E[prod_{v,c} vectors[v][c, X_{v,c} - 1]]`` for integer weight vectors."""
        S = tuple(sorted(vectors))
        factors = {}
        for c in range(self.arity):
            t = np.ones((), dtype=object)
            for v in S:
                t = np.multiply.outer(t, vectors[v][c].astype(object))
            factors[c] = t
        return self.contract(S, factors)

    # -- dense tables ----------------------------------------------------------

    def marginal_size(self, S: Sequence[int], coords: Sequence[int] | None = None) -> int:
        width = self.arity if coords is None else len(coords)
        return self.q ** (width * len(S))

    def marginal(self, S: Sequence[int], cap: int = DEFAULT_DENSE_CAP,
                 coords: Sequence[int] | None = None) -> np.ndarray:
        """Dense law of the color tuples on ``S`` as an array of Fractions.

        Axis ``s * w + j`` is coordinate ``coords[j]`` of vertex ``S[s]``
        (value ``x`` at index ``x - 1``), where ``coords`` defaults to all
        ``w = arity`` coordinates.
        """
        table, den = self.marginal_weights(S, cap, coords)
        return table * Fraction(1, den)

    def marginal_weights(self, S: Sequence[int], cap: int = DEFAULT_DENSE_CAP,
                         coords: Sequence[int] | None = None) -> tuple[np.ndarray, int]:
        """Like ``marginal`` but as an integer table and a common denominator."""
        S = tuple(S)
        coords = tuple(range(self.arity)) if coords is None else tuple(sorted(set(coords)))
        if any(not 0 <= c < self.arity for c in coords):
            raise ValueError(f"coordinates must lie in 0..{self.arity - 1}")
        if self.marginal_size(S, coords) > cap:
            raise ExactCapError(f"dense marginal on {len(S)} vertices needs "
                                f"{self.marginal_size(S, coords)} cells (cap {cap})")
        memo: dict = {}
        k = len(S)
        wanted = set(coords)

        # each node's table is held as (integer table, denominator)
        def node_table(key):
            if key is None:
                return np.ones((), dtype=object), 1
            if key in memo:
                return memo[key]
            level = key[1]
            off = block_offset(level)
            here = [i for i in range(level) if off + i in wanted]
            by_child: dict = {}
            for b in self.nodes[key]:
                block = np.ones((), dtype=object)
                den = b.weight.denominator
                for i in here:
                    law, law_den = self.coordinate_law(b.classes[i], S)
                    block = np.asarray(np.multiply.outer(block, law), dtype=object)
                    den *= law_den
                # axes (i, s) -> (s, i)
                block = np.asarray(block.transpose(_interleave(len(here), k)) * b.weight.numerator, dtype=object)
                by_child.setdefault(b.child, []).append((block, den))
            deeper = sum(1 for c in coords if c < off)
            order = []
            for s in range(k):
                order += [s * deeper + c for c in range(deeper)]
                order += [k * deeper + s * len(here) + i for i in range(len(here))]
            terms = []
            for child, blocks in by_child.items():
                den = math.lcm(*(d for _, d in blocks))
                block = np.asarray(sum(t * (den // d) for t, d in blocks), dtype=object)
                child_t, child_den = node_table(child)
                # axes (s, deeper coords) + (s, level coords) -> per vertex
                outer = np.asarray(np.multiply.outer(child_t, block), dtype=object)
                terms.append((outer.transpose(order), den * child_den))
            den = math.lcm(*(d for _, d in terms))
            table = np.asarray(sum(t * (den // d) for t, d in terms), dtype=object)
            g = math.gcd(den, *(int(x) for x in table.flat))
            if g > 1:
                table = table // g
                den //= g
            memo[key] = (table, den)
            return memo[key]

        return node_table(self.root)

    def joint_table(self, cap: int = DEFAULT_DENSE_CAP) -> dict[tuple[int, ...], Fraction]:
        """Full joint law keyed by the tuple of flattened colors of all vertices."""
        S = tuple(range(self.graph.n))
        t = self.marginal(S, cap)
        out = {}
        for idx in zip(*np.nonzero(t != 0)):
            codes = []
            for s in range(len(S)):
                code = 0
                for c in range(self.arity):
                    code = code * self.q + int(idx[s * self.arity + c])
                codes.append(code)
            out[tuple(codes)] = t[idx]
        return out


class LineJoint:
    """A line distribution viewed as a one-coordinate joint law on its graph.

    Lets the pipeline dependence checker run on the bare insertion measure.
    """

    def __init__(self, dist):
        from .graph import cycle_graph, path_graph

        self.dist = dist
        self.q = dist.q
        self.arity = 1
        cyclic = dist.topology == CYCLE and dist.n >= 3
        self.graph = cycle_graph(dist.n) if cyclic else path_graph(dist.n)

    def marginal_size(self, S: Sequence[int], coords=None) -> int:
        return self.q ** len(S)

    def marginal_weights(self, S: Sequence[int], cap: int = DEFAULT_DENSE_CAP,
                         coords=None) -> tuple[np.ndarray, int]:
        table = self.dist.dense().astype(object)
        S = tuple(S)
        rest = tuple(i for i in range(self.dist.n) if i not in S)
        m = table.sum(axis=rest) if rest else table
        order = sorted(S)
        return np.asarray(m, dtype=object).transpose([order.index(v) for v in S]), self.dist.total

    def product_moment(self, vectors: dict[int, np.ndarray]) -> Fraction:
        S = tuple(sorted(vectors))
        table, den = self.marginal_weights(S)
        t = table
        for v in reversed(S):
            t = t @ vectors[v][0].astype(object)
        return Fraction(int(t), den)


def _interleave(level: int, k: int) -> list[int]:
    return [i * k + s for s in range(k) for i in range(level)]


@lru_cache(maxsize=200_000)
def _coordinate_law(comps: tuple[Comp, ...], S: tuple[int, ...], q: int) -> tuple[np.ndarray, int]:
    t = np.ones((), dtype=object)
    den = 1
    axes: list[int] = []
    for verts, topo in comps:
        pos = [j for j, v in enumerate(verts) if v in S]
        if not pos:
            continue
        dist = exact_line_distribution(topo, len(verts), q)
        arr = np.zeros((q,) * len(pos), dtype=object)
        for x, w in dist.marginal_weights(pos).items():
            arr[tuple(c - 1 for c in x)] = w
        t = np.multiply.outer(t, arr)
        den *= dist.total
        axes += [verts[j] for j in pos]
    for v in S:
        if v not in axes:
            t = np.multiply.outer(t, np.ones(q, dtype=object))
            den *= q
            axes.append(v)
    if S:
        t = t.transpose([axes.index(v) for v in S])
    g = math.gcd(den, *(int(x) for x in t.flat))
    if g > 1:
        t = t // g
        den //= g
    return t, den


def _magnitude(x: int) -> str:
    return str(x) if x < 10**6 else f"about 10^{len(str(x)) - 1}"


def exact_pipeline_distribution(g: Graph, variant: str,
                                max_vertices: int = DEFAULT_MAX_VERTICES,
                                max_edges: int = DEFAULT_MAX_EDGES) -> ExactJoint:
    if g.n > max_vertices or g.edge_count > max_edges:
        choices = math.prod(max(g.degree(v), 1) for v in range(g.n))
        raise ExactCapError(
            f"graph with {g.n} vertices / {g.edge_count} edges exceeds the exact cap "
            f"({max_vertices} vertices, {max_edges} edges); top level alone has "
            f"{_magnitude(choices)} neighbor-choice combinations"
        )
    return ExactJoint(g, variant)


def random_test_vectors(S: Sequence[int], width: int, q: int, rng: random.Random,
                        bits: int = 40) -> dict[int, np.ndarray]:
    return {v: np.array([[rng.randrange(1, 1 << bits) for _ in range(q)] for _ in range(width)],
                        dtype=object)
            for v in S}
