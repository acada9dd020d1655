"""Finite simple graphs, generators, distances and edge-list ingestion."""

from __future__ import annotations

import math
import random
import re
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Invalid graph input (bad edge, bad file, infeasible generator)."""


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]
    max_degree_bound: int

    def __post_init__(self):
        if len(self.adjacency) != self.vertex_count:
            raise GraphError("adjacency length does not match vertex_count")
        for v, nbrs in enumerate(self.adjacency):
            if v in nbrs:
                raise GraphError(f"self-loop at vertex {v}")
            if len(set(nbrs)) != len(nbrs):
                raise GraphError(f"parallel edge at vertex {v}")
            if len(nbrs) > self.max_degree_bound:
                raise GraphError(
                    f"vertex {v} has degree {len(nbrs)} > bound {self.max_degree_bound}"
                )
            for u in nbrs:
                if v not in self.adjacency[u]:
                    raise GraphError(f"asymmetric adjacency between {v} and {u}")

    @property
    def n(self) -> int:
        return self.vertex_count

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def without_edges(self, removed: Iterable[tuple[int, int]]) -> "Graph":
        """Same vertex set and degree bound, with the given undirected edges deleted."""
        gone = {(min(u, v), max(u, v)) for u, v in removed}
        adj = tuple(
            tuple(u for u in nbrs if (min(u, v), max(u, v)) not in gone)
            for v, nbrs in enumerate(self.adjacency)
        )
        return Graph(self.n, adj, self.max_degree_bound)

    def distances_from(self, sources: Iterable[int]) -> list[float]:
        """Multi-source BFS distances; unreachable vertices get ``math.inf``."""
        dist = [math.inf] * self.n
        queue = deque()
        for s in sources:
            if dist[s] != 0:
                dist[s] = 0
                queue.append(s)
        while queue:
            v = queue.popleft()
            for u in self.adjacency[v]:
                if dist[u] == math.inf:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        return dist

    def ball(self, center: int, radius: int) -> set[int]:
        d = self.distances_from([center])
        return {v for v in range(self.n) if d[v] <= radius}

    def describe(self) -> dict:
        return {
            "vertices": self.n,
            "edges": self.edge_count,
            "max_degree": self.max_degree(),
            "degree_bound": self.max_degree_bound,
        }


def build_graph(edges: Iterable[Sequence[int]], vertex_count: int,
                degree_bound: int | None = None) -> Graph:
    """Build a graph from vertex-id pairs.

    Duplicate edges (in either orientation) and self-loops are rejected. The
    degree bound defaults to the observed maximum degree.
    """
    if vertex_count < 0:
        raise GraphError("vertex_count must be non-negative")
    nbrs: list[list[int]] = [[] for _ in range(vertex_count)]
    seen: set[tuple[int, int]] = set()
    for lineno, pair in enumerate(edges):
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise GraphError(f"edge #{lineno} ({u}, {v}) out of range 0..{vertex_count - 1}")
        if u == v:
            raise GraphError(f"edge #{lineno} is a self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"edge #{lineno} ({u}, {v}) is a duplicate")
        seen.add(key)
        nbrs[u].append(v)
        nbrs[v].append(u)
    observed = max((len(a) for a in nbrs), default=0)
    if degree_bound is None:
        degree_bound = observed
    elif degree_bound < observed:
        raise GraphError(f"degree bound {degree_bound} below observed max degree {observed}")
    return Graph(vertex_count, tuple(tuple(sorted(a)) for a in nbrs), degree_bound)


def set_distance(g: Graph, a: Iterable[int], b: Iterable[int]) -> float:
    """Minimum shortest-path distance between two vertex sets (``math.inf`` if disconnected)."""
    a, b = set(a), set(b)
    if not a or not b:
        raise GraphError("set_distance needs two non-empty vertex sets")
    dist = g.distances_from(a)
    return min(dist[v] for v in b)


# -- generators --------------------------------------------------------------

def path_graph(n: int) -> Graph:
    if n < 1:
        raise GraphError("path needs n >= 1")
    return build_graph([(i, i + 1) for i in range(n - 1)], n)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return build_graph([(i, (i + 1) % n) for i in range(n)], n)


def torus_graph(w: int, h: int) -> Graph:
    if w < 3 or h < 3:
        raise GraphError("torus dimensions must be >= 3")
    edges = []
    for y in range(h):
        for x in range(w):
            v = y * w + x
            edges.append((v, y * w + (x + 1) % w))
            edges.append((v, ((y + 1) % h) * w + x))
    return build_graph(edges, w * h)


def tree_graph(d: int, depth: int) -> Graph:
    """The d-regular tree truncated at the given depth (root has d children, others d-1)."""
    if d < 1 or depth < 0:
        raise GraphError("tree needs d >= 1 and depth >= 0")
    edges = []
    frontier = [0]
    count = 1
    for level in range(depth):
        nxt = []
        for v in frontier:
            for _ in range(d if level == 0 else d - 1):
                edges.append((v, count))
                nxt.append(count)
                count += 1
        frontier = nxt
    return build_graph(edges, count, degree_bound=max(d, 0) if depth > 0 else 0)


def random_regular_graph(n: int, d: int, seed: int) -> Graph:
    """Uniform-ish random simple d-regular graph by the pairing model with restarts."""
    if n < 1 or d < 0 or d >= n:
        raise GraphError("random regular graph needs 0 <= d < n")
    if (n * d) % 2:
        raise GraphError(f"no {d}-regular graph on {n} vertices (n*d odd)")
    rng = random.Random(seed)
    for _ in range(10_000):
        points = [v for v in range(n) for _ in range(d)]
        rng.shuffle(points)
        pairs = list(zip(points[::2], points[1::2]))
        keys = {(min(u, v), max(u, v)) for u, v in pairs}
        if len(keys) == len(pairs) and all(u != v for u, v in pairs):
            return build_graph(sorted(keys), n)
    raise GraphError(f"pairing model failed for n={n}, d={d}")


_GEN_RE = re.compile(r"^(path|cycle|torus|random_regular|tree):(.+)$")


def generate(kind: str, seed: int = 0) -> Graph:
    """Build a graph from a generator spec string.

    Forms: ``path:N``, ``cycle:N``, ``torus:WxH``, ``random_regular:N:D`` and
    ``tree:D:DEPTH``.
    """
    m = _GEN_RE.match(kind.strip())
    if not m:
        raise GraphError(f"unknown generator spec {kind!r}")
    name, args = m.groups()
    try:
        if name == "path":
            return path_graph(int(args))
        if name == "cycle":
            return cycle_graph(int(args))
        if name == "torus":
            w, h = args.lower().split("x")
            return torus_graph(int(w), int(h))
        if name == "random_regular":
            n, d = args.split(":")
            return random_regular_graph(int(n), int(d), seed)
        d, depth = args.split(":")
        return tree_graph(int(d), int(depth))
    except ValueError as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"bad generator arguments in {kind!r}") from exc


# -- edge-list files ---------------------------------------------------------

def parse_edge_list(text: str) -> tuple[Graph, list[str]]:
    """Parse ``u v`` lines with ``#`` comments and an optional ``n <count>`` header.

    External labels are mapped to dense ids in first-seen order; the returned
    list gives the label of every id. With an ``n`` header and purely integer
    labels in range, ids are the integers themselves.
    """
    header_n = None
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n" and len(parts) == 2 and header_n is None and not pairs:
            try:
                header_n = int(parts[1])
            except ValueError:
                raise GraphError(f"line {lineno}: bad vertex count {parts[1]!r}") from None
            if header_n < 0:
                raise GraphError(f"line {lineno}: negative vertex count")
            continue
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {raw.strip()!r}")
        pairs.append((parts[0], parts[1]))

    if header_n is not None and all(p.isdigit() for pair in pairs for p in pair):
        labels = [str(i) for i in range(header_n)]
        try:
            g = build_graph([(int(u), int(v)) for u, v in pairs], header_n)
        except GraphError as exc:
            raise GraphError(f"edge list: {exc}") from None
        return g, labels

    ids: dict[str, int] = {}
    for pair in pairs:
        for p in pair:
            ids.setdefault(p, len(ids))
    n = len(ids)
    if header_n is not None:
        if header_n < n:
            raise GraphError(f"header declares {header_n} vertices but {n} labels appear")
        extra = header_n - n
        for i in range(extra):
            ids.setdefault(f"_isolated{i}", len(ids))
        n = header_n
    try:
        g = build_graph([(ids[u], ids[v]) for u, v in pairs], n)
    except GraphError as exc:
        raise GraphError(f"edge list: {exc}") from None
    return g, list(ids)


def read_edge_list(path: str | Path) -> tuple[Graph, list[str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GraphError(f"cannot read edge list {path}: {exc}") from None
    return parse_edge_list(text)


def write_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"
