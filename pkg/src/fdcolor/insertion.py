"""Insertion colorings of finite paths and cycles, with an exact oracle.

A coloring of length ``n`` is grown one symbol at a time: each new symbol
lands in a uniformly random gap of the current sequence with a uniformly
random color, and the run counts only if the new symbol differs from its
current neighbors. The law of a completed run is proportional to the number of
valid build orders ``W(x)``, computed exactly by deleting symbols in reverse.

Symbols are ``1..q``. Sequences on a cycle are read in the component's
direction starting from its first vertex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np

from .randomness import VertexRandomness

PATH = "path"
CYCLE = "cycle"
TOPOLOGIES = (PATH, CYCLE)
DEFAULT_ORACLE_CAP = 9
RESTART_CAP = 10**7


class OracleCapError(ValueError):
    """Requested exact computation exceeds the configured size cap."""


class Stream(Protocol):
    def choice(self, step: int, index: int, m: int) -> int: ...


class VertexStream:
    """Line randomness drawn from the component's own vertices.

    Step ``t`` of the construction reads the stream of ``vertices[t]``.
    """

    def __init__(self, rnd: VertexRandomness, vertices: Sequence[int], tag: str):
        self.rnd = rnd
        self.vertices = list(vertices)
        self.tag = tag

    def choice(self, step: int, index: int, m: int) -> int:
        return self.rnd.uniform_choice(self.vertices[step], self.tag, index, m)


class SeededStream(VertexStream):
    """Standalone stream for sampling a line that is not part of a graph."""

    def __init__(self, seed: int, n: int, tag: str = "insert"):
        super().__init__(VertexRandomness(seed), range(max(n, 1)), tag)


@dataclass(frozen=True)
class LineColoring:
    topology: str
    n: int
    q: int
    colors: tuple[int, ...]

    def is_proper(self) -> bool:
        return is_proper_line(self.colors, self.topology == CYCLE)


def is_proper_line(x: Sequence[int], cyclic: bool) -> bool:
    n = len(x)
    if any(x[i] == x[i + 1] for i in range(n - 1)):
        return False
    if cyclic and n >= 3 and x[0] == x[-1]:
        return False
    return True


def _check_args(topology: str, n: int, q: int):
    if topology not in TOPOLOGIES:
        raise ValueError(f"topology must be one of {TOPOLOGIES}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if q < 3:
        raise ValueError("q must be >= 3")


def sample_line(topology: str, n: int, q: int, stream: Stream,
                method: str = "sequential") -> LineColoring:
    """Sample the insertion coloring of a path or cycle of length ``n``.

    ``method="restart"`` runs the construction literally, discarding the whole
    run at the first conflict. ``method="sequential"`` draws the same law
    without rejection: on a proper sequence the number of valid
    (gap, color) moves depends only on the current length, so choosing a
    valid move uniformly at each step gives every valid run equal weight.
    """
    _check_args(topology, n, q)
    if topology == CYCLE and n < 3:
        raise ValueError("cycles shorter than 3 are colored as paths by the caller")
    if method == "sequential":
        seq = _grow_sequential(topology, n, q, stream)
    elif method == "restart":
        seq = _grow_restart(topology, n, q, stream)
    else:
        raise ValueError(f"unknown method {method!r}")
    if topology == CYCLE:
        r = stream.choice(0, 1, n)
        seq = seq[n - r:] + seq[:n - r]
    return LineColoring(topology, n, q, tuple(seq))


def _nth_color_avoiding(q: int, avoid: set[int], r: int) -> int:
    for c in range(1, q + 1):
        if c not in avoid:
            if r == 0:
                return c
            r -= 1
    raise AssertionError("color index out of range")


def _grow_sequential(topology: str, n: int, q: int, stream: Stream) -> list[int]:
    seq = [stream.choice(0, 0, q) + 1]
    for t in range(1, n):
        m = len(seq)
        if topology == PATH:
            r = stream.choice(t, 0, 2 * (q - 1) + (m - 1) * (q - 2))
            if r < q - 1:
                seq.insert(0, _nth_color_avoiding(q, {seq[0]}, r))
            elif r < 2 * (q - 1):
                seq.append(_nth_color_avoiding(q, {seq[-1]}, r - (q - 1)))
            else:
                r -= 2 * (q - 1)
                gap, c = divmod(r, q - 2)
                gap += 1
                seq.insert(gap, _nth_color_avoiding(q, {seq[gap - 1], seq[gap]}, c))
        elif m == 1:
            seq.append(_nth_color_avoiding(q, {seq[0]}, stream.choice(t, 0, q - 1)))
        else:
            gap, c = divmod(stream.choice(t, 0, m * (q - 2)), q - 2)
            seq.insert(gap + 1, _nth_color_avoiding(q, {seq[gap], seq[(gap + 1) % m]}, c))
    return seq


def _grow_restart(topology: str, n: int, q: int, stream: Stream) -> list[int]:
    for attempt in range(RESTART_CAP):
        base = 2 + 2 * attempt
        seq: list[int] = []
        for t in range(n):
            m = len(seq)
            gaps = m + 1 if topology == PATH else max(m, 1)
            pos = stream.choice(t, base, gaps)
            color = stream.choice(t, base + 1, q) + 1
            if m == 0:
                seq.append(color)
                continue
            if topology == PATH:
                nbrs = {seq[pos - 1] if pos > 0 else None, seq[pos] if pos < m else None}
                seq.insert(pos, color)
            else:
                nbrs = {seq[pos], seq[(pos + 1) % m]}
                seq.insert(pos + 1, color)
            if color in nbrs:
                break
        else:
            return seq
    raise RuntimeError(f"insertion sampler gave up after {RESTART_CAP} restarts (n={n}, q={q})")


# -- exact oracle ------------------------------------------------------------

@lru_cache(maxsize=None)
def insertion_weight(x: tuple[int, ...], cyclic: bool) -> int:
    """Number of valid build orders of ``x`` (0 if ``x`` cannot be built)."""
    n = len(x)
    if n == 1:
        return 1
    total = 0
    for i in range(n):
        if cyclic:
            ok = x[i] != x[i - 1] and x[i] != x[(i + 1) % n]
        else:
            ok = (i == 0 or x[i] != x[i - 1]) and (i == n - 1 or x[i] != x[i + 1])
        if ok:
            total += insertion_weight(x[:i] + x[i + 1:], cyclic)
    return total


@dataclass
class ExactDistribution:
    """Exact law of a line coloring: ``support[x] = weight[x] / total``."""

    topology: str
    n: int
    q: int
    weights: dict[tuple[int, ...], int]
    total: int
    _dense: np.ndarray | None = field(default=None, repr=False)

    @property
    def support(self) -> dict[tuple[int, ...], Fraction]:
        return {x: Fraction(w, self.total) for x, w in self.weights.items()}

    def probability(self, x: Sequence[int]) -> Fraction:
        return Fraction(self.weights.get(tuple(x), 0), self.total)

    def marginal_weights(self, positions: Sequence[int]) -> dict[tuple[int, ...], int]:
        """Integer weights of the marginal on ``positions`` (over ``total``)."""
        out: dict[tuple[int, ...], int] = {}
        for x, w in self.weights.items():
            key = tuple(x[i] for i in positions)
            out[key] = out.get(key, 0) + w
        return out

    def marginal(self, positions: Sequence[int]) -> dict[tuple[int, ...], Fraction]:
        return {k: Fraction(w, self.total) for k, w in self.marginal_weights(positions).items()}

    def dense(self) -> np.ndarray:
        """Integer weight table indexed by ``(x_0 - 1, ..., x_{n-1} - 1)``."""
        if self._dense is None:
            dtype = np.int64 if self.total < 2**31 else object
            t = np.zeros((self.q,) * self.n, dtype=dtype)
            for x, w in self.weights.items():
                t[tuple(c - 1 for c in x)] = w
            self._dense = t
        return self._dense

    def dump(self) -> str:
        lines = []
        for x in sorted(self.weights, key=lambda s: "".join(map(str, s))):
            p = Fraction(self.weights[x], self.total)
            lines.append(f"{''.join(map(str, x))} {p.numerator}/{p.denominator}")
        return "\n".join(lines) + "\n"


def proper_sequences(n: int, q: int, cyclic: bool):
    """All proper sequences over ``1..q`` in lexicographic order."""
    def rec(prefix):
        if len(prefix) == n:
            if not cyclic or n < 2 or prefix[0] != prefix[-1]:
                yield tuple(prefix)
            return
        for c in range(1, q + 1):
            if prefix and prefix[-1] == c:
                continue
            prefix.append(c)
            yield from rec(prefix)
            prefix.pop()
    yield from rec([])


@lru_cache(maxsize=64)
def _exact(topology: str, n: int, q: int) -> ExactDistribution:
    cyclic = topology == CYCLE
    weights = {}
    for x in proper_sequences(n, q, cyclic):
        w = insertion_weight(x, cyclic)
        if w:
            weights[x] = w
    return ExactDistribution(topology, n, q, weights, sum(weights.values()))


def exact_line_distribution(topology: str, n: int, q: int,
                            cap: int = DEFAULT_ORACLE_CAP) -> ExactDistribution:
    """Exact insertion law on a path or cycle of length ``n`` (rational weights).

    Cycles of length 2 carry a single adjacency; they are accepted here so the
    oracle can describe every component shape, even though the samplers route
    2-cycles through the path construction.
    """
    _check_args(topology, n, q)
    if n > cap:
        raise OracleCapError(f"n={n} exceeds the oracle cap {cap} (state space {q}^{n})")
    return _exact(topology, n, q)


def line_distance(i: int, j: int, n: int, cyclic: bool) -> int:
    d = abs(i - j)
    return min(d, n - d) if cyclic else d


@dataclass
class LineDependenceResult:
    k: int
    independent: bool
    worst: Fraction
    worst_pair: tuple[tuple[int, ...], tuple[int, ...]] | None
    pairs_checked: int

    def __bool__(self):
        return self.independent


def check_k_dependence_line(dist: ExactDistribution, k: int,
                            max_window: int | None = None) -> LineDependenceResult:
    """Exact check that index sets more than ``k`` apart are independent.

    Every pair of disjoint non-empty index sets ``(A, B)`` whose separation
    exceeds ``k`` is examined (sets up to ``max_window`` elements when given).
    Returns the largest ``|P(A, B) - P(A) P(B)|`` over all cells.
    """
    n, cyclic = dist.n, dist.topology == CYCLE
    table = dist.dense()
    z = dist.total
    worst_num = 0
    worst_pair = None
    checked = 0
    idx = range(n)
    limit = n if max_window is None else max_window
    subsets = [s for r in range(1, limit + 1) for s in itertools.combinations(idx, r)]
    marginals: dict[tuple[int, ...], np.ndarray] = {}
    for a in subsets:
        for b in subsets:
            if b[0] <= a[0] or set(a) & set(b):
                continue
            sep = min(line_distance(i, j, n, cyclic) for i in a for j in b)
            if sep <= k:
                continue
            checked += 1
            s = tuple(sorted(a + b))
            m = marginals.get(s)
            if m is None:
                rest = tuple(i for i in idx if i not in s)
                m = marginals[s] = table.sum(axis=rest) if rest else table
            ia = [s.index(i) for i in a]
            ib = [s.index(i) for i in b]
            m = np.transpose(m, ia + ib).reshape(dist.q ** len(a), dist.q ** len(b))
            ma = m.sum(axis=1)
            mb = m.sum(axis=0)
            diff = np.abs(z * m - np.outer(ma, mb)).max()
            if diff > worst_num:
                worst_num = int(diff)
                worst_pair = (a, b)
    worst = Fraction(worst_num, z * z)
    return LineDependenceResult(k, worst_num == 0, worst, worst_pair, checked)


def empirical_line_counts(topology: str, n: int, q: int, samples: int, seed: int,
                          method: str = "sequential") -> dict[tuple[int, ...], int]:
    """Frequencies of ``samples`` independent line colorings (one seed per sample)."""
    from .randomness import derive_seed

    counts: dict[tuple[int, ...], int] = {}
    for s in range(samples):
        stream = SeededStream(derive_seed(seed, s), n)
        x = sample_line(topology, n, q, stream, method).colors
        counts[x] = counts.get(x, 0) + 1
    return counts


def multinomial_z_scores(counts: dict, probs: dict, samples: int) -> dict:
    """Per-cell z-score of observed counts against exact probabilities."""
    out = {}
    for x in set(counts) | set(probs):
        p = float(probs.get(x, 0))
        c = counts.get(x, 0)
        if p == 0:
            out[x] = math.inf if c else 0.0
            continue
        out[x] = (c - samples * p) / math.sqrt(samples * p * (1 - p))
    return out
