"""Keyed per-vertex random streams.

Every construction consumes "iid labels on vertices". Here each vertex owns an
unbounded family of uniform values addressed by ``(tag, index)``; all values
are a pure function of the master seed, so any run can be replayed, and a
single vertex's labels can be swapped out to test locality.

Derivation (all arithmetic mod 2**64)::

    seed_key    = mix(seed ^ SEED_SALT)
    vertex_key  = mix(seed_key + (v + 1) * GOLDEN)
    stream      = mix(vertex_key ^ tag_key(tag))
    word(i, j)  = mix(stream + (i * 2**16 + j + 1) * GOLDEN)

``mix`` is the SplitMix64 finalizer, so ``word`` is a SplitMix64 sequence
started at ``stream``; ``j`` counts rejection retries for bounded integers.
"""

from __future__ import annotations

import hashlib
import math
from functools import lru_cache
from typing import Mapping, Sequence

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
SEED_SALT = 0x5DEECE66D1CE4E5B
MAX_RETRIES = 1 << 16


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@lru_cache(maxsize=4096)
def tag_key(tag: str) -> int:
    return int.from_bytes(hashlib.blake2b(tag.encode(), digest_size=8).digest(), "little")


def seed_key(seed: int) -> int:
    return mix64((seed & MASK64) ^ SEED_SALT)


def vertex_key(skey: int, v: int) -> int:
    return mix64(skey + (v + 1) * GOLDEN)


def stream_word(vkey: int, tkey: int, index: int, retry: int = 0) -> int:
    stream = mix64(vkey ^ tkey)
    return mix64(stream + ((index << 16) + retry + 1) * GOLDEN)


def word_to_uniform(w: int) -> float:
    return (w >> 11) * (1.0 / (1 << 53))


def bounded(words, m: int) -> int:
    """Unbiased value in ``range(m)`` from an iterator of 64-bit words (rejection)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    limit = (1 << 64) - ((1 << 64) % m)
    for w in words:
        if w < limit:
            return w % m
    raise RuntimeError("rejection sampling exhausted its retry budget")


class VertexRandomness:
    """Deterministic iid uniforms attached to vertices.

    ``overrides`` replaces the key of selected vertices; this is how
    perturbation tests resample the labels of a chosen vertex set while
    leaving every other label untouched.
    """

    def __init__(self, seed: int, overrides: Mapping[int, int] | None = None):
        self.seed = int(seed)
        self._skey = seed_key(self.seed)
        self._overrides = dict(overrides or {})
        self._vkeys: dict[int, int] = {}

    def vertex_key(self, v: int) -> int:
        k = self._vkeys.get(v)
        if k is None:
            k = self._overrides.get(v)
            if k is None:
                k = vertex_key(self._skey, v)
            self._vkeys[v] = k
        return k

    def vertex_keys(self, n: int) -> list[int]:
        return [self.vertex_key(v) for v in range(n)]

    def perturbed(self, vertices, salt: int = 1) -> "VertexRandomness":
        """Copy whose labels at ``vertices`` are replaced by fresh independent ones."""
        over = dict(self._overrides)
        for v in vertices:
            over[v] = mix64(self.vertex_key(v) ^ mix64(salt * GOLDEN + 0x1234567))
        return VertexRandomness(self.seed, over)

    def word(self, v: int, tag: str, index: int, retry: int = 0) -> int:
        return stream_word(self.vertex_key(v), tag_key(tag), index, retry)

    def uniform(self, v: int, tag: str, index: int = 0) -> float:
        return word_to_uniform(self.word(v, tag, index))

    def uniform_choice(self, v: int, tag: str, index: int, m: int) -> int:
        if m < 1:
            raise ValueError("uniform_choice needs m >= 1")
        if m == 1:
            return 0
        vk, tk = self.vertex_key(v), tag_key(tag)
        return bounded((stream_word(vk, tk, index, j) for j in range(MAX_RETRIES)), m)

    def random_injection(self, v: int, neighbors: Sequence[int], d: int,
                         tag: str = "o") -> dict[int, int]:
        """Uniform injective map from ``neighbors`` into ``{1..d}`` (partial Fisher-Yates)."""
        k = len(neighbors)
        if k > d:
            raise ValueError(f"cannot inject {k} neighbors into {d} labels")
        labels = list(range(1, d + 1))
        for t in range(k):
            j = t + self.uniform_choice(v, tag, t, d - t)
            labels[t], labels[j] = labels[j], labels[t]
        return {u: labels[t] for t, u in enumerate(neighbors)}


def derive_seed(seed: int, *parts: int) -> int:
    """Child seed for trial ``parts`` of a batch; pure function of its inputs."""
    z = seed_key(seed)
    for p in parts:
        z = mix64(z + (p + 1) * GOLDEN)
    return z


def falling_factorial(d: int, k: int) -> int:
    return math.perm(d, k)
