"""Empirical locality radii by perturbation.

The color of ``v`` is a function of the per-vertex random streams. Its
locality radius in a run is the least ``R`` such that resampling every
stream outside the ball of radius ``R`` around ``v`` leaves the color of
``v`` unchanged. We can only try finitely many resamplings, so the value
is a lower bound that becomes sharper with more salts.
"""

from __future__ import annotations

import math
from collections import Counter

from .graph import Graph
from .pipeline import color
from .randomness import VertexRandomness, derive_seed


def locality_radius(g: Graph, variant: str, seed: int, v: int,
                    salts: int = 3, max_radius: int | None = None) -> int:
    base = color(g, VertexRandomness(seed), variant, keep_levels=False).colors[v]
    dist = g.distances_from([v])
    finite = [x for x in dist if x != math.inf]
    top = int(max(finite)) if max_radius is None else max_radius
    for r in range(0, top + 1):
        outside = [u for u in range(g.n) if dist[u] > r]
        if not outside:
            return r
        stable = True
        for salt in range(1, salts + 1):
            rnd = VertexRandomness(seed).perturbed(outside, salt)
            if color(g, rnd, variant, keep_levels=False).colors[v] != base:
                stable = False
                break
        if stable:
            return r
    return top + 1


def radius_distribution(g: Graph, variant: str, seed: int, runs: int,
                        vertices=None, salts: int = 3) -> Counter:
    """Histogram of locality radii over ``runs`` seeds and the given vertices."""
    vertices = range(g.n) if vertices is None else vertices
    hist: Counter = Counter()
    for t in range(runs):
        s = derive_seed(seed, t)
        for v in vertices:
            hist[locality_radius(g, variant, s, v, salts)] += 1
    return hist
