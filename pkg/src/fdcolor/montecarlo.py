"""Monte Carlo k-dependence tests on graphs too large for the exact oracle.

For a pair of disjoint windows A, B the statistic is the total variation
distance between the empirical joint law of (X_A, X_B) and the product of
the empirical marginals. Its sampling-noise radius comes from a parametric
bootstrap: tables of the same size are drawn from the product of the
observed marginals and pushed through the same statistic, which shows how
large the TV of a truly independent pair looks at this sample size.

Colors are projected to a view (one level block or a single coordinate)
before tabulating, so the contingency table stays small relative to the
number of trials.
"""

from __future__ import annotations

import random
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .dependence import DependenceReport, PairRecord
from .graph import Graph, set_distance
from .kernels import BatchSampler
from .pipeline import PALETTE, arity, block_offset
from .randomness import derive_seed

IID = "iid"
DEFAULT_PAIRS = 24
DEFAULT_REPLICATES = 200
CELLS_PER_TRIAL = 20  # want at least this many trials per table cell


class WindowShrinkWarning(UserWarning):
    pass


@dataclass(frozen=True)
class View:
    name: str
    coords: tuple[int, ...]


def _sample_chunk(args):
    g, variant, d, seed, trials, start = args
    return BatchSampler(g, variant, d).sample(seed, trials, start)


def sample_colors(g: Graph, variant: str, seed: int, trials: int,
                  d: int | None = None, jobs: int = 1) -> np.ndarray:
    """``(trials, n, arity)`` symbols; ``variant="iid"`` gives uniform 4-symbol colors.

    Output does not depend on ``jobs``: trial ``t`` always uses its own derived seed.
    """
    d = g.max_degree_bound if d is None else d
    if variant == IID:
        rng = np.random.default_rng(derive_seed(seed, 0))
        return rng.integers(1, 5, size=(trials, g.n, arity(d)), dtype=np.int8)
    if jobs <= 1 or trials < 2 * jobs:
        return BatchSampler(g, variant, d).sample(seed, trials)
    bounds = np.linspace(0, trials, jobs + 1).astype(int)
    chunks = [(g, variant, d, seed, int(b - a), int(a)) for a, b in zip(bounds, bounds[1:])]
    with ProcessPoolExecutor(jobs) as pool:
        return np.concatenate(list(pool.map(_sample_chunk, chunks)))


def views(d: int) -> list[View]:
    """Level blocks (deepest first), then single coordinates."""
    out = [View(f"level{lv}", tuple(range(block_offset(lv), block_offset(lv) + lv)))
           for lv in range(1, d + 1)]
    out += [View(f"coord{c}", (c,)) for c in range(arity(d)) if c != 0]
    return out


def _codes(colors: np.ndarray, window, coords, q: int) -> np.ndarray:
    code = np.zeros(colors.shape[0], dtype=np.int64)
    for v in window:
        for c in coords:
            code = code * q + (colors[:, v, c].astype(np.int64) - 1)
    return code


def tv_independence(a: np.ndarray, b: np.ndarray, ma: int, mb: int) -> float:
    """TV between the empirical joint of (a, b) and the product of its marginals."""
    n = a.shape[0]
    joint = np.bincount(a * mb + b, minlength=ma * mb).reshape(ma, mb) / n
    prod = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    return 0.5 * float(np.abs(joint - prod).sum())


def bootstrap_null(a, b, ma, mb, replicates: int, rng: np.random.Generator) -> np.ndarray:
    """TV statistics of ``replicates`` independent tables with the observed marginals."""
    n = a.shape[0]
    pa = np.bincount(a, minlength=ma) / n
    pb = np.bincount(b, minlength=mb) / n
    tables = rng.multinomial(n, np.outer(pa, pb).ravel(), size=replicates)
    joint = tables.reshape(replicates, ma, mb) / n
    prod = joint.sum(axis=2)[:, :, None] * joint.sum(axis=1)[:, None, :]
    return 0.5 * np.abs(joint - prod).sum(axis=(1, 2))


def _windows(g: Graph):
    singles = [(v,) for v in range(g.n)]
    pairs = [e for e in g.edges()]
    return singles, pairs


def choose_pairs(g: Graph, k: int, count: int, rng: random.Random, sizes=(1, 2)):
    """Window pairs at distance > k: half at the closest qualifying distance, half anywhere."""
    singles, edges = _windows(g)
    pool = [w for w in singles + edges if len(w) in sizes]
    near, far = [], []
    # sample candidates rather than enumerate all pairs of windows
    tries = 0
    while (len(near) < count or len(far) < count) and tries < 200 * count:
        tries += 1
        a, b = rng.choice(pool), rng.choice(pool)
        if set(a) & set(b):
            continue
        dist = set_distance(g, a, b)
        if dist <= k:
            continue
        rec = (a, b, dist) if a < b else (b, a, dist)
        if dist == k + 1 and rec not in near:
            near.append(rec)
        elif rec not in far:
            far.append(rec)
    # windows at exactly k+1 are searched directly if random draws missed them
    if not near:
        for a in pool:
            dists = g.distances_from(a)
            for b in pool:
                if not set(a) & set(b) and min(dists[v] for v in b) == k + 1:
                    near.append((a, b, k + 1) if a < b else (b, a, k + 1))
            if len(near) >= count:
                break
    half = count // 2
    chosen = sorted(set(near[:half]) | set(far[:count - min(half, len(near))]))
    return chosen[:count]


def _pick_view(d: int, q: int, width: int, max_cells: int) -> list[View]:
    """Largest views whose joint table over ``width`` vertices fits ``max_cells``."""
    fitting = [v for v in views(d) if q ** (len(v.coords) * width) <= max_cells]
    blocks = [v for v in fitting if v.name.startswith("level")]
    if blocks:
        covered = {c for v in blocks for c in v.coords}
        singles = [v for v in fitting if not v.name.startswith("level") and v.coords[0] not in covered]
        return blocks + singles
    return fitting


def _test_pair(colors, A, B, dist, view, q, replicates, z, rng, method):
    a = _codes(colors, A, view.coords, q)
    b = _codes(colors, B, view.coords, q)
    ma = q ** (len(A) * len(view.coords))
    mb = q ** (len(B) * len(view.coords))
    tv = tv_independence(a, b, ma, mb)
    null = bootstrap_null(a, b, ma, mb, replicates, rng)
    radius = float(null.mean() + z * null.std(ddof=1))
    return PairRecord(A, B, dist, tv, method, radius, view.name)


def check_k_dependence_mc(g: Graph, variant: str, k: int, trials: int, seed: int,
                          pairs: int = DEFAULT_PAIRS, replicates: int = DEFAULT_REPLICATES,
                          alpha: float = 0.01, jobs: int = 1, d: int | None = None,
                          colors: np.ndarray | None = None) -> DependenceReport:
    """Falsification test of k-dependence from ``trials`` independent samples.

    A pair passes when its TV is below ``mean + z * sd`` of the bootstrap
    null, with ``z`` chosen so the whole family of tests has false alarm
    probability about ``alpha``. Adjacent single vertices are tested the
    same way as a power control; the verdict ignores them.
    """
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    d = g.max_degree_bound if d is None else d
    q = 4 if variant == IID else PALETTE[variant]
    if colors is None:
        colors = sample_colors(g, variant, seed, trials, d, jobs)
    trials = colors.shape[0]
    rng = random.Random(derive_seed(seed, 1))
    nprng = np.random.default_rng(derive_seed(seed, 2))
    report = DependenceReport(k, mode="mc", trials=trials)
    max_cells = trials // CELLS_PER_TRIAL

    width = 4
    if not _pick_view(d, q, width, max_cells):
        width = 2
        msg = (f"{trials} trials cannot support windows of 2 vertices "
               f"(q={q}); shrinking windows to single vertices")
        warnings.warn(msg, WindowShrinkWarning, stacklevel=2)
        report.warnings.append(msg)
    if not _pick_view(d, q, width, max_cells):
        raise ValueError(f"{trials} trials are too few for even one coordinate per vertex")
    sizes = (1, 2) if width == 4 else (1,)
    chosen = choose_pairs(g, k, pairs, rng, sizes)

    plan = []
    for A, B, dist in chosen:
        for view in _pick_view(d, q, len(A) + len(B), max_cells):
            plan.append((A, B, dist, view, "mc"))
    # an edge forces its endpoints apart in the coordinate of the level and
    # label where it was used, so the control looks at every view
    control_views = _pick_view(d, q, 2, max_cells)
    control_plan = []
    for u, v in list(g.edges())[:2]:
        for view in control_views:
            control_plan.append(((u,), (v,), 1, view, "control-adjacent"))
    if k >= 1:
        boundary = [p for p in choose_pairs(g, k - 1, 4, rng, (1,)) if p[2] == k]
        for A, B, dist in boundary[:2]:
            for view in control_views:
                control_plan.append((A, B, dist, view, "control-boundary"))

    tests = len(plan) + len(control_plan)
    z = float(norm.isf(alpha / max(tests, 1)))
    for A, B, dist, view, method in plan:
        report.records.append(_test_pair(colors, A, B, dist, view, q, replicates, z, nprng, method))
    for A, B, dist, view, method in control_plan:
        report.control.append(_test_pair(colors, A, B, dist, view, q, replicates, z, nprng, method))
    return report
