"""Compiled batch sampler.

Reproduces ``pipeline.color`` draw for draw: the same keyed words, the same
neighbor order and the same line construction, so for a given trial seed the
compiled and the reference coloring agree exactly. Used for Monte Carlo runs.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .graph import Graph
from .pipeline import FIID, PALETTE, VARIANTS, arity
from .randomness import GOLDEN, SEED_SALT, derive_seed, tag_key

_G = np.uint64(GOLDEN)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_SALT = np.uint64(SEED_SALT)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S16 = np.uint64(16)
_S11 = np.uint64(11)


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


@njit(cache=True)
def vertex_keys(trial_seed, n):
    sk = mix64(trial_seed ^ _SALT)
    out = np.empty(n, dtype=np.uint64)
    for v in range(n):
        out[v] = mix64(sk + np.uint64(v + 1) * _G)
    return out


@njit(cache=True)
def stream_word(vk, tk, index, retry):
    stream = mix64(vk ^ tk)
    ctr = (np.uint64(index) << _S16) + np.uint64(retry) + _ONE
    return mix64(stream + ctr * _G)


@njit(cache=True)
def uniform(vk, tk, index):
    w = stream_word(vk, tk, index, 0)
    return np.float64(w >> _S11) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def uniform_choice(vk, tk, index, m):
    if m == 1:
        return 0
    um = np.uint64(m)
    rem = (_ZERO - um) % um  # 2**64 mod m
    limit = _ZERO - rem
    retry = 0
    while True:
        w = stream_word(vk, tk, index, retry)
        if rem == _ZERO or w < limit:
            return np.int64(w % um)
        retry += 1


@njit(cache=True)
def _nth_avoiding(q, a, b, r):
    for c in range(1, q + 1):
        if c != a and c != b:
            if r == 0:
                return c
            r -= 1
    return -1


@njit(cache=True)
def _sample_line(verts, length, cyclic, q, vk, tk, out):
    """Sequential insertion coloring of ``verts[:length]``; writes symbols to ``out``."""
    seq = np.empty(length, dtype=np.int64)
    seq[0] = uniform_choice(vk[verts[0]], tk, 0, q) + 1
    m = 1
    for t in range(1, length):
        key = vk[verts[t]]
        if not cyclic:
            r = uniform_choice(key, tk, 0, 2 * (q - 1) + (m - 1) * (q - 2))
            if r < q - 1:
                c = _nth_avoiding(q, seq[0], seq[0], r)
                pos = 0
            elif r < 2 * (q - 1):
                c = _nth_avoiding(q, seq[m - 1], seq[m - 1], r - (q - 1))
                pos = m
            else:
                r -= 2 * (q - 1)
                gap = r // (q - 2) + 1
                c = _nth_avoiding(q, seq[gap - 1], seq[gap], r % (q - 2))
                pos = gap
        elif m == 1:
            c = _nth_avoiding(q, seq[0], seq[0], uniform_choice(key, tk, 0, q - 1))
            pos = 1
        else:
            r = uniform_choice(key, tk, 0, m * (q - 2))
            gap = r // (q - 2)
            c = _nth_avoiding(q, seq[gap], seq[(gap + 1) % m], r % (q - 2))
            pos = gap + 1
        for j in range(m, pos, -1):
            seq[j] = seq[j - 1]
        seq[pos] = c
        m += 1
    rot = 0
    if cyclic:
        rot = uniform_choice(vk[verts[0]], tk, 1, length)
    for j in range(length):
        out[verts[(j + rot) % length]] = seq[j]


@njit(cache=True)
def color_one(indptr, indices, rev, n, d, q, fiid, vk,
              tk_h, tk_o, tk_xi, tk_iso, tk_ins, tk_off, tk_cut, colors):
    """One coloring into ``colors[n, arity]``; returns ``False`` on an internal breach."""
    alive = np.ones(indices.shape[0], dtype=np.bool_)
    done = np.zeros(n, dtype=np.bool_)
    deg = np.zeros(n, dtype=np.int64)
    head = np.empty(n, dtype=np.int64)
    hpos = np.empty(n, dtype=np.int64)
    inj = np.zeros(indices.shape[0], dtype=np.int64)
    label = np.zeros(n, dtype=np.int64)
    marked = np.zeros(n, dtype=np.bool_)
    indeg = np.zeros(n, dtype=np.int64)
    xi = np.zeros(n, dtype=np.float64)
    perm = np.empty(d + 1, dtype=np.int64)
    out_i = np.empty(n, dtype=np.int64)
    in_i = np.empty(n, dtype=np.int64)
    seen = np.zeros(n, dtype=np.bool_)
    chain = np.empty(n, dtype=np.int64)
    coord = np.empty(n, dtype=np.int64)
    for level in range(d, 0, -1):
        ar = level * (level + 1) // 2
        off = level * (level - 1) // 2
        n_active = 0
        for v in range(n):
            if done[v]:
                continue
            k = 0
            for e in range(indptr[v], indptr[v + 1]):
                if alive[e]:
                    k += 1
            deg[v] = k
            if k == 0:
                done[v] = True
                for c in range(ar):
                    colors[v, c] = uniform_choice(vk[v], tk_iso[level], c, q) + 1
            else:
                n_active += 1
        if n_active == 0:
            break
        for x in range(n):
            if done[x]:
                continue
            r = uniform_choice(vk[x], tk_h[level], 0, deg[x])
            for e in range(indptr[x], indptr[x + 1]):
                if alive[e]:
                    if r == 0:
                        head[x] = indices[e]
                        hpos[x] = e
                        break
                    r -= 1
        for y in range(n):
            if done[y]:
                continue
            for t in range(level):
                perm[t] = t + 1
            t = 0
            for e in range(indptr[y], indptr[y + 1]):
                if alive[e]:
                    j = t + uniform_choice(vk[y], tk_o[level], t, level - t)
                    tmp = perm[t]
                    perm[t] = perm[j]
                    perm[j] = tmp
                    inj[e] = perm[t]
                    t += 1
        for x in range(n):
            indeg[x] = 0
            marked[x] = False
        for x in range(n):
            if not done[x]:
                label[x] = inj[rev[hpos[x]]]
                indeg[head[x]] += 1
        if fiid:
            for x in range(n):
                if not done[x]:
                    xi[x] = uniform(vk[x], tk_xi[level], 0)
            for x in range(n):
                if done[x] or indeg[x] == 0:
                    continue
                h = head[x]
                hh = head[h]
                if (xi[h] > xi[x] or (xi[h] == xi[x] and h > x)) and \
                        (xi[h] > xi[hh] or (xi[h] == xi[hh] and h > hh)):
                    marked[x] = True
        for i in range(1, level + 1):
            for v in range(n):
                out_i[v] = -1
                in_i[v] = -1
                seen[v] = False
                coord[v] = 0
            for x in range(n):
                if not done[x] and not marked[x] and label[x] == i:
                    out_i[x] = head[x]
                    in_i[head[x]] = x
            tk = tk_ins[level, i]
            for v in range(n):
                if in_i[v] != -1 or out_i[v] == -1:
                    continue
                length = 0
                u = v
                while u != -1:
                    chain[length] = u
                    seen[u] = True
                    length += 1
                    u = out_i[u]
                _sample_line(chain, length, False, q, vk, tk, coord)
            for v in range(n):
                if out_i[v] == -1 or seen[v]:
                    continue
                if fiid:
                    return False
                length = 0
                u = v
                while True:
                    chain[length] = u
                    seen[u] = True
                    length += 1
                    u = out_i[u]
                    if u == v:
                        break
                if length == 2:
                    if uniform_choice(vk[chain[0]], tk_cut[level, i], 0, 2) == 1:
                        tmp = chain[0]
                        chain[0] = chain[1]
                        chain[1] = tmp
                    _sample_line(chain, 2, False, q, vk, tk, coord)
                else:
                    _sample_line(chain, length, True, q, vk, tk, coord)
            for v in range(n):
                if done[v]:
                    continue
                if seen[v]:
                    colors[v, off + i - 1] = coord[v]
                else:
                    colors[v, off + i - 1] = uniform_choice(vk[v], tk_off[level, i], 0, q) + 1
        for x in range(n):
            if not done[x] and not marked[x]:
                alive[hpos[x]] = False
                alive[rev[hpos[x]]] = False
    return True


@njit(cache=True)
def color_batch(indptr, indices, rev, n, d, q, fiid, trial_seeds,
                tk_h, tk_o, tk_xi, tk_iso, tk_ins, tk_off, tk_cut):
    trials = trial_seeds.shape[0]
    ar = d * (d + 1) // 2
    out = np.zeros((trials, n, ar), dtype=np.int8)
    ok = np.ones(trials, dtype=np.bool_)
    buf = np.zeros((n, ar), dtype=np.int64)
    for t in range(trials):
        vk = vertex_keys(trial_seeds[t], n)
        ok[t] = color_one(indptr, indices, rev, n, d, q, fiid, vk,
                          tk_h, tk_o, tk_xi, tk_iso, tk_ins, tk_off, tk_cut, buf)
        for v in range(n):
            for c in range(ar):
                out[t, v, c] = buf[v, c]
    return out, ok


# -- Python-side wrappers ----------------------------------------------------

def csr(g: Graph):
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    for v in range(g.n):
        indptr[v + 1] = indptr[v] + g.degree(v)
    indices = np.array([u for v in range(g.n) for u in g.neighbors(v)], dtype=np.int64)
    pos = {}
    for v in range(g.n):
        for j, u in enumerate(g.neighbors(v)):
            pos[(v, u)] = indptr[v] + j
    rev = np.array([pos[(u, v)] for v in range(g.n) for u in g.neighbors(v)], dtype=np.int64)
    return indptr, indices, rev


def tag_tables(d: int):
    size = d + 1
    tk_h = np.zeros(size, dtype=np.uint64)
    tk_o = np.zeros(size, dtype=np.uint64)
    tk_xi = np.zeros(size, dtype=np.uint64)
    tk_iso = np.zeros(size, dtype=np.uint64)
    tk_ins = np.zeros((size, size), dtype=np.uint64)
    tk_off = np.zeros((size, size), dtype=np.uint64)
    tk_cut = np.zeros((size, size), dtype=np.uint64)
    for lv in range(1, size):
        tk_h[lv] = tag_key(f"h/{lv}")
        tk_o[lv] = tag_key(f"o/{lv}")
        tk_xi[lv] = tag_key(f"xi/{lv}")
        tk_iso[lv] = tag_key(f"iso/{lv}")
        for i in range(1, lv + 1):
            tk_ins[lv, i] = tag_key(f"insert/{lv}/{i}")
            tk_off[lv, i] = tag_key(f"off/{lv}/{i}")
            tk_cut[lv, i] = tag_key(f"cut/{lv}/{i}")
    return tk_h, tk_o, tk_xi, tk_iso, tk_ins, tk_off, tk_cut


def trial_seeds(seed: int, trials: int, start: int = 0) -> np.ndarray:
    return np.array([derive_seed(seed, t) for t in range(start, start + trials)], dtype=np.uint64)


class BatchSampler:
    """Samples many independent colorings of one graph.

    Trial ``t`` uses ``VertexRandomness(derive_seed(seed, t))``, exactly as the
    reference pipeline would.
    """

    def __init__(self, g: Graph, variant: str, d: int | None = None):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.g = g
        self.variant = variant
        self.d = g.max_degree_bound if d is None else d
        if g.max_degree() > self.d:
            raise ValueError(f"graph has degree {g.max_degree()} > bound {self.d}")
        self.q = PALETTE[variant]
        self.arity = arity(self.d)
        self._csr = csr(g)
        self._tags = tag_tables(self.d)

    def sample_seeds(self, seeds: np.ndarray) -> np.ndarray:
        indptr, indices, rev = self._csr
        out, ok = color_batch(indptr, indices, rev, self.g.n, self.d, self.q,
                              self.variant == FIID, seeds.astype(np.uint64), *self._tags)
        if not ok.all():
            raise RuntimeError("compiled sampler hit an internal invariant breach")
        return out

    def sample(self, seed: int, trials: int, start: int = 0) -> np.ndarray:
        """``(trials, n, arity)`` int8 array of symbols in ``1..q``."""
        return self.sample_seeds(trial_seeds(seed, trials, start))

    def flattened(self, colors: np.ndarray) -> np.ndarray:
        weights = self.q ** np.arange(self.arity - 1, -1, -1, dtype=np.int64)
        return ((colors.astype(np.int64) - 1) * weights).sum(axis=-1)


@njit(cache=True)
def _line_batch(seeds, n, cyclic, q, tk):
    out = np.empty((seeds.shape[0], n), dtype=np.int8)
    verts = np.arange(n)
    row = np.empty(n, dtype=np.int64)
    for t in range(seeds.shape[0]):
        vk = vertex_keys(seeds[t], n)
        _sample_line(verts, n, cyclic, q, vk, tk, row)
        for j in range(n):
            out[t, j] = row[j]
    return out


def sample_lines(topology: str, n: int, q: int, seed: int, samples: int) -> np.ndarray:
    """``(samples, n)`` line colorings; row ``s`` equals
    ``sample_line(topology, n, q, SeededStream(derive_seed(seed, s), n))``."""
    if topology not in ("path", "cycle"):
        raise ValueError(f"unknown topology {topology!r}")
    if topology == "cycle" and n < 3:
        raise ValueError("cycles shorter than 3 are colored as paths")
    return _line_batch(trial_seeds(seed, samples), n, topology == "cycle", q,
                       np.uint64(tag_key("insert")))
