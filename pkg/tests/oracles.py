"""Independent reference implementations used as test oracles.

Nothing here imports the decoder kernels: every routine works from a dense
0/1 parity-check matrix or from plain Python lists.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

LLR_MAX = 30.0
CLIP = 1.0 - 1e-12


def gf2_matmul(a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return (a @ b) % 2


def naive_encode(g_dense, msg):
    n = g_dense.shape[1]
    out = [0] * n
    for j in range(n):
        s = 0
        for i, bit in enumerate(msg):
            s ^= int(bit) & int(g_dense[i, j])
        out[j] = s
    return np.array(out, dtype=np.uint8)


def codewords(h_dense):
    """All codewords of a small code by exhaustive enumeration."""
    n = h_dense.shape[1]
    words = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
    ok = ((words @ h_dense.T.astype(np.int64)) % 2 == 0).all(axis=1)
    return words[ok]


def exact_posteriors(h_dense, llr):
    """Bitwise MAP log-likelihood ratios log P(c_j=0|y)/P(c_j=1|y).

    A codeword c has weight proportional to exp(sum_j llr_j * (1 - 2 c_j) / 2).
    """
    cws = codewords(h_dense)
    logw = ((1 - 2 * cws) * np.asarray(llr)[None, :]).sum(axis=1) / 2.0
    out = np.empty(h_dense.shape[1])
    for j in range(h_dense.shape[1]):
        zero = logw[cws[:, j] == 0]
        one = logw[cws[:, j] == 1]
        out[j] = np.logaddexp.reduce(zero) - np.logaddexp.reduce(one)
    return out


def random_tree_code(rng, max_vars=12):
    """Dense H whose Tanner graph is a tree (connected, no cycles)."""
    target = int(rng.integers(4, max_vars + 1))
    n_vars = 1
    rows = []
    while n_vars < target:
        anchor = int(rng.integers(0, n_vars))
        fresh = int(rng.integers(1, min(3, target - n_vars) + 1))
        rows.append([anchor] + list(range(n_vars, n_vars + fresh)))
        n_vars += fresh
    h = np.zeros((len(rows), n_vars), dtype=np.uint8)
    for i, r in enumerate(rows):
        h[i, r] = 1
    return h


def tanner_diameter(h_dense):
    """Longest shortest path (in edges) between any two nodes of the Tanner graph."""
    m, n = h_dense.shape
    adj = [[] for _ in range(n + m)]
    for i, j in zip(*np.nonzero(h_dense)):
        adj[j].append(n + i)
        adj[n + i].append(j)
    best = 0
    for s in range(n + m):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        best = max(best, max(dist.values()))
    return best


def _clamp(x):
    return max(-LLR_MAX, min(LLR_MAX, x))


def check_rule(sibling_v2c):
    p = 1.0
    for mu in sibling_v2c:
        p *= math.tanh(0.5 * mu)
    p = max(-CLIP, min(CLIP, p))
    return _clamp(2.0 * math.atanh(p))


class ReplayOracle:
    """Exhaustive residual scheduler that mirrors the decoder's semantics.

    ``argmax()`` recomputes every candidate message from scratch (no cached
    residuals) and returns the lowest-id maximum priority; ``commit(e)``
    applies one C2V update and refreshes the affected V2C messages.
    """

    def __init__(self, h_dense, llr, decay=1.0, weight=1.0, scale=1.0):
        self.m, self.n = h_dense.shape
        self.edges = [(i, j) for i in range(self.m) for j in range(self.n) if h_dense[i, j]]
        self.by_check = [[e for e, (i, _) in enumerate(self.edges) if i == c] for c in range(self.m)]
        self.by_var = [[e for e, (_, j) in enumerate(self.edges) if j == v] for v in range(self.n)]
        self.llr = [_clamp(float(x)) for x in llr]
        self.c2v = [0.0] * len(self.edges)
        self.v2c = [self.llr[j] for _, j in self.edges]
        self.count = [0] * len(self.edges)
        self.decay, self.weight, self.scale = decay, weight, scale

    def candidate(self, e):
        c = self.edges[e][0]
        return check_rule([self.v2c[s] for s in self.by_check[c] if s != e])

    def priorities(self):
        out = []
        for e in range(len(self.edges)):
            r = abs(self.candidate(e) - self.c2v[e])
            w = self.weight
            if self.decay != 1.0:
                w *= self.decay ** self.count[e]
            out.append(self.scale * (w * r))
        return out

    def argmax(self):
        pr = self.priorities()
        top = max(pr)
        return pr.index(top), pr

    def commit(self, e):
        self.c2v[e] = self.candidate(e)
        self.count[e] += 1
        v = self.edges[e][1]
        for f in self.by_var[v]:
            if f != e:
                s = self.llr[v]
                for g in self.by_var[v]:
                    if g != f:
                        s += self.c2v[g]
                self.v2c[f] = _clamp(s)
