"""Decoding schedules.

Every kernel runs until the last requested checkpoint and records the hard
decision, posterior and operation counters at each checkpoint iteration. A
single decode therefore serves a whole iteration sweep: the message schedule
never looks at the iteration budget, so stopping at ``T`` is identical to
recording at ``T`` and carrying on. When the syndrome turns zero with
``early_stop`` set, all remaining checkpoints receive the converged word.

For the residual-driven schedules one iteration is ``E`` C2V commits, where
``E`` is the number of edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..tanner import TannerGraph
from .selection import linear_argmax, tree_build, tree_size, tree_update
from .messages import (
    LAYER_RULES,
    LLR_MAX,
    check_message,
    clamp_llr,
    layer_level,
    layer_weight,
    posterior_bits,
    syndrome_is_zero,
    variable_message,
)

SCHEDULES = ("bp", "lbp", "rbp", "rd-rbp", "svnf", "wr-lbp")

V2C, C2V, PRE, CMP, INIT_PRE, INIT_CMP = range(6)


@dataclass(frozen=True)
class OpCounters:
    v2c_updates: int = 0
    c2v_updates: int = 0
    precomputations: int = 0
    comparisons: int = 0
    # one-off work before the first commit; not part of any iteration
    init_precomputations: int = 0
    init_comparisons: int = 0

    @classmethod
    def from_array(cls, a) -> "OpCounters":
        return cls(*(int(x) for x in a))

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.v2c_updates, self.c2v_updates, self.precomputations, self.comparisons)

    def __add__(self, other: "OpCounters") -> "OpCounters":
        return OpCounters(*(a + b for a, b in zip(self.__dict__.values(), other.__dict__.values())))


@dataclass
class DecodeOutcome:
    decoded: np.ndarray
    converged: bool
    iterations: int
    counters: OpCounters
    posterior: np.ndarray = field(repr=False)
    trace: np.ndarray | None = field(default=None, repr=False)


# -- kernels -----------------------------------------------------------------


@njit(cache=True)
def _record(k, it, ok, early_stop, cps, post, bits, counters, ob, op, oc, oi, octr):
    while k < len(cps) and (cps[k] == it or (ok and early_stop)):
        ob[k, :] = bits
        op[k, :] = post
        oc[k] = ok
        oi[k] = it
        octr[k, :] = counters
        k += 1
    return k


@njit(cache=True)
def _flooding(check_ptr, edge_var, var_ptr, var_edges, llr, cps, early_stop, ob, op, oc, oi, octr):
    n_e, n_v, n_c = len(edge_var), len(llr), len(check_ptr) - 1
    counters = np.zeros(6, dtype=np.int64)
    c2v = np.zeros(n_e)
    v2c = np.empty(n_e)
    t = np.empty(n_e)
    for e in range(n_e):
        v2c[e] = llr[edge_var[e]]
    post = np.empty(n_v)
    bits = np.empty(n_v, dtype=np.uint8)
    posterior_bits(c2v, llr, var_ptr, var_edges, post, bits)
    ok = syndrome_is_zero(bits, check_ptr, edge_var)
    k = _record(0, 0, ok, early_stop, cps, post, bits, counters, ob, op, oc, oi, octr)
    it = 0
    while k < len(cps):
        it += 1
        for e in range(n_e):
            t[e] = math.tanh(0.5 * v2c[e])
        for c in range(n_c):
            for e in range(check_ptr[c], check_ptr[c + 1]):
                c2v[e] = check_message(t, check_ptr, c, e)
        counters[C2V] += n_e
        for v in range(n_v):
            s = llr[v]
            for q in range(var_ptr[v], var_ptr[v + 1]):
                s += c2v[var_edges[q]]
            post[v] = s
            bits[v] = 1 if s < 0 else 0
            for q in range(var_ptr[v], var_ptr[v + 1]):
                f = var_edges[q]
                v2c[f] = clamp_llr(s - c2v[f])
        counters[V2C] += n_e
        ok = syndrome_is_zero(bits, check_ptr, edge_var)
        k = _record(k, it, ok, early_stop, cps, post, bits, counters, ob, op, oc, oi, octr)
    return 0


@njit(cache=True)
def _layered(check_ptr, edge_var, var_ptr, var_edges, llr, cps, early_stop, ob, op, oc, oi, octr):
    n_e, n_v, n_c = len(edge_var), len(llr), len(check_ptr) - 1
    counters = np.zeros(6, dtype=np.int64)
    c2v = np.zeros(n_e)
    v2c = np.empty(n_e)
    t = np.empty(n_e)
    for e in range(n_e):
        v2c[e] = llr[edge_var[e]]
        t[e] = math.tanh(0.5 * v2c[e])
    post = np.empty(n_v)
    bits = np.empty(n_v, dtype=np.uint8)
    posterior_bits(c2v, llr, var_ptr, var_edges, post, bits)
    ok = syndrome_is_zero(bits, check_ptr, edge_var)
    k = _record(0, 0, ok, early_stop, cps, post, bits, counters, ob, op, oc, oi, octr)
    it = 0
    while k < len(cps):
        it += 1
        for c in range(n_c):
            lo, hi = check_ptr[c], check_ptr[c + 1]
            for e in range(lo, hi):
                c2v[e] = check_message(t, check_ptr, c, e)
            counters[C2V] += hi - lo
            for e in range(lo, hi):
                v = edge_var[e]
                for q in range(var_ptr[v], var_ptr[v + 1]):
                    f = var_edges[q]
                    if f == e:
                        continue
                    v2c[f] = variable_message(c2v, llr, var_ptr, var_edges, v, f)
                    t[f] = math.tanh(0.5 * v2c[f])
                    counters[V2C] += 1
        posterior_bits(c2v, llr, var_ptr, var_edges, post, bits)
        ok = syndrome_is_zero(bits, check_ptr, edge_var)
        k = _record(k, it, ok, early_stop, cps, post, bits, counters, ob, op, oc, oi, octr)
    return 0


@njit(cache=True, inline="always")
def _score_row(d, skip, check_ptr, t, c2v, cand, resid, prio, count, alpha, weighted, l, rule,
               decay, scale, use_tree, tree):
    """Refresh candidates and priorities of row ``d`` except edge ``skip``.

    Returns the number of selection-tree comparisons.
    """
    lo, hi = check_ptr[d], check_ptr[d + 1]
    if weighted:
        alpha[d] = layer_weight(layer_level(c2v, lo, hi, l, rule), l)
    n_cmp = 0
    for g in range(lo, hi):
        if g == skip:
            continue
        cand[g] = check_message(t, check_ptr, d, g)
        r = abs(cand[g] - c2v[g])
        resid[g] = r
        w = alpha[d]
        if decay != 1.0:
            w *= decay ** count[g]
        prio[g] = scale * (w * r)
        if use_tree:
            n_cmp += tree_update(tree, prio, g)
    return n_cmp


@njit(cache=True, inline="always")
def _commit(e, check_ptr, edge_check, edge_var, var_ptr, var_edges, llr, c2v, v2c, t, cand, resid, prio,
            count, alpha, weighted, l, rule, decay, scale, use_tree, tree, counters):
    c2v[e] = cand[e]
    count[e] += 1
    resid[e] = 0.0
    prio[e] = 0.0
    n_cmp = 0
    if use_tree:
        n_cmp += tree_update(tree, prio, e)
    p = edge_var[e]
    n_v2c = 0
    n_pre = 0
    for q in range(var_ptr[p], var_ptr[p + 1]):
        f = var_edges[q]
        if f == e:
            continue
        v2c[f] = variable_message(c2v, llr, var_ptr, var_edges, p, f)
        t[f] = math.tanh(0.5 * v2c[f])
        n_v2c += 1
    for q in range(var_ptr[p], var_ptr[p + 1]):
        f = var_edges[q]
        if f == e:
            continue
        d = edge_check[f]
        n_pre += check_ptr[d + 1] - check_ptr[d] - 1
        n_cmp += _score_row(d, f, check_ptr, t, c2v, cand, resid, prio, count, alpha, weighted, l, rule,
                            decay, scale, use_tree, tree)
    counters[C2V] += 1
    counters[V2C] += n_v2c
    counters[PRE] += n_pre
    counters[CMP] += n_cmp


@njit(cache=True)
def _residual_driven(check_ptr, edge_check, edge_var, var_ptr, var_edges, llr, cps, early_stop,
                     mode, decay, l, rule, linear, scale, trace, ob, op, oc, oi, octr):
    """mode 0: max-residual selection (RBP, RD-RBP, WR-LBP); mode 1: SVNF."""
    n_e, n_v, n_c = len(edge_var), len(llr), len(check_ptr) - 1
    weighted = mode == 0 and rule >= 0
    counters = np.zeros(6, dtype=np.int64)
    c2v = np.zeros(n_e)
    v2c = np.empty(n_e)
    t = np.empty(n_e)
    for e in range(n_e):
        v2c[e] = llr[edge_var[e]]
        t[e] = math.tanh(0.5 * v2c[e])
    post = np.empty(n_v)
    bits = np.empty(n_v, dtype=np.uint8)
    posterior_bits(c2v, llr, var_ptr, var_edges, post, bits)
    ok = syndrome_is_zero(bits, check_ptr, edge_var)
    k = _record(0, 0, ok, early_stop, cps, post, bits, counters, ob, op, oc, oi, octr)
    if k == len(cps):
        return 0

    cand = np.empty(n_e)
    resid = np.zeros(n_e)
    prio = np.zeros(n_e)
    count = np.zeros(n_e, dtype=np.int64)
    alpha = np.ones(n_c)
    use_tree = mode == 0 and not linear
    tree = np.empty(2 * tree_size(n_e) if use_tree else 2, dtype=np.int64)
    for c in range(n_c):
        _score_row(c, -1, check_ptr, t, c2v, cand, resid, prio, count, alpha, weighted, l, rule,
                   decay, scale, False, tree)
    counters[INIT_PRE] = n_e
    if use_tree:
        counters[INIT_CMP] = tree_build(tree, prio)

    commits = 0
    it = 0
    n_tr = 0
    v = 0
    while True:
        if mode == 0:
            if use_tree:
                e = tree[1]
            else:
                e = linear_argmax(prio)
                counters[CMP] += n_e - 1
        else:
            # best C2V among the checks of v, excluding the messages to v
            e = -1
            top = 0.0
            n_scan = 0
            for q in range(var_ptr[v], var_ptr[v + 1]):
                own = var_edges[q]
                c = edge_check[own]
                for g in range(check_ptr[c], check_ptr[c + 1]):
                    if g == own:
                        continue
                    if e < 0:
                        e = g
                        top = prio[g]
                    else:
                        n_scan += 1
                        if prio[g] > top:
                            e = g
                            top = prio[g]
            counters[CMP] += n_scan
            if e < 0 and var_ptr[v + 1] > var_ptr[v]:
                e = var_edges[var_ptr[v]]
            v = (v + 1) % n_v
            if e < 0:
                continue
        if n_tr < len(trace):
            trace[n_tr] = e
            n_tr += 1
        _commit(e, check_ptr, edge_check, edge_var, var_ptr, var_edges, llr, c2v, v2c, t, cand, resid, prio,
                count, alpha, weighted, l, rule, decay, scale, use_tree, tree, counters)
        commits += 1
        if commits % n_e == 0:
            it += 1
            posterior_bits(c2v, llr, var_ptr, var_edges, post, bits)
            ok = syndrome_is_zero(bits, check_ptr, edge_var)
            k = _record(k, it, ok, early_stop, cps, post, bits, counters, ob, op, oc, oi, octr)
            if k == len(cps):
                return n_tr


# -- Python entry points -----------------------------------------------------


def decode_checkpoints(
    graph: TannerGraph,
    llr,
    checkpoints,
    schedule: str = "wr-lbp",
    *,
    l: float = 0.9,
    decay: float = 0.9,
    layer_rule: str = "max",
    selection: str = "tree",
    early_stop: bool = True,
    residual_scale: float = 1.0,
    trace: int = 0,
) -> list[DecodeOutcome]:
    """Decode one frame and report the state at each checkpoint iteration.

    ``checkpoints`` are iteration budgets (each >= 1). The outcome for budget
    ``T`` equals what ``decode(..., max_iter=T)`` returns. ``decay`` only
    affects ``rd-rbp``; ``l`` and ``layer_rule`` only affect ``wr-lbp``.
    ``selection="linear"`` replaces the winner tree by an exhaustive scan
    (audit mode). ``trace`` records the first that many committed edge ids.
    """
    if schedule not in SCHEDULES:
        raise ValueError(f"unknown schedule {schedule!r}; expected one of {', '.join(SCHEDULES)}")
    cps = np.asarray(sorted(set(int(c) for c in checkpoints)), dtype=np.int64)
    if cps.size == 0 or cps[0] < 1:
        raise ValueError("iteration budgets must be >= 1")
    if selection not in ("tree", "linear"):
        raise ValueError(f"selection must be 'tree' or 'linear', got {selection!r}")
    if graph.n_edges == 0:
        raise ValueError("graph has no edges")
    llr = np.clip(np.asarray(llr, dtype=np.float64), -LLR_MAX, LLR_MAX)
    if llr.shape != (graph.n_vars,):
        raise ValueError(f"llr length {llr.size} != {graph.n_vars}")

    n_cp = len(cps)
    ob = np.zeros((n_cp, graph.n_vars), dtype=np.uint8)
    op = np.zeros((n_cp, graph.n_vars))
    oc = np.zeros(n_cp, dtype=np.bool_)
    oi = np.zeros(n_cp, dtype=np.int64)
    octr = np.zeros((n_cp, 6), dtype=np.int64)
    tr = np.full(trace, -1, dtype=np.int64)
    g = graph
    n_tr = 0
    if schedule == "bp":
        _flooding(g.check_ptr, g.edge_var, g.var_ptr, g.var_edges, llr, cps, early_stop, ob, op, oc, oi, octr)
    elif schedule == "lbp":
        _layered(g.check_ptr, g.edge_var, g.var_ptr, g.var_edges, llr, cps, early_stop, ob, op, oc, oi, octr)
    else:
        if schedule == "wr-lbp":
            if l <= 0:
                raise ValueError("l must be positive")
            rule = LAYER_RULES[layer_rule]
        else:
            rule = -1
        d = decay if schedule == "rd-rbp" else 1.0
        if not 0.0 < d <= 1.0:
            raise ValueError(f"decay must lie in (0, 1], got {decay}")
        if residual_scale <= 0:
            raise ValueError("residual_scale must be positive")
        mode = 1 if schedule == "svnf" else 0
        n_tr = _residual_driven(
            g.check_ptr, g.edge_check, g.edge_var, g.var_ptr, g.var_edges, llr, cps, early_stop,
            mode, float(d), float(l), rule, selection == "linear", float(residual_scale), tr,
            ob, op, oc, oi, octr,
        )
    return [
        DecodeOutcome(
            decoded=ob[i],
            converged=bool(oc[i]),
            iterations=int(oi[i]),
            counters=OpCounters.from_array(octr[i]),
            posterior=op[i],
            trace=tr[:n_tr] if trace else None,
        )
        for i in range(n_cp)
    ]


def decode(graph: TannerGraph, llr, max_iter: int, schedule: str = "wr-lbp", **kw) -> DecodeOutcome:
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    return decode_checkpoints(graph, llr, [max_iter], schedule, **kw)[0]


def decode_flooding(graph: TannerGraph, llr, max_iter: int, **kw) -> DecodeOutcome:
    return decode(graph, llr, max_iter, "bp", **kw)


def decode_lbp(graph: TannerGraph, llr, max_iter: int, **kw) -> DecodeOutcome:
    return decode(graph, llr, max_iter, "lbp", **kw)


def decode_rbp(graph: TannerGraph, llr, max_iter: int, decay: float = 1.0, **kw) -> DecodeOutcome:
    """Residual BP; ``decay < 1`` gives the residual-decaying variant."""
    if decay == 1.0:
        return decode(graph, llr, max_iter, "rbp", **kw)
    return decode(graph, llr, max_iter, "rd-rbp", decay=decay, **kw)


def decode_svnf(graph: TannerGraph, llr, max_iter: int, **kw) -> DecodeOutcome:
    return decode(graph, llr, max_iter, "svnf", **kw)


def decode_wrlbp(graph: TannerGraph, llr, max_iter: int, l: float = 0.9, **kw) -> DecodeOutcome:
    return decode(graph, llr, max_iter, "wr-lbp", l=l, **kw)
