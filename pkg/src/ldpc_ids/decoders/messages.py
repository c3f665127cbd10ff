"""Sum-product message kernels shared by every schedule.

The ``@njit`` functions operate on the flat edge arrays of a
:class:`~ldpc_ids.tanner.TannerGraph`; the plain-Python wrappers at the bottom
take a graph and a :class:`MessageState` and are meant for inspection and
tests, not for hot loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..tanner import TannerGraph

LLR_MAX = 30.0
ATANH_CLIP = 1.0 - 1e-12

LAYER_MAX = 0
LAYER_MIN = 1
LAYER_RULES = {"max": LAYER_MAX, "min": LAYER_MIN}


@njit(cache=True, inline="always")
def clamp_llr(x):
    if x > LLR_MAX:
        return LLR_MAX
    if x < -LLR_MAX:
        return -LLR_MAX
    return x


@njit(cache=True, inline="always")
def _sibling_product(t, lo, hi, e):
    p = 1.0
    for s in range(lo, hi):
        if s != e:
            p *= t[s]
    if p > ATANH_CLIP:
        p = ATANH_CLIP
    elif p < -ATANH_CLIP:
        p = -ATANH_CLIP
    return p


@njit(cache=True, inline="always")
def check_message(t, check_ptr, c, e):
    """C2V value on edge ``e`` of check ``c``; ``t[s] = tanh(v2c[s] / 2)``."""
    p = _sibling_product(t, check_ptr[c], check_ptr[c + 1], e)
    return clamp_llr(2.0 * math.atanh(p))


@njit(cache=True)
def check_message_log(t, check_ptr, c, e):
    p = _sibling_product(t, check_ptr[c], check_ptr[c + 1], e)
    return clamp_llr(math.log((1.0 + p) / (1.0 - p)))


@njit(cache=True, inline="always")
def variable_message(c2v, llr, var_ptr, var_edges, v, e):
    s = llr[v]
    for k in range(var_ptr[v], var_ptr[v + 1]):
        f = var_edges[k]
        if f != e:
            s += c2v[f]
    return clamp_llr(s)


@njit(cache=True, inline="always")
def recoverability(mu, l):
    # sign in {-1, 0, 1}; clamp to [0, 1] then cap at l
    sg = 1.0 if mu > 0 else (-1.0 if mu < 0 else 0.0)
    x = 0.5 * (l + 1.0) * (1.0 + sg)
    if x < 0.0:
        x = 0.0
    elif x > 1.0:
        x = 1.0
    return min(x, l)


@njit(cache=True, inline="always")
def layer_level(c2v, lo, hi, l, rule):
    top = 0.0
    for e in range(lo, hi):
        r = recoverability(c2v[e], l)
        if r > top:
            top = r
    if rule == LAYER_MAX:
        return max(top, l)
    return min(top, l)


@njit(cache=True, inline="always")
def layer_weight(level, l):
    return 1.0 / 2.0 ** (l - level + 1.0)


@njit(cache=True)
def posterior_bits(c2v, llr, var_ptr, var_edges, post, bits):
    for v in range(len(llr)):
        s = llr[v]
        for k in range(var_ptr[v], var_ptr[v + 1]):
            s += c2v[var_edges[k]]
        post[v] = s
        bits[v] = 1 if s < 0 else 0


@njit(cache=True)
def syndrome_is_zero(bits, check_ptr, edge_var):
    for c in range(len(check_ptr) - 1):
        par = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            par ^= bits[edge_var[e]]
        if par:
            return False
    return True


# -- Python-level views -------------------------------------------------------


@dataclass
class MessageState:
    """Per-edge C2V / V2C messages plus per-variable channel LLRs."""

    c2v: np.ndarray
    v2c: np.ndarray
    channel: np.ndarray

    @classmethod
    def initial(cls, graph: TannerGraph, llr) -> "MessageState":
        ch = np.clip(np.asarray(llr, dtype=np.float64), -LLR_MAX, LLR_MAX)
        return cls(c2v=np.zeros(graph.n_edges), v2c=ch[graph.edge_var].copy(), channel=ch)


def _tanh_half(state: MessageState) -> np.ndarray:
    return np.tanh(0.5 * state.v2c)


def check_update(graph: TannerGraph, state: MessageState, edge: int) -> float:
    """Candidate C2V message for ``edge`` (not written back to ``state``)."""
    return float(check_message(_tanh_half(state), graph.check_ptr, graph.edge_check[edge], edge))


def check_update_log_form(graph: TannerGraph, state: MessageState, edge: int) -> float:
    return float(check_message_log(_tanh_half(state), graph.check_ptr, graph.edge_check[edge], edge))


def variable_update(graph: TannerGraph, state: MessageState, edge: int) -> float:
    v = graph.edge_var[edge]
    return float(variable_message(state.c2v, state.channel, graph.var_ptr, graph.var_edges, v, edge))


def posterior(graph: TannerGraph, state: MessageState, v: int | None = None):
    """Total LLR of variable ``v``, or of every variable when ``v`` is None."""
    total = state.channel + np.bincount(graph.edge_var, weights=state.c2v, minlength=graph.n_vars)
    return total if v is None else float(total[v])


def hard_decision(m):
    """1 where the total LLR is negative, else 0."""
    out = (np.asarray(m) < 0).astype(np.uint8)
    return int(out) if out.ndim == 0 else out


def residual(new: float, old: float) -> float:
    return abs(new - old)


def weighted_residual(new: float, old: float, alpha: float) -> float:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha * abs(new - old)


def recoverability_level(mu: float, l: float = 0.9) -> float:
    if l <= 0:
        raise ValueError("l must be positive")
    return float(recoverability(float(mu), float(l)))


@dataclass(frozen=True)
class LayerAssignment:
    row: int
    level: float
    alpha: float
    l: float


def layer_assign(graph: TannerGraph, state: MessageState, row: int, l: float = 0.9, rule: str = "max") -> LayerAssignment:
    lo, hi = graph.check_ptr[row], graph.check_ptr[row + 1]
    level = float(layer_level(state.c2v, lo, hi, float(l), LAYER_RULES[rule]))
    return LayerAssignment(row=row, level=level, alpha=float(layer_weight(level, float(l))), l=float(l))
