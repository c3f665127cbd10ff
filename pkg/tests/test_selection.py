import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ldpc_ids.decoders import ResidualTable


def _oracle(prio):
    top = max(prio)
    return prio.index(top)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 70),
    st.lists(st.tuples(st.integers(0, 69), st.sampled_from([0.0, 0.5, 1.0, 2.0, 3.25]) | st.floats(0, 50)), max_size=80),
)
def test_tree_argmax_matches_linear_scan(n, ops):
    t = ResidualTable(n)
    shadow = [0.0] * n
    for e, r in ops:
        e %= n
        t.set(e, r)
        shadow[e] = r
        assert t.argmax() == _oracle(shadow) == t.argmax_linear()


def test_ties_break_to_lowest_id():
    t = ResidualTable(10)
    for e in (7, 3, 9, 5):
        t.set(e, 1.0)
    assert t.argmax() == 3
    t.commit(3)
    assert t.argmax() == 5
    t.set(1, 1.0)
    assert t.argmax() == 1


def test_all_zero_selects_edge_zero():
    t = ResidualTable(5)
    assert t.argmax() == 0 == t.argmax_linear()


def test_decay_bookkeeping():
    t = ResidualTable(4, decay=0.9)
    t.set(2, 1.0)
    t.commit(2)
    t.commit(2)
    assert t.update_count[2] == 2
    t.set(2, 1.0)
    assert t.priority(2) == pytest.approx(0.81)
    t.set(1, 0.82)
    assert t.argmax() == 1
    t.set(1, 0.8)
    assert t.argmax() == 2


def test_weight_scales_priority():
    t = ResidualTable(3)
    t.set(0, 1.0, weight=0.25)
    t.set(1, 0.5)
    assert t.argmax() == 1
    assert t.priority(0) == 0.25


def test_commit_clears_residual():
    t = ResidualTable(3)
    t.set(1, 4.0)
    t.commit(1)
    assert t.residual[1] == 0.0 and t.priority(1) == 0.0


def test_update_cost_is_logarithmic():
    n = 1536
    t = ResidualTable(n)
    rng = np.random.default_rng(0)
    before = t.comparisons
    for e in rng.integers(0, n, 500):
        t.set(int(e), float(rng.random()))
    assert t.comparisons - before <= 500 * math.ceil(math.log2(n))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        ResidualTable(4, decay=0.0)
    with pytest.raises(ValueError):
        ResidualTable(4).set(0, -1.0)
