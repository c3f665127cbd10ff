"""Per-iteration operation counts: closed forms and instrumented measurement.

Counting conventions:

* a V2C or C2V update is one evaluation of the variable / check rule whose
  result is written to the message state;
* a pre-computation is a check-rule evaluation that only refreshes a residual
  (the one-off scoring pass before the first commit is kept apart in
  ``init_precomputations``);
* a comparison is one residual-order comparison made while selecting the
  next message. Exhaustive selection (``selection="linear"``) costs E - 1
  per commit; the winner tree costs at most ceil(log2 E) per priority change.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoders import SCHEDULES, OpCounters, decode_checkpoints
from .tanner import TannerGraph


def expected_counts(schedule: str, dv: int, dc: int, n: int) -> OpCounters:
    """Closed-form per-iteration counts for a regular (dv, dc) code of length n."""
    e = dv * n
    dynamic_pre = e * (dv - 1) * (dc - 1)
    table = {
        "bp": (e, e, 0, 0),
        "lbp": (e * (dv - 1), e, 0, 0),
        "rbp": (e * (dv - 1), e, dynamic_pre, e * (e - 1)),
        "rd-rbp": (e * (dv - 1), e, dynamic_pre, e * (e - 1)),
        "wr-lbp": (e * (dv - 1), e, dynamic_pre, e * (e - 1)),
        "svnf": (e * (dv - 1), e, dynamic_pre, e * (dv * (dc - 1) - 1)),
    }
    if schedule not in table:
        raise ValueError(f"unknown schedule {schedule!r}; expected one of {', '.join(SCHEDULES)}")
    return OpCounters(*table[schedule])


def measure(
    graph: TannerGraph,
    llr,
    schedule: str,
    iterations: int = 1,
    *,
    selection: str = "linear",
    **kw,
) -> list[OpCounters]:
    """Run ``iterations`` full iterations (no early exit) and return the counts
    accrued in each one."""
    outs = decode_checkpoints(
        graph, llr, range(1, iterations + 1), schedule, selection=selection, early_stop=False, **kw
    )
    prev = np.zeros(4, dtype=np.int64)
    per_iter = []
    for o in outs:
        cur = np.array(o.counters.as_tuple(), dtype=np.int64)
        per_iter.append(OpCounters(*(int(x) for x in cur - prev)))
        prev = cur
    return per_iter


@dataclass(frozen=True)
class AuditRow:
    counter: str
    expected: int
    measured: tuple[int, ...]

    @property
    def exact(self) -> bool:
        return all(m == self.expected for m in self.measured)

    @property
    def within(self) -> bool:
        return all(m <= self.expected for m in self.measured)


def audit(graph: TannerGraph, llr, schedule: str, dv: int, dc: int, iterations: int = 2,
          selection: str = "linear", **kw) -> list[AuditRow]:
    exp = expected_counts(schedule, dv, dc, graph.n_vars).as_tuple()
    got = [c.as_tuple() for c in measure(graph, llr, schedule, iterations, selection=selection, **kw)]
    names = ("v2c", "c2v", "precomp", "cmp")
    return [AuditRow(name, exp[i], tuple(g[i] for g in got)) for i, name in enumerate(names)]
