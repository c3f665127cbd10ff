"""Binary LDPC parity-check matrices: construction, alist I/O, systematic
generator derivation, encoding and syndromes over GF(2)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Iterable

import numpy as np

log = logging.getLogger(__name__)


class CodeError(ValueError):
    """Base class for code construction and manipulation failures."""


class InfeasibleParametersError(CodeError):
    pass


class ConstructionError(CodeError):
    def __init__(self, message: str, seed: int | None, attempts: int):
        super().__init__(f"{message} (seed={seed}, attempts={attempts})")
        self.seed = seed
        self.attempts = attempts


class RankDeficiencyError(CodeError):
    def __init__(self, rank: int, rows: int):
        super().__init__(f"parity-check matrix is rank deficient: rank {rank} < {rows} rows")
        self.rank = rank
        self.rows = rows


class AlistFormatError(CodeError):
    """Malformed alist content."""


class AlistHeaderError(AlistFormatError):
    pass


class AlistIndexError(AlistFormatError):
    pass


class AlistDegreeError(AlistFormatError):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """Sparse (n-k) x n binary matrix stored both row-major and column-major.

    ``row_ptr``/``row_cols`` is a CSR layout with ascending column indices per
    row; ``col_ptr``/``col_rows`` is the matching CSC layout.
    """

    n: int
    k: int
    row_ptr: np.ndarray
    row_cols: np.ndarray
    col_ptr: np.ndarray = field(repr=False)
    col_rows: np.ndarray = field(repr=False)

    @classmethod
    def from_entries(cls, n: int, m: int, entries: Iterable[tuple[int, int]]) -> "ParityCheckMatrix":
        pairs = np.array(sorted(entries), dtype=np.int64).reshape(-1, 2)
        if not 0 < m < n:
            raise CodeError(f"need 0 < rows < n, got rows={m}, n={n}")
        if pairs.size:
            if pairs.min() < 0 or pairs[:, 0].max() >= m or pairs[:, 1].max() >= n:
                raise CodeError("entry index out of range")
            if np.any(np.all(pairs[1:] == pairs[:-1], axis=1)):
                raise CodeError("duplicate entry")
        rows, cols = pairs[:, 0], pairs[:, 1]
        row_ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=m), out=row_ptr[1:])
        order = np.lexsort((rows, cols))
        col_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(cols, minlength=n), out=col_ptr[1:])
        return cls(
            n=n,
            k=n - m,
            row_ptr=_readonly(row_ptr),
            row_cols=_readonly(cols.copy()),
            col_ptr=_readonly(col_ptr),
            col_rows=_readonly(rows[order].copy()),
        )

    @classmethod
    def from_dense(cls, h) -> "ParityCheckMatrix":
        h = np.asarray(h)
        m, n = h.shape
        rows, cols = np.nonzero(h & 1)
        return cls.from_entries(n, m, zip(rows.tolist(), cols.tolist()))

    @property
    def m(self) -> int:
        return self.n - self.k

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def n_entries(self) -> int:
        return int(self.row_ptr[-1])

    def row(self, i: int) -> np.ndarray:
        return self.row_cols[self.row_ptr[i]:self.row_ptr[i + 1]]

    def col(self, j: int) -> np.ndarray:
        return self.col_rows[self.col_ptr[j]:self.col_ptr[j + 1]]

    def row_degrees(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    def col_degrees(self) -> np.ndarray:
        return np.diff(self.col_ptr)

    def entries(self) -> set[tuple[int, int]]:
        rows = np.repeat(np.arange(self.m), self.row_degrees())
        return set(zip(rows.tolist(), self.row_cols.tolist()))

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.m, self.n), dtype=np.uint8)
        h[np.repeat(np.arange(self.m), self.row_degrees()), self.row_cols] = 1
        return h

    def is_regular(self, dv: int, dc: int) -> bool:
        return bool(np.all(self.col_degrees() == dv) and np.all(self.row_degrees() == dc))

    def permute_columns(self, perm: np.ndarray) -> "ParityCheckMatrix":
        """Return H' with ``H'[:, t] == H[:, perm[t]]``."""
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        rows = np.repeat(np.arange(self.m), self.row_degrees())
        return ParityCheckMatrix.from_entries(self.n, self.m, zip(rows.tolist(), inv[self.row_cols].tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParityCheckMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.row_cols, other.row_cols)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Systematic k x n generator ``[P^T | I_k]`` for the column-permuted H.

    ``permutation[t]`` is the column of the original H that sits at code
    position ``t``.
    """

    matrix: np.ndarray
    permutation: np.ndarray
    packed: np.ndarray = field(repr=False)

    @property
    def k(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]

    def to_original(self, c: np.ndarray) -> np.ndarray:
        """Reorder a codeword from code positions to the original H columns."""
        out = np.empty_like(c)
        out[self.permutation] = c
        return out


def gf2_rank(h: np.ndarray) -> int:
    a = np.array(h, dtype=np.uint8) & 1
    m, n = a.shape
    rank = 0
    for col in range(n):
        if rank == m:
            break
        hits = np.nonzero(a[rank:, col])[0]
        if hits.size == 0:
            continue
        piv = rank + hits[0]
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        others = np.nonzero(a[:, col])[0]
        others = others[others != rank]
        a[others] ^= a[rank]
        rank += 1
    return rank


def systematize(h: ParityCheckMatrix) -> tuple[GeneratorMatrix, ParityCheckMatrix]:
    """Gauss-Jordan reduce H to ``[I | P]`` under a column permutation.

    Returns the generator ``[P^T | I]`` and the column-permuted (still sparse)
    H whose null space it spans. Raises :class:`RankDeficiencyError` rather
    than dropping dependent rows.
    """
    m, n = h.m, h.n
    a = h.to_dense()
    perm = np.arange(n)
    for r in range(m):
        sub = a[r:, r:]
        nz_cols = np.nonzero(sub.any(axis=0))[0]
        if nz_cols.size == 0:
            raise RankDeficiencyError(rank=r, rows=m)
        c = r + nz_cols[0]
        if c != r:
            a[:, [r, c]] = a[:, [c, r]]
            perm[[r, c]] = perm[[c, r]]
        piv = r + np.nonzero(a[r:, r])[0][0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        others = np.nonzero(a[:, r])[0]
        others = others[others != r]
        a[others] ^= a[r]
    p = a[:, m:]
    g = np.concatenate([p.T, np.eye(n - m, dtype=np.uint8)], axis=1)
    gen = GeneratorMatrix(
        matrix=_readonly(np.ascontiguousarray(g)),
        permutation=_readonly(perm),
        packed=_readonly(np.packbits(g, axis=1)),
    )
    return gen, h.permute_columns(perm)


def encode(g: GeneratorMatrix, message) -> np.ndarray:
    """c = m G over GF(2), computed as an XOR of bit-packed generator rows."""
    msg = np.asarray(message, dtype=np.uint8)
    if msg.shape != (g.k,):
        raise ValueError(f"message length {msg.size} != k={g.k}")
    rows = g.packed[msg.astype(bool)]
    if rows.shape[0] == 0:
        return np.zeros(g.n, dtype=np.uint8)
    packed = np.bitwise_xor.reduce(rows, axis=0)
    return np.unpackbits(packed, count=g.n)


def syndrome(h: ParityCheckMatrix, word) -> np.ndarray:
    c = np.asarray(word, dtype=np.uint8)
    if c.shape != (h.n,):
        raise ValueError(f"word length {c.size} != n={h.n}")
    gathered = c[h.row_cols]
    out = np.zeros(h.m, dtype=np.uint8)
    nonempty = h.row_ptr[:-1] < h.row_ptr[1:]
    out[nonempty] = np.bitwise_xor.reduceat(gathered, h.row_ptr[:-1][nonempty]) & 1
    return out


def four_cycle_free_feasible(n: int, m: int, dv: int, dc: int) -> bool:
    """Pair-counting bound: distinct rows (columns) may share at most one column (row)."""
    return m * comb(dc, 2) <= comb(n, 2) and n * comb(dv, 2) <= comb(m, 2)


def _check_regular_params(n: int, dv: int, dc: int) -> int:
    if n <= 0 or dv <= 0 or dc <= 0:
        raise InfeasibleParametersError(f"n, dv, dc must be positive (got {n}, {dv}, {dc})")
    if (dv * n) % dc:
        raise InfeasibleParametersError(f"dv*n = {dv * n} is not divisible by dc = {dc}")
    if dv >= dc:
        raise InfeasibleParametersError(f"need dv < dc for a positive rate (got dv={dv}, dc={dc})")
    m = dv * n // dc
    if dc > n or dv > m:
        raise InfeasibleParametersError(f"degrees exceed node counts (n={n}, m={m})")
    return m


def _attempt(rng: np.random.Generator, n: int, m: int, dv: int, dc: int, avoid4: bool) -> list[set[int]] | None:
    """Greedy socket filling: each variable takes dv distinct checks, preferring
    the checks with the most free sockets, optionally skipping any check that
    would close a 4-cycle. Returns per-check variable sets or None on a dead end."""
    free = np.full(m, dc, dtype=np.int64)
    check_vars: list[set[int]] = [set() for _ in range(m)]
    var_checks: list[list[int]] = [[] for _ in range(n)]
    for v in rng.permutation(n):
        chosen: list[int] = []
        blocked = np.zeros(m, dtype=bool)
        for _ in range(dv):
            ok = (free > 0) & ~blocked
            if avoid4:
                for c in chosen:
                    for u in check_vars[c]:
                        if u != v:
                            for c2 in var_checks[u]:
                                ok[c2] = False
            cands = np.nonzero(ok)[0]
            if cands.size == 0:
                return None
            best = cands[free[cands] == free[cands].max()]
            c = int(rng.choice(best))
            chosen.append(c)
            blocked[c] = True
            free[c] -= 1
        for c in chosen:
            check_vars[c].add(int(v))
            var_checks[int(v)].append(c)
    return check_vars


def construct_regular(
    n: int,
    dv: int,
    dc: int,
    seed: int | None = 0,
    *,
    max_attempts: int = 200,
    full_rank: bool = True,
) -> ParityCheckMatrix:
    """Random regular (dv, dc) parity-check matrix of length ``n``.

    Double edges are never produced. Length-4 cycles are rejected whenever the
    pair-counting bound allows a 4-cycle-free matrix at all; otherwise the
    constraint is dropped with a warning. With ``full_rank`` a draw whose rows
    are dependent over GF(2) is rejected so that k = n - m holds exactly.
    """
    m = _check_regular_params(n, dv, dc)
    avoid4 = four_cycle_free_feasible(n, m, dv, dc)
    if not avoid4:
        log.warning("no 4-cycle-free regular (%d,%d) matrix exists for n=%d; allowing 4-cycles", dv, dc, n)
    if full_rank and dv % 2 == 0:
        raise InfeasibleParametersError(
            f"even column weight dv={dv} makes the rows sum to zero; full rank is impossible"
        )
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        check_vars = _attempt(rng, n, m, dv, dc, avoid4)
        if check_vars is None:
            continue
        h = ParityCheckMatrix.from_entries(n, m, ((c, v) for c in range(m) for v in check_vars[c]))
        if full_rank and gf2_rank(h.to_dense()) < m:
            continue
        log.debug("constructed (%d,%d) n=%d after %d attempt(s)", dv, dc, n, attempt)
        return h
    raise ConstructionError("regular construction failed", seed, max_attempts)


def has_four_cycle(h: ParityCheckMatrix) -> bool:
    d = h.to_dense().astype(np.int64)
    overlap = d @ d.T
    np.fill_diagonal(overlap, 0)
    return bool(overlap.max(initial=0) > 1)


# -- alist -----------------------------------------------------------------


def save_alist(h: ParityCheckMatrix) -> str:
    cdeg, rdeg = h.col_degrees(), h.row_degrees()
    max_c, max_r = int(cdeg.max(initial=0)), int(rdeg.max(initial=0))
    lines = [f"{h.n} {h.m}", f"{max_c} {max_r}", " ".join(map(str, cdeg)), " ".join(map(str, rdeg))]
    for j in range(h.n):
        nb = (h.col(j) + 1).tolist()
        lines.append(" ".join(map(str, nb + [0] * (max_c - len(nb)))))
    for i in range(h.m):
        nb = (h.row(i) + 1).tolist()
        lines.append(" ".join(map(str, nb + [0] * (max_r - len(nb)))))
    return "\n".join(lines) + "\n"


def _ints(line: str, what: str) -> list[int]:
    try:
        return [int(t) for t in line.split()]
    except ValueError:
        raise AlistHeaderError(f"non-integer token in {what}: {line!r}") from None


def load_alist(text: str) -> ParityCheckMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise AlistHeaderError("alist needs at least 4 header lines")
    head = _ints(lines[0], "size line")
    mx = _ints(lines[1], "max-degree line")
    if len(head) != 2 or len(mx) != 2 or min(head) <= 0 or min(mx) < 0:
        raise AlistHeaderError(f"bad header: {lines[0]!r} / {lines[1]!r}")
    n, m = head
    max_c, max_r = mx
    cdeg = _ints(lines[2], "column degrees")
    rdeg = _ints(lines[3], "row degrees")
    if len(cdeg) != n or len(rdeg) != m:
        raise AlistHeaderError(f"expected {n} column and {m} row degrees, got {len(cdeg)} and {len(rdeg)}")
    if max(cdeg, default=0) > max_c or max(rdeg, default=0) > max_r or min(cdeg + rdeg) < 0:
        raise AlistDegreeError("node degree exceeds declared maximum")
    if len(lines) != 4 + n + m:
        raise AlistHeaderError(f"expected {4 + n + m} non-empty lines, got {len(lines)}")

    def neighbours(line: str, deg: int, max_deg: int, limit: int, what: str) -> list[int]:
        vals = _ints(line, what)
        if not deg <= len(vals) <= max(max_deg, deg):
            raise AlistDegreeError(f"{what}: {len(vals)} entries for degree {deg}")
        active, pad = vals[:deg], vals[deg:]
        if any(v < 1 or v > limit for v in active):
            raise AlistIndexError(f"{what}: neighbour index out of range 1..{limit}: {active}")
        if any(pad):
            raise AlistDegreeError(f"{what}: nonzero padding {pad}")
        if len(set(active)) != deg:
            raise AlistDegreeError(f"{what}: repeated neighbour")
        return [v - 1 for v in active]

    col_entries = set()
    for j in range(n):
        for i in neighbours(lines[4 + j], cdeg[j], max_c, m, f"column {j + 1}"):
            col_entries.add((i, j))
    row_entries = set()
    for i in range(m):
        for j in neighbours(lines[4 + n + i], rdeg[i], max_r, n, f"row {i + 1}"):
            row_entries.add((i, j))
    if col_entries != row_entries:
        raise AlistDegreeError("column and row neighbour lists disagree")
    return ParityCheckMatrix.from_entries(n, m, row_entries)
