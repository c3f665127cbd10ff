"""Monte-Carlo BER/FER simulation over BPSK/AWGN.

Frame ``f`` at a given Eb/N0 draws its message and noise from a generator
seeded by ``(master_seed, Eb/N0 in milli-dB, f)``. Results therefore depend
neither on how frames are spread over workers nor on which scheduler or
iteration budget is being simulated: every scheduler sees the same frames.
"""

from __future__ import annotations

import csv
import logging
import math
import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .channel import ChannelConfig, channel_llr
from .codes import GeneratorMatrix, ParityCheckMatrix, construct_regular, encode, load_alist, systematize
from .decoders import SCHEDULES, decode_checkpoints
from .tanner import TannerGraph, build_graph

log = logging.getLogger(__name__)

CSV_HEADER = (
    "scheduler", "ebn0_db", "max_iter", "frames", "bit_errors", "bits", "ber",
    "frame_errors", "fer", "mean_iters", "c2v", "v2c", "precomp", "cmp", "seed",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    n: int = 512
    dv: int = 3
    dc: int = 6
    alist: str | None = None
    code_seed: int = 1
    schedulers: tuple[str, ...] = SCHEDULES
    ebn0_grid: tuple[float, ...] = (1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
    iterations: tuple[int, ...] = (3,)
    frames: int = 5000
    master_seed: int = 1
    l: float = 0.9
    decay: float = 0.9
    layer_rule: str = "max"
    workers: int = 1
    all_zeros: bool = False
    # test hook: overrides the Eb/N0-derived noise level (0 = noiseless)
    noise_sigma: float | None = None

    def validate(self) -> "SimConfig":
        if self.frames < 1:
            raise ConfigError("frames must be >= 1")
        if not self.schedulers:
            raise ConfigError("no schedulers given")
        bad = [s for s in self.schedulers if s not in SCHEDULES]
        if bad:
            raise ConfigError(f"unknown scheduler(s) {bad}; expected a subset of {list(SCHEDULES)}")
        if not self.ebn0_grid:
            raise ConfigError("empty Eb/N0 grid")
        if not self.iterations or min(self.iterations) < 1:
            raise ConfigError("iterations must be a non-empty list of values >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.l <= 0 or not 0 < self.decay <= 1:
            raise ConfigError("need l > 0 and 0 < decay <= 1")
        if self.layer_rule not in ("max", "min"):
            raise ConfigError("layer_rule must be 'max' or 'min'")
        return self


@dataclass
class SimPoint:
    scheduler: str
    ebn0_db: float
    max_iter: int
    frames: int
    bit_errors: int
    bits: int
    frame_errors: int
    iter_sum: int
    c2v: int = 0
    v2c: int = 0
    precomp: int = 0
    cmp: int = 0
    seed: int = 0
    error: str | None = field(default=None, compare=False)
    # sum over frames of (bit errors in the frame)^2; not part of the CSV
    bit_error_sq: int = field(default=0, compare=False)

    @property
    def ber(self) -> float:
        return math.nan if self.error or not self.bits else self.bit_errors / self.bits

    @property
    def fer(self) -> float:
        return math.nan if self.error or not self.frames else self.frame_errors / self.frames

    @property
    def mean_iters(self) -> float:
        return math.nan if self.error or not self.frames else self.iter_sum / self.frames

    def ber_interval(self, z: float = 1.959964) -> tuple[float, float]:
        return wilson_interval(self.bit_errors, self.bits, z)

    def fer_interval(self, z: float = 1.959964) -> tuple[float, float]:
        return wilson_interval(self.frame_errors, self.frames, z)

    def ber_frame_interval(self, z: float = 1.959964) -> tuple[float, float]:
        """Normal interval on BER with frames, not bits, as the independent unit.

        Bit errors cluster inside failed frames, so the per-bit binomial
        interval is too narrow when a handful of frames carry all the errors.
        """
        if self.error or not self.frames or not self.bits:
            return (math.nan, math.nan)
        n_bits = self.bits / self.frames
        mean = self.bit_errors / self.frames
        var = max(self.bit_error_sq / self.frames - mean * mean, 0.0)
        half = z * math.sqrt(var / self.frames)
        return (max(0.0, (mean - half) / n_bits), min(1.0, (mean + half) / n_bits))


def wilson_interval(k: int, n: int, z: float = 1.959964) -> tuple[float, float]:
    if n <= 0:
        return (math.nan, math.nan)
    p = k / n
    den = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return (lo, hi)


@dataclass(frozen=True)
class Code:
    h: ParityCheckMatrix
    hp: ParityCheckMatrix
    gen: GeneratorMatrix
    graph: TannerGraph


def build_code(cfg: SimConfig) -> Code:
    if cfg.alist:
        h = load_alist(Path(cfg.alist).read_text())
    else:
        h = construct_regular(cfg.n, cfg.dv, cfg.dc, seed=cfg.code_seed)
    gen, hp = systematize(h)
    return Code(h=h, hp=hp, gen=gen, graph=build_graph(hp))


def _ebn0_key(ebn0_db: float) -> int:
    return int(round(ebn0_db * 1000)) + (1 << 20)


def frame_rng(master_seed: int, ebn0_db: float, frame: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, _ebn0_key(ebn0_db), frame]))


# Per-process code object for pool workers.
_WORKER_CODE: Code | None = None


def _init_worker(code: Code) -> None:
    global _WORKER_CODE
    _WORKER_CODE = code


def _run_frames(cfg: SimConfig, code: Code | None, scheduler: str, ebn0_db: float,
                cps: tuple[int, ...], start: int, stop: int) -> np.ndarray:
    """Tallies per checkpoint: bit errors, frame errors, iterations, c2v, v2c, precomp, cmp,
    squared bit errors."""
    code = code or _WORKER_CODE
    n, k = code.gen.n, code.gen.k
    ch = ChannelConfig(ebn0_db, k / n)
    sigma = ch.sigma if cfg.noise_sigma is None else cfg.noise_sigma
    n0 = 2.0 * sigma * sigma
    tally = np.zeros((len(cps), 8), dtype=np.int64)
    for f in range(start, stop):
        rng = frame_rng(cfg.master_seed, ebn0_db, f)
        if cfg.all_zeros:
            c = np.zeros(n, dtype=np.uint8)
        else:
            c = encode(code.gen, rng.integers(0, 2, k, dtype=np.uint8))
        y = 2.0 * c - 1.0
        if sigma > 0:
            y += sigma * rng.standard_normal(n)
        outs = decode_checkpoints(
            code.graph, channel_llr(y, n0), cps, scheduler,
            l=cfg.l, decay=cfg.decay, layer_rule=cfg.layer_rule,
        )
        for i, o in enumerate(outs):
            errs = int(np.count_nonzero(o.decoded != c))
            ctr = o.counters
            tally[i] += (errs, errs > 0, o.iterations,
                         ctr.c2v_updates, ctr.v2c_updates, ctr.precomputations, ctr.comparisons, errs * errs)
    return tally


def _chunks(frames: int, workers: int) -> list[tuple[int, int]]:
    if workers == 1:
        return [(0, frames)]
    size = max(1, math.ceil(frames / (4 * workers)))
    return [(a, min(a + size, frames)) for a in range(0, frames, size)]


class _Runner:
    """Dispatches frame ranges inline or onto a process pool."""

    def __init__(self, cfg: SimConfig, code: Code):
        self.cfg, self.code = cfg, code
        self.pool = None
        if cfg.workers > 1:
            ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
            self.pool = ProcessPoolExecutor(cfg.workers, mp_context=ctx, initializer=_init_worker, initargs=(code,))

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        if self.pool is not None:
            self.pool.shutdown()

    def run(self, scheduler: str, ebn0_db: float, cps: tuple[int, ...]) -> list[SimPoint]:
        cfg = self.cfg
        chunks = _chunks(cfg.frames, cfg.workers)
        if self.pool is None:
            tally = sum(_run_frames(cfg, self.code, scheduler, ebn0_db, cps, a, b) for a, b in chunks)
        else:
            futs = [self.pool.submit(_run_frames, cfg, None, scheduler, ebn0_db, cps, a, b) for a, b in chunks]
            tally = sum(f.result() for f in futs)
        n = self.code.gen.n
        return [
            SimPoint(scheduler, float(ebn0_db), it, cfg.frames, int(t[0]), cfg.frames * n, int(t[1]), int(t[2]),
                     c2v=int(t[3]), v2c=int(t[4]), precomp=int(t[5]), cmp=int(t[6]), seed=cfg.master_seed,
                     bit_error_sq=int(t[7]))
            for it, t in zip(cps, tally)
        ]


def run_point(cfg: SimConfig, scheduler: str, ebn0_db: float, max_iter: int, code: Code | None = None) -> SimPoint:
    cfg = replace(cfg, schedulers=(scheduler,), ebn0_grid=(ebn0_db,), iterations=(max_iter,)).validate()
    code = code or build_code(cfg)
    with _Runner(cfg, code) as runner:
        return runner.run(scheduler, ebn0_db, (max_iter,))[0]


def run_sweep(cfg: SimConfig, out: str | os.PathLike | None = None, code: Code | None = None,
              progress=None) -> list[SimPoint]:
    """All (scheduler, Eb/N0, iterations) points, sorted by that key.

    When ``out`` is given, rows are appended to the CSV as each
    (scheduler, Eb/N0) group finishes. A group that raises is recorded with
    its error and the sweep moves on.
    """
    cfg.validate()
    code = code or build_code(cfg)
    cps = tuple(sorted(set(cfg.iterations)))
    points: list[SimPoint] = []
    fh = _open_csv(out) if out is not None else None
    try:
        with _Runner(cfg, code) as runner:
            for sched in sorted(set(cfg.schedulers)):
                for ebn0 in sorted(set(cfg.ebn0_grid)):
                    try:
                        group = runner.run(sched, ebn0, cps)
                    except Exception as exc:  # keep sweeping; the row carries the failure
                        log.exception("point %s @ %.3g dB failed", sched, ebn0)
                        group = [SimPoint(sched, float(ebn0), it, cfg.frames, 0, 0, 0, 0,
                                          seed=cfg.master_seed, error=repr(exc)) for it in cps]
                    points.extend(group)
                    if fh is not None:
                        _write_rows(fh, group)
                    if progress is not None:
                        for p in group:
                            progress(p)
    finally:
        if fh is not None:
            fh.close()
    return points


def _fmt(x: float) -> str:
    return f"{x:.17e}"


def _row(p: SimPoint) -> list[str]:
    return [
        p.scheduler, _fmt(p.ebn0_db), str(p.max_iter), str(p.frames), str(p.bit_errors), str(p.bits),
        _fmt(p.ber), str(p.frame_errors), _fmt(p.fer), _fmt(p.mean_iters),
        str(p.c2v), str(p.v2c), str(p.precomp), str(p.cmp), str(p.seed),
    ]


def _open_csv(path):
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    csv.writer(fh, lineterminator="\n").writerow(CSV_HEADER)
    fh.flush()
    return fh


def _write_rows(fh, points: Iterable[SimPoint]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    for p in points:
        w.writerow(_row(p))
    fh.flush()


def write_csv(points: Sequence[SimPoint], path) -> None:
    ordered = sorted(points, key=lambda p: (p.scheduler, p.ebn0_db, p.max_iter))
    fh = _open_csv(path)
    try:
        _write_rows(fh, ordered)
    finally:
        fh.close()


def read_csv(path) -> list[SimPoint]:
    out = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            ber = float(r["ber"])
            frames = int(r["frames"])
            mean_iters = float(r["mean_iters"])
            out.append(SimPoint(
                scheduler=r["scheduler"], ebn0_db=float(r["ebn0_db"]), max_iter=int(r["max_iter"]),
                frames=frames, bit_errors=int(r["bit_errors"]), bits=int(r["bits"]),
                frame_errors=int(r["frame_errors"]),
                iter_sum=0 if math.isnan(mean_iters) else round(mean_iters * frames),
                c2v=int(r["c2v"]), v2c=int(r["v2c"]), precomp=int(r["precomp"]), cmp=int(r["cmp"]),
                seed=int(r["seed"]), error="error" if math.isnan(ber) else None,
            ))
    return out
