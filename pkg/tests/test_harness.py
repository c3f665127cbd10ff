import math
from dataclasses import replace

import numpy as np
import pytest

from ldpc_ids import SCHEDULES
from ldpc_ids.harness import (
    CSV_HEADER,
    ConfigError,
    SimConfig,
    SimPoint,
    build_code,
    frame_rng,
    read_csv,
    run_point,
    run_sweep,
    wilson_interval,
    write_csv,
)

SMALL = SimConfig(n=96, frames=40, ebn0_grid=(2.0,), iterations=(3,), master_seed=5)


@pytest.fixture(scope="module")
def code_small():
    return build_code(SMALL)


def test_wilson_interval():
    lo, hi = wilson_interval(0, 1000)
    assert lo == 0.0 and hi == pytest.approx(3.8267e-3, rel=1e-3)
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-4) and hi == pytest.approx(0.5962, abs=1e-4)
    assert wilson_interval(10, 10)[1] == 1.0
    assert all(math.isnan(x) for x in wilson_interval(0, 0))


def test_frame_rng_independent_of_everything_but_key():
    a = frame_rng(1, 3.5, 7).random(4)
    assert (a == frame_rng(1, 3.5, 7).random(4)).all()
    assert (a != frame_rng(1, 3.5, 8).random(4)).all()
    assert (a != frame_rng(2, 3.5, 7).random(4)).all()
    assert (a != frame_rng(1, 4.0, 7).random(4)).all()


def test_noiseless_gives_zero_ber(code_small):
    cfg = replace(SMALL, noise_sigma=0.0, frames=10)
    for s in SCHEDULES:
        p = run_point(cfg, s, 2.0, 3, code=code_small)
        assert p.bit_errors == 0 and p.ber == 0.0 and p.mean_iters == 0.0


def test_point_deterministic(code_small):
    a = run_point(SMALL, "wr-lbp", 2.0, 3, code=code_small)
    b = run_point(SMALL, "wr-lbp", 2.0, 3, code=code_small)
    assert a == b
    c = run_point(replace(SMALL, master_seed=6), "wr-lbp", 2.0, 3, code=code_small)
    assert c.bit_errors != a.bit_errors or c.iter_sum != a.iter_sum


def test_sweep_matches_independent_points(code_small):
    cfg = replace(SMALL, schedulers=("bp", "rbp"), ebn0_grid=(1.5, 2.5), iterations=(1, 4))
    pts = run_sweep(cfg, code=code_small)
    assert [(p.scheduler, p.ebn0_db, p.max_iter) for p in pts] == sorted(
        (s, e, i) for s in ("bp", "rbp") for e in (1.5, 2.5) for i in (1, 4)
    )
    for p in pts:
        assert p == run_point(cfg, p.scheduler, p.ebn0_db, p.max_iter, code=code_small)


def test_more_iterations_help():
    cfg = SimConfig(n=512, frames=5000, schedulers=("wr-lbp",), ebn0_grid=(3.5,), iterations=(1, 5))
    pts = {p.max_iter: p for p in run_sweep(cfg)}
    assert pts[5].ber < pts[1].ber


def test_grid_shape():
    cfg = SimConfig(n=96, frames=2)
    pts = run_sweep(cfg)
    assert len(pts) == len(SCHEDULES) * 7
    assert {p.ebn0_db for p in pts} == {1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}


def test_ber_decreases_with_snr(code_small):
    cfg = replace(SMALL, schedulers=("bp",), ebn0_grid=(1.0, 2.0, 3.0), frames=300)
    pts = run_sweep(cfg, code=code_small)
    for a, b in zip(pts, pts[1:]):
        assert b.ber_interval()[0] <= a.ber_interval()[1]
    assert pts[-1].ber < pts[0].ber


def test_workers_do_not_change_results(code_small):
    cfg = replace(SMALL, schedulers=("bp", "svnf"), frames=37)
    one = run_sweep(cfg, code=code_small)
    many = run_sweep(replace(cfg, workers=3), code=code_small)
    assert one == many
    assert [p.bit_error_sq for p in one] == [p.bit_error_sq for p in many]


def test_all_zeros_mode_agrees_with_random_messages(code_small):
    cfg = replace(SMALL, schedulers=("bp",), ebn0_grid=(1.5,), frames=400)
    a = run_sweep(cfg, code=code_small)[0]
    b = run_sweep(replace(cfg, all_zeros=True), code=code_small)[0]
    (alo, ahi), (blo, bhi) = a.ber_interval(), b.ber_interval()
    assert alo <= bhi and blo <= ahi


def test_csv_round_trip(tmp_path, code_small):
    cfg = replace(SMALL, schedulers=("lbp", "bp"), iterations=(2, 1))
    out = tmp_path / "r.csv"
    pts = run_sweep(cfg, out, code=code_small)
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    back = read_csv(out)
    assert back == pts
    assert [(p.scheduler, p.max_iter) for p in back] == [("bp", 1), ("bp", 2), ("lbp", 1), ("lbp", 2)]
    # write_csv sorts whatever it is given
    write_csv(list(reversed(pts)), tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text() == out.read_text()


def test_failed_point_is_nan_and_sweep_continues(tmp_path, code_small, monkeypatch):
    import ldpc_ids.harness as hm

    real = hm.decode_checkpoints

    def flaky(graph, llr, cps, schedule, **kw):
        if schedule == "svnf":
            raise RuntimeError("boom")
        return real(graph, llr, cps, schedule, **kw)

    monkeypatch.setattr(hm, "decode_checkpoints", flaky)
    cfg = replace(SMALL, schedulers=("bp", "svnf"), frames=5)
    pts = run_sweep(cfg, tmp_path / "r.csv", code=code_small)
    bad = [p for p in pts if p.scheduler == "svnf"]
    good = [p for p in pts if p.scheduler == "bp"]
    assert bad and all(math.isnan(p.ber) and p.error for p in bad)
    assert good and not any(p.error for p in good)
    rows = read_csv(tmp_path / "r.csv")
    assert math.isnan(next(r for r in rows if r.scheduler == "svnf").ber)


@pytest.mark.parametrize(
    "kw",
    [
        {"schedulers": ()},
        {"schedulers": ("bp", "turbo")},
        {"frames": 0},
        {"iterations": (0, 3)},
        {"ebn0_grid": ()},
        {"workers": 0},
        {"decay": 1.5},
        {"layer_rule": "mean"},
    ],
)
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        replace(SMALL, **kw).validate()


def test_simpoint_nan_on_error():
    p = SimPoint("bp", 1.0, 3, 10, 0, 0, 0, 0, error="x")
    assert math.isnan(p.ber) and math.isnan(p.fer) and math.isnan(p.mean_iters)


def test_alist_code_source(tmp_path):
    from ldpc_ids import construct_regular, save_alist

    path = tmp_path / "h.alist"
    path.write_text(save_alist(construct_regular(48, 3, 6, seed=4)))
    code = build_code(SimConfig(alist=str(path)))
    assert (code.gen.n, code.gen.k) == (48, 24)


def test_frame_interval_matches_direct_estimate(code_small):
    cfg = replace(SMALL, schedulers=("bp",), ebn0_grid=(1.0,), frames=60)
    p = run_sweep(cfg, code=code_small)[0]
    from ldpc_ids import ChannelConfig, channel_llr, decode, encode

    per_frame = []
    ch = ChannelConfig(1.0, code_small.gen.k / code_small.gen.n)
    for f in range(60):
        rng = frame_rng(cfg.master_seed, 1.0, f)
        c = encode(code_small.gen, rng.integers(0, 2, code_small.gen.k, dtype=np.uint8))
        y = 2.0 * c - 1.0 + ch.sigma * rng.standard_normal(code_small.gen.n)
        per_frame.append(int((decode(code_small.graph, channel_llr(y, ch.n0), 3, "bp").decoded != c).sum()))
    x = np.array(per_frame, dtype=float) / code_small.gen.n
    half = 1.959964 * x.std() / np.sqrt(len(x))
    assert p.bit_errors == sum(per_frame)
    assert p.ber_frame_interval() == pytest.approx((max(0.0, x.mean() - half), x.mean() + half))
    # clustered errors make the frame-level band the wider one
    assert p.ber_frame_interval()[1] > p.ber_interval()[1]
