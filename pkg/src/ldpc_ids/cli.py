"""Command line: ``ldpc-ids simulate ...`` and ``ldpc-ids audit ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import audit as audit_mod
from .channel import ChannelConfig, transmit
from .codes import CodeError
from .decoders import SCHEDULES
from .harness import ConfigError, SimConfig, SimPoint, build_code, run_sweep

log = logging.getLogger("ldpc_ids")


def parse_grid(text: str) -> tuple[float, ...]:
    """``"1.0:4.0:0.5"`` (inclusive) or ``"1,2.5,3"``."""
    text = str(text).strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise argparse.ArgumentTypeError(f"bad range {text!r}; expected start:stop:step")
        start, stop, step = parts
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(x) for x in text.split(",") if x.strip())


def parse_iters(text: str) -> tuple[int, ...]:
    """``"3"``, ``"1,2,5,10"`` or ``"1:40"``."""
    text = str(text).strip()
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        step = parts[2] if len(parts) == 3 else 1
        return tuple(range(parts[0], parts[1] + 1, step))
    return tuple(int(x) for x in text.split(",") if x.strip())


def parse_schedulers(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(text)
    return tuple(s.strip() for s in str(text).split(",") if s.strip())


def _load_config(path: str) -> dict:
    p = Path(path)
    raw = p.read_text()
    if p.suffix.lower() in (".yaml", ".yml"):
        import yaml

        data = yaml.safe_load(raw)
    else:
        data = json.loads(raw)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return {k.replace("-", "_"): v for k, v in data.items()}


_SIM_FIELDS = {
    "n": ("n", int),
    "dv": ("dv", int),
    "dc": ("dc", int),
    "alist": ("alist", str),
    "code_seed": ("code_seed", int),
    "schedulers": ("schedulers", parse_schedulers),
    "ebn0": ("ebn0_grid", parse_grid),
    "iters": ("iterations", parse_iters),
    "frames": ("frames", int),
    "seed": ("master_seed", int),
    "l": ("l", float),
    "decay": ("decay", float),
    "layer_rule": ("layer_rule", str),
    "workers": ("workers", int),
    "all_zeros": ("all_zeros", bool),
}


def _sim_config(args) -> SimConfig:
    values = {}
    if args.config:
        for key, val in _load_config(args.config).items():
            if key not in _SIM_FIELDS:
                raise ConfigError(f"unknown config key {key!r}")
            name, conv = _SIM_FIELDS[key]
            if isinstance(val, list) and conv in (parse_grid, parse_iters):
                val = ",".join(map(str, val))
            values[name] = conv(val)
    for key, (name, conv) in _SIM_FIELDS.items():
        val = getattr(args, key, None)
        if val is not None and val is not False:
            values[name] = conv(val) if isinstance(val, str) and conv is not str else val
    return SimConfig(**values).validate()


def _fmt_point(p: SimPoint) -> str:
    if p.error:
        return f"{p.scheduler:>7} {p.ebn0_db:6.2f} {p.max_iter:4d}  ERROR {p.error}"
    lo, hi = p.ber_interval()
    return (f"{p.scheduler:>7} {p.ebn0_db:6.2f} {p.max_iter:4d}  ber={p.ber:.4e} [{lo:.3e}, {hi:.3e}]"
            f"  fer={p.fer:.4e}  iters={p.mean_iters:.2f}")


def cmd_simulate(args) -> int:
    cfg = _sim_config(args)
    t0 = time.time()
    print(f"{'sched':>7} {'EbN0':>6} {'iter':>4}  BER [Wilson 95%]")
    points = run_sweep(cfg, args.out, progress=lambda p: print(_fmt_point(p), flush=True))
    log.info("%d points in %.1fs", len(points), time.time() - t0)
    return 1 if any(p.error for p in points) else 0


def cmd_audit(args) -> int:
    cfg = _sim_config(args)
    code = build_code(cfg)
    g = code.graph
    degs_v, degs_c = set(g.var_degrees().tolist()), set(g.check_degrees().tolist())
    if len(degs_v) != 1 or len(degs_c) != 1:
        raise ConfigError("audit needs a regular code")
    dv, dc = degs_v.pop(), degs_c.pop()
    ch = ChannelConfig(args.audit_ebn0, code.gen.k / code.gen.n)
    rx = transmit(-np.ones(g.n_vars), ch, seed=cfg.master_seed)
    schedules = SCHEDULES if args.schedule == "all" else (args.schedule,)
    ok = True
    print(f"code n={g.n_vars} m={g.n_checks} E={g.n_edges} (dv={dv}, dc={dc}); selection={args.selection}")
    for s in schedules:
        rows = audit_mod.audit(g, rx.llr, s, dv, dc, iterations=args.audit_iters, selection=args.selection,
                               l=cfg.l, decay=cfg.decay, layer_rule=cfg.layer_rule)
        for r in rows:
            exact_needed = args.selection == "linear" or r.counter != "cmp"
            good = r.exact if exact_needed else r.within
            ok &= good
            rel = "==" if exact_needed else "<="
            print(f"{s:>7} {r.counter:>8}  expected {r.expected:>10}  measured {list(r.measured)}  "
                  f"{'ok' if good else 'MISMATCH'} ({rel})")
    return 0 if ok else 3


def _add_code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON or YAML file with the same keys as the long flags")
    p.add_argument("--n", type=int)
    p.add_argument("--dv", type=int)
    p.add_argument("--dc", type=int)
    p.add_argument("--alist", help="load H from an alist file instead of constructing one")
    p.add_argument("--code-seed", dest="code_seed", type=int)
    p.add_argument("--seed", type=int, help="master seed for messages and noise")
    p.add_argument("--l", type=float, help="layer constant of wr-lbp (default 0.9)")
    p.add_argument("--decay", type=float, help="residual decay of rd-rbp (default 0.9)")
    p.add_argument("--layer-rule", dest="layer_rule", choices=("max", "min"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldpc-ids", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte-Carlo BER/FER sweep")
    _add_code_args(sim)
    sim.add_argument("--schedulers", help=f"comma list from {','.join(SCHEDULES)}")
    sim.add_argument("--ebn0", help="Eb/N0 grid in dB: start:stop:step or a comma list")
    sim.add_argument("--iters", help="iteration budgets: 3, 1,2,5 or 1:40")
    sim.add_argument("--frames", type=int)
    sim.add_argument("--workers", type=int)
    sim.add_argument("--all-zeros", dest="all_zeros", action="store_true", default=None,
                     help="transmit the all-zeros codeword instead of random messages")
    sim.add_argument("--out", help="CSV output path")
    sim.set_defaults(func=cmd_simulate)

    au = sub.add_parser("audit", help="compare measured operation counts with the closed forms")
    _add_code_args(au)
    au.add_argument("--schedule", default="all", choices=("all",) + SCHEDULES)
    au.add_argument("--selection", default="linear", choices=("linear", "tree"))
    au.add_argument("--audit-iters", dest="audit_iters", type=int, default=2)
    au.add_argument("--audit-ebn0", dest="audit_ebn0", type=float, default=1.0)
    au.set_defaults(func=cmd_audit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, CodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
