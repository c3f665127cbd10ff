"""LDPC decoding under flooding, layered and residual-driven schedules."""

from .channel import ChannelConfig, channel_llr, modulate, transmit
from .codes import (
    GeneratorMatrix,
    ParityCheckMatrix,
    construct_regular,
    encode,
    load_alist,
    save_alist,
    syndrome,
    systematize,
)
from .decoders import SCHEDULES, DecodeOutcome, OpCounters, decode, decode_checkpoints
from .tanner import TannerGraph, build_graph

__version__ = "0.1.0"
