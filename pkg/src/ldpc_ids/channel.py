"""BPSK over AWGN and channel LLRs.

Bit 0 maps to -1 and bit 1 to +1. LLRs are log P(c=0|y) / P(c=1|y), so a
positive value favours bit 0 and the hard decision is 1 iff the LLR is
negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    rate: float

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must lie in (0, 1], got {self.rate}")

    @property
    def sigma2(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.sigma2))

    @property
    def n0(self) -> float:
        return 2.0 * self.sigma2


@dataclass(frozen=True)
class ReceivedVector:
    y: np.ndarray
    llr: np.ndarray


def modulate(c) -> np.ndarray:
    return 2.0 * np.asarray(c, dtype=np.float64) - 1.0


def channel_llr(y, noise: ChannelConfig | float) -> np.ndarray:
    """-4 y / N0, with N0 taken from a :class:`ChannelConfig` or given directly.

    ``N0 == 0`` yields signed infinities; the decoders clamp them.
    """
    n0 = noise.n0 if isinstance(noise, ChannelConfig) else float(noise)
    y = np.asarray(y, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -4.0 * y / n0
    return np.where(y == 0.0, 0.0, out)


def transmit(x, cfg: ChannelConfig, seed=None, *, sigma: float | None = None) -> ReceivedVector:
    """Add white Gaussian noise. ``seed`` may be an int, a seed sequence or a
    ``numpy.random.Generator``; ``sigma`` overrides the configured noise level
    (``sigma=0`` gives a noiseless channel)."""
    x = np.asarray(x, dtype=np.float64)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    s = cfg.sigma if sigma is None else float(sigma)
    y = x + s * rng.standard_normal(x.shape) if s > 0 else x.copy()
    return ReceivedVector(y=y, llr=channel_llr(y, 2.0 * s * s))
