"""Lossy, delaying datagram channels with deterministic impairment.

Each datagram independently draws a drop decision and a delay from the
channel's seeded generator, so a run is reproducible while datagrams can
still reorder, exactly like UDP through a jittery link.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ChannelConfig:
    delay: str = "fixed"  # fixed | uniform | normal
    delay_ms: float = 0.0  # fixed value, or mean for normal
    delay_lo_ms: float = 0.0  # uniform bounds
    delay_hi_ms: float = 0.0
    delay_std_ms: float = 0.0
    drop_prob: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.drop_prob < 1.0:
            raise ValueError(f"drop_prob outside [0,1): {self.drop_prob}")
        if self.delay not in ("fixed", "uniform", "normal"):
            raise ValueError(f"unknown delay kind {self.delay!r}")
        if min(self.delay_ms, self.delay_lo_ms, self.delay_hi_ms, self.delay_std_ms) < 0:
            raise ValueError("delays must be >= 0")

    @classmethod
    def fixed(cls, ms: float, drop_prob: float = 0.0, seed: int = 0) -> "ChannelConfig":
        return cls(delay="fixed", delay_ms=ms, drop_prob=drop_prob, seed=seed)

    @classmethod
    def uniform(cls, lo_ms: float, hi_ms: float, drop_prob: float = 0.0, seed: int = 0) -> "ChannelConfig":
        return cls(delay="uniform", delay_lo_ms=lo_ms, delay_hi_ms=hi_ms, drop_prob=drop_prob, seed=seed)

    @classmethod
    def normal(cls, mean_ms: float, std_ms: float, drop_prob: float = 0.0, seed: int = 0) -> "ChannelConfig":
        return cls(delay="normal", delay_ms=mean_ms, delay_std_ms=std_ms, drop_prob=drop_prob, seed=seed)


class Channel:
    """In-process datagram pipe between two loop-driven components."""

    def __init__(self, loop, config: ChannelConfig, name: str = "") -> None:
        self.loop = loop
        self.name = name
        self._receiver: Callable[[object], None] | None = None
        self.sent = 0
        self.dropped = 0
        self.delivered = 0
        self.configure(config)

    def configure(self, config: ChannelConfig) -> None:
        self.config = config
        self._rng = np.random.default_rng(config.seed)

    def connect(self, receiver: Callable[[object], None]) -> None:
        self._receiver = receiver

    def draw_delay_us(self) -> int:
        cfg = self.config
        if cfg.delay == "fixed":
            ms = cfg.delay_ms
        elif cfg.delay == "uniform":
            ms = self._rng.uniform(cfg.delay_lo_ms, cfg.delay_hi_ms)
        else:
            ms = max(0.0, self._rng.normal(cfg.delay_ms, cfg.delay_std_ms))
        return int(round(ms * 1000.0))

    def send(self, payload: object) -> bool:
        """Returns False when the datagram was dropped."""
        self.sent += 1
        if self.config.drop_prob > 0.0 and self._rng.random() < self.config.drop_prob:
            self.dropped += 1
            return False
        delay_us = self.draw_delay_us()
        receiver = self._receiver
        if receiver is None:
            self.dropped += 1
            return False

        def deliver() -> None:
            self.delivered += 1
            receiver(payload)

        self.loop.call_later(delay_us, deliver)
        return True
