"""Trace-driven application: one message per timestamp in a trace file."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, List, Tuple

from .engine import EventKind, Simulator
from .mobility import TraceFormatError

DEFAULT_PAYLOAD_BYTES = 100


@dataclass(frozen=True)
class MessageTrace:
    timestamps: Tuple[float, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.timestamps, self.timestamps[1:]):
            if not b > a:
                raise ValueError(f"timestamps not strictly increasing ({a} then {b})")
        if self.timestamps and self.timestamps[0] < 0:
            raise ValueError("timestamps must be non-negative")

    def __len__(self):
        return len(self.timestamps)


@dataclass(frozen=True)
class AppConfig:
    destination: Hashable
    trace: MessageTrace
    payload_size: int = DEFAULT_PAYLOAD_BYTES

    def __post_init__(self):
        if self.payload_size < 1:
            raise ValueError("payload_size must be at least 1 byte")


@dataclass
class Packet:
    source: Hashable
    destination: Hashable
    size: int
    created_at: float
    sequence: int
    app: int = 0
    # filled in by the MAC / radio
    sent_at: float | None = field(default=None, compare=False)
    delivered_at: float | None = field(default=None, compare=False)
    disposition: str | None = field(default=None, compare=False)


def parse_message_trace(text: str, source: str | None = None) -> MessageTrace:
    stamps: List[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        # tolerate a trailing CSV delimiter
        token = line.split(",")[0].strip()
        try:
            t = float(token)
        except ValueError:
            raise TraceFormatError(f"non-numeric timestamp {token!r}", lineno, source) from None
        if not math.isfinite(t):
            raise TraceFormatError(f"non-finite timestamp {token!r}", lineno, source)
        if t < 0:
            raise TraceFormatError(f"negative timestamp {t}", lineno, source)
        if stamps and not t > stamps[-1]:
            raise TraceFormatError(
                f"timestamps not strictly increasing ({stamps[-1]} then {t})", lineno, source
            )
        stamps.append(t)
    return MessageTrace(tuple(stamps))


def format_message_trace(timestamps) -> str:
    return "".join(f"{float(t)!r}\n" for t in timestamps)


Deliver = Callable[[Hashable, Packet], None]


class TraceApp:
    """Creates packets at trace timestamps and hands them to ``deliver``.

    Timestamps after the simulator's end time are ignored; a timestamp equal
    to the end time still produces a packet.
    """

    def __init__(self, sim: Simulator, source: Hashable, config: AppConfig, deliver: Deliver, app_index: int = 0):
        self.sim = sim
        self.source = source
        self.config = config
        self.deliver = deliver
        self.app_index = app_index
        self.created: List[Packet] = []

    def start(self) -> int:
        n = 0
        for t in self.config.trace.timestamps:
            if t > self.sim.end_time:
                break
            self.sim.schedule(t, EventKind.MESSAGE_DUE, self)
            n += 1
        return n

    def fire(self) -> Packet:
        pkt = Packet(
            source=self.source,
            destination=self.config.destination,
            size=self.config.payload_size,
            created_at=self.sim.now,
            sequence=len(self.created),
            app=self.app_index,
        )
        self.created.append(pkt)
        self.deliver(self.source, pkt)
        return pkt


def _fire(ev) -> None:
    ev.payload.fire()


def drive_app(sim: Simulator, app: AppConfig, source: Hashable, deliver: Deliver, app_index: int = 0) -> TraceApp:
    """Schedule ``app``'s messages on ``sim``; packets reach ``deliver`` as they are created."""
    sim.on(EventKind.MESSAGE_DUE, _fire)
    ta = TraceApp(sim, source, app, deliver, app_index)
    ta.start()
    return ta
