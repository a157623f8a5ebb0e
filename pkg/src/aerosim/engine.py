"""Discrete-event core: a (time, sequence) ordered queue and named RNG streams."""

from __future__ import annotations

import enum
import heapq
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np


class SchedulingError(RuntimeError):
    """Raised when an event is scheduled before the current simulation time."""


class EventKind(enum.Enum):
    MESSAGE_DUE = "MessageDue"
    FRAME_START = "FrameStart"
    SLOT_START = "SlotStart"
    RECEPTION_COMPLETE = "ReceptionComplete"
    SIM_END = "SimEnd"


@dataclass(order=True)
class Event:
    time: float
    sequence: int
    kind: EventKind = field(compare=False)
    payload: Any = field(default=None, compare=False)


class RngStream:
    """Uniform draws from a PCG64 generator keyed by (seed, run, label).

    Streams with different labels are statistically independent, so adding a
    new consumer never shifts the draws seen by an existing one.
    """

    def __init__(self, seed: int, label: str, run: int = 0):
        self.seed = int(seed)
        self.label = label
        self.run = int(run)
        seq = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.run, zlib.crc32(label.encode("utf-8")))
        )
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def random(self) -> float:
        return float(self._gen.random())

    def uniform(self, low: float, high: float) -> float:
        return float(self._gen.uniform(low, high))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, label={self.label!r}, run={self.run})"


Handler = Callable[[Event], None]


class Simulator:
    """Single-threaded event loop.

    Events at equal times run in insertion order. Execution stops once a
    ``SIM_END`` event has been processed; anything left in the queue is
    discarded.
    """

    def __init__(self, end_time: float, record_log: bool = False):
        if not end_time > 0:
            raise ValueError("end_time must be positive")
        self.end_time = float(end_time)
        self.now = 0.0
        self._queue: List[Event] = []
        self._seq = 0
        self._handlers: Dict[EventKind, Handler] = {}
        self.finished = False
        self.log: Optional[List[Tuple[float, int, str]]] = [] if record_log else None

    def on(self, kind: EventKind, handler: Handler) -> None:
        self._handlers[kind] = handler

    def schedule(self, time: float, kind: EventKind, payload: Any = None) -> Optional[Event]:
        """Enqueue an event; events past the end time are dropped and return None."""
        if time < self.now:
            raise SchedulingError(f"cannot schedule {kind.value} at t={time} (clock at t={self.now})")
        if time > self.end_time:
            return None
        ev = Event(float(time), self._seq, kind, payload)
        self._seq += 1
        heapq.heappush(self._queue, ev)
        return ev

    def pending(self) -> int:
        return len(self._queue)

    def step(self) -> Optional[Event]:
        if self.finished or not self._queue:
            return None
        ev = heapq.heappop(self._queue)
        self.now = ev.time
        if self.log is not None:
            self.log.append((ev.time, ev.sequence, ev.kind.value))
        if ev.kind is EventKind.SIM_END:
            self.finished = True
            self._queue.clear()
        handler = self._handlers.get(ev.kind)
        if handler is not None:
            handler(ev)
        return ev

    def run(self) -> None:
        while self.step() is not None:
            pass
