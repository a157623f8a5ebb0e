"""Idealized oracle TDMA.

A global scheduler collects buffer reports from registered MACs and, at each
frame start, hands out the frame's slots round-robin to nodes that reported
demand. Control traffic is free and lossless.
"""

from __future__ import annotations

import bisect
import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Deque, Dict, Hashable, List, Optional, Tuple

from .engine import Event, EventKind, Simulator

log = logging.getLogger(__name__)

NodeId = Hashable


class TdmaError(RuntimeError):
    pass


@dataclass(frozen=True)
class TdmaConfig:
    slot_duration: float = 0.01
    slots_per_frame: int = 10
    retransmission_attempts: int = 0

    def __post_init__(self):
        if not self.slot_duration > 0:
            raise ValueError("slot_duration must be positive")
        if self.slots_per_frame < 1:
            raise ValueError("slots_per_frame must be at least 1")
        if self.retransmission_attempts != 0:
            raise ValueError("only retransmission_attempts = 0 is supported")

    @property
    def frame_duration(self) -> float:
        return self.slot_duration * self.slots_per_frame

    def frame_start(self, frame_index: int) -> float:
        return frame_index * self.frame_duration

    def slot_start(self, frame_index: int, slot: int) -> float:
        return self.frame_start(frame_index) + slot * self.slot_duration


@dataclass(frozen=True)
class BufferReport:
    node: NodeId
    queued: int

    def __post_init__(self):
        if self.queued < 0:
            raise ValueError("queued must be non-negative")


@dataclass(frozen=True)
class TdmaSchedule:
    frame_index: int
    assignments: Tuple[Optional[NodeId], ...]  # None marks an empty slot

    def slots_of(self, node: NodeId) -> List[int]:
        return [i for i, owner in enumerate(self.assignments) if owner == node]

    def counts(self) -> Dict[NodeId, int]:
        out: Dict[NodeId, int] = {}
        for owner in self.assignments:
            if owner is not None:
                out[owner] = out.get(owner, 0) + 1
        return out


class TdmaScheduler:
    def __init__(self, slots_per_frame: int):
        if slots_per_frame < 1:
            raise ValueError("slots_per_frame must be at least 1")
        self.slots_per_frame = slots_per_frame
        self._registry: List[NodeId] = []
        self._index: Dict[NodeId, int] = {}
        self._reports: Dict[NodeId, int] = {}
        self._last_served = -1  # registry index of the last node given a slot

    @property
    def registry(self) -> List[NodeId]:
        return list(self._registry)

    def register(self, node: NodeId) -> None:
        if node in self._index:
            raise TdmaError(f"node {node!r} already registered")
        self._index[node] = len(self._registry)
        self._registry.append(node)

    def report_buffer(self, report: BufferReport) -> None:
        if report.node not in self._index:
            raise TdmaError(f"buffer report from unregistered node {report.node!r}")
        if report.queued:
            self._reports[report.node] = report.queued
        else:
            self._reports.pop(report.node, None)

    def reported(self, node: NodeId) -> int:
        return self._reports.get(node, 0)

    def has_demand(self) -> bool:
        return bool(self._reports)

    def compute_schedule(self, frame_index: int) -> TdmaSchedule:
        """Round-robin over demanding nodes, resuming after the last node served."""
        demand = {self._index[n]: q for n, q in self._reports.items()}
        order = sorted(demand)
        slots: List[Optional[NodeId]] = []
        if order:
            # first demanding registry position strictly after the pointer, cyclically
            k = bisect.bisect_right(order, self._last_served) % len(order)
            while len(slots) < self.slots_per_frame and order:
                idx = order[k]
                slots.append(self._registry[idx])
                self._last_served = idx
                demand[idx] -= 1
                if demand[idx] == 0:
                    del order[k]
                    if order:
                        k %= len(order)
                else:
                    k = (k + 1) % len(order)
        slots.extend([None] * (self.slots_per_frame - len(slots)))
        return TdmaSchedule(frame_index, tuple(slots))


class MacQueue:
    """Per-node FIFO. Every enqueue pushes a fresh buffer report to the scheduler."""

    def __init__(self, node: NodeId, scheduler: TdmaScheduler):
        self.node = node
        self.scheduler = scheduler
        self._queue: Deque = deque()
        self.idle_slots = 0

    def __len__(self):
        return len(self._queue)

    def enqueue(self, packet) -> None:
        self._queue.append(packet)
        self.report()

    def report(self) -> None:
        self.scheduler.report_buffer(BufferReport(self.node, len(self._queue)))

    def on_schedule(self, schedule: TdmaSchedule) -> List[int]:
        """Slot indices this node transmits in during the scheduled frame."""
        return schedule.slots_of(self.node)

    def dequeue(self):
        """Pop the head packet for the current slot, or None if the slot goes idle."""
        if not self._queue:
            self.idle_slots += 1
            log.debug("node %r: assigned slot unused, queue empty", self.node)
            return None
        return self._queue.popleft()

    def pending(self) -> List:
        return list(self._queue)


Transmit = Callable[[NodeId, object, float], None]


class TdmaNetwork:
    """Drives scheduler and MACs from simulator events.

    Frames in which no node has reported demand change no state, so the
    frame chain is only kept alive while demand exists and is restarted at
    the next frame boundary by the first report that follows an idle period.
    ``elide_idle_frames=False`` schedules every frame instead.
    """

    def __init__(self, sim: Simulator, config: TdmaConfig, transmit: Transmit, elide_idle_frames: bool = True):
        self.sim = sim
        self.config = config
        self.transmit = transmit
        self.elide_idle_frames = elide_idle_frames
        self.scheduler = TdmaScheduler(config.slots_per_frame)
        self.macs: Dict[NodeId, MacQueue] = {}
        self.schedules_computed = 0
        self._next_frame: Optional[int] = None
        sim.on(EventKind.FRAME_START, self._on_frame_start)
        sim.on(EventKind.SLOT_START, self._on_slot_start)

    def add_node(self, node: NodeId) -> MacQueue:
        self.scheduler.register(node)
        mac = MacQueue(node, self.scheduler)
        self.macs[node] = mac
        return mac

    def start(self) -> None:
        if not self.elide_idle_frames:
            self._schedule_frame(0)

    def enqueue(self, node: NodeId, packet) -> None:
        self.macs[node].enqueue(packet)
        if self._next_frame is None:
            k = math.ceil(self.sim.now / self.config.frame_duration - 1e-9)
            while self.config.frame_start(k) < self.sim.now:
                k += 1
            self._schedule_frame(k)

    def _schedule_frame(self, k: int) -> None:
        if self.sim.schedule(self.config.frame_start(k), EventKind.FRAME_START, k) is not None:
            self._next_frame = k
        else:
            self._next_frame = -1  # past the end of the run

    def _on_frame_start(self, ev: Event) -> None:
        k = ev.payload
        self._next_frame = None
        schedule = self.scheduler.compute_schedule(k)
        self.schedules_computed += 1
        busy = False
        for node, count in schedule.counts().items():
            slots = self.macs[node].on_schedule(schedule)
            for j, slot in enumerate(slots):
                self.sim.schedule(
                    self.config.slot_start(k, slot),
                    EventKind.SLOT_START,
                    (node, slot, j == len(slots) - 1),
                )
            busy = True
        if busy or self.scheduler.has_demand() or not self.elide_idle_frames:
            self._schedule_frame(k + 1)

    def _on_slot_start(self, ev: Event) -> None:
        node, _slot, last = ev.payload
        mac = self.macs[node]
        packet = mac.dequeue()
        if packet is not None:
            self.transmit(node, packet, ev.time)
        if last:
            mac.report()
