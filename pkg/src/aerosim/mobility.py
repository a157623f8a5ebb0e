"""Waypoint mobility traces (BonnMotion-style, 3D).

Each non-comment line describes one node as whitespace-separated ``t x y z``
groups. Positions between waypoints are linearly interpolated; outside the
waypoint span the node holds its first/last position.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple


class TraceFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.source = source


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite position {self.x, self.y, self.z}")
        if self.z < 0:
            raise ValueError(f"altitude must be non-negative, got {self.z}")


@dataclass(frozen=True)
class Waypoint:
    t: float
    pos: Position


class MobilityTrace:
    """Immutable per-node waypoint lists; node index equals file line order."""

    def __init__(self, nodes: Iterable[Sequence[Waypoint]]):
        self._nodes: Tuple[Tuple[Waypoint, ...], ...] = tuple(tuple(w) for w in nodes)
        self._times = tuple(tuple(w.t for w in wps) for wps in self._nodes)
        for i, wps in enumerate(self._nodes):
            if not wps:
                raise ValueError(f"node {i} has no waypoints")
            for a, b in zip(wps, wps[1:]):
                if not b.t > a.t:
                    raise ValueError(f"node {i}: waypoint times not strictly increasing")

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other):
        return isinstance(other, MobilityTrace) and self._nodes == other._nodes

    def waypoints(self, node: int) -> Tuple[Waypoint, ...]:
        self._check(node)
        return self._nodes[node]

    def prefix(self, n: int) -> "MobilityTrace":
        if n > len(self):
            raise ValueError(f"trace has {len(self)} nodes, {n} requested")
        return MobilityTrace(self._nodes[:n])

    def _check(self, node: int) -> None:
        if not 0 <= node < len(self._nodes):
            raise IndexError(f"node {node} out of range (trace has {len(self._nodes)} nodes)")

    def position_at(self, node: int, t: float) -> Position:
        self._check(node)
        wps = self._nodes[node]
        times = self._times[node]
        if t <= times[0]:
            return wps[0].pos
        if t >= times[-1]:
            return wps[-1].pos
        k = bisect.bisect_right(times, t)
        a, b = wps[k - 1], wps[k]
        if t == a.t:
            return a.pos
        frac = (t - a.t) / (b.t - a.t)
        return Position(
            a.pos.x + frac * (b.pos.x - a.pos.x),
            a.pos.y + frac * (b.pos.y - a.pos.y),
            a.pos.z + frac * (b.pos.z - a.pos.z),
        )


def position_at(trace: MobilityTrace, node: int, t: float) -> Position:
    return trace.position_at(node, t)


def parse_mobility_trace(text: str, source: str | None = None) -> MobilityTrace:
    nodes: List[List[Waypoint]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) % 4:
            raise TraceFormatError(
                f"expected groups of 4 numbers (t x y z), got {len(tokens)} values", lineno, source
            )
        try:
            values = [float(tok) for tok in tokens]
        except ValueError as exc:
            raise TraceFormatError(f"non-numeric token ({exc})", lineno, source) from None
        wps = []
        for k in range(0, len(values), 4):
            t, x, y, z = values[k : k + 4]
            if not math.isfinite(t) or t < 0:
                raise TraceFormatError(f"invalid waypoint time {t}", lineno, source)
            if wps and not t > wps[-1].t:
                raise TraceFormatError(
                    f"waypoint times not strictly increasing ({wps[-1].t} then {t})", lineno, source
                )
            try:
                wps.append(Waypoint(t, Position(x, y, z)))
            except ValueError as exc:
                raise TraceFormatError(str(exc), lineno, source) from None
        nodes.append(wps)
    return MobilityTrace(nodes)


def format_mobility_trace(trace: MobilityTrace) -> str:
    lines = []
    for i in range(len(trace)):
        parts = []
        for w in trace.waypoints(i):
            parts.extend(repr(float(v)) for v in (w.t, w.pos.x, w.pos.y, w.pos.z))
        lines.append(" ".join(parts))
    return "".join(line + "\n" for line in lines)
