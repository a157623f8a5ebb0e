"""Mobility-linked message traces.

Crossings of a spherical control-area boundary are found analytically on each
straight waypoint segment; entries and exits each trigger one message. Also
builds synthetic straight-line flights that cut through the area.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, NamedTuple, Sequence

from .engine import RngStream
from .mobility import MobilityTrace, Position, Waypoint, format_mobility_trace
from .traffic import format_message_trace


class TracegenError(ValueError):
    """Infeasible generator geometry or timing."""


@dataclass(frozen=True)
class OcaRegion:
    center: Position
    range_km: float = 370.4

    def __post_init__(self):
        if not self.range_km > 0:
            raise ValueError("OCA range must be positive")

    def contains(self, p: Position) -> bool:
        c = self.center
        return (p.x - c.x) ** 2 + (p.y - c.y) ** 2 + (p.z - c.z) ** 2 <= self.range_km**2


class CrossingKind(enum.Enum):
    ENTRY = "Entry"
    EXIT = "Exit"


class CrossingEvent(NamedTuple):
    t: float
    kind: CrossingKind


def _segment_roots(a: Waypoint, b: Waypoint, oca: OcaRegion):
    """Parameters s in [0, 1] where the segment meets the sphere (simple roots only)."""
    c = oca.center
    px, py, pz = a.pos.x - c.x, a.pos.y - c.y, a.pos.z - c.z
    dx, dy, dz = b.pos.x - a.pos.x, b.pos.y - a.pos.y, b.pos.z - a.pos.z
    qa = dx * dx + dy * dy + dz * dz
    if qa == 0.0:
        return None
    qb = 2.0 * (px * dx + py * dy + pz * dz)
    qc = px * px + py * py + pz * pz - oca.range_km**2
    disc = qb * qb - 4.0 * qa * qc
    if disc <= 0.0:
        return None  # misses or grazes the sphere
    sq = math.sqrt(disc)
    # numerically stable pair
    q = -0.5 * (qb + math.copysign(sq, qb))
    r1 = q / qa
    r2 = qc / q if q != 0.0 else -r1
    return min(r1, r2), max(r1, r2)


def detect_crossings(trace: MobilityTrace, node: int, oca: OcaRegion) -> List[CrossingEvent]:
    wps = trace.waypoints(node)
    inside = oca.contains(wps[0].pos)
    events: List[CrossingEvent] = []
    for a, b in zip(wps, wps[1:]):
        roots = _segment_roots(a, b, oca)
        if roots is None:
            continue
        s_in, s_out = roots
        span = b.t - a.t
        if not inside and 0.0 <= s_in <= 1.0:
            events.append(CrossingEvent(a.t + s_in * span, CrossingKind.ENTRY))
            inside = True
        if inside and 0.0 <= s_out < 1.0:
            events.append(CrossingEvent(a.t + s_out * span, CrossingKind.EXIT))
            inside = False
    # an entry and exit at the same instant is a touch at a waypoint kink
    cleaned: List[CrossingEvent] = []
    for ev in events:
        if cleaned and cleaned[-1].t == ev.t and cleaned[-1].kind is not ev.kind:
            cleaned.pop()
        else:
            cleaned.append(ev)
    return cleaned


def write_message_trace(events: Sequence[CrossingEvent]) -> str:
    return format_message_trace(ev.t for ev in events)


@dataclass(frozen=True)
class FlightParams:
    """Synthetic flight generator settings (km, km/s, s)."""

    corridor_km: float = 600.0  # max horizontal start/end distance from the OCA centre
    speed_kms: float = 0.25
    altitude_km: float = 10.0
    margin_km: float = 100.0  # min distance outside the OCA at start/end
    offset_fraction: float = 0.9  # max lateral offset as a fraction of the OCA radius at altitude


def _check_feasible(oca: OcaRegion, fp: FlightParams, sim_end: float) -> float:
    dz = fp.altitude_km - oca.center.z
    if fp.altitude_km < 0:
        raise TracegenError("altitude must be non-negative")
    if abs(dz) >= oca.range_km:
        raise TracegenError(f"flight altitude {fp.altitude_km} km never enters the OCA sphere")
    if fp.speed_kms <= 0:
        raise TracegenError("speed must be positive")
    if not 0 < fp.offset_fraction < 1:
        raise TracegenError("offset_fraction must lie in (0, 1)")
    if fp.corridor_km < oca.range_km + fp.margin_km:
        raise TracegenError(
            f"corridor radius {fp.corridor_km} km cannot contain OCA range {oca.range_km} km "
            f"plus margin {fp.margin_km} km"
        )
    longest = 2.0 * fp.corridor_km / fp.speed_kms
    if longest > sim_end:
        raise TracegenError(
            f"a corridor-length flight takes {longest:.1f} s, longer than simulation time {sim_end} s"
        )
    return math.sqrt(oca.range_km**2 - dz**2)


def generate_synthetic_flights(
    n: int, oca: OcaRegion, params: FlightParams, rng: RngStream, sim_end: float = 10000.0
) -> MobilityTrace:
    """``n`` constant-altitude straight flights whose chords cross the OCA.

    Each flight consumes a fixed number of draws, so the first k flights of a
    larger batch equal a batch of size k from the same stream.
    """
    if n < 0:
        raise TracegenError("flight count must be non-negative")
    r_alt = _check_feasible(oca, params, sim_end)
    cx, cy = oca.center.x, oca.center.y
    min_r = oca.range_km + params.margin_km
    nodes = []
    for _ in range(n):
        heading = rng.uniform(0.0, 2.0 * math.pi)
        offset = rng.uniform(-params.offset_fraction, params.offset_fraction) * r_alt
        r_end = rng.uniform(min_r, params.corridor_km)
        u = rng.random()
        half = math.sqrt(r_end**2 - offset**2)
        ux, uy = math.cos(heading), math.sin(heading)
        # lateral offset perpendicular to the track
        ox, oy = cx - offset * uy, cy + offset * ux
        start = Position(ox - half * ux, oy - half * uy, params.altitude_km)
        end = Position(ox + half * ux, oy + half * uy, params.altitude_km)
        duration = 2.0 * half / params.speed_kms
        t0 = u * (sim_end - duration)
        nodes.append([Waypoint(t0, start), Waypoint(t0 + duration, end)])
    return MobilityTrace(nodes)


MOBILITY_FILE = "mobility.txt"
MANIFEST_FILE = "manifest.csv"
MESSAGES_DIR = "messages"


def write_trace_set(out_dir, trace: MobilityTrace, oca: OcaRegion) -> Path:
    """Write the mobility file, one message trace per node, and a manifest.

    Manifest rows are ``node,trace_file`` with paths relative to ``out_dir``.
    """
    out = Path(out_dir)
    (out / MESSAGES_DIR).mkdir(parents=True, exist_ok=True)
    _atomic_write(out / MOBILITY_FILE, format_mobility_trace(trace))
    rows = ["node,trace_file"]
    for i in range(len(trace)):
        rel = f"{MESSAGES_DIR}/node_{i:04d}.csv"
        _atomic_write(out / rel, write_message_trace(detect_crossings(trace, i, oca)))
        rows.append(f"{i},{rel}")
    manifest = out / MANIFEST_FILE
    _atomic_write(manifest, "\n".join(rows) + "\n")
    return manifest


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)
