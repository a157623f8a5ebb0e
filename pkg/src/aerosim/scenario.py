"""OCA entry/exit reporting scenario.

``n`` aircraft fly through a control area whose ground station sits at the
centre. Each boundary crossing generates one message to the ground station,
carried over idealized TDMA and the trace-based radio.
"""

from __future__ import annotations

import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .engine import EventKind, RngStream, Simulator
from .linkbudget import distance_km
from .mobility import MobilityTrace, Position
from .radio import Outcome, RadioConfig, attempt_reception
from .tdma import TdmaConfig, TdmaNetwork
from .tracegen import FlightParams, OcaRegion, detect_crossings, generate_synthetic_flights
from .traffic import DEFAULT_PAYLOAD_BYTES, AppConfig, MessageTrace, Packet, drive_app

SPEED_OF_LIGHT_KMS = 299792.458
GROUND_STATION = "gs"
STILL_QUEUED = "StillQueued"
Z_95 = 1.959963984540054


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class TrafficBinding:
    """One trace-driven application on aircraft ``node``."""

    node: int
    trace: MessageTrace
    destination: object = GROUND_STATION  # GROUND_STATION or an aircraft index
    payload_size: int = DEFAULT_PAYLOAD_BYTES


@dataclass(frozen=True)
class ValidationSettings:
    distances_km: Tuple[float, ...] = (
        180.0, 220.0, 275.0, 325.0, 370.4, 400.0, 450.0, 500.0, 600.0, 700.0, 800.0, 1000.0, 1200.0, 1400.0,
    )
    packets: int = 10000
    seed: int = 1
    range_km: float = 1500.0


@dataclass(frozen=True)
class ScenarioConfig:
    user_counts: Tuple[int, ...] = (100, 200, 300, 400, 500)
    tdma: TdmaConfig = field(default_factory=TdmaConfig)
    radio: RadioConfig = field(default_factory=RadioConfig)
    oca: OcaRegion = field(default_factory=lambda: OcaRegion(Position(0.0, 0.0, 0.0001), 370.4))
    flights: FlightParams = field(default_factory=FlightParams)
    # file-based mobility; when None flights are generated
    mobility: Optional[MobilityTrace] = None
    bindings: Optional[Tuple[TrafficBinding, ...]] = None
    payload_size: int = DEFAULT_PAYLOAD_BYTES
    sim_end: float = 10000.0
    runs: int = 10
    base_seed: int = 1
    validation: ValidationSettings = field(default_factory=ValidationSettings)

    def __post_init__(self):
        if self.runs < 1:
            raise ScenarioError("runs must be at least 1")
        if not self.sim_end > 0:
            raise ScenarioError("simulation time must be positive")
        if any(n < 0 for n in self.user_counts):
            raise ScenarioError("user counts must be non-negative")
        if self.bindings is not None and self.mobility is None:
            raise ScenarioError("traffic bindings need a mobility trace")
        if self.mobility is not None and self.user_counts:
            too_big = max(self.user_counts)
            if too_big > len(self.mobility):
                raise ScenarioError(f"user count {too_big} exceeds the {len(self.mobility)} nodes in the mobility trace")

    def run_seed(self, run: int) -> int:
        return self.base_seed + run

    def aircraft(self, n: int) -> Tuple[MobilityTrace, List[TrafficBinding]]:
        """Mobility and traffic for the first ``n`` aircraft."""
        if self.mobility is None:
            rng = RngStream(self.base_seed, "tracegen")
            trace = generate_synthetic_flights(n, self.oca, self.flights, rng, self.sim_end)
            bindings = [
                TrafficBinding(
                    i,
                    MessageTrace(tuple(ev.t for ev in detect_crossings(trace, i, self.oca))),
                    GROUND_STATION,
                    self.payload_size,
                )
                for i in range(n)
            ]
            return trace, bindings
        trace = self.mobility.prefix(n)
        bindings = [b for b in (self.bindings or ()) if b.node < n]
        for b in bindings:
            if b.destination != GROUND_STATION and not 0 <= b.destination < n:
                raise ScenarioError(f"binding on node {b.node} targets node {b.destination}, not in the first {n}")
        return trace, bindings


class PacketRecord(NamedTuple):
    source: int
    app: int
    sequence: int
    created_at: float
    sent_at: Optional[float]
    delivered_at: Optional[float]
    disposition: str


@dataclass(frozen=True)
class RunResult:
    n: int
    run: int
    seed: int
    sent_per_node: Tuple[int, ...] = field(repr=False, default=())
    received: int = 0
    lost_channel: int = 0
    out_of_range: int = 0
    still_queued: int = 0
    packets: Tuple[PacketRecord, ...] = field(repr=False, default=())

    @property
    def sent(self) -> int:
        return sum(self.sent_per_node)

    def csv_row(self) -> str:
        return (
            f"{self.run},{self.n},{self.seed},{self.sent},{self.received},"
            f"{self.lost_channel},{self.out_of_range},{self.still_queued}"
        )


RUN_CSV_HEADER = "run,n,seed,sent,received,lost_channel,out_of_range,still_queued"
PACKET_CSV_HEADER = "run,n,source,app,sequence,created_at,sent_at,delivered_at,disposition"


class Simulation:
    """One engine-ready instance of the scenario for ``n`` aircraft and one run."""

    def __init__(self, config: ScenarioConfig, n: int, run: int, record_log: bool = False, elide_idle_frames: bool = True):
        self.config = config
        self.n = n
        self.run_index = run
        self.seed = config.run_seed(run)
        self.trace, bindings = config.aircraft(n)
        self.gs_position = config.oca.center
        self.sim = Simulator(config.sim_end, record_log=record_log)
        self.rng = RngStream(self.seed, "radio")
        self.net = TdmaNetwork(self.sim, config.tdma, self._transmit, elide_idle_frames)
        for i in range(n):
            self.net.add_node(i)
        self.net.add_node(GROUND_STATION)
        self.sim.on(EventKind.RECEPTION_COMPLETE, self._on_reception)
        self.apps = []
        per_node: Dict[int, int] = {}
        for b in bindings:
            idx = per_node.get(b.node, 0)
            per_node[b.node] = idx + 1
            app = AppConfig(b.destination, b.trace, b.payload_size)
            self.apps.append(drive_app(self.sim, app, b.node, self.net.enqueue, idx))
        self.net.start()
        # scheduled last so messages due exactly at the end are still created
        self.sim.schedule(config.sim_end, EventKind.SIM_END)

    @property
    def node_count(self) -> int:
        return len(self.net.macs)

    def position(self, node, t: float) -> Position:
        if node == GROUND_STATION:
            return self.gs_position
        return self.trace.position_at(node, t)

    def _transmit(self, node, packet: Packet, t: float) -> None:
        packet.sent_at = t
        tx = self.position(node, t)
        rx = self.position(packet.destination, t)
        outcome = attempt_reception(self.config.radio, tx, rx, self.rng)
        if outcome is Outcome.OUT_OF_RANGE:
            packet.disposition = outcome.value
            return
        arrival = t + distance_km(tx, rx) / SPEED_OF_LIGHT_KMS
        self.sim.schedule(arrival, EventKind.RECEPTION_COMPLETE, (packet, outcome))

    def _on_reception(self, ev) -> None:
        packet, outcome = ev.payload
        packet.disposition = outcome.value
        if outcome is Outcome.DELIVERED:
            packet.delivered_at = ev.time

    def run(self) -> RunResult:
        self.sim.run()
        sent = [0] * self.n
        counts = {o.value: 0 for o in Outcome}
        counts[STILL_QUEUED] = 0
        records = []
        for app in self.apps:
            sent[app.source] += len(app.created)
            for p in app.created:
                disp = p.disposition or STILL_QUEUED
                counts[disp] += 1
                records.append(
                    PacketRecord(p.source, p.app, p.sequence, p.created_at, p.sent_at, p.delivered_at, disp)
                )
        records.sort(key=lambda r: (r.created_at, r.source, r.app, r.sequence))
        return RunResult(
            n=self.n,
            run=self.run_index,
            seed=self.seed,
            sent_per_node=tuple(sent),
            received=counts[Outcome.DELIVERED.value],
            lost_channel=counts[Outcome.LOST_CHANNEL.value],
            out_of_range=counts[Outcome.OUT_OF_RANGE.value],
            still_queued=counts[STILL_QUEUED],
            packets=tuple(records),
        )


def build_scenario(config: ScenarioConfig, n: int, run: int, **kwargs) -> Simulation:
    return Simulation(config, n, run, **kwargs)


def run(config: ScenarioConfig, n: int, run_index: int = 0) -> RunResult:
    """Execute one run; identical arguments give an identical result."""
    return Simulation(config, n, run_index).run()


def _run_job(args) -> RunResult:
    config, n, r = args
    return run(config, n, r)


def default_workers() -> int:
    env = os.environ.get("AEROSIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ScenarioError(f"AEROSIM_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_sweep(config: ScenarioConfig, runs: Optional[int] = None, workers: Optional[int] = None) -> List[RunResult]:
    """All (user count, run) combinations, ordered by user count then run."""
    runs = config.runs if runs is None else runs
    jobs = [(config, n, r) for n in config.user_counts for r in range(runs)]
    workers = min(default_workers() if workers is None else workers, len(jobs) or 1)
    if workers <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs))


@dataclass(frozen=True)
class Aggregate:
    n: int
    runs: int
    sent_mean: float
    sent_std: float
    received_mean: float
    received_std: float
    ci95: float  # normal-approximation half-width on the received mean; nan with a single run

    @property
    def degenerate(self) -> bool:
        return self.runs < 2

    def csv_row(self) -> str:
        ci = "nan" if self.degenerate else f"{self.ci95:.6f}"
        return f"{self.n},{self.sent_mean:.6f},{self.received_mean:.6f},{self.received_std:.6f},{ci}"


AGGREGATE_CSV_HEADER = "n,sent_mean,received_mean,received_std,ci95"


def aggregate(results: Iterable[RunResult]) -> List[Aggregate]:
    groups: Dict[int, List[RunResult]] = {}
    for r in results:
        groups.setdefault(r.n, []).append(r)
    if not groups:
        raise ScenarioError("aggregate needs at least one run")
    out = []
    for n in sorted(groups):
        rs = groups[n]
        sent = [r.sent for r in rs]
        recv = [r.received for r in rs]
        if len(rs) > 1:
            s_std, r_std = statistics.stdev(sent), statistics.stdev(recv)
            ci = Z_95 * r_std / math.sqrt(len(rs))
        else:
            s_std = r_std = 0.0
            ci = math.nan
        out.append(Aggregate(n, len(rs), statistics.fmean(sent), s_std, statistics.fmean(recv), r_std, ci))
    return out


def runs_csv(results: Sequence[RunResult]) -> str:
    return "\n".join([RUN_CSV_HEADER] + [r.csv_row() for r in results]) + "\n"


def aggregate_csv(aggs: Sequence[Aggregate]) -> str:
    return "\n".join([AGGREGATE_CSV_HEADER] + [a.csv_row() for a in aggs]) + "\n"


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else repr(x)


def packets_csv(results: Sequence[RunResult]) -> str:
    lines = [PACKET_CSV_HEADER]
    for r in results:
        for p in r.packets:
            lines.append(
                f"{r.run},{r.n},{p.source},{p.app},{p.sequence},{p.created_at!r},"
                f"{_fmt(p.sent_at)},{_fmt(p.delivered_at)},{p.disposition}"
            )
    return "\n".join(lines) + "\n"
