import pytest
from hypothesis import given, settings, strategies as st

from aerosim.engine import EventKind, Simulator
from aerosim.tdma import (
    BufferReport,
    MacQueue,
    TdmaConfig,
    TdmaError,
    TdmaNetwork,
    TdmaScheduler,
)


class ReferenceScheduler:
    """Literal walk over the whole registry, one slot per visit."""

    def __init__(self, slots):
        self.slots = slots
        self.registry = []
        self.reports = {}
        self.last = -1

    def register(self, node):
        self.registry.append(node)

    def report(self, node, q):
        self.reports[node] = q

    def compute(self):
        demand = [self.reports.get(n, 0) for n in self.registry]
        out = []
        i = self.last
        while len(out) < self.slots and any(demand):
            i = (i + 1) % len(self.registry)
            if demand[i] > 0:
                out.append(self.registry[i])
                demand[i] -= 1
                self.last = i
        return out + [None] * (self.slots - len(out))


def make(nodes, slots=10):
    s = TdmaScheduler(slots)
    for n in nodes:
        s.register(n)
    return s


def test_registry_order():
    s = make("ABC")
    assert s.registry == ["A", "B", "C"]


def test_duplicate_registration_fails():
    s = make("A")
    with pytest.raises(TdmaError):
        s.register("A")


def test_no_registrations_gives_empty_schedule():
    assert make("").compute_schedule(0).assignments == (None,) * 10


def test_latest_report_wins():
    s = make("AB")
    s.report_buffer(BufferReport("A", 3))
    s.report_buffer(BufferReport("A", 1))
    assert s.reported("A") == 1


def test_zero_report_excludes_node():
    s = make("AB")
    s.report_buffer(BufferReport("A", 2))
    s.report_buffer(BufferReport("A", 0))
    assert s.compute_schedule(0).assignments == (None,) * 10


def test_unregistered_report_fails():
    with pytest.raises(TdmaError):
        make("A").report_buffer(BufferReport("Z", 1))


def test_saturated_round_robin_example():
    s = make("ABC")
    for n in "ABC":
        s.report_buffer(BufferReport(n, 4))
    assert "".join(s.compute_schedule(0).assignments) == "ABCABCABCA"
    # pointer persists: next frame starts at B
    for n in "ABC":
        s.report_buffer(BufferReport(n, 10))
    assert "".join(s.compute_schedule(1).assignments) == "BCABCABCAB"


def test_demand_capped_example():
    s = make("ABCD")
    s.report_buffer(BufferReport("A", 1))
    s.report_buffer(BufferReport("B", 1))
    assert s.compute_schedule(0).assignments == ("A", "B") + (None,) * 8


def test_all_zero_reports_give_empty_schedule():
    s = make("ABC")
    for n in "ABC":
        s.report_buffer(BufferReport(n, 0))
    assert s.compute_schedule(0).assignments == (None,) * 10


def test_empty_frame_does_not_move_pointer():
    s = make("ABC")
    s.report_buffer(BufferReport("A", 1))
    s.compute_schedule(0)
    s.report_buffer(BufferReport("A", 0))
    s.compute_schedule(1)
    for n in "ABC":
        s.report_buffer(BufferReport(n, 1))
    assert s.compute_schedule(2).assignments[:3] == ("B", "C", "A")


frames = st.lists(
    st.lists(st.integers(0, 15), min_size=1, max_size=12),
    min_size=1,
    max_size=20,
)


@settings(max_examples=120)
@given(st.integers(1, 12), st.integers(1, 12), st.data())
def test_properties_against_reference(k, slots, data):
    nodes = list(range(k))
    s, ref = make(nodes, slots), ReferenceScheduler(slots)
    for n in nodes:
        ref.register(n)
    n_frames = data.draw(st.integers(1, 12))
    for f in range(n_frames):
        demand = data.draw(st.lists(st.integers(0, 25), min_size=k, max_size=k))
        for n, q in zip(nodes, demand):
            s.report_buffer(BufferReport(n, q))
            ref.report(n, q)
        sched = s.compute_schedule(f)
        assert list(sched.assignments) == ref.compute()
        check_frame(sched, dict(zip(nodes, demand)))


def check_frame(sched, demand):
    counts = sched.counts()
    # one owner per slot, and only nodes that asked
    assert all(owner is None or demand[owner] > 0 for owner in sched.assignments)
    for n, c in counts.items():
        assert c <= demand[n]
    total = sum(demand.values())
    empties = sched.assignments.count(None)
    # work conservation
    assert len(sched.assignments) - empties == min(total, len(sched.assignments))
    saturated = [n for n, q in demand.items() if q >= len(sched.assignments)]
    if saturated and len(saturated) == len(demand):
        got = [counts.get(n, 0) for n in demand]
        assert max(got) - min(got) <= 1


def test_mac_fifo_over_slots():
    sim = Simulator(10)
    sent = []
    net = TdmaNetwork(sim, TdmaConfig(), lambda node, p, t: sent.append((p, round(t, 9))))
    net.add_node("A")
    net.add_node("B")
    net.enqueue("A", "p1")
    net.enqueue("A", "p2")
    sim.schedule(10, EventKind.SIM_END)
    sim.run()
    assert sent == [("p1", 0.0), ("p2", 0.01)]
    assert len(net.macs["A"]) == 0
    assert net.scheduler.reported("A") == 0


def test_stale_report_leaves_slot_idle():
    sched = make("A", 10)
    mac = MacQueue("A", sched)
    mac.enqueue("p1")
    sched.report_buffer(BufferReport("A", 2))  # stale
    schedule = sched.compute_schedule(0)
    slots = mac.on_schedule(schedule)
    assert slots == [0, 1]
    assert [mac.dequeue() for _ in slots] == ["p1", None]
    assert mac.idle_slots == 1


def test_lost_packets_are_not_requeued():
    sim = Simulator(10)
    attempts = []
    net = TdmaNetwork(sim, TdmaConfig(), lambda node, p, t: attempts.append(p))
    net.add_node("A")
    net.enqueue("A", "p1")
    sim.schedule(10, EventKind.SIM_END)
    sim.run()
    assert attempts == ["p1"]
    assert len(net.macs["A"]) == 0


def test_retransmissions_not_supported():
    with pytest.raises(ValueError):
        TdmaConfig(retransmission_attempts=1)


def test_frame_timing():
    cfg = TdmaConfig(0.01, 10)
    assert cfg.frame_duration == pytest.approx(0.1)
    assert cfg.slot_start(3, 4) == pytest.approx(0.34)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.floats(0, 5)), max_size=40))
def test_no_overlapping_transmissions_and_each_packet_sent_once(arrivals):
    sim = Simulator(20)
    log = []
    net = TdmaNetwork(sim, TdmaConfig(), lambda node, p, t: log.append((t, node, p)))
    for n in range(5):
        net.add_node(n)
    for i, (node, t) in enumerate(sorted(arrivals, key=lambda a: a[1])):
        sim.on(EventKind.MESSAGE_DUE, lambda ev: net.enqueue(*ev.payload))
        sim.schedule(t, EventKind.MESSAGE_DUE, (node, i))
    sim.schedule(20, EventKind.SIM_END)
    sim.run()
    times = [t for t, _, _ in log]
    assert len(times) == len(set(times))
    assert sorted(p for _, _, p in log) == list(range(len(arrivals)))
    # per-node FIFO
    for n in range(5):
        mine = [p for _, node, p in log if node == n]
        assert mine == sorted(mine)
