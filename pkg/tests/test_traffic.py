import pytest

from aerosim.engine import EventKind, Simulator
from aerosim.mobility import TraceFormatError
from aerosim.traffic import AppConfig, MessageTrace, drive_app, format_message_trace, parse_message_trace


def test_parse_two_stamps():
    assert parse_message_trace("129.6\n870.4").timestamps == (129.6, 870.4)


def test_parse_empty():
    assert len(parse_message_trace("")) == 0


@pytest.mark.parametrize("text,match", [("5\n5", "line 2"), ("1\n-2", "line 2"), ("-1", "negative"), ("abc", "line 1")])
def test_parse_errors(text, match):
    with pytest.raises(TraceFormatError, match=match):
        parse_message_trace(text)


def test_parse_comments_and_trailing_comma():
    assert parse_message_trace("# t\n1.5,\n2\n").timestamps == (1.5, 2.0)


def test_round_trip():
    stamps = (0.0, 129.73501110692358, 870.2649888930764)
    assert parse_message_trace(format_message_trace(stamps)).timestamps == stamps


def test_trace_and_app_validation():
    with pytest.raises(ValueError):
        MessageTrace((3.0, 2.0))
    with pytest.raises(ValueError):
        AppConfig("gs", MessageTrace(), payload_size=0)


def _run(traces, end=10000.0):
    sim = Simulator(end)
    queue = []
    apps = [
        drive_app(sim, AppConfig("gs", MessageTrace(tuple(t))), source=7, deliver=lambda n, p: queue.append(p), app_index=i)
        for i, t in enumerate(traces)
    ]
    sim.schedule(end, EventKind.SIM_END)
    sim.run()
    return apps, queue


def test_one_packet_per_timestamp():
    apps, queue = _run([[100, 200]])
    assert [p.created_at for p in queue] == [100, 200]
    assert [p.sequence for p in queue] == [0, 1]
    assert all(p.source == 7 and p.destination == "gs" and p.size == 100 for p in queue)


def test_timestamps_after_end_ignored():
    apps, queue = _run([[100, 20000]])
    assert len(queue) == 1


def test_timestamp_at_end_included():
    apps, queue = _run([[50, 100]], end=100.0)
    assert [p.created_at for p in queue] == [50, 100]


def test_two_apps_share_queue_in_time_order():
    apps, queue = _run([[10, 30], [20, 40]])
    assert [(p.created_at, p.app) for p in queue] == [(10, 0), (20, 1), (30, 0), (40, 1)]
