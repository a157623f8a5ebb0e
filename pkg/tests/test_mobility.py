import pytest
from hypothesis import given, strategies as st

from aerosim.mobility import (
    Position,
    TraceFormatError,
    Waypoint,
    MobilityTrace,
    format_mobility_trace,
    parse_mobility_trace,
    position_at,
)


def test_parse_single_node():
    trace = parse_mobility_trace("0 0 0 10 100 100 0 10")
    assert len(trace) == 1
    assert trace.waypoints(0) == (
        Waypoint(0, Position(0, 0, 10)),
        Waypoint(100, Position(100, 0, 10)),
    )


def test_parse_empty():
    assert len(parse_mobility_trace("")) == 0


def test_parse_skips_comments():
    trace = parse_mobility_trace("# header\n0 1 2 3\n\n5 1 2 3 6 2 2 3\n")
    assert len(trace) == 2
    assert len(trace.waypoints(1)) == 2


def test_non_increasing_times_rejected():
    with pytest.raises(TraceFormatError, match="line 1"):
        parse_mobility_trace("0 0 0 10 0 5 5 10")


def test_group_count_must_be_multiple_of_four():
    with pytest.raises(TraceFormatError, match="line 2"):
        parse_mobility_trace("0 0 0 10\n0 0 0")


def test_two_dimensional_traces_rejected():
    # 2D "t x y" triples are not zero-filled
    with pytest.raises(TraceFormatError):
        parse_mobility_trace("0 0 0 10 0 0")


def test_non_numeric_rejected_with_line():
    with pytest.raises(TraceFormatError, match="line 3"):
        parse_mobility_trace("0 0 0 1\n0 0 0 1\n0 a 0 1")


def test_negative_altitude_rejected():
    with pytest.raises(TraceFormatError):
        parse_mobility_trace("0 0 0 -1")


@pytest.fixture
def line():
    return parse_mobility_trace("0 0 0 10 100 100 0 10")


@pytest.mark.parametrize(
    "t,expected",
    [(50, Position(50, 0, 10)), (0, Position(0, 0, 10)), (120, Position(100, 0, 10)), (-5, Position(0, 0, 10))],
)
def test_position_at(line, t, expected):
    assert position_at(line, 0, t) == expected


def test_position_at_bad_node(line):
    with pytest.raises(IndexError):
        position_at(line, 1, 0)


def test_format_round_trip():
    text = "0.0 1.5 -2.25 10.0 12.5 3.0 4.0 11.0\n7.0 0.0 0.0 0.0\n"
    trace = parse_mobility_trace(text)
    assert format_mobility_trace(trace) == text
    assert parse_mobility_trace(format_mobility_trace(trace)) == trace


coord = st.floats(-1000, 1000, allow_nan=False)
alt = st.floats(0, 20, allow_nan=False)


@st.composite
def traces(draw):
    n = draw(st.integers(1, 6))
    gaps = draw(st.lists(st.floats(0.5, 100), min_size=n, max_size=n))
    t0 = draw(st.floats(0, 100))
    times, t = [], t0
    for g in gaps:
        times.append(t)
        t += g
    wps = [Waypoint(t, Position(draw(coord), draw(coord), draw(alt))) for t in times]
    return MobilityTrace([wps])


@given(traces())
def test_exact_at_waypoints(trace):
    for w in trace.waypoints(0):
        assert trace.position_at(0, w.t) == w.pos


@given(traces(), st.floats(0, 1))
def test_interpolated_point_lies_on_segment(trace, frac):
    wps = trace.waypoints(0)
    if len(wps) < 2:
        return
    a, b = wps[0], wps[1]
    p = trace.position_at(0, a.t + frac * (b.t - a.t))
    for axis in "xyz":
        lo, hi = sorted((getattr(a.pos, axis), getattr(b.pos, axis)))
        assert lo - 1e-9 <= getattr(p, axis) <= hi + 1e-9


@given(traces(), st.floats(0, 600))
def test_continuity(trace, t):
    eps = 1e-7
    p, q = trace.position_at(0, t), trace.position_at(0, t + eps)
    # speeds are bounded by 2000 km per 0.5 s
    assert abs(p.x - q.x) <= 4000 * eps + 1e-9
    assert abs(p.y - q.y) <= 4000 * eps + 1e-9
