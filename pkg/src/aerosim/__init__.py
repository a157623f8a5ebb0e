"""Trace-driven discrete-event simulation of aeronautical ad-hoc networks.

Waypoint mobility, timestamp-driven traffic, an oracle TDMA MAC and an
SNR->PER lookup radio, composed into an OCA entry/exit reporting scenario.
"""

__version__ = "0.1.0"
