"""Trace-based radio: nearest-match SNR->PER table with unit-disk range gating."""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import List, NamedTuple, Sequence, Tuple

from .engine import RngStream
from .linkbudget import LinkBudgetParams, default_params, distance_km, link_snr_db
from .mobility import Position, TraceFormatError

VALIDATION_ALTITUDE_KM = 30.0


class Outcome(enum.Enum):
    DELIVERED = "Delivered"
    LOST_CHANNEL = "LostChannel"
    OUT_OF_RANGE = "OutOfRange"


class SnrRow(NamedTuple):
    snr: float
    per: float
    ber: float


class SnrPerTable:
    """Rows sorted strictly ascending by SNR. The BER column is carried but unused."""

    def __init__(self, rows: Sequence[Tuple[float, float, float]]):
        rows = sorted(SnrRow(*map(float, r)) for r in rows)
        if not rows:
            raise ValueError("SNR table needs at least one row")
        for r in rows:
            if not (0.0 <= r.per <= 1.0 and 0.0 <= r.ber <= 1.0):
                raise ValueError(f"PER/BER out of [0, 1] in row {tuple(r)}")
        for a, b in zip(rows, rows[1:]):
            if a.snr == b.snr:
                raise ValueError(f"duplicate SNR value {a.snr}")
        self.rows: Tuple[SnrRow, ...] = tuple(rows)
        self._snrs = [r.snr for r in rows]

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, SnrPerTable) and self.rows == other.rows

    def lookup(self, snr: float) -> Tuple[float, float]:
        """(per, ber) of the row with the closest SNR; ties go to the lower-SNR row."""
        k = bisect.bisect_left(self._snrs, snr)
        if k == 0:
            row = self.rows[0]
        elif k == len(self.rows):
            row = self.rows[-1]
        else:
            lo, hi = self.rows[k - 1], self.rows[k]
            row = hi if hi.snr - snr < snr - lo.snr else lo
        return row.per, row.ber


def lookup(table: SnrPerTable, snr: float) -> Tuple[float, float]:
    return table.lookup(snr)


def parse_snr_table(text: str, source: str | None = None) -> SnrPerTable:
    rows = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise TraceFormatError(f"expected 'snr,per,ber', got {len(parts)} fields", lineno, source)
        try:
            snr, per, ber = (float(p) for p in parts)
        except ValueError:
            raise TraceFormatError(f"non-numeric value in {line!r}", lineno, source) from None
        if not all(math.isfinite(v) for v in (snr, per, ber)):
            raise TraceFormatError("non-finite value", lineno, source)
        if not 0.0 <= per <= 1.0:
            raise TraceFormatError(f"PER {per} outside [0, 1]", lineno, source)
        if not 0.0 <= ber <= 1.0:
            raise TraceFormatError(f"BER {ber} outside [0, 1]", lineno, source)
        if snr in seen:
            raise TraceFormatError(f"duplicate SNR {snr} (first on line {seen[snr]})", lineno, source)
        seen[snr] = lineno
        rows.append((snr, per, ber))
    if not rows:
        raise TraceFormatError("SNR table is empty", None, source)
    return SnrPerTable(rows)


def default_table() -> SnrPerTable:
    """Synthetic 41-row staircase from -2 dB to 18 dB; only (8.0 dB, PER 0.1) is anchored."""
    text = resources.files("aerosim").joinpath("data/default_snr_table.csv").read_text()
    return parse_snr_table(text, source="default_snr_table.csv")


@dataclass(frozen=True)
class RadioConfig:
    range_km: float = 400.0
    table: SnrPerTable = field(default_factory=default_table)
    link: LinkBudgetParams = field(default_factory=default_params)

    def __post_init__(self):
        if not self.range_km > 0:
            raise ValueError("radio range must be positive")

    def expected_per(self, tx: Position, rx: Position) -> float:
        """Loss probability for the geometry; 1.0 when unreachable."""
        if distance_km(tx, rx) > self.range_km:
            return 1.0
        snr = link_snr_db(self.link, tx, rx)
        if snr is None:
            return 1.0
        return self.table.lookup(snr)[0]


def attempt_reception(config: RadioConfig, tx: Position, rx: Position, rng: RngStream) -> Outcome:
    if distance_km(tx, rx) > config.range_km:
        return Outcome.OUT_OF_RANGE
    snr = link_snr_db(config.link, tx, rx)
    if snr is None:
        return Outcome.OUT_OF_RANGE
    per, _ = config.table.lookup(snr)
    if rng.random() >= per:
        return Outcome.DELIVERED
    return Outcome.LOST_CHANNEL


class ValidationPoint(NamedTuple):
    distance_km: float
    expected_per: float
    observed_per: float


def validate_radio(
    config: RadioConfig, distances: Sequence[float], packets_per_distance: int, seed: int
) -> List[ValidationPoint]:
    """Fire packets from (d, 0, 30) to a receiver at (0, 0, 30) and compare loss rates.

    Out-of-range attempts count as lost, matching their expected PER of 1.
    """
    if packets_per_distance < 1:
        raise ValueError("packets_per_distance must be at least 1")
    rx = Position(0.0, 0.0, VALIDATION_ALTITUDE_KM)
    rng = RngStream(seed, "radio")
    points = []
    for d in distances:
        tx = Position(float(d), 0.0, VALIDATION_ALTITUDE_KM)
        lost = 0
        for _ in range(packets_per_distance):
            if attempt_reception(config, tx, rx, rng) is not Outcome.DELIVERED:
                lost += 1
        points.append(ValidationPoint(float(d), config.expected_per(tx, rx), lost / packets_per_distance))
    return points
