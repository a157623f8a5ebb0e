"""Static figures written next to the CSV outputs."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "figure.figsize": (4.5, 3.0),
    "savefig.dpi": 150,
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_packet_counts(aggs: Sequence, path) -> Path:
    """Mean sent and received packets per user count, with 95% CI on received."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ns = [a.n for a in aggs]
        width = 0.35 * (min(b - a for a, b in zip(ns, ns[1:])) if len(ns) > 1 else 1.0)
        ax.bar([n - width / 2 for n in ns], [a.sent_mean for a in aggs], width, label="sent", color="0.6")
        err = [0.0 if math.isnan(a.ci95) else a.ci95 for a in aggs]
        ax.bar([n + width / 2 for n in ns], [a.received_mean for a in aggs], width, yerr=err,
               capsize=2, label="received", color="tab:blue")
        ax.set_xticks(ns)
        ax.set_xlabel("number of aircraft")
        ax.set_ylabel("packets")
        ax.legend(loc="upper left")
        return _save(fig, Path(path))


def plot_radio_validation(points: Sequence, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        d = [p.distance_km for p in points]
        ax.plot(d, [p.expected_per for p in points], "k--", drawstyle="steps-mid", label="table PER")
        ax.plot(d, [p.observed_per for p in points], "o", ms=3, color="tab:red", label="observed PER")
        ax.set_xlabel("distance [km]")
        ax.set_ylabel("PER")
        ax.set_ylim(-0.05, 1.05)
        ax.legend(loc="lower right")
        return _save(fig, Path(path))
