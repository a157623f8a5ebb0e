"""Brute-force checks kept independent of the code under test."""

import numpy as np


def sampled_crossings(waypoints, center, range_km, step=1e-3, chunk=1_000_000):
    """Fixed-step scan of a piecewise-linear path for boundary transitions.

    Returns (t, kind) where t is the first sample at which membership
    flipped; the true crossing lies in (t - step, t].
    """
    ts = np.array([w.t for w in waypoints])
    xyz = np.array([[w.pos.x, w.pos.y, w.pos.z] for w in waypoints])
    c = np.array([center.x, center.y, center.z])
    n = int(np.ceil((ts[-1] - ts[0]) / step)) + 1
    out = []
    prev = None
    for start in range(0, n, chunk):
        t = ts[0] + step * np.arange(start, min(n, start + chunk))
        d2 = np.zeros_like(t)
        for k in range(3):
            d2 += (np.interp(t, ts, xyz[:, k]) - c[k]) ** 2
        inside = d2 <= range_km**2
        if prev is not None:
            inside_full = np.concatenate([[prev], inside])
            t_full = np.concatenate([[np.nan], t])
        else:
            inside_full, t_full = inside, t
        flips = np.nonzero(inside_full[1:] != inside_full[:-1])[0] + 1
        for k in flips:
            out.append((float(t_full[k]), "Entry" if inside_full[k] else "Exit"))
        prev = inside[-1]
    return out
