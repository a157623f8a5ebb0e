"""Link budget chain: radio horizon, free-space path loss, received power, SNR.

Distances and heights are in kilometres, frequency in MHz. Beyond the radio
horizon the path loss is ``math.inf`` and the received power is ``None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

FSPL_CONSTANT_DB = 32.4478
HORIZON_FACTOR_KM = 130.4

# geometry the default transmit power is calibrated against
CALIBRATION_DISTANCE_KM = 370.4
CALIBRATION_SNR_DB = 8.0


class LinkBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class LinkBudgetParams:
    p_tx: float  # dBm
    g_tx: float = 0.0  # dBi
    l_tx: float = 0.0  # dB
    g_rx: float = 0.0  # dBi
    l_rx: float = 0.0  # dB
    f: float = 968.0  # MHz
    f_n: float = 6.0  # noise figure, dB
    n0: float = -174.0  # thermal noise density, dBm/Hz
    b: float = 500e3  # receiver bandwidth, Hz

    def __post_init__(self):
        for name in ("p_tx", "g_tx", "l_tx", "g_rx", "l_rx", "f", "f_n", "n0", "b"):
            if not math.isfinite(getattr(self, name)):
                raise LinkBudgetError(f"{name} must be finite")
        if self.f <= 0:
            raise LinkBudgetError("frequency must be positive")
        if self.b <= 0:
            raise LinkBudgetError("bandwidth must be positive")

    @property
    def noise_floor_dbm(self) -> float:
        return self.f_n + self.n0 + 10.0 * math.log10(self.b)


def radio_horizon_km(h_tx: float, h_rx: float) -> float:
    if h_tx < 0 or h_rx < 0:
        raise LinkBudgetError(f"antenna heights must be non-negative, got {h_tx}, {h_rx}")
    return HORIZON_FACTOR_KM * (math.sqrt(h_tx) + math.sqrt(h_rx))


def fspl_db(d: float, f: float, h_tx: float, h_rx: float) -> float:
    """Free-space path loss in dB, or ``math.inf`` at or beyond the horizon."""
    if d <= 0:
        raise LinkBudgetError(f"distance must be positive, got {d}")
    if f <= 0:
        raise LinkBudgetError(f"frequency must be positive, got {f}")
    if not d < radio_horizon_km(h_tx, h_rx):
        return math.inf
    return 20.0 * math.log10(d) + 20.0 * math.log10(f) + FSPL_CONSTANT_DB


def received_power_dbm(params: LinkBudgetParams, loss: float) -> Optional[float]:
    if math.isinf(loss):
        return None
    return params.p_tx + params.g_tx - params.l_tx + params.g_rx - params.l_rx - loss


def snr_db(params: LinkBudgetParams, p_rx: float) -> float:
    return p_rx - params.noise_floor_dbm


def distance_km(a, b) -> float:
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def link_snr_db(params: LinkBudgetParams, tx, rx) -> Optional[float]:
    """SNR of the link from ``tx`` to ``rx`` (objects with x, y, z in km).

    Heights entering the horizon are the z coordinates; the path-loss distance
    is the 3D slant distance.
    """
    d = distance_km(tx, rx)
    if d == 0:
        raise LinkBudgetError("transmitter and receiver positions coincide")
    p_rx = received_power_dbm(params, fspl_db(d, params.f, tx.z, rx.z))
    if p_rx is None:
        return None
    return snr_db(params, p_rx)


def calibrate_tx_power(
    params: LinkBudgetParams,
    target_snr_db: float = CALIBRATION_SNR_DB,
    distance: float = CALIBRATION_DISTANCE_KM,
) -> LinkBudgetParams:
    """Return ``params`` with p_tx chosen so the SNR at ``distance`` equals the target.

    Closed-form inversion of the chain; the horizon is not consulted.
    """
    loss = 20.0 * math.log10(distance) + 20.0 * math.log10(params.f) + FSPL_CONSTANT_DB
    p_tx = (
        target_snr_db
        + params.noise_floor_dbm
        + loss
        - params.g_tx
        + params.l_tx
        - params.g_rx
        + params.l_rx
    )
    return replace(params, p_tx=p_tx)


def default_params() -> LinkBudgetParams:
    """968 MHz, 6 dB noise figure, -174 dBm/Hz, 500 kHz, unity gains, calibrated p_tx."""
    return calibrate_tx_power(LinkBudgetParams(p_tx=0.0))
