"""Channel plan, data-rate tables, beacon arithmetic and the link budget.

Propagation is a deterministic log-distance model:

    PL(d) = pl0 + 10 * n * log10(d / 1 m)            [dB]
    rx    = tx + gain_tx + gain_rx - PL(d)           [dBm]

No fading or shadowing: coverage is a sharp threshold phenomenon, which is
what makes gap boundaries exactly reproducible.  Link quality maps the
received margin over sensitivity linearly onto 0..255, saturating at
`lq_saturation_margin` dB above sensitivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import SimTime

MIN_DISTANCE_M = 0.1  # distances below this are clamped


@dataclass(frozen=True)
class Band:
    name: str
    data_rate_kbps: int
    channels: range
    channel_spacing_mhz: int


B2400 = Band("2400", 250, range(11, 27), 5)
B915 = Band("915", 40, range(1, 11), 2)
B868 = Band("868", 20, range(0, 1), 0)

BANDS = {"2400": B2400, "915": B915, "868": B868}

# Beacon base interval per band, exact in microseconds.
_BEACON_BASE_US = {250: 15_360, 40: 24_000, 20: 48_000}

NO_BEACONS = 15  # beacon order value meaning non-beacon mode


@dataclass
class PhyParams:
    tx_power_dbm: float = 0.0
    antenna_gain_db: float = 0.0
    rx_sensitivity_dbm: float = -70.0
    pl0_db: float = 52.0
    path_loss_exponent: float = 3.3
    lq_saturation_margin_db: float = 40.0
    phy_overhead_bytes: int = 6
    power_levels_dbm: tuple[float, ...] = (0.0, 2.0, 3.0, 4.0, 5.0, 6.0)


@dataclass
class LinkSample:
    rx_power_dbm: float
    lq: int
    time: SimTime
    src: int
    tx_power_dbm: float  # power the sampled frame was sent at


def channel_center_frequency(ch: int) -> float:
    """Center frequency in MHz for a 2.4 GHz band channel: 2350 + 5*ch."""
    if not 11 <= ch <= 26:
        raise ValueError(f"channel {ch} outside the 2.4 GHz plan (11..26)")
    return float(2350 + 5 * ch)


def beacon_interval(bo: int, band: Band) -> SimTime:
    """Beacon interval base(band) * 2**bo in integer microseconds."""
    if not 0 <= bo <= 14:
        raise ValueError(f"beacon order {bo} outside 0..14 "
                         "(15 means non-beacon mode, not an interval)")
    return _BEACON_BASE_US[band.data_rate_kbps] << bo


def path_loss_db(distance_m: float, params: PhyParams) -> float:
    d = max(distance_m, MIN_DISTANCE_M)
    return params.pl0_db + 10.0 * params.path_loss_exponent * math.log10(d)


def received_power(tx_dbm: float, gain_tx_db: float, gain_rx_db: float,
                   pl_db: float) -> float:
    return tx_dbm + gain_tx_db + gain_rx_db - pl_db


def lq_from_rx_power(rx_dbm: float, params: PhyParams) -> int:
    """Map received power onto the 0..255 link-quality scale.

    0 iff rx <= sensitivity, 255 iff rx >= sensitivity + saturation margin;
    linear in dB in between, rounded half up.  The interior is clamped to
    1..254 so the endpoint identities hold exactly.
    """
    s = params.rx_sensitivity_dbm
    m = params.lq_saturation_margin_db
    if rx_dbm <= s:
        return 0
    if rx_dbm >= s + m:
        return 255
    q = 255.0 * (rx_dbm - s) / m
    return min(254, max(1, math.floor(q + 0.5)))


def frame_airtime(frame_bytes: int, band: Band) -> SimTime:
    """Over-the-air duration in integer microseconds, rounded up."""
    if frame_bytes < 1:
        raise ValueError("frame must be at least 1 byte")
    bits = frame_bytes * 8
    return -(-bits * 1000 // band.data_rate_kbps)


def link_rx_power(distance_m: float, tx_dbm: float, gain_tx_db: float,
                  gain_rx_db: float, params: PhyParams) -> float:
    return received_power(tx_dbm, gain_tx_db, gain_rx_db,
                          path_loss_db(distance_m, params))


def in_range(distance_m: float, tx_dbm: float, gain_tx_db: float,
             gain_rx_db: float, params: PhyParams) -> bool:
    """True iff received power strictly exceeds receiver sensitivity."""
    rx = link_rx_power(distance_m, tx_dbm, gain_tx_db, gain_rx_db, params)
    return rx > params.rx_sensitivity_dbm


def comm_range_m(tx_dbm: float, gain_total_db: float, params: PhyParams) -> float:
    """Distance at which received power equals sensitivity exactly.

    Reception requires strictly more than sensitivity, so this radius is an
    open bound: a receiver exactly here is out of range.
    """
    margin = tx_dbm + gain_total_db - params.pl0_db - params.rx_sensitivity_dbm
    return 10.0 ** (margin / (10.0 * params.path_loss_exponent))
