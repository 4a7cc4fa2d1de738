import pytest

from wpansim.phy import (B868, B915, B2400, PhyParams, beacon_interval,
                         channel_center_frequency, comm_range_m, frame_airtime,
                         in_range, lq_from_rx_power, path_loss_db,
                         received_power)


def test_channel_frequencies_full_plan():
    assert channel_center_frequency(11) == 2405.0
    assert channel_center_frequency(26) == 2480.0
    freqs = [channel_center_frequency(ch) for ch in range(11, 27)]
    assert len(freqs) == 16
    assert all(b - a == 5.0 for a, b in zip(freqs, freqs[1:]))


@pytest.mark.parametrize("ch", [10, 27, 0, -1])
def test_channel_out_of_plan(ch):
    with pytest.raises(ValueError):
        channel_center_frequency(ch)


def test_beacon_interval_extremes_exact_us():
    assert beacon_interval(0, B2400) == 15_360
    assert beacon_interval(14, B2400) == 251_658_240
    assert beacon_interval(0, B915) == 24_000
    assert beacon_interval(14, B915) == 393_216_000
    assert beacon_interval(0, B868) == 48_000
    assert beacon_interval(14, B868) == 786_432_000


def test_beacon_interval_doubles_per_order():
    for band in (B2400, B915, B868):
        for bo in range(14):
            assert beacon_interval(bo + 1, band) == 2 * beacon_interval(bo, band)


def test_beacon_order_15_is_not_an_interval():
    with pytest.raises(ValueError):
        beacon_interval(15, B2400)


def test_path_loss_reference_distance():
    p = PhyParams(pl0_db=47.0, path_loss_exponent=2.0)
    assert path_loss_db(1.0, p) == 47.0


def test_path_loss_doubling_distance():
    p = PhyParams(pl0_db=40.0, path_loss_exponent=2.0)
    assert path_loss_db(2.0, p) - path_loss_db(1.0, p) == pytest.approx(6.0206, abs=1e-4)


def test_path_loss_clamps_tiny_distance():
    p = PhyParams()
    assert path_loss_db(0.0, p) == path_loss_db(0.1, p)
    assert path_loss_db(0.05, p) == path_loss_db(0.1, p)


def test_received_power_budget():
    assert received_power(0.0, 0.0, 0.0, 85.0) == -85.0
    assert received_power(4.0, 0.0, 0.0, 85.0) == -81.0
    assert received_power(0.0, 3.0, 0.0, 85.0) == -82.0


def test_lq_endpoints_and_midpoint():
    p = PhyParams(rx_sensitivity_dbm=-70.0, lq_saturation_margin_db=40.0)
    assert lq_from_rx_power(-70.0, p) == 0
    assert lq_from_rx_power(-30.0, p) == 255
    assert lq_from_rx_power(-50.0, p) == 128  # midpoint rounds half up
    # endpoint identities are exact, not just asymptotic
    assert lq_from_rx_power(-69.999, p) >= 1
    assert lq_from_rx_power(-30.001, p) <= 254
    assert lq_from_rx_power(-200.0, p) == 0
    assert lq_from_rx_power(0.0, p) == 255


def test_lq_monotone():
    p = PhyParams(rx_sensitivity_dbm=-70.0)
    values = [lq_from_rx_power(-90.0 + 0.25 * k, p) for k in range(400)]
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_frame_airtime():
    assert frame_airtime(10, B2400) == 320
    assert frame_airtime(10, B868) == 4_000
    assert frame_airtime(1, B2400) == 32
    assert frame_airtime(250, B915) == 50_000
    with pytest.raises(ValueError):
        frame_airtime(0, B2400)


def test_in_range_strict_at_sensitivity():
    # rx exactly at sensitivity must be out of range
    p = PhyParams(pl0_db=85.0, path_loss_exponent=2.0, rx_sensitivity_dbm=-85.0)
    assert in_range(1.0, 0.0, 0.0, 0.0, p) is False
    assert in_range(0.999, 0.0, 0.0, 0.0, p) is True


def test_in_range_monotone_in_power():
    p = PhyParams()
    d = 3.0
    states = [in_range(d, power, 0.0, 0.0, p) for power in range(-10, 11)]
    # once true, stays true for every higher power
    first_true = states.index(True) if True in states else len(states)
    assert all(states[first_true:])


def test_in_range_on_calibrated_defaults(default_cfg):
    p = default_cfg.phy
    assert in_range(1.0, 0.0, 0.0, 0.0, p) is True
    # x = 3 m sits in the first coverage gap at 0 dBm: out of range of all three
    for node in default_cfg.stationary_nodes():
        dist = abs(3.0 - node.x)
        assert in_range(dist, 0.0, node.antenna_gain_db, 0.0, p) is False


def test_comm_range_matches_in_range_threshold():
    p = PhyParams(pl0_db=54.0, path_loss_exponent=3.5, rx_sensitivity_dbm=-73.0)
    r = comm_range_m(0.0, 0.0, p)
    assert in_range(r * 0.999, 0.0, 0.0, 0.0, p) is True
    assert in_range(r * 1.001, 0.0, 0.0, 0.0, p) is False
