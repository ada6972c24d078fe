"""MAC state machines driven directly, without the engine."""

from csmasim.engine import TimingParams
from csmasim.macs import QueueParams, make_macs
from csmasim.macs.base import MediaQueue
from csmasim.macs.baselines import DcfMac, DiffqMac, OcsmaCwMac, OcsmaMuMac
from csmasim.macs.odcf import OdcfMac

TM = TimingParams()


def fail_burst(mac):
    cw, dropped = mac.end_burst(0, True)
    return cw, dropped


def test_dcf_ladder_and_drop():
    mac = DcfMac(0, TM)
    assert mac.start() == 15
    seen = []
    for _ in range(4):
        cw, dropped = fail_burst(mac)
        seen.append(cw)
        assert not dropped
    assert seen == [31, 63, 127, 255]
    cw, dropped = fail_burst(mac)     # retry limit 4 exceeded
    assert dropped and cw == 15
    # success resets the chain
    mac.start()
    fail_burst(mac)
    cw, dropped = mac.end_burst(1, False)
    assert cw == 15 and not dropped


def test_odcf_beb_walks_up_from_queue_window():
    mac = OdcfMac(0, TM, QueueParams())
    assert mac.start() == 1023        # queue at minimum -> politest window
    cw, _ = fail_burst(mac)
    assert cw == 1023                 # already at the top of the ladder
    # aggressive end: fill the queue, window drops, backoff can double
    for _ in range(100000):
        mac.on_arrival()
    assert mac.queue.length == 1000
    cw0, _ = mac.end_burst(1, False)
    assert cw0 == 1
    cw1, _ = fail_burst(mac)
    cw2, _ = fail_burst(mac)
    assert (cw1, cw2) == (3, 7)


def test_odcf_queue_drains_on_service_and_drop():
    mac = OdcfMac(0, TM, QueueParams())
    for _ in range(50):
        mac.on_arrival()
    assert mac.queue.length == 51
    mac.plan_burst(6.0)
    mac.end_burst(5, False)
    assert mac.queue.length == 46
    for _ in range(5):
        fail_burst(mac)               # fifth failure drops the head packet
    assert mac.queue.length == 45


def test_odcf_deficit_commits_only_on_delivery():
    mac = OdcfMac(0, TM, QueueParams())
    for _ in range(400):
        mac.on_arrival()
    n, info = mac.plan_burst(6.0)
    assert n >= 1
    mac.end_burst(0, True)            # nothing delivered: deficit unchanged
    assert mac.queue.deficit_bytes == 0.0
    n, info = mac.plan_burst(6.0)
    mac.end_burst(n, False)
    assert mac.queue.deficit_bytes >= 0.0


def test_ocsma_cw_window_tracks_queue_without_beb():
    mac = OcsmaCwMac(0, TM, QueueParams())
    # Q=1: p = e^0.01/150 -> cw = 2/p - 1 = 296 -> 255
    assert mac.start() == 255
    cw, _ = fail_burst(mac)
    assert cw == 255                  # no exponential backoff
    for _ in range(100000):
        mac.on_arrival()
    assert mac._initial_cw() == 1     # capped probability floors the window
    cw, _ = fail_burst(mac)
    assert cw == 1


def test_ocsma_mu_hold_scales_with_window():
    mac = OcsmaMuMac(0, TM, QueueParams())
    assert mac.start() == 15
    n, info = mac.plan_burst(6.0)
    # q=0.01, p=2/16: hold = e^0.01*8 = 8.08 slots -> single packet
    assert n == 1
    assert abs(info["hold"] - 8.1) < 0.1
    for _ in range(4):
        fail_burst(mac)
    n, info = mac.plan_burst(6.0)     # cw 255 -> p tiny -> long hold
    assert n == 1                     # queue still near-empty: e^q small
    for _ in range(100000):
        mac.on_arrival()
    n, info = mac.plan_burst(6.0)
    assert n == 64                    # e^10 / p blows through the cap


def test_diffq_bands_and_capped_backoff():
    mac = DiffqMac(0, TM, QueueParams())
    assert mac.start() == 255 and mac.aifs_extra == 5
    for _ in range(10):
        mac.on_arrival()
    assert mac._initial_cw() == 63 and mac.aifs_extra == 3    # Q=11
    for _ in range(40):
        mac.on_arrival()
    assert mac._initial_cw() == 31 and mac.aifs_extra == 1    # Q=51
    for _ in range(100):
        mac.on_arrival()
    assert mac._initial_cw() == 15 and mac.aifs_extra == 0    # Q=151
    cw1, _ = fail_burst(mac)
    cw2, _ = fail_burst(mac)
    assert (cw1, cw2) == (31, 31)     # doubling capped at the band maximum


def test_media_queue_rates_and_clamps():
    mq = MediaQueue(QueueParams(drain_gain=300.0))
    assert mq.length == 1
    assert mq.arrival_rate_pps() == 300.0 / 0.01
    for _ in range(2000):
        mq.on_arrival()
    assert mq.length == 1000
    assert mq.arrival_rate_pps() == 30.0
    mq.on_service(5000)
    assert mq.length == 1


def test_protocol_factory():
    topo_links = 3
    from csmasim.topology import make_fc
    topo = make_fc(topo_links)
    for name, cls in (("odcf", OdcfMac), ("dcf", DcfMac),
                      ("ocsma_cw", OcsmaCwMac), ("ocsma_mu", OcsmaMuMac),
                      ("diffq", DiffqMac)):
        macs = make_macs(name, topo, TM)
        assert len(macs) == topo_links
        assert all(isinstance(m, cls) for m in macs)
    try:
        make_macs("nope", topo, TM)
    except ValueError as e:
        assert "unknown protocol" in str(e)
    else:
        raise AssertionError("expected ValueError")
