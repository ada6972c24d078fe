"""Shared MAC plumbing: the hardware CW ladder and the two-stage queue.

Commodity radios only expose contention windows of the form 2^k - 1, so
every MAC here quantizes onto CW_SET and walks it for binary exponential
backoff. The queue-driven MACs share a two-stage structure: an infinite
saturated backlog drains into a bounded media-access queue at a controlled
rate, and the media queue length is the control signal the access rules
read.
"""

from dataclasses import dataclass

CW_SET = (1, 3, 7, 15, 31, 63, 127, 255, 511, 1023)
CW_INDEX = {cw: i for i, cw in enumerate(CW_SET)}


def quantize_cw(cw_raw):
    """Closest member of CW_SET; ties resolve toward the smaller window."""
    best = CW_SET[0]
    best_d = abs(cw_raw - best)
    for cw in CW_SET[1:]:
        d = abs(cw_raw - cw)
        if d < best_d:
            best, best_d = cw, d
    return best


@dataclass
class QueueParams:
    queue_scale: float = 0.01    # packets -> dimensionless backlog q
    drain_gain: float = 300.0    # backlog drains at drain_gain / q packets/s
    q_min: int = 1
    q_max: int = 1000


class MediaQueue:
    """Bounded media-access queue fed from a saturated backlog.

    The feed rate is drain_gain / q, so a long queue throttles its own
    refill; that coupling is what lets the queue length carry the link's
    contention pressure."""

    def __init__(self, params: QueueParams):
        self.p = params
        self.length = params.q_min
        self.deficit_bytes = 0.0

    @property
    def scaled(self):
        """Dimensionless backlog the access rules read."""
        return self.p.queue_scale * self.length

    def arrival_rate_pps(self):
        return self.p.drain_gain / self.scaled

    def on_arrival(self):
        if self.length < self.p.q_max:
            self.length += 1

    def on_service(self, packets):
        self.length = update_maq(self.length, 0, packets,
                                 self.p.q_min, self.p.q_max)


def update_maq(q_pkts, arrivals, services, q_min=1, q_max=1000):
    """Media-queue update: add arrivals, subtract services, clamp to bounds."""
    return min(max(q_pkts + arrivals - services, q_min), q_max)


class MacBase:
    """Engine-facing MAC interface; subclasses fill in the access policy.

    Lifecycle per head-of-line packet: start()/end_burst() hand back the CW
    to draw the next backoff from; plan_burst() sizes the burst at a channel
    grant; the engine reports every frame verdict through on_frame_result()
    and the burst outcome through end_burst().
    """

    aifs_extra = 0   # extra idle slots before the countdown, beyond base DIFS

    def __init__(self, link_id, timing):
        self.link = link_id
        self.timing = timing
        self.retries = 0
        self.capacity_mbps = 6.0

    # -- contention ----------------------------------------------------

    def start(self):
        """Fresh head packet; returns the CW for the first attempt."""
        self.retries = 0
        return self._initial_cw()

    def end_burst(self, delivered, failed):
        """Burst finished; returns (next_cw, dropped)."""
        if delivered:
            self._on_service(delivered)
        if not failed:
            self.retries = 0
            return self._initial_cw(), False
        self.retries += 1
        if self.retries > self.timing.retry_limit:
            self._on_drop()
            self.retries = 0
            return self._initial_cw(), True
        return self._retry_cw(), False

    def _initial_cw(self):
        raise NotImplementedError

    def _retry_cw(self):
        """CW after a failed attempt; default is binary exponential backoff."""
        raise NotImplementedError

    # -- burst sizing ----------------------------------------------------

    def plan_burst(self, capacity_mbps):
        """Packets to send at this grant, plus diagnostics for the event log."""
        return 1, {}

    # -- bookkeeping hooks -------------------------------------------------

    def _on_service(self, packets):
        pass

    def _on_drop(self):
        pass

    def on_frame_result(self, ok):
        pass

    def arrival_rate_pps(self):
        return 0.0

    def on_arrival(self):
        pass

    def on_second(self):
        pass

    def on_capacity(self, mbps):
        self.capacity_mbps = mbps

    def snapshot(self):
        return {}
