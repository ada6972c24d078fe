"""Reference MACs the adaptive scheme is compared against.

DcfMac is plain saturated CSMA/CA. The other three keep the same two-stage
queue as the adaptive MAC but move only one control knob each: OcsmaCwMac
adapts the window alone, OcsmaMuMac adapts the hold alone, and DiffqMac
switches between fixed aggressiveness bands by queue length.
"""

import math

from .base import (CW_INDEX, CW_SET, MacBase, MediaQueue, QueueParams,
                   quantize_cw)

__all__ = ["DcfMac", "OcsmaCwMac", "OcsmaMuMac", "DiffqMac"]


class DcfMac(MacBase):
    """Saturated CSMA/CA: fixed ladder 15..1023, one packet per access."""

    def __init__(self, link_id, timing, queue_params=None,
                 cw_min=15, cw_max=1023):
        super().__init__(link_id, timing)
        self.cw_min = cw_min
        self.cw_max = cw_max

    def _initial_cw(self):
        self._cw = self.cw_min
        return self._cw

    def _retry_cw(self):
        self._cw = min(CW_SET[min(CW_INDEX[self._cw] + 1, len(CW_SET) - 1)],
                       self.cw_max)
        return self._cw

    def plan_burst(self, capacity_mbps):
        return 1, {"cw": self._cw}


class _QueuedMac(MacBase):
    """Common queue plumbing for the queue-driven reference MACs."""

    def __init__(self, link_id, timing, queue_params=None):
        super().__init__(link_id, timing)
        self.queue = MediaQueue(queue_params or QueueParams())

    def _on_service(self, packets):
        self.queue.on_service(packets)

    def _on_drop(self):
        self.queue.on_service(1)

    def arrival_rate_pps(self):
        return self.queue.arrival_rate_pps()

    def on_arrival(self):
        self.queue.on_arrival()

    def snapshot(self):
        return {"queue": self.queue.length}


class OcsmaCwMac(_QueuedMac):
    """Window-only adaptation around a fixed one-packet hold.

    Access probability follows exp(q) / hold_slots, capped where the queue
    clamp would put the window at its floor of 1, and is realised as
    cw = 2/p - 1. A collision re-draws from the same queue-derived window;
    there is no exponential backoff escape valve, so dense contention can
    drive every window to 1 at once.
    """

    HOLD_SLOTS = 150.0    # about one packet at the 6 Mb/s reference rate
    P_CAP = math.exp(10.0) / (math.exp(10.0) + 500.0)

    def _window(self):
        p = min(math.exp(self.queue.scaled) / self.HOLD_SLOTS, self.P_CAP)
        self._cw = quantize_cw(2.0 / p - 1.0)
        return self._cw

    def _initial_cw(self):
        return self._window()

    def _retry_cw(self):
        return self._window()

    def plan_burst(self, capacity_mbps):
        return 1, {"cw": self._cw, "q": round(self.queue.scaled, 3)}


class OcsmaMuMac(_QueuedMac):
    """Hold-only adaptation under standard DCF contention.

    The window runs the plain 15..1023 ladder; the hold is sized so that
    the winning attempt's access probability 2/(cw+1) times the hold equals
    e^q. Byte remainders carry over as a deficit like the adaptive MAC.
    """

    def __init__(self, link_id, timing, queue_params=None,
                 cw_min=15, cw_max=1023):
        super().__init__(link_id, timing, queue_params)
        self.cw_min = cw_min
        self.cw_max = cw_max
        self._pending_deficit = None

    def _initial_cw(self):
        self._cw = self.cw_min
        return self._cw

    def _retry_cw(self):
        self._cw = min(CW_SET[min(CW_INDEX[self._cw] + 1, len(CW_SET) - 1)],
                       self.cw_max)
        return self._cw

    def plan_burst(self, capacity_mbps):
        tm = self.timing
        p = 2.0 / (self._cw + 1.0)
        bytes_per_slot = capacity_mbps * tm.slot_us / 8.0
        cap_slots = tm.max_burst_packets * tm.packet_bytes / bytes_per_slot
        hold = min(math.exp(self.queue.scaled) / p, cap_slots)
        credit = hold * bytes_per_slot + self.queue.deficit_bytes
        n = max(1, min(int((credit + 1e-6) // tm.packet_bytes),
                       tm.max_burst_packets))
        self._pending_deficit = max(credit - n * tm.packet_bytes, 0.0)
        return n, {"cw": self._cw, "q": round(self.queue.scaled, 3),
                   "hold": round(hold, 1)}

    def _on_service(self, packets):
        super()._on_service(packets)
        if self._pending_deficit is not None:
            self.queue.deficit_bytes = self._pending_deficit
            self._pending_deficit = None

    def _on_drop(self):
        super()._on_drop()
        self._pending_deficit = None


class DiffqMac(_QueuedMac):
    """Queue-length bands pick a (cw_min, cw_max, extra AIFS) tuple.

    Longer queues get a more aggressive band: smaller windows and fewer
    idle slots before the countdown. Backoff doubles within the band.
    """

    # (upper queue bound, cw_min, cw_max, extra aifs slots)
    BANDS = ((5, 255, 1023, 5),
             (20, 63, 1023, 3),
             (100, 31, 63, 1),
             (None, 15, 31, 0))

    def _band(self):
        for bound, cw_min, cw_max, aifs in self.BANDS:
            if bound is None or self.queue.length < bound:
                return cw_min, cw_max, aifs
        raise AssertionError("unreachable")

    def _initial_cw(self):
        cw_min, cw_max, aifs = self._band()
        self.aifs_extra = aifs
        self._cw = cw_min
        self._cw_max = cw_max
        return self._cw

    def _retry_cw(self):
        self._cw = min(CW_SET[min(CW_INDEX[self._cw] + 1, len(CW_SET) - 1)],
                       self._cw_max)
        return self._cw

    def plan_burst(self, capacity_mbps):
        return 1, {"cw": self._cw, "queue": self.queue.length}
