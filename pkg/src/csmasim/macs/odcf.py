"""Queue-driven CSMA adaptation with coupled window and burst control.

The access rules all key off the scaled media-queue value q:

* the initial contention window shrinks from the top of the ladder toward 1
  as q grows, following cw = 2(e^q + cushion)/e^q - 1;
* the per-access success probability is estimated from that window and the
  measured collision fraction with a finite-retry Bianchi-style formula;
* the transmission hold is sized so that (success probability) x (hold
  slots) = e^q, which makes long holds compensate for pessimistic access.

Links on faster channels scale q by their relative capacity before applying
the rules, so equal airtime (not equal packet rate) is the fixed point when
capacities differ.
"""

import math

from .base import (CW_INDEX, CW_SET, MacBase, MediaQueue, QueueParams,
                   quantize_cw, update_maq)

__all__ = ["OdcfMac", "update_maq", "dequeue_rate", "initial_cw",
           "initial_cw_raw", "estimate_success_p", "select_burst"]

# one-second smoothing weight for the collision and capacity averages
SMOOTH = 1.0 - math.exp(-1.0)

P_FLOOR = 1e-3


def dequeue_rate(q_scaled, drain_gain=300.0):
    """Backlog-to-media-queue transfer rate, packets per second."""
    return drain_gain / q_scaled


def initial_cw_raw(q, cushion=500.0):
    """Unquantized contention window for scaled queue q.

    Near q = 0 the window is about 2 * cushion (polite); by q = 10 the
    e^q term dominates and the window reaches 1 (aggressive).
    """
    w = math.exp(q)
    return 2.0 * (w + cushion) / w - 1.0

def initial_cw(q, cushion=500.0):
    return quantize_cw(initial_cw_raw(q, cushion))


def estimate_success_p(cw, pc, retry_limit=4, floor=P_FLOOR):
    """Per-access success probability for window cw under collision rate pc.

    Finite-retry attempt-rate formula with binary exponential backoff folded
    in through pc; at pc = 0 it reduces to 2 / (cw + 2). The pc = 1/2 point
    is a removable singularity, handled by its limit. Floored away from zero
    so the hold length it feeds stays finite.
    """
    m = retry_limit
    w = cw + 1.0
    geo = 1.0 - 2.0 ** -(m + 1)
    if abs(1.0 - 2.0 * pc) < 1e-9:
        p = 2.0 * geo / (w * (m + 1) / 2.0 + geo)
    else:
        a = 1.0 - 2.0 * pc
        hold = 1.0 - pc ** (m + 1)
        p = 2.0 * a * hold / (w * (1.0 - (2.0 * pc) ** (m + 1)) * (1.0 - pc)
                              + a * hold)
    return max(p, floor)


def select_burst(q, p_succ, capacity_mbps, deficit_bytes, timing):
    """Size the burst for one channel grant.

    The target hold is e^q / p_succ slots, capped at the max burst size.
    Byte credit = hold x channel rate + carried deficit; whole packets are
    sent (at least the head packet) and the remainder is returned as the
    next deficit.

    Returns (n_packets, next_deficit_bytes, hold_slots).
    """
    bytes_per_slot = capacity_mbps * timing.slot_us / 8.0
    cap_slots = timing.max_burst_packets * timing.packet_bytes / bytes_per_slot
    hold = min(math.exp(q) / p_succ, cap_slots)
    credit = hold * bytes_per_slot + deficit_bytes
    # tiny epsilon so a capped hold (exactly max_burst packets of credit)
    # does not round down to one packet short
    n = int((credit + 1e-6) // timing.packet_bytes)
    n = max(1, min(n, timing.max_burst_packets))
    remainder = max(credit - n * timing.packet_bytes, 0.0)
    return n, remainder, hold


class OdcfMac(MacBase):
    """Per-link state machine tying the queue to window and burst choices."""

    def __init__(self, link_id, timing, queue_params=None, cushion=500.0,
                 reference_mbps=6.0):
        super().__init__(link_id, timing)
        self.queue = MediaQueue(queue_params or QueueParams())
        self.cushion = cushion
        self.reference_mbps = reference_mbps
        self._c_rel = None          # smoothed capacity relative to reference
        self._cw = CW_SET[-1]
        self._pc = 0.0              # smoothed collision fraction
        self._frames = 0
        self._fails = 0
        self._pending_deficit = None

    def _q_eff(self):
        return (self._c_rel if self._c_rel is not None else 1.0) * self.queue.scaled

    # -- contention ----------------------------------------------------

    def _initial_cw(self):
        self._cw = initial_cw(self._q_eff(), self.cushion)
        return self._cw

    def _retry_cw(self):
        self._cw = CW_SET[min(CW_INDEX[self._cw] + 1, len(CW_SET) - 1)]
        return self._cw

    # -- burst sizing ----------------------------------------------------

    def plan_burst(self, capacity_mbps):
        q = self._q_eff()
        p = estimate_success_p(initial_cw(q, self.cushion), self._pc,
                               self.timing.retry_limit)
        n, remainder, hold = select_burst(q, p, capacity_mbps,
                                          self.queue.deficit_bytes, self.timing)
        self._pending_deficit = remainder
        return n, {"q": round(self.queue.scaled, 3), "cw": self._cw,
                   "p": round(p, 4), "hold": round(hold, 1)}

    def _on_service(self, packets):
        self.queue.on_service(packets)
        if self._pending_deficit is not None:
            # commit the remainder only once part of the burst got through
            self.queue.deficit_bytes = self._pending_deficit
            self._pending_deficit = None

    def _on_drop(self):
        self.queue.on_service(1)
        self._pending_deficit = None

    # -- estimators ------------------------------------------------------

    def on_frame_result(self, ok):
        self._frames += 1
        if not ok:
            self._fails += 1

    def on_second(self):
        if self._frames:
            self._pc += SMOOTH * (self._fails / self._frames - self._pc)
            self._frames = 0
            self._fails = 0
        target = self.capacity_mbps / self.reference_mbps
        self._c_rel += SMOOTH * (target - self._c_rel)

    def on_capacity(self, mbps):
        super().on_capacity(mbps)
        if self._c_rel is None:
            self._c_rel = mbps / self.reference_mbps

    # -- queue ---------------------------------------------------------

    def arrival_rate_pps(self):
        return self.queue.arrival_rate_pps()

    def on_arrival(self):
        self.queue.on_arrival()

    def snapshot(self):
        return {"queue": self.queue.length, "cw": self._cw, "pc": self._pc,
                "deficit": self.queue.deficit_bytes, "c_rel": self._c_rel}
