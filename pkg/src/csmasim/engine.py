"""Event-driven simulation of a slotted CSMA channel over a conflict topology.

Time advances in integer mini-slots (9 us by default). Links contend with
DIFS plus a uniform backoff draw, transmit multi-packet bursts, and defer
according to the topology's sensing relation and NAV reservations announced
by an RTS/CTS exchange. Frame outcomes are decided from the interference
relation; capture pairs survive overlaps. The loop jumps from one state
change to the next instead of stepping every slot, which is what makes
100-second horizons affordable.

Channel model notes:
* A burst occupies the channel as one continuous interval (its "wall") from
  first frame to final ACK, matching the NAV reservation a real header would
  announce. Sensing links freeze for the whole wall.
* The RTS/CTS handshake is modelled as one atomic exchange owned by the
  sender. On success, every link that can sense the sender (heard the RTS)
  or that interferes with it (heard the CTS at the receiver) defers until
  the reserved end.
* Control frames (CTS/ACK) are assumed delivered; only RTS exchanges and
  data frames can be corrupted.
* A lost frame aborts the remainder of the burst and goes through the MAC's
  retry path.
"""

import math
import random
from dataclasses import dataclass, field

INF = 1 << 62


@dataclass
class TimingParams:
    """Channel timing in mini-slots, loosely following 802.11a control rates."""

    slot_us: float = 9.0
    difs_slots: int = 4
    sifs_slots: int = 2
    ack_slots: int = 5
    rts_slots: int = 6
    cts_slots: int = 5
    phy_header_slots: int = 2
    ack_timeout_slots: int = 7    # sifs + ack wait before declaring the frame lost
    packet_bytes: int = 1000
    header_bytes: int = 32        # MAC header + FCS, transmitted at payload rate
    retry_limit: int = 4
    max_burst_packets: int = 64

    def payload_slots(self, capacity_mbps):
        """Air time of one packet's payload alone, fractional slots."""
        return self.packet_bytes * 8.0 / (capacity_mbps * self.slot_us)

    def data_frame_slots(self, capacity_mbps):
        """Whole-slot duration of one data frame (header + payload) on the air."""
        bits = (self.packet_bytes + self.header_bytes) * 8.0
        return self.phy_header_slots + math.ceil(bits / (capacity_mbps * self.slot_us))

    def exchange_slots(self):
        return self.rts_slots + self.sifs_slots + self.cts_slots


def arbitrate(transmitting, topology):
    """Receivers that decode when the given set of links overlap on the air.

    A link survives if every concurrently transmitting interferer is capture-
    dominated by it. This is the reference rule; the engine applies the same
    logic incrementally per frame.
    """
    ok = set()
    for l in transmitting:
        good = True
        for k in transmitting:
            if k == l:
                continue
            if topology.interferes(k, l) and (l, k) not in topology.capture:
                good = False
                break
        if good:
            ok.add(l)
    return ok


class _Burst:
    __slots__ = ("link", "n_packets", "delivered", "phase", "event_t",
                 "frame_start", "hit", "planned_end", "info")

    def __init__(self, link, n_packets, info):
        self.link = link
        self.n_packets = n_packets
        self.delivered = 0
        self.phase = ""          # xverdict | dstart | dverdict | end
        self.event_t = INF
        self.frame_start = 0
        self.hit = False
        self.planned_end = 0
        self.info = info


@dataclass
class SimResult:
    """Per-link outcome counters for one simulation run."""

    duration_s: float
    protocol: str
    seed: int
    n_links: int
    delivered_packets: list
    delivered_bytes: list
    goodput_bps: list
    frames: list              # frames launched (RTS exchanges + data frames)
    failed_frames: list
    drops: list
    accesses: list            # contention rounds entered
    avg_cw: list              # mean CW over contention rounds
    busy_slots: list          # channel wall slots owned by the link
    max_gap_s: list           # largest spacing between consecutive deliveries
    arrivals: list
    per_second_bytes: list    # [link][second] delivered payload bytes
    rts_used: bool
    event_log: list | None = None

    def collision_ratio(self, link):
        f = self.frames[link]
        return self.failed_frames[link] / f if f else 0.0

    def airtime_share(self):
        total = sum(self.busy_slots)
        if total == 0:
            return [0.0] * self.n_links
        return [b / total for b in self.busy_slots]


class Engine:
    """Runs one scenario: a topology, one MAC instance per link, a seed."""

    def __init__(self, topology, macs, timing=None, seed=0, duration_s=10.0,
                 rts=None, capacity_traces=None, collect_events=False,
                 protocol=""):
        self.topo = topology
        self.macs = list(macs)
        if len(self.macs) != topology.n_links:
            raise ValueError("need exactly one MAC per link")
        self.timing = timing or TimingParams()
        self.seed = seed
        self.duration_s = float(duration_s)
        self.protocol = protocol
        self.collect_events = collect_events
        self.rts = topology.has_hidden_conflict() if rts is None else bool(rts)
        self.capacity_traces = dict(capacity_traces or {})
        self.slots_per_sec = round(1e6 / self.timing.slot_us)
        self.duration_slots = int(round(self.duration_s * self.slots_per_sec))

    # -- main loop -------------------------------------------------------

    def run(self):
        topo = self.topo
        tm = self.timing
        L = topo.n_links
        rng = random.Random(self.seed)
        log = [] if self.collect_events else None

        heard_by = [tuple(k for k in range(L) if k != l and topo.senses(k, l))
                    for l in range(L)]
        interferers = [tuple(k for k in range(L) if k != l and topo.interferes(k, l))
                       for l in range(L)]
        hit_targets = [tuple(k for k in range(L) if k != l and topo.interferes(l, k))
                       for l in range(L)]
        # NAV reaches RTS hearers (they sense the sender) and CTS hearers
        # (their transmitter is near the sender's receiver, i.e. interferers).
        nav_targets = [tuple(sorted(set(heard_by[l]) | set(interferers[l])))
                       for l in range(L)]
        capture = topo.capture

        capacity = [float(c) for c in topo.capacity_mbps]
        data_slots = [tm.data_frame_slots(c) for c in capacity]
        xchg = tm.exchange_slots()
        sifs, ack, difs = tm.sifs_slots, tm.ack_slots, tm.difs_slots
        pkt_block = [d + sifs + ack for d in data_slots]   # data + SIFS + ACK

        traces = []
        for l, points in self.capacity_traces.items():
            for t_s, mbps in points:
                traces.append((int(round(t_s * self.slots_per_sec)), int(l), float(mbps)))
        traces.sort()
        trace_i = 0

        # per-link contention state
        bo_remaining = [0] * L
        counting = [False] * L
        count_from = [0] * L
        expiry = [INF] * L
        freeze_refs = [0] * L
        nav_until = [0] * L
        burst = [None] * L
        frame_t = [INF] * L
        arrive_t = [INF] * L
        resume_extra = [0] * L    # ACK-timeout penalty after a lost data frame

        # counters
        delivered_pkts = [0] * L
        delivered_bytes = [0] * L
        frames = [0] * L
        failed = [0] * L
        drops = [0] * L
        accesses = [0] * L
        cw_sum = [0] * L
        busy = [0] * L
        arrivals = [0] * L
        last_delivery = [0] * L
        max_gap = [0] * L
        n_secs = int(self.duration_s) + 2
        per_sec = [[0] * n_secs for _ in range(L)]

        duration = self.duration_slots
        sps = self.slots_per_sec
        tick_t = sps

        for l, mac in enumerate(self.macs):
            mac.on_capacity(capacity[l])

        def draw_backoff(l, cw, now):
            bo = rng.randint(0, cw)
            bo_remaining[l] = bo
            accesses[l] += 1
            cw_sum[l] += cw
            if freeze_refs[l] == 0:
                start = max(now + resume_extra[l], nav_until[l])
                count_from[l] = start + difs + self.macs[l].aifs_extra
                expiry[l] = count_from[l] + bo
                counting[l] = True
            else:
                counting[l] = False
                expiry[l] = INF
            resume_extra[l] = 0

        def freeze(l, now):
            if counting[l]:
                if now >= count_from[l]:
                    bo_remaining[l] = expiry[l] - now
                counting[l] = False
                expiry[l] = INF

        def resume(l, now):
            # channel just cleared for l; restart DIFS gate then keep counting
            start = max(now, nav_until[l])
            count_from[l] = start + difs + self.macs[l].aifs_extra
            expiry[l] = count_from[l] + bo_remaining[l]
            counting[l] = True

        def set_nav(l, until, now):
            if until <= nav_until[l]:
                return
            nav_until[l] = until
            if counting[l]:
                if now >= count_from[l]:
                    bo_remaining[l] = expiry[l] - now
                count_from[l] = until + difs + self.macs[l].aifs_extra
                expiry[l] = count_from[l] + bo_remaining[l]

        def release_wall(l, now):
            # the burst's channel hold ends; wake sensing neighbours
            b = burst[l]
            busy[l] += now - b.info["start"]
            burst[l] = None
            frame_t[l] = INF
            for k in heard_by[l]:
                freeze_refs[k] -= 1
                if freeze_refs[k] == 0 and burst[k] is None and counting[k] is False:
                    resume(k, now)

        def schedule_arrival(l, now):
            mac = self.macs[l]
            rate = mac.arrival_rate_pps()
            if rate <= 0:
                arrive_t[l] = INF
            else:
                arrive_t[l] = now + max(1, round(sps / rate))

        def end_burst(l, now, delivered, failed_burst):
            mac = self.macs[l]
            cw, dropped = mac.end_burst(delivered, failed_burst)
            if dropped:
                drops[l] += 1
            schedule_arrival(l, now)   # queue state changed
            draw_backoff(l, cw, now)

        for l, mac in enumerate(self.macs):
            draw_backoff(l, mac.start(), 0)
            schedule_arrival(l, 0)

        while True:
            t = duration
            m = min(expiry)
            if m < t:
                t = m
            m = min(frame_t)
            if m < t:
                t = m
            m = min(arrive_t)
            if m < t:
                t = m
            if tick_t < t:
                t = tick_t
            if trace_i < len(traces) and traces[trace_i][0] < t:
                t = traces[trace_i][0]
            if t >= duration:
                break

            # 1) frame events (starts, verdicts, wall ends)
            for l in range(L):
                if frame_t[l] != t:
                    continue
                b = burst[l]
                ph = b.phase
                if ph == "dstart":
                    b.hit = False
                    for k in interferers[l]:
                        if burst[k] is not None and (l, k) not in capture:
                            b.hit = True
                            break
                    b.frame_start = t
                    b.phase = "dverdict"
                    frame_t[l] = t + data_slots[l]
                elif ph == "dverdict":
                    frames[l] += 1
                    if b.hit:
                        failed[l] += 1
                        self.macs[l].on_frame_result(False)
                        if log is not None:
                            log.append(f"{t} {l} data_lost {b.delivered}/{b.n_packets}")
                        resume_extra[l] = tm.ack_timeout_slots
                        release_wall(l, t)
                        end_burst(l, t, b.delivered, True)
                    else:
                        self.macs[l].on_frame_result(True)
                        b.delivered += 1
                        delivered_pkts[l] += 1
                        delivered_bytes[l] += tm.packet_bytes
                        sec = t // sps
                        if sec < n_secs:
                            per_sec[l][sec] += tm.packet_bytes
                        gap = t - last_delivery[l]
                        if gap > max_gap[l]:
                            max_gap[l] = gap
                        last_delivery[l] = t
                        if b.delivered >= b.n_packets:
                            b.phase = "end"
                            frame_t[l] = t + sifs + ack
                        else:
                            b.phase = "dstart"
                            frame_t[l] = t + sifs + ack + sifs
                elif ph == "xverdict":
                    frames[l] += 1
                    if b.hit:
                        failed[l] += 1
                        self.macs[l].on_frame_result(False)
                        if log is not None:
                            log.append(f"{t} {l} rts_lost")
                        release_wall(l, t)
                        end_burst(l, t, 0, True)
                    else:
                        self.macs[l].on_frame_result(True)
                        for k in nav_targets[l]:
                            set_nav(k, b.planned_end, t)
                        if log is not None:
                            log.append(f"{t} {l} cts nav={b.planned_end}")
                        b.phase = "dstart"
                        frame_t[l] = t + sifs
                else:  # "end": final ACK received, clean completion
                    if log is not None:
                        log.append(f"{t} {l} done {b.delivered}")
                    release_wall(l, t)
                    end_burst(l, t, b.delivered, False)

            # 2) packet arrivals into the media queue
            for l in range(L):
                if arrive_t[l] == t:
                    self.macs[l].on_arrival()
                    arrivals[l] += 1
                    schedule_arrival(l, t)

            # 3) once-a-second bookkeeping and capacity trace steps
            if tick_t == t:
                for mac in self.macs:
                    mac.on_second()
                tick_t += sps
            while trace_i < len(traces) and traces[trace_i][0] == t:
                _, l, mbps = traces[trace_i]
                capacity[l] = mbps
                data_slots[l] = tm.data_frame_slots(mbps)
                pkt_block[l] = data_slots[l] + sifs + ack
                self.macs[l].on_capacity(mbps)
                if log is not None:
                    log.append(f"{t} {l} capacity {mbps}")
                trace_i += 1

            # 4) contention wins; simultaneous expiries collide on the air.
            # Collect first: a winner freezing its neighbours must not knock
            # out another link whose countdown expired this same slot.
            winners = [l for l in range(L) if expiry[l] == t]
            for l in winners:
                mac = self.macs[l]
                n_pkts, info = mac.plan_burst(capacity[l])
                counting[l] = False
                expiry[l] = INF
                b = _Burst(l, n_pkts, info)
                info["start"] = t
                if self.rts:
                    first_end = t + xchg
                    data_start = first_end + sifs
                    b.phase = "xverdict"
                else:
                    data_start = t
                    b.hit = False
                    b.phase = "dverdict"
                b.planned_end = data_start + n_pkts * pkt_block[l] + (n_pkts - 1) * sifs
                b.frame_start = t
                frame_t[l] = first_end if self.rts else t + data_slots[l]
                # overlap bookkeeping against bursts already on the air
                for k in interferers[l]:
                    if burst[k] is not None and (l, k) not in capture:
                        b.hit = True
                        break
                for k in hit_targets[l]:
                    bk = burst[k]
                    if bk is not None and bk.phase in ("dverdict", "xverdict") \
                            and (k, l) not in capture:
                        bk.hit = True
                burst[l] = b
                for k in heard_by[l]:
                    freeze_refs[k] += 1
                    freeze(k, t)
                if log is not None:
                    log.append(f"{t} {l} tx n={n_pkts} " +
                               " ".join(f"{k}={v}" for k, v in sorted(info.items())
                                        if k != "start"))

        dur_s = self.duration_s
        goodput = [delivered_bytes[l] * 8.0 / dur_s for l in range(L)]
        gap_s = []
        for l in range(L):
            if delivered_pkts[l] >= 1:
                tail = duration - last_delivery[l]
                gap_s.append(max(max_gap[l], tail) * tm.slot_us / 1e6)
            else:
                gap_s.append(dur_s)
        return SimResult(
            duration_s=dur_s, protocol=self.protocol, seed=self.seed, n_links=L,
            delivered_packets=delivered_pkts, delivered_bytes=delivered_bytes,
            goodput_bps=goodput, frames=frames, failed_frames=failed,
            drops=drops, accesses=accesses,
            avg_cw=[cw_sum[l] / accesses[l] if accesses[l] else 0.0 for l in range(L)],
            busy_slots=busy, max_gap_s=gap_s, arrivals=arrivals,
            per_second_bytes=per_sec, rts_used=self.rts, event_log=log)
