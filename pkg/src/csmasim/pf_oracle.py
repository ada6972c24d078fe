"""Proportional-fairness benchmark and the fairness metrics used to score runs.

The schedulable region of a conflict graph is the convex hull of its
independent sets: any long-run airtime-share vector is a time mixture of
sets of links that can transmit together. The oracle maximizes the sum of
log shares over that hull, which is capacity-independent (capacities only
shift each log by a constant), then converts shares to rates at either the
raw link capacity or an overhead-discounted effective rate.

The optimum is verified by the first-order certificate: for every
independent set S, sum over l in S of share_opt[l]^-1 must not exceed the
number of links (with equality on the sets the optimum actually uses).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

MAX_LINKS = 25
MAX_SETS = 2_000_000


def enumerate_independent_sets(topology):
    """Every independent set of the symmetric conflict graph, empty set included.

    Exponential in the worst case, so refuses graphs beyond MAX_LINKS and
    bails out if the count explodes anyway (near-empty conflict graphs).
    """
    n = topology.n_links
    if n > MAX_LINKS:
        raise ValueError(f"refusing to enumerate independent sets for {n} links "
                         f"(limit {MAX_LINKS})")
    conflict = [0] * n
    for a, b in topology.conflict_pairs():
        conflict[a] |= 1 << b
        conflict[b] |= 1 << a
    sets = []

    def extend(members, lowest, blocked):
        if len(sets) > MAX_SETS:
            raise ValueError("independent-set count exceeds the enumeration cap")
        sets.append(members)
        for l in range(lowest, n):
            if not blocked & (1 << l):
                extend(members + (l,), l + 1, blocked | conflict[l] | (1 << l))

    extend((), 0, 0)
    return sets


def maximal_independent_sets(topology):
    """Independent sets that cannot be extended; the hull's useful vertices."""
    all_sets = enumerate_independent_sets(topology)
    as_masks = []
    for s in all_sets:
        m = 0
        for l in s:
            m |= 1 << l
        as_masks.append(m)
    mask_set = set(as_masks)
    out = []
    for s, m in zip(all_sets, as_masks):
        if any((m | (1 << l)) in mask_set and not (m & (1 << l))
               for l in range(topology.n_links)):
            continue
        out.append(s)
    return out


def overhead_discount(timing, capacity_mbps, rts):
    """Fraction of airtime carrying payload for one packet per access cycle.

    Cycle = DIFS + (RTS/CTS exchange + SIFS if used) + data frame + SIFS +
    ACK, with zero contention backoff. Conservative for senders that batch
    several packets per access.
    """
    cycle = (timing.difs_slots + timing.data_frame_slots(capacity_mbps)
             + timing.sifs_slots + timing.ack_slots)
    if rts:
        cycle += timing.exchange_slots() + timing.sifs_slots
    return timing.payload_slots(capacity_mbps) / cycle


@dataclass
class PfSolution:
    """Optimal airtime shares and the rates they imply."""

    shares: list            # per-link airtime share at the PF optimum
    sets: list              # maximal independent sets (tuples of link ids)
    weights: list           # time fraction given to each set
    rate_bps: list          # shares x raw capacity
    discounted_bps: list    # shares x overhead-discounted capacity
    certificate_gap: float  # max_S sum(1/share) - n_links; <= 0 at optimum
    utility: float          # sum of log shares

    def summary(self):
        lines = []
        for l, (s, r, d) in enumerate(zip(self.shares, self.rate_bps,
                                          self.discounted_bps)):
            lines.append(f"link {l}: share={s:.4f} raw={r / 1e3:.0f} kb/s "
                         f"discounted={d / 1e3:.0f} kb/s")
        lines.append(f"certificate gap: {self.certificate_gap:.2e}")
        return "\n".join(lines)


def solve_pf(topology, timing=None, rts=None, tol=1e-9):
    """Max sum-log airtime shares over the topology's schedulable region."""
    from .engine import TimingParams
    timing = timing or TimingParams()
    if rts is None:
        rts = topology.has_hidden_conflict()
    n = topology.n_links
    sets = maximal_independent_sets(topology)
    if not sets or all(len(s) == 0 for s in sets):
        raise ValueError("topology admits no transmissions")
    a = np.zeros((n, len(sets)))
    for j, s in enumerate(sets):
        for l in s:
            a[l, j] = 1.0

    def neg_util(theta):
        x = a @ theta
        if np.any(x <= 0):
            return 1e18
        return -np.log(x).sum()

    def grad(theta):
        x = a @ theta
        return -(a.T @ (1.0 / np.maximum(x, 1e-300)))

    theta0 = np.full(len(sets), 1.0 / len(sets))
    res = minimize(neg_util, theta0, jac=grad, method="SLSQP",
                   bounds=[(0.0, 1.0)] * len(sets),
                   constraints=[{"type": "eq",
                                 "fun": lambda th: th.sum() - 1.0,
                                 "jac": lambda th: np.ones_like(th)}],
                   options={"maxiter": 500, "ftol": 1e-14})
    theta = np.clip(res.x, 0.0, None)
    theta /= theta.sum()
    shares = a @ theta

    inv = 1.0 / shares
    gap = max(inv[list(s)].sum() for s in sets if s) - n

    rate, disc = [], []
    for l in range(n):
        c = topology.capacity_mbps[l]
        rate.append(shares[l] * c * 1e6)
        disc.append(shares[l] * c * 1e6 * overhead_discount(timing, c, rts))
    return PfSolution(shares=[float(s) for s in shares], sets=sets,
                      weights=[float(t) for t in theta],
                      rate_bps=rate, discounted_bps=disc,
                      certificate_gap=float(gap),
                      utility=float(np.log(shares).sum()))


# -- scoring -------------------------------------------------------------


def jain_index(rates):
    """(sum r)^2 / (n sum r^2); 1.0 means perfectly even."""
    rates = list(rates)
    total = sum(rates)
    sq = sum(r * r for r in rates)
    if sq == 0:
        return 0.0
    return total * total / (len(rates) * sq)


def sum_log_utility(rates, floor_bps=1.0):
    """Sum of log rates; rates below the floor are clamped so starvation
    shows up as a large negative number instead of -inf."""
    return sum(math.log(max(r, floor_bps)) for r in rates)


def ratios_to_optimal(rates_bps, pf_bps):
    return [r / p if p > 0 else 0.0 for r, p in zip(rates_bps, pf_bps)]


def short_term_fairness(result):
    """Inverse of the worst per-link delivery gap, 1/s. Higher is smoother."""
    worst = max(result.max_gap_s)
    return 1.0 / worst if worst > 0 else float("inf")


def score(result, pf):
    """Standard metric row for one simulation result against a PF solution."""
    return {
        "goodput_kbps": [round(g / 1e3, 1) for g in result.goodput_bps],
        "total_kbps": round(sum(result.goodput_bps) / 1e3, 1),
        "jain": round(jain_index(result.goodput_bps), 4),
        "sum_log": round(sum_log_utility(result.goodput_bps), 3),
        "ratio_to_pf": [round(r, 4) for r in
                        ratios_to_optimal(result.goodput_bps, pf.discounted_bps)],
        "short_term_fairness": round(short_term_fairness(result), 4),
    }
