"""Link-level network topologies described by sensing / interference relations.

A topology is a set of single-hop links (transmitter -> receiver pairs).
Instead of modelling radio propagation, we keep three explicit relations:

* sense(a, b):     the transmitter of link a can carrier-sense an ongoing
                   transmission on link b.
* interfere(a, b): a transmission on link a corrupts a concurrent reception
                   on link b (i.e. a's transmitter is in range of b's receiver).
* capture(a, b):   link a's frames survive an overlap with link b at a's
                   receiver (a dominates b).

Both sense and interfere are directed; generators for symmetric cases add both
directions. Geometric generators (grid / random) derive the relations from
node positions and a fixed radio range.
"""

import math
import random
from dataclasses import dataclass, field


@dataclass
class Topology:
    """A fixed set of links plus their pairwise conflict relations."""

    n_links: int
    capacity_mbps: tuple
    sense: frozenset        # directed (a, b) pairs
    interfere: frozenset    # directed (a, b) pairs
    capture: frozenset = frozenset()   # (winner, loser) pairs, winner survives
    roles: dict = field(default_factory=dict)   # label -> link id(s), generator hints
    positions: tuple = ()   # node coordinates for geometric topologies
    flows: tuple = ()       # (tx_node, rx_node) per link for geometric topologies
    name: str = ""

    def links(self):
        return range(self.n_links)

    def senses(self, a, b):
        return (a, b) in self.sense

    def interferes(self, a, b):
        return (a, b) in self.interfere

    def conflict_pairs(self):
        """Symmetric closure of sense | interfere, as unordered id pairs."""
        pairs = set()
        for a, b in self.sense | self.interfere:
            pairs.add((min(a, b), max(a, b)))
        return pairs

    def has_hidden_conflict(self):
        """True if some interfering pair lacks mutual carrier sensing."""
        for a, b in self.interfere:
            if (a, b) not in self.sense or (b, a) not in self.sense:
                return True
        return False

    def validate(self):
        ids = set(self.links())
        if self.n_links < 1:
            raise ValueError("topology needs at least one link")
        if len(self.capacity_mbps) != self.n_links:
            raise ValueError("capacity list length != number of links")
        if any(c <= 0 for c in self.capacity_mbps):
            raise ValueError("link capacities must be positive")
        for name, rel in (("sense", self.sense), ("interfere", self.interfere),
                          ("capture", self.capture)):
            for a, b in rel:
                if a not in ids or b not in ids:
                    raise ValueError(f"{name} pair ({a},{b}) references unknown link")
                if a == b:
                    raise ValueError(f"{name} relation must be irreflexive")
        for a, b in self.capture:
            # capture is only meaningful where the loser actually interferes
            if (b, a) not in self.interfere:
                raise ValueError(f"capture pair ({a},{b}) without interference {b}->{a}")
            if (b, a) in self.capture:
                raise ValueError(f"capture must be antisymmetric, got both ({a},{b}) and ({b},{a})")
        return self


def _sym(pairs):
    out = set()
    for a, b in pairs:
        out.add((a, b))
        out.add((b, a))
    return out


def _full_conflict(pairs):
    """Sense and interfere both ways for every listed pair."""
    s = _sym(pairs)
    return frozenset(s), frozenset(s)


def make_fc(n, capacity_mbps=6.0):
    """Fully connected contention: every link senses and interferes with every other."""
    if n < 1:
        raise ValueError("fc needs n >= 1")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    sense, interfere = _full_conflict(pairs)
    return Topology(n, (float(capacity_mbps),) * n, sense, interfere,
                    name=f"fc{n}").validate()


def make_fim(n_outer, capacity_mbps=6.0):
    """Flow-in-the-middle: one central link conflicting with n independent outer links.

    Link ids: 0 is an outer link, 1 is the center, 2.. are the remaining outer
    links, so for n_outer=2 the per-link vectors read (outer, center, outer).
    """
    if n_outer < 2:
        raise ValueError("fim needs at least 2 outer links")
    center = 1
    outers = [0] + list(range(2, n_outer + 1))
    pairs = [(center, o) for o in outers]
    sense, interfere = _full_conflict(pairs)
    n = n_outer + 1
    return Topology(n, (float(capacity_mbps),) * n, sense, interfere,
                    roles={"center": center, "outer": tuple(outers)},
                    name=f"fim{n_outer}").validate()


def make_ht(capacity_mbps=6.0):
    """Hidden terminals: two links that interfere mutually but cannot sense each other."""
    interfere = frozenset(_sym([(0, 1)]))
    return Topology(2, (float(capacity_mbps),) * 2, frozenset(), interfere,
                    name="ht").validate()


def make_ia(capacity_mbps=6.0):
    """Information asymmetry: link 0 corrupts link 1's reception but not vice versa."""
    interfere = frozenset({(0, 1)})
    return Topology(2, (float(capacity_mbps),) * 2, frozenset(), interfere,
                    roles={"advantaged": 0, "disadvantaged": 1},
                    name="ia").validate()


def make_ht_capture(capacity_mbps=6.0):
    """Hidden terminals where link 0's frames survive any overlap with link 1."""
    interfere = frozenset(_sym([(0, 1)]))
    capture = frozenset({(0, 1)})
    return Topology(2, (float(capacity_mbps),) * 2, frozenset(), interfere, capture,
                    roles={"strong": 0, "weak": 1},
                    name="ht_capture").validate()


def make_mixed_fim_fc(capacity_mbps=6.0):
    """Nine links: ids 0-5 fully connected, ids 6-8 are independent arms on id 5.

    Link 5 sits in both groups (contention degree 8); the arms do not conflict
    with each other or with links 0-4.
    """
    pairs = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    pairs += [(5, o) for o in (6, 7, 8)]
    sense, interfere = _full_conflict(pairs)
    return Topology(9, (float(capacity_mbps),) * 9, sense, interfere,
                    roles={"center": 5, "outer": (6, 7, 8), "clique": tuple(range(6))},
                    name="mixed_fim_fc").validate()


def make_fc_in_fim(capacity_mbps=6.0):
    """Ten links: a fully connected group (ids 0-5) acting as the middle of a
    star whose four outer links (ids 6-9) each conflict with the whole group
    but not with each other."""
    pairs = [(i, j) for i in range(6) for j in range(i + 1, 6)]
    pairs += [(i, o) for i in range(6) for o in (6, 7, 8, 9)]
    sense, interfere = _full_conflict(pairs)
    return Topology(10, (float(capacity_mbps),) * 10, sense, interfere,
                    roles={"clique": tuple(range(6)), "outer": (6, 7, 8, 9)},
                    name="fc_in_fim").validate()


def _geometric_relations(positions, flows, range_m):
    """Sense/interfere from node coordinates: disk model with one shared range."""
    def dist(i, j):
        (x1, y1), (x2, y2) = positions[i], positions[j]
        return math.hypot(x1 - x2, y1 - y2)

    n = len(flows)
    sense = set()
    interfere = set()
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            tx_a, _ = flows[a]
            tx_b, rx_b = flows[b]
            if dist(tx_a, tx_b) <= range_m:
                sense.add((a, b))
            if dist(tx_a, rx_b) <= range_m:
                interfere.add((a, b))
    return frozenset(sense), frozenset(interfere)


def _draw_flows(positions, n_flows, range_m, rng):
    """Random single-hop flows: a sender plus one neighbour within radio range."""
    n_nodes = len(positions)

    def neighbours(i):
        out = []
        for j in range(n_nodes):
            if j != i and math.hypot(positions[i][0] - positions[j][0],
                                     positions[i][1] - positions[j][1]) <= range_m:
                out.append(j)
        return out

    eligible = [i for i in range(n_nodes) if neighbours(i)]
    if not eligible:
        raise ValueError("no node has a neighbour within range; cannot place flows")
    flows = []
    seen = set()
    attempts = 0
    while len(flows) < n_flows:
        attempts += 1
        if attempts > 10000:
            raise ValueError("could not draw enough distinct flows")
        tx = rng.choice(eligible)
        rx = rng.choice(neighbours(tx))
        if (tx, rx) in seen:
            continue
        seen.add((tx, rx))
        flows.append((tx, rx))
    return tuple(flows)


def make_grid(side=4, spacing_m=250.0, range_m=280.0, n_flows=6, seed=0,
              capacity_mbps=6.0):
    """Square grid of nodes with random single-hop flows.

    With 250 m spacing and 280 m range only orthogonal neighbours are in
    range (the diagonal is ~354 m), so the conflict graph is sparse.
    """
    positions = tuple((i * spacing_m, j * spacing_m)
                      for i in range(side) for j in range(side))
    rng = random.Random(seed)
    flows = _draw_flows(positions, n_flows, range_m, rng)
    sense, interfere = _geometric_relations(positions, flows, range_m)
    return Topology(n_flows, (float(capacity_mbps),) * n_flows, sense, interfere,
                    positions=positions, flows=flows,
                    name=f"grid{side}x{side}_s{seed}").validate()


def make_random(n_nodes=30, area_m=1000.0, range_m=280.0, n_flows=12, seed=0,
                capacity_mbps=6.0):
    """Uniform random node placement in a square area with random single-hop flows."""
    rng = random.Random(seed)
    positions = tuple((rng.uniform(0, area_m), rng.uniform(0, area_m))
                      for _ in range(n_nodes))
    flows = _draw_flows(positions, n_flows, range_m, rng)
    sense, interfere = _geometric_relations(positions, flows, range_m)
    return Topology(n_flows, (float(capacity_mbps),) * n_flows, sense, interfere,
                    positions=positions, flows=flows,
                    name=f"random{n_nodes}_s{seed}").validate()


GENERATORS = {
    "fc": make_fc,
    "fim": make_fim,
    "ht": make_ht,
    "ia": make_ia,
    "ht_capture": make_ht_capture,
    "mixed_fim_fc": make_mixed_fim_fc,
    "fc_in_fim": make_fc_in_fim,
    "grid": make_grid,
    "random": make_random,
}
