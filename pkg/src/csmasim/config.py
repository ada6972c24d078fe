"""Scenario configuration: a strict JSON schema resolved into run objects.

Unknown keys are rejected everywhere so a typo fails loudly instead of
silently running defaults. A scenario names a topology (generator call or
explicit relation lists), the protocols to run, and the knobs that vary
between experiments: duration, seeds, RTS override, timing, queue constants,
per-link capacities and capacity traces.
"""

import dataclasses
import json

from .engine import TimingParams
from .macs import PROTOCOLS, QueueParams
from .topology import GENERATORS, Topology

_SCENARIO_KEYS = {"name", "topology", "protocols", "duration_s", "seeds",
                  "draws", "rts", "timing", "queue", "capacity_mbps",
                  "capacity_trace", "collect_events", "notes"}
_TOPOLOGY_KEYS = {"generator", "args", "explicit"}
_EXPLICIT_KEYS = {"n_links", "capacity_mbps", "sense", "interfere", "capture",
                  "symmetric", "roles", "name"}
_SEED_KEYS = {"base", "count"}


class ConfigError(ValueError):
    pass


def _check_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object, got {type(d).__name__}")
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}; "
                          f"allowed: {sorted(allowed)}")


def _pairs(raw, where):
    out = []
    for i, p in enumerate(raw):
        if (not isinstance(p, (list, tuple)) or len(p) != 2
                or not all(isinstance(x, int) for x in p)):
            raise ConfigError(f"{where}[{i}]: expected [int, int], got {p!r}")
        out.append((p[0], p[1]))
    return out


def _build_topology(spec):
    _check_keys(spec, _TOPOLOGY_KEYS, "topology")
    if ("generator" in spec) == ("explicit" in spec):
        raise ConfigError("topology: give exactly one of 'generator' or 'explicit'")
    if "generator" in spec:
        gen = spec["generator"]
        if gen not in GENERATORS:
            raise ConfigError(f"topology.generator: unknown {gen!r}; "
                              f"choose from {sorted(GENERATORS)}")
        args = spec.get("args", {})
        if not isinstance(args, dict):
            raise ConfigError("topology.args: expected an object")
        try:
            return GENERATORS[gen](**args)
        except TypeError as e:
            raise ConfigError(f"topology.args: {e}") from None
    ex = spec["explicit"]
    _check_keys(ex, _EXPLICIT_KEYS, "topology.explicit")
    for key in ("n_links",):
        if key not in ex:
            raise ConfigError(f"topology.explicit: missing {key!r}")
    n = ex["n_links"]
    cap = ex.get("capacity_mbps", 6.0)
    if isinstance(cap, (int, float)):
        cap = (float(cap),) * n
    else:
        cap = tuple(float(c) for c in cap)
    sense = _pairs(ex.get("sense", []), "topology.explicit.sense")
    interfere = _pairs(ex.get("interfere", []), "topology.explicit.interfere")
    capture = _pairs(ex.get("capture", []), "topology.explicit.capture")
    if ex.get("symmetric", False):
        sense += [(b, a) for a, b in sense]
        interfere += [(b, a) for a, b in interfere]
    roles = ex.get("roles", {})
    if not isinstance(roles, dict):
        raise ConfigError("topology.explicit.roles: expected an object")
    return Topology(n, cap, frozenset(sense), frozenset(interfere),
                    frozenset(capture), roles=dict(roles),
                    name=ex.get("name", "explicit")).validate()


def _resolve_seeds(raw):
    if raw is None:
        return [1, 2, 3]
    if isinstance(raw, list):
        if not raw or not all(isinstance(s, int) for s in raw):
            raise ConfigError("seeds: expected a non-empty list of ints")
        return list(raw)
    _check_keys(raw, _SEED_KEYS, "seeds")
    base = raw.get("base", 1)
    count = raw.get("count", 1)
    if not (isinstance(base, int) and isinstance(count, int) and count >= 1):
        raise ConfigError("seeds: base must be int, count a positive int")
    return [base + i for i in range(count)]


def _replace_from(defaults, overrides, where):
    allowed = {f.name for f in dataclasses.fields(defaults)}
    _check_keys(overrides, allowed, where)
    try:
        return dataclasses.replace(defaults, **overrides)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{where}: {e}") from None


@dataclasses.dataclass
class Scenario:
    """A fully resolved experiment description."""

    name: str
    topology: Topology
    protocols: list
    duration_s: float = 100.0
    seeds: list = dataclasses.field(default_factory=lambda: [1, 2, 3])
    draws: int = 1              # topology redraws for seeded generators
    rts: bool | None = None     # None = auto from hidden conflicts
    timing: TimingParams = dataclasses.field(default_factory=TimingParams)
    queue: QueueParams = dataclasses.field(default_factory=QueueParams)
    capacity_trace: dict = dataclasses.field(default_factory=dict)
    collect_events: bool = False
    topology_spec: dict | None = None   # kept for redraws

    def redraw_topology(self, draw):
        """Topology for the given draw index; draw 0 is the base one."""
        if draw == 0 or self.topology_spec is None:
            return self.topology
        spec = json.loads(json.dumps(self.topology_spec))
        if "generator" not in spec:
            raise ConfigError(f"{self.name}: draws > 1 needs a generator topology")
        args = spec.setdefault("args", {})
        args["seed"] = args.get("seed", 0) + draw
        return _build_topology(spec)


def scenario_from_dict(d):
    _check_keys(d, _SCENARIO_KEYS, "scenario")
    for key in ("name", "topology"):
        if key not in d:
            raise ConfigError(f"scenario: missing {key!r}")
    topo = _build_topology(d["topology"])

    protocols = d.get("protocols", ["odcf"])
    if isinstance(protocols, str):
        protocols = [protocols]
    for p in protocols:
        if p not in PROTOCOLS:
            raise ConfigError(f"protocols: unknown {p!r}; "
                              f"choose from {sorted(PROTOCOLS)}")

    duration = d.get("duration_s", 100.0)
    if not isinstance(duration, (int, float)) or duration <= 0:
        raise ConfigError("duration_s: expected a positive number")

    draws = d.get("draws", 1)
    if not isinstance(draws, int) or draws < 1:
        raise ConfigError("draws: expected a positive int")
    if draws > 1 and "generator" not in d["topology"]:
        raise ConfigError("draws > 1 requires a generator topology")

    rts = d.get("rts")
    if rts is not None and not isinstance(rts, bool):
        raise ConfigError("rts: expected true, false, or omitted")

    timing = _replace_from(TimingParams(), d.get("timing", {}), "timing")
    queue = _replace_from(QueueParams(), d.get("queue", {}), "queue")

    if "capacity_mbps" in d:
        cap = d["capacity_mbps"]
        if isinstance(cap, (int, float)):
            cap = (float(cap),) * topo.n_links
        elif isinstance(cap, list) and len(cap) == topo.n_links:
            cap = tuple(float(c) for c in cap)
        else:
            raise ConfigError("capacity_mbps: scalar or one value per link")
        topo = dataclasses.replace(topo, capacity_mbps=cap)

    trace = {}
    raw_trace = d.get("capacity_trace", {})
    if not isinstance(raw_trace, dict):
        raise ConfigError("capacity_trace: expected {link: [[t_s, mbps], ...]}")
    for key, points in raw_trace.items():
        try:
            link = int(key)
        except (TypeError, ValueError):
            raise ConfigError(f"capacity_trace: bad link key {key!r}") from None
        if not 0 <= link < topo.n_links:
            raise ConfigError(f"capacity_trace: link {link} out of range")
        steps = []
        for i, pt in enumerate(points):
            if (not isinstance(pt, (list, tuple)) or len(pt) != 2
                    or not all(isinstance(x, (int, float)) for x in pt)):
                raise ConfigError(f"capacity_trace[{key}][{i}]: expected [t_s, mbps]")
            steps.append((float(pt[0]), float(pt[1])))
        trace[link] = steps

    collect = d.get("collect_events", False)
    if not isinstance(collect, bool):
        raise ConfigError("collect_events: expected a bool")

    return Scenario(name=d["name"], topology=topo, protocols=list(protocols),
                    duration_s=float(duration), seeds=_resolve_seeds(d.get("seeds")),
                    draws=draws, rts=rts, timing=timing, queue=queue,
                    capacity_trace=trace, collect_events=collect,
                    topology_spec=d["topology"])


def scenario_from_file(path):
    with open(path) as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None
    return scenario_from_dict(raw)
