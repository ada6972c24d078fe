"""csmasim: mini-slot CSMA network simulator over explicit conflict graphs."""

from .engine import Engine, SimResult, TimingParams, arbitrate
from .macs import PROTOCOLS, QueueParams, make_macs
from .topology import GENERATORS, Topology

__version__ = "0.1.0"

__all__ = ["Engine", "SimResult", "TimingParams", "arbitrate",
           "PROTOCOLS", "QueueParams", "make_macs",
           "GENERATORS", "Topology", "__version__"]
