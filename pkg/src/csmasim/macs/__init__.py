"""MAC implementations and the protocol-name registry."""

from .base import CW_SET, MacBase, MediaQueue, QueueParams, quantize_cw
from .baselines import DcfMac, DiffqMac, OcsmaCwMac, OcsmaMuMac
from .odcf import OdcfMac

PROTOCOLS = {
    "odcf": OdcfMac,
    "dcf": DcfMac,
    "ocsma_cw": OcsmaCwMac,
    "ocsma_mu": OcsmaMuMac,
    "diffq": DiffqMac,
}

__all__ = ["CW_SET", "MacBase", "MediaQueue", "QueueParams", "quantize_cw",
           "OdcfMac", "DcfMac", "OcsmaCwMac", "OcsmaMuMac", "DiffqMac",
           "PROTOCOLS", "make_macs"]


def make_macs(protocol, topology, timing, queue_params=None, **kwargs):
    """One MAC instance per link of the topology."""
    try:
        cls = PROTOCOLS[protocol]
    except KeyError:
        raise ValueError(f"unknown protocol {protocol!r}; "
                         f"choose from {sorted(PROTOCOLS)}") from None
    return [cls(l, timing, queue_params, **kwargs)
            for l in range(topology.n_links)]
