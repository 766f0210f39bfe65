from enum import Enum
from typing import Dict, Optional

from .nodes import NodeKind


class LinkType(str, Enum):
    SAT_SAT = "SatSat"
    SAT_AIR = "SatAir"
    SAT_GW = "SatGw"
    AIR_AIR = "AirAir"
    AIR_GW = "AirGw"

    @property
    def capacity(self) -> float:
        """Link capacity [bit/s]."""
        return LINK_CAPACITY[self]


LINK_CAPACITY: Dict[LinkType, float] = {
    LinkType.SAT_SAT: 125e6,
    LinkType.SAT_AIR: 112e6,
    LinkType.SAT_GW: 500e6,
    LinkType.AIR_AIR: 45e6,
    LinkType.AIR_GW: 75e6,     # DA2G
}

_PAIRS = {
    frozenset([NodeKind.SATELLITE]): LinkType.SAT_SAT,
    frozenset([NodeKind.SATELLITE, NodeKind.AIRCRAFT]): LinkType.SAT_AIR,
    frozenset([NodeKind.SATELLITE, NodeKind.GATEWAY]): LinkType.SAT_GW,
    frozenset([NodeKind.AIRCRAFT]): LinkType.AIR_AIR,
    frozenset([NodeKind.AIRCRAFT, NodeKind.GATEWAY]): LinkType.AIR_GW,
}


class LinkClassifier:
    @staticmethod
    def identify(a: NodeKind, b: NodeKind) -> Optional[LinkType]:
        """Link type joining two node kinds; None for gateway-gateway (no terrestrial backhaul)."""
        return _PAIRS.get(frozenset([NodeKind(a), NodeKind(b)]))
