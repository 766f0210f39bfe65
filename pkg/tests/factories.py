"""Hand-built problem instances shared by the optimizer tests."""

from aamecSim.network.classifier import LinkClassifier
from aamecSim.network.nodes import NodeKind
from aamecSim.optimizer.problem import Arc, Commodity, ProblemInstance, UseCase


def commodity(cid, source, candidates, demand=1e6, packet_size=1e4, delay_bound=1.0, compute=(), label="test"):
    return Commodity(
        id=cid,
        source=source,
        demand=demand,
        packet_size=packet_size,
        delay_bound=delay_bound,
        label=label,
        candidates=tuple(candidates),
        compute=tuple(sorted(compute)),
    )


def make_problem(nodes, links, commodities, use_case=UseCase.AIRBORNE, mec=None, instance_id="test"):
    """
    nodes: {id: "satellite" | "aircraft" | "gateway"}
    links: [(a, b, distance, capacity)], one arc per direction
    mec: defaults to every candidate destination
    """
    arcs = []
    for a, b, distance, capacity in links:
        link_type = LinkClassifier.identify(NodeKind(nodes[a]), NodeKind(nodes[b]))
        name = link_type.value if link_type is not None else "Custom"
        arcs.append(Arc(a, b, name, float(distance), float(capacity)))
        arcs.append(Arc(b, a, name, float(distance), float(capacity)))
    arcs.sort(key=lambda arc: arc.key)
    if mec is None:
        mec = {d for k in commodities for d in k.candidates}
    return ProblemInstance(
        instance_id=instance_id,
        use_case=use_case,
        snapshot_index=0,
        time=0.0,
        node_kinds=tuple(sorted(nodes.items())),
        mec_nodes=tuple(sorted(mec)),
        arcs=tuple(arcs),
        commodities=tuple(commodities),
    )


def detour_problem(delay_bound):
    """
    AIR-000 -> AIR-001 either direct (3000 km, 100 Mbit/s) or through
    AIR-002 over two 100 km hops at 2 Mbit/s: the detour is cheaper in
    latency but its packet delay is about 1 s.
    """
    nodes = {"AIR-000": "aircraft", "AIR-001": "aircraft", "AIR-002": "aircraft"}
    links = [
        ("AIR-000", "AIR-001", 3000e3, 100e6),
        ("AIR-000", "AIR-002", 100e3, 2e6),
        ("AIR-002", "AIR-001", 100e3, 2e6),
    ]
    flow = commodity("AIR-000/test", "AIR-000", ["AIR-001"], demand=1e4, packet_size=1e6,
                     delay_bound=delay_bound)
    return make_problem(nodes, links, [flow])


def shared_link_problem():
    """
    Two 30 Mbit/s flows AIR-000 -> AIR-002; the direct 45 Mbit/s link carries
    only one of them, the other detours through SAT-00-00.
    """
    nodes = {"AIR-000": "aircraft", "AIR-002": "aircraft", "SAT-00-00": "satellite"}
    links = [
        ("AIR-000", "AIR-002", 300e3, 45e6),
        ("AIR-000", "SAT-00-00", 1000e3, 60e6),
        ("SAT-00-00", "AIR-002", 1000e3, 60e6),
    ]
    flows = [
        commodity(f"AIR-000/{name}", "AIR-000", ["AIR-002"], demand=30e6, packet_size=192)
        for name in ("a", "b")
    ]
    return make_problem(nodes, links, flows)


def gateway_problem():
    """
    Two offloading satellites, one gateway: only one of them may feed it,
    the other relays over the ISL.
    """
    nodes = {"SAT-00-00": "satellite", "SAT-00-01": "satellite", "GW-Rome": "gateway"}
    links = [
        ("SAT-00-00", "GW-Rome", 1000e3, 500e6),
        ("SAT-00-01", "GW-Rome", 1500e3, 500e6),
        ("SAT-00-00", "SAT-00-01", 3000e3, 125e6),
    ]
    loads = [
        commodity(f"{sat}/offload", sat, ["GW-Rome"], demand=32e6, packet_size=32e6,
                  compute=[("GW-Rome", 7.0304e-3)])
        for sat in ("SAT-00-00", "SAT-00-01")
    ]
    return make_problem(nodes, links, loads, use_case=UseCase.OFFLOAD)
