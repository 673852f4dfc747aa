"""Link metric policies and the on-demand route establishment state machine.

Route discovery floods route requests with per-link cost accumulation. A node
re-forwards a duplicate request only when the accumulated (metric, hop count,
trace) key improves on the best copy it already forwarded, which makes the
flood converge to the minimum-cost route under the same tie-break the oracle
uses: smaller metric, then fewer hops, then lexicographically smallest node
sequence. The destination answers the best request with a route reply that
installs forward-path entries while it travels the reverse path.

Link costs come from the transmitter's information table: a weighted sum of
the interference the transmitter would create elsewhere if it picked this
candidate as relay and the interference the candidate itself receives. The
weight is the cooperation parameter; 0 reduces to received interference only
(the IAEE baseline) and MHC replaces the whole expression with a unit cost.
"""

import heapq
import math
from dataclasses import dataclass, field, replace

from .info_table import InformationTable

IACR = "IACR"
MHC = "MHC"
IAEE = "IAEE"
PROTOCOLS = (IACR, MHC, IAEE)

INFEASIBLE = math.inf


@dataclass(frozen=True)
class MetricPolicy:
    kind: str
    delta: float | None = None

    def __post_init__(self):
        if self.kind not in PROTOCOLS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == IACR:
            if self.delta is None or not 0.0 <= self.delta <= 1.0:
                raise ValueError("IACR requires a cooperation weight in [0, 1]")
        elif self.delta is not None:
            raise ValueError(f"{self.kind} does not take a cooperation weight")


@dataclass(frozen=True)
class RouteRequest:
    source: int
    destination: int
    transmitter: int
    accumulated_metric: float
    sequence: int
    hop_count: int
    trace: tuple[int, ...]
    next_hop_hint: int = -1


@dataclass(frozen=True)
class RouteReply:
    source: int
    destination: int
    transmitter: int
    next_hop: int
    route_metric: float
    sequence: int
    hop_count: int = 0


@dataclass
class RoutingTableEntry:
    destination: int
    next_hop: int
    metric: float
    sequence: int
    hop_count: int
    established_at: float
    last_used: float = 0.0


@dataclass
class DiscoveryState:
    """Per-node reverse-path memory for one discovery flood."""

    best_key: tuple = ()
    reverse_hop: int = -1


def link_metric(policy: MetricPolicy, transmitter: int, candidate: int,
                table: InformationTable, now: float = 0.0,
                ignore_outage_flag: bool = False) -> float:
    """Cost of the link transmitter -> candidate under the given policy.

    Stale or missing table rows exclude the candidate (infinite cost); MHC
    needs no table at all. The adaptive protocol additionally skips
    candidates that currently report themselves in outage, which is what
    re-establishes routes away from interference hot spots.
    """
    if policy.kind == MHC:
        return 1.0
    row = table.fresh_row(candidate, now)
    if row is None:
        return INFEASIBLE
    if policy.kind == IAEE:
        return row.received_at_neighbor
    if row.outage_until > now and not ignore_outage_flag:
        return INFEASIBLE
    d = policy.delta
    return d * row.aggregate_created + (1.0 - d) * row.received_at_neighbor


def accumulate(m_rreq: float, m_link: float) -> float:
    """Route cost prefix plus one link cost."""
    return m_rreq + m_link


def initial_rreq(source: int, destination: int, sequence: int) -> RouteRequest:
    return RouteRequest(source, destination, source, 0.0, sequence, 0, (source,))


def handle_rreq(node: int, rreq: RouteRequest, tx_table: InformationTable,
                policy: MetricPolicy, states: dict, now: float = 0.0):
    """Process one received route request.

    `tx_table` is the information table of the node the request arrived from
    (the transmitter of this copy); `states` maps (source, sequence) to this
    node's DiscoveryState and is mutated in place.

    Returns ("drop", reason), ("rrep_candidate", key) at the destination, or
    ("forward", new_rreq) at a relay.
    """
    if node in rreq.trace:
        return ("drop", "loop")
    cost = link_metric(policy, rreq.transmitter, node, tx_table, now,
                       ignore_outage_flag=(node == rreq.destination))
    if cost == INFEASIBLE:
        return ("drop", "stale-link")
    metric = accumulate(rreq.accumulated_metric, cost)
    key = (metric, rreq.hop_count + 1, rreq.trace + (node,))
    state = states.get((rreq.source, rreq.sequence))
    if state is not None and state.best_key <= key:
        return ("drop", "duplicate")
    if state is None:
        state = DiscoveryState()
        states[(rreq.source, rreq.sequence)] = state
    state.best_key = key
    state.reverse_hop = rreq.transmitter
    if node == rreq.destination:
        return ("rrep_candidate", key)
    forwarded = RouteRequest(rreq.source, rreq.destination, node, metric,
                             rreq.sequence, rreq.hop_count + 1, key[2])
    return ("forward", forwarded)


def build_rrep(destination: int, source: int, sequence: int, key: tuple,
               reverse_hop: int) -> RouteReply:
    """Route reply for the best request key collected at the destination."""
    metric, _hops, _trace = key
    return RouteReply(source=source, destination=destination,
                      transmitter=destination, next_hop=reverse_hop,
                      route_metric=metric, sequence=sequence, hop_count=0)


def handle_rrep(node: int, rrep: RouteReply, states: dict,
                routing_table: dict, now: float = 0.0):
    """Process one received route reply.

    Installs the forward-path entry (next hop = the reply's transmitter) and
    either finishes at the source ("established", entry) or relays the reply
    one hop further down the reverse path ("forward", new_rrep). A reply for
    an unknown discovery is dropped and counted by the caller.
    """
    if node != rrep.source:
        state = states.get((rrep.source, rrep.sequence))
        if state is None:
            return ("drop", "no-reverse-path")
    entry = RoutingTableEntry(
        destination=rrep.destination, next_hop=rrep.transmitter,
        metric=rrep.route_metric, sequence=rrep.sequence,
        hop_count=rrep.hop_count + 1, established_at=now, last_used=now)
    routing_table[rrep.destination] = entry
    if node == rrep.source:
        return ("established", entry)
    forwarded = replace(rrep, transmitter=node, next_hop=state.reverse_hop,
                        hop_count=rrep.hop_count + 1)
    return ("forward", forwarded)


# ---------------------------------------------------------------------------
# reference oracle

def _edge_cost(policy, tables, u, v, now):
    return link_metric(policy, u, v, tables[u], now)


def _exhaustive_best(adjacency, tables, policy, source, destination, now,
                     bound=None):
    best = bound

    def visit(node, cost, trace):
        nonlocal best
        if best is not None and cost > best[0]:
            return
        if node == destination:
            key = (cost, len(trace) - 1, trace)
            if best is None or key < best:
                best = key
            return
        for nxt in adjacency[node]:
            if nxt in trace:
                continue
            w = _edge_cost(policy, tables, node, nxt, now)
            if w == INFEASIBLE:
                continue
            visit(nxt, cost + w, trace + (nxt,))

    visit(source, 0.0, (source,))
    return best


def _dijkstra_best(adjacency, tables, policy, source, destination, now):
    best: dict[int, tuple] = {}
    heap = [(0.0, 0, (source,))]
    while heap:
        cost, hops, trace = heapq.heappop(heap)
        node = trace[-1]
        key = (cost, hops, trace)
        if node in best and best[node] <= key:
            continue
        best[node] = key
        if node == destination:
            return key
        for nxt in adjacency[node]:
            if nxt in trace:
                continue
            w = _edge_cost(policy, tables, node, nxt, now)
            if w == INFEASIBLE:
                continue
            heapq.heappush(heap, (cost + w, hops + 1, trace + (nxt,)))
    return None


def oracle_best_route(adjacency, tables, policy: MetricPolicy, source: int,
                      destination: int, now: float = 0.0):
    """Minimum-cost route under non-negative additive link costs.

    Exhaustive search with cost pruning for small networks, classical
    shortest-path search beyond that; ties broken by (fewer hops, then
    lexicographically smallest node sequence). Returns (path, cost) or None
    for a disconnected pair.
    """
    if source == destination:
        return (source,), 0.0
    n = len(adjacency)
    key = _dijkstra_best(adjacency, tables, policy, source, destination, now)
    if n <= 12:
        # enumeration double-checks (and can only match or beat) the
        # shortest-path answer, which seeds the pruning bound
        key = _exhaustive_best(adjacency, tables, policy, source, destination,
                               now, bound=key)
    if key is None:
        return None
    cost, _hops, trace = key
    return trace, cost
