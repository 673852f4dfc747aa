"""Per-node interference information tables and the ICP request/reply handshake.

Each node learns, for every neighbor j: the interference it creates at j
(transmit power over d^alpha), the interference j itself receives, and the
aggregate interference it would create at its other neighbors if it picked j
as the relay. Values are refreshed on HELLO epochs; rows that miss three
consecutive epochs go stale and drop out of metric computation.
"""

import math
from dataclasses import dataclass, field, replace

from .radio import ChannelModel, Placement, aggregate_interference, received_power

REQUEST = "request"
REPLY = "reply"


@dataclass(frozen=True)
class IcpMessage:
    kind: str
    transmitter_id: int
    destination_id: int
    tx_power: float = 0.0                 # request only
    measured_rx_power: float = 0.0        # reply only
    measured_rx_interference: float = 0.0  # reply only


@dataclass
class InfoRow:
    neighbor: int
    created_at_neighbor: float
    received_at_neighbor: float
    aggregate_created: float = 0.0
    last_update: float = 0.0
    # latest live interference report from this neighbor (drives transmit
    # power sizing; the routing columns above keep the handshake values)
    measured_interference: float | None = None
    # neighbor reported itself in outage until this time; the adaptive
    # protocol avoids relaying through it while the report is current
    outage_until: float = -1.0


class InformationTable:
    """Interference bookkeeping owned by a single node.

    The aggregate column is maintained as (sum of created over all rows)
    minus the row's own created value, i.e. the created interference at
    every *other* neighbor. With include_receiver=True the row's own term
    stays in the sum.
    """

    def __init__(self, owner: int, hello_interval: float = 0.2,
                 stale_epochs: int = 3, include_receiver: bool = False):
        self.owner = owner
        self.hello_interval = hello_interval
        self.stale_after = stale_epochs * hello_interval
        self.include_receiver = include_receiver
        self.rows: dict[int, InfoRow] = {}
        self._last_epoch = -1

    def __eq__(self, other):
        return isinstance(other, InformationTable) and self.owner == other.owner \
            and self.rows == other.rows

    def copy(self) -> "InformationTable":
        dup = InformationTable(self.owner, self.hello_interval,
                               round(self.stale_after / self.hello_interval),
                               self.include_receiver)
        dup.rows = {k: replace(v) for k, v in self.rows.items()}
        dup._last_epoch = self._last_epoch
        return dup

    def total_created(self) -> float:
        total = 0.0
        for neighbor in sorted(self.rows):
            total += self.rows[neighbor].created_at_neighbor
        return total

    def _recompute_aggregates(self):
        total = self.total_created()
        for row in self.rows.values():
            if self.include_receiver:
                row.aggregate_created = total
            else:
                row.aggregate_created = total - row.created_at_neighbor

    def ingest_reply(self, reply: IcpMessage, now: float = 0.0,
                     is_neighbor: bool = True) -> "InformationTable":
        """Upsert the replying neighbor's row and refresh every aggregate."""
        if reply.kind != REPLY or reply.destination_id != self.owner:
            return self
        stamp = now if is_neighbor else now - self.stale_after
        row = self.rows.get(reply.transmitter_id)
        if row is None:
            row = InfoRow(reply.transmitter_id, reply.measured_rx_power,
                          reply.measured_rx_interference, 0.0, stamp)
            self.rows[reply.transmitter_id] = row
        else:
            row.created_at_neighbor = reply.measured_rx_power
            row.received_at_neighbor = reply.measured_rx_interference
            row.last_update = stamp
        self._recompute_aggregates()
        return self

    def set_created(self, neighbor: int, value: float):
        """Local update of the created column when own transmit power changes."""
        row = self.rows.get(neighbor)
        if row is not None:
            row.created_at_neighbor = value
            self._recompute_aggregates()

    def set_received(self, neighbor: int, value: float, now: float):
        """Update a neighbor's received-interference report (HELLO piggyback)."""
        row = self.rows.get(neighbor)
        if row is not None:
            row.received_at_neighbor = value
            row.last_update = now

    def set_measured(self, neighbor: int, value, now: float,
                     outage_until: float = -1.0):
        """Record a neighbor's live interference measurement and refresh the
        row; value None refreshes freshness only (beacon heard, no report)."""
        row = self.rows.get(neighbor)
        if row is not None:
            if value is not None:
                row.measured_interference = value
            row.outage_until = outage_until
            row.last_update = now

    def is_fresh(self, neighbor: int, now: float) -> bool:
        row = self.rows.get(neighbor)
        return row is not None and now - row.last_update <= self.stale_after

    def fresh_row(self, neighbor: int, now: float):
        row = self.rows.get(neighbor)
        if row is None or now - row.last_update > self.stale_after:
            return None
        return row


def emit_icp_requests(node: int, neighbor_ids, p_max: float) -> list[IcpMessage]:
    """One collection request per neighbor, sent at maximum transmit power."""
    return [IcpMessage(REQUEST, node, j, tx_power=p_max)
            for j in sorted(neighbor_ids)]


def handle_icp_request(receiver: int, msg: IcpMessage, placement: Placement,
                       channel: ChannelModel, active_transmitters):
    """Answer a collection request with measured receive power and interference.

    Requests addressed to another node are discarded (returns None).
    `active_transmitters` is an iterable of (node_id, power) pairs; the
    requester and the receiver are excluded from the interference sum.
    """
    if msg.kind != REQUEST or msg.destination_id != receiver:
        return None
    d = placement.distance(msg.transmitter_id, receiver)
    p_r = received_power(msg.tx_power, d, channel.alpha)
    i_r = aggregate_interference(receiver, msg.transmitter_id,
                                 active_transmitters, placement)
    return IcpMessage(REPLY, receiver, msg.transmitter_id,
                      measured_rx_power=p_r, measured_rx_interference=i_r)


def refresh(table: InformationTable, node: int, neighbor_ids, now: float,
            p_max: float) -> list[IcpMessage]:
    """Re-emit collection requests when the clock crosses a HELLO epoch.

    Between epochs no messages are produced; each crossing yields one request
    per current neighbor, to ride on that epoch's HELLO beacon.
    """
    epoch = math.floor(now / table.hello_interval)
    if epoch <= table._last_epoch:
        return []
    table._last_epoch = epoch
    return emit_icp_requests(node, neighbor_ids, p_max)
