"""Deterministic discrete-event core for the routing simulator.

Timeline of one run:

- [0, establishment) is a protected bootstrap: staggered HELLO beacons
  discover neighbors, and the information-collection handshake fills every
  node's interference table. Control frames in this window always arrive.
- At each flow's start time the source floods a route request under the
  configured metric policy; the destination replies along the best reverse
  path after a short collection window.
- Data packets leave each source on a shared send grid (one packet per
  send interval) and hop along routing-table next hops, one frame airtime
  per hop. Reception succeeds when the link SINR against concurrently
  active transmitters clears the threshold.
- Receivers remember the interference measured during data receptions;
  HELLO beacons piggyback those measurements back into neighbors' tables,
  which feeds both transmit-power adaptation and interference-triggered
  re-routing.

Everything is driven from one (time, sequence) heap, so identical configs
produce identical traces byte for byte.
"""

import heapq
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import AUTO, ScenarioConfig
from .info_table import InformationTable, emit_icp_requests, handle_icp_request
from .radio import received_power, sample_placement
from .radio import adjacency as build_adjacency
from .radio import sinr as sinr_ratio
from .routing import build_rrep, handle_rrep, handle_rreq, initial_rreq


@dataclass
class Frame:
    start: float
    end: float
    tx: int
    power: float


def reception_decision(sinr_value: float, threshold: float) -> bool:
    """A frame is received when the link SINR meets the threshold (inclusive)."""
    return sinr_value >= threshold


def frame_energy(bits: int, power: float, data_rate: float) -> float:
    """Transmit energy of one frame: power times airtime."""
    return power * (bits / data_rate)


def adapt_power(sinr_threshold: float, margin: float, interference: float,
                noise_variance: float, distance: float, alpha: float,
                p_max: float):
    """Transmit power sized to hold the target SINR over the last measured
    interference, clamped to [p_max/100, p_max].

    Returns (power, marginal): marginal means the unclamped requirement
    exceeded p_max, so the link cannot reach the target at full power.
    """
    required = (sinr_threshold * margin * (interference + noise_variance)
                * distance ** alpha)
    marginal = required > p_max
    power = min(required, p_max)
    return max(power, p_max / 100.0), marginal


def should_reroute(window, threshold: float, trigger: int, size: int) -> bool:
    """Rediscover when enough of the recent route SINR samples fell below
    the reception threshold (trigger out of the last `size`)."""
    if len(window) < size:
        return False
    return sum(1 for s in window if s < threshold) >= trigger


@dataclass
class NodeState:
    id: int
    tx_power: float
    delta: float
    table: InformationTable
    neighbors: list
    energy: float = 0.0
    routing_table: dict = field(default_factory=dict)
    disc: dict = field(default_factory=dict)
    observed: deque = field(default_factory=deque)
    rx_sinrs: deque = field(default_factory=deque)
    outage_until: float = -1.0
    hello_count: int = 0
    icp_count: int = 0
    rreq_count: int = 0
    rrep_count: int = 0
    marginal: bool = False

    def observed_level(self):
        """Smoothed interference measurement: mean over the recent window."""
        if not self.observed:
            return None
        return sum(self.observed) / len(self.observed)


@dataclass
class FlowState:
    index: int
    source: int
    destination: int
    start: float
    phase: float = 0.0
    route: list | None = None
    sent: int = 0
    delivered: int = 0
    lost: int = 0
    failed: bool = False
    cur_seq: int = -1
    established_seq: int = -1
    attempt: int = 0
    rediscovering: bool = False
    window: deque = field(default_factory=deque)
    reroute_times: deque = field(default_factory=deque)
    sends_scheduled: bool = False


class Simulator:
    """One scenario run. Build once, call run(); the trace is in .records."""

    def __init__(self, config: ScenarioConfig, placement=None):
        config.validate()
        self.cfg = config
        self.channel = config.channel()
        self.policy = config.policy()
        self.th = config.sinr_threshold
        self.rng = np.random.default_rng(config.seed)
        if placement is None:
            placement = sample_placement(
                config.n_nodes, config.area_side, self.rng, config.alpha,
                config.min_separation)
        elif placement.n != config.n_nodes:
            raise ValueError("placement size does not match n_nodes")
        self.placement = placement
        self.gains = self.placement.gains
        self.adjacency = build_adjacency(self.placement, self.channel, config.p_max)
        self.nodes = [
            NodeState(
                id=i, tx_power=config.p_max, delta=config.delta,
                table=InformationTable(
                    i, config.hello_interval, config.stale_epochs,
                    config.include_receiver_in_created),
                neighbors=self.adjacency[i],
                observed=deque(maxlen=config.reroute_window),
                rx_sinrs=deque(maxlen=config.reroute_window))
            for i in range(config.n_nodes)
        ]
        self.flows = self._resolve_flows()
        self.records: list[dict] = []
        self._heap: list = []
        self._seq = 0
        self._now = 0.0
        self._active: deque[Frame] = deque()
        self._max_air = config.airtime(config.packet_size)
        self._seq_counters = [0] * config.n_nodes
        self._rrep_pending: set = set()
        self._flow_by_seq: dict = {}
        self._rrep_drop_count = 0
        self._done = False

    # ------------------------------------------------------------------
    # setup helpers

    def _hop_distance(self, src, dst):
        """Breadth-first hop count, or None when disconnected."""
        if src == dst:
            return 0
        dist = {src: 0}
        frontier = deque([src])
        while frontier:
            u = frontier.popleft()
            for v in self.adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    if v == dst:
                        return dist[v]
                    frontier.append(v)
        return dist.get(dst)

    def _connected(self, src, dst):
        return self._hop_distance(src, dst) is not None

    def _resolve_flows(self):
        """One flow per auto_flow_per_nodes nodes between connected pairs,
        preferring genuinely multi-hop endpoints; each flow gets a send
        phase inside the interval so concurrency depends on geometry and
        alignment rather than on an artificial lockstep."""
        cfg = self.cfg
        if cfg.flows != AUTO:
            flows = [FlowState(i, s, d, t,
                               window=deque(maxlen=cfg.reroute_window))
                     for i, (s, d, t) in enumerate(cfg.flows)]
        else:
            count = max(1, cfg.n_nodes // cfg.auto_flow_per_nodes)
            lo, hi = 0.35 * cfg.area_side, 0.55 * cfg.area_side
            flows = []
            used = set()
            for f in range(count):
                best = None
                for _ in range(200):
                    s, d = self.rng.integers(0, cfg.n_nodes, size=2)
                    s, d = int(s), int(d)
                    if s == d or (s, d) in used:
                        continue
                    if not self._connected(s, d):
                        continue
                    span = self.placement.distance(s, d)
                    # prefer endpoints a fixed fraction of the area apart so
                    # route exposure varies smoothly with node density
                    gap = 0.0 if lo <= span <= hi else min(abs(span - lo),
                                                           abs(span - hi))
                    if best is None or gap < best[0]:
                        best = (gap, s, d)
                    if gap == 0.0:
                        break
                if best is None:
                    continue
                _, s, d = best
                used.add((s, d))
                start = cfg.establishment_time + 0.5 * cfg.send_interval \
                    + f * cfg.send_interval
                flows.append(FlowState(f, s, d, start,
                                       window=deque(maxlen=cfg.reroute_window)))
        if cfg.flows == AUTO:
            for flow in flows:
                flow.phase = float(self.rng.uniform(0.0, cfg.send_interval))
        return flows

    # ------------------------------------------------------------------
    # event machinery

    def _push(self, time, kind, payload=None):
        assert time >= self._now, f"event {kind} scheduled in the past"
        self._seq += 1
        heapq.heappush(self._heap, (time, self._seq, kind, payload))

    def _emit(self, time, kind, node, **fields):
        rec = {"t": time, "kind": kind, "node": node}
        rec.update(fields)
        self.records.append(rec)

    def _account(self, node: NodeState, bits: int, power: float):
        node.energy += frame_energy(bits, power, self.cfg.data_rate)

    def _protected(self, time) -> bool:
        return time < self.cfg.establishment_time

    def _register(self, frame: Frame):
        self._active.append(frame)

    def _prune_active(self, now):
        horizon = now - self._max_air
        while self._active and self._active[0].end <= horizon:
            self._active.popleft()

    def _concurrent(self, frame: Frame):
        """Transmitters of other frames overlapping this frame in time."""
        self._prune_active(frame.end)
        out = []
        for f in self._active:
            if f is frame or f.tx == frame.tx:
                continue
            if f.start < frame.end and f.end > frame.start:
                out.append((f.tx, f.power))
        return out

    def _link_sinr(self, frame: Frame, rx: int, concurrent):
        """(sinr, interference) for one receiver of one frame."""
        interference = 0.0
        for tx, power in concurrent:
            if tx == rx:
                continue
            interference += power * self.gains[rx, tx]
        signal = frame.power * self.gains[rx, frame.tx]
        return sinr_ratio(signal, interference, self.channel), interference

    # ------------------------------------------------------------------
    # bootstrap: information collection over all nodes at current powers

    def _collect_info(self, node: NodeState, now):
        """Full ICP handshake with every neighbor (protected bootstrap)."""
        active = [(k, self.nodes[k].tx_power) for k in range(self.cfg.n_nodes)]
        for req in emit_icp_requests(node.id, node.neighbors, self.cfg.p_max):
            self._account(node, self.cfg.icp_size, self.cfg.p_max)
            node.icp_count += 1
            neighbor = self.nodes[req.destination_id]
            reply = handle_icp_request(neighbor.id, req, self.placement,
                                       self.channel, active)
            self._account(neighbor, self.cfg.icp_size, self.cfg.p_max)
            neighbor.icp_count += 1
            node.table.ingest_reply(reply, now=now)

    # ------------------------------------------------------------------
    # HELLO beacons and table refresh

    def _on_hello(self, now, payload):
        node = self.nodes[payload["node"]]
        epoch = payload["epoch"]
        self._account(node, self.cfg.hello_size, self.cfg.p_max)
        node.hello_count += 1
        if epoch == 0:
            self._collect_info(node, now)
        if self._protected(now):
            # protected beacon: always heard, keeps neighbor rows fresh
            for j in node.neighbors:
                self._refresh_row(self.nodes[j], node, now, node.observed_level())
        else:
            frame = Frame(now, now + self.cfg.airtime(self.cfg.hello_size),
                          node.id, self.cfg.p_max)
            self._register(frame)
            self._push(frame.end, "hello-end", {"frame": frame, "node": node.id})
            self._adapt_node(node, now)
        nxt = now + self.cfg.hello_interval
        if nxt <= self.cfg.sim_duration:
            self._push(nxt, "hello", {"node": node.id, "epoch": epoch + 1})

    def _on_hello_end(self, now, payload):
        node = self.nodes[payload["node"]]
        frame = payload["frame"]
        concurrent = self._concurrent(frame)
        value = node.observed_level()
        for j in node.neighbors:
            if concurrent:
                s, _ = self._link_sinr(frame, j, concurrent)
                if not reception_decision(s, self.th):
                    continue  # beacon lost at this neighbor; row ages
            self._refresh_row(self.nodes[j], node, now, value)

    def _refresh_row(self, receiver: NodeState, beacon_node: NodeState, now,
                     reported):
        receiver.table.set_measured(beacon_node.id, reported, now,
                                    outage_until=beacon_node.outage_until)

    def _adapt_node(self, node: NodeState, now):
        """Re-run power adaptation and the created-interference columns."""
        if not self.cfg.power_adaptation:
            return
        next_hops = set()
        for flow in self.flows:
            if flow.route is None:
                continue
            route = flow.route
            for u, v in zip(route, route[1:]):
                if u == node.id:
                    next_hops.add(v)
        if not next_hops:
            return
        new_power = 0.0
        marginal = False
        for v in sorted(next_hops):
            p, m = adapt_power(self.th, self.cfg.adapt_margin,
                               self._measured_interference(node, v),
                               self.cfg.noise_variance,
                               self.placement.distance(node.id, v),
                               self.cfg.alpha, self.cfg.p_max)
            new_power = max(new_power, p)
            marginal = marginal or m
        node.marginal = marginal
        if new_power != node.tx_power:
            node.tx_power = new_power
            self._emit(now, "power", node.id, value=new_power)
            for j in node.neighbors:
                node.table.set_created(
                    j, received_power(node.tx_power,
                                      self.placement.distance(node.id, j),
                                      self.cfg.alpha))

    def _measured_interference(self, node: NodeState, next_hop: int) -> float:
        row = node.table.rows.get(next_hop)
        if row is None:
            return 0.0
        if row.measured_interference is not None:
            return row.measured_interference
        return row.received_at_neighbor

    # ------------------------------------------------------------------
    # route discovery

    def _begin_discovery(self, flow: FlowState, now, rediscovery=False):
        src = flow.source
        self._seq_counters[src] += 1
        seq = self._seq_counters[src]
        flow.cur_seq = seq
        flow.attempt += 1
        flow.rediscovering = rediscovery
        self._flow_by_seq[(src, seq)] = flow
        rreq = initial_rreq(src, flow.destination, seq)
        self._broadcast_rreq(self.nodes[src], rreq, now)
        self._push(now + self.cfg.discovery_timeout, "disc-timeout",
                   {"flow": flow.index, "seq": seq})

    def _broadcast_rreq(self, node: NodeState, rreq, now):
        self._account(node, self.cfg.rreq_size, self.cfg.p_max)
        node.rreq_count += 1
        frame = Frame(now, now + self.cfg.airtime(self.cfg.rreq_size),
                      node.id, self.cfg.p_max)
        if not self._protected(now):
            self._register(frame)
        self._push(frame.end, "rreq-end",
                   {"frame": frame, "rreq": rreq, "node": node.id})

    def _on_rreq_end(self, now, payload):
        frame = payload["frame"]
        rreq = payload["rreq"]
        tx_node = self.nodes[payload["node"]]
        protected = self._protected(frame.start)
        concurrent = None if protected else self._concurrent(frame)
        for j in tx_node.neighbors:
            if not protected and concurrent:
                s, _ = self._link_sinr(frame, j, concurrent)
                if not reception_decision(s, self.th):
                    continue
            receiver = self.nodes[j]
            action, result = handle_rreq(j, rreq, tx_node.table, self.policy,
                                         receiver.disc, now)
            if action == "forward":
                self._broadcast_rreq(receiver, result, now)
            elif action == "rrep_candidate":
                key = (rreq.source, rreq.sequence)
                if key not in self._rrep_pending:
                    self._rrep_pending.add(key)
                    self._push(now + self.cfg.rrep_wait, "rrep-send",
                               {"destination": j, "source": rreq.source,
                                "seq": rreq.sequence})

    def _on_rrep_send(self, now, payload):
        dest = self.nodes[payload["destination"]]
        src, seq = payload["source"], payload["seq"]
        state = dest.disc.get((src, seq))
        if state is None:
            return
        rrep = build_rrep(dest.id, src, seq, state.best_key, state.reverse_hop)
        self._send_rrep(dest, rrep, now)

    def _send_rrep(self, node: NodeState, rrep, now):
        self._account(node, self.cfg.rreq_size, self.cfg.p_max)
        node.rrep_count += 1
        frame = Frame(now, now + self.cfg.airtime(self.cfg.rreq_size),
                      node.id, self.cfg.p_max)
        if not self._protected(now):
            self._register(frame)
        self._push(frame.end, "rrep-end",
                   {"frame": frame, "rrep": rrep, "node": node.id})

    def _on_rrep_end(self, now, payload):
        frame = payload["frame"]
        rrep = payload["rrep"]
        rx = rrep.next_hop
        if not self._protected(frame.start):
            concurrent = self._concurrent(frame)
            if concurrent:
                s, _ = self._link_sinr(frame, rx, concurrent)
                if not reception_decision(s, self.th):
                    return  # reply lost; discovery timeout handles the retry
        receiver = self.nodes[rx]
        action, result = handle_rrep(rx, rrep, receiver.disc,
                                     receiver.routing_table, now)
        if action == "drop":
            self._rrep_drop_count += 1
            return
        if action == "forward":
            self._send_rrep(receiver, result, now)
            return
        # established at the source
        flow = self._flow_by_seq.get((rrep.source, rrep.sequence))
        if flow is None or flow.cur_seq != rrep.sequence:
            return
        path = self._walk_route(rrep.source, rrep.destination)
        if path is None:
            return
        flow.route = path
        flow.established_seq = rrep.sequence
        flow.attempt = 0
        flow.window.clear()
        self._emit(now, "route", rrep.source, event="install",
                   flow=flow.index, path=path, cost=rrep.route_metric,
                   seq=rrep.sequence,
                   reroute=bool(flow.rediscovering))
        flow.rediscovering = False
        for u in path[:-1]:
            self._adapt_node(self.nodes[u], now)
        if not flow.sends_scheduled:
            flow.sends_scheduled = True
            self._schedule_next_send(flow, now)

    def _walk_route(self, source, destination):
        path = [source]
        while path[-1] != destination:
            entry = self.nodes[path[-1]].routing_table.get(destination)
            if entry is None or len(path) > self.cfg.n_nodes:
                return None
            path.append(entry.next_hop)
        return path

    def _on_disc_timeout(self, now, payload):
        flow = self.flows[payload["flow"]]
        seq = payload["seq"]
        if flow.cur_seq != seq or flow.established_seq == seq:
            return  # superseded or established in time
        if flow.attempt >= self.cfg.discovery_attempts:
            if flow.route is None:
                flow.failed = True
                # the flow still offers its load; every packet counts as an
                # outage sample against a route that never existed
                if not flow.sends_scheduled:
                    flow.sends_scheduled = True
                    self._schedule_next_send(flow, now)
            self._emit(now, "route", flow.source, event="fail",
                       flow=flow.index, attempts=flow.attempt)
            flow.attempt = 0
            flow.rediscovering = False
            return
        self._begin_discovery(flow, now, rediscovery=flow.rediscovering)

    # ------------------------------------------------------------------
    # data plane

    def _grid_after(self, flow: FlowState, t):
        cfg = self.cfg
        anchor = cfg.establishment_time + flow.phase
        m = math.floor((t - anchor) / cfg.send_interval) + 1
        while anchor + m * cfg.send_interval <= t:
            m += 1
        return anchor + m * cfg.send_interval

    def _schedule_next_send(self, flow: FlowState, now):
        t = self._grid_after(flow, now)
        if t <= self.cfg.sim_duration:
            self._push(t, "send", {"flow": flow.index})

    def _on_send(self, now, payload):
        flow = self.flows[payload["flow"]]
        pkt = flow.sent
        flow.sent += 1
        self._emit(now, "send", flow.source, flow=flow.index, pkt=pkt)
        self._schedule_next_send(flow, now)
        entry = self.nodes[flow.source].routing_table.get(flow.destination)
        if entry is None:
            self._finish_packet(flow, pkt, now, delivered=False, links=[],
                               lost_at=(flow.source, -1))
            return
        self._transmit_hop(flow, pkt, flow.source, now, links=[], hops=0)

    def _transmit_hop(self, flow: FlowState, pkt, node_id, now, links, hops):
        node = self.nodes[node_id]
        entry = node.routing_table.get(flow.destination)
        if entry is None or hops >= self.cfg.n_nodes:
            self._finish_packet(flow, pkt, now, delivered=False, links=links,
                               lost_at=(node_id, -1))
            return
        entry.last_used = now
        rx = entry.next_hop
        frame = Frame(now, now + self.cfg.airtime(self.cfg.packet_size),
                      node_id, node.tx_power)
        self._register(frame)
        self._account(node, self.cfg.packet_size, node.tx_power)
        self._emit(now, "tx", node_id, flow=flow.index, pkt=pkt, hop=hops,
                   to=rx, power=node.tx_power)
        self._push(frame.end, "data-end",
                   {"flow": flow.index, "pkt": pkt, "frame": frame, "rx": rx,
                    "links": links, "hops": hops})

    def _on_data_end(self, now, payload):
        flow = self.flows[payload["flow"]]
        frame = payload["frame"]
        rx = payload["rx"]
        concurrent = self._concurrent(frame)
        s, interference = self._link_sinr(frame, rx, concurrent)
        receiver = self.nodes[rx]
        receiver.observed.append(interference)
        receiver.rx_sinrs.append(s)
        if should_reroute(receiver.rx_sinrs, self.th,
                          self.cfg.reroute_trigger, self.cfg.reroute_window):
            receiver.outage_until = now \
                + self.cfg.stale_epochs * self.cfg.hello_interval
        links = payload["links"] + [[frame.tx, rx, s]]
        if not reception_decision(s, self.th):
            self._finish_packet(flow, payload["pkt"], now, delivered=False,
                               links=links, lost_at=(frame.tx, rx))
            return
        if rx == flow.destination:
            self._finish_packet(flow, payload["pkt"], now, delivered=True,
                               links=links)
            return
        self._transmit_hop(flow, payload["pkt"], rx, now, links,
                           payload["hops"] + 1)

    def _finish_packet(self, flow: FlowState, pkt, now, delivered, links,
                       lost_at=None):
        sinrs = [l[2] for l in links]
        if delivered:
            flow.delivered += 1
            min_sinr = min(sinrs)
        else:
            flow.lost += 1
            # a hop that never happened contributes a zero-SINR link
            if lost_at is not None and lost_at[1] == -1:
                links = links + [[lost_at[0], -1, 0.0]]
                sinrs.append(0.0)
            min_sinr = min(sinrs)
        self._emit(now, "delivery",
                   flow.destination if delivered else (lost_at[1] if lost_at else -1),
                   flow=flow.index, pkt=pkt,
                   outcome="delivered" if delivered else "lost",
                   min_sinr=min_sinr, links=links)
        flow.window.append(min_sinr)
        self._maybe_reroute(flow, now)

    def _maybe_reroute(self, flow: FlowState, now):
        cfg = self.cfg
        if flow.failed or not should_reroute(flow.window, self.th,
                                             cfg.reroute_trigger,
                                             cfg.reroute_window):
            return
        while flow.reroute_times and \
                now - flow.reroute_times[0] > cfg.reroute_budget_window:
            flow.reroute_times.popleft()
        if len(flow.reroute_times) >= cfg.reroute_budget:
            return  # budget exhausted: keep the stale route
        flow.reroute_times.append(now)
        flow.window.clear()
        self._emit(now, "route", flow.source, event="reroute", flow=flow.index)
        flow.attempt = 0
        self._begin_discovery(flow, now, rediscovery=True)

    # ------------------------------------------------------------------
    # top level

    def run(self):
        cfg = self.cfg
        self._emit(0.0, "scenario", -1,
                   config=cfg.to_dict(),
                   positions=[[float(x), float(y)]
                              for x, y in zip(self.placement.xs, self.placement.ys)],
                   neighbors=self.adjacency,
                   backend=kernels.BACKEND)
        for node in self.nodes:
            phase = node.id * cfg.hello_interval / cfg.n_nodes
            self._push(phase, "hello", {"node": node.id, "epoch": 0})
        for flow in self.flows:
            self._push(flow.start, "flow-start", {"flow": flow.index})
        while self._heap:
            time, _, kind, payload = heapq.heappop(self._heap)
            if time > cfg.sim_duration:
                break
            self._now = time
            self._dispatch(time, kind, payload)
        self._finalize()
        return self.records

    def _dispatch(self, now, kind, payload):
        if kind == "hello":
            self._on_hello(now, payload)
        elif kind == "hello-end":
            self._on_hello_end(now, payload)
        elif kind == "flow-start":
            self._begin_discovery(self.flows[payload["flow"]], now)
        elif kind == "rreq-end":
            self._on_rreq_end(now, payload)
        elif kind == "rrep-send":
            self._on_rrep_send(now, payload)
        elif kind == "rrep-end":
            self._on_rrep_end(now, payload)
        elif kind == "disc-timeout":
            self._on_disc_timeout(now, payload)
        elif kind == "send":
            self._on_send(now, payload)
        elif kind == "data-end":
            self._on_data_end(now, payload)
        else:  # pragma: no cover
            raise RuntimeError(f"unknown event kind {kind}")

    def _finalize(self):
        end = self.cfg.sim_duration
        for node in self.nodes:
            self._emit(end, "control", node.id, hello=node.hello_count,
                       icp=node.icp_count, rreq=node.rreq_count,
                       rrep=node.rrep_count)
        for node in self.nodes:
            self._emit(end, "energy", node.id, joules=node.energy)
        for flow in self.flows:
            self._emit(end, "flow", flow.source, flow=flow.index,
                       source=flow.source, destination=flow.destination,
                       sent=flow.sent, delivered=flow.delivered,
                       lost=flow.lost,
                       in_flight=flow.sent - flow.delivered - flow.lost,
                       failed=flow.failed, route=flow.route)
        self._emit(end, "end", -1)

    # ------------------------------------------------------------------
    # direct discovery entry point (protected control plane)

    def establish_route(self, source: int, destination: int):
        """Run only neighbor discovery, table collection and one route
        discovery inside the protected window; returns (path, cost) or None.

        Used by the oracle-check harness to compare flood-installed routes
        against the reference shortest-path search on static tables.
        """
        cfg = self.cfg
        for node in self.nodes:
            phase = node.id * cfg.hello_interval / cfg.n_nodes
            self._push(phase, "hello", {"node": node.id, "epoch": 0})
        probe = FlowState(len(self.flows), source, destination, 1.0,
                          window=deque(maxlen=cfg.reroute_window))
        self.flows.append(probe)
        self._push(1.0, "flow-start", {"flow": probe.index})
        while self._heap:
            time, _, kind, payload = heapq.heappop(self._heap)
            if time > cfg.establishment_time:
                break
            if kind == "send":
                continue
            self._now = time
            self._dispatch(time, kind, payload)
        if probe.route is None:
            return None
        cost = self.nodes[source].routing_table[destination].metric
        return tuple(probe.route), cost


def run_scenario(config: ScenarioConfig):
    """Convenience wrapper: build, run, return the trace records."""
    return Simulator(config).run()
