import math

import numpy as np
import pytest

from iacrsim.config import ScenarioConfig
from iacrsim.engine import (
    Simulator,
    adapt_power,
    frame_energy,
    reception_decision,
    should_reroute,
)
from iacrsim.radio import Placement
from iacrsim.routing import MetricPolicy, oracle_best_route
from iacrsim.traces import dump_records


def line_placement(coords, alpha=3.0, area=1000.0):
    xs = np.array([c[0] for c in coords], dtype=float)
    ys = np.array([c[1] for c in coords], dtype=float)
    return Placement(xs, ys, area, alpha)


def records_by_kind(records, kind):
    return [r for r in records if r["kind"] == kind]


class TestReceptionDecision:
    def test_boundary_inclusive(self):
        assert reception_decision(2.0, 2.0)

    def test_below_threshold_lost(self):
        assert not reception_decision(1.9999999, 2.0)

    def test_infinite_sinr_always_received(self):
        assert reception_decision(math.inf, 1e9)


class TestAdaptPower:
    def test_floor_clamp_dominates_tiny_requirement(self):
        power, marginal = adapt_power(2.0, 2.0, 0.0, 1e-10, 1.0, 3.0, 1.0)
        assert power == 0.01
        assert not marginal

    def test_exact_p_max_is_not_marginal(self):
        # pick inputs whose product is exactly p_max
        power, marginal = adapt_power(2.0, 2.0, 0.25, 0.0, 1.0, 3.0, 1.0)
        assert power == 1.0
        assert not marginal

    def test_above_p_max_flags_marginal(self):
        power, marginal = adapt_power(2.0, 2.0, 0.3, 0.0, 1.0, 3.0, 1.0)
        assert power == 1.0
        assert marginal

    def test_chosen_power_meets_target_sinr(self):
        # unclamped choices satisfy predicted SINR >= threshold * margin
        rng = np.random.default_rng(7)
        for _ in range(300):
            th = rng.uniform(1.0, 10.0)
            margin = rng.uniform(1.0, 4.0)
            interference = rng.uniform(0.0, 1e-6)
            noise = 1e-10
            d = rng.uniform(10.0, 300.0)
            power, marginal = adapt_power(th, margin, interference, noise,
                                          d, 3.0, 1.0)
            predicted = (power / d ** 3.0) / (interference + noise)
            if not marginal:
                assert predicted >= th * margin * (1 - 1e-12)

    def test_zero_frames_zero_energy(self):
        assert frame_energy(0, 1.0, 1e6) == 0.0

    def test_data_frame_energy(self):
        assert frame_energy(4096, 1.0, 1e6) == pytest.approx(4.096e-3, rel=1e-12)


class TestRerouteRule:
    def test_all_samples_fine_keeps_route(self):
        assert not should_reroute([5, 5, 5, 5, 5], 2.0, 3, 5)

    def test_three_of_five_triggers(self):
        assert should_reroute([5, 1, 1, 1, 5], 2.0, 3, 5)

    def test_short_window_never_triggers(self):
        assert not should_reroute([0, 0], 2.0, 3, 5)


class TestDeterminism:
    def test_identical_seeds_identical_traces(self):
        cfg = ScenarioConfig(n_nodes=15, seed=11, sim_duration=5.0)
        a = dump_records(Simulator(cfg).run())
        b = dump_records(Simulator(cfg).run())
        assert a == b

    def test_different_seeds_differ(self):
        a = dump_records(Simulator(ScenarioConfig(n_nodes=15, seed=1,
                                                  sim_duration=5.0)).run())
        b = dump_records(Simulator(ScenarioConfig(n_nodes=15, seed=2,
                                                  sim_duration=5.0)).run())
        assert a != b


class TestRunShape:
    def test_zero_flows_control_plane_only(self):
        cfg = ScenarioConfig(n_nodes=8, seed=1, sim_duration=4.0, flows=[])
        records = Simulator(cfg).run()
        assert not records_by_kind(records, "send")
        assert not records_by_kind(records, "delivery")
        assert not records_by_kind(records, "flow")
        assert len(records_by_kind(records, "energy")) == 8
        assert records[-1]["kind"] == "end"

    def test_adjacent_pair_without_interference_delivers_everything(self):
        placement = line_placement([(100, 100), (150, 100)])
        cfg = ScenarioConfig(n_nodes=2, seed=1, sim_duration=12.95,
                             flows=[(0, 1, 3.0)])
        records = Simulator(cfg, placement).run()
        (flow,) = records_by_kind(records, "flow")
        assert flow["sent"] > 90
        assert flow["delivered"] == flow["sent"]
        m_sent = len(records_by_kind(records, "send"))
        assert m_sent == flow["sent"]

    def test_flow_conservation(self):
        for seed in range(5):
            cfg = ScenarioConfig(n_nodes=25, seed=seed, sim_duration=6.0)
            records = Simulator(cfg).run()
            for flow in records_by_kind(records, "flow"):
                assert flow["delivered"] + flow["lost"] + flow["in_flight"] \
                    == flow["sent"]
                assert 0 <= flow["in_flight"] <= 1

    def test_reception_consistency(self):
        cfg = ScenarioConfig(n_nodes=30, seed=4, sim_duration=6.0)
        records = Simulator(cfg).run()
        th = cfg.sinr_threshold
        deliveries = records_by_kind(records, "delivery")
        assert deliveries
        for rec in deliveries:
            if rec["outcome"] == "delivered":
                assert all(s >= th for _, _, s in rec["links"])
            else:
                assert min(s for _, _, s in rec["links"]) < th
            assert rec["min_sinr"] == min(s for _, _, s in rec["links"])

    def test_energy_monotone_and_positive(self):
        cfg = ScenarioConfig(n_nodes=20, seed=9, sim_duration=5.0)
        records = Simulator(cfg).run()
        for rec in records_by_kind(records, "energy"):
            assert rec["joules"] > 0.0

    def test_event_times_ordered(self):
        cfg = ScenarioConfig(n_nodes=20, seed=2, sim_duration=5.0)
        records = Simulator(cfg).run()
        times = [r["t"] for r in records]
        assert times == sorted(times)
        assert times[-1] <= cfg.sim_duration


class TestEnergyReplayOracle:
    def test_trace_energy_matches_per_frame_recomputation(self):
        cfg = ScenarioConfig(n_nodes=20, seed=5, sim_duration=6.0)
        records = Simulator(cfg).run()
        recomputed = {i: 0.0 for i in range(cfg.n_nodes)}
        for rec in records_by_kind(records, "tx"):
            recomputed[rec["node"]] += frame_energy(
                cfg.packet_size, rec["power"], cfg.data_rate)
        for rec in records_by_kind(records, "control"):
            node = rec["node"]
            recomputed[node] += frame_energy(
                cfg.hello_size * rec["hello"], cfg.p_max, cfg.data_rate)
            recomputed[node] += frame_energy(
                cfg.icp_size * rec["icp"], cfg.p_max, cfg.data_rate)
            recomputed[node] += frame_energy(
                cfg.rreq_size * (rec["rreq"] + rec["rrep"]), cfg.p_max,
                cfg.data_rate)
        for rec in records_by_kind(records, "energy"):
            assert rec["joules"] == pytest.approx(recomputed[rec["node"]],
                                                  rel=1e-9)


class TestRouteBehavior:
    def test_route_installed_matches_oracle_on_static_network(self):
        for seed in range(8):
            cfg = ScenarioConfig(n_nodes=10, seed=seed, area_side=500.0,
                                 flows=[])
            sim = Simulator(cfg)
            result = sim.establish_route(0, 9)
            tables = [n.table for n in sim.nodes]
            expected = oracle_best_route(sim.adjacency, tables, cfg.policy(),
                                         0, 9, now=cfg.establishment_time)
            if expected is None:
                assert result is None
            else:
                assert result is not None
                assert result[0] == expected[0]
                assert result[1] == pytest.approx(expected[1], abs=1e-9)

    def test_interferer_activation_triggers_reroute_quickly(self):
        # a second flow lights up next to the first flow's relay receiver;
        # the reroute event must appear within five packet intervals
        placement = line_placement([
            (100, 100), (250, 100), (400, 100),   # flow A line 0-1-2
            (265, 115), (380, 220),               # flow B: 3 -> 4
            (250, 250), (120, 230), (390, 120),   # spare relays
        ])
        cfg = ScenarioConfig(
            n_nodes=8, seed=3, sim_duration=11.0, protocol="IACR",
            flows=[(0, 2, 3.0), (3, 4, 8.0)])
        records = Simulator(cfg, placement).run()
        reroutes = [r for r in records
                    if r["kind"] == "route" and r["event"] == "reroute"
                    and r["flow"] == 0]
        assert reroutes, "expected an interference-triggered rediscovery"
        first = min(r["t"] for r in reroutes)
        assert 8.0 < first <= 8.0 + 5 * cfg.send_interval + 0.2

    def test_unreachable_destination_marks_flow_failed(self):
        # two islands far beyond detection range
        placement = line_placement([(0, 0), (50, 0), (900, 900), (950, 900)])
        cfg = ScenarioConfig(n_nodes=4, seed=1, sim_duration=6.0,
                             flows=[(0, 2, 3.0)])
        records = Simulator(cfg, placement).run()
        (flow,) = records_by_kind(records, "flow")
        assert flow["failed"]
        assert flow["sent"] > 0          # failed flows still offer load
        assert flow["delivered"] == 0
        fails = [r for r in records
                 if r["kind"] == "route" and r["event"] == "fail"]
        assert fails

    def test_scenario_record_carries_config_and_positions(self):
        cfg = ScenarioConfig(n_nodes=6, seed=2, sim_duration=4.0, flows=[])
        records = Simulator(cfg).run()
        scenario = records[0]
        assert scenario["kind"] == "scenario"
        assert scenario["config"]["n_nodes"] == 6
        assert len(scenario["positions"]) == 6
        assert len(scenario["neighbors"]) == 6
