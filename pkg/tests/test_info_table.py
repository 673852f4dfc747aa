import numpy as np
import pytest

from iacrsim.info_table import (
    REPLY,
    REQUEST,
    IcpMessage,
    InformationTable,
    emit_icp_requests,
    handle_icp_request,
    refresh,
)
from iacrsim.radio import ChannelModel, Placement, received_power, sample_placement


def make_placement(coords, alpha=3.0):
    xs = np.array([c[0] for c in coords], dtype=float)
    ys = np.array([c[1] for c in coords], dtype=float)
    return Placement(xs, ys, 1000.0, alpha)


class TestEmitRequests:
    def test_one_request_per_neighbor(self):
        msgs = emit_icp_requests(0, [3, 1, 2], 1.0)
        assert len(msgs) == 3
        assert [m.destination_id for m in msgs] == [1, 2, 3]
        assert all(m.kind == REQUEST and m.transmitter_id == 0 for m in msgs)

    def test_isolated_node(self):
        assert emit_icp_requests(5, [], 1.0) == []

    def test_requests_carry_max_power(self):
        (msg,) = emit_icp_requests(0, [1], 0.7)
        assert msg.tx_power == 0.7


class TestHandleRequest:
    def test_adjacent_no_interference(self):
        pl = make_placement([(0, 0), (1, 0)])
        ch = ChannelModel(alpha=3.0)
        req = IcpMessage(REQUEST, 0, 1, tx_power=1.0)
        rep = handle_icp_request(1, req, pl, ch, [])
        assert rep.kind == REPLY
        assert rep.destination_id == 0
        assert rep.transmitter_id == 1
        assert rep.measured_rx_power == 1.0
        assert rep.measured_rx_interference == 0.0

    def test_single_interferer(self):
        pl = make_placement([(0, 0), (1, 0), (3, 0)], alpha=2.0)
        ch = ChannelModel(alpha=2.0)
        req = IcpMessage(REQUEST, 0, 1, tx_power=1.0)
        rep = handle_icp_request(1, req, pl, ch, [(2, 1.0)])
        assert rep.measured_rx_interference == 0.25

    def test_misaddressed_request_discarded(self):
        pl = make_placement([(0, 0), (1, 0), (2, 0)])
        ch = ChannelModel()
        req = IcpMessage(REQUEST, 0, 1, tx_power=1.0)
        assert handle_icp_request(2, req, pl, ch, []) is None

    def test_random_scenario_matches_positional_oracle(self):
        rng = np.random.default_rng(13)
        pl = sample_placement(8, 400.0, rng, alpha=3.0)
        ch = ChannelModel(alpha=3.0)
        active = [(k, 1.0) for k in range(2, 8)]
        req = IcpMessage(REQUEST, 0, 1, tx_power=1.0)
        rep = handle_icp_request(1, req, pl, ch, active)
        assert rep.measured_rx_power == received_power(1.0, pl.distance(0, 1), 3.0)
        expected_i = sum(1.0 / pl.distance(1, k) ** 3.0 for k in range(2, 8))
        assert rep.measured_rx_interference == pytest.approx(expected_i, rel=1e-12)


def reply(sender, owner, p_r, i_r=0.0):
    return IcpMessage(REPLY, sender, owner, measured_rx_power=p_r,
                      measured_rx_interference=i_r)


class TestIngestReply:
    def test_single_row_has_zero_aggregate(self):
        table = InformationTable(0)
        table.ingest_reply(reply(1, 0, 0.5), now=0.0)
        assert table.rows[1].created_at_neighbor == 0.5
        assert table.rows[1].aggregate_created == 0.0

    def test_two_rows_complement_each_other(self):
        table = InformationTable(0)
        table.ingest_reply(reply(1, 0, 0.3), now=0.0)
        table.ingest_reply(reply(2, 0, 0.7), now=0.0)
        assert table.rows[1].aggregate_created == pytest.approx(0.7, rel=1e-12)
        assert table.rows[2].aggregate_created == pytest.approx(0.3, rel=1e-12)

    def test_column_identity_over_five_rows(self):
        rng = np.random.default_rng(17)
        table = InformationTable(0)
        values = {j: float(rng.uniform(0.01, 1.0)) for j in range(1, 6)}
        for j, v in values.items():
            table.ingest_reply(reply(j, 0, v), now=0.0)
        # external recomputation of the column-4 identity
        total = 0.0
        for j in sorted(values):
            total += values[j]
        for j in sorted(values):
            assert table.rows[j].aggregate_created == pytest.approx(
                total - values[j], rel=1e-12)

    def test_idempotent(self):
        t1 = InformationTable(0)
        t2 = InformationTable(0)
        r = reply(1, 0, 0.4, 0.1)
        t1.ingest_reply(r, now=0.0)
        t2.ingest_reply(r, now=0.0)
        t2.ingest_reply(r, now=0.0)
        assert t1 == t2

    def test_reply_for_other_owner_ignored(self):
        table = InformationTable(0)
        table.ingest_reply(reply(1, 9, 0.4), now=0.0)
        assert table.rows == {}

    def test_non_neighbor_row_created_stale(self):
        table = InformationTable(0, hello_interval=0.2, stale_epochs=3)
        table.ingest_reply(reply(7, 0, 0.4), now=1.0, is_neighbor=False)
        assert 7 in table.rows
        assert not table.is_fresh(7, 1.0 + 1e-9)

    def test_include_receiver_variant(self):
        table = InformationTable(0, include_receiver=True)
        table.ingest_reply(reply(1, 0, 0.3), now=0.0)
        table.ingest_reply(reply(2, 0, 0.7), now=0.0)
        assert table.rows[1].aggregate_created == pytest.approx(1.0, rel=1e-12)


class TestRefreshAndStaleness:
    def test_no_epoch_crossing_no_messages(self):
        table = InformationTable(0, hello_interval=0.2)
        assert refresh(table, 0, [1, 2], 0.05, 1.0) != []  # first call emits
        assert refresh(table, 0, [1, 2], 0.15, 1.0) == []

    def test_epoch_crossing_emits_per_neighbor(self):
        table = InformationTable(0, hello_interval=0.2)
        refresh(table, 0, [1, 2], 0.0, 1.0)
        msgs = refresh(table, 0, [1, 2], 0.2, 1.0)
        assert len(msgs) == 2
        assert {m.destination_id for m in msgs} == {1, 2}

    def test_silent_neighbor_goes_stale_after_three_epochs(self):
        table = InformationTable(0, hello_interval=0.2, stale_epochs=3)
        table.ingest_reply(reply(1, 0, 0.5), now=0.0)
        assert table.is_fresh(1, 0.6)
        assert not table.is_fresh(1, 0.6 + 1e-6)
        assert table.fresh_row(1, 0.7) is None

    def test_piggyback_update_keeps_row_fresh(self):
        table = InformationTable(0, hello_interval=0.2, stale_epochs=3)
        table.ingest_reply(reply(1, 0, 0.5, 0.2), now=0.0)
        table.set_received(1, 0.3, now=0.4)
        assert table.is_fresh(1, 0.9)
        assert table.rows[1].received_at_neighbor == 0.3


class TestBitwiseReproducibility:
    def test_created_matches_direct_formula(self):
        # full handshake on a random placement: created values must equal the
        # direct power-law computation bit for bit
        rng = np.random.default_rng(31)
        pl = sample_placement(8, 300.0, rng, alpha=3.0)
        ch = ChannelModel(alpha=3.0)
        table = InformationTable(0)
        active = [(k, 1.0) for k in range(8)]
        for msg in emit_icp_requests(0, range(1, 8), 1.0):
            rep = handle_icp_request(msg.destination_id, msg, pl, ch, active)
            table.ingest_reply(rep, now=0.0)
        for j in range(1, 8):
            assert table.rows[j].created_at_neighbor == \
                received_power(1.0, pl.distance(0, j), 3.0)
