import io
import math

import pytest
from hypothesis import given, settings, strategies as st

from catmos.errors import MergeError
from catmos.netsim.oracle import expected_energy
from catmos.netsim.topology import line
from catmos.qmerge import (CostModel, Member, QuerySetState, SyntheticQuery, admit,
                           can_answer_from_cache, demux, estimate_cost, first_instant, gain,
                           merge, plan_energy, write_decision_log)
from catmos.query_model import RangeQuery
from catmos.sensing import Reading, ReadingDistribution

from conftest import TABLE1_ROWS, table1_queries


def Q(lo, hi, ep, life=100, qid=1):
    return RangeQuery("temp", lo, hi, ep, life, id=qid)


def state_with(*qs, now=0):
    st_ = QuerySetState()
    for q in qs:
        admit(st_, q, CostModel(), now, "off")
    return st_


def test_cache_answer_examples():
    s = state_with(Q(10, 50, 5))
    assert can_answer_from_cache(Q(15, 30, 10, qid=2), s)
    assert not can_answer_from_cache(Q(5, 55, 120, qid=2), s)
    assert can_answer_from_cache(Q(10, 50, 5, qid=2), s)
    assert not can_answer_from_cache(Q(15, 30, 7, qid=2), s)


def test_merge_examples():
    m = merge(Q(10, 50, 5), Q(15, 30, 10, qid=2))
    assert (m.query.min_value, m.query.max_value, m.query.epoch_s) == (10, 50, 5)
    m = merge(Q(10, 50, 5), Q(10, 40, 8, qid=2))
    assert (m.query.min_value, m.query.max_value, m.query.epoch_s) == (10, 50, 1)
    m = merge(Q(10, 50, 5), Q(10, 50, 5, qid=2))
    assert m.query == Q(10, 50, 5) and m.member_ids == {1, 2}
    m.check()


def test_merge_lifetime_covers_longest_member():
    m = merge(Q(10, 50, 5, life=10), Q(10, 50, 20, life=10, qid=2))
    # member 2 ends at t=180; merged epoch 5 from t=0 needs 37 instants.
    assert m.query.lifetime_epochs == 37 and m.end_t == 180


def test_merge_errors():
    with pytest.raises(MergeError):
        merge(Q(1, 2, 3), RangeQuery("light", 1, 2, 3, id=2))
    with pytest.raises(MergeError):
        merge(Q(1, 2, 3), Q(1, 2, 3))


def test_estimate_cost_full_support():
    m = CostModel(e_compress=0.0, header_bits=0, hops=(1,))
    assert estimate_cost(Q(0, 60, 1), m) == pytest.approx(6.4e-6, rel=1e-12)


def test_estimate_cost_disjoint_is_header_only():
    m = CostModel()
    assert estimate_cost(Q(70, 80, 2), m) == pytest.approx(96 * 0.4e-6 / 2, rel=1e-12)


def test_estimate_cost_matches_oracle_on_line():
    topo = line(6)  # base station plus 5 motes
    m = CostModel(hops=tuple(topo.hops[v] for v in topo.motes))
    for q in (Q(10, 50, 5, 20), Q(0.5, 12.3, 3, 7), Q(-5, 2, 4, 9), Q(30, 30, 1, 11)):
        expected = expected_energy([q], m)
        assert estimate_cost(q, m) * q.epoch_s * q.lifetime_epochs == pytest.approx(
            expected, rel=1e-9)


def test_gain_duplicate_equals_cost():
    m = CostModel(hops=(1, 2, 2))
    s = state_with(Q(10, 50, 5))
    assert gain(s, Q(10, 50, 5, qid=2), m) == pytest.approx(estimate_cost(Q(10, 50, 5), m))


def test_gain_disjoint_fine_epoch_negative():
    s = state_with(Q(0, 10, 120))
    assert gain(s, Q(40, 60, 1, qid=2), CostModel()) < 0


def test_gain_empty_state_zero():
    s = QuerySetState()
    assert gain(s, Q(1, 2, 3), CostModel()) == 0
    d = admit(s, Q(1, 2, 3), CostModel())
    assert d.kind == "standalone" and d.active_size == 1


def test_admit_decisions():
    m = CostModel()
    s = state_with(Q(10, 50, 5))
    d = admit(s, Q(15, 30, 10, life=50, qid=2), m)
    assert d.kind == "cache-answered" and d.network_query is None
    d = admit(s, Q(10, 50, 5, qid=3), m)
    assert d.kind == "cache-answered"
    s2 = state_with(Q(10, 40, 10))
    d = admit(s2, Q(10, 45, 10, qid=2), m)
    assert d.kind == "merged" and d.gain > 0 and d.active_size == 1
    assert s2.synthetics[d.sid].member_ids == {1, 2}
    s2.check()
    s3 = state_with(Q(0, 10, 120))
    d = admit(s3, Q(40, 60, 1, qid=2), m)
    assert d.kind == "standalone" and d.gain < 0 and d.active_size == 2
    s3.check()


def test_cache_answer_needs_time_coverage():
    s = state_with(Q(10, 50, 5, life=2))
    d = admit(s, Q(15, 30, 10, life=50, qid=2), CostModel())
    assert d.kind != "cache-answered"


def test_policies():
    s = state_with(Q(0, 10, 120))
    assert admit(s, Q(40, 60, 1, qid=2), CostModel(), 0, "always").kind == "merged"
    s = state_with(Q(10, 50, 5))
    assert admit(s, Q(10, 50, 5, qid=2), CostModel(), 0, "off").kind == "standalone"
    with pytest.raises(MergeError):
        admit(s, Q(1, 2, 3, qid=9), CostModel(), 0, "greedy")
    with pytest.raises(MergeError):
        admit(s, Q(1, 2, 3, qid=2), CostModel())


def test_reference_workload_admission_sequence(table1):
    s = QuerySetState()
    kinds = [admit(s, q, CostModel()).kind for q in table1]
    assert kinds == ["standalone", "standalone", "cache-answered", "merged", "merged",
                     "cache-answered", "merged", "standalone", "standalone", "standalone"]
    s.check()


def test_admit_deterministic(table1):
    logs = []
    for _ in range(2):
        s = QuerySetState()
        logs.append([admit(s, q, CostModel()) for q in table1])
    assert logs[0] == logs[1]


def test_demux_example():
    s = state_with(Q(10, 50, 5))
    admit(s, Q(15, 30, 10, life=50, qid=2), CostModel())
    for t in (0, 5):
        demux({1: []}, s, t)
    out = demux({1: [Reading(1, 10, 320), Reading(2, 10, 200)]}, s, 10)
    assert out.delivered[1] == [Reading(1, 10, 320), Reading(2, 10, 200)]
    assert out.delivered[2] == [Reading(2, 10, 200)]


def test_demux_only_due_members_receive():
    s = state_with(Q(10, 50, 5))
    admit(s, Q(15, 30, 10, life=50, qid=2), CostModel())
    assert set(demux({}, s, 0).delivered) == {1, 2}
    out = demux({1: [Reading(1, 5, 200)]}, s, 5)
    assert set(out.delivered) == {1}


def test_expiry_withdrawal_and_refit():
    s = state_with(Q(10, 50, 5, life=1))
    admit(s, Q(15, 30, 10, life=2, qid=2), CostModel(), 0, "always")
    sid = next(iter(s.synthetics))
    out = demux({}, s, 0)
    assert out.expired == [1] and 1 not in s.member_ids()
    assert out.refitted == [sid]
    q = s.synthetics[sid].query
    assert (q.min_value, q.max_value, q.epoch_s) == (15, 30, 10)
    assert not s.synthetics[sid].samples_at(5) and s.synthetics[sid].samples_at(10)
    out = demux({}, s, 10)
    assert out.expired == [2] and out.withdrawn == [sid] and not s.synthetics


def test_plan_energy_single_member_matches_rate():
    m = CostModel()
    q = Q(10, 50, 5, 20)
    assert plan_energy([Member.arriving(q)], m) == pytest.approx(
        estimate_cost(q, m) * 100, rel=1e-12)


def test_first_instant():
    assert first_instant(5, 0) == 0
    assert first_instant(5, 1) == 5
    assert first_instant(5, 10) == 10


def test_decision_log_csv(table1):
    s = QuerySetState()
    ds = [admit(s, q, CostModel()) for q in table1]
    buf = io.StringIO()
    write_decision_log(ds, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "query_id,decision,gain_J_per_s,active_set_size"
    assert len(lines) == 11 and lines[3].startswith("3,cache-answered,")


def test_synthetic_check_catches_violations():
    bad = SyntheticQuery(1, Q(10, 20, 5), {2: Member.arriving(Q(5, 20, 5, qid=2))})
    with pytest.raises(MergeError):
        bad.check()
    with pytest.raises(MergeError):
        SyntheticQuery(1, Q(10, 20, 5), {}).check()
    with pytest.raises(MergeError):
        SyntheticQuery(1, Q(0, 20, 3), {2: Member.arriving(Q(5, 20, 5, qid=2))}).check()


def test_cost_model_validation():
    with pytest.raises(MergeError):
        CostModel(e_tx=-1)
    with pytest.raises(MergeError):
        CostModel(readings_per_packet=0)
    with pytest.raises(MergeError):
        CostModel(hops=(0,))


row = st.sampled_from(TABLE1_ROWS)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(row, st.integers(1, 12), st.integers(0, 40)), min_size=1, max_size=6),
       st.sampled_from(["gain", "always", "off"]))
def test_invariants_hold_through_lifecycle(specs, policy):
    arrivals = {}
    for i, ((lo, hi, ep), life, at) in enumerate(specs, 1):
        arrivals.setdefault(at, []).append(Q(lo, hi, ep, life, i))
    s = QuerySetState()
    served = {i: 0 for i in range(1, len(specs) + 1)}
    t = 0
    while t <= max(arrivals) or s.synthetics:
        for q in arrivals.get(t, ()):
            admit(s, q, CostModel(), t, policy)
            s.check()
        out = demux({}, s, t)
        for mid in out.delivered:
            served[mid] += 1
        s.check()
        t += 1
    for i, ((lo, hi, ep), life, at) in enumerate(specs, 1):
        assert served[i] == life
