"""Base-station multi-query optimizer.

New queries are answered from a running synthetic query when one already
covers them, merged into the synthetic query that yields the largest
positive energy gain, or injected on their own. Results from a synthetic
query are filtered back out per member.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Mapping, Optional, Sequence, Union

from .errors import MergeError
from .query_model import RangeQuery
from .sensing import Reading, ReadingDistribution, bounds_tenths

POLICIES = ("gain", "always", "off")


def first_instant(epoch: int, now: int) -> int:
    """First sampling instant (multiple of ``epoch``) at or after ``now``."""
    return -(-now // epoch) * epoch


@dataclass
class Member:
    query: RangeQuery
    next_t: int
    remaining: int

    @classmethod
    def arriving(cls, q: RangeQuery, now: int = 0) -> "Member":
        return cls(q, first_instant(q.epoch_s, now), q.lifetime_epochs)

    @property
    def last_t(self) -> int:
        return self.next_t + (self.remaining - 1) * self.query.epoch_s


@dataclass
class SyntheticQuery:
    """A network query serving several original queries.

    ``query`` carries the merged range and epoch; its lifetime counts the
    merged-epoch instants from ``start_t`` through the last instant any
    member still needs.
    """

    sid: int
    query: RangeQuery
    members: dict[int, Member]
    start_t: int = 0

    @property
    def member_ids(self) -> set[int]:
        return set(self.members)

    @property
    def first_t(self) -> int:
        return first_instant(self.query.epoch_s, self.start_t)

    @property
    def end_t(self) -> int:
        return self.first_t + (self.query.lifetime_epochs - 1) * self.query.epoch_s

    def samples_at(self, t: int) -> bool:
        return self.first_t <= t <= self.end_t and t % self.query.epoch_s == 0

    def check(self) -> None:
        if not self.members:
            raise MergeError(f"synthetic query {self.sid} has no members")
        for m in self.members.values():
            q = m.query
            if not self.query.contains_range(q):
                raise MergeError(f"member {q.id} range escapes synthetic {self.sid}")
            if q.epoch_s % self.query.epoch_s:
                raise MergeError(f"synthetic epoch does not divide member {q.id} epoch")


def _as_synthetic(a: Union[RangeQuery, SyntheticQuery], now: int) -> SyntheticQuery:
    if isinstance(a, SyntheticQuery):
        return a
    return SyntheticQuery(a.id, a, {a.id: Member.arriving(a, now)}, now)


def _span(epoch: int, start: int, last: int) -> int:
    return (last - first_instant(epoch, start)) // epoch + 1


def merge(a: Union[RangeQuery, SyntheticQuery], b: RangeQuery, now: int = 0) -> SyntheticQuery:
    """Merge ``b`` into ``a``: range hull, gcd epoch, member union."""
    s = _as_synthetic(a, now)
    if s.query.attribute != b.attribute:
        raise MergeError(f"cannot merge {s.query.attribute} with {b.attribute}")
    members = {k: replace(m) for k, m in s.members.items()}
    if b.id in members:
        raise MergeError(f"query id {b.id} already served by synthetic {s.sid}")
    members[b.id] = Member.arriving(b, now)
    epoch = math.gcd(s.query.epoch_s, b.epoch_s)
    last = max(m.last_t for m in members.values())
    merged = RangeQuery(
        s.query.attribute,
        min(s.query.min_value, b.min_value),
        max(s.query.max_value, b.max_value),
        epoch,
        _span(epoch, now, last),
        id=s.sid,
    )
    return SyntheticQuery(s.sid, merged, members, now)


@dataclass(frozen=True)
class CostModel:
    """Closed-form expected radio/compression energy of a running query.

    ``hops`` lists the hop count of every sensing node. Each sampling epoch a
    node ships a matching reading (``reading_bits``) with probability
    ``p_match`` plus ``header_bits / readings_per_packet`` of header, and
    every hop re-transmits and re-compresses it.
    """

    e_tx: float = 0.4e-6
    e_compress: float = 0.86e-9
    reading_bits: int = 16
    header_bits: int = 96
    readings_per_packet: float = 1.0
    distribution: ReadingDistribution = field(default_factory=ReadingDistribution)
    hops: tuple[int, ...] = (1,)

    def __post_init__(self):
        if self.e_tx < 0 or self.e_compress < 0:
            raise MergeError("energies must be non-negative")
        if self.reading_bits < 0 or self.header_bits < 0:
            raise MergeError("bit counts must be non-negative")
        if self.readings_per_packet <= 0:
            raise MergeError("readings_per_packet must be positive")
        if any(h < 1 for h in self.hops):
            raise MergeError("sensing nodes sit at least one hop from the sink")


def estimate_cost(q: RangeQuery, m: CostModel) -> float:
    """Expected energy per second (J/s) of running ``q`` under ``m``."""
    p = m.distribution.p_match(q)
    per_hop = ((p * m.reading_bits + m.header_bits / m.readings_per_packet) * m.e_tx
               + p * m.reading_bits * m.e_compress)
    return sum(m.hops) * per_hop / q.epoch_s


@dataclass
class QuerySetState:
    synthetics: dict[int, SyntheticQuery] = field(default_factory=dict)
    next_sid: int = 1
    # Latest reading seen from each node: node -> (t, tenths).
    cache: dict[int, tuple[int, int]] = field(default_factory=dict)

    def active(self) -> list[SyntheticQuery]:
        return [self.synthetics[k] for k in sorted(self.synthetics)]

    def member_ids(self) -> set[int]:
        return {i for s in self.synthetics.values() for i in s.members}

    def check(self) -> None:
        seen: set[int] = set()
        for s in self.synthetics.values():
            s.check()
            for i, m in s.members.items():
                if i in seen:
                    raise MergeError(f"query {i} served twice")
                if m.remaining <= 0:
                    raise MergeError(f"expired query {i} still active")
                seen.add(i)


def can_answer_from_cache(q: RangeQuery, state: QuerySetState, now: int = 0) -> bool:
    return any(_answers(s, q) for s in state.synthetics.values())


def _answers(s: SyntheticQuery, q: RangeQuery) -> bool:
    return (s.query.attribute == q.attribute and s.query.contains_range(q)
            and q.epoch_s % s.query.epoch_s == 0)


def _covers_in_time(s: SyntheticQuery, q: RangeQuery, now: int) -> bool:
    return Member.arriving(q, now).last_t <= s.end_t


def _member_end(m: Member) -> int:
    """First instant after ``m``'s last sampling epoch has elapsed."""
    return m.next_t + m.remaining * m.query.epoch_s


def _hull(qs: Sequence[RangeQuery]) -> RangeQuery:
    epoch = 0
    for q in qs:
        epoch = math.gcd(epoch, q.epoch_s)
    return RangeQuery(qs[0].attribute, min(q.min_value for q in qs),
                      max(q.max_value for q in qs), epoch)


def plan_energy(members: Sequence[Member], m: CostModel, now: int = 0) -> float:
    """Expected energy (J) of serving ``members`` with one synthetic query.

    The synthetic query is the range hull and gcd epoch of the members still
    alive, refitted whenever one expires, so the cost rate is piecewise
    constant between member end times.
    """
    spans = [(m_.query, _member_end(m_)) for m_ in members]
    cuts = sorted({now} | {end for _, end in spans if end > now})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        alive = [q for q, end in spans if end > a]
        total += estimate_cost(_hull(alive), m) * (b - a)
    return total


def best_merge(state: QuerySetState, q_n: RangeQuery, m: CostModel,
               now: int = 0) -> tuple[float, Optional[int]]:
    """Largest merge gain for ``q_n`` and the synthetic achieving it.

    Gain compares the expected energy of the two plans over the remaining
    lifetime of every query involved, averaged over that horizon (J/s).
    """
    best_gain, best_sid = 0.0, None
    new = Member.arriving(q_n, now)
    e_new = plan_energy([new], m, now)
    for s in state.active():
        if s.query.attribute != q_n.attribute:
            continue
        old = list(s.members.values())
        horizon = max(_member_end(x) for x in old + [new]) - now
        g = (plan_energy(old, m, now) + e_new - plan_energy(old + [new], m, now)) / horizon
        if best_sid is None or g > best_gain:
            best_gain, best_sid = g, s.sid
    return best_gain, best_sid


def gain(state: QuerySetState, q_n: RangeQuery, m: CostModel, now: int = 0) -> float:
    """Energy per second saved by merging ``q_n`` into its best synthetic query.

    Unchanged synthetics cancel out of the before/after sums, so only the
    absorbing candidate is costed. An empty active set has gain 0. For a
    query arriving alongside an identical member the gain is exactly
    ``estimate_cost(q_n)``.
    """
    return best_merge(state, q_n, m, now)[0]


@dataclass(frozen=True)
class Decision:
    query_id: int
    kind: str  # cache-answered | merged | standalone
    gain: float
    sid: int
    active_size: int
    network_query: Optional[RangeQuery]  # newly injected query, if any


def admit(state: QuerySetState, q_n: RangeQuery, m: CostModel, now: int = 0,
          policy: str = "gain") -> Decision:
    """Place ``q_n`` in the query set, mutating ``state``."""
    if policy not in POLICIES:
        raise MergeError(f"unknown merge policy {policy!r}")
    if q_n.id in state.member_ids():
        raise MergeError(f"query id {q_n.id} already active")
    g, sid = best_merge(state, q_n, m, now)
    if policy != "off":
        for s in state.active():
            if _answers(s, q_n) and _covers_in_time(s, q_n, now):
                s.members[q_n.id] = Member.arriving(q_n, now)
                return Decision(q_n.id, "cache-answered", g, s.sid,
                                len(state.synthetics), None)
        if sid is not None and (g > 0 or policy == "always"):
            merged = merge(state.synthetics[sid], q_n, now)
            state.synthetics[sid] = merged
            return Decision(q_n.id, "merged", g, sid, len(state.synthetics), merged.query)
    sid = state.next_sid
    state.next_sid += 1
    first = Member.arriving(q_n, now)
    s = SyntheticQuery(sid, q_n.with_id(sid), {q_n.id: first}, now)
    state.synthetics[sid] = s
    return Decision(q_n.id, "standalone", g, sid, len(state.synthetics), s.query)


@dataclass
class DemuxResult:
    delivered: dict[int, list[Reading]] = field(default_factory=dict)
    expired: list[int] = field(default_factory=list)
    withdrawn: list[int] = field(default_factory=list)
    refitted: list[int] = field(default_factory=list)


def demux(results: Mapping[int, Sequence[Reading]], state: QuerySetState, t: int) -> DemuxResult:
    """Route readings of every synthetic query sampling at ``t`` to its members.

    ``results`` maps synthetic id to the readings received at ``t``; a
    synthetic that sampled but heard nothing maps to nothing. Members due at
    ``t`` consume one epoch whether or not any reading matched.
    """
    out = DemuxResult()
    for s in state.active():
        if not s.samples_at(t):
            continue
        readings = results.get(s.sid, ())
        for r in readings:
            state.cache[r.node] = (r.t, r.tenths)
        for mid in sorted(s.members):
            member = s.members[mid]
            if member.next_t != t:
                continue
            lo, hi = bounds_tenths(member.query)
            out.delivered[mid] = [r for r in readings if lo <= r.tenths <= hi]
            member.remaining -= 1
            member.next_t += member.query.epoch_s
            if member.remaining == 0:
                del s.members[mid]
                out.expired.append(mid)
        if not s.members:
            del state.synthetics[s.sid]
            out.withdrawn.append(s.sid)
        elif refit(s, t + 1):
            out.refitted.append(s.sid)
    return out


def refit(s: SyntheticQuery, now: int) -> bool:
    """Shrink ``s`` to the range hull and gcd epoch of its remaining members.

    Returns True when the network query changed and must be re-injected.
    """
    qs = [m.query for m in s.members.values()]
    epoch = 0
    for q in qs:
        epoch = math.gcd(epoch, q.epoch_s)
    lo = min(q.min_value for q in qs)
    hi = max(q.max_value for q in qs)
    cur = s.query
    if (lo, hi, epoch) == (cur.min_value, cur.max_value, cur.epoch_s):
        return False
    last = max(m.last_t for m in s.members.values())
    s.query = RangeQuery(cur.attribute, lo, hi, epoch, _span(epoch, now, last), id=s.sid)
    s.start_t = now
    return True


DECISION_FIELDS = ("query_id", "decision", "gain_J_per_s", "active_set_size")


def write_decision_log(decisions: Iterable[Decision], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(DECISION_FIELDS)
    for d in decisions:
        w.writerow([d.query_id, d.kind, repr(d.gain), d.active_size])
