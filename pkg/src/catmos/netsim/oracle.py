"""Exhaustive expected-energy oracle for a query workload.

Walks the base station's query-set evolution tick by tick and, for every
network query sampling at a tick, sums the per-hop energy over every grid
value a reading can take. Shares no arithmetic with the closed-form cost
model, so the two can check each other.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from typing import Optional, Sequence

from ..qmerge import CostModel, QuerySetState, admit, demux
from ..query_model import RangeQuery


def match_probability(q: RangeQuery, model: CostModel) -> Fraction:
    """Fraction of grid readings inside ``q``'s inclusive range."""
    g_lo, g_hi = model.distribution.grid
    lo, hi = Decimal(repr(q.min_value)), Decimal(repr(q.max_value))
    hits = sum(1 for g in range(g_lo, g_hi + 1) if lo <= Decimal(g) / 10 <= hi)
    return Fraction(hits, g_hi - g_lo + 1)


def schedule(queries: Sequence[RangeQuery], model: CostModel, policy: str = "off",
             arrivals: Optional[Sequence[int]] = None):
    """Yield ``(t, network_queries_sampling_at_t)`` until every query is fulfilled."""
    arrivals = arrivals or [0] * len(queries)
    due: dict[int, list[RangeQuery]] = {}
    for q, a in zip(queries, arrivals):
        due.setdefault(a, []).append(q)
    state = QuerySetState()
    last = max(due)
    t = 0
    while t <= last or state.synthetics:
        for q in due.get(t, ()):
            admit(state, q, model, t, policy)
        sampling = [s.query for s in state.active() if s.samples_at(t)]
        if sampling:
            yield t, sampling
            demux({}, state, t)
        t += 1


def expected_energy(queries: Sequence[RangeQuery], model: CostModel, policy: str = "off",
                    arrivals: Optional[Sequence[int]] = None) -> float:
    """Expected data-path energy (J) of the workload under ``policy``."""
    hop_sum = sum(model.hops)
    header = Fraction(model.header_bits) / Fraction(model.readings_per_packet)
    e_tx, e_c = Fraction(model.e_tx), Fraction(model.e_compress)
    probs: dict[tuple, Fraction] = {}
    total = Fraction(0)
    for _, sampling in schedule(queries, model, policy, arrivals):
        for q in sampling:
            key = (q.min_value, q.max_value)
            if key not in probs:
                probs[key] = match_probability(q, model)
            reading = probs[key] * model.reading_bits
            total += hop_sum * ((reading + header) * e_tx + reading * e_c)
    return float(total)


__all__ = ["expected_energy", "match_probability", "schedule"]
