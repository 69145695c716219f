"""Deterministic tick-driven simulation of a multi-hop sensor network.

Three modes share readings for a given seed:

* ``baseline``: raw record text, one packet per source per query, forwarded
  hop by hop unchanged; every user query goes to the network as is.
* ``compress-only``: records compressed at the source; relays decode their
  children's packets, append their own records and recompress into one
  packet per query per tick.
* ``catmos``: compress-only plus static-variable query rewriting and
  base-station merging.
"""

from __future__ import annotations

import csv
import random
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from typing import IO, TYPE_CHECKING, Iterable, Optional, Sequence

from .. import codec as codecs
from ..codec import CompressedBlob, HuffmanCodebook
from ..errors import CodecError, ScenarioError
from ..qmerge import CostModel, Decision, QuerySetState, admit, demux
from ..query_model import RangeQuery, serialize
from ..sensing import Reading, ReadingDistribution, bounds_tenths
from ..static_vars import StaticVarDictionary, build_dictionary, substitute
from .energy import EnergyLedger
from .topology import ROOT, Topology

if TYPE_CHECKING:
    from ..harness.scenario import Scenario

MODES = ("baseline", "compress-only", "catmos")
RECORD_ALPHABET = b"0123456789:;.-"
DEFAULT_RAM_BYTES = 1 << 20
_BLOCK = 1024


# -- readings -----------------------------------------------------------------

class ReadingSource:
    """Seeded per-node reading streams, independent of which queries run.

    The reading of node ``v`` at tick ``t`` depends only on
    ``(seed, v, t // 1024)`` so every mode sees the same values.
    """

    def __init__(self, seed: int, distribution: ReadingDistribution):
        self.seed = seed
        self.lo, self.hi = distribution.grid
        self._blocks: dict[tuple[int, int], list[int]] = {}

    def tenths(self, node: int, t: int) -> int:
        key = (node, t // _BLOCK)
        block = self._blocks.get(key)
        if block is None:
            rng = random.Random(f"readings/{self.seed}/{node}/{key[1]}")
            block = [rng.randint(self.lo, self.hi) for _ in range(_BLOCK)]
            self._blocks[key] = block
        return block[t % _BLOCK]


@dataclass
class Mote:
    id: int
    parent: Optional[int]
    installed: dict[int, bytes] = field(default_factory=dict)
    dictionary: Optional[StaticVarDictionary] = None
    resident_bytes: int = 0
    ram_budget: int = DEFAULT_RAM_BYTES

    def install_tables(self, nbytes: int) -> None:
        if self.resident_bytes + nbytes > self.ram_budget:
            raise ScenarioError(f"mote {self.id}: tables exceed {self.ram_budget} bytes of RAM")
        self.resident_bytes += nbytes


def sense_epoch(mote: Mote, t: int, source: ReadingSource, ledger: EnergyLedger) -> Reading:
    ledger.sense(mote.id)
    return Reading(mote.id, t, source.tenths(mote.id, t))


# -- record text --------------------------------------------------------------

def format_record(r: Reading) -> str:
    sign = "-" if r.tenths < 0 else ""
    a = abs(r.tenths)
    return f"{r.node}:{r.t}:{sign}{a // 10}.{a % 10};"


def tokenize_stream(readings: Iterable[Reading]) -> bytes:
    """Render readings as ``node:t:value;`` records in (node, t) order."""
    return "".join(format_record(r) for r in sorted(readings)).encode("ascii")


def parse_records(data: bytes) -> list[Reading]:
    out = []
    text = data.decode("ascii")
    if text and not text.endswith(";"):
        raise CodecError("record stream not terminated by ';'")
    for rec in text.split(";")[:-1]:
        try:
            node, t, value = rec.split(":")
            out.append(Reading(int(node), int(t), int(Decimal(value) * 10)))
        except ValueError:
            raise CodecError(f"malformed record {rec!r}") from None
    return out


# -- codecs as used on the air ------------------------------------------------

def _smoothed_codebook(sample: bytes, alphabet: Iterable[int]) -> HuffmanCodebook:
    counts = Counter(sample)
    freqs = [0] * 256
    for s in alphabet:
        freqs[s] = counts.get(s, 0) + 1
    return HuffmanCodebook.from_frequencies(freqs)


CODEBOOK_BYTES = 256


class LinkCodec:
    """Codec configuration shared by every node in a run.

    Huffman uses static codebooks agreed at setup (one for records, one for
    query text); LZW and Deflate are self-describing.
    """

    def __init__(self, codec_id: Optional[str], mode: str = "payload", envelope: int = 64,
                 record_book: Optional[HuffmanCodebook] = None,
                 query_book: Optional[HuffmanCodebook] = None):
        self.codec_id = codec_id
        self.mode = mode
        self.envelope = envelope
        self.record_book = record_book
        self.query_book = query_book

    @property
    def shared_books(self) -> bool:
        return self.codec_id == "huffman" and self.mode == "payload"

    def setup_tables(self) -> list[int]:
        """Sizes in bytes of the tables each node must receive before t=0."""
        if self.shared_books:
            return [CODEBOOK_BYTES, CODEBOOK_BYTES]
        return []

    def _encode(self, data: bytes, book) -> CompressedBlob:
        if self.codec_id is None:
            return CompressedBlob("raw", data, 8 * len(data), len(data))
        if self.codec_id == "huffman":
            return codecs.huffman_encode(data, self.mode, book if self.shared_books else None)
        return codecs.encode(self.codec_id, data, self.mode, envelope_bytes=self.envelope)

    def _decode(self, blob: CompressedBlob, book) -> bytes:
        if blob.codec_id == "raw":
            return blob.payload
        return codecs.decode(blob, codebook=book)

    def encode_records(self, data: bytes) -> CompressedBlob:
        return self._encode(data, self.record_book)

    def decode_records(self, blob: CompressedBlob) -> bytes:
        return self._decode(blob, self.record_book)

    def encode_query(self, data: bytes) -> CompressedBlob:
        return self._encode(data, self.query_book)

    def decode_query(self, blob: CompressedBlob) -> bytes:
        return self._decode(blob, self.query_book)


@dataclass(frozen=True)
class Packet:
    header_bits: int
    payload: CompressedBlob
    source: int
    t: int
    query_id: int

    @property
    def bits(self) -> int:
        return self.header_bits + self.payload.total_bits


# -- report -------------------------------------------------------------------

@dataclass
class SimReport:
    mode: str
    seed: int
    ledger: EnergyLedger
    delivered: dict[int, list[Reading]]
    data_bits: int = 0
    control_bits: int = 0
    series: dict[int, int] = field(default_factory=dict)
    decisions: list[Decision] = field(default_factory=list)
    network_queries: int = 0
    dictionary: Optional[StaticVarDictionary] = None

    @property
    def bits_on_air(self) -> int:
        return self.data_bits + self.control_bits

    @property
    def total_J(self) -> float:
        return self.ledger.total_J

    def write_ledger_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "tx_bits", "rx_bits", "compress_bits", "readings",
                    "tx_J", "rx_J", "compress_J", "sense_J", "total_J"])
        for v, n in enumerate(self.ledger.nodes):
            j = self.ledger.node_joules(v)
            w.writerow([v, n.tx_bits, n.rx_bits, n.compress_bits, n.readings,
                        repr(j["tx_J"]), repr(j["rx_J"]), repr(j["compress_J"]),
                        repr(j["sense_J"]), repr(j["total_J"])])
        tot = self.ledger.totals()
        w.writerow(["total", self.ledger.tx_bits, self.ledger.rx_bits,
                    self.ledger.compress_bits, self.ledger.readings,
                    repr(tot["tx_J"]), repr(tot["rx_J"]), repr(tot["compress_J"]),
                    repr(tot["sense_J"]), repr(tot["total_J"])])

    def write_series_csv(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "bits"])
        for t in sorted(self.series):
            w.writerow([t, self.series[t]])


# -- simulation ---------------------------------------------------------------

class _Network:
    def __init__(self, topo: Topology, ledger: EnergyLedger, header_bits: int):
        self.topo = topo
        self.ledger = ledger
        self.header_bits = header_bits
        self.data_bits = 0
        self.control_bits = 0
        self.series: dict[int, int] = {}

    def _air(self, t: int, bits: int, control: bool) -> None:
        if control:
            self.control_bits += bits
        else:
            self.data_bits += bits
        self.series[t] = self.series.get(t, 0) + bits

    def hop(self, sender: int, bits: int, t: int, control: bool = False) -> None:
        self.ledger.tx(sender, bits)
        self.ledger.rx(self.topo.parent[sender], bits)
        self._air(t, bits, control)

    def flood(self, payload_bits: int, t: int) -> None:
        """Broadcast from the base station: every relay transmits once."""
        bits = self.header_bits + payload_bits
        for v in self.topo.relays():
            self.ledger.tx(v, bits)
            for c in self.topo.children[v]:
                self.ledger.rx(c, bits)
            self._air(t, bits, True)


def aggregate_and_forward(node: int, child_packets: Sequence[Packet], own: Sequence[Reading],
                          link: LinkCodec, net: _Network, t: int, query_id: int) -> Optional[Packet]:
    """Merge children's records with ``own`` into one recompressed packet to the parent."""
    records = list(own)
    for p in child_packets:
        records.extend(parse_records(link.decode_records(p.payload)))
    if not records:
        return None
    text = tokenize_stream(records)
    if link.codec_id is not None:
        net.ledger.compress(node, 8 * len(text))
    blob = link.encode_records(text)
    packet = Packet(net.header_bits, blob, node, t, query_id)
    net.hop(node, packet.bits, t)
    return packet


def _calibration_records(topo: Topology, dist: ReadingDistribution, horizon: int) -> bytes:
    rng = random.Random("record-calibration")
    g_lo, g_hi = dist.grid
    sample = []
    for i in range(2000):
        v = topo.motes[i % len(topo.motes)]
        sample.append(Reading(v, rng.randrange(max(horizon, 1)), rng.randint(g_lo, g_hi)))
    return tokenize_stream(sample)


def _horizon(scenario: "Scenario") -> int:
    return max(a + q.epoch_s * q.lifetime_epochs
               for q, a in zip(scenario.queries, scenario.arrivals))


def run(scenario: "Scenario", mode: str, seed: Optional[int] = None) -> SimReport:
    """Simulate ``scenario`` in ``mode`` until every query is fulfilled."""
    if mode not in MODES:
        raise ScenarioError(f"unknown mode {mode!r}; expected one of {MODES}")
    seed = scenario.seed if seed is None else seed
    topo = scenario.topology()
    dist = scenario.distribution()
    ledger = EnergyLedger.for_nodes(topo.n_nodes, scenario.energy_model())
    net = _Network(topo, ledger, scenario.header_bits)
    source = ReadingSource(seed, dist)
    motes = [Mote(v, topo.parent[v]) for v in range(topo.n_nodes)]
    cost: CostModel = scenario.cost_model()

    compressed = mode != "baseline"
    policy = scenario.merge_policy if mode == "catmos" else "off"
    dictionary = None
    if mode == "catmos" and scenario.static_vars:
        dictionary = build_dictionary([serialize(q) for q in scenario.queries],
                                      scenario.static_vars_max_entries)

    def query_bytes(q: RangeQuery) -> bytes:
        text = serialize(q)
        return substitute(text, dictionary) if dictionary else text.encode()

    link = LinkCodec(None)
    if compressed:
        record_book = query_book = None
        if scenario.codec == "huffman" and scenario.codec_mode == "payload":
            record_book = _smoothed_codebook(
                _calibration_records(topo, dist, _horizon(scenario)), RECORD_ALPHABET)
            query_alphabet = list(range(32, 127))
            if dictionary:
                query_alphabet += [tok for _, tok in dictionary.entries]
            query_book = _smoothed_codebook(
                b"".join(query_bytes(q) for q in scenario.queries), query_alphabet)
        link = LinkCodec(scenario.codec, scenario.codec_mode, scenario.deflate_envelope,
                         record_book, query_book)

    # Setup: shared tables reach every node before the first tick.
    setup = list(link.setup_tables())
    if dictionary:
        setup.append(dictionary.size_bytes())
    for nbytes in setup:
        net.flood(8 * nbytes, 0)
        for m in motes[1:]:
            m.install_tables(nbytes)
    if dictionary:
        for m in motes[1:]:
            m.dictionary = dictionary

    def inject(q: RangeQuery, t: int) -> None:
        data = query_bytes(q)
        blob = link.encode_query(data) if compressed else CompressedBlob(
            "raw", data, 8 * len(data), len(data))
        if compressed:
            ledger.compress(ROOT, 8 * len(data))
        net.flood(blob.total_bits, t)
        for m in motes[1:]:
            m.installed[q.id] = data

    state = QuerySetState()
    arrivals: dict[int, list[RangeQuery]] = {}
    for q, a in zip(scenario.queries, scenario.arrivals):
        arrivals.setdefault(a, []).append(q)
    last_arrival = max(arrivals)
    delivered: dict[int, list[Reading]] = {q.id: [] for q in scenario.queries}
    decisions: list[Decision] = []
    injected = 0

    t = 0
    while t <= last_arrival or state.synthetics:
        for q in arrivals.get(t, ()):
            d = admit(state, q, cost, t, policy)
            decisions.append(d)
            if d.network_query is not None:
                inject(d.network_query, t)
                injected += 1
        sampling = [s for s in state.active() if s.samples_at(t)]
        if not sampling:
            t += 1
            continue
        readings = {v: sense_epoch(motes[v], t, source, ledger) for v in topo.motes}
        results: dict[int, list[Reading]] = {}
        for s in sampling:
            lo, hi = bounds_tenths(s.query)
            own = {v: r for v, r in readings.items() if lo <= r.tenths <= hi}
            results[s.sid] = _forward(topo, own, link, net, t, s.sid, compressed)
        out = demux(results, state, t)
        for mid, rs in out.delivered.items():
            delivered[mid].extend(rs)
        for sid in out.refitted:
            inject(state.synthetics[sid].query, t)
            injected += 1
        t += 1

    for rs in delivered.values():
        rs.sort()
    return SimReport(mode, seed, ledger, delivered, net.data_bits, net.control_bits,
                     net.series, decisions, injected, dictionary)


def _forward(topo: Topology, own: dict[int, Reading], link: LinkCodec, net: _Network,
             t: int, qid: int, compressed: bool) -> list[Reading]:
    """Carry one query's matching readings at tick ``t`` to the base station."""
    if not compressed:
        got = []
        for v, r in own.items():
            data = tokenize_stream([r])
            bits = net.header_bits + 8 * len(data)
            for u in topo.path_to_root(v)[:-1]:
                net.hop(u, bits, t)
            got.extend(parse_records(data))
        return sorted(got)
    inbox: dict[int, list[Packet]] = {}
    for v in topo.bottom_up:
        kids = inbox.pop(v, [])
        mine = [own[v]] if v in own else []
        p = aggregate_and_forward(v, kids, mine, link, net, t, qid)
        if p is not None:
            inbox.setdefault(topo.parent[v], []).append(p)
    got = []
    for p in inbox.get(ROOT, []):
        got.extend(parse_records(link.decode_records(p.payload)))
    return sorted(got)
