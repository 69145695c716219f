"""Scenario files: flat ``key = value`` lines plus repeated ``query =`` lines.

Example::

    # reference workload
    nodes = 20
    branching = 2
    seed = 1
    query = temp,10,50,5,100
    query = temp,10,40,8,100

A query line is ``attr,min,max,epoch,lifetime[,arrival_s]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Union

from ..codec import CODEC_IDS, MODES
from ..errors import CatmosError, ScenarioError
from ..netsim.energy import COMPRESS_J_PER_BIT, TX_J_PER_BIT, EnergyModel
from ..netsim.topology import Topology, build_tree
from ..qmerge import POLICIES, CostModel
from ..query_model import RangeQuery
from ..sensing import ReadingDistribution


@dataclass(frozen=True)
class Scenario:
    nodes: int = 20
    branching: int = 2
    seed: int = 1
    e_tx: float = TX_J_PER_BIT
    e_compress: float = COMPRESS_J_PER_BIT
    e_rx: float = 0.0
    e_sense: float = 0.0
    codec: str = "huffman"
    codec_mode: str = "payload"
    deflate_envelope: int = 64
    header_bits: int = 96
    reading_bits: int = 16
    readings_per_packet: float = 1.0
    reading_lo: float = 0.0
    reading_hi: float = 60.0
    static_vars: bool = True
    static_vars_max_entries: int = 8
    merge_policy: str = "gain"
    queries: tuple[RangeQuery, ...] = ()
    arrivals: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.queries:
            raise ScenarioError("scenario needs at least one query")
        if len(self.arrivals) != len(self.queries):
            raise ScenarioError("every query needs an arrival time")
        if any(a < 0 for a in self.arrivals):
            raise ScenarioError("arrival times must be non-negative")
        if len({q.id for q in self.queries}) != len(self.queries):
            raise ScenarioError("query ids must be unique")
        if self.nodes < 2:
            raise ScenarioError("need the base station plus at least one mote")
        if self.branching < 1:
            raise ScenarioError("branching must be positive")
        if self.codec not in CODEC_IDS:
            raise ScenarioError(f"codec must be one of {CODEC_IDS}")
        if self.codec_mode not in MODES:
            raise ScenarioError(f"codec_mode must be one of {MODES}")
        if self.merge_policy not in POLICIES:
            raise ScenarioError(f"merge_policy must be one of {POLICIES}")
        if self.deflate_envelope < 0 or self.header_bits < 0 or self.reading_bits < 0:
            raise ScenarioError("sizes must be non-negative")
        if not 0 <= self.static_vars_max_entries <= 128:
            raise ScenarioError("static_vars_max_entries must be within 0..128")
        try:
            self.energy_model()
            self.distribution()
            CostModel(readings_per_packet=self.readings_per_packet)
        except (CatmosError, ValueError) as exc:
            raise ScenarioError(str(exc)) from None

    def topology(self) -> Topology:
        return build_tree(self.nodes, self.branching)

    def energy_model(self) -> EnergyModel:
        return EnergyModel(self.e_tx, self.e_compress, self.e_rx, self.e_sense)

    def distribution(self) -> ReadingDistribution:
        return ReadingDistribution(self.reading_lo, self.reading_hi)

    def cost_model(self) -> CostModel:
        topo = self.topology()
        return CostModel(
            e_tx=self.e_tx,
            e_compress=self.e_compress,
            reading_bits=self.reading_bits,
            header_bits=self.header_bits,
            readings_per_packet=self.readings_per_packet,
            distribution=self.distribution(),
            hops=tuple(topo.hops[v] for v in topo.motes),
        )

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)


_KEYS = {f.name: f for f in fields(Scenario) if f.name not in ("queries", "arrivals")}
_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


def _convert(key: str, raw: str, lineno: int):
    kind = _KEYS[key].type
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            return _BOOL[raw.lower()]
        return raw
    except (KeyError, ValueError):
        raise ScenarioError(f"line {lineno}: invalid value {raw!r} for {key}") from None


def parse_query_line(raw: str, query_id: int, lineno: int = 0) -> tuple[RangeQuery, int]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) not in (5, 6):
        raise ScenarioError(
            f"line {lineno}: query needs attr,min,max,epoch,lifetime[,arrival]")
    try:
        attr = parts[0]
        lo, hi = (float(p) if "." in p else int(p) for p in parts[1:3])
        epoch, lifetime = int(parts[3]), int(parts[4])
        arrival = int(parts[5]) if len(parts) == 6 else 0
        return RangeQuery(attr, lo, hi, epoch, lifetime, id=query_id), arrival
    except CatmosError as exc:
        raise ScenarioError(f"line {lineno}: {exc}") from None
    except ValueError:
        raise ScenarioError(f"line {lineno}: malformed query {raw!r}") from None


def loads_scenario(text: str) -> Scenario:
    values: dict = {}
    queries: list[RangeQuery] = []
    arrivals: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip(), raw.strip()
        if not sep:
            raise ScenarioError(f"line {lineno}: expected key = value")
        if key == "query":
            q, arrival = parse_query_line(raw, len(queries) + 1, lineno)
            queries.append(q)
            arrivals.append(arrival)
        elif key in _KEYS:
            if key in values:
                raise ScenarioError(f"line {lineno}: duplicate key {key}")
            values[key] = _convert(key, raw, lineno)
        else:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
    if not queries:
        raise ScenarioError("scenario has no query lines")
    return Scenario(**values, queries=tuple(queries), arrivals=tuple(arrivals))


def load_scenario(path: Union[str, Path]) -> Scenario:
    p = Path(path)
    if not p.is_file():
        raise ScenarioError(f"scenario file not found: {p}")
    return loads_scenario(p.read_text(encoding="utf-8"))


def dumps_scenario(s: Scenario) -> str:
    lines = []
    for name in _KEYS:
        v = getattr(s, name)
        lines.append(f"{name} = {str(v).lower() if isinstance(v, bool) else v}")
    for q, a in zip(s.queries, s.arrivals):
        lines.append(f"query = {q.attribute},{q.min_value},{q.max_value},"
                     f"{q.epoch_s},{q.lifetime_epochs},{a}")
    return "\n".join(lines) + "\n"


def scenario_from_queries(queries, **settings) -> Scenario:
    """Scenario over ``queries`` (RangeQuery or (min, max, epoch[, lifetime]) tuples)."""
    qs = []
    for i, q in enumerate(queries, 1):
        if not isinstance(q, RangeQuery):
            lo, hi, epoch, *rest = q
            q = RangeQuery("temp", lo, hi, epoch, rest[0] if rest else 100)
        qs.append(q.with_id(i))
    arrivals = settings.pop("arrivals", (0,) * len(qs))
    return Scenario(queries=tuple(qs), arrivals=tuple(arrivals), **settings)


__all__ = ["Scenario", "load_scenario", "loads_scenario", "dumps_scenario",
           "parse_query_line", "scenario_from_queries"]
