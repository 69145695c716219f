"""Run every mode on identical seeds and emit comparison and plot-data CSVs."""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .. import codec as codecs
from ..netsim import MODES, SimReport, run
from ..qmerge import write_decision_log
from ..query_model import RangeQuery, serialize
from ..static_vars import StaticVarDictionary, build_dictionary, substitute
from .scenario import Scenario

REFERENCE_REDUCTION_PCT = 10.29


def reduction_pct(baseline_J: float, other_J: float) -> float:
    """Percentage of baseline energy saved; no rounding."""
    if baseline_J == 0:
        return 0.0 if other_J == 0 else -math.inf
    return (baseline_J - other_J) / baseline_J * 100


def generate_corpus(n: int, seed: int = 0) -> list[RangeQuery]:
    """``n`` grammar-valid temperature queries shaped like the reference workload."""
    rng = random.Random(f"corpus/{seed}")
    epochs = (5, 8, 10, 20, 30, 40, 50, 60, 70, 90, 120, 130)
    out = []
    for i in range(1, n + 1):
        lo = rng.randrange(0, 45, 5)
        hi = rng.randrange(lo + 5, 65, 5)
        if rng.random() < 0.2:
            lo += rng.randint(1, 9) / 10
        out.append(RangeQuery("temp", lo, hi, rng.choice(epochs), 100, id=i))
    return out


@dataclass(frozen=True)
class SizeRow:
    query_id: int
    original_bytes: int
    huffman_bytes: int
    lzw_bytes: int
    deflate_bytes: int


def query_sizes(queries: Sequence[RangeQuery], mode: str = "payload",
                envelope: int = codecs.DEFAULT_ENVELOPE_BYTES) -> list[SizeRow]:
    rows = []
    for q in queries:
        data = serialize(q).encode()
        sizes = [codecs.encode(c, data, mode, envelope_bytes=envelope).total_bytes
                 for c in ("huffman", "lzw", "deflate")]
        rows.append(SizeRow(q.id, len(data), *sizes))
    return rows


@dataclass(frozen=True)
class StaticVarRow:
    query_id: int
    codec: str
    original_bytes: int
    substituted_bytes: int
    compressed_without: int
    compressed_with: int

    @property
    def factor_without(self) -> float:
        return codecs.compression_factor(self.original_bytes, self.compressed_without)

    @property
    def factor_with_vs_substituted(self) -> float:
        return codecs.compression_factor(self.substituted_bytes, self.compressed_with)

    @property
    def factor_with_vs_original(self) -> float:
        return codecs.compression_factor(self.original_bytes, self.compressed_with)


def static_var_sizes(queries: Sequence[RangeQuery], d: StaticVarDictionary,
                     mode: str = "payload") -> list[StaticVarRow]:
    rows = []
    for q in queries:
        plain = serialize(q).encode()
        sub = substitute(serialize(q), d)
        for c in ("huffman", "lzw"):
            rows.append(StaticVarRow(q.id, c, len(plain), len(sub),
                                     codecs.encode(c, plain, mode).total_bytes,
                                     codecs.encode(c, sub, mode).total_bytes))
    return rows


@dataclass
class ExperimentReport:
    scenario: Scenario
    seeds: tuple[int, ...]
    runs: dict[tuple[int, str], SimReport] = field(default_factory=dict)

    def energy(self, seed: int, mode: str) -> float:
        return self.runs[(seed, mode)].total_J

    def reduction(self, seed: int, mode: str = "catmos") -> float:
        return reduction_pct(self.energy(seed, "baseline"), self.energy(seed, mode))

    def mean_reduction(self, mode: str = "catmos") -> float:
        return sum(self.reduction(s, mode) for s in self.seeds) / len(self.seeds)

    def lossless(self) -> bool:
        return all(self.runs[(s, m)].delivered == self.runs[(s, "baseline")].delivered
                   for s in self.seeds for m in MODES)

    def summary_lines(self) -> list[str]:
        lines = []
        for s in self.seeds:
            parts = [f"{m}={self.energy(s, m):.6f} J" for m in MODES]
            lines.append(f"seed {s}: " + " ".join(parts)
                         + f" reduction={self.reduction(s):.2f}%")
        lines.append(f"mean reduction: compress-only {self.mean_reduction('compress-only'):.2f}%,"
                     f" catmos {self.mean_reduction():.2f}%"
                     f" (reference figure {REFERENCE_REDUCTION_PCT:.2f}%)")
        return lines


def run_experiment(scenario: Scenario, seeds: Optional[Iterable[int]] = None,
                   out: Union[str, Path, None] = None) -> ExperimentReport:
    seeds = tuple(seeds) if seeds is not None else (scenario.seed,)
    report = ExperimentReport(scenario, seeds)
    for s in seeds:
        for m in MODES:
            report.runs[(s, m)] = run(scenario, m, s)
    if out is not None:
        write_outputs(report, Path(out))
    return report


def _csv(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_outputs(report: ExperimentReport, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    sc = report.scenario
    written = []

    path = out / "energy.csv"
    rows = []
    for s in report.seeds:
        for m in MODES:
            r = report.runs[(s, m)]
            tot = r.ledger.totals()
            rows.append([s, m, repr(r.total_J), repr(tot["tx_J"]), repr(tot["compress_J"]),
                         r.bits_on_air, r.data_bits, r.control_bits, r.network_queries,
                         repr(report.reduction(s, m))])
    _csv(path, ["seed", "mode", "total_J", "tx_J", "compress_J", "bits_on_air",
                "data_bits", "control_bits", "network_queries", "reduction_pct"], rows)
    written.append(path)

    path = out / "fig4_query_sizes.csv"
    _csv(path, ["query_id", "original_bytes", "huffman_bytes", "lzw_bytes", "deflate_bytes"],
         [[r.query_id, r.original_bytes, r.huffman_bytes, r.lzw_bytes, r.deflate_bytes]
          for r in query_sizes(sc.queries, sc.codec_mode, sc.deflate_envelope)])
    written.append(path)

    path = out / "fig5_static_vars.csv"
    d = build_dictionary([serialize(q) for q in sc.queries], sc.static_vars_max_entries)
    _csv(path, ["query_id", "codec", "original_bytes", "substituted_bytes",
                "compressed_without", "compressed_with", "factor_without",
                "factor_with_vs_substituted", "factor_with_vs_original"],
         [[r.query_id, r.codec, r.original_bytes, r.substituted_bytes, r.compressed_without,
           r.compressed_with, repr(r.factor_without), repr(r.factor_with_vs_substituted),
           repr(r.factor_with_vs_original)] for r in static_var_sizes(sc.queries, d, sc.codec_mode)])
    written.append(path)

    path = out / "fig6_energy_gain.csv"
    _csv(path, ["seed", "baseline_J", "compress_only_J", "catmos_J", "gain_J", "reduction_pct"],
         [[s, repr(report.energy(s, "baseline")), repr(report.energy(s, "compress-only")),
           repr(report.energy(s, "catmos")),
           repr(report.energy(s, "baseline") - report.energy(s, "catmos")),
           repr(report.reduction(s))] for s in report.seeds])
    written.append(path)

    first = report.seeds[0]
    series = {m: report.runs[(first, m)].series for m in MODES}
    ticks = sorted(set().union(*series.values()))
    path = out / "fig6_bits_series.csv"
    _csv(path, ["t", *(f"{m}_bits" for m in MODES)],
         [[t, *(series[m].get(t, 0) for m in MODES)] for t in ticks])
    written.append(path)

    for m in MODES:
        r = report.runs[(first, m)]
        path = out / f"ledger_{m}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            r.write_ledger_csv(fh)
        written.append(path)

    path = out / "decisions.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        write_decision_log(report.runs[(first, "catmos")].decisions, fh)
    written.append(path)
    return written


__all__ = ["ExperimentReport", "REFERENCE_REDUCTION_PCT", "SizeRow", "StaticVarRow",
           "generate_corpus", "query_sizes", "reduction_pct", "run_experiment",
           "static_var_sizes", "write_outputs"]
