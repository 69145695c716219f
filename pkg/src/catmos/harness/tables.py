"""Reference size and factor tables, and their recomputation.

The reference values are kept as the exact strings that were printed, so
comparisons can respect each cell's printed precision.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Union

from ..codec import compression_factor

CODECS = ("huffman", "lzw", "deflate")

# min, max, epoch, original, huffman, lzw, deflate (bytes)
TABLE1 = """\
10 50 5 296 152 282 360
10 40 8 296 144 282 360
10 50 5 304 152 290 368
10 35 40 304 152 290 368
15 25 50 304 152 290 368
15 30 10 304 152 290 352
5 55 120 312 160 305 376
25 50 130 312 160 291 376
30 45 60 304 152 297 368
35 50 70 312 160 298 376
"""

# Huffman, LZW, Deflate compression factors (%)
TABLE2 = """\
51.351351 95.27027 121.62162
48.648649 95.27027 121.62162
50 95.394737 121.05263
50 95.394737 121.05263
50 95.394737 121.05263
50 95.394737 121.05263
50 95.394737 115.78947
51.282051 97.75641 120.51282
50 97.697368 121.05263
51.282051 95.512821 120.51282
"""

# Huffman without, with, diff; LZW without, with, diff (%)
TABLE3 = """\
51.351351 42.105263 9.246088 95.270270 95.394736 -0.124466
48.648648 36.842105 11.806543 95.270270 90.789473 4.480796
50.000000 40.000000 10.000000 95.394736 95.625000 -0.230263
50.000000 40.000000 10.000000 95.394736 95.625000 -0.230263
50.000000 40.000000 10.000000 95.394736 95.625000 -0.230263
50.000000 40.000000 10.000000 95.394736 91.250000 4.144736
51.282051 42.857142 8.424908 97.756410 100.000000 -2.243589
51.282051 42.857142 8.424908 93.269230 91.666666 1.602564
50.000000 40.000000 10.000000 97.697368 100.000000 -2.302631
51.282051 38.095238 13.186813 95.512820 95.833333 -0.320512
"""

TOLERANCE = 1e-6


def _rows(text: str) -> list[list[str]]:
    return [line.split() for line in text.splitlines() if line.strip()]


def table1() -> list[tuple[int, ...]]:
    return [tuple(int(x) for x in r) for r in _rows(TABLE1)]


def table2() -> list[list[str]]:
    return _rows(TABLE2)


def table3() -> list[list[str]]:
    return _rows(TABLE3)


# Factor cells were printed with eight significant digits ("121.62162").
PRINTED_DIGITS = 8


def matches_printed(value: float, printed: str, tol: float = TOLERANCE) -> bool:
    """True if ``value`` agrees with a printed factor cell.

    A cell matches when it lies within ``tol`` of ``value`` or when it is
    exactly ``value`` rendered with the table's eight significant digits,
    which is all a cell such as "121.62162" can resolve.
    """
    if abs(value - float(printed)) <= tol:
        return True
    return format(value, f".{PRINTED_DIGITS}g") == printed


@dataclass(frozen=True)
class FactorCell:
    row: int
    codec: str
    original: int
    compressed: int
    computed: float
    reference: str

    @property
    def ok(self) -> bool:
        return matches_printed(self.computed, self.reference)


@dataclass(frozen=True)
class DiffCell:
    row: int
    codec: str
    without: str
    with_static: str
    computed: Decimal
    reference: str

    @property
    def ok(self) -> bool:
        return abs(self.computed - Decimal(self.reference)) <= Decimal(repr(TOLERANCE))


def factor_cells() -> list[FactorCell]:
    cells = []
    for i, (sizes, ref) in enumerate(zip(table1(), table2()), 1):
        original = sizes[3]
        for codec, compressed, printed in zip(CODECS, sizes[4:], ref):
            cells.append(FactorCell(i, codec, original, compressed,
                                    compression_factor(original, compressed), printed))
    return cells


def diff_cells() -> list[DiffCell]:
    cells = []
    for i, r in enumerate(table3(), 1):
        for codec, (without, with_static, diff) in (("huffman", r[0:3]), ("lzw", r[3:6])):
            computed = Decimal(without) - Decimal(with_static)
            cells.append(DiffCell(i, codec, without, with_static, computed, diff))
    return cells


def _write(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def reproduce_tables(out: Union[str, Path]) -> dict[str, Path]:
    """Write the three table CSVs into ``out`` and return their paths."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.csv"
             for name in ("table1_sizes", "table2_factors", "table3_static_vars")}
    _write(paths["table1_sizes"],
           ["row", "temp_min", "temp_max", "epoch_s", "original_bytes",
            "huffman_bytes", "lzw_bytes", "deflate_bytes"],
           [[i, *r] for i, r in enumerate(table1(), 1)])
    _write(paths["table2_factors"],
           ["row", "codec", "original_bytes", "compressed_bytes", "factor_computed",
            "factor_reference", "match"],
           [[c.row, c.codec, c.original, c.compressed, repr(c.computed), c.reference,
             str(c.ok).lower()] for c in factor_cells()])
    _write(paths["table3_static_vars"],
           ["row", "codec", "factor_without", "factor_with", "diff_computed",
            "diff_reference", "match"],
           [[c.row, c.codec, c.without, c.with_static, str(c.computed), c.reference,
             str(c.ok).lower()] for c in diff_cells()])
    return paths


__all__ = ["TABLE1", "TABLE2", "TABLE3", "DiffCell", "FactorCell", "diff_cells",
           "factor_cells", "matches_printed", "reproduce_tables", "table1", "table2",
           "table3"]
