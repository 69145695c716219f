"""Range queries and their TinyDB-style concrete syntax.

Canonical form::

    SELECT temp FROM sensors WHERE temp >= 10 AND temp <= 50 SAMPLE PERIOD 5 FOR 100 EPOCHS

The text is plain ASCII so its size on the air is exactly eight bits per
character.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Union

from .errors import QueryRangeError, QuerySyntaxError

ATTRIBUTES = ("temp", "light", "humidity")
DEFAULT_LIFETIME = 100

Number = Union[int, float]


@dataclass(frozen=True)
class RangeQuery:
    """One user query: an inclusive attribute range sampled every ``epoch_s``.

    ``id`` labels the query inside a query set and is not part of its
    content, so two queries with the same text compare equal.
    """

    attribute: str
    min_value: Number
    max_value: Number
    epoch_s: int
    lifetime_epochs: int = DEFAULT_LIFETIME
    id: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.attribute not in ATTRIBUTES:
            raise QueryRangeError(f"unknown attribute {self.attribute!r}")
        if self.min_value > self.max_value:
            raise QueryRangeError(
                f"empty range: min {self.min_value} > max {self.max_value}"
            )
        if not isinstance(self.epoch_s, int) or self.epoch_s < 1:
            raise QueryRangeError(f"epoch must be a positive integer, got {self.epoch_s!r}")
        if not isinstance(self.lifetime_epochs, int) or self.lifetime_epochs < 1:
            raise QueryRangeError(
                f"lifetime must be a positive integer, got {self.lifetime_epochs!r}"
            )

    def with_id(self, query_id: int) -> "RangeQuery":
        return RangeQuery(self.attribute, self.min_value, self.max_value,
                          self.epoch_s, self.lifetime_epochs, id=query_id)

    def contains_range(self, other: "RangeQuery") -> bool:
        return self.min_value <= other.min_value and other.max_value <= self.max_value


@dataclass(frozen=True)
class QueryText:
    text: str

    @property
    def size_bytes(self) -> int:
        return len(self.text)

    @property
    def size_bits(self) -> int:
        return 8 * len(self.text)

    def encode(self) -> bytes:
        return self.text.encode("ascii")


def format_number(x: Number) -> str:
    """Shortest plain-decimal rendering of ``x`` (no exponent)."""
    if isinstance(x, int):
        return str(x)
    if x != x or x in (float("inf"), float("-inf")):
        raise QueryRangeError(f"non-finite bound {x!r}")
    if x.is_integer():
        return str(int(x))
    text = format(Decimal(repr(x)), "f")
    return text


def serialize(q: RangeQuery) -> QueryText:
    a = q.attribute
    return QueryText(
        f"SELECT {a} FROM sensors WHERE {a} >= {format_number(q.min_value)} "
        f"AND {a} <= {format_number(q.max_value)} "
        f"SAMPLE PERIOD {q.epoch_s} FOR {q.lifetime_epochs} EPOCHS"
    )


_TOKEN = re.compile(r"[ \t]*(?:(-?[0-9]+(?:\.[0-9]+)?)|([A-Za-z_]+)|(>=|<=))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip(" \t") == "":
                break
            m = _TOKEN.match(text, pos)
            if m is None:
                start = pos + len(text[pos:]) - len(text[pos:].lstrip(" \t"))
                raise QuerySyntaxError(f"unexpected character {text[start]!r}", start)
            kind = "num" if m.group(1) else "word" if m.group(2) else "op"
            self.tokens.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
            pos = m.end()
        self.i = 0

    def _peek_pos(self) -> int:
        if self.i < len(self.tokens):
            return self.tokens[self.i][2]
        return len(self.text)

    def next(self, kind: str, value: str | None = None) -> str:
        if self.i >= len(self.tokens):
            want = value or kind
            raise QuerySyntaxError(f"expected {want!r} but text ended", len(self.text))
        k, v, pos = self.tokens[self.i]
        if k != kind or (value is not None and v.upper() != value):
            want = value or ("number" if kind == "num" else kind)
            raise QuerySyntaxError(f"expected {want!r}, found {v!r}", pos)
        self.i += 1
        return v

    def attribute(self) -> str:
        pos = self._peek_pos()
        name = self.next("word").lower()
        if name not in ATTRIBUTES:
            raise QuerySyntaxError(f"unknown attribute {name!r}", pos)
        return name

    def same_attribute(self, expected: str) -> None:
        pos = self._peek_pos()
        if self.attribute() != expected:
            raise QuerySyntaxError(f"predicate must constrain {expected!r}", pos)

    def number(self) -> Number:
        v = self.next("num")
        return float(v) if "." in v else int(v)

    def integer(self) -> tuple[int, int]:
        pos = self._peek_pos()
        v = self.next("num")
        if "." in v or v.startswith("-"):
            raise QuerySyntaxError(f"expected a non-negative integer, found {v!r}", pos)
        return int(v), pos

    def query(self) -> RangeQuery:
        self.next("word", "SELECT")
        attr = self.attribute()
        self.next("word", "FROM")
        self.next("word", "SENSORS")
        self.next("word", "WHERE")
        self.same_attribute(attr)
        self.next("op", ">=")
        lo = self.number()
        self.next("word", "AND")
        self.same_attribute(attr)
        self.next("op", "<=")
        hi = self.number()
        self.next("word", "SAMPLE")
        self.next("word", "PERIOD")
        epoch, epoch_pos = self.integer()
        self.next("word", "FOR")
        lifetime, life_pos = self.integer()
        self.next("word", "EPOCHS")
        if self.i != len(self.tokens):
            raise QuerySyntaxError("trailing text after EPOCHS", self.tokens[self.i][2])
        if lo > hi:
            raise QueryRangeError(f"empty range: min {lo} > max {hi}")
        if epoch == 0:
            raise QueryRangeError(f"zero sample period (at offset {epoch_pos})")
        if lifetime == 0:
            raise QueryRangeError(f"zero lifetime (at offset {life_pos})")
        return RangeQuery(attr, lo, hi, epoch, lifetime)


def parse(text: str | QueryText, query_id: int = 0) -> RangeQuery:
    """Parse query text into a :class:`RangeQuery`.

    Raises :class:`QuerySyntaxError` (with the offending offset) on malformed
    text and :class:`QueryRangeError` on an empty range or zero period.
    """
    if isinstance(text, QueryText):
        text = text.text
    q = _Parser(text).query()
    return q.with_id(query_id) if query_id else q
