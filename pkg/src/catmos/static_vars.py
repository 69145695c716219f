"""Static variables: recurring query phrases replaced by one reserved byte.

Phrases are substituted longest first, each left to right without overlap.
Reserved bytes (0x80-0xFF) never occur in ASCII query text, so the rewrite
is reversible by plain token expansion.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import StaticVarError
from .query_model import QueryText

TOKEN_FIRST = 0x80
TOKEN_LAST = 0xFF
MAX_ENTRIES = TOKEN_LAST - TOKEN_FIRST + 1
KEYWORDS = ("SELECT", "FROM sensors WHERE", "SAMPLE PERIOD", "FOR", "EPOCHS")

Text = Union[str, QueryText]


def _as_str(text: Text) -> str:
    return text.text if isinstance(text, QueryText) else text


def _check_plain(text: str) -> None:
    for i, ch in enumerate(text):
        if ord(ch) >= TOKEN_FIRST:
            raise StaticVarError(f"reserved byte 0x{ord(ch):02x} in input at offset {i}")


@dataclass(frozen=True)
class StaticVarDictionary:
    entries: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        phrases = [p for p, _ in self.entries]
        tokens = [t for _, t in self.entries]
        if len(set(phrases)) != len(phrases):
            raise StaticVarError("duplicate phrase in dictionary")
        if len(set(tokens)) != len(tokens):
            raise StaticVarError("duplicate token in dictionary")
        for phrase, token in self.entries:
            if not TOKEN_FIRST <= token <= TOKEN_LAST:
                raise StaticVarError(f"token 0x{token:02x} outside reserved range")
            if len(phrase) < 2:
                raise StaticVarError(f"phrase {phrase!r} shorter than two characters")
            _check_plain(phrase)

    @property
    def phrases(self) -> list[str]:
        return [p for p, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def substitution_order(self) -> list[tuple[str, int]]:
        return sorted(self.entries, key=lambda e: -len(e[0]))

    def size_bytes(self) -> int:
        """Bytes needed to ship the dictionary in its file form."""
        return len(dumps(self).encode("ascii"))


def substitute(text: Text, d: StaticVarDictionary) -> bytes:
    s = _as_str(text)
    _check_plain(s)
    for phrase, token in d.substitution_order():
        s = s.replace(phrase, chr(token))
    return s.encode("latin-1")


def restore(data: bytes, d: StaticVarDictionary) -> QueryText:
    expand = {token: phrase for phrase, token in d.entries}
    parts = []
    for i, b in enumerate(data):
        if b >= TOKEN_FIRST:
            try:
                parts.append(expand[b])
            except KeyError:
                raise StaticVarError(f"unknown token 0x{b:02x} at offset {i}") from None
        else:
            parts.append(chr(b))
    return QueryText("".join(parts))


def _token_runs(text: str) -> Iterable[str]:
    words = text.split(" ")
    for i in range(len(words)):
        for j in range(i + 1, len(words) + 1):
            yield " ".join(words[i:j])


def build_dictionary(corpus: Sequence[Text], max_entries: int = 32) -> StaticVarDictionary:
    """Pick up to ``max_entries`` phrases by greedy savings.

    Candidates are whole-word runs that recur in the corpus, plus the fixed
    grammar keywords. Each round scores every candidate as
    ``occurrences * (len - 1)`` on the corpus rewritten with the phrases
    chosen so far, takes the best (longer phrase, then lexical order, on
    ties) and stops when nothing saves a byte.
    """
    if not corpus:
        raise StaticVarError("corpus is empty")
    if not 0 <= max_entries <= MAX_ENTRIES:
        raise StaticVarError(f"max_entries must be within 0..{MAX_ENTRIES}")
    texts = [_as_str(t) for t in corpus]
    for t in texts:
        _check_plain(t)
    counts: dict[str, int] = {}
    for t in texts:
        for run in _token_runs(t):
            if len(run) >= 2:
                counts[run] = counts.get(run, 0) + 1
    candidates = {p for p, n in counts.items() if n >= 2}
    candidates.update(k for k in KEYWORDS if any(k in t for t in texts))

    chosen: list[tuple[str, int]] = []
    residual = "\n".join(texts)
    while len(chosen) < max_entries and candidates:
        best = max(candidates,
                   key=lambda p: (residual.count(p) * (len(p) - 1), len(p), p))
        if residual.count(best) == 0:
            break
        chosen.append((best, TOKEN_FIRST + len(chosen)))
        candidates.discard(best)
        d = StaticVarDictionary(tuple(chosen))
        residual = "\n".join(substitute(t, d).decode("latin-1") for t in texts)
    # A later, longer phrase can swallow every occurrence of an earlier one.
    used = {chr(tok) for _, tok in chosen if chr(tok) in residual}
    kept = [p for p, tok in chosen if chr(tok) in used]
    return StaticVarDictionary(tuple((p, TOKEN_FIRST + i) for i, p in enumerate(kept)))


def dumps(d: StaticVarDictionary) -> str:
    return "".join(f"{token:02x}\t{phrase}\n" for phrase, token in d.entries)


def loads(text: str) -> StaticVarDictionary:
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line:
            continue
        token_hex, sep, phrase = line.partition("\t")
        if not sep:
            raise StaticVarError(f"line {lineno}: expected token_hex<TAB>phrase")
        try:
            token = int(token_hex, 16)
        except ValueError:
            raise StaticVarError(f"line {lineno}: bad token {token_hex!r}") from None
        entries.append((phrase, token))
    return StaticVarDictionary(tuple(entries))


def save(d: StaticVarDictionary, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(d), encoding="ascii", newline="\n")


def load(path: Union[str, Path]) -> StaticVarDictionary:
    return loads(Path(path).read_text(encoding="ascii"))
