"""Canonical Huffman coding over byte alphabets.

Code lengths come from the classic two-smallest merge; codewords are then
assigned canonically in (length, symbol) order, so 256 code lengths fully
describe a codebook.
"""

from __future__ import annotations

import heapq
from collections import Counter
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from ..errors import CodecError
from .blob import CompressedBlob, bits_to_bytes, bytes_to_bits, check_mode

ALPHABET = 256
COUNT_FIELD_BITS = 32
# 256 one-byte code lengths followed by a 32-bit symbol count.
SELF_CONTAINED_HEADER_BITS = 8 * ALPHABET + COUNT_FIELD_BITS
_TABLE_LIMIT = 16


def code_lengths_from_frequencies(freqs: Sequence[int]) -> tuple[int, ...]:
    """Optimal prefix-code lengths for a 256-entry frequency vector.

    A lone symbol gets a 1-bit code so that no codeword is empty.
    """
    if len(freqs) != ALPHABET:
        raise CodecError(f"expected {ALPHABET} frequencies, got {len(freqs)}")
    lengths = [0] * ALPHABET
    heap = [(f, s, [s]) for s, f in enumerate(freqs) if f > 0]
    if not heap:
        raise CodecError("cannot build a code for an empty alphabet")
    if len(heap) == 1:
        lengths[heap[0][1]] = 1
        return tuple(lengths)
    heapq.heapify(heap)
    # Tie-break on smallest member symbol keeps the tree deterministic.
    while len(heap) > 1:
        f1, k1, s1 = heapq.heappop(heap)
        f2, k2, s2 = heapq.heappop(heap)
        for s in s1:
            lengths[s] += 1
        for s in s2:
            lengths[s] += 1
        heapq.heappush(heap, (f1 + f2, min(k1, k2), s1 + s2))
    return tuple(lengths)


class HuffmanCodebook:
    """Canonical codebook reconstructed from per-symbol code lengths."""

    def __init__(self, lengths: Iterable[int]):
        lengths = tuple(int(x) for x in lengths)
        if len(lengths) != ALPHABET:
            raise CodecError(f"expected {ALPHABET} code lengths, got {len(lengths)}")
        if any(not 0 <= x <= 255 for x in lengths):
            raise CodecError("code lengths must fit in one byte")
        used = [(l, s) for s, l in enumerate(lengths) if l > 0]
        if not used:
            raise CodecError("codebook has no symbols")
        kraft = sum(Fraction(1, 2 ** l) for l, _ in used)
        if len(used) == 1:
            if used[0][0] != 1:
                raise CodecError("a single-symbol codebook must use a 1-bit code")
        elif kraft != 1:
            raise CodecError(f"code lengths violate Kraft equality (sum = {kraft})")
        self.lengths = lengths
        self.codes: dict[int, tuple[int, int]] = {}
        code = 0
        prev = min(used)[0]
        for l, s in sorted(used):
            code <<= l - prev
            self.codes[s] = (code, l)
            code += 1
            prev = l
        self.max_length = max(l for l, _ in used)
        self._strings = [None] * ALPHABET
        for s, (c, l) in self.codes.items():
            self._strings[s] = format(c, f"0{l}b")

    @classmethod
    def from_data(cls, data: bytes) -> "HuffmanCodebook":
        counts = Counter(data)
        return cls(code_lengths_from_frequencies([counts.get(s, 0) for s in range(ALPHABET)]))

    @classmethod
    def from_frequencies(cls, freqs: Sequence[int]) -> "HuffmanCodebook":
        return cls(code_lengths_from_frequencies(freqs))

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2 ** l) for l in self.lengths if l), Fraction(0))

    def is_prefix_free(self) -> bool:
        words = sorted(w for w in self._strings if w is not None)
        return all(not b.startswith(a) for a, b in zip(words, words[1:]))

    def codeword(self, symbol: int) -> str:
        w = self._strings[symbol]
        if w is None:
            raise CodecError(f"symbol 0x{symbol:02x} has no codeword")
        return w

    def encoded_bits(self, data: bytes) -> int:
        counts = Counter(data)
        try:
            return sum(n * self.codes[s][1] for s, n in counts.items())
        except KeyError as exc:
            raise CodecError(f"symbol 0x{exc.args[0]:02x} has no codeword") from None

    def encode_bits(self, data: bytes) -> str:
        strings = self._strings
        try:
            return "".join([strings[b] for b in data])
        except TypeError:
            missing = next(b for b in data if strings[b] is None)
            raise CodecError(f"symbol 0x{missing:02x} has no codeword") from None

    def decode_bits(self, bits: str, count: int) -> bytes:
        if self.max_length <= _TABLE_LIMIT:
            return self._decode_table(bits, count)
        return self._decode_walk(bits, count)

    def _decode_table(self, bits: str, count: int) -> bytes:
        k = self.max_length
        table: list[Optional[tuple[int, int]]] = [None] * (1 << k)
        for s, (c, l) in self.codes.items():
            lo = c << (k - l)
            table[lo:lo + (1 << (k - l))] = [(s, l)] * (1 << (k - l))
        nbits = len(bits)
        padded = bits + "0" * k
        out = bytearray()
        pos = 0
        for _ in range(count):
            entry = table[int(padded[pos:pos + k], 2)]
            if entry is None:
                raise CodecError(f"invalid codeword at bit {pos}")
            s, l = entry
            pos += l
            if pos > nbits:
                raise CodecError("payload truncated mid-codeword")
            out.append(s)
        return bytes(out)

    def _decode_walk(self, bits: str, count: int) -> bytes:
        lookup = {(l, c): s for s, (c, l) in self.codes.items()}
        out = bytearray()
        pos, nbits = 0, len(bits)
        for _ in range(count):
            code = length = 0
            while True:
                if pos >= nbits:
                    raise CodecError("payload truncated mid-codeword")
                code = (code << 1) | (bits[pos] == "1")
                pos += 1
                length += 1
                s = lookup.get((length, code))
                if s is not None:
                    out.append(s)
                    break
                if length >= self.max_length:
                    raise CodecError(f"invalid codeword at bit {pos - length}")
        return bytes(out)


def huffman_encode(data: bytes, mode: str = "payload",
                   codebook: Optional[HuffmanCodebook] = None) -> CompressedBlob:
    """Huffman-code ``data``.

    Without ``codebook`` the code is fitted to ``data`` itself. In payload
    mode the code lengths travel out of band (``blob.code_lengths``) and
    cost nothing; in self-contained mode they are embedded in the header.
    """
    check_mode(mode)
    if not data:
        raise CodecError("cannot compress empty input")
    book = codebook or HuffmanCodebook.from_data(data)
    bits = book.encode_bits(data)
    header = b""
    header_bits = 0
    if mode == "self-contained":
        header = bytes(book.lengths) + len(data).to_bytes(4, "big")
        header_bits = SELF_CONTAINED_HEADER_BITS
    return CompressedBlob("huffman", bits_to_bytes(bits), len(bits), len(data),
                          header_bits, header, book.lengths)


def huffman_decode(blob: CompressedBlob, codebook: Optional[HuffmanCodebook] = None) -> bytes:
    if blob.codec_id != "huffman":
        raise CodecError(f"not a huffman blob: {blob.codec_id}")
    count = blob.original_bytes
    if blob.header:
        if len(blob.header) != SELF_CONTAINED_HEADER_BITS // 8:
            raise CodecError("malformed huffman header")
        book = HuffmanCodebook(blob.header[:ALPHABET])
        count = int.from_bytes(blob.header[ALPHABET:], "big")
    elif codebook is not None:
        book = codebook
    elif blob.code_lengths is not None:
        book = HuffmanCodebook(blob.code_lengths)
    else:
        raise CodecError("no codebook available for payload-only blob")
    bits = bytes_to_bits(blob.payload, blob.payload_bits)
    return book.decode_bits(bits, count)
