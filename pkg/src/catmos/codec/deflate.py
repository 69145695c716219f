"""LZ77 + fixed prefix coding, emitted as a single fixed-Huffman Deflate block.

The payload is a valid raw Deflate stream (``zlib.decompress(p, -15)``
accepts it). ``envelope_bytes`` of stream framing are charged on top of the
payload in every accounting mode.
"""

from __future__ import annotations

from bisect import bisect_right

from ..errors import CodecError
from .blob import CompressedBlob, check_mode

WINDOW = 32 * 1024
MIN_MATCH = 3
MAX_MATCH = 258
MAX_CHAIN = 32
DEFAULT_ENVELOPE_BYTES = 64

_LEN_BASE = [3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 15, 17, 19, 23, 27, 31,
             35, 43, 51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258]
_LEN_EXTRA = [0] * 8 + [1] * 4 + [2] * 4 + [3] * 4 + [4] * 4 + [5] * 4 + [0]
_DIST_BASE = [1, 2, 3, 4, 5, 7, 9, 13, 17, 25, 33, 49, 65, 97, 129, 193,
              257, 385, 513, 769, 1025, 1537, 2049, 3073, 4097, 6145,
              8193, 12289, 16385, 24577]
_DIST_EXTRA = [0, 0, 0, 0] + [i for i in range(1, 14) for _ in (0, 1)]


def _reverse(code: int, n: int) -> int:
    return int(format(code, f"0{n}b")[::-1], 2) if n else 0


def _fixed_litlen(sym: int) -> tuple[int, int]:
    if sym < 144:
        return 0x30 + sym, 8
    if sym < 256:
        return 0x190 + sym - 144, 9
    if sym < 280:
        return sym - 256, 7
    return 0xC0 + sym - 280, 8


# Codes written LSB-first need their bits reversed.
_LITLEN_OUT = [(_reverse(*_fixed_litlen(s)), _fixed_litlen(s)[1]) for s in range(288)]
_DIST_OUT = [(_reverse(d, 5), 5) for d in range(32)]

# Table indexed by 9 upcoming stream bits -> (symbol, code length).
_LITLEN_IN: list[tuple[int, int]] = [(-1, 0)] * 512
for _s in range(288):
    _c, _n = _LITLEN_OUT[_s]
    for _hi in range(1 << (9 - _n)):
        _LITLEN_IN[_c | (_hi << _n)] = (_s, _n)

_LEN_SYMBOL = [0] * (MAX_MATCH + 1)
for _length in range(MIN_MATCH, MAX_MATCH + 1):
    _LEN_SYMBOL[_length] = bisect_right(_LEN_BASE, _length) - 1


def lz77_tokens(data: bytes, window: int = WINDOW, max_chain: int = MAX_CHAIN):
    """Greedy LZ77 parse: yields ints (literals) and (length, distance) pairs."""
    n = len(data)
    chains: dict[bytes, list[int]] = {}
    tokens: list = []
    i = 0
    while i < n:
        best_len = 0
        best_dist = 0
        if i + MIN_MATCH <= n:
            key = data[i:i + MIN_MATCH]
            cands = chains.get(key)
            limit = min(MAX_MATCH, n - i)
            if cands:
                tried = 0
                for j in reversed(cands):
                    if i - j > window or tried >= max_chain:
                        break
                    tried += 1
                    if best_len and data[j + best_len] != data[i + best_len]:
                        continue
                    length = MIN_MATCH
                    while length < limit and data[j + length] == data[i + length]:
                        length += 1
                    if length > best_len:
                        best_len, best_dist = length, i - j
                        if length == limit:
                            break
                cands.append(i)
            else:
                chains[key] = [i]
        if best_len >= MIN_MATCH:
            tokens.append((best_len, best_dist))
            for p in range(i + 1, min(i + best_len, n - MIN_MATCH + 1)):
                k = data[p:p + MIN_MATCH]
                lst = chains.get(k)
                if lst is None:
                    chains[k] = [p]
                else:
                    lst.append(p)
            i += best_len
        else:
            tokens.append(data[i])
            i += 1
    return tokens


class _BitWriter:
    __slots__ = ("out", "acc", "n", "total")

    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.n = 0
        self.total = 0

    def write(self, value: int, nbits: int) -> None:
        self.acc |= value << self.n
        self.n += nbits
        self.total += nbits
        while self.n >= 8:
            self.out.append(self.acc & 0xFF)
            self.acc >>= 8
            self.n -= 8

    def finish(self) -> bytes:
        if self.n:
            self.out.append(self.acc & 0xFF)
            self.acc = 0
            self.n = 0
        return bytes(self.out)


def deflate_encode(data: bytes, mode: str = "payload",
                   envelope_bytes: int = DEFAULT_ENVELOPE_BYTES) -> CompressedBlob:
    check_mode(mode)
    if not data:
        raise CodecError("cannot compress empty input")
    if envelope_bytes < 0:
        raise CodecError("envelope size cannot be negative")
    w = _BitWriter()
    write = w.write
    write(1, 1)  # BFINAL
    write(1, 2)  # BTYPE = fixed Huffman
    for tok in lz77_tokens(data):
        if isinstance(tok, int):
            write(*_LITLEN_OUT[tok])
            continue
        length, dist = tok
        li = _LEN_SYMBOL[length]
        write(*_LITLEN_OUT[257 + li])
        if _LEN_EXTRA[li]:
            write(length - _LEN_BASE[li], _LEN_EXTRA[li])
        di = bisect_right(_DIST_BASE, dist) - 1
        write(*_DIST_OUT[di])
        if _DIST_EXTRA[di]:
            write(dist - _DIST_BASE[di], _DIST_EXTRA[di])
    write(*_LITLEN_OUT[256])
    payload_bits = w.total
    return CompressedBlob("deflate", w.finish(), payload_bits, len(data),
                          header_bits=8 * envelope_bytes)


def deflate_decode(blob: CompressedBlob) -> bytes:
    if blob.codec_id != "deflate":
        raise CodecError(f"not a deflate blob: {blob.codec_id}")
    src = blob.payload
    limit = blob.payload_bits
    if limit > 8 * len(src):
        raise CodecError("payload shorter than its declared bit count")
    acc = 0
    have = 0  # bits buffered in acc
    consumed = 0  # bits taken from the stream
    nxt = 0  # next source byte

    def fill(k: int):
        nonlocal acc, have, nxt
        while have < k and nxt < len(src):
            acc |= src[nxt] << have
            nxt += 1
            have += 8

    def take(k: int) -> int:
        nonlocal acc, have, consumed
        if consumed + k > limit:
            raise CodecError("deflate stream truncated")
        fill(k)
        v = acc & ((1 << k) - 1)
        acc >>= k
        have -= k
        consumed += k
        return v

    if take(1) != 1 or take(2) != 1:
        raise CodecError("expected a single final fixed-Huffman block")
    out = bytearray()
    table = _LITLEN_IN
    while True:
        fill(9)
        sym, n = table[acc & 0x1FF]
        if consumed + n > limit:
            raise CodecError("deflate stream truncated")
        acc >>= n
        have -= n
        consumed += n
        if sym < 256:
            out.append(sym)
            continue
        if sym == 256:
            break
        li = sym - 257
        if li >= 29:
            raise CodecError(f"invalid length symbol {sym}")
        length = _LEN_BASE[li] + (take(_LEN_EXTRA[li]) if _LEN_EXTRA[li] else 0)
        di = _reverse(take(5), 5)
        if di >= 30:
            raise CodecError(f"invalid distance symbol {di}")
        dist = _DIST_BASE[di] + (take(_DIST_EXTRA[di]) if _DIST_EXTRA[di] else 0)
        if dist > len(out):
            raise CodecError(f"back-reference distance {dist} exceeds output {len(out)}")
        start = len(out) - dist
        if dist >= length:
            out += out[start:start + length]
        else:
            for k in range(length):
                out.append(out[start + k])
    if len(out) != blob.original_bytes:
        raise CodecError(f"decoded {len(out)} bytes, expected {blob.original_bytes}")
    return bytes(out)
