"""LZW with variable-width codes.

Codes start 9 bits wide. Before emitting its k-th code the encoder holds a
dictionary of ``alphabet + k`` entries; the code width is the bit length of
that size (never below 9, never above 16). The decoder derives the same
width from the same count. Once the dictionary holds 65536 entries it stops
growing.
"""

from __future__ import annotations

from typing import Sequence

from ..errors import CodecError
from .blob import CompressedBlob, bits_to_bytes, bytes_to_bits, check_mode

MIN_WIDTH = 9
MAX_WIDTH = 16
MAX_ENTRIES = 1 << MAX_WIDTH


def code_width(k: int, alphabet: int = 256) -> int:
    size = min(alphabet + k, MAX_ENTRIES)
    return min(max(MIN_WIDTH, size.bit_length()), MAX_WIDTH)


def lzw_codes(symbols: Sequence[int], alphabet: int = 256) -> list[int]:
    """Emit the LZW code sequence for ``symbols`` drawn from ``range(alphabet)``."""
    if not symbols:
        raise CodecError("cannot compress empty input")
    # Entries are keyed by (prefix code, next symbol) packed into one int.
    table: dict[int, int] = {}
    next_code = alphabet
    out: list[int] = []
    w = symbols[0]
    if not 0 <= w < alphabet:
        raise CodecError(f"symbol {w} outside alphabet of {alphabet}")
    for c in symbols[1:]:
        if not 0 <= c < alphabet:
            raise CodecError(f"symbol {c} outside alphabet of {alphabet}")
        key = w * alphabet + c
        hit = table.get(key)
        if hit is not None:
            w = hit
            continue
        out.append(w)
        if next_code < MAX_ENTRIES:
            table[key] = next_code
            next_code += 1
        w = c
    out.append(w)
    return out


def lzw_decode_codes(codes: Sequence[int], alphabet: int = 256) -> list[int]:
    if not codes:
        return []
    entries: list[tuple[int, ...]] = [(s,) for s in range(alphabet)]
    first = codes[0]
    if not 0 <= first < alphabet:
        raise CodecError(f"first code {first} is not a single symbol")
    prev = entries[first]
    out = list(prev)
    for code in codes[1:]:
        if code < len(entries):
            cur = entries[code]
        elif code == len(entries) and len(entries) < MAX_ENTRIES:
            # The encoder used the entry it was still building.
            cur = prev + prev[:1]
        else:
            raise CodecError(f"code {code} beyond dictionary frontier {len(entries)}")
        if len(entries) < MAX_ENTRIES:
            entries.append(prev + cur[:1])
        out.extend(cur)
        prev = cur
    return out


def lzw_encode(data: bytes, mode: str = "payload") -> CompressedBlob:
    """LZW-compress ``data``.

    The stream is self-delimiting (trailing padding is shorter than one
    code), so both accounting modes carry no header.
    """
    check_mode(mode)
    codes = lzw_codes(data)
    bits = "".join([format(c, f"0{code_width(k)}b") for k, c in enumerate(codes)])
    return CompressedBlob("lzw", bits_to_bytes(bits), len(bits), len(data))


def lzw_decode(blob: CompressedBlob) -> bytes:
    if blob.codec_id != "lzw":
        raise CodecError(f"not an lzw blob: {blob.codec_id}")
    bits = bytes_to_bits(blob.payload, blob.payload_bits)
    codes = []
    pos = k = 0
    while True:
        w = code_width(k)
        if pos + w > len(bits):
            break
        codes.append(int(bits[pos:pos + w], 2))
        pos += w
        k += 1
    if pos != len(bits):
        raise CodecError(f"{len(bits) - pos} dangling bits after last code")
    out = bytes(lzw_decode_codes(codes))
    if len(out) != blob.original_bytes:
        raise CodecError(f"decoded {len(out)} bytes, expected {blob.original_bytes}")
    return out
