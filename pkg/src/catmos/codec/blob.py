from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..errors import CodecError

CODEC_IDS = ("huffman", "lzw", "deflate")
MODES = ("payload", "self-contained")


@dataclass(frozen=True)
class CompressedBlob:
    """Output of one codec run.

    ``payload`` holds ``payload_bits`` meaningful bits (the last byte is
    zero-padded). ``header_bits`` is overhead charged on top of the payload:
    an embedded code table, a stream envelope, or 0 in payload-only mode.
    ``code_lengths`` carries the Huffman table out of band when it is not
    embedded in ``header``.
    """

    codec_id: str
    payload: bytes
    payload_bits: int
    original_bytes: int
    header_bits: int = 0
    header: bytes = b""
    code_lengths: Optional[tuple[int, ...]] = None

    @property
    def total_bits(self) -> int:
        return self.payload_bits + self.header_bits

    @property
    def total_bytes(self) -> int:
        return (self.total_bits + 7) // 8


def compression_factor(original_bytes: int, compressed_bytes: int) -> float:
    """Compressed size as a percentage of the original (lower is better)."""
    if original_bytes <= 0:
        raise CodecError("original size must be positive")
    return 100.0 * compressed_bytes / original_bytes


def check_mode(mode: str) -> None:
    if mode not in MODES:
        raise CodecError(f"unknown size-accounting mode {mode!r}; expected one of {MODES}")


def bits_to_bytes(bits: str) -> bytes:
    """Pack a '0'/'1' string MSB-first, zero-padding the final byte."""
    if not bits:
        return b""
    pad = -len(bits) % 8
    return int(bits + "0" * pad, 2).to_bytes((len(bits) + pad) // 8, "big")


def bytes_to_bits(data: bytes, nbits: int) -> str:
    if nbits > 8 * len(data):
        raise CodecError(f"payload holds {8 * len(data)} bits, header claims {nbits}")
    if nbits == 0:
        return ""
    return format(int.from_bytes(data, "big"), f"0{8 * len(data)}b")[:nbits]
