"""Lossless codecs for query text and sensor records."""

from .blob import CODEC_IDS, MODES, CompressedBlob, compression_factor
from .deflate import DEFAULT_ENVELOPE_BYTES, deflate_decode, deflate_encode
from .huffman import HuffmanCodebook, huffman_decode, huffman_encode
from .lzw import lzw_decode, lzw_encode
from ..errors import CodecError


def encode(codec: str, data: bytes, mode: str = "payload", **options) -> CompressedBlob:
    if codec == "huffman":
        return huffman_encode(data, mode, options.get("codebook"))
    if codec == "lzw":
        return lzw_encode(data, mode)
    if codec == "deflate":
        return deflate_encode(data, mode, options.get("envelope_bytes", DEFAULT_ENVELOPE_BYTES))
    raise CodecError(f"unknown codec {codec!r}; expected one of {CODEC_IDS}")


def decode(blob: CompressedBlob, **options) -> bytes:
    if blob.codec_id == "huffman":
        return huffman_decode(blob, options.get("codebook"))
    if blob.codec_id == "lzw":
        return lzw_decode(blob)
    if blob.codec_id == "deflate":
        return deflate_decode(blob)
    raise CodecError(f"unknown codec {blob.codec_id!r}")


__all__ = [
    "CODEC_IDS", "MODES", "CompressedBlob", "CodecError", "DEFAULT_ENVELOPE_BYTES",
    "HuffmanCodebook", "compression_factor", "decode", "deflate_decode",
    "deflate_encode", "encode", "huffman_decode", "huffman_encode",
    "lzw_decode", "lzw_encode",
]
