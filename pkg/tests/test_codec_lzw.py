import random

import pytest
from hypothesis import given, settings, strategies as st

from catmos.codec import CompressedBlob, lzw_decode, lzw_encode
from catmos.codec.blob import bits_to_bytes
from catmos.codec.lzw import code_width, lzw_codes, lzw_decode_codes
from catmos.errors import CodecError


def reference_trace(symbols, alphabet):
    """Textbook LZW over strings, written independently of the codec."""
    dictionary = {(s,): s for s in range(alphabet)}
    w, out = (), []
    for c in symbols:
        wc = w + (c,)
        if wc in dictionary:
            w = wc
        else:
            out.append(dictionary[w])
            dictionary[wc] = len(dictionary)
            w = (c,)
    out.append(dictionary[w])
    return out


def test_ababab_restricted_alphabet():
    symbols = [0, 1, 0, 1, 0, 1, 0]  # ABABABA with A=0, B=1
    assert lzw_codes(symbols, alphabet=2) == [0, 1, 2, 4]
    assert lzw_decode_codes([0, 1, 2, 4], alphabet=2) == symbols


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 10, 100, 1000])
def test_cscsc_runs_round_trip(n):
    data = b"A" * n
    assert lzw_codes(data) == reference_trace(data, 256)
    assert lzw_decode(lzw_encode(data)) == data


@pytest.mark.parametrize("seed", range(50))
def test_matches_reference_trace(seed):
    rng = random.Random(seed)
    data = bytes(rng.choice(b"ab") for _ in range(rng.randint(1, 500)))
    assert lzw_codes(data) == reference_trace(data, 256)


def test_code_width_growth():
    assert code_width(0) == 9
    assert code_width(255) == 9  # 511 entries
    assert code_width(256) == 10  # 512 entries
    assert code_width(10**6) == 16


def test_dictionary_freezes_at_limit():
    data = random.Random(3).randbytes(300_000)
    codes = lzw_codes(data)
    assert max(codes) < 65536
    assert lzw_decode(lzw_encode(data)) == data


def test_empty_rejected():
    with pytest.raises(CodecError):
        lzw_encode(b"")


def test_code_beyond_frontier_rejected():
    with pytest.raises(CodecError):
        lzw_decode_codes([65, 300])


def test_dangling_bits_rejected():
    blob = lzw_encode(b"hello world")
    bad = CompressedBlob("lzw", blob.payload + b"\x00", blob.payload_bits + 9,
                         blob.original_bytes)
    with pytest.raises(CodecError):
        lzw_decode(CompressedBlob("lzw", blob.payload, blob.payload_bits - 3,
                                  blob.original_bytes))
    with pytest.raises(CodecError):
        lzw_decode(bad)


def test_first_code_must_be_literal():
    with pytest.raises(CodecError):
        lzw_decode(CompressedBlob("lzw", bits_to_bytes(format(300, "09b")), 9, 1))


def test_no_header_in_either_mode():
    assert lzw_encode(b"abc", "self-contained").header_bits == 0


@settings(max_examples=200, deadline=None)
@given(st.binary(min_size=1, max_size=4096))
def test_round_trip(data):
    blob = lzw_encode(data)
    assert lzw_decode(blob) == data
    assert blob.payload_bits == sum(code_width(k) for k in range(len(lzw_codes(data))))
