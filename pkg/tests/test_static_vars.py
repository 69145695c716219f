import pytest
from hypothesis import given, strategies as st

from catmos.codec import huffman_encode
from catmos.errors import StaticVarError
from catmos.harness.experiment import generate_corpus
from catmos.query_model import QueryText, serialize
from catmos.static_vars import (KEYWORDS, TOKEN_FIRST, StaticVarDictionary, build_dictionary,
                                dumps, load, loads, restore, save, substitute)

from conftest import table1_queries


@pytest.fixture
def corpus():
    return [serialize(q) for q in table1_queries()]


def test_reference_dictionary_captures_common_prefix(corpus):
    d = build_dictionary(corpus)
    assert any("FROM sensors WHERE temp >=" in p for p in d.phrases)
    assert all(TOKEN_FIRST <= t <= 0xFF for _, t in d.entries)


def test_zero_entries_is_identity(corpus):
    d = build_dictionary(corpus, 0)
    assert len(d) == 0
    assert substitute(corpus[0], d) == corpus[0].encode()


def test_single_query_still_yields_keywords(corpus):
    d = build_dictionary(corpus[:1])
    assert {"SELECT", "FROM sensors WHERE", "SAMPLE PERIOD", "FOR", "EPOCHS"} <= set(d.phrases)


def test_length_arithmetic():
    phrase = "x" * 37
    text = "a" * 100 + phrase + "b" * (296 - 137)
    d = StaticVarDictionary(((phrase, 0x80),))
    assert len(text) == 296
    assert len(substitute(text, d)) == 260


def test_longest_first_substitution():
    d = StaticVarDictionary((("ab", 0x80), ("abc", 0x81)))
    assert substitute("abcab", d) == b"\x81\x80"
    assert restore(substitute("abcab", d), d).text == "abcab"


def test_round_trip_and_savings(corpus):
    d = build_dictionary(corpus)
    for t in corpus:
        sub = substitute(t, d)
        assert restore(sub, d) == t
        assert len(sub) < len(t.text)
        # Each phrase's occurrences are counted on the text left by longer ones.
        residual, saved = t.text, 0
        for phrase, token in d.substitution_order():
            saved += residual.count(phrase) * (len(phrase) - 1)
            residual = residual.replace(phrase, chr(token))
        assert len(sub) == len(t.text) - saved


def test_unknown_token_rejected():
    d = StaticVarDictionary((("ab", 0x80),))
    with pytest.raises(StaticVarError):
        restore(b"x\x90", d)


def test_restore_token_free_identity():
    assert restore(b"plain", StaticVarDictionary()).text == "plain"


def test_reserved_bytes_rejected():
    with pytest.raises(StaticVarError):
        build_dictionary(["café au lait"])
    with pytest.raises(StaticVarError):
        substitute("\u0080", StaticVarDictionary())


def test_dictionary_validation():
    with pytest.raises(StaticVarError):
        StaticVarDictionary((("ab", 0x80), ("cd", 0x80)))
    with pytest.raises(StaticVarError):
        StaticVarDictionary((("ab", 0x80), ("ab", 0x81)))
    with pytest.raises(StaticVarError):
        StaticVarDictionary((("a", 0x80),))
    with pytest.raises(StaticVarError):
        StaticVarDictionary((("ab", 0x7F),))
    with pytest.raises(StaticVarError):
        build_dictionary([])
    with pytest.raises(StaticVarError):
        build_dictionary(["abc"], 129)


def test_file_format_round_trip(tmp_path, corpus):
    d = build_dictionary(corpus)
    assert dumps(d).splitlines()[0] == "80\tSELECT temp FROM sensors WHERE temp >="
    assert loads(dumps(d)) == d
    save(d, tmp_path / "dict.txt")
    assert load(tmp_path / "dict.txt") == d
    with pytest.raises(StaticVarError):
        loads("zz\tphrase\n")
    with pytest.raises(StaticVarError):
        loads("no tab here\n")


def test_huffman_shrinks_with_substitution_on_corpus():
    texts = [serialize(q) for q in generate_corpus(100, 0)]
    d = build_dictionary(texts)
    without = sum(huffman_encode(t.encode()).payload_bits for t in texts)
    with_sv = sum(huffman_encode(substitute(t, d)).payload_bits for t in texts)
    assert with_sv <= without


def test_keywords_are_listed_in_grammar_order():
    assert KEYWORDS[0] == "SELECT" and KEYWORDS[-1] == "EPOCHS"


@given(st.text(alphabet=st.characters(min_codepoint=32, max_codepoint=126), max_size=200),
       st.lists(st.text(alphabet="abc ", min_size=2, max_size=5), max_size=6, unique=True))
def test_round_trip_property(text, phrases):
    d = StaticVarDictionary(tuple((p, 0x80 + i) for i, p in enumerate(phrases)))
    assert restore(substitute(text, d), d) == QueryText(text)
