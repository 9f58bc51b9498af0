"""Typed-parameter encoding: round trips, escaping, canonical values."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agritrace.config.model import PARAM_TYPES, ParamSpec
from agritrace.contracts.params import (
    canonical_triples,
    canonical_value,
    decode_parameters,
    encode_parameters,
    make_hashlink,
)
from agritrace.errors import EncodingError, ParameterError


def test_single_triple_round_trip():
    triples = [("kg", "int", "5200")]
    assert decode_parameters(encode_parameters(triples)) == triples


def test_empty_list_round_trip():
    assert encode_parameters([]) == b""
    assert decode_parameters(b"") == []


def test_separator_characters_survive():
    triples = [("note", "text", "a\x1eb\x1fc\\d"), ("plain", "string", "x")]
    assert decode_parameters(encode_parameters(triples)) == triples


def test_duplicate_name_rejected():
    with pytest.raises(EncodingError):
        encode_parameters([("a", "int", "1"), ("a", "int", "2")])


def test_illegal_type_tag_rejected():
    with pytest.raises(EncodingError):
        encode_parameters([("a", "bignum", "1")])
    bad = "\x1f".join(["a", "bignum", "1"]).encode()
    with pytest.raises(EncodingError):
        decode_parameters(bad)


def test_malformed_payloads_rejected():
    with pytest.raises(EncodingError):
        decode_parameters(b"only-one-field")
    with pytest.raises(EncodingError):
        decode_parameters("a\x1fint\x1f1\x1fextra".encode())
    with pytest.raises(EncodingError):
        decode_parameters(b"\xff\xfe")
    # dangling escape at end of a field
    with pytest.raises(EncodingError):
        decode_parameters("a\x1fint\x1f1\\".encode())


text_values = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), min_size=0, max_size=60
)
names = st.text(
    alphabet=st.characters(whitelist_categories=("Ll", "Lu", "Nd"), whitelist_characters="_"),
    min_size=1,
    max_size=12,
)


@settings(max_examples=300, deadline=None)
@given(
    st.lists(
        st.tuples(names, st.sampled_from(PARAM_TYPES), text_values),
        max_size=8,
        unique_by=lambda t: t[0],
    )
)
def test_fuzz_round_trip_and_stability(triples):
    triples = [tuple(t) for t in triples]
    payload = encode_parameters(triples)
    decoded = decode_parameters(payload)
    assert decoded == triples
    assert encode_parameters(decoded) == payload


def _spec(param_type, options=()):
    return ParamSpec("p", param_type, tuple(options))


def test_canonical_int():
    assert canonical_value(_spec("int"), 5200) == "5200"
    assert canonical_value(_spec("int"), "007") == "7"
    with pytest.raises(ParameterError):
        canonical_value(_spec("int"), "abc")
    with pytest.raises(ParameterError):
        canonical_value(_spec("int"), 1.5)
    with pytest.raises(ParameterError):
        canonical_value(_spec("int"), True)


def test_canonical_float_shortest_round_trip():
    assert canonical_value(_spec("float"), 1.5) == "1.5"
    assert canonical_value(_spec("float"), "0.1") == "0.1"
    assert float(canonical_value(_spec("float"), 1 / 3)) == 1 / 3
    with pytest.raises(ParameterError):
        canonical_value(_spec("float"), float("nan"))
    with pytest.raises(ParameterError):
        canonical_value(_spec("float"), "inf")


def test_canonical_string_rejects_newlines():
    assert canonical_value(_spec("string"), "Bosana") == "Bosana"
    with pytest.raises(ParameterError):
        canonical_value(_spec("string"), "two\nlines")
    assert canonical_value(_spec("text"), "two\nlines") == "two\nlines"


def test_canonical_enum_closed_set():
    spec = _spec("enum", ["A", "B"])
    assert canonical_value(spec, "A") == "A"
    with pytest.raises(ParameterError):
        canonical_value(spec, "C")


def test_canonical_link_and_hashlink():
    assert canonical_value(_spec("link"), "https://x.example/d") == "https://x.example/d"
    with pytest.raises(ParameterError):
        canonical_value(_spec("link"), "not a uri")
    digest = "ff" * 32
    pair = canonical_value(_spec("hashlink"), ("https://x.example/d", digest))
    assert pair == make_hashlink("https://x.example/d", digest)
    assert canonical_value(_spec("hashlink"), pair) == pair
    with pytest.raises(ParameterError):
        canonical_value(_spec("hashlink"), ("https://x.example/d", "zz"))


def test_canonical_uploads_are_content_ids():
    cid = "0a" * 32
    assert canonical_value(_spec("upload"), cid) == cid
    assert canonical_value(_spec("hashupload"), cid) == cid
    with pytest.raises(ParameterError):
        canonical_value(_spec("upload"), "not-hex")


def test_canonical_triples_requires_exact_names():
    specs = (ParamSpec("kg", "int"), ParamSpec("variety", "string"))
    triples = canonical_triples(specs, {"kg": 5, "variety": "Bosana"})
    assert triples == [("kg", "int", "5"), ("variety", "string", "Bosana")]
    with pytest.raises(ParameterError):
        canonical_triples(specs, {"kg": 5})
    with pytest.raises(ParameterError):
        canonical_triples(specs, {"kg": 5, "variety": "x", "extra": 1})
