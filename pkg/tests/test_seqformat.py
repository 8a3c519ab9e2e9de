import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusionstyle.labeling import LabeledPair, StyleLabel
from fusionstyle.metrics import FusionScores
from fusionstyle.seqformat import (
    SENT_END,
    CapacityError,
    EmptySentence,
    UnexpectedContent,
    UnexpectedIdentifier,
    UnknownSentenceIndex,
    UnterminatedSentence,
    Vocab,
    parse_document,
    parse_summary,
    serialize_document,
    serialize_styled,
    serialize_summary,
)
from fusionstyle.text import Sentence, make_document

word = st.sampled_from(["w1", "w2", "w3", "w4", "x", "y"])
sent = st.lists(word, min_size=1, max_size=5)


def test_serialize_document_two_sentences():
    doc = make_document("d", [["w1", "w2"], ["w3", "w4"]])
    seq = serialize_document(doc)
    assert " ".join(seq.tokens) == "<S> <S_1> w1 w2 </S> <S_2> w3 w4 </S>"
    assert seq.group_tags == (0, 1, 1, 1, 1, 2, 2, 2, 2)


def test_serialize_document_minimal():
    seq = serialize_document(make_document("d", [["w"]]))
    assert seq.tokens == ("<S>", "<S_1>", "w", "</S>")


def test_capacity():
    doc = make_document("d", [["a"]] * 3)
    with pytest.raises(CapacityError):
        serialize_document(doc, max_sentences=2)
    assert len(serialize_document(doc, max_sentences=2, truncate=True).tokens) == 1 + 2 * 3


def _pair(doc_sents, items):
    doc = make_document("d", doc_sents)
    fs = FusionScores(0.0, 0.0, 0.0, 1)
    return LabeledPair(doc, tuple((Sentence(tuple(t), i + 1), lab, fs) for i, (lab, t) in enumerate(items)))


def test_serialize_summary_ext_then_abs():
    pair = _pair([["a"], ["b", "c"]], [(StyleLabel.ext(2), ["w1", "w2"]), (StyleLabel.abs(), ["w3", "w4"])])
    seq = serialize_summary(pair)
    assert seq.tokens == ("<S_2>", "w1", "w2", "</S>", "<S>", "w3", "w4", "</S>")
    assert seq.group_tags == (2, 2, 2, 2, 0, 0, 0, 0)


def test_serialize_summary_edge_cases():
    assert serialize_summary(_pair([["a"]], [])).tokens == ()
    seq = serialize_summary(_pair([["a"]], [(StyleLabel.abs(), ["p"]), (StyleLabel.abs(), ["q"])]))
    assert set(seq.group_tags) == {0}
    assert seq.tokens[0] == "<S>" and seq.tokens[3] == "<S>"
    with pytest.raises(ValueError):
        serialize_styled([(StyleLabel.ext(3), ["a"])], n_doc_sentences=2)


def test_parse_examples():
    assert parse_summary("<S_2> a b </S>".split()).sentences == ((StyleLabel.ext(2), ("a", "b")),)
    got = parse_summary("<S> a </S> <S_1> b </S>".split())
    assert got.sentences == ((StyleLabel.abs(), ("a",)), (StyleLabel.ext(1), ("b",)))
    with pytest.raises(UnexpectedIdentifier) as e:
        parse_summary("<S_2> a <S> b </S>".split())
    assert e.value.position == 3


@pytest.mark.parametrize(
    "seq, err",
    [
        ("</S>", UnexpectedIdentifier),
        ("<S> a", UnterminatedSentence),
        ("<S> </S>", EmptySentence),
        ("<S_3> a </S>", UnknownSentenceIndex),
        ("a <S> b </S>", UnexpectedContent),
    ],
)
def test_parse_errors(seq, err):
    with pytest.raises(err):
        parse_summary(seq.split(), n_doc_sentences=2)


def test_parse_empty():
    assert parse_summary([]).sentences == ()


@given(st.lists(sent, min_size=1, max_size=6))
def test_document_round_trip(doc_sents):
    doc = make_document("d", doc_sents)
    seq = serialize_document(doc)
    assert parse_document(seq.tokens, "d") == doc
    assert set(seq.group_tags) <= set(range(len(doc_sents) + 1))


@st.composite
def styled(draw):
    n_doc = draw(st.integers(1, 6))
    items = draw(
        st.lists(
            st.tuples(st.one_of(st.just(None), st.integers(1, n_doc)), sent),
            max_size=5,
        )
    )
    return n_doc, [(StyleLabel.abs() if k is None else StyleLabel.ext(k), tuple(w)) for k, w in items]


@given(styled())
def test_summary_round_trip_and_tag_runs(case):
    n_doc, items = case
    seq = serialize_styled(items, n_doc)
    parsed = parse_summary(seq.tokens, n_doc_sentences=n_doc)
    assert list(parsed.sentences) == items
    assert serialize_styled(parsed.sentences, n_doc) == seq
    # tags constant from the opening identifier to its </S>
    start = 0
    for i, t in enumerate(seq.tokens):
        if t == SENT_END:
            assert len(set(seq.group_tags[start : i + 1])) == 1
            start = i + 1
    assert all(0 <= t <= n_doc for t in seq.group_tags)


def test_vocab_layout():
    v = Vocab(["b", "a", "<S>", "a"], max_sentences=3)
    assert v.itos[:5] == ["<unk>", "<bos>", "<eos>", "a", "b"]
    assert v.itos[v.id_start :] == ["<S>", "</S>", "<S_1>", "<S_2>", "<S_3>"]
    assert list(v.identifier_ids()) == list(range(5, 10))
    assert v.sent_start_id(2) == v.stoi["<S_2>"]
    assert v.encode(["a", "zzz"]) == [3, 0]
    assert Vocab.from_list(v.itos, 3).itos == v.itos
    with pytest.raises(ValueError):
        Vocab.from_list(v.itos, 4)
    with pytest.raises(CapacityError):
        v.sent_start_id(4)
