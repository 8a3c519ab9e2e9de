import math

import numpy as np
import pytest

from fusionstyle.labeling import StyleLabel
from fusionstyle.model.gradcheck import gradient_check, model_gradient_check, sample_coordinates
from fusionstyle.model.network import EncoderState, ModelConfig, ToyModel
from fusionstyle.seqformat import CapacityError, TaggedSequence, Vocab, serialize_document
from fusionstyle.text import make_document

WORDS = [f"w{i}" for i in range(10)]


def tiny(seed=0, d=8, heads=2, layers=2, max_sentences=3, **kw):
    v = Vocab(WORDS, max_sentences=max_sentences)
    cfg = ModelConfig(
        vocab_size=len(v), d_model=d, n_heads=heads, n_layers=layers, ffn_dim=2 * d,
        max_positions=24, max_sentences=max_sentences, seed=seed, **kw,
    )
    return ToyModel(cfg, v)


DOC = make_document("d", [["w1", "w2"], ["w3", "w4", "w5"]])
ITEMS = [(StyleLabel.ext(2), ["w3", "w4"]), (StyleLabel.abs(), ["w1", "w3"])]


def test_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(vocab_size=50, d_model=10, n_heads=3)
    with pytest.raises(ValueError):
        ModelConfig(vocab_size=5, max_sentences=8)


def test_param_init():
    m = tiny(new_param_norm=0.06)
    assert np.all(m.params["tag_emb"][0] == 0)
    assert m.params["alpha"][0] == 0.5
    ids = list(m.vocab.identifier_ids())
    norms = np.linalg.norm(m.params["tok_emb"][ids], axis=1)
    assert 0.0 < norms.mean() < 0.2


def test_encoder_shapes_and_capacity():
    m = tiny()
    seq = serialize_document(DOC)
    enc = m.encode(seq)
    assert enc.x_out.shape == (len(seq), 8) == enc.x_emb.shape
    assert len(enc.layers) == 2
    assert list(enc.ident_positions) == [0, 1, 5]
    long = make_document("d", [["w1"] * 30])
    with pytest.raises(CapacityError):
        m.encode(serialize_document(long))


def test_encoder_degenerate_params_constant_rows():
    m = tiny()
    for k in m.params:
        if ".ln" in k and k.endswith(".g"):
            m.params[k][:] = 0.0
        elif k.startswith("enc.") and ".w" in k:
            m.params[k][:] = 0.0
    m.params["enc.1.ln2.b"][:] = np.arange(8)
    enc = m.encode(serialize_document(DOC))
    assert np.all(enc.x_out == enc.x_out[0])


def test_encoder_permutation_equivariant_without_positions():
    m = tiny(use_positions=False)
    m.params["tag_emb"][1:] = np.random.default_rng(1).normal(size=(3, 8))
    seq = serialize_document(DOC)
    enc = m.encode(seq)
    # swap the two sentence blocks, carrying each token's tag along
    perm = [0] + list(range(5, 10)) + list(range(1, 5))
    ids = np.array(m.vocab.encode(seq.tokens))[perm]
    tags = np.array(seq.group_tags)[perm]
    enc2 = m.encode_ids(ids, tags)
    np.testing.assert_allclose(enc2.x_out, enc.x_out[perm], atol=1e-12)


def test_decode_step_start_only():
    m = tiny()
    enc = m.encode(serialize_document(DOC))
    dec = m.decode_step(enc, TaggedSequence((), ()))
    assert dec.token_logits.shape == (1, len(m.vocab))
    assert dec.y_match.shape == (1, 3)


def test_tag_changes_logits():
    m = tiny()
    m.params["tag_emb"][2] = 1.0
    enc = m.encode(serialize_document(DOC))
    a = m.decode_step(enc, TaggedSequence(("<S>", "w3"), (0, 0)))
    b = m.decode_step(enc, TaggedSequence(("<S_2>", "w3"), (2, 2)))
    c = m.decode_step(enc, TaggedSequence(("<S_2>", "w3"), (0, 0)))
    assert not np.allclose(b.token_logits, c.token_logits)
    assert a.token_logits.shape == b.token_logits.shape


def test_decoder_causal():
    m = tiny()
    enc = m.encode(serialize_document(DOC))
    a = m.decode_step(enc, TaggedSequence(("<S_1>", "w1", "w2", "</S>"), (1, 1, 1, 1)))
    b = m.decode_step(enc, TaggedSequence(("<S_1>", "w1", "w9", "</S>"), (1, 1, 1, 1)))
    # prefix token 3 sits at decoder row 3 (row 0 is <bos>)
    np.testing.assert_array_equal(a.token_logits[:3], b.token_logits[:3])
    assert not np.allclose(a.token_logits[3:], b.token_logits[3:])


def test_decode_step_rejects_bad_prefix():
    m = tiny()
    enc = m.encode(serialize_document(DOC))
    with pytest.raises(ValueError):
        m.decode_step(enc, TaggedSequence(("<eos>",), (0,)))


def test_style_pointer_hand_computed():
    v = Vocab(["a"], max_sentences=1)
    cfg = ModelConfig(vocab_size=len(v), d_model=2, n_heads=1, n_layers=1, ffn_dim=2, max_sentences=1)
    m = ToyModel(cfg, v)
    m.params["alpha"][0] = 0.25
    x_emb = np.array([[0.0, 0.0], [2.0, 0.0], [9.0, 9.0]])
    x_out = np.array([[1.0, 0.0], [0.0, 1.0], [7.0, 7.0]])
    enc = EncoderState(x_emb, x_out, [], np.array([0, 1]))
    y = np.array([1.0, 2.0])
    # mix(<S>) = (0.25, 0); mix(<S_1>) = (1.5, 0.25)
    l0 = 1.0 * 0.25 + 2.0 * 0.0
    l1 = 1.0 * 1.5 + 2.0 * 0.25
    z = math.exp(l0) + math.exp(l1)
    dist = m.style_pointer(enc, y)
    assert list(dist) == [StyleLabel.abs(), StyleLabel.ext(1)]
    assert dist[StyleLabel.abs()] == pytest.approx(math.exp(l0) / z, abs=1e-15)
    assert dist[StyleLabel.ext(1)] == pytest.approx(math.exp(l1) / z, abs=1e-15)
    # alpha = 1 -> only x_out at the identifier rows matters
    m.params["alpha"][0] = 1.0
    enc2 = EncoderState(x_emb * 100, x_out, [], np.array([0, 1]))
    assert m.style_pointer(enc2, y) == m.style_pointer(EncoderState(x_emb, x_out, [], np.array([0, 1])), y)


def test_style_distribution_support_and_shift():
    m = tiny()
    enc = m.encode(serialize_document(DOC))
    dec = m.decode_step(enc, TaggedSequence((), ()))
    dist = m.style_pointer(enc, dec.y_out[0])
    assert set(dist) == {StyleLabel.abs(), StyleLabel.ext(1), StyleLabel.ext(2)}
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-15)
    logits = dec.y_match[0]
    assert np.argmax(logits + 123.0) == np.argmax(logits)
    one = m.encode(serialize_document(make_document("d", [["w1"]])))
    assert len(m.style_pointer(one, dec.y_out[0])) == 2


def test_make_example_layout():
    m = tiny()
    ex = m.make_example(DOC, ITEMS)
    v = m.vocab
    assert v.decode(ex.tgt_ids) == ["<S_2>", "w3", "w4", "</S>", "<S>", "w1", "w3", "</S>", "<eos>"]
    assert v.decode(ex.dec_ids)[0] == "<bos>"
    assert list(ex.dec_tags) == [0, 2, 2, 2, 2, 0, 0, 0, 0]
    assert list(ex.decision_rows) == [0, 4]
    assert list(ex.decision_targets) == [2, 0]


def _independent_loss(m, ex, kappa):
    """Scalar NLL recomputation from raw logits with math.exp/log."""
    enc = m.encode_ids(ex.src_ids, ex.src_tags, ex.ident_positions)
    dec = m.decode_ids(enc, ex.dec_ids, ex.dec_tags, ex.decision_rows)
    tok = []
    for row, t in zip(dec.token_logits, ex.tgt_ids):
        z = sum(math.exp(float(x)) for x in row)
        tok.append(math.log(z) - float(row[t]))
    sty = []
    for row, t in zip(dec.y_match, ex.decision_targets):
        z = sum(math.exp(float(x)) for x in row)
        sty.append(math.log(z) - float(row[t]))
    return sum(tok) / len(tok) + kappa * sum(sty) / len(sty)


def test_loss_matches_independent_recomputation():
    m = tiny()
    ex = m.make_example(DOC, ITEMS)
    lb = m.loss([ex], 1.1)
    assert lb.total == pytest.approx(_independent_loss(m, ex, 1.1), abs=1e-12)
    lb2, _ = m.loss_and_grads([ex], 1.1)
    assert lb2.total == pytest.approx(lb.total, abs=1e-12)


def test_loss_kappa_zero_and_composition():
    m = tiny()
    batch = [m.make_example(DOC, ITEMS), m.make_example(DOC, ITEMS[1:])]
    lb = m.loss(batch, 0.0)
    assert lb.total == lb.token_loss
    lb = m.loss(batch, 1.1)
    assert abs(lb.total - (lb.token_loss + 1.1 * lb.style_loss)) < 1e-10
    assert lb.token_loss >= 0 and lb.style_loss >= 0


def test_uniform_token_loss():
    m = tiny()
    m.params["tok_emb"][:] = 0.0
    lb = m.loss([m.make_example(DOC, ITEMS)], 1.1)
    assert lb.token_loss == pytest.approx(math.log(len(m.vocab)), abs=1e-12)


def test_gradient_check_quadratic_probe():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6))
    a = a @ a.T
    b = rng.normal(size=6)
    params = {"x": rng.normal(size=6)}

    def f(p):
        x = p["x"]
        return float(0.5 * x @ a @ x + b @ x), {"x": a @ x + b}

    res = gradient_check(f, params, [("x", i) for i in range(6)], eps=1e-4)
    assert res.max_rel_error < 1e-9


def test_full_model_gradient_check():
    m = tiny(seed=3, new_param_norm=1.0)
    m.params["alpha"][0] = 0.3
    batch = [m.make_example(DOC, ITEMS)]
    res = model_gradient_check(m, batch, eps=1e-4, n_coords=200, rng=np.random.default_rng(0))
    assert res.n_coords >= 200
    assert res.max_rel_error < 1e-4, res.worst
    assert "alpha" in res.per_param and "tag_emb" in res.per_param


def test_tag_row_zero_gets_no_gradient():
    m = tiny()
    _, g = m.loss_and_grads([m.make_example(DOC, ITEMS)], 1.1)
    assert np.all(g["tag_emb"][0] == 0)
    assert np.any(g["tag_emb"][2] != 0)


def test_sample_coordinates_covers_every_tensor():
    m = tiny()
    coords = sample_coordinates(m.params, 200, np.random.default_rng(0))
    assert {n for n, _ in coords} == set(m.params)


def test_position_offset_shifts_rows_and_gradients():
    import dataclasses

    m = tiny(seed=4, new_param_norm=1.0)
    ex = m.make_example(DOC, ITEMS)
    shifted = dataclasses.replace(ex, src_offset=3, dec_offset=5)
    assert m.loss([shifted], 1.1).total != m.loss([ex], 1.1).total
    _, g = m.loss_and_grads([shifted], 1.1)
    assert np.all(g["enc_pos"][:3] == 0) and np.any(g["enc_pos"][3] != 0)
    assert np.all(g["dec_pos"][:5] == 0)
    res = model_gradient_check(m, [shifted], n_coords=200, rng=np.random.default_rng(1))
    assert res.max_rel_error < 1e-4
    with pytest.raises(CapacityError):
        m.loss([dataclasses.replace(ex, src_offset=20)], 1.1)
