import math

import numpy as np
import pytest

from semstyle import langgen as lg
from semstyle.corpus import STYLE_TOKENS
from semstyle.termpipe.pipeline import extract_terms
from semstyle.text import normalize
from semstyle.trainer import TrainConfig, train_langgen

STYLE = 4  # first free id after the reserved block when no vocab is attached


def random_model(seed=0, He=3, Hv=11, **kw):
    cfg = lg.LangGenConfig(in_vocab=9, out_vocab=Hv, embed_dim=4, word_dim=4, enc_hidden=He,
                           dropout=0.0, **kw)
    m = lg.LangGenModel.init(cfg, seed=seed, dtype=np.float64)
    r = np.random.default_rng(seed + 100)
    for k in m.params:
        m.params[k] = r.uniform(-1, 1, size=m.params[k].shape)
    return m


def test_encoder_shapes():
    m = random_model()
    enc, h0 = lg.encode(m, [5, 6, 7], STYLE)
    assert enc.shape == (4, 6) and h0.shape == (6,)


def test_default_widths():
    cfg = lg.LangGenConfig(in_vocab=20, out_vocab=30)
    m = lg.LangGenModel.init(cfg)
    assert m.params["Wa"].shape == (1024, 1024)
    assert m.params["out_W"].shape == (2048, 30)
    enc, h0 = lg.encode(m, [5, 6], STYLE)
    assert enc.shape == (3, 1024)


def test_decoder_init_is_last_encoder_state():
    m = random_model()
    enc, h0 = lg.encode(m, [5, 6, 7], STYLE)
    assert np.array_equal(h0, enc[-1])


def test_decoder_init_ends_variant():
    m = random_model(dec_init="ends")
    enc, h0 = lg.encode(m, [5, 6, 7], STYLE)
    assert np.array_equal(h0, np.concatenate([enc[-1, :3], enc[0, 3:]]))


def test_single_input_position():
    m = random_model()
    enc, h0 = lg.encode(m, [], STYLE)
    assert enc.shape == (1, 6)
    assert np.array_equal(h0, enc[0])
    a, c = lg.attend(m.params["Wa"], enc, np.ones(6))
    assert np.array_equal(a, [1.0]) and np.allclose(c, enc[0])


def test_order_matters():
    m = random_model()
    e1, _ = lg.encode(m, [5, 6, 7], STYLE)
    e2, _ = lg.encode(m, [7, 6, 5], STYLE)
    assert not np.allclose(e1, e2)


def test_style_token_appended_last():
    assert lg.frame_source([5, 6], STYLE) == [5, 6, STYLE]
    m = random_model()
    last, _ = lg.encode(m, [5, 6], STYLE)
    # moving the style token to the front changes the encoding
    src = np.array([[STYLE, 5, 6]])
    moved, _, _ = lg._encode(m.params, m.cfg, src, np.ones((1, 3)))
    assert not np.allclose(last, moved[0])


def test_zero_attention_weights_average(rng):
    enc = rng.normal(size=(5, 6))
    a, c = lg.attend(np.zeros((6, 6)), enc, rng.normal(size=6))
    assert np.allclose(a, 0.2) and np.allclose(c, enc.mean(axis=0))


def test_attention_rows_normalized():
    m = random_model(seed=4)
    _, trace = lg.generate(m, [5, 6, 7, 8], STYLE, max_len=10)
    assert trace.weights
    for row in trace.weights:
        assert abs(row.sum() - 1) < 1e-6 and np.all(row >= 0) and row.shape == (5,)
    loss, trace = lg.langgen_loss(m, [5, 6], STYLE, [2, 5, 6, 3])
    assert len(trace.weights) == 3
    assert all(abs(r.sum() - 1) < 1e-6 for r in trace.weights)


def test_uniform_model_loss():
    m = random_model()
    for v in m.params.values():
        v[...] = 0.0
    loss, _ = lg.langgen_loss(m, [5, 6], STYLE, [2, 5, 7, 3])
    assert loss == pytest.approx(math.log(11), abs=1e-12)


def test_generation_never_emits_reserved():
    m = random_model(seed=2)
    m.params["out_b"][[0, 1, 2]] = 100.0  # pad, unk, bos would win without masking
    ids, _ = lg.generate(m, [5, 6], STYLE, max_len=6)
    assert not set(ids) & {0, 1, 2}


def test_empty_terms_generate():
    m = random_model(seed=5)
    ids, trace = lg.generate(m, [], STYLE, max_len=4)
    assert len(ids) <= 4
    assert all(w.shape == (1,) for w in trace.weights)


def test_batch_matches_single():
    m = random_model(seed=6)
    inputs = [[5], [5, 6, 7, 8], [6, 7]]
    outs, _ = lg.generate_batch(m, inputs, STYLE, max_len=7)
    for ids, terms in zip(outs, inputs):
        assert ids == lg.generate(m, terms, STYLE, max_len=7)[0]


def test_no_attention_variant():
    m = random_model(attention=False)
    loss, g, a = lg.loss_and_grads(m.params, m.cfg, [[5, STYLE]], [[2, 5, 3]])
    assert a is None and not np.any(g["Wa"])


def test_exemplar_pair_overfits():
    sentence = "The dog bounded through the fresh grass."
    terms = extract_terms(sentence).render()
    assert terms == ["dog_NOUN", "Self_motion_FRAME", "grass_NOUN"]
    pairs = [(terms, normalize(sentence))]
    cfg = TrainConfig(lr=0.01, batch_size=1, epochs=150, mode="romonly", dropout=0.0,
                      embed_dim=16, hidden_dim=16)
    m = train_langgen([], pairs, cfg)
    loss, _ = lg.langgen_loss(m, m.in_vocab.encode(terms), STYLE_TOKENS[1],
                              [m.out_vocab.bos, *m.out_vocab.encode(pairs[0][1]), m.out_vocab.eos])
    assert loss < 0.01
    assert lg.generate_text(m, terms, STYLE_TOKENS[1]) == "the dog bounded through the fresh grass ."
