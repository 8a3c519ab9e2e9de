"""
Training the toy style-switching summarizer
===========================================

A small encoder-decoder learns to (1) decide at each sentence boundary
whether the next summary sentence is extractive from sentence k or
abstractive, and (2) write it, guided by group tags that mark which
document sentence it should draw on. Training runs in three stages: a
copy task for the backbone, then the new style parameters alone, then
everything jointly.

This script uses a reduced corpus and epoch budget so it finishes in a few
minutes; the acceptance suite uses 2000 training examples and the default
:class:`TrainConfig` recipe.
"""

import time

from fusionstyle.model import ModelConfig, Stage, ToyModel, TrainConfig, infer, make_synthetic_corpus, random_styles, train
from fusionstyle.model.evaluate import evaluate
from fusionstyle.model.synthetic import synthetic_vocab

vocab = synthetic_vocab(max_sentences=8)
cfg = ModelConfig(vocab_size=len(vocab), d_model=64, n_heads=4, n_layers=2, ffn_dim=128,
                  max_positions=96, max_sentences=8, seed=0)
model = ToyModel(cfg, vocab)

train_set = make_synthetic_corpus(seed=0, size=1000, style_mix=0.5)
held_out = make_synthetic_corpus(seed=1, size=100, style_mix=0.5)

###############################################################################
# Per-epoch log rows carry both loss terms and the mean norms of the
# identifier-token and group-tag embeddings, which start small and grow
# once the style parameters are trained.

tcfg = TrainConfig(epochs={Stage.PRETRAIN_BASE: 10, Stage.PRE_FINETUNE: 4, Stage.JOINT_FINETUNE: 20})
t0 = time.perf_counter()
rows = train(model, train_set, tcfg,
             on_epoch=lambda r: print(f"  {r.stage:<15} {r.epoch:>2}  token {r.token_loss:.3f}  style {r.style_loss:.3f}"
                                      f"  |id| {r.identifier_norm:.2f}  |tag| {r.group_tag_norm:.2f}"))
print(f"trained in {time.perf_counter() - t0:.0f}s")

###############################################################################
# Greedy decoding: the pointer picks a style at every boundary, and the
# decoder is constrained so that every output parses.

ex = held_out[0]
gen = infer(model, ex.doc)
print("reference:", [f"{lab} {' '.join(s.tokens)}" for s, lab in zip(ex.summary, ex.labels)])
print("generated:", [f"{lab} {' '.join(toks)}" for lab, toks in gen.summary.sentences])

###############################################################################
# Held-out scores, and the same decoder with styles drawn at random.

pred = evaluate(model, held_out)
rand = evaluate(model, held_out, choose_style=random_styles(0))
print(f"style macro-F1 {pred.style_f1:.3f}, Ext token accuracy {pred.ext_token_accuracy:.3f}")
print(f"token accuracy with predicted styles {pred.token_accuracy:.3f}, random styles {rand.token_accuracy:.3f}")

###############################################################################
# Style prediction is learned quickly; verbatim copying needs more data and
# joint epochs, so Ext token accuracy here stays well below the full recipe.
# Decoding with random styles drops token accuracy sharply either way.
