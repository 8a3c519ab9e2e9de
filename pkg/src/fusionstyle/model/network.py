"""A small post-norm encoder-decoder with group tags and a style pointer.

Inputs are the sum of token, position and group-tag embeddings.  Group tag
0 maps to an all-zero row, so untagged tokens (the generator path) get no
tag signal.  At style-decision steps the decoder output is matched against
``alpha * x_out + (1 - alpha) * x_emb`` at the encoder's ``<S>`` and
``<S_k>`` positions; the softmax over those positions picks Abs or Ext(k).
Next-token logits are the decoder output matched against the (tied) token
embedding table.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..labeling import StyleLabel
from ..seqformat import (
    DOC_START,
    SENT_END,
    CapacityError,
    TaggedSequence,
    Vocab,
    sentence_id_of,
    serialize_document,
    serialize_styled,
)
from ..text import Document
from . import layers as L

__all__ = [
    "ModelConfig",
    "LossBreakdown",
    "EncoderState",
    "DecoderState",
    "Example",
    "ToyModel",
]


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    d_model: int = 64
    n_heads: int = 4
    n_layers: int = 2
    ffn_dim: int = 128
    max_positions: int = 128
    max_sentences: int = 8
    seed: int = 0
    # initial norm of identifier-token and group-tag rows
    new_param_norm: float = 0.06
    use_positions: bool = True

    def __post_init__(self):
        for name in ("vocab_size", "d_model", "n_heads", "n_layers", "ffn_dim", "max_positions", "max_sentences"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.d_model % self.n_heads:
            raise ValueError("d_model must be divisible by n_heads")
        if self.vocab_size < self.max_sentences + 2:
            raise ValueError("vocabulary too small for the identifier range")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class LossBreakdown:
    token_loss: float
    style_loss: float
    kappa: float
    total: float
    n_tokens: int = 0
    n_decisions: int = 0


@dataclass
class EncoderState:
    x_emb: np.ndarray
    x_out: np.ndarray
    layers: list  # per-layer outputs x^(l)
    ident_positions: np.ndarray  # encoder rows of <S>, <S_1>, ..., <S_n>
    cache: Optional[list] = None


@dataclass
class DecoderState:
    y_out: np.ndarray
    token_logits: np.ndarray
    decision_rows: np.ndarray
    y_match: np.ndarray  # pointer logits, one row per decision row
    cache: Optional[list] = None


@dataclass
class Example:
    """One training pair lowered to id arrays."""

    src_ids: np.ndarray
    src_tags: np.ndarray
    dec_ids: np.ndarray
    dec_tags: np.ndarray
    tgt_ids: np.ndarray
    decision_rows: np.ndarray
    decision_targets: np.ndarray  # 0 = Abs, k = Ext(k)
    ident_positions: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    # first row of the position tables used by this example (training-time shift)
    src_offset: int = 0
    dec_offset: int = 0


def _ident_positions(tokens: Sequence[str]) -> np.ndarray:
    pos = {}
    for i, t in enumerate(tokens):
        if t == DOC_START and 0 not in pos:
            pos[0] = i
        else:
            k = sentence_id_of(t)
            if k is not None:
                pos[k] = i
    return np.array([pos[k] for k in sorted(pos)], dtype=np.int64)


class ToyModel:
    """Parameters plus forward/backward passes of the style-switching model."""

    def __init__(self, cfg: ModelConfig, vocab: Vocab, params: Optional[dict] = None):
        if len(vocab) != cfg.vocab_size:
            raise ValueError(f"vocab has {len(vocab)} entries, config says {cfg.vocab_size}")
        if vocab.max_sentences != cfg.max_sentences:
            raise ValueError("vocab and config disagree on max_sentences")
        self.cfg = cfg
        self.vocab = vocab
        self.params = params if params is not None else self.init_params(cfg, vocab)

    # -- parameters -------------------------------------------------------

    @staticmethod
    def param_shapes(cfg: ModelConfig) -> dict[str, tuple]:
        d, f = cfg.d_model, cfg.ffn_dim
        shapes = {
            "tok_emb": (cfg.vocab_size, d),
            "tag_emb": (cfg.max_sentences + 1, d),
            "enc_pos": (cfg.max_positions, d),
            "dec_pos": (cfg.max_positions, d),
            "alpha": (1,),
        }

        def attn(pre):
            for w in "qkvo":
                shapes[f"{pre}.w{w}"] = (d, d)
                if w != "k":
                    shapes[f"{pre}.b{w}"] = (d,)

        def ln(pre):
            shapes[pre + ".g"] = (d,)
            shapes[pre + ".b"] = (d,)

        def ffn(pre):
            shapes.update({pre + ".w1": (d, f), pre + ".b1": (f,), pre + ".w2": (f, d), pre + ".b2": (d,)})

        for l in range(cfg.n_layers):
            attn(f"enc.{l}.attn")
            ln(f"enc.{l}.ln1")
            ffn(f"enc.{l}.ffn")
            ln(f"enc.{l}.ln2")
        for l in range(cfg.n_layers):
            attn(f"dec.{l}.self")
            ln(f"dec.{l}.ln1")
            attn(f"dec.{l}.cross")
            ln(f"dec.{l}.ln2")
            ffn(f"dec.{l}.ffn")
            ln(f"dec.{l}.ln3")
        return shapes

    @classmethod
    def init_params(cls, cfg: ModelConfig, vocab: Vocab) -> dict[str, np.ndarray]:
        rng = np.random.default_rng(cfg.seed)
        d = cfg.d_model
        p = {}
        for name, shape in cls.param_shapes(cfg).items():
            if name == "alpha":
                p[name] = np.full(shape, 0.5)
            elif name.endswith(".g"):
                p[name] = np.ones(shape)
            elif len(shape) == 1:
                p[name] = np.zeros(shape)
            elif name in ("tok_emb", "enc_pos", "dec_pos"):
                p[name] = rng.normal(0.0, d**-0.5, shape)
            elif name == "tag_emb":
                p[name] = rng.normal(0.0, cfg.new_param_norm * d**-0.5, shape)
            else:
                p[name] = rng.normal(0.0, shape[0] ** -0.5, shape)
        ids = list(vocab.identifier_ids())
        p["tok_emb"][ids] = rng.normal(0.0, cfg.new_param_norm * d**-0.5, (len(ids), d))
        p["tag_emb"][0] = 0.0
        return p

    def new_param_masks(self) -> dict[str, np.ndarray]:
        """Masks selecting the parameters the style machinery adds to a plain seq2seq.

        Identifier-token rows, group-tag rows 1.. and alpha.
        """
        tok = np.zeros(self.params["tok_emb"].shape, dtype=bool)
        tok[list(self.vocab.identifier_ids())] = True
        tag = np.ones(self.params["tag_emb"].shape, dtype=bool)
        tag[0] = False
        return {"tok_emb": tok, "tag_emb": tag, "alpha": np.ones(1, dtype=bool)}

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.params.items()}

    # -- lowering ---------------------------------------------------------

    def document_sequence(self, doc: Document) -> TaggedSequence:
        return serialize_document(doc, self.cfg.max_sentences, truncate=True)

    def make_example(self, doc: Document, items: Sequence[tuple[StyleLabel, Sequence[str]]]) -> Example:
        """Teacher-forcing arrays for a document and its styled summary sentences."""
        src = self.document_sequence(doc)
        n_doc = len(doc.sentences)
        tgt = serialize_styled(
            [(lab, words) for lab, words in items if not lab.is_ext or lab.source_index <= self.cfg.max_sentences],
            min(n_doc, self.cfg.max_sentences),
        )
        v = self.vocab
        dec_ids = [v.bos_id] + v.encode(tgt.tokens)
        dec_tags = [0] + list(tgt.group_tags)
        tgt_ids = v.encode(tgt.tokens) + [v.eos_id]
        rows, targets = [], []
        for t, tok in enumerate(tgt.tokens):
            prev = dec_ids[t]
            if prev in (v.bos_id, v.sent_end_id):
                k = sentence_id_of(tok)
                if tok == DOC_START or k is not None:
                    rows.append(t)
                    targets.append(k or 0)
        return Example(
            src_ids=np.array(v.encode(src.tokens), dtype=np.int64),
            src_tags=np.array(src.group_tags, dtype=np.int64),
            dec_ids=np.array(dec_ids, dtype=np.int64),
            dec_tags=np.array(dec_tags, dtype=np.int64),
            tgt_ids=np.array(tgt_ids, dtype=np.int64),
            decision_rows=np.array(rows, dtype=np.int64),
            decision_targets=np.array(targets, dtype=np.int64),
            ident_positions=_ident_positions(src.tokens),
        )

    def make_copy_example(self, doc: Document) -> Example:
        """Plain copy task without identifier tokens or group tags."""
        v = self.vocab
        ids = v.encode(doc.stream())[: self.cfg.max_positions - 1]
        z = np.zeros(len(ids) + 1, dtype=np.int64)
        return Example(
            src_ids=np.array(ids, dtype=np.int64),
            src_tags=np.zeros(len(ids), dtype=np.int64),
            dec_ids=np.array([v.bos_id] + ids, dtype=np.int64),
            dec_tags=z,
            tgt_ids=np.array(ids + [v.eos_id], dtype=np.int64),
            decision_rows=np.zeros(0, dtype=np.int64),
            decision_targets=np.zeros(0, dtype=np.int64),
        )

    # -- forward ----------------------------------------------------------

    def _embed(self, ids, tags, pos_table, offset=0):
        p = self.params
        n = len(ids)
        if offset + n > self.cfg.max_positions:
            raise CapacityError(f"sequence of {n} tokens exceeds max_positions={self.cfg.max_positions}")
        x = p["tok_emb"][ids] + p["tag_emb"][tags]
        if self.cfg.use_positions:
            x = x + p[pos_table][offset : offset + n]
        return x

    def encode_ids(self, ids, tags, ident_positions=None, pos_offset=0) -> EncoderState:
        p, cfg = self.params, self.cfg
        x_emb = self._embed(ids, tags, "enc_pos", pos_offset)
        h = x_emb
        caches, outs = [], []
        for l in range(cfg.n_layers):
            a, c_att = L.attention_fwd(h, h, p, f"enc.{l}.attn", cfg.n_heads)
            h1, c_ln1 = L.layer_norm_fwd(h + a, p, f"enc.{l}.ln1")
            f, c_ffn = L.ffn_fwd(h1, p, f"enc.{l}.ffn")
            h, c_ln2 = L.layer_norm_fwd(h1 + f, p, f"enc.{l}.ln2")
            caches.append((c_att, c_ln1, c_ffn, c_ln2))
            outs.append(h)
        if ident_positions is None:
            ident_positions = np.zeros(0, dtype=np.int64)
        return EncoderState(x_emb, h, outs, np.asarray(ident_positions, dtype=np.int64), caches)

    def encode(self, doc_sequence: TaggedSequence) -> EncoderState:
        return self.encode_ids(
            np.array(self.vocab.encode(doc_sequence.tokens), dtype=np.int64),
            np.array(doc_sequence.group_tags, dtype=np.int64),
            _ident_positions(doc_sequence.tokens),
        )

    def decode_ids(self, enc: EncoderState, ids, tags, decision_rows=None, pos_offset=0) -> DecoderState:
        p, cfg = self.params, self.cfg
        y = self._embed(ids, tags, "dec_pos", pos_offset)
        caches = []
        for l in range(cfg.n_layers):
            a, c_self = L.attention_fwd(y, y, p, f"dec.{l}.self", cfg.n_heads, causal=True)
            y1, c_ln1 = L.layer_norm_fwd(y + a, p, f"dec.{l}.ln1")
            c, c_cross = L.attention_fwd(y1, enc.x_out, p, f"dec.{l}.cross", cfg.n_heads)
            y2, c_ln2 = L.layer_norm_fwd(y1 + c, p, f"dec.{l}.ln2")
            f, c_ffn = L.ffn_fwd(y2, p, f"dec.{l}.ffn")
            y, c_ln3 = L.layer_norm_fwd(y2 + f, p, f"dec.{l}.ln3")
            caches.append((c_self, c_ln1, c_cross, c_ln2, c_ffn, c_ln3))
        logits = y @ p["tok_emb"].T
        rows = np.zeros(0, dtype=np.int64) if decision_rows is None else np.asarray(decision_rows, dtype=np.int64)
        y_match = self.pointer_logits(enc, y[rows]) if len(enc.ident_positions) else np.zeros((len(rows), 0))
        return DecoderState(y, logits, rows, y_match, caches)

    def decode_step(self, enc: EncoderState, summary_prefix: TaggedSequence) -> DecoderState:
        """Run the decoder over ``<bos>`` plus a (possibly partial) summary.

        ``y_match`` is filled at every style-decision row: the start and
        each row whose input token is ``</S>``.
        """
        v = self.vocab
        toks = list(summary_prefix.tokens)
        for t in toks:
            if t in (v.BOS, v.EOS):
                raise ValueError(f"{t} cannot appear inside a summary prefix")
        ids = np.array([v.bos_id] + v.encode(toks), dtype=np.int64)
        tags = np.array([0] + list(summary_prefix.group_tags), dtype=np.int64)
        if tags.max(initial=0) > self.cfg.max_sentences:
            raise ValueError("group tag beyond max_sentences")
        rows = [0] + [i + 1 for i, t in enumerate(toks) if t == SENT_END]
        return self.decode_ids(enc, ids, tags, rows)

    def mix(self, enc: EncoderState) -> np.ndarray:
        a = self.params["alpha"][0]
        I = enc.ident_positions
        return a * enc.x_out[I] + (1.0 - a) * enc.x_emb[I]

    def pointer_logits(self, enc: EncoderState, y_rows: np.ndarray) -> np.ndarray:
        return np.atleast_2d(y_rows) @ self.mix(enc).T

    def style_pointer(self, enc: EncoderState, y_out_at_decision: np.ndarray) -> dict[StyleLabel, float]:
        """Distribution over Abs and Ext(k) for one decision-step decoder output."""
        probs = L.softmax(self.pointer_logits(enc, y_out_at_decision)[0])
        labels = [StyleLabel.abs()] + [StyleLabel.ext(k) for k in range(1, len(probs))]
        return dict(zip(labels, probs.tolist()))

    # -- loss and gradients -----------------------------------------------

    def _example_grads(self, ex: Example, tok_w: float, style_w: float, grads: dict):
        """Forward + backward of ``tok_w * token_nll + style_w * style_nll``."""
        p, cfg = self.params, self.cfg
        enc = self.encode_ids(ex.src_ids, ex.src_tags, ex.ident_positions, ex.src_offset)
        dec = self.decode_ids(enc, ex.dec_ids, ex.dec_tags, ex.decision_rows, ex.dec_offset)

        tok_nll, dlogits = L.cross_entropy(dec.token_logits, ex.tgt_ids)
        dlogits *= tok_w
        grads["tok_emb"] += dlogits.T @ dec.y_out
        dy = dlogits @ p["tok_emb"]

        dx_out = np.zeros_like(enc.x_out)
        dx_emb = np.zeros_like(enc.x_emb)
        style_nll = 0.0
        if len(ex.decision_rows):
            I = enc.ident_positions
            m = self.mix(enc)
            style_nll, dS = L.cross_entropy(dec.y_match, ex.decision_targets)
            dS *= style_w
            dy[ex.decision_rows] += dS @ m
            dm = dS.T @ dec.y_out[ex.decision_rows]
            a = p["alpha"][0]
            grads["alpha"][0] += float((dm * (enc.x_out[I] - enc.x_emb[I])).sum())
            dx_out[I] += a * dm
            dx_emb[I] += (1.0 - a) * dm

        dx_out += self._decoder_back(dy, dec.cache, ex, grads)
        self._encoder_back(dx_out, dx_emb, enc.cache, ex, grads)
        return tok_nll, style_nll

    def _embed_back(self, dx, ids, tags, pos_table, offset, grads):
        np.add.at(grads["tok_emb"], ids, dx)
        np.add.at(grads["tag_emb"], tags, dx)
        if self.cfg.use_positions:
            grads[pos_table][offset : offset + len(ids)] += dx

    def _decoder_back(self, dy, caches, ex: Example, grads):
        p = self.params
        dx_out = 0.0
        for c_self, c_ln1, c_cross, c_ln2, c_ffn, c_ln3 in reversed(caches):
            d = L.layer_norm_back(dy, c_ln3, grads)
            d2 = d + L.ffn_back(d, c_ffn, p, grads)
            d = L.layer_norm_back(d2, c_ln2, grads)
            dq, dkv = L.attention_back(d, c_cross, p, grads)
            dx_out = dx_out + dkv
            d1 = d + dq
            d = L.layer_norm_back(d1, c_ln1, grads)
            dq, dkv = L.attention_back(d, c_self, p, grads)
            dy = d + dq + dkv
        self._embed_back(dy, ex.dec_ids, ex.dec_tags, "dec_pos", ex.dec_offset, grads)
        return dx_out

    def _encoder_back(self, dx_out, dx_emb, caches, ex: Example, grads):
        p = self.params
        dh = dx_out
        for c_att, c_ln1, c_ffn, c_ln2 in reversed(caches):
            d = L.layer_norm_back(dh, c_ln2, grads)
            d1 = d + L.ffn_back(d, c_ffn, p, grads)
            d = L.layer_norm_back(d1, c_ln1, grads)
            dq, dkv = L.attention_back(d, c_att, p, grads)
            dh = d + dq + dkv
        self._embed_back(dh + dx_emb, ex.src_ids, ex.src_tags, "enc_pos", ex.src_offset, grads)

    def loss_and_grads(self, batch: Sequence[Example], kappa: float, need_grads: bool = True):
        """Batch loss ``L_token + kappa * L_style`` and its gradient.

        Token loss is averaged over all target tokens in the batch, style
        loss over all decision steps.  Group-tag row 0 never receives a
        gradient.
        """
        if not batch:
            raise ValueError("empty batch")
        n_tok = sum(len(ex.tgt_ids) for ex in batch)
        n_dec = sum(len(ex.decision_rows) for ex in batch)
        tok_w = 1.0 / n_tok
        style_w = kappa / n_dec if n_dec else 0.0
        grads = self.zero_grads()
        tok_sum = style_sum = 0.0
        for ex in batch:
            if need_grads:
                t, s = self._example_grads(ex, tok_w, style_w, grads)
            else:
                t, s = self._example_loss(ex)
            tok_sum += t
            style_sum += s
        grads["tag_emb"][0] = 0.0
        token_loss = tok_sum / n_tok
        style_loss = style_sum / n_dec if n_dec else 0.0
        lb = LossBreakdown(token_loss, style_loss, kappa, token_loss + kappa * style_loss, n_tok, n_dec)
        return lb, grads

    def _example_loss(self, ex: Example):
        enc = self.encode_ids(ex.src_ids, ex.src_tags, ex.ident_positions, ex.src_offset)
        dec = self.decode_ids(enc, ex.dec_ids, ex.dec_tags, ex.decision_rows, ex.dec_offset)
        tok = -L.log_softmax(dec.token_logits)[np.arange(len(ex.tgt_ids)), ex.tgt_ids].sum()
        style = 0.0
        if len(ex.decision_rows):
            style = -L.log_softmax(dec.y_match)[np.arange(len(ex.decision_rows)), ex.decision_targets].sum()
        return float(tok), float(style)

    def loss(self, batch: Sequence[Example], kappa: float) -> LossBreakdown:
        return self.loss_and_grads(batch, kappa, need_grads=False)[0]
