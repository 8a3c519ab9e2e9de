import numpy as np
import pytest

from fusionstyle.labeling import OracleConfig, label_pair
from fusionstyle.model.synthetic import ABS_CUE, EXT_CUE, MARKER, make_synthetic_corpus


def test_all_ext_when_mix_is_one():
    corpus = make_synthetic_corpus(seed=0, size=50, style_mix=1.0)
    assert all(lab.is_ext for ex in corpus for lab in ex.labels)


def test_mix_fraction():
    corpus = make_synthetic_corpus(seed=0, size=1000, style_mix=0.5)
    labs = [lab.is_ext for ex in corpus for lab in ex.labels]
    assert abs(np.mean(labs) - 0.5) < 0.05


def test_construction():
    for ex in make_synthetic_corpus(seed=3, size=100):
        stream = ex.doc.stream()
        content = [t for t in stream if t not in (EXT_CUE, ABS_CUE)]
        assert len(content) == len(set(content))
        assert 2 <= len(ex.doc.sentences) <= 6
        assert 1 <= len(ex.summary) <= 2
        cued = []
        for s, lab in zip(ex.summary, ex.labels):
            if lab.is_ext:
                src = ex.doc.sentences[lab.source_index - 1].tokens
                assert s.tokens == src + (MARKER,)
                assert src[-1] == EXT_CUE
                cued.append(lab.source_index)
            else:
                assert s.tokens == tuple(d.tokens[0] for d in ex.doc.sentences)
        assert cued == sorted(cued)


def test_ext_fusion_below_abs_fusion():
    corpus = make_synthetic_corpus(seed=0, size=100)
    ext, ab = [], []
    for ex in corpus:
        pair = label_pair(ex.doc, ex.summary, OracleConfig())
        for (_, _, fs), lab in zip(pair.summary, ex.labels):
            (ext if lab.is_ext else ab).append(fs.fusion_index)
    assert ext and ab
    assert max(ext) < min(ab)


def test_deterministic_and_validated():
    a = make_synthetic_corpus(seed=5, size=20)
    assert a == make_synthetic_corpus(seed=5, size=20)
    assert a != make_synthetic_corpus(seed=6, size=20)
    rec = a[0].to_record()
    assert set(rec) == {"id", "document", "summary"}
    with pytest.raises(ValueError):
        make_synthetic_corpus(seed=0, size=1, style_mix=1.5)
