"""
How fused is a summary sentence?
================================

A walk through the per-sentence metrics on a short news-style document:
the best single-sentence match (recall), how spread the match is over the
document (scatter), their combination into the fusion index, and the two
classic extractiveness baselines (novel n-grams, fragment coverage).
"""

from fusionstyle import extractive_fragments, fusion_index, make_document, novel_ngram_fraction, split_sentences, tokenize
from fusionstyle.metrics import match_profile

document = (
    "The city council approved a new budget on Monday. "
    "Spending on public transport will rise by ten percent. "
    "The mayor said road repairs would start in spring. "
    "Opposition members voted against the plan."
)
doc_sentences = split_sentences(document)
doc = make_document("council", [s.tokens for s in doc_sentences])
for s in doc.sentences:
    print(f"[{s.index}] {' '.join(s.tokens)}")

###############################################################################
# Three candidate summary sentences: a near copy, a rewrite that pulls from
# two sentences, and a sentence with no support in the document at all.

candidates = {
    "copy": "the city council approved a new budget .",
    "fused": "the council approved more transport spending and spring road repairs .",
    "unsupported": "analysts expect taxes to fall next year .",
}

###############################################################################
# Match scores are the mean of ROUGE-1, ROUGE-2 and ROUGE-L recall with the
# summary sentence as reference. Scatter is the normalized entropy of the
# top-K scores; K defaults to 5 and is capped by the document length.

for name, text in candidates.items():
    toks = tokenize(text)
    prof = match_profile(toks, doc, k=5)
    fs = fusion_index(toks, doc)
    print(f"\n{name}: {text}")
    print("  match scores:", ", ".join(f"[{i}] {s:.3f}" for i, s in prof.scores))
    print(f"  recall {fs.recall:.3f} (sentence {fs.best_match_index}), scatter {fs.scatter:.3f}")
    print(f"  fusion index = (1 - recall) * scatter = {fs.fusion_index:.3f}")

###############################################################################
# The baselines see the same sentences very differently: they measure how
# much text is copied, not from how many places it is drawn.

for name, text in candidates.items():
    toks = tokenize(text)
    frag = extractive_fragments(toks, doc)
    nov = novel_ngram_fraction(toks, doc).novel_fraction
    print(f"{name:>12}: coverage {frag.coverage:.2f}, density {frag.density:.2f}, "
          f"novel 1/2/3-grams {nov[1]:.2f}/{nov[2]:.2f}/{nov[3]:.2f}")

###############################################################################
# The unsupported sentence matches every document sentence equally weakly,
# so it gets the highest fusion index: scatter alone cannot tell fusion from
# free writing, and the novel n-gram columns are needed to separate them.
# The copy has recall close to 1 and a fusion index near 0, whatever its
# scatter.
