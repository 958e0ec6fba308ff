"""Binary context features for word-expert classifiers.

Templates (the anchor is one opaque token, its words joined by "_"):

    anchor=            anchor text
    bow=               every lemma in the span outside the anchor
    win4=              noun/verb/adjective lemmas within 4 tokens of the anchor
    {prev,next}{N,V,A}_{lemma,word}=
                       nearest noun/verb/adjective before and after the anchor
    bi_{word,lemma,pos}_{before,after}=
    tri_{word,lemma,pos}_{before,around,after}=
"""
from __future__ import annotations

from typing import Dict, Sequence

from ned.annotate import ADJ, NOUN, VERB, AnnotatedToken
from ned.corpus import TrainingSpan

WINDOW = 4

FeatureVector = Dict[str, float]

_COARSE_LETTER = {NOUN: "N", VERB: "V", ADJ: "A"}


def anchor_unit(span: TrainingSpan) -> Dict[str, str]:
    start, end = span.anchor_range
    words = [t.surface for t in span.tokens[start:end]]
    unit = "_".join(" ".join(words).split())
    return {"word": unit, "lemma": unit, "pos": span.tokens[end - 1].pos}


def _value(t: AnnotatedToken, layer: str) -> str:
    if layer == "word":
        return t.surface
    if layer == "lemma":
        return t.lemma
    return t.pos


def featurize(span: TrainingSpan) -> FeatureVector:
    tokens = span.tokens
    start, end = span.anchor_range
    before: Sequence[AnnotatedToken] = tokens[:start]
    after: Sequence[AnnotatedToken] = tokens[end:]
    anchor = anchor_unit(span)
    feats: FeatureVector = {"anchor=" + anchor["word"]: 1.0}

    for t in list(before) + list(after):
        if any(ch.isalnum() for ch in t.surface):
            feats["bow=" + t.lemma] = 1.0

    for t in list(before[-WINDOW:]) + list(after[:WINDOW]):
        if t.content:
            feats["win4=" + t.lemma] = 1.0

    for side, seq in (("prev", reversed(before)), ("next", after)):
        seen = set()
        for t in seq:
            letter = _COARSE_LETTER.get(t.coarse)
            if letter is None or letter in seen:
                continue
            seen.add(letter)
            feats[f"{side}{letter}_lemma={t.lemma}"] = 1.0
            feats[f"{side}{letter}_word={t.surface}"] = 1.0
            if len(seen) == 3:
                break

    for layer in ("word", "lemma", "pos"):
        a = anchor[layer]
        b = [_value(t, layer) for t in before[-2:]]
        f = [_value(t, layer) for t in after[:2]]
        if b:
            feats[f"bi_{layer}_before={b[-1]} {a}"] = 1.0
        if f:
            feats[f"bi_{layer}_after={a} {f[0]}"] = 1.0
        if len(b) == 2:
            feats[f"tri_{layer}_before={b[0]} {b[1]} {a}"] = 1.0
        if b and f:
            feats[f"tri_{layer}_around={b[-1]} {a} {f[0]}"] = 1.0
        if len(f) == 2:
            feats[f"tri_{layer}_after={a} {f[0]} {f[1]}"] = 1.0
    return feats

