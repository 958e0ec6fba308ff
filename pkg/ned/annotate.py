"""Linguistic annotation: tokens, lemmas, part-of-speech, sentence ids.

``RuleAnnotator`` is the bundled default: a closed-class lexicon, suffix
heuristics for open-class words and a suffix-stripping lemmatizer. Any
object with the same ``annotate`` method can replace it.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Protocol, Tuple

NOUN, VERB, ADJ, OTHER = "NOUN", "VERB", "ADJ", "OTHER"


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    lemma: str
    pos: str       # fine tag
    coarse: str    # NOUN / VERB / ADJ / OTHER
    start: int = 0  # character offsets in the annotated text
    end: int = 0
    sentence: int = 0

    @property
    def content(self) -> bool:
        return self.coarse in (NOUN, VERB, ADJ)


class Annotator(Protocol):
    def annotate(self, text: str, offset: int = 0, first_sentence: int = 0) -> List[AnnotatedToken]:
        ...


_TOKEN = re.compile(r"\w+(?:[-'’.]\w+)*|[^\w\s]", re.UNICODE)
_TERMINAL = {".", "!", "?"}

# (fine tag, lemma or None to keep the lowercased form)
_CLOSED: dict = {}


def _closed(tag: str, words: str, lemma: str = None) -> None:
    for w in words.split():
        _CLOSED[w] = (tag, lemma)


_closed("DT", "the a an this that these those every each some any no all both")
_closed("IN", "of in on at by for with from into onto about over under after before "
              "during between through against without within among upon as than via")
_closed("TO", "to")
_closed("CC", "and or but nor yet so")
_closed("PRP", "i you he she it we they me him her us them himself herself itself themselves")
_closed("PRP$", "my your his its our their")
_closed("WP", "who whom whose which what")
_closed("WRB", "when where why how")
_closed("MD", "can could may might must shall should will would")
_closed("RB", "not very also too just only never always often then here still even")
_closed("EX", "there")
_closed("VBZ", "is", "be")
_closed("VBP", "are am", "be")
_closed("VBD", "was were", "be")
_closed("VB", "be", "be")
_closed("VBN", "been", "be")
_closed("VBG", "being", "be")
_closed("VBZ", "has", "have")
_closed("VBP", "have", "have")
_closed("VBD", "had", "have")
_closed("VBZ", "does", "do")
_closed("VBD", "did", "do")
_closed("VBD", "died", "die")
_closed("JJS", "worst", "bad")
_closed("JJR", "worse", "bad")
_closed("JJS", "best", "good")
_closed("JJR", "better", "good")
_closed("NNS", "people", "people")
_closed("NNS", "children", "child")
_closed("NNS", "men", "man")
_closed("NNS", "women", "woman")

_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ical", "less", "ish", "ary")
_UNDOUBLE_EXEMPT = set("lsz")


def _undouble(stem: str) -> str:
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in _UNDOUBLE_EXEMPT and stem[-1] not in "aeiou":
        return stem[:-1]
    return stem


def lemmatize(word: str, tag: str) -> str:
    w = word.lower()
    if tag in ("NNS",):
        if w.endswith("ies") and len(w) > 4:
            return w[:-3] + "y"
        if w.endswith(("sses", "shes", "ches", "xes")):
            return w[:-2]
        if w.endswith("s") and not w.endswith(("ss", "us", "is")):
            return w[:-1]
        return w
    if tag == "VBG" and w.endswith("ing") and len(w) > 5:
        return _undouble(w[:-3])
    if tag in ("VBD", "VBN") and w.endswith("ed") and len(w) > 4:
        if w.endswith("ied"):
            return w[:-3] + "y"
        return _undouble(w[:-2])
    if tag == "VBZ" and w.endswith("s"):
        return w[:-1]
    return w


def _open_class(word: str, sentence_initial: bool) -> Tuple[str, str]:
    w = word.lower()
    if re.fullmatch(r"[\d.,:/\-]+", word):
        return "CD", OTHER
    if word[0].isupper() and not sentence_initial:
        return "NNP", NOUN
    if word.isupper() and len(word) > 1:
        return "NNP", NOUN
    if w.endswith("ly") and len(w) > 4:
        return "RB", OTHER
    if w.endswith("ing") and len(w) > 5:
        return "VBG", VERB
    if w.endswith("ed") and len(w) > 4:
        return "VBD", VERB
    if w.endswith("est") and len(w) > 5:
        return "JJS", ADJ
    if w.endswith(_ADJ_SUFFIXES):
        return "JJ", ADJ
    if w.endswith("s") and not w.endswith(("ss", "us", "is")) and len(w) > 3:
        return "NNS", NOUN
    if word[0].isupper():
        return "NNP", NOUN
    return "NN", NOUN


def _coarse(tag: str) -> str:
    if tag.startswith("NN"):
        return NOUN
    if tag.startswith("VB"):
        return VERB
    if tag.startswith("JJ"):
        return ADJ
    return OTHER


def tag_word(word: str, sentence_initial: bool) -> Tuple[str, str, str]:
    """(fine tag, coarse tag, lemma)"""
    if not any(ch.isalnum() for ch in word):
        return "PUNCT", OTHER, word
    closed = _CLOSED.get(word.lower())
    if closed is not None:
        tag, lemma = closed
        return tag, _coarse(tag), lemma or word.lower()
    tag, coarse = _open_class(word, sentence_initial)
    if tag == "NNP":
        return tag, coarse, word
    if tag == "CD":
        return tag, coarse, word
    return tag, coarse, lemmatize(word, tag)


class RuleAnnotator:
    """Regex tokenizer, terminal-punctuation sentence splitter, rule tagger."""

    def annotate(self, text: str, offset: int = 0, first_sentence: int = 0) -> List[AnnotatedToken]:
        tokens: List[AnnotatedToken] = []
        sentence = first_sentence
        sentence_initial = True
        pending_break = False
        for m in _TOKEN.finditer(text):
            word = m.group(0)
            if pending_break and word[0].isupper():
                sentence += 1
                sentence_initial = True
            pending_break = False
            tag, coarse, lemma = tag_word(word, sentence_initial)
            tokens.append(AnnotatedToken(word, lemma, tag, coarse, offset + m.start(), offset + m.end(), sentence))
            sentence_initial = False
            if word in _TERMINAL:
                pending_break = True
        return tokens

