"""Context-sensitive mention expansion.

A short mention ("Abbott", "ABC") is replaced by the longest string in its
document that names the same thing: an NER chunk around it, a coreferent
name, or a candidate title written out in full. The expanded string is
looked up again and its candidates are intersected with the original ones,
so expansion can only narrow the original list.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

from ned.dictbuild import Dictionary, strip_trailing_parenthetical, title_string
from ned.errors import MalformedRow, MentionNotFound
from ned.lookup import CandidateList, HeurThresholds, generate_candidates
from utils.tsv_io import read_rows

logger = logging.getLogger(__name__)


class Evidence(Enum):
    NER_CHUNK = "NerChunk"
    COREFERENCE = "Coreference"
    TITLE_MATCH = "TitleMatch"
    NONE = "None"


@dataclass(frozen=True)
class TextSpan:
    start: int
    end: int
    label: str = ""  # NER type or coreference chain id


@dataclass(frozen=True)
class ExpansionResult:
    original: str
    expanded: str
    evidence: Evidence
    final_candidates: CandidateList


class NerSource(Protocol):
    def chunks(self, doc_text: str) -> Sequence[TextSpan]:
        ...


class CorefSource(Protocol):
    def chains(self, doc_text: str) -> Sequence[TextSpan]:
        ...


@dataclass
class StandoffAnnotations:
    """Precomputed NER chunks and coreference mentions for one document."""

    ner: List[TextSpan]
    coref: List[TextSpan]

    def chunks(self, doc_text: str) -> Sequence[TextSpan]:
        return self.ner

    def chains(self, doc_text: str) -> Sequence[TextSpan]:
        return self.coref

    @classmethod
    def load(cls, path) -> "StandoffAnnotations":
        ner, coref = [], []
        for line_no, (start, end, kind, label) in read_rows(path, 4):
            try:
                span = TextSpan(int(start), int(end), label)
            except ValueError:
                raise MalformedRow(path, line_no, "offsets must be integers") from None
            if span.start < 0 or span.end <= span.start:
                raise MalformedRow(path, line_no, f"bad interval {start}:{end}")
            if kind == "ner":
                ner.append(span)
            elif kind == "coref":
                coref.append(span)
            else:
                raise MalformedRow(path, line_no, f"kind must be ner or coref, saw {kind!r}")
        return cls(ner, coref)

    @classmethod
    def for_document(cls, docs_dir, docid: str) -> Optional["StandoffAnnotations"]:
        path = Path(docs_dir) / f"{docid}.ann"
        return cls.load(path) if path.exists() else None


def _phrase_pattern(phrase: str, flags: int = 0) -> re.Pattern:
    words = phrase.split()
    return re.compile(r"(?<!\w)" + r"\s+".join(re.escape(w) for w in words) + r"(?!\w)", flags)


def find_occurrences(doc_text: str, mention: str) -> List[Tuple[int, int]]:
    """Whole-word occurrences; case-insensitive only if the exact form is absent."""
    if not mention.split():
        return []
    hits = [m.span() for m in _phrase_pattern(mention).finditer(doc_text)]
    if not hits:
        hits = [m.span() for m in _phrase_pattern(mention, re.IGNORECASE).finditer(doc_text)]
    return hits


def match_form(title: str) -> str:
    return strip_trailing_parenthetical(title_string(title))


def title_matches_in_doc(doc_text: str, candidates: CandidateList) -> List[Tuple[str, Tuple[int, int]]]:
    matches = []
    for title in candidates.entities():
        form = match_form(title)
        if not form.split():
            continue
        for m in _phrase_pattern(form, re.IGNORECASE).finditer(doc_text):
            matches.append((title, m.span()))
    matches.sort(key=lambda t: (t[1][0], t[1][1], t[0]))
    return matches


def _contains(outer: Tuple[int, int], inner: Tuple[int, int]) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


def _overlaps(a: Tuple[int, int], b: Tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def gather_expansions(
    doc_text: str,
    occurrences: Sequence[Tuple[int, int]],
    candidates: CandidateList,
    ner: Optional[NerSource] = None,
    coref: Optional[CorefSource] = None,
) -> List[Tuple[str, int, Evidence]]:
    """(surface, start offset, evidence) for every expansion the annotators offer."""
    found: List[Tuple[str, int, Evidence]] = []
    if ner is not None:
        for chunk in ner.chunks(doc_text):
            iv = (chunk.start, chunk.end)
            if any(_contains(iv, occ) for occ in occurrences):
                found.append((doc_text[chunk.start:chunk.end], chunk.start, Evidence.NER_CHUNK))
    if coref is not None:
        spans = list(coref.chains(doc_text))
        linked = {s.label for s in spans if any(_overlaps((s.start, s.end), occ) for occ in occurrences)}
        for s in spans:
            if s.label in linked:
                found.append((doc_text[s.start:s.end], s.start, Evidence.COREFERENCE))
    for _, (start, end) in title_matches_in_doc(doc_text, candidates):
        found.append((doc_text[start:end], start, Evidence.TITLE_MATCH))
    return found


def _normalize_space(text: str) -> str:
    return " ".join(text.split())


def expand_mention(
    doc_text: str,
    mention: str,
    d: Dictionary,
    ner: Optional[NerSource] = None,
    coref: Optional[CorefSource] = None,
    mode: str = "HEUR",
    thresholds: HeurThresholds = HeurThresholds(),
    max_distance: Optional[int] = None,
) -> ExpansionResult:
    occurrences = find_occurrences(doc_text, mention)
    if not occurrences:
        raise MentionNotFound(mention)
    original = generate_candidates(d, mention, mode, thresholds, max_distance)
    unchanged = ExpansionResult(mention, mention, Evidence.NONE, original)

    priority: Dict[Evidence, int] = {e: i for i, e in enumerate(Evidence)}
    options = [
        (_normalize_space(text), start, ev)
        for text, start, ev in gather_expansions(doc_text, occurrences, original, ner, coref)
    ]
    options = [o for o in options if len(o[0]) > len(mention)]
    if not options:
        return unchanged
    expanded, _, evidence = min(options, key=lambda o: (-len(o[0]), o[1], priority[o[2]], o[0]))

    requeried = generate_candidates(d, expanded, mode, thresholds, max_distance)
    final = requeried.restricted_to(original.entities())
    if not final:
        logger.debug("expansion %r of %r shares no candidate; keeping original", expanded, mention)
        return unchanged
    return ExpansionResult(mention, expanded, evidence, final)
