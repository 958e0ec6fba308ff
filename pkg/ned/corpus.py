"""Linked training corpus and the span records cut from it.

Input documents are JSON lines ``{"doc_id": ..., "html": ...}``. Only text
inside ``<p>...</p>`` is kept; ``<a href="Title">anchor</a>`` marks a link
whose target is resolved to its canonical entity.
"""
from __future__ import annotations

import html
import json
import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from ned.annotate import AnnotatedToken, Annotator, RuleAnnotator
from ned.canonical import CanonicalMap
from ned.errors import EmptyTitle, MalformedRow

logger = logging.getLogger(__name__)

SPAN_WIDTH = 100

_PARAGRAPH = re.compile(r"<p\b[^>]*>(.*?)</p\s*>", re.IGNORECASE | re.DOTALL)
_ANCHOR = re.compile(r"<a\b[^>]*?\bhref\s*=\s*\"([^\"]*)\"[^>]*>(.*?)</a\s*>", re.IGNORECASE | re.DOTALL)
_TAG = re.compile(r"<[^>]+>")
_SPACE = re.compile(r"\s+")


@dataclass(frozen=True)
class LinkOccurrence:
    doc_id: str
    start: int  # token interval in the document stream, end exclusive
    end: int
    target: str
    anchor_text: str


@dataclass
class CorpusDocument:
    doc_id: str
    tokens: List[AnnotatedToken]
    paragraph_of: List[int]
    text: str = ""

    def token_range(self, char_start: int, char_end: int) -> Tuple[int, int]:
        """Tokens overlapping the character interval [char_start, char_end)."""
        idx = [i for i, t in enumerate(self.tokens) if t.start < char_end and t.end > char_start]
        if not idx:
            return -1, -1
        return idx[0], idx[-1] + 1


@dataclass(frozen=True)
class TrainingSpan:
    tokens: Tuple[AnnotatedToken, ...]
    anchor_range: Tuple[int, int]
    anchor_text: str
    target: Optional[str]
    source_doc: str

    def __post_init__(self):
        start, end = self.anchor_range
        if not (0 <= start < end <= len(self.tokens)):
            raise ValueError(f"anchor range {self.anchor_range} outside span of {len(self.tokens)} tokens")


def _clean(fragment: str) -> str:
    return _SPACE.sub(" ", html.unescape(_TAG.sub("", fragment)))


def _href_title(href: str) -> str:
    href = html.unescape(href).split("#", 1)[0]
    for prefix in ("/wiki/", "./"):
        if href.startswith(prefix):
            href = href[len(prefix):]
    return href


def _paragraph_text(fragment: str) -> Tuple[str, List[Tuple[int, int, str, str]]]:
    """Plain paragraph text and its anchors as (char_start, char_end, href, anchor_text)."""
    parts: List[str] = []
    anchors = []
    pos = 0
    length = 0
    for m in _ANCHOR.finditer(fragment):
        before = _clean(fragment[pos:m.start()])
        parts.append(before)
        length += len(before)
        anchor = _clean(m.group(2)).strip()
        if anchor:
            last = next((p[-1] for p in reversed(parts) if p), "")
            if last and not last.isspace():
                parts.append(" ")
                length += 1
            anchors.append((length, length + len(anchor), m.group(1), anchor))
            parts.append(anchor)
            length += len(anchor)
        pos = m.end()
    parts.append(_clean(fragment[pos:]))
    return "".join(parts), anchors


class LinkedCorpus:
    """Annotated paragraph token streams plus an entity -> link occurrence index."""

    def __init__(self, annotator: Optional[Annotator] = None):
        self.annotator = annotator or RuleAnnotator()
        self.documents: Dict[str, CorpusDocument] = {}
        self.links: Dict[str, List[LinkOccurrence]] = defaultdict(list)

    def __len__(self) -> int:
        return len(self.documents)

    def add_html(self, doc_id: str, markup: str, cmap: CanonicalMap) -> CorpusDocument:
        tokens: List[AnnotatedToken] = []
        paragraph_of: List[int] = []
        sentence = 0
        offset = 0
        texts = []
        for p_idx, m in enumerate(_PARAGRAPH.finditer(markup)):
            text, anchors = _paragraph_text(m.group(1))
            para_tokens = self.annotator.annotate(text, offset=offset, first_sentence=sentence)
            first = len(tokens)
            tokens.extend(para_tokens)
            paragraph_of.extend([p_idx] * len(para_tokens))
            if para_tokens:
                sentence = para_tokens[-1].sentence + 1
            for a_start, a_end, href, anchor in anchors:
                idx = [first + i for i, t in enumerate(para_tokens)
                       if t.start < offset + a_end and t.end > offset + a_start]
                if not idx:
                    continue
                try:
                    target = cmap.resolve(_href_title(href))
                except EmptyTitle:
                    logger.debug("%s: skipping link with empty target", doc_id)
                    continue
                self.links[target].append(LinkOccurrence(doc_id, idx[0], idx[-1] + 1, target, anchor))
            texts.append(text)
            offset += len(text) + 2
        doc = CorpusDocument(doc_id, tokens, paragraph_of, "\n\n".join(texts))
        self.documents[doc_id] = doc
        return doc

    def occurrences_of(self, entity: str) -> List[LinkOccurrence]:
        return self.links.get(entity, [])

    def n_links(self) -> int:
        return sum(len(v) for v in self.links.values())

    @classmethod
    def from_records(cls, records: Iterable[Tuple[str, str]], cmap: CanonicalMap,
                     annotator: Optional[Annotator] = None) -> "LinkedCorpus":
        corpus = cls(annotator)
        for doc_id, markup in records:
            corpus.add_html(doc_id, markup, cmap)
        logger.info("corpus: %d documents, %d links", len(corpus), corpus.n_links())
        return corpus

    @classmethod
    def from_jsonl(cls, path, cmap: CanonicalMap, annotator: Optional[Annotator] = None) -> "LinkedCorpus":
        return cls.from_records(_read_jsonl(path), cmap, annotator)


def _read_jsonl(path) -> Iterator[Tuple[str, str]]:
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").split("\n"), start=1):
        if not line.strip():
            continue
        try:
            j = json.loads(line)
            yield str(j["doc_id"]), j["html"]
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise MalformedRow(path, line_no, f"bad corpus record: {e}") from None


def plain_document(doc_id: str, text: str, annotator: Optional[Annotator] = None) -> CorpusDocument:
    """Annotate a query document: plain text, paragraphs split on blank lines."""
    annotator = annotator or RuleAnnotator()
    tokens: List[AnnotatedToken] = []
    paragraph_of: List[int] = []
    sentence = 0
    offset = 0
    for p_idx, para in enumerate(re.split(r"(\n\s*\n)", text)):
        if p_idx % 2 == 0 and para.strip():
            para_tokens = annotator.annotate(para, offset=offset, first_sentence=sentence)
            tokens.extend(para_tokens)
            paragraph_of.extend([p_idx // 2] * len(para_tokens))
            if para_tokens:
                sentence = para_tokens[-1].sentence + 1
        offset += len(para)
    return CorpusDocument(doc_id, tokens, paragraph_of, text)


def cut_span(doc: CorpusDocument, start: int, end: int, span_mode: str,
             target: Optional[str], anchor_text: str) -> TrainingSpan:
    """Context around tokens [start, end): 100 tokens each side, the sentence, or the paragraph."""
    n = len(doc.tokens)
    if span_mode == "T100":
        lo, hi = max(0, start - SPAN_WIDTH), min(n, end + SPAN_WIDTH)
    elif span_mode == "SENT":
        lo, hi = _extent(doc, start, end, lambda i: doc.tokens[i].sentence)
    elif span_mode == "PARA":
        lo, hi = _extent(doc, start, end, lambda i: doc.paragraph_of[i])
    else:
        raise ValueError(f"unknown span mode {span_mode!r}")
    return TrainingSpan(tuple(doc.tokens[lo:hi]), (start - lo, end - lo), anchor_text, target, doc.doc_id)


def _extent(doc: CorpusDocument, start: int, end: int, group) -> Tuple[int, int]:
    lo, hi = start, end
    first, last = group(start), group(end - 1)
    while lo > 0 and group(lo - 1) == first:
        lo -= 1
    while hi < len(doc.tokens) and group(hi) == last:
        hi += 1
    return lo, hi


# --- spans file ------------------------------------------------------------

_HEADER = re.compile(r"^# target=(\S+) anchor=(\d+):(\d+) doc=(.*)$")
NO_TARGET = "-"


def write_spans(path, spans: Sequence[TrainingSpan]) -> Path:
    lines: List[str] = []
    for span in spans:
        start, end = span.anchor_range
        lines.append(f"# target={span.target or NO_TARGET} anchor={start}:{end} doc={span.source_doc}")
        for t in span.tokens:
            lines.append(f"{t.surface}\t{t.lemma}\t{t.pos}\t{t.coarse}")
        lines.append("")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path


def read_spans(path) -> List[TrainingSpan]:
    spans: List[TrainingSpan] = []
    header = None
    tokens: List[AnnotatedToken] = []

    def flush(line_no: int):
        if header is None:
            return
        target, start, end, doc = header
        anchor_text = " ".join(t.surface for t in tokens[start:end])
        try:
            spans.append(TrainingSpan(tuple(tokens), (start, end), anchor_text,
                                      None if target == NO_TARGET else target, doc))
        except ValueError as e:
            raise MalformedRow(path, line_no, str(e)) from None

    lines = Path(path).read_text(encoding="utf-8").split("\n")
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            flush(line_no)
            header, tokens = None, []
            continue
        if line.startswith("# "):
            if header is not None:
                raise MalformedRow(path, line_no, "span header before blank line")
            m = _HEADER.match(line)
            if not m:
                raise MalformedRow(path, line_no, "bad span header")
            header = (m.group(1), int(m.group(2)), int(m.group(3)), m.group(4))
            continue
        if header is None:
            raise MalformedRow(path, line_no, "token line outside a span")
        fields = line.split("\t")
        if len(fields) != 4 or not fields[1] or not fields[2]:
            raise MalformedRow(path, line_no, "expected surface, lemma, pos_fine, pos_coarse")
        tokens.append(AnnotatedToken(fields[0], fields[1], fields[2], fields[3]))
    flush(len(lines))
    return spans
