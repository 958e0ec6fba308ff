"""Build the exact-string (EXCT) dictionary from titles, redirects,
disambiguation pages and anchor-text link counts.

A string/entity pair is scored (x+u)/(y+v): x of the string's y links
inside the encyclopedia and u of its v web links point at the entity.
"""
from __future__ import annotations

import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple

from ned.canonical import CanonicalMap, PageKind, PageRecord
from ned.errors import EmptyTitle, MalformedRow, UnresolvableTarget
from utils.tsv_io import parse_count, read_rows, render_decimal, write_rows

logger = logging.getLogger(__name__)


class Source(Enum):
    TITLE = "title"
    REDIRECT = "redirect"
    DISAMBIG = "disambig"
    ANCHOR_WIKI = "wiki"
    ANCHOR_WEB = "web"


_PROVENANCE = {s.value: s for s in Source}


@dataclass(frozen=True)
class LinkEvidence:
    wiki_hits: int = 0
    wiki_total: int = 0
    web_hits: int = 0
    web_total: int = 0

    @property
    def hits(self) -> int:
        return self.wiki_hits + self.web_hits

    @property
    def total(self) -> int:
        return self.wiki_total + self.web_total

    def __add__(self, other: "LinkEvidence") -> "LinkEvidence":
        return LinkEvidence(
            self.wiki_hits + other.wiki_hits,
            self.wiki_total + other.wiki_total,
            self.web_hits + other.web_hits,
            self.web_total + other.web_total,
        )

    def scaled(self, factor: int) -> "LinkEvidence":
        return LinkEvidence(self.wiki_hits * factor, self.wiki_total * factor,
                            self.web_hits * factor, self.web_total * factor)

    def only(self, view: str) -> "LinkEvidence":
        if view == "wiki":
            return LinkEvidence(self.wiki_hits, self.wiki_total, 0, 0)
        if view == "web":
            return LinkEvidence(0, 0, self.web_hits, self.web_total)
        return self


ZERO_EVIDENCE = LinkEvidence()


def score(e: LinkEvidence) -> Fraction:
    if e.total == 0:
        return Fraction(0)
    return Fraction(e.hits, e.total)


def render_score(value: Fraction) -> str:
    return render_decimal(float(value), 4)


def rank_key(entity: str, evidence: LinkEvidence) -> Tuple[Fraction, int, str]:
    # score desc, raw hit mass desc, title asc
    return (-score(evidence), -evidence.hits, entity)


@dataclass(frozen=True)
class DictionaryEntry:
    string: str
    entity: str
    evidence: LinkEvidence
    sources: FrozenSet[Source]

    @property
    def score(self) -> Fraction:
        return score(self.evidence)

    def sort_key(self):
        return rank_key(self.entity, self.evidence)


def _sources_field(sources: Iterable[Source]) -> str:
    return ",".join(sorted(s.value for s in sources))


class Dictionary:
    """Exact string -> ranked DictionaryEntry tuple. Read-only once built."""

    def __init__(
        self,
        entries: Mapping[str, Tuple[DictionaryEntry, ...]],
        kind_of: Optional[Mapping[str, PageKind]] = None,
        entity_links: Optional[Mapping[str, int]] = None,
    ):
        self._entries = dict(entries)
        self.kind_of = dict(kind_of or {})
        if entity_links is None:
            totals: Dict[str, int] = defaultdict(int)
            for ranked in self._entries.values():
                for e in ranked:
                    totals[e.entity] += e.evidence.hits
            entity_links = totals
        self.entity_links = dict(entity_links)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, s: str) -> bool:
        return s in self._entries

    def get(self, s: str) -> Tuple[DictionaryEntry, ...]:
        return self._entries.get(s, ())

    def keys(self) -> List[str]:
        return sorted(self._entries)

    def n_entries(self) -> int:
        return sum(len(v) for v in self._entries.values())

    def kind(self, entity: str) -> Optional[PageKind]:
        return self.kind_of.get(entity)

    def partition(self, view: str) -> "Dictionary":
        """Project every entry's counts onto one source ("wiki", "web" or "merged")."""
        if view == "merged":
            return self
        if view not in ("wiki", "web"):
            raise ValueError(f"unknown count view {view!r}")
        projected = {}
        for s, ranked in self._entries.items():
            items = [DictionaryEntry(e.string, e.entity, e.evidence.only(view), e.sources) for e in ranked]
            projected[s] = tuple(sorted(items, key=DictionaryEntry.sort_key))
        return Dictionary(projected, self.kind_of)

    def reverse_index(self) -> Dict[str, List[str]]:
        """entity -> sorted strings naming it."""
        out: Dict[str, List[str]] = defaultdict(list)
        for s in sorted(self._entries):
            for e in self._entries[s]:
                out[e.entity].append(s)
        return dict(out)

    def rows(self) -> Iterator[Tuple]:
        for s in sorted(self._entries):
            for e in self._entries[s]:
                ev = e.evidence
                yield (s, e.entity, render_score(e.score), ev.wiki_hits, ev.wiki_total,
                       ev.web_hits, ev.web_total, _sources_field(e.sources))

    def save(self, path) -> Path:
        return write_rows(path, self.rows())

    @classmethod
    def load(cls, path, kind_of: Optional[Mapping[str, PageKind]] = None) -> "Dictionary":
        grouped: Dict[str, List[DictionaryEntry]] = defaultdict(list)
        for line_no, f in read_rows(path, 8):
            s, entity, _score, x, y, u, v, sources = f
            ev = LinkEvidence(*(parse_count(c, path, line_no) for c in (x, y, u, v)))
            try:
                srcs = frozenset(Source(t) for t in sources.split(",") if t)
            except ValueError:
                raise MalformedRow(path, line_no, f"unknown source in {sources!r}") from None
            if not srcs:
                raise MalformedRow(path, line_no, "entry has no sources")
            grouped[s].append(DictionaryEntry(s, entity, ev, srcs))
        entries = {s: tuple(sorted(v, key=DictionaryEntry.sort_key)) for s, v in grouped.items()}
        return cls(entries, kind_of)


class LinkRow(NamedTuple):
    provenance: Source
    string: str
    target: str
    count: int
    line_no: int = 0


def read_links(path) -> Iterator[LinkRow]:
    for line_no, (prov, string, target, count) in read_rows(path, 4):
        source = _PROVENANCE.get(prov.strip().lower())
        if source is None:
            raise MalformedRow(path, line_no, f"unknown provenance {prov!r}")
        if not string:
            raise MalformedRow(path, line_no, "empty string field")
        yield LinkRow(source, string, target, parse_count(count, path, line_no), line_no)


_TRAILING_PAREN = re.compile(r"^(.*\S)\s*\([^()]*\)$")
_DISAMBIG_SUFFIX = re.compile(r"\s*\(disambiguation\)$", re.IGNORECASE)


def title_string(url_title: str) -> str:
    return url_title.replace("_", " ")


def strip_trailing_parenthetical(text: str) -> str:
    """'Hank Williams (basketball)' -> 'Hank Williams'; one final group only."""
    m = _TRAILING_PAREN.match(text)
    return m.group(1) if m else text


def disambiguation_string(title: str) -> str:
    return _DISAMBIG_SUFFIX.sub("", title_string(title)).strip()


class DictionaryBuilder:
    """Accumulates string/entity evidence; shards merge by addition."""

    def __init__(self):
        self.hits: Dict[Tuple[str, str], List[int]] = {}
        self.totals: Dict[str, List[int]] = defaultdict(lambda: [0, 0])
        self.sources: Dict[Tuple[str, str], set] = defaultdict(set)

    def _pair(self, string: str, entity: str) -> List[int]:
        pair = self.hits.get((string, entity))
        if pair is None:
            pair = self.hits[(string, entity)] = [0, 0]
        return pair

    def add_member(self, string: str, entity: str, source: Source) -> None:
        if not string:
            return
        self._pair(string, entity)
        self.sources[(string, entity)].add(source)

    def add_anchor(self, string: str, entity: str, source: Source, count: int) -> None:
        slot = 0 if source is Source.ANCHOR_WIKI else 1
        self._pair(string, entity)[slot] += count
        self.totals[string][slot] += count
        self.sources[(string, entity)].add(source)

    def add_link_row(self, row: LinkRow, cmap: CanonicalMap) -> None:
        try:
            entity = cmap.resolve(row.target)
        except EmptyTitle:
            raise UnresolvableTarget(row.target, row.line_no) from None
        if row.provenance in (Source.ANCHOR_WIKI, Source.ANCHOR_WEB):
            self.add_anchor(row.string, entity, row.provenance, row.count)
        elif row.provenance is Source.DISAMBIG:
            self.add_member(disambiguation_string(row.string), entity, Source.DISAMBIG)
        else:
            self.add_member(row.string, entity, row.provenance)

    def add_pages(self, pages: Iterable[PageRecord], cmap: CanonicalMap,
                  extra_titles: Iterable[str] = ()) -> None:
        for page in pages:
            canonical = cmap.resolve(page.url_title)
            if page.kind is PageKind.ARTICLE and canonical == page.url_title:
                self.add_member(strip_trailing_parenthetical(title_string(page.url_title)), canonical, Source.TITLE)
            elif page.kind is PageKind.REDIRECT and canonical != page.url_title:
                self.add_member(title_string(page.url_title), canonical, Source.REDIRECT)
            elif page.kind is PageKind.DISAMBIG:
                # the page itself is listed under its own name; fanout arrives as link rows
                self.add_member(disambiguation_string(page.url_title), canonical, Source.DISAMBIG)
        for title in extra_titles:
            canonical = cmap.resolve(title)
            self.add_member(strip_trailing_parenthetical(title_string(canonical)), canonical, Source.TITLE)

    def merge(self, other: "DictionaryBuilder") -> "DictionaryBuilder":
        for key, (x, u) in other.hits.items():
            pair = self._pair(*key)
            pair[0] += x
            pair[1] += u
        for s, (y, v) in other.totals.items():
            self.totals[s][0] += y
            self.totals[s][1] += v
        for key, srcs in other.sources.items():
            self.sources[key] |= srcs
        return self

    def freeze(self, kind_of: Optional[Mapping[str, PageKind]] = None) -> Dictionary:
        grouped: Dict[str, List[DictionaryEntry]] = defaultdict(list)
        entity_links: Dict[str, int] = defaultdict(int)
        for (string, entity), (x, u) in self.hits.items():
            y, v = self.totals.get(string, (0, 0))
            ev = LinkEvidence(x, y, u, v)
            grouped[string].append(DictionaryEntry(string, entity, ev, frozenset(self.sources[(string, entity)])))
            entity_links[entity] += x + u
        entries = {s: tuple(sorted(v, key=DictionaryEntry.sort_key)) for s, v in grouped.items()}
        d = Dictionary(entries, kind_of, entity_links)
        logger.info("dictionary: %d strings, %d entries", len(d), d.n_entries())
        return d


def harvest(
    pages: Iterable[PageRecord],
    canonical_map: CanonicalMap,
    links: Iterable[LinkRow],
    kb_titles: Iterable[str] = (),
) -> Dictionary:
    builder = DictionaryBuilder()
    builder.add_pages(pages, canonical_map, kb_titles)
    for row in links:
        builder.add_link_row(row, canonical_map)
    kinds = {c: canonical_map.kind_of.get(c, PageKind.CRAWL_ONLY) for c in canonical_map.canonicals()}
    return builder.freeze(kinds)
