"""Redirect-graph resolution: every page title maps to one canonical entity.

Titles joined by a redirect edge (in either direction) form one component.
The canonical page of a component is picked by preference: KB titles first
(when a KB is supplied), then articles, then redirect/disambiguation pages,
then pages known only from crawl data; ties break on the title string.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import AbstractSet, Dict, Hashable, Iterable, Iterator, List, Optional, Tuple
from urllib.parse import unquote

from ned.errors import EmptyTitle, MalformedRow
from utils.tsv_io import read_rows, write_rows

logger = logging.getLogger(__name__)


class PageKind(Enum):
    ARTICLE = "article"
    REDIRECT = "redirect"
    DISAMBIG = "disambig"
    CRAWL_ONLY = "crawl"

    @property
    def preference(self) -> int:
        if self is PageKind.ARTICLE:
            return 1
        if self in (PageKind.REDIRECT, PageKind.DISAMBIG):
            return 2
        return 3


# pages.tsv only carries the three dump kinds
_PAGE_FILE_KINDS = {"article": PageKind.ARTICLE, "redirect": PageKind.REDIRECT, "disambig": PageKind.DISAMBIG}


@dataclass(frozen=True)
class PageRecord:
    url_title: str
    kind: PageKind

    def __post_init__(self):
        if not self.url_title:
            raise EmptyTitle(self.url_title)


@dataclass(frozen=True)
class RedirectEdge:
    source: str
    target: str


_UNDERSCORES = re.compile(r"_+")


def canonicalize_title(raw: str) -> str:
    """Spaces to underscores, collapse/strip underscores, uppercase first letter.

    Percent-escapes are decoded exactly once.
    """
    s = unquote(raw.strip())
    s = s.replace(" ", "_")
    s = _UNDERSCORES.sub("_", s).strip("_")
    if not s:
        raise EmptyTitle(raw)
    first = s[0].upper()
    # "ß".upper() == "SS"; only single-character case mappings apply
    if len(first) == 1:
        s = first + s[1:]
    return s


class UnionFind:
    """Disjoint sets over hashable items, path compression + union by rank."""

    def __init__(self, elements: Iterable[Hashable] = ()):
        self.parent: Dict[Hashable, Hashable] = {}
        self.rank: Dict[Hashable, int] = {}
        for el in elements:
            self.add(el)

    def add(self, el: Hashable) -> None:
        if el not in self.parent:
            self.parent[el] = el
            self.rank[el] = 0

    def find(self, el: Hashable) -> Hashable:
        root = el
        while self.parent[root] != root:
            root = self.parent[root]
        # second pass compresses; iterative to survive long redirect chains
        while self.parent[el] != root:
            self.parent[el], el = root, self.parent[el]
        return root

    def union(self, a: Hashable, b: Hashable) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1

    def components(self) -> Dict[Hashable, List[Hashable]]:
        groups: Dict[Hashable, List[Hashable]] = {}
        for el in self.parent:
            groups.setdefault(self.find(el), []).append(el)
        return groups


class CanonicalMap:
    """Title -> canonical title, plus the page kind of every known title.

    Titles never seen at build time resolve to themselves and are recorded
    as crawl-only canonicals on first use.
    """

    def __init__(self, mapping: Dict[str, str], kind_of: Dict[str, PageKind]):
        self.mapping = mapping
        self.kind_of = kind_of

    def __len__(self) -> int:
        return len(self.mapping)

    def __contains__(self, title: str) -> bool:
        return title in self.mapping

    def resolve(self, t: str) -> str:
        hit = self.mapping.get(t)
        if hit is not None:
            return hit
        title = canonicalize_title(t)
        hit = self.mapping.get(title)
        if hit is not None:
            return hit
        self.mapping.setdefault(title, title)
        self.kind_of.setdefault(title, PageKind.CRAWL_ONLY)
        return self.mapping[title]

    def canonical_kind(self, t: str) -> PageKind:
        return self.kind_of.get(self.resolve(t), PageKind.CRAWL_ONLY)

    def canonicals(self) -> List[str]:
        return sorted({c for c in self.mapping.values()})

    def rows(self) -> Iterator[Tuple[str, str, str]]:
        for title in sorted(self.mapping):
            yield title, self.mapping[title], self.kind_of.get(title, PageKind.CRAWL_ONLY).value

    def save(self, path) -> Path:
        return write_rows(path, self.rows())

    @classmethod
    def load(cls, path) -> "CanonicalMap":
        mapping: Dict[str, str] = {}
        kind_of: Dict[str, PageKind] = {}
        for line_no, (title, canon, kind) in read_rows(path, 3):
            try:
                kind_of[title] = PageKind(kind)
            except ValueError:
                raise MalformedRow(path, line_no, f"unknown page kind {kind!r}") from None
            mapping[title] = canon
        return cls(mapping, kind_of)


def resolve(cmap: CanonicalMap, t: str) -> str:
    return cmap.resolve(t)


def _merge_kind(known: Dict[str, PageKind], title: str, kind: PageKind) -> None:
    # a title listed twice keeps its most preferred kind
    old = known.get(title)
    if old is None or kind.preference < old.preference:
        known[title] = kind


def build_components(
    pages: Iterable[PageRecord],
    edges: Iterable[RedirectEdge],
    kb_titles: Optional[AbstractSet[str]] = None,
) -> CanonicalMap:
    kb_titles = kb_titles or frozenset()
    kinds: Dict[str, PageKind] = {}
    for page in pages:
        _merge_kind(kinds, page.url_title, page.kind)
    for title in kb_titles:
        if title not in kinds:
            kinds[title] = PageKind.CRAWL_ONLY

    uf = UnionFind(kinds)
    n_edges = 0
    for edge in edges:
        if edge.source == edge.target:
            continue
        for endpoint in (edge.source, edge.target):
            if endpoint not in kinds:
                kinds[endpoint] = PageKind.CRAWL_ONLY
                uf.add(endpoint)
        uf.union(edge.source, edge.target)
        n_edges += 1

    def preference(title: str) -> Tuple[int, int, str]:
        return (0 if title in kb_titles else 1, kinds[title].preference, title)

    mapping: Dict[str, str] = {}
    components = uf.components()
    for members in components.values():
        canonical = min(members, key=preference)
        for title in members:
            mapping[title] = canonical
    logger.info("canonical map: %d titles, %d edges, %d components", len(mapping), n_edges, len(components))
    return CanonicalMap(mapping, dict(kinds))


def read_pages(path) -> List[PageRecord]:
    pages = []
    for line_no, (title, kind) in read_rows(path, 2):
        k = _PAGE_FILE_KINDS.get(kind.strip().lower())
        if k is None:
            raise MalformedRow(path, line_no, f"unknown page kind {kind!r}")
        try:
            pages.append(PageRecord(canonicalize_title(title), k))
        except EmptyTitle:
            raise MalformedRow(path, line_no, "empty page title") from None
    return pages


def read_redirects(path) -> List[RedirectEdge]:
    edges = []
    for line_no, (source, target) in read_rows(path, 2):
        try:
            edges.append(RedirectEdge(canonicalize_title(source), canonicalize_title(target)))
        except EmptyTitle:
            raise MalformedRow(path, line_no, "empty redirect endpoint") from None
    return edges
