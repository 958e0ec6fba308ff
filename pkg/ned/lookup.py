"""Candidate generation over a built Dictionary.

EXCT matches the raw string; LNRM matches other keys with the same
lower-cased normalized form; FUZZ matches keys whose normalized form is at
the smallest positive byte-level edit distance. Cascades try them in that
order, and HEUR filters the FUZZ cascade.
"""
from __future__ import annotations

import logging
import unicodedata
from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import Levenshtein

from ned.canonical import PageKind
from ned.dictbuild import ZERO_EVIDENCE, Dictionary, LinkEvidence, Source, rank_key, score
from ned.heuristics import acronym_pair, is_date_page, is_disambiguation, is_list_page, title_head

logger = logging.getLogger(__name__)


class Origin(Enum):
    EXCT = "EXCT"
    LNRM = "LNRM"
    FUZZ = "FUZZ"


@dataclass(frozen=True)
class NormKey:
    text: str

    @property
    def empty(self) -> bool:
        return not self.text

    def __bool__(self) -> bool:
        return bool(self.text)


@dataclass(frozen=True)
class Candidate:
    entity: str
    evidence: LinkEvidence
    origin: Origin
    sources: FrozenSet[Source] = frozenset()
    kind: Optional[PageKind] = None
    entity_links: int = 0

    @property
    def score(self) -> Fraction:
        return score(self.evidence)


def _rank(c: Candidate):
    return rank_key(c.entity, c.evidence)


@dataclass(frozen=True)
class CandidateList:
    query: str
    candidates: Tuple[Candidate, ...] = ()
    dictionary_id: str = "EXCT"

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __bool__(self) -> bool:
        return bool(self.candidates)

    def entities(self) -> List[str]:
        return [c.entity for c in self.candidates]

    def restricted_to(self, entities: Iterable[str]) -> "CandidateList":
        keep = set(entities)
        return replace(self, candidates=tuple(c for c in self.candidates if c.entity in keep))


def make_list(query: str, candidates: Iterable[Candidate], dictionary_id: str) -> CandidateList:
    return CandidateList(query, tuple(sorted(candidates, key=_rank)), dictionary_id)


# --- normalization and distance -------------------------------------------

def _strip_marks(s: str) -> str:
    return "".join(c for c in unicodedata.normalize("NFKD", s) if not unicodedata.combining(c))


def lnrm(s: str) -> NormKey:
    """Decompose, drop diacritics, lowercase, drop ASCII non-alphanumerics."""
    t = _strip_marks(_strip_marks(s).lower())
    return NormKey("".join(c for c in t if ord(c) >= 128 or c.isalnum()))


def _byte_view(s) -> str:
    # one code point per UTF-8 byte keeps the distance byte-level
    if isinstance(s, str):
        s = s.encode("utf-8")
    return s.decode("latin-1")


def levenshtein(a, b) -> int:
    """Unit-cost edit distance over the UTF-8 bytes of ``a`` and ``b``."""
    return Levenshtein.distance(_byte_view(a), _byte_view(b))


# --- per-dictionary normalized index ---------------------------------------

class NormIndex:
    """lnrm key -> raw keys, plus normalized keys banded by UTF-8 length."""

    def __init__(self, d: Dictionary):
        by_norm: Dict[str, List[str]] = defaultdict(list)
        for k in d.keys():
            nk = lnrm(k)
            if nk:
                by_norm[nk.text].append(k)
        self.by_norm = dict(by_norm)
        bands: Dict[int, List[Tuple[str, str]]] = defaultdict(list)
        for norm in sorted(self.by_norm):
            view = _byte_view(norm)
            bands[len(view)].append((norm, view))
        self.bands = dict(bands)

    def nearest(self, norm: str, max_distance: Optional[int] = None) -> Tuple[int, List[str]]:
        """Normalized keys at the minimal positive distance from ``norm``."""
        q = _byte_view(norm)
        best = max_distance if max_distance is not None else None
        found: List[str] = []
        # scan lengths outward from |q|; a length gap of g costs at least g edits
        for gap in range(0, max(self.bands, default=0) + len(q) + 1):
            if best is not None and gap > best:
                break
            lengths = {len(q) - gap, len(q) + gap}
            for length in sorted(lengths):
                for key, view in self.bands.get(length, ()):
                    dist = Levenshtein.distance(q, view)
                    if dist == 0:
                        continue
                    if best is None or dist < best:
                        best, found = dist, [key]
                    elif dist == best:
                        found.append(key)
        return (best or 0), sorted(found)


@lru_cache(maxsize=16)
def norm_index(d: Dictionary) -> NormIndex:
    return NormIndex(d)


# --- dictionary views ------------------------------------------------------

def _candidate(d: Dictionary, entity: str, evidence: LinkEvidence, origin: Origin,
               sources: FrozenSet[Source]) -> Candidate:
    return Candidate(entity, evidence, origin, sources, d.kind(entity), d.entity_links.get(entity, 0))


def lookup_exct(d: Dictionary, s: str) -> CandidateList:
    cands = [_candidate(d, e.entity, e.evidence, Origin.EXCT, e.sources) for e in d.get(s)]
    return make_list(s, cands, Origin.EXCT.value)


def aggregate(d: Dictionary, keys: Sequence[str], origin: Origin, query: str) -> CandidateList:
    """Merge several keys' lists: score(e) = sum of hits(k, e) / sum of totals(k).

    Each key's string totals enter the shared denominator once.
    """
    hits: Dict[str, LinkEvidence] = {}
    sources: Dict[str, set] = defaultdict(set)
    denominator = ZERO_EVIDENCE
    for k in keys:
        ranked = d.get(k)
        if not ranked:
            continue
        ev0 = ranked[0].evidence
        denominator = denominator + LinkEvidence(0, ev0.wiki_total, 0, ev0.web_total)
        for e in ranked:
            hits[e.entity] = hits.get(e.entity, ZERO_EVIDENCE) + LinkEvidence(e.evidence.wiki_hits, 0, e.evidence.web_hits, 0)
            sources[e.entity] |= e.sources
    cands = [
        _candidate(d, entity, h + denominator, origin, frozenset(sources[entity]))
        for entity, h in hits.items()
    ]
    return make_list(query, cands, origin.value)


def lookup_lnrm(d: Dictionary, s: str) -> CandidateList:
    key = lnrm(s)
    if not key:
        return CandidateList(s, (), Origin.LNRM.value)
    keys = [k for k in norm_index(d).by_norm.get(key.text, ()) if k != s]
    return aggregate(d, keys, Origin.LNRM, s)


def lookup_fuzz(d: Dictionary, s: str, max_distance: Optional[int] = None) -> CandidateList:
    key = lnrm(s)
    if not key:
        return CandidateList(s, (), Origin.FUZZ.value)
    index = norm_index(d)
    _, norms = index.nearest(key.text, max_distance)
    keys = [k for norm in norms for k in index.by_norm[norm]]
    return aggregate(d, keys, Origin.FUZZ, s)


# a stage takes (dictionary, string) and returns its view; dynamic sources plug in here
Stage = Callable[[Dictionary, str], CandidateList]


def cascade_stages(mode: str, max_distance: Optional[int] = None) -> List[Stage]:
    stages: List[Stage] = [lookup_exct, lookup_lnrm]
    if mode == "FUZZ":
        stages.append(lambda d, s: lookup_fuzz(d, s, max_distance))
    elif mode != "LNRM":
        raise ValueError(f"unknown cascade {mode!r}")
    return stages


def run_cascade(d: Dictionary, s: str, stages: Sequence[Stage], dictionary_id: str) -> CandidateList:
    for stage in stages:
        cl = stage(d, s)
        if cl:
            return replace(cl, dictionary_id=dictionary_id)
    return CandidateList(s, (), dictionary_id)


def cascade(d: Dictionary, s: str, mode: str, max_distance: Optional[int] = None) -> CandidateList:
    """EXCT if it has an entry, else LNRM, else (FUZZ mode) FUZZ."""
    return run_cascade(d, s, cascade_stages(mode, max_distance), mode)


# --- HEUR ------------------------------------------------------------------

@dataclass(frozen=True)
class HeurThresholds:
    max_links: int = 10
    max_string_links: int = 1
    min_score: float = 0.001
    similar_ratio: float = 0.1
    similar_max_length: int = 6


def substring_of_title(s: str, title: str) -> bool:
    key = lnrm(s).text
    return bool(key) and key in lnrm(title_head(title)).text


def very_similar(s: str, title: str, th: HeurThresholds = HeurThresholds()) -> bool:
    a = lnrm(s).text.encode("utf-8")
    b = lnrm(title_head(title)).text.encode("utf-8")
    if a == b:
        return True
    if not a or not b:
        return False
    dist = levenshtein(a, b)
    length = max(len(a), len(b))
    if length <= th.similar_max_length and dist == 1:
        return True
    return dist / length <= th.similar_ratio


def may_disambiguate(s: str, title: str) -> bool:
    return acronym_pair(s, title, ordered=False) or substring_of_title(s, title)


def is_title_of(s: str, title: str) -> bool:
    key = lnrm(s).text
    return bool(key) and key == lnrm(title_head(title)).text


def low_support(c: Candidate, th: HeurThresholds) -> bool:
    return (
        c.entity_links <= th.max_links
        or c.evidence.hits <= th.max_string_links
        or c.score <= Fraction(th.min_score).limit_denominator(10 ** 9)
    )


def heur_verdict(c: Candidate, s: str, th: HeurThresholds = HeurThresholds()) -> Optional[int]:
    """Number of the first rule that discards ``c``; None keeps it."""
    if is_disambiguation(c.entity, c.kind):
        return 1
    if is_date_page(c.entity):
        return 2
    if is_list_page(c.entity):
        return 3
    if c.origin is Origin.FUZZ and not (
        acronym_pair(s, c.entity) or substring_of_title(s, c.entity) or very_similar(s, c.entity, th)
    ):
        return 4
    if low_support(c, th) and not (may_disambiguate(s, c.entity) or is_title_of(s, c.entity)):
        return 5
    return None


def heur_filter(cl: CandidateList, s: str, th: HeurThresholds = HeurThresholds()) -> CandidateList:
    kept = tuple(c for c in cl.candidates if heur_verdict(c, s, th) is None)
    return replace(cl, candidates=kept, dictionary_id="HEUR")


def generate_candidates(
    d: Dictionary,
    s: str,
    mode: str,
    th: HeurThresholds = HeurThresholds(),
    max_distance: Optional[int] = None,
) -> CandidateList:
    """Candidate list under a named dictionary: EXCT, LNRM, FUZZ or HEUR."""
    if mode == "EXCT":
        return lookup_exct(d, s)
    if mode == "HEUR":
        return heur_filter(cascade(d, s, "FUZZ", max_distance), s, th)
    return cascade(d, s, mode, max_distance)


def top1(cl: CandidateList) -> Optional[str]:
    return cl.candidates[0].entity if cl.candidates else None
