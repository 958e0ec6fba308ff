"""Title/string predicates behind the HEUR filtering rules."""
from __future__ import annotations

import re
from collections import Counter
from typing import List, Optional

from ned.canonical import PageKind
from ned.dictbuild import strip_trailing_parenthetical, title_string

ACRONYM_STOPWORDS = frozenset({"of", "the", "and", "for", "in", "at", "on", "de"})

_MONTHS = ("January|February|March|April|May|June|July|August|"
           "September|October|November|December")
_DATE_PATTERNS = (
    re.compile(r"^\d{1,4}$"),
    re.compile(rf"^(?:{_MONTHS})_\d{{1,2}}$"),
    re.compile(r"^\d{1,3}0s$"),
    re.compile(r"^\d+_(?:BC|AD)$"),
)
_WORD_SPLIT = re.compile(r"[_\s\-]+")


def is_disambiguation(title: str, kind: Optional[PageKind] = None) -> bool:
    return kind is PageKind.DISAMBIG or title.endswith("_(disambiguation)")


def is_date_page(title: str) -> bool:
    return any(p.match(title) for p in _DATE_PATTERNS)


def is_list_page(title: str) -> bool:
    return title.startswith("List_of_") or title.startswith("Lists_of_")


def title_head(title: str) -> str:
    """Display name without a trailing parenthetical or ', qualifier'.

    'Tacoma,_Washington' -> 'Tacoma'; 'Hank_Williams_(basketball)' -> 'Hank Williams'.
    """
    head = strip_trailing_parenthetical(title_string(title))
    if ", " in head:
        head = head.split(", ", 1)[0]
    return head.strip()


def _initials(text: str) -> List[str]:
    words = [w for w in _WORD_SPLIT.split(text) if w]
    return [w[0].upper() for w in words if w.lower() not in ACRONYM_STOPWORDS and w[0].isalnum()]


def _acronym_letters(text: str) -> Optional[List[str]]:
    if _WORD_SPLIT.search(text.strip()):
        return None
    letters = [c for c in text if c.isupper()]
    return letters if len(letters) >= 2 else None


def _is_acronym_of(short: str, long: str, ordered: bool) -> bool:
    letters = _acronym_letters(short)
    if letters is None:
        return False
    initials = _initials(long)
    if len(initials) < 2:
        return False
    if ordered:
        return letters == initials
    return Counter(letters) == Counter(initials)


def acronym_pair(string: str, title: str, ordered: bool = True) -> bool:
    """Either side may be the acronym of the other."""
    head = title_head(title)
    return _is_acronym_of(string, head, ordered) or _is_acronym_of(head, string, ordered)
