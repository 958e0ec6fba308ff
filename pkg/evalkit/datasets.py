"""Loaders for the evaluation inputs: KB table, query XML, gold and answer TSVs."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from evalkit.metrics import NIL, GoldRecord, KbRecord, KnowledgeBase
from ned.errors import MalformedRow, SchemaMismatch
from utils.tsv_io import read_rows, write_rows

ENTITY_TYPES = ("PER", "ORG", "GPE", "UKN")
GENRES = ("news", "web")
NO_TITLE = "-"
ERROR_PREFIX = "ERROR:"


@dataclass(frozen=True)
class Query:
    id: str
    name: str
    docid: str


@dataclass(frozen=True)
class Answer:
    query_id: str
    kb_id: str  # KB id, NIL, or ERROR:<code>
    wiki_title: Optional[str] = None

    @property
    def is_error(self) -> bool:
        return self.kb_id.startswith(ERROR_PREFIX)


def load_kb(path) -> KnowledgeBase:
    records: List[KbRecord] = []
    ids, titles = set(), set()
    for line_no, (kb_id, title, etype) in read_rows(path, 3):
        if etype not in ENTITY_TYPES:
            raise MalformedRow(path, line_no, f"entity type must be one of {', '.join(ENTITY_TYPES)}")
        if kb_id in ids:
            raise MalformedRow(path, line_no, f"duplicate kb_id {kb_id}")
        if title in titles:
            raise MalformedRow(path, line_no, f"duplicate wiki_title {title}")
        ids.add(kb_id)
        titles.add(title)
        records.append(KbRecord(kb_id, title, etype))
    return KnowledgeBase(records)


def load_queries(path) -> List[Query]:
    try:
        root = ET.parse(str(path)).getroot()
    except ET.ParseError as e:
        raise MalformedRow(path, e.position[0], f"bad query XML: {e}") from None
    queries = []
    seen = set()
    for node in root.iter("query"):
        qid = (node.get("id") or "").strip()
        name = (node.findtext("name") or "").strip()
        docid = (node.findtext("docid") or "").strip()
        if not (qid and name and docid):
            raise SchemaMismatch(f"{path}: query {qid or '?'} lacks id, name or docid")
        if qid in seen:
            raise SchemaMismatch(f"{path}: duplicate query id {qid}")
        seen.add(qid)
        queries.append(Query(qid, name, docid))
    return queries


def load_gold(path) -> List[GoldRecord]:
    gold = []
    seen = set()
    for line_no, fields in read_rows(path, min_fields=2):
        if len(fields) > 4:
            raise MalformedRow(path, line_no, f"expected at most 4 fields, saw {len(fields)}")
        qid, kb_id = fields[0], fields[1]
        title = fields[2] if len(fields) > 2 and fields[2] != NO_TITLE else None
        genre = fields[3] if len(fields) > 3 else "news"
        if genre not in GENRES:
            raise MalformedRow(path, line_no, f"genre must be news or web, saw {genre!r}")
        if qid in seen:
            raise MalformedRow(path, line_no, f"duplicate query id {qid}")
        seen.add(qid)
        gold.append(GoldRecord(qid, kb_id, title, genre))
    return gold


def load_answers(path) -> List[Answer]:
    answers = []
    for _, (qid, kb_id, title) in read_rows(path, 3):
        answers.append(Answer(qid, kb_id, None if title == NO_TITLE else title))
    return answers


def write_answers(path, answers: Iterable[Answer]) -> Path:
    rows = sorted(((a.query_id, a.kb_id, a.wiki_title or NO_TITLE) for a in answers), key=lambda r: r[0])
    return write_rows(path, rows)


def guesses_for(gold: List[GoldRecord], answers: Iterable[Answer]) -> Dict[str, str]:
    """Answer map keyed by query id; an id unknown to the gold file is a schema error."""
    known = {g.query_id for g in gold}
    guesses: Dict[str, str] = {}
    for a in answers:
        if a.query_id not in known:
            raise SchemaMismatch(f"answer for unknown query {a.query_id}")
        guesses[a.query_id] = a.kb_id
    return guesses


def query_names(queries: Iterable[Query]) -> Dict[str, str]:
    return {q.id: q.name for q in queries}
