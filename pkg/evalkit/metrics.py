"""Entity-linking scores: micro-accuracy, P/R at k, oracle coverage,
ambiguity and synonymy statistics.

Answers and candidate lists are expressed in KB ids; ``NIL`` marks an
entity absent from the KB. Every function is a pure aggregation, so the
order in which queries arrive never changes a number.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

NIL = "NIL"
SUBSETS = ("ALL", "KB_ONLY", "NIL_ONLY")


@dataclass(frozen=True)
class KbRecord:
    kb_id: str
    wiki_title: str
    entity_type: str = "UKN"


class KnowledgeBase:
    def __init__(self, records: Iterable[KbRecord] = ()):
        self.records: List[KbRecord] = list(records)
        self.by_title: Dict[str, KbRecord] = {r.wiki_title: r for r in self.records}
        self.by_id: Dict[str, KbRecord] = {r.kb_id: r for r in self.records}

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, title: str) -> bool:
        return title in self.by_title

    def titles(self) -> List[str]:
        return sorted(self.by_title)


def map_to_kb(kb: KnowledgeBase, entity: Optional[str]) -> str:
    if entity is None:
        return NIL
    record = kb.by_title.get(entity)
    return record.kb_id if record is not None else NIL


def map_ranked(kb: KnowledgeBase, entities: Sequence[str]) -> List[str]:
    """KB ids of a ranked entity list, first occurrence kept."""
    seen, out = set(), []
    for e in entities:
        kb_id = map_to_kb(kb, e)
        if kb_id not in seen:
            seen.add(kb_id)
            out.append(kb_id)
    return out


@dataclass(frozen=True)
class GoldRecord:
    query_id: str
    kb_id: str
    wiki_title: Optional[str] = None
    genre: str = "news"

    @property
    def is_nil(self) -> bool:
        return self.kb_id == NIL


@dataclass(frozen=True)
class GenreScore:
    genre: str
    n_queries: int
    n_correct: int

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_queries if self.n_queries else 0.0


@dataclass(frozen=True)
class EvalReport:
    subset: str
    n_queries: int
    n_correct: int
    by_genre: Tuple[GenreScore, ...] = ()
    n_gold_nil: int = 0
    n_guessed_nil: int = 0
    n_nil_correct: int = 0

    @property
    def micro_accuracy(self) -> float:
        return self.n_correct / self.n_queries if self.n_queries else 0.0


def _frame(gold: Sequence[GoldRecord], guesses: Mapping[str, str]) -> pd.DataFrame:
    df = pd.DataFrame(
        [(g.query_id, g.kb_id, g.genre) for g in gold],
        columns=["query_id", "gold", "genre"],
    )
    df["guess"] = [guesses.get(q, "") for q in df["query_id"]]
    df["correct"] = df["gold"] == df["guess"]
    return df


def _subset(df: pd.DataFrame, subset: str) -> pd.DataFrame:
    if subset == "KB_ONLY":
        return df[df["gold"] != NIL]
    if subset == "NIL_ONLY":
        return df[df["gold"] == NIL]
    if subset == "ALL":
        return df
    raise ValueError(f"unknown subset {subset!r}")


def micro_accuracy(gold: Sequence[GoldRecord], guesses: Mapping[str, str], subset: str = "ALL") -> EvalReport:
    """C/N over the chosen subset; a query without a guess counts as wrong."""
    df = _subset(_frame(gold, guesses), subset)
    per_genre = df.groupby("genre", sort=True)["correct"].agg(["size", "sum"])
    by_genre = tuple(GenreScore(str(g), int(row["size"]), int(row["sum"])) for g, row in per_genre.iterrows())
    return EvalReport(
        subset=subset,
        n_queries=len(df),
        n_correct=int(df["correct"].sum()),
        by_genre=by_genre,
        n_gold_nil=int((df["gold"] == NIL).sum()),
        n_guessed_nil=int((df["guess"] == NIL).sum()),
        n_nil_correct=int(((df["gold"] == NIL) & df["correct"]).sum()),
    )


@dataclass(frozen=True)
class PrPoint:
    k: Optional[int]  # None: no cutoff
    precision: float
    recall: float


def pr_curve(gold: Sequence[GoldRecord], ranked: Mapping[str, Sequence[str]],
             ks: Sequence[Optional[int]]) -> List[PrPoint]:
    """Precision and recall of the top-k KB ids over queries whose gold is in the KB.

    Lists shorter than k are not padded: precision divides by what was returned.
    """
    in_kb = [g for g in gold if not g.is_nil]
    points = []
    for k in ks:
        returned = correct = 0
        for g in in_kb:
            top = list(ranked.get(g.query_id, ()))[:k]
            returned += len(top)
            correct += int(g.kb_id in top)
        precision = correct / returned if returned else 0.0
        recall = correct / len(in_kb) if in_kb else 0.0
        points.append(PrPoint(k, precision, recall))
    return points


def _options(ranked: Mapping[str, Sequence[str]], query_id: str) -> List[str]:
    # an empty candidate list answers NIL
    return list(ranked.get(query_id, ())) or [NIL]


def top1_guesses(ranked: Mapping[str, Sequence[str]]) -> Dict[str, str]:
    return {q: _options(ranked, q)[0] for q in ranked}


def oracle_accuracy(gold: Sequence[GoldRecord], ranked: Mapping[str, Sequence[str]],
                    subset: str = "ALL") -> float:
    """Share of queries whose gold answer appears anywhere in the candidate list."""
    chosen = [g for g in gold if subset == "ALL" or (g.is_nil == (subset == "NIL_ONLY"))]
    if not chosen:
        return 0.0
    return sum(g.kb_id in _options(ranked, g.query_id) for g in chosen) / len(chosen)


# --- ambiguity and synonymy ------------------------------------------------

@dataclass(frozen=True)
class AmbiguityStats:
    n_strings: int
    no_entity: int
    single: int
    multiple: int
    mean_multiple: float  # mean entity count over polysemous strings, 0 if none

    def as_row(self) -> Dict[str, object]:
        return {
            "strings": self.n_strings, "none": self.no_entity, "single": self.single,
            "multiple": self.multiple, "mean_multiple": self.mean_multiple,
        }


def _bucket_counts(pairs: Iterable[Tuple[str, Optional[str]]]) -> pd.Series:
    df = pd.DataFrame(list(pairs), columns=["key", "value"])
    if df.empty:
        return pd.Series(dtype="int64")
    keys = sorted(df["key"].unique())
    counts = df.dropna(subset=["value"]).groupby("key")["value"].nunique()
    return counts.reindex(keys, fill_value=0).astype("int64")


def ambiguity_stats(pairs: Iterable[Tuple[str, Optional[str]]]) -> AmbiguityStats:
    """Distinct entities per string.

    ``pairs`` are (string, entity) with entity None for a string that names
    nothing in this view: a NIL gold answer or an empty candidate list.
    """
    counts = _bucket_counts(pairs)
    multi = counts[counts > 1]
    return AmbiguityStats(
        n_strings=int(len(counts)),
        no_entity=int((counts == 0).sum()),
        single=int((counts == 1).sum()),
        multiple=int(len(multi)),
        mean_multiple=float(multi.mean()) if len(multi) else 0.0,
    )


@dataclass(frozen=True)
class SynonymyStats:
    n_entities: int
    single: int
    multiple: int
    mean_multiple: float

    def as_row(self) -> Dict[str, object]:
        return {
            "entities": self.n_entities, "single": self.single,
            "multiple": self.multiple, "mean_multiple": self.mean_multiple,
        }


def synonymy_stats(pairs: Iterable[Tuple[str, str]]) -> SynonymyStats:
    """Distinct strings per entity, from (entity, string) pairs."""
    counts = _bucket_counts(pairs)
    counts = counts[counts > 0]
    multi = counts[counts > 1]
    return SynonymyStats(
        n_entities=int(len(counts)),
        single=int((counts == 1).sum()),
        multiple=int(len(multi)),
        mean_multiple=float(multi.mean()) if len(multi) else 0.0,
    )


def gold_ambiguity_pairs(gold: Sequence[GoldRecord], names: Mapping[str, str]) -> List[Tuple[str, Optional[str]]]:
    return [(names[g.query_id], None if g.is_nil else g.kb_id) for g in gold if g.query_id in names]


def gold_synonymy_pairs(gold: Sequence[GoldRecord], names: Mapping[str, str]) -> List[Tuple[str, str]]:
    return [(g.kb_id, names[g.query_id]) for g in gold if not g.is_nil and g.query_id in names]


def dictionary_ambiguity_pairs(candidates: Mapping[str, Sequence[str]]) -> List[Tuple[str, Optional[str]]]:
    """(string, entity) pairs from per-string candidate entity lists."""
    pairs: List[Tuple[str, Optional[str]]] = []
    for s in sorted(candidates):
        entities = candidates[s]
        if not entities:
            pairs.append((s, None))
        pairs.extend((s, e) for e in entities)
    return pairs


def dictionary_synonymy_pairs(reverse_index: Mapping[str, Sequence[str]],
                              entities: Optional[Iterable[str]] = None) -> List[Tuple[str, str]]:
    chosen = sorted(entities) if entities is not None else sorted(reverse_index)
    return [(e, s) for e in chosen for s in reverse_index.get(e, ())]
