"""One classifier per mention string ("word expert").

Training spans are link contexts whose target is one of the string's
candidate entities; LEX additionally requires the string inside the
anchor text, SENSE does not. Strings whose spans cover fewer than two
entities get no model and fall back to the dictionary.
"""
from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ned import maxent
from ned.corpus import LinkedCorpus, TrainingSpan, cut_span
from ned.dictbuild import Dictionary
from ned.errors import DegenerateTraining, MalformedRow, NoAnswer, NoCandidates
from ned.features import FeatureVector, featurize
from ned.lookup import CandidateList, HeurThresholds, generate_candidates, lnrm, top1
from utils.tsv_io import format_row, read_rows, write_rows

logger = logging.getLogger(__name__)


# --- span gathering --------------------------------------------------------

def lex_match(s: str, anchor_text: str) -> bool:
    key = lnrm(s).text
    return bool(key) and key in lnrm(anchor_text).text


def extract_spans(
    corpus: LinkedCorpus,
    s: str,
    filter_dict: Dictionary,
    span_mode: str = "T100",
    match_mode: str = "LEX",
    cascade: str = "LNRM",
    thresholds: HeurThresholds = HeurThresholds(),
) -> List[TrainingSpan]:
    candidates = generate_candidates(filter_dict, s, cascade, thresholds)
    if not candidates:
        raise NoCandidates(s)
    spans: List[TrainingSpan] = []
    for entity in sorted(candidates.entities()):
        for occ in corpus.occurrences_of(entity):
            if match_mode == "LEX" and not lex_match(s, occ.anchor_text):
                continue
            doc = corpus.documents[occ.doc_id]
            spans.append(cut_span(doc, occ.start, occ.end, span_mode, entity, occ.anchor_text))
    spans.sort(key=lambda sp: (sp.target, sp.source_doc))
    return spans


# --- model -----------------------------------------------------------------

@dataclass
class WordExpertModel:
    target_string: str
    classes: Tuple[str, ...]
    feature_names: Tuple[str, ...]
    weights: np.ndarray
    l2_strength: float
    train_spans_per_class: Tuple[int, ...]
    _table: Optional[maxent.FeatureTable] = field(default=None, repr=False, compare=False)

    @property
    def table(self) -> maxent.FeatureTable:
        if self._table is None:
            self._table = maxent.FeatureTable(self.feature_names)
        return self._table

    def probabilities(self, feats: FeatureVector) -> np.ndarray:
        X = self.table.matrix([feats])
        return maxent.predict_proba(self.weights, X)[0]

    def classify(self, feats: FeatureVector) -> Tuple[str, float]:
        p = self.probabilities(feats)
        best = int(np.argmax(p))  # first maximum: ties go to class order
        return self.classes[best], float(p[best])

    def ranked(self, feats: FeatureVector) -> List[Tuple[str, float]]:
        p = self.probabilities(feats)
        order = sorted(range(len(self.classes)), key=lambda i: (-p[i], i))
        return [(self.classes[i], float(p[i])) for i in order]


def train(
    spans: Sequence[TrainingSpan],
    classes: Sequence[str],
    target_string: str = "",
    l2_strength: float = 1.0,
    max_iter: int = 200,
    min_spans_per_class: int = 1,
) -> WordExpertModel:
    """Fit one multinomial model; classes without enough spans are dropped."""
    counts = {c: 0 for c in classes}
    for sp in spans:
        if sp.target in counts:
            counts[sp.target] += 1
    kept = [c for c in classes if counts[c] >= min_spans_per_class]
    if len(kept) < 2:
        raise DegenerateTraining(f"{target_string!r}: {len(kept)} populated class(es)")
    class_index = {c: i for i, c in enumerate(kept)}
    used = [sp for sp in spans if sp.target in class_index]
    vectors = [featurize(sp) for sp in used]
    table = maxent.FeatureTable.from_vectors(vectors)
    X = table.matrix(vectors)
    y = np.array([class_index[sp.target] for sp in used], dtype=np.int64)
    result = maxent.fit(X, y, len(kept), l2_strength, max_iter)
    logger.debug("trained %r: %d classes, %d spans, %d features, %d iterations",
                 target_string, len(kept), len(used), len(table), result.iterations)
    return WordExpertModel(
        target_string, tuple(kept), table.names, result.weights, l2_strength,
        tuple(counts[c] for c in kept), table,
    )


def predict(model: Optional[WordExpertModel], span: Optional[TrainingSpan],
            backoff: CandidateList) -> Tuple[str, float]:
    if model is not None and span is not None:
        return model.classify(featurize(span))
    entity = top1(backoff)
    if entity is None:
        raise NoAnswer(f"no model and no dictionary candidates for {backoff.query!r}")
    return entity, float(backoff.candidates[0].score)


# --- model files -----------------------------------------------------------

def _g9(x: float) -> str:
    return format(float(x), ".9g")


def model_rows(model: WordExpertModel) -> List[Tuple]:
    rows = []
    for ci in sorted(range(len(model.classes)), key=lambda i: model.classes[i]):
        for fi in sorted(range(len(model.feature_names)), key=lambda j: model.feature_names[j]):
            w = model.weights[ci, fi]
            if w != 0.0:
                rows.append((model.classes[ci], model.feature_names[fi], _g9(w)))
    return rows


def save_model(model: WordExpertModel, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = [
        "# target\t" + model.target_string,
        "# classes\t" + "\t".join(model.classes),
        "# l2\t" + _g9(model.l2_strength),
        "# features\t" + str(len(model.feature_names)),
        "# spans\t" + "\t".join(str(n) for n in model.train_spans_per_class),
    ]
    body = [format_row(r) for r in model_rows(model)]
    path.write_text("\n".join(header + body) + "\n", encoding="utf-8")
    return path


def load_model(path) -> WordExpertModel:
    meta: Dict[str, List[str]] = {}
    rows: List[Tuple[str, str, float]] = []
    for line_no, f in read_rows(path, min_fields=2):
        if f[0].startswith("# "):
            meta[f[0][2:]] = f[1:]
            continue
        if len(f) != 3:
            raise MalformedRow(path, line_no, "expected class, feature, weight")
        try:
            rows.append((f[0], f[1], float(f[2])))
        except ValueError:
            raise MalformedRow(path, line_no, f"bad weight {f[2]!r}") from None
    try:
        classes = tuple(meta["classes"])
        target = meta["target"][0]
        l2 = float(meta["l2"][0])
        spans = tuple(int(n) for n in meta["spans"])
    except (KeyError, IndexError, ValueError):
        raise MalformedRow(path, 1, "incomplete model header") from None
    table = maxent.FeatureTable([feat for _, feat, _ in rows])
    class_index = {c: i for i, c in enumerate(classes)}
    W = np.zeros((len(classes), len(table)))
    for c, feat, w in rows:
        if c not in class_index:
            raise MalformedRow(path, 0, f"weight row for unknown class {c!r}")
        W[class_index[c], table.index[feat]] = w
    return WordExpertModel(target, classes, table.names, W, l2, spans, table)


def model_filename(s: str, suffix: str = ".model") -> str:
    slug = re.sub(r"[^A-Za-z0-9]+", "_", s).strip("_")[:40] or "string"
    return f"{slug}-{hashlib.sha1(s.encode('utf-8')).hexdigest()[:12]}{suffix}"


class ModelStore:
    """Directory of model files with an ``index.tsv`` of string -> file."""

    def __init__(self, root):
        self.root = Path(root)
        self.index: Dict[str, str] = {}
        self._cache: Dict[str, WordExpertModel] = {}
        index_path = self.root / "index.tsv"
        if index_path.exists():
            for _, (s, name) in read_rows(index_path, 2):
                self.index[s] = name

    def __contains__(self, s: str) -> bool:
        return s in self.index

    def get(self, s: str) -> Optional[WordExpertModel]:
        name = self.index.get(s)
        if name is None:
            return None
        if s not in self._cache:
            self._cache[s] = load_model(self.root / name)
        return self._cache[s]

    @classmethod
    def write(cls, root, models: Dict[str, WordExpertModel]) -> "ModelStore":
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        index = []
        for s in sorted(models):
            name = model_filename(s)
            save_model(models[s], root / name)
            index.append((s, name))
        write_rows(root / "index.tsv", index)
        return cls(root)


# --- batch training --------------------------------------------------------

@dataclass(frozen=True)
class TrainingPlan:
    span_mode: str = "T100"
    match_mode: str = "LEX"
    filter_cascade: str = "HEUR"
    thresholds: HeurThresholds = HeurThresholds()
    l2_strength: float = 1.0
    max_iter: int = 200
    min_spans_per_class: int = 1


_shared: Dict[str, object] = {}


def _init_worker(corpus: LinkedCorpus, filter_dict: Dictionary, plan: TrainingPlan) -> None:
    _shared["corpus"], _shared["dict"], _shared["plan"] = corpus, filter_dict, plan


def train_string(corpus: LinkedCorpus, filter_dict: Dictionary, s: str,
                 plan: TrainingPlan) -> Optional[WordExpertModel]:
    try:
        spans = extract_spans(corpus, s, filter_dict, plan.span_mode, plan.match_mode,
                              plan.filter_cascade, plan.thresholds)
    except NoCandidates:
        logger.info("no candidates for %r; skipped", s)
        return None
    classes = generate_candidates(filter_dict, s, plan.filter_cascade, plan.thresholds).entities()
    try:
        return train(spans, classes, s, plan.l2_strength, plan.max_iter, plan.min_spans_per_class)
    except DegenerateTraining as e:
        logger.warning("no model for %s; dictionary back-off applies", e)
        return None


def _train_job(s: str) -> Tuple[str, Optional[WordExpertModel]]:
    return s, train_string(_shared["corpus"], _shared["dict"], s, _shared["plan"])


def train_word_experts(corpus: LinkedCorpus, filter_dict: Dictionary, strings: Iterable[str],
                       plan: TrainingPlan = TrainingPlan(), workers: int = 1) -> Dict[str, WordExpertModel]:
    """Train every string independently; result order is by string, whatever ``workers`` is."""
    todo = sorted(set(strings))
    if workers <= 1:
        results = [(s, train_string(corpus, filter_dict, s, plan)) for s in todo]
    else:
        with Pool(workers, initializer=_init_worker, initargs=(corpus, filter_dict, plan)) as pool:
            results = pool.map(_train_job, todo)
    models = {s: m for s, m in sorted(results, key=lambda r: r[0]) if m is not None}
    logger.info("trained %d word experts for %d strings", len(models), len(todo))
    return models
