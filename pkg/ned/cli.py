"""Batch command surface: build, lookup, extract-spans, train, disambiguate,
evaluate, stats, pr-curve.

Configuration comes from defaults, then a key=value file (``--config`` or
``NED_CONFIG``), then ``--<key>`` flags. Exit codes: 0 ok, 1 usage,
2 input schema, 3 internal.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, replace
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from evalkit import metrics
from evalkit.datasets import (
    Answer, Query, guesses_for, load_answers, load_gold, load_kb, load_queries, query_names, write_answers,
)
from evalkit.evaluate import accuracy_reports, render_report, render_stats, report_rows, stats_rows, write_pr
from ned.canonical import CanonicalMap, PageKind, build_components, read_pages, read_redirects
from ned.corpus import LinkedCorpus, cut_span, plain_document, write_spans
from ned.dictbuild import Dictionary, harvest, read_links, render_score
from ned.errors import ConfigError, DocumentNotFound, InputError, NedError, NoAnswer, NoCandidates
from ned.expand import StandoffAnnotations, expand_mention, find_occurrences
from ned.features import featurize
from ned.lookup import CandidateList, HeurThresholds, generate_candidates
from ned.wordexpert import (
    ModelStore, TrainingPlan, WordExpertModel, extract_spans, model_filename, predict, train_word_experts,
)
from utils.config import CASCADES, KNOWN_KEYS, RunConfig, load_config, validate
from utils.tsv_io import write_rows

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# --- shared loading --------------------------------------------------------

def thresholds(config: RunConfig) -> HeurThresholds:
    return HeurThresholds(
        max_links=config.heur_max_links,
        max_string_links=config.heur_max_string_links,
        min_score=config.heur_min_score,
        similar_ratio=config.heur_similar_ratio,
        similar_max_length=config.heur_similar_max_length,
    )


def out_path(config: RunConfig, name: str) -> Path:
    path = Path(config.out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _kb_titles(config: RunConfig) -> frozenset:
    return frozenset(load_kb(config.kb).titles()) if config.kb else frozenset()


def load_canonical(config: RunConfig) -> CanonicalMap:
    if config.canonical:
        return CanonicalMap.load(config.canonical)
    if config.pages:
        pages = read_pages(config.pages)
        edges = read_redirects(config.redirects) if config.redirects else []
        return build_components(pages, edges, _kb_titles(config))
    raise ConfigError("need either canonical or pages")


def _kinds(cmap: CanonicalMap) -> Dict[str, PageKind]:
    return {c: cmap.kind_of.get(c, PageKind.CRAWL_ONLY) for c in cmap.canonicals()}


def load_dictionary(config: RunConfig, cmap: CanonicalMap) -> Dictionary:
    if config.dictionary:
        d = Dictionary.load(config.dictionary, _kinds(cmap))
    elif config.pages and config.links:
        d = harvest(read_pages(config.pages), cmap, read_links(config.links), _kb_titles(config))
    else:
        raise ConfigError("need either dictionary or pages + links")
    return d.partition(config.counts)


def candidates_for(config: RunConfig, d: Dictionary, s: str, mode: Optional[str] = None) -> CandidateList:
    return generate_candidates(d, s, mode or config.cascade, thresholds(config), config.fuzz_max_distance)


def training_plan(config: RunConfig) -> TrainingPlan:
    return TrainingPlan(
        span_mode=config.span_mode,
        match_mode=config.match_mode,
        filter_cascade=config.filter_cascade,
        thresholds=thresholds(config),
        l2_strength=config.l2_strength,
        max_iter=config.max_iter,
        min_spans_per_class=config.min_spans_per_class,
    )


def _done(*paths: Path) -> None:
    for p in paths:
        print(f"Written to: {p}")


# --- build -----------------------------------------------------------------

def cmd_build_canonical(config: RunConfig, args) -> List[Path]:
    validate(config, ("pages",))
    cmap = load_canonical(_from_raw(config))
    return [cmap.save(out_path(config, "canonical.tsv"))]


def _from_raw(config: RunConfig) -> RunConfig:
    # build commands always start from the raw page list
    return replace(config, canonical=None, dictionary=None)


def cmd_build(config: RunConfig, args=None) -> List[Path]:
    validate(config, ("pages", "links"))
    cmap = load_canonical(_from_raw(config))
    d = harvest(read_pages(config.pages), cmap, read_links(config.links), _kb_titles(config))
    return [cmap.save(out_path(config, "canonical.tsv")), d.save(out_path(config, "dictionary.tsv"))]


# --- lookup / spans / train ------------------------------------------------

def cmd_lookup(config: RunConfig, args) -> List[Path]:
    validate(config)
    cmap = load_canonical(config)
    d = load_dictionary(config, cmap)
    rows = []
    for s in args.strings:
        cl = candidates_for(config, d, s)
        # "# string" header line, then rank, entity, score, origin per candidate
        rows.append(("# string", s, cl.dictionary_id))
        for rank, c in enumerate(cl, start=1):
            rows.append((rank, c.entity, render_score(c.score), c.origin.value))
        if not cl:
            logger.info("no candidates for %r under %s", s, config.cascade)
    for row in rows:
        print("\t".join(str(f) for f in row))
    return [write_rows(out_path(config, "lookup.tsv"), rows)]


def _strings(config: RunConfig, args) -> List[str]:
    if getattr(args, "strings", None):
        return sorted(set(args.strings))
    if config.queries:
        return sorted({q.name for q in load_queries(config.queries)})
    raise ConfigError("give target strings or a queries file")


def cmd_extract_spans(config: RunConfig, args) -> List[Path]:
    validate(config, ("corpus",))
    cmap = load_canonical(config)
    d = load_dictionary(config, cmap)
    corpus = LinkedCorpus.from_jsonl(config.corpus, cmap)
    written = []
    for s in _strings(config, args):
        try:
            spans = extract_spans(corpus, s, d, config.span_mode, config.match_mode,
                                  config.filter_cascade, thresholds(config))
        except NoCandidates:
            logger.warning("no candidates for %r; no spans written", s)
            continue
        logger.info("%r: %d spans", s, len(spans))
        written.append(write_spans(out_path(config, "spans/" + model_filename(s, ".spans")), spans))
    return written


def cmd_train(config: RunConfig, args) -> List[Path]:
    validate(config, ("corpus",))
    cmap = load_canonical(config)
    d = load_dictionary(config, cmap)
    corpus = LinkedCorpus.from_jsonl(config.corpus, cmap)
    models = train_word_experts(corpus, d, _strings(config, args), training_plan(config), config.workers)
    root = Path(config.models_dir) if config.models_dir else out_path(config, "models")
    store = ModelStore.write(root, models)
    return [store.root / "index.tsv"]


# --- disambiguate ----------------------------------------------------------

@dataclass
class Disambiguator:
    config: RunConfig
    dictionary: Dictionary
    kb: metrics.KnowledgeBase
    models: Optional[ModelStore] = None

    def document(self, docid: str) -> str:
        if not self.config.docs_dir:
            raise DocumentNotFound(docid)
        path = Path(self.config.docs_dir) / f"{docid}.txt"
        if not path.is_file():
            raise DocumentNotFound(docid)
        return path.read_text(encoding="utf-8")

    def needs_document(self, name: str) -> bool:
        return self.config.expand or (self.models is not None and name in self.models)

    def candidates(self, query: Query, text: Optional[str]) -> CandidateList:
        if self.config.expand and text is not None:
            ann = StandoffAnnotations.for_document(self.config.docs_dir, query.docid)
            result = expand_mention(text, query.name, self.dictionary, ann, ann, self.config.cascade,
                                    thresholds(self.config), self.config.fuzz_max_distance)
            if result.expanded != query.name:
                logger.debug("%s: %r expanded to %r (%s)", query.id, query.name, result.expanded,
                             result.evidence.value)
            return result.final_candidates
        return candidates_for(self.config, self.dictionary, query.name)

    def choose(self, query: Query, text: Optional[str], backoff: CandidateList) -> Optional[str]:
        model = self.models.get(query.name) if self.models is not None else None
        span = None
        if model is not None and text is not None:
            occurrences = find_occurrences(text, query.name)
            if occurrences:
                doc = plain_document(query.docid, text)
                start, end = doc.token_range(*occurrences[0])
                if start >= 0:
                    span = cut_span(doc, start, end, self.config.span_mode, None, query.name)
        if model is not None and span is not None and self.config.expand:
            return _restricted_choice(model, span, backoff)
        try:
            entity, _ = predict(model, span, backoff)
        except NoAnswer:
            return None
        return entity

    def answer(self, query: Query) -> Answer:
        try:
            text = self.document(query.docid) if self.needs_document(query.name) else None
            backoff = self.candidates(query, text)
            entity = self.choose(query, text, backoff)
        except InputError as e:
            logger.warning("%s: %s", query.id, e)
            return Answer(query.id, f"ERROR:{type(e).__name__}", None)
        return Answer(query.id, metrics.map_to_kb(self.kb, entity), entity)


def _restricted_choice(model: WordExpertModel, span, backoff: CandidateList) -> Optional[str]:
    # after expansion the classifier may only pick among the surviving candidates
    allowed = set(backoff.entities())
    for entity, _ in model.ranked(featurize(span)):
        if entity in allowed:
            return entity
    return backoff.entities()[0] if backoff else None


_worker: Dict[str, Disambiguator] = {}


def _init_disambiguator(engine: Disambiguator) -> None:
    _worker["engine"] = engine


def _answer_job(query: Query) -> Answer:
    return _worker["engine"].answer(query)


def disambiguate(engine: Disambiguator, queries: Sequence[Query], workers: int = 1) -> List[Answer]:
    if workers <= 1:
        answers = [engine.answer(q) for q in queries]
    else:
        with Pool(workers, initializer=_init_disambiguator, initargs=(engine,)) as pool:
            answers = pool.map(_answer_job, list(queries))
    return sorted(answers, key=lambda a: a.query_id)


def cmd_disambiguate(config: RunConfig, args=None) -> List[Path]:
    required = ["queries", "kb"]
    if config.classifier:
        required += ["models_dir", "docs_dir"]
    elif config.expand:
        required.append("docs_dir")
    validate(config, required)
    cmap = load_canonical(config)
    engine = Disambiguator(
        config, load_dictionary(config, cmap), load_kb(config.kb),
        ModelStore(config.models_dir) if config.classifier else None,
    )
    queries = load_queries(config.queries)
    answers = disambiguate(engine, queries, config.workers)
    logger.info("answered %d queries (%d errors)", len(answers), sum(a.is_error for a in answers))
    return [write_answers(out_path(config, "answers.tsv"), answers)]


# --- evaluate / stats / pr-curve -------------------------------------------

def parse_ks(text: str) -> Tuple[Optional[int], ...]:
    ks = []
    for part in text.split(","):
        part = part.strip().lower()
        if part in ("inf", "all"):
            ks.append(None)
            continue
        try:
            k = int(part)
        except ValueError:
            raise ConfigError(f"bad cutoff {part!r}") from None
        if k < 1:
            raise ConfigError("cutoffs must be >= 1")
        ks.append(k)
    return tuple(ks)


def ranked_kb_lists(config: RunConfig, d: Dictionary, kb: metrics.KnowledgeBase,
                    queries: Sequence[Query], mode: Optional[str] = None) -> Dict[str, List[str]]:
    return {q.id: metrics.map_ranked(kb, candidates_for(config, d, q.name, mode).entities()) for q in queries}


def _pr_points(config: RunConfig, gold, ks) -> List[metrics.PrPoint]:
    validate(config, ("queries", "kb"))
    cmap = load_canonical(config)
    d = load_dictionary(config, cmap)
    ranked = ranked_kb_lists(config, d, load_kb(config.kb), load_queries(config.queries))
    return metrics.pr_curve(gold, ranked, ks)


def cmd_evaluate(config: RunConfig, args) -> List[Path]:
    answers_path = getattr(args, "answers_file", None) or config.answers
    validate(config, ("gold",))
    if not answers_path or not Path(answers_path).is_file():
        raise ConfigError(f"answers file not found: {answers_path}")
    gold = load_gold(config.gold)
    answers = load_answers(answers_path)
    reports = accuracy_reports(gold, guesses_for(gold, answers))
    md = out_path(config, "eval_report.md")
    md.write_text(render_report(reports, sum(a.is_error for a in answers)), encoding="utf-8")
    written = [md, write_rows(out_path(config, "eval_report.tsv"), report_rows(reports))]
    if getattr(args, "pr", False):
        written.append(write_pr(out_path(config, "pr_curve.tsv"), _pr_points(config, gold, parse_ks(args.ks))))
    return written


def cmd_pr_curve(config: RunConfig, args) -> List[Path]:
    validate(config, ("gold",))
    points = _pr_points(config, load_gold(config.gold), parse_ks(args.ks))
    return [write_pr(out_path(config, "pr_curve.tsv"), points)]


def cmd_stats(config: RunConfig, args) -> List[Path]:
    validate(config, ("gold", "queries", "kb"))
    gold = load_gold(config.gold)
    queries = load_queries(config.queries)
    names = query_names(queries)
    kb = load_kb(config.kb)
    cmap = load_canonical(config)
    d = load_dictionary(config, cmap)
    strings = sorted(set(names.values()))

    ambiguity = {"gold": metrics.ambiguity_stats(metrics.gold_ambiguity_pairs(gold, names))}
    synonymy = {"gold": metrics.synonymy_stats(metrics.gold_synonymy_pairs(gold, names))}
    oracle: Dict[str, Tuple[float, float]] = {}
    for mode in CASCADES:
        lists = {s: candidates_for(config, d, s, mode).entities() for s in strings}
        ambiguity[mode] = metrics.ambiguity_stats(metrics.dictionary_ambiguity_pairs(lists))
        ranked = {q.id: metrics.map_ranked(kb, lists[q.name]) for q in queries}
        realized = metrics.micro_accuracy(gold, metrics.top1_guesses(ranked)).micro_accuracy
        oracle[mode] = (realized, metrics.oracle_accuracy(gold, ranked))

    if config.corpus:
        corpus = LinkedCorpus.from_jsonl(config.corpus, cmap)
        for match_mode in ("LEX", "SENSE"):
            lists = {}
            for s in strings:
                try:
                    spans = extract_spans(corpus, s, d, config.span_mode, match_mode,
                                          config.filter_cascade, thresholds(config))
                except NoCandidates:
                    spans = []
                lists[s] = sorted({sp.target for sp in spans})
            ambiguity[f"{config.filter_cascade}+{match_mode}"] = metrics.ambiguity_stats(
                metrics.dictionary_ambiguity_pairs(lists))

    gold_titles = sorted({kb.by_id[g.kb_id].wiki_title for g in gold if not g.is_nil and g.kb_id in kb.by_id})
    entities = sorted({cmap.resolve(t) for t in gold_titles})
    synonymy["dictionary"] = metrics.synonymy_stats(
        metrics.dictionary_synonymy_pairs(d.reverse_index(), entities))

    md = out_path(config, "stats.md")
    md.write_text(render_stats(ambiguity, synonymy, oracle), encoding="utf-8")
    return [md, write_rows(out_path(config, "stats.tsv"), stats_rows(ambiguity, synonymy, oracle))]


# --- entry -----------------------------------------------------------------

COMMANDS = {
    "build-canonical": (cmd_build_canonical, "resolve redirects into canonical.tsv"),
    "build-dict": (cmd_build, "build canonical.tsv and dictionary.tsv"),
    "lookup": (cmd_lookup, "candidate entities for strings"),
    "extract-spans": (cmd_extract_spans, "write training spans for strings"),
    "train": (cmd_train, "train word experts"),
    "disambiguate": (cmd_disambiguate, "answer a queries file"),
    "evaluate": (cmd_evaluate, "score answers against gold"),
    "stats": (cmd_stats, "ambiguity, synonymy and oracle tables"),
    "pr-curve": (cmd_pr_curve, "precision/recall at k of the candidate lists"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", default=None, help="key=value config file (else $NED_CONFIG)")
    for key in KNOWN_KEYS:
        common.add_argument("--" + key.replace("_", "-"), dest=key, default=None, metavar="VALUE")

    parser = _Parser(prog="ned", description="Word-expert named entity disambiguation")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("lookup", "extract-spans", "train"):
            p.add_argument("strings", nargs="*" if name != "lookup" else "+", help="target strings")
        if name == "evaluate":
            p.add_argument("answers_file", nargs="?", default=None, help="answers.tsv (else config answers)")
            p.add_argument("--pr", action="store_true", help="also write pr_curve.tsv")
        if name in ("evaluate", "pr-curve"):
            p.add_argument("--ks", default="1,2,3,5,10,inf", help="comma-separated cutoffs")
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        overrides = {k: getattr(args, k) for k in KNOWN_KEYS if getattr(args, k) is not None}
        config = load_config(args.config, overrides)
        configure_logging(config.log_level)
        handler, _ = COMMANDS[args.command]
        written = handler(config, args)
    except NedError as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception:
        logger.exception("internal error")
        return 3
    _done(*written)
    return 0
