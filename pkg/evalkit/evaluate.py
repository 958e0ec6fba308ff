import argparse
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Tuple

from evalkit.datasets import guesses_for, load_answers, load_gold
from evalkit.metrics import SUBSETS, AmbiguityStats, EvalReport, PrPoint, SynonymyStats, micro_accuracy
from utils.tsv_io import render_decimal, write_rows


def accuracy_reports(gold, guesses) -> List[EvalReport]:
    return [micro_accuracy(gold, guesses, subset) for subset in SUBSETS]


def report_rows(reports: Sequence[EvalReport]) -> List[Tuple]:
    rows = []
    for r in reports:
        rows.append((r.subset, "all", r.n_queries, r.n_correct, render_decimal(r.micro_accuracy)))
        for g in r.by_genre:
            rows.append((r.subset, g.genre, g.n_queries, g.n_correct, render_decimal(g.accuracy)))
    return rows


def render_report(reports: Sequence[EvalReport], n_errors: int = 0) -> str:
    overall = next(r for r in reports if r.subset == "ALL")
    lines = []
    lines.append("# Evaluation Report\n")
    lines.append(f"- Total queries: **{overall.n_queries}**")
    lines.append(f"- Correct: **{overall.n_correct}**")
    lines.append(f"- Micro-accuracy: **{render_decimal(overall.micro_accuracy)}**")
    lines.append(f"- Gold NIL / guessed NIL / NIL correct: **{overall.n_gold_nil} / "
                 f"{overall.n_guessed_nil} / {overall.n_nil_correct}**")
    if n_errors:
        lines.append(f"- Error rows (scored wrong): **{n_errors}**")
    lines.append("")

    lines.append("## Subsets (subset × genre)\n")
    lines.append("| subset | genre | queries | correct | accuracy |")
    lines.append("|---|---|---:|---:|---:|")
    for subset, genre, n, c, acc in report_rows(reports):
        lines.append(f"| {subset} | {genre} | {n} | {c} | {acc} |")
    return "\n".join(lines) + "\n"


def pr_rows(points: Sequence[PrPoint]) -> List[Tuple]:
    return [("inf" if p.k is None else p.k, render_decimal(p.precision), render_decimal(p.recall))
            for p in points]


def write_pr(path, points: Sequence[PrPoint]) -> Path:
    return write_rows(path, pr_rows(points))


def render_stats(
    ambiguity: Mapping[str, AmbiguityStats],
    synonymy: Mapping[str, SynonymyStats],
    oracle: Mapping[str, Tuple[float, float]],
) -> str:
    """Markdown tables keyed by view name (gold, EXCT, LNRM, ...)."""
    lines = ["# Dictionary Statistics\n"]
    lines.append("## Ambiguity (entities per string)\n")
    lines.append("| view | strings | none | single | multiple | mean (multiple) |")
    lines.append("|---|---:|---:|---:|---:|---:|")
    for view, a in ambiguity.items():
        lines.append(f"| {view} | {a.n_strings} | {a.no_entity} | {a.single} | {a.multiple} | "
                     f"{render_decimal(a.mean_multiple, 2)} |")
    lines.append("")
    lines.append("## Synonymy (strings per entity)\n")
    lines.append("| view | entities | single | multiple | mean (multiple) |")
    lines.append("|---|---:|---:|---:|---:|")
    for view, s in synonymy.items():
        lines.append(f"| {view} | {s.n_entities} | {s.single} | {s.multiple} | "
                     f"{render_decimal(s.mean_multiple, 2)} |")
    if oracle:
        lines.append("")
        lines.append("## Realized vs oracle accuracy\n")
        lines.append("| dictionary | realized | oracle |")
        lines.append("|---|---:|---:|")
        for view, (realized, best) in oracle.items():
            lines.append(f"| {view} | {render_decimal(realized)} | {render_decimal(best)} |")
    return "\n".join(lines) + "\n"


def stats_rows(
    ambiguity: Mapping[str, AmbiguityStats],
    synonymy: Mapping[str, SynonymyStats],
    oracle: Mapping[str, Tuple[float, float]],
) -> List[Tuple]:
    rows: List[Tuple] = []
    for view, a in ambiguity.items():
        for key, value in a.as_row().items():
            rows.append(("ambiguity", view, key, _cell(value)))
    for view, s in synonymy.items():
        for key, value in s.as_row().items():
            rows.append(("synonymy", view, key, _cell(value)))
    for view, (realized, best) in oracle.items():
        rows.append(("oracle", view, "realized", render_decimal(realized)))
        rows.append(("oracle", view, "oracle", render_decimal(best)))
    return rows


def _cell(value) -> str:
    return render_decimal(value) if isinstance(value, float) else str(value)


def evaluate(gold_path, answers_path, out_md_path, out_tsv_path=None) -> Dict[str, EvalReport]:
    gold = load_gold(gold_path)
    answers = load_answers(answers_path)
    guesses = guesses_for(gold, answers)
    reports = accuracy_reports(gold, guesses)
    n_errors = sum(a.is_error for a in answers)

    Path(out_md_path).parent.mkdir(parents=True, exist_ok=True)
    Path(out_md_path).write_text(render_report(reports, n_errors), encoding="utf-8")
    if out_tsv_path:
        write_rows(out_tsv_path, report_rows(reports))
    return {r.subset: r for r in reports}


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--gold", required=True, help="path to gold.tsv")
    ap.add_argument("--answers", required=True, help="path to answers.tsv")
    ap.add_argument("--out", default="eval_report.md", help="output markdown report")
    ap.add_argument("--tsv", default=None, help="optional machine-readable TSV of the same numbers")
    args = ap.parse_args()
    evaluate(args.gold, args.answers, args.out, args.tsv)
    print(f"Report written to: {args.out}")
