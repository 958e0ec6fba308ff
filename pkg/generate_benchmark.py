import argparse
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

MENTION = "Mercury"

# two entities sharing one mention; context vocabularies do not overlap
VOCABULARY = {
    "Mercury_(planet)": [
        "orbit", "telescope", "solar", "crater", "sun", "astronomer", "surface", "spacecraft",
        "probe", "transit", "gravity", "perihelion", "venus", "mariner", "messenger", "sky",
    ],
    "Mercury_(element)": [
        "toxic", "liquid", "thermometer", "metal", "chemical", "amalgam", "poisoning", "vapor",
        "laboratory", "compound", "alloy", "dental", "cinnabar", "barometer", "fish", "mine",
    ],
}
SHARED = ["the", "a", "and", "of", "with", "was", "new", "report", "said", "first"]

KB_IDS = {"Mercury_(planet)": "E0000001", "Mercury_(element)": "E0000002"}


@dataclass
class Benchmark:
    corpus: List[Tuple[str, str]] = field(default_factory=list)       # (doc_id, html)
    link_counts: Dict[str, int] = field(default_factory=dict)          # entity -> anchor count
    held_out: List[Tuple[str, str, str]] = field(default_factory=list)  # (doc_id, text, gold entity)

    @property
    def majority(self) -> str:
        return max(sorted(self.link_counts), key=lambda e: self.link_counts[e])


def _context(rng: random.Random, vocab: List[str], n: int) -> List[str]:
    return [rng.choice(vocab) if rng.random() < 0.7 else rng.choice(SHARED) for _ in range(n)]


def _labels(rng: random.Random, n: int, skew: float) -> List[str]:
    major, minor = list(VOCABULARY)
    n_major = round(n * skew)
    labels = [major] * n_major + [minor] * (n - n_major)
    rng.shuffle(labels)
    return labels


def generate_benchmark(n_train: int = 500, n_test: int = 500, skew: float = 0.8,
                       width: int = 12, seed: int = 13) -> Benchmark:
    rng = random.Random(seed)
    bench = Benchmark(link_counts={e: 0 for e in VOCABULARY})

    for i, entity in enumerate(_labels(rng, n_train, skew)):
        before = " ".join(_context(rng, VOCABULARY[entity], width))
        after = " ".join(_context(rng, VOCABULARY[entity], width))
        html = f'<p>{before} <a href="{entity}">{MENTION}</a> {after}.</p>'
        bench.corpus.append((f"train{i:04d}", html))
        bench.link_counts[entity] += 1

    for i, entity in enumerate(_labels(rng, n_test, skew)):
        before = " ".join(_context(rng, VOCABULARY[entity], width))
        after = " ".join(_context(rng, VOCABULARY[entity], width))
        bench.held_out.append((f"test{i:04d}", f"{before} {MENTION} {after}.", entity))
    return bench


def write_benchmark(bench: Benchmark, out_dir) -> Path:
    """Lay the benchmark out as pipeline inputs: pages, links, corpus, KB, queries, docs, gold."""
    out = Path(out_dir)
    docs = out / "docs"
    docs.mkdir(parents=True, exist_ok=True)

    (out / "pages.tsv").write_text("".join(f"{e}\tarticle\n" for e in sorted(VOCABULARY)), encoding="utf-8")
    (out / "redirects.tsv").write_text("", encoding="utf-8")
    (out / "links.tsv").write_text(
        "".join(f"wiki\t{MENTION}\t{e}\t{n}\n" for e, n in sorted(bench.link_counts.items())), encoding="utf-8")
    (out / "kb.tsv").write_text(
        "".join(f"{KB_IDS[e]}\t{e}\tUKN\n" for e in sorted(KB_IDS)), encoding="utf-8")
    with open(out / "corpus.jsonl", "w", encoding="utf-8") as f:
        for doc_id, html in bench.corpus:
            f.write(json.dumps({"doc_id": doc_id, "html": html}, ensure_ascii=False) + "\n")

    queries = ["<kbpentlink>"]
    gold = []
    for i, (doc_id, text, entity) in enumerate(bench.held_out):
        qid = f"EL{i:04d}"
        (docs / f"{doc_id}.txt").write_text(text + "\n", encoding="utf-8")
        queries.append(f'  <query id="{qid}">\n    <name>{MENTION}</name>\n    <docid>{doc_id}</docid>\n  </query>')
        gold.append(f"{qid}\t{KB_IDS[entity]}\t{entity}\tnews\n")
    queries.append("</kbpentlink>")
    (out / "queries.xml").write_text("\n".join(queries) + "\n", encoding="utf-8")
    (out / "gold.tsv").write_text("".join(gold), encoding="utf-8")
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="benchmark", help="output directory")
    ap.add_argument("--seed", type=int, default=13)
    ap.add_argument("--train", type=int, default=500, help="linked training documents")
    ap.add_argument("--test", type=int, default=500, help="held-out query documents")
    ap.add_argument("--skew", type=float, default=0.8, help="share of the majority entity")
    args = ap.parse_args()
    bench = generate_benchmark(args.train, args.test, args.skew, seed=args.seed)
    out = write_benchmark(bench, args.out)
    print(f"Benchmark written to: {out}")
