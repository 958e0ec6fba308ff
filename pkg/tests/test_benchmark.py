"""End-to-end: the word expert beats the most-frequent-sense dictionary on held-out mentions."""
import pytest

from evalkit.datasets import guesses_for, load_answers, load_gold
from evalkit.metrics import micro_accuracy
from generate_benchmark import KB_IDS, generate_benchmark, write_benchmark
from ned import cli


@pytest.fixture(scope="module")
def run(tmp_path_factory):
    root = tmp_path_factory.mktemp("e2e")
    bench = generate_benchmark()
    data = write_benchmark(bench, root / "data")
    common = ["--pages", str(data / "pages.tsv"), "--redirects", str(data / "redirects.tsv"),
              "--links", str(data / "links.tsv"), "--kb", str(data / "kb.tsv"),
              "--queries", str(data / "queries.xml"), "--docs-dir", str(data / "docs")]
    assert cli.main(["build-dict", *common, "--out-dir", str(root / "build")]) == 0
    prebuilt = ["--canonical", str(root / "build" / "canonical.tsv"),
                "--dictionary", str(root / "build" / "dictionary.tsv")]
    assert cli.main(["train", *common, *prebuilt, "--corpus", str(data / "corpus.jsonl"),
                     "--models-dir", str(root / "models"), "--out-dir", str(root / "train")]) == 0
    assert cli.main(["disambiguate", *common, *prebuilt, "--classifier", "false",
                     "--out-dir", str(root / "dict")]) == 0
    assert cli.main(["disambiguate", *common, *prebuilt, "--models-dir", str(root / "models"),
                     "--out-dir", str(root / "expert")]) == 0
    return bench, data, root


def accuracy(data, answers_path):
    gold = load_gold(data / "gold.tsv")
    return micro_accuracy(gold, guesses_for(gold, load_answers(answers_path))).micro_accuracy


def test_dictionary_picks_majority(run):
    bench, data, root = run
    assert bench.majority == "Mercury_(planet)"
    answers = load_answers(root / "dict" / "answers.tsv")
    assert {a.kb_id for a in answers} == {KB_IDS[bench.majority]}
    assert accuracy(data, root / "dict" / "answers.tsv") == pytest.approx(0.8)


def test_word_expert_beats_dictionary(run):
    _, data, root = run
    expert = accuracy(data, root / "expert" / "answers.tsv")
    assert expert >= 0.95
    assert expert > accuracy(data, root / "dict" / "answers.tsv")


def test_one_model_per_string(run):
    _, _, root = run
    index = (root / "models" / "index.tsv").read_text(encoding="utf-8").split("\n")
    assert index[0].startswith("Mercury\t")
    assert index[1] == ""
