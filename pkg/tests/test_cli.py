import pytest

from evalkit.datasets import load_answers
from generate_benchmark import generate_benchmark, write_benchmark
from ned import cli


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    root = tmp_path_factory.mktemp("bench")
    return write_benchmark(generate_benchmark(n_train=80, n_test=20, seed=3), root / "data")


def inputs(data, *names):
    flags = []
    for name in names:
        value = {"pages": "pages.tsv", "redirects": "redirects.tsv", "links": "links.tsv", "kb": "kb.tsv",
                 "corpus": "corpus.jsonl", "queries": "queries.xml", "gold": "gold.tsv", "docs-dir": "docs"}[name]
        flags += [f"--{name}", str(data / value)]
    return flags


DICT_INPUTS = ("pages", "redirects", "links", "kb")


@pytest.fixture(scope="module")
def models(data, tmp_path_factory):
    out = tmp_path_factory.mktemp("train")
    code = cli.main(["train", "Mercury", *inputs(data, *DICT_INPUTS, "corpus"),
                     "--models-dir", str(out / "models"), "--out-dir", str(out)])
    assert code == 0
    return out / "models"


class TestBuild:
    def test_rerun_is_byte_identical(self, data, tmp_path):
        for run in ("a", "b"):
            assert cli.main(["build-dict", *inputs(data, *DICT_INPUTS), "--out-dir", str(tmp_path / run)]) == 0
        for name in ("canonical.tsv", "dictionary.tsv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_build_canonical(self, data, tmp_path, capsys):
        assert cli.main(["build-canonical", *inputs(data, "pages", "redirects"), "--out-dir", str(tmp_path)]) == 0
        assert "Written to:" in capsys.readouterr().out
        assert (tmp_path / "canonical.tsv").read_text(encoding="utf-8").startswith("Mercury_(element)\t")

    def test_prebuilt_dictionary_is_reused(self, data, tmp_path):
        cli.main(["build-dict", *inputs(data, *DICT_INPUTS), "--out-dir", str(tmp_path / "built")])
        code = cli.main(["lookup", "Mercury", "--canonical", str(tmp_path / "built" / "canonical.tsv"),
                         "--dictionary", str(tmp_path / "built" / "dictionary.tsv"), "--out-dir", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "lookup.tsv").read_text(encoding="utf-8").split("\n")
        assert rows[0] == "# string\tMercury\tHEUR"
        assert rows[1].startswith("1\tMercury_(planet)\t")


class TestLookup:
    def test_rows(self, data, tmp_path, capsys):
        code = cli.main(["lookup", "Mercury", "Venus", *inputs(data, *DICT_INPUTS), "--out-dir", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "lookup.tsv").read_text(encoding="utf-8").split("\n")
        assert rows[:3] == [
            "# string\tMercury\tHEUR",
            "1\tMercury_(planet)\t0.8000\tEXCT",
            "2\tMercury_(element)\t0.2000\tEXCT",
        ]
        assert rows[3] == "# string\tVenus\tHEUR"
        assert rows[4] == ""
        assert "1\tMercury_(planet)\t0.8000\tEXCT" in capsys.readouterr().out

    def test_candidate_rows_have_four_fields(self, data, tmp_path):
        assert cli.main(["lookup", "Mercury", *inputs(data, *DICT_INPUTS), "--out-dir", str(tmp_path)]) == 0
        rows = (tmp_path / "lookup.tsv").read_text(encoding="utf-8").splitlines()
        candidates = [r.split("\t") for r in rows if not r.startswith("# ")]
        assert candidates and all(len(r) == 4 for r in candidates)

    def test_config_file_and_flag_precedence(self, data, tmp_path):
        conf = tmp_path / "run.env"
        conf.write_text(f"cascade=EXCT\nout_dir={tmp_path / 'from_file'}\n", encoding="utf-8")
        assert cli.main(["lookup", "mercury", "--config", str(conf), *inputs(data, *DICT_INPUTS)]) == 0
        assert (tmp_path / "from_file" / "lookup.tsv").read_text(encoding="utf-8") == "# string\tmercury\tEXCT\n"
        assert cli.main(["lookup", "mercury", "--config", str(conf), "--cascade", "LNRM",
                         *inputs(data, *DICT_INPUTS)]) == 0
        rows = (tmp_path / "from_file" / "lookup.tsv").read_text(encoding="utf-8").split("\n")
        assert rows[0] == "# string\tmercury\tLNRM"
        assert rows[1].endswith("\tLNRM")


class TestExitCodes:
    def test_usage_errors(self, data, tmp_path):
        assert cli.main([]) == 1
        assert cli.main(["no-such-command"]) == 1
        assert cli.main(["lookup", *inputs(data, *DICT_INPUTS)]) == 1
        assert cli.main(["lookup", "x", "--cascade", "GOOG", *inputs(data, *DICT_INPUTS)]) == 1
        assert cli.main(["build-dict", "--pages", str(tmp_path / "none.tsv"), "--links", str(tmp_path)]) == 1

    def test_classifier_needs_models(self, data, tmp_path):
        code = cli.main(["disambiguate", *inputs(data, *DICT_INPUTS, "queries"), "--out-dir", str(tmp_path)])
        assert code == 1

    def test_classifier_needs_documents(self, data, models, tmp_path):
        code = cli.main(["disambiguate", *inputs(data, *DICT_INPUTS, "queries"), "--models-dir", str(models),
                         "--out-dir", str(tmp_path)])
        assert code == 1
        assert not (tmp_path / "answers.tsv").exists()

    def test_schema_errors(self, data, tmp_path):
        bad_pages = tmp_path / "pages.tsv"
        bad_pages.write_text("Mercury_(planet)\tstub\n", encoding="utf-8")
        assert cli.main(["build-dict", "--pages", str(bad_pages), "--links", str(data / "links.tsv"),
                         "--out-dir", str(tmp_path)]) == 2
        stray = tmp_path / "answers.tsv"
        stray.write_text("EL9999\tE0000001\tMercury_(planet)\n", encoding="utf-8")
        assert cli.main(["evaluate", str(stray), *inputs(data, "gold"), "--out-dir", str(tmp_path)]) == 2

    def test_internal_error(self, monkeypatch):
        def boom(config, args):
            raise RuntimeError("boom")
        monkeypatch.setitem(cli.COMMANDS, "lookup", (boom, "fails"))
        assert cli.main(["lookup", "x"]) == 3


class TestDisambiguate:
    def test_dictionary_only(self, data, tmp_path):
        code = cli.main(["disambiguate", *inputs(data, *DICT_INPUTS, "queries"), "--classifier", "false",
                         "--out-dir", str(tmp_path)])
        assert code == 0
        answers = load_answers(tmp_path / "answers.tsv")
        assert len(answers) == 20
        assert {a.kb_id for a in answers} == {"E0000001"}
        assert [a.query_id for a in answers] == sorted(a.query_id for a in answers)

    def test_missing_document_gives_error_row(self, data, models, tmp_path):
        queries = tmp_path / "queries.xml"
        queries.write_text('<kbpentlink><query id="EL0000"><name>Mercury</name><docid>test0000</docid></query>'
                           '<query id="ELX"><name>Mercury</name><docid>nowhere</docid></query></kbpentlink>',
                           encoding="utf-8")
        code = cli.main(["disambiguate", *inputs(data, *DICT_INPUTS, "docs-dir"), "--queries", str(queries),
                         "--models-dir", str(models), "--out-dir", str(tmp_path)])
        assert code == 0
        answers = {a.query_id: a for a in load_answers(tmp_path / "answers.tsv")}
        assert answers["ELX"].kb_id == "ERROR:DocumentNotFound"
        assert answers["EL0000"].kb_id in ("E0000001", "E0000002")

    def test_workers_do_not_change_answers(self, data, models, tmp_path):
        for workers in ("1", "2"):
            code = cli.main(["disambiguate", *inputs(data, *DICT_INPUTS, "queries", "docs-dir"),
                             "--models-dir", str(models), "--workers", workers,
                             "--out-dir", str(tmp_path / workers)])
            assert code == 0
        assert (tmp_path / "1" / "answers.tsv").read_bytes() == (tmp_path / "2" / "answers.tsv").read_bytes()


class TestEvaluate:
    @pytest.fixture
    def answers(self, data, tmp_path):
        cli.main(["disambiguate", *inputs(data, *DICT_INPUTS, "queries"), "--classifier", "false",
                  "--out-dir", str(tmp_path)])
        return tmp_path / "answers.tsv"

    def test_report(self, data, answers, tmp_path):
        assert cli.main(["evaluate", str(answers), *inputs(data, "gold"), "--out-dir", str(tmp_path)]) == 0
        md = (tmp_path / "eval_report.md").read_text(encoding="utf-8")
        assert "- Total queries: **20**" in md
        assert "- Micro-accuracy: **0.8000**" in md
        assert not (tmp_path / "pr_curve.tsv").exists()

    def test_pr_flag(self, data, answers, tmp_path):
        code = cli.main(["evaluate", str(answers), "--pr", "--ks", "1,inf",
                         *inputs(data, *DICT_INPUTS, "gold", "queries"), "--out-dir", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "pr_curve.tsv").read_text(encoding="utf-8").split("\n")
        assert rows[0] == "1\t0.8000\t0.8000"
        assert rows[1] == "inf\t0.5000\t1.0000"

    def test_bad_cutoff(self, data, answers, tmp_path):
        assert cli.main(["pr-curve", "--ks", "0", *inputs(data, *DICT_INPUTS, "gold", "queries"),
                         "--out-dir", str(tmp_path)]) == 1


def test_stats(data, tmp_path):
    code = cli.main(["stats", *inputs(data, *DICT_INPUTS, "gold", "queries", "corpus"), "--out-dir", str(tmp_path)])
    assert code == 0
    md = (tmp_path / "stats.md").read_text(encoding="utf-8")
    assert "| gold | 1 | 0 | 0 | 1 | 2.00 |" in md
    assert "| HEUR | 0.8000 | 1.0000 |" in md
    assert "HEUR+SENSE" in md
    rows = (tmp_path / "stats.tsv").read_text(encoding="utf-8").split("\n")
    assert "synonymy\tgold\tentities\t2" in rows


def test_parse_ks():
    assert cli.parse_ks("1, 2,inf") == (1, 2, None)
    with pytest.raises(cli.ConfigError):
        cli.parse_ks("x")
