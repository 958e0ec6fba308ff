import pytest

from ned.errors import ConfigError
from ned.lookup import HeurThresholds
from utils.config import CONFIG_ENV_VAR, RunConfig, load_config, validate


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("# dictionary settings\ncascade=exct\nworkers=2\nexpand=yes\nfuzz_max_distance=\n",
                    encoding="utf-8")
    return path


def test_defaults(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    config = load_config()
    assert config == RunConfig()
    assert (config.cascade, config.span_mode, config.match_mode) == ("HEUR", "T100", "LEX")
    assert config.heur_max_links == HeurThresholds().max_links


def test_file_values_are_coerced(config_file):
    config = load_config(str(config_file))
    assert config.cascade == "EXCT"
    assert config.workers == 2
    assert config.expand is True
    assert config.fuzz_max_distance is None


def test_flags_beat_file(config_file):
    config = load_config(str(config_file), {"cascade": "lnrm", "workers": "3"})
    assert (config.cascade, config.workers, config.expand) == ("LNRM", 3, True)


def test_env_var_names_the_file(config_file, monkeypatch):
    monkeypatch.setenv(CONFIG_ENV_VAR, str(config_file))
    assert load_config().cascade == "EXCT"


@pytest.mark.parametrize("path,overrides", [
    ("missing.env", None),
    (None, {"colour": "blue"}),
    (None, {"workers": "many"}),
    (None, {"expand": "perhaps"}),
])
def test_config_errors(monkeypatch, path, overrides):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    with pytest.raises(ConfigError):
        load_config(path, overrides)


@pytest.mark.parametrize("changes", [
    {"cascade": "GOOG"},
    {"span_mode": "DOC"},
    {"counts": "blogs"},
    {"l2_strength": 0.0},
    {"workers": 0},
    {"fuzz_max_distance": 0},
    {"pages": "/no/such/pages.tsv"},
])
def test_validate_rejects(changes):
    with pytest.raises(ConfigError):
        validate(RunConfig(**changes))


def test_validate_required_paths(tmp_path):
    pages = tmp_path / "pages.tsv"
    pages.write_text("", encoding="utf-8")
    assert validate(RunConfig(pages=str(pages)), ("pages",)).pages == str(pages)
    with pytest.raises(ConfigError):
        validate(RunConfig(pages=str(pages)), ("pages", "links"))
