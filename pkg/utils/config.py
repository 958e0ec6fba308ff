from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional

from dotenv import dotenv_values, load_dotenv

from ned.errors import ConfigError

# project-root .env, may set NED_CONFIG
ROOT = Path(__file__).resolve().parents[1]
load_dotenv(dotenv_path=ROOT / ".env", override=False)

CONFIG_ENV_VAR = "NED_CONFIG"

CASCADES = ("EXCT", "LNRM", "FUZZ", "HEUR")
SPAN_MODES = ("T100", "SENT", "PARA")
MATCH_MODES = ("LEX", "SENSE")
COUNT_VIEWS = ("merged", "wiki", "web")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

PATH_KEYS = (
    "pages", "redirects", "links", "kb", "corpus", "queries", "gold",
    "docs_dir", "canonical", "dictionary", "models_dir", "answers",
)


@dataclass(frozen=True)
class RunConfig:
    # inputs
    pages: Optional[str] = None
    redirects: Optional[str] = None
    links: Optional[str] = None
    kb: Optional[str] = None
    corpus: Optional[str] = None
    queries: Optional[str] = None
    gold: Optional[str] = None
    docs_dir: Optional[str] = None
    # prebuilt artifacts
    canonical: Optional[str] = None
    dictionary: Optional[str] = None
    models_dir: Optional[str] = None
    answers: Optional[str] = None
    out_dir: str = "out"

    # candidate generation
    cascade: str = "HEUR"
    filter_cascade: str = "HEUR"
    counts: str = "merged"
    fuzz_max_distance: Optional[int] = None
    heur_max_links: int = 10
    heur_max_string_links: int = 1
    heur_min_score: float = 0.001
    heur_similar_ratio: float = 0.1
    heur_similar_max_length: int = 6

    # word experts
    classifier: bool = True
    span_mode: str = "T100"
    match_mode: str = "LEX"
    l2_strength: float = 1.0
    max_iter: int = 200
    min_spans_per_class: int = 1
    expand: bool = False

    workers: int = 1
    log_level: str = "INFO"


def _to_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _optional_int(value: str) -> Optional[int]:
    v = value.strip()
    if v in ("", "none", "None"):
        return None
    return int(v)


def _optional_str(value: str) -> Optional[str]:
    v = value.strip()
    return v or None


_CONVERTERS = {
    "fuzz_max_distance": _optional_int,
    "heur_max_links": int,
    "heur_max_string_links": int,
    "heur_min_score": float,
    "heur_similar_ratio": float,
    "heur_similar_max_length": int,
    "classifier": _to_bool,
    "expand": _to_bool,
    "l2_strength": float,
    "max_iter": int,
    "min_spans_per_class": int,
    "workers": int,
    "cascade": lambda v: v.strip().upper(),
    "filter_cascade": lambda v: v.strip().upper(),
    "span_mode": lambda v: v.strip().upper(),
    "match_mode": lambda v: v.strip().upper(),
    "counts": lambda v: v.strip().lower(),
    "log_level": lambda v: v.strip().upper(),
    "out_dir": lambda v: v.strip(),
}

KNOWN_KEYS = tuple(f.name for f in fields(RunConfig))


def _coerce(values: Mapping[str, Any], source: str) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, raw in values.items():
        if raw is None:
            continue
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}: unknown config key {key!r}")
        if not isinstance(raw, str):
            out[key] = raw
            continue
        conv = _CONVERTERS.get(key, _optional_str)
        try:
            out[key] = conv(raw)
        except ValueError as e:
            raise ConfigError(f"{source}: bad value for {key}: {e}") from None
    return out


def config_path_from_env() -> Optional[str]:
    return os.getenv(CONFIG_ENV_VAR) or None


def load_config(
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Defaults < key=value file < overrides (command-line flags)."""
    config = RunConfig()
    path = path or config_path_from_env()
    if path:
        if not Path(path).is_file():
            raise ConfigError(f"config file not found: {path}")
        config = replace(config, **_coerce(dotenv_values(path), str(path)))
    if overrides:
        config = replace(config, **_coerce(overrides, "flags"))
    return config


def validate(config: RunConfig, required_paths: Iterable[str] = ()) -> RunConfig:
    for key, allowed in (
        ("cascade", CASCADES),
        ("filter_cascade", CASCADES),
        ("span_mode", SPAN_MODES),
        ("match_mode", MATCH_MODES),
        ("counts", COUNT_VIEWS),
        ("log_level", LOG_LEVELS),
    ):
        value = getattr(config, key)
        if value not in allowed:
            raise ConfigError(f"{key} must be one of {', '.join(allowed)}; got {value!r}")
    if config.l2_strength <= 0:
        raise ConfigError("l2_strength must be positive")
    if config.workers < 1:
        raise ConfigError("workers must be >= 1")
    if config.max_iter < 1:
        raise ConfigError("max_iter must be >= 1")
    if config.min_spans_per_class < 1:
        raise ConfigError("min_spans_per_class must be >= 1")
    if config.fuzz_max_distance is not None and config.fuzz_max_distance < 1:
        raise ConfigError("fuzz_max_distance must be >= 1 when set")

    for key in required_paths:
        value = getattr(config, key)
        if not value:
            raise ConfigError(f"missing required path: {key}")
        if not Path(value).exists():
            raise ConfigError(f"{key}: path does not exist: {value}")
    for key in PATH_KEYS:
        value = getattr(config, key)
        if value and key not in required_paths and key not in ("models_dir", "answers") and not Path(value).exists():
            raise ConfigError(f"{key}: path does not exist: {value}")
    return config
