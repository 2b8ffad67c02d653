"""Analysis configuration files (YAML or JSON)."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, time, timezone
from pathlib import Path
from typing import Any

import yaml

from .ingest import DEFAULT_CREDIT_PATTERNS, Space

__all__ = [
    "ConfigError",
    "InputError",
    "StoreError",
    "CorpusSpec",
    "ListSpec",
    "RevisionLogSpec",
    "Thresholds",
    "AnalysisConfig",
    "load_config",
    "to_timestamp",
]


class ConfigError(ValueError):
    """Invalid configuration document (exit code 2)."""


class InputError(Exception):
    """A referenced input file is missing or unreadable (exit code 2)."""


class StoreError(Exception):
    """Missing or incompatible store / metrics bundle (exit code 3)."""


def to_timestamp(value: Any, *, end_of_day: bool = False) -> int:
    """UTC seconds from an int, ISO string, date or datetime.

    A bare date used as an upper bound means the end of that day.
    """
    if isinstance(value, bool):
        raise ConfigError(f"not a date: {value!r}")
    if isinstance(value, (int, float)):
        return int(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if len(text) == 10:
                value = date.fromisoformat(text)
            else:
                value = datetime.fromisoformat(text.replace("Z", "+00:00"))
        except ValueError as exc:
            raise ConfigError(f"not a date: {value!r}") from exc
    if isinstance(value, datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        return int(value.timestamp())
    if isinstance(value, date):
        t = time(23, 59, 59) if end_of_day else time(0, 0, 0)
        return int(datetime.combine(value, t, tzinfo=timezone.utc).timestamp())
    raise ConfigError(f"not a date: {value!r}")


@dataclass(frozen=True)
class CorpusSpec:
    name: str
    keywords: tuple[str, ...]
    date_from: int
    date_to: int
    whole_word: bool = False


@dataclass(frozen=True)
class ListSpec:
    list_id: str
    archives: tuple[Path, ...]
    orientation: str  # "user" | "developer"


@dataclass(frozen=True)
class RevisionLogSpec:
    path: Path
    space: Space


@dataclass(frozen=True)
class Thresholds:
    quote_min_chars: int = 20
    quote_min_tokens: int = 3
    quote_fuzzy: bool = True
    quote_fuzzy_ratio: float = 0.9
    # token Jaccard for same-topic matching; None = exact subjects only
    subject_fuzzy: float | None = None
    rd_threshold: float = 0.0
    rd_min_cell: int = 5
    fallback_days: float = 14.0

    def validate(self) -> None:
        if self.quote_min_chars < 0 or self.quote_min_tokens < 0:
            raise ConfigError("quote minimums must be non-negative")
        if not 0 < self.quote_fuzzy_ratio <= 1:
            raise ConfigError("quote_fuzzy_ratio must lie in (0, 1]")
        if self.subject_fuzzy is not None and not 0 < self.subject_fuzzy <= 1:
            raise ConfigError("subject_fuzzy must lie in (0, 1]")
        if self.rd_threshold < 0:
            raise ConfigError("rd_threshold must be non-negative")
        if self.rd_min_cell < 0:
            raise ConfigError("rd_min_cell must be non-negative")
        if self.fallback_days < 0:
            raise ConfigError("fallback_days must be non-negative")


@dataclass(frozen=True)
class AnalysisConfig:
    corpora: tuple[CorpusSpec, ...]
    lists: tuple[ListSpec, ListSpec]
    roster: Path
    output: Path
    stage_lexicon: Path | None = None
    revision_logs: tuple[RevisionLogSpec, ...] = ()
    credit_patterns: tuple[str, ...] = DEFAULT_CREDIT_PATTERNS
    thresholds: Thresholds = field(default_factory=Thresholds)
    jobs: int = 1

    @property
    def user_list(self) -> str:
        return next(ls.list_id for ls in self.lists if ls.orientation == "user")

    @property
    def developer_list(self) -> str:
        return next(ls.list_id for ls in self.lists if ls.orientation == "developer")

    def input_paths(self) -> list[Path]:
        paths = [self.roster]
        for ls in self.lists:
            paths.extend(ls.archives)
        paths.extend(r.path for r in self.revision_logs)
        if self.stage_lexicon is not None:
            paths.append(self.stage_lexicon)
        return paths

    def check_inputs(self) -> None:
        for path in self.input_paths():
            if not path.is_file():
                raise InputError(f"missing input file: {path}")


def _paths(base: Path, value: Any) -> tuple[Path, ...]:
    items = value if isinstance(value, list) else [value]
    return tuple((base / str(v)).resolve() if not Path(str(v)).is_absolute() else Path(str(v)) for v in items)


def load_config(path: str | Path, output: str | Path | None = None) -> AnalysisConfig:
    """Read and validate a config file; relative paths are resolved
    against the file's directory."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    base = path.parent.resolve()
    try:
        corpora = tuple(
            CorpusSpec(
                name=str(c["name"]),
                keywords=tuple(str(k).lower() for k in c["keywords"]),
                date_from=to_timestamp(c["date_from"]),
                date_to=to_timestamp(c["date_to"], end_of_day=True),
                whole_word=bool(c.get("whole_word", False)),
            )
            for c in doc["corpora"]
        )
        lists = tuple(
            ListSpec(
                list_id=str(ls["list_id"]),
                archives=_paths(base, ls.get("archives", [])) if ls.get("archives") else (),
                orientation=str(ls["orientation"]),
            )
            for ls in doc["lists"]
        )
        logs = tuple(
            RevisionLogSpec(_paths(base, r["path"])[0], Space(r["space"]))
            for r in doc.get("revision_logs", []) or []
        )
        thresholds = Thresholds(**(doc.get("thresholds") or {}))
        out = Path(output) if output is not None else _paths(base, doc.get("output", "out"))[0]
        cfg = AnalysisConfig(
            corpora=corpora,
            lists=lists,  # type: ignore[arg-type]
            roster=_paths(base, doc["roster"])[0],
            output=out,
            stage_lexicon=_paths(base, doc["stage_lexicon"])[0] if doc.get("stage_lexicon") else None,
            revision_logs=logs,
            credit_patterns=tuple(doc.get("credit_patterns") or DEFAULT_CREDIT_PATTERNS),
            thresholds=thresholds,
            jobs=int(doc.get("jobs", 1)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"invalid config {path}: {type(exc).__name__}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc
    validate(cfg)
    return cfg


def validate(cfg: AnalysisConfig) -> None:
    if len(cfg.lists) != 2:
        raise ConfigError("exactly two lists are required")
    if sorted(ls.orientation for ls in cfg.lists) != ["developer", "user"]:
        raise ConfigError("one list must be 'user'-oriented and one 'developer'-oriented")
    if cfg.lists[0].list_id == cfg.lists[1].list_id:
        raise ConfigError("list ids must differ")
    if not cfg.corpora:
        raise ConfigError("at least one corpus is required")
    names = [c.name for c in cfg.corpora]
    if len(set(names)) != len(names):
        raise ConfigError("corpus names must be unique")
    for c in cfg.corpora:
        if not c.keywords:
            raise ConfigError(f"corpus {c.name!r} has no keywords")
        if c.date_from > c.date_to:
            raise ConfigError(f"corpus {c.name!r}: date_from is after date_to")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be >= 1")
    cfg.thresholds.validate()
