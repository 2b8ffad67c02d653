"""Persisted corpus store and the ingest / analyze steps behind the CLI."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Iterable

import yaml

from .analysis import BUNDLE_SCHEMA_VERSION, analyze_corpus
from .config import AnalysisConfig, InputError, StoreError
from .ingest import (
    Diagnostic,
    IngestError,
    Message,
    ParticipantId,
    RevisionRecord,
    Role,
    Roster,
    Space,
    load_roster,
    parse_mbox,
    parse_revision_log,
    select_corpus,
)
from .threads import Discussion, build_discussions, discussion_index_record

logger = logging.getLogger(__name__)

__all__ = [
    "STORE_SCHEMA_VERSION",
    "run_ingest",
    "run_analyze",
    "load_store",
    "write_atomic",
]

STORE_SCHEMA_VERSION = 1
STORE_DIR = "store"
BUNDLE_FILE = "metrics.json"


def write_atomic(path: Path, text: str) -> None:
    """Write *text* to *path* via a temporary file and rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonl(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in records)


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def _message_record(m: Message) -> dict:
    return {
        "message_id": m.message_id,
        "list_id": m.list_id,
        "sender_raw": m.sender_raw,
        "sender": m.sender.canonical_name,
        "role": m.sender.role.value,
        "date": m.date,
        "subject_raw": m.subject_raw,
        "in_reply_to": m.in_reply_to,
        "references": list(m.references),
        "body": m.body,
    }


def _revision_record(r: RevisionRecord) -> dict:
    return {
        "revision_id": r.revision_id,
        "space": r.space.value,
        "path": r.path,
        "committer": r.committer.canonical_name,
        "committer_role": r.committer.role.value,
        "date": r.date,
        "log_message": r.log_message,
        "credited": sorted(p.canonical_name for p in r.credited),
    }


def _roster_record(p: ParticipantId) -> dict:
    rec = {
        "canonical_name": p.canonical_name,
        "role": p.role.value,
        "aliases": [{"name": n, "email": e} for n, e in sorted(p.aliases)],
    }
    if p.category:
        rec["category"] = p.category
    return rec


def _disambiguate(per_list: dict[str, list[Message]], diagnostics: list[Diagnostic]) -> list[Message]:
    """Drop duplicate ids inside a list; suffix ids that recur across lists."""
    out: list[Message] = []
    claimed: set[str] = set()
    for lid in sorted(per_list):
        seen: set[str] = set()
        kept = []
        for m in per_list[lid]:
            if m.message_id in seen:
                diagnostics.append(Diagnostic(lid, "duplicate Message-ID in list; copy dropped", message_id=m.message_id))
                continue
            seen.add(m.message_id)
            kept.append(m)
        clash = seen & claimed
        claimed |= seen

        def fix(mid: str | None) -> str | None:
            return f"{mid}/{lid}" if mid in clash else mid

        for m in kept:
            if clash:
                m = Message(
                    fix(m.message_id), m.list_id, m.sender_raw, m.sender, m.date, m.subject_raw,
                    fix(m.in_reply_to), tuple(fix(r) for r in m.references), m.body,
                )
            out.append(m)
    out.sort(key=lambda m: (m.list_id, m.date, m.message_id))
    return out


def _load_stage_file(path: Path | None) -> dict:
    if path is None:
        return {}
    with path.open(encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise InputError(f"stage lexicon {path} must be a mapping")
    return doc


def run_ingest(cfg: AnalysisConfig) -> Path:
    """Parse archives, select and thread every corpus, and persist the store."""
    cfg.check_inputs()
    try:
        roster = load_roster(str(cfg.roster))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"invalid roster {cfg.roster}: {exc}") from exc
    diagnostics: list[Diagnostic] = []
    per_list: dict[str, list[Message]] = {}
    for ls in cfg.lists:
        msgs: list[Message] = []
        for archive in ls.archives:
            try:
                with archive.open("rb") as fh:
                    msgs.extend(parse_mbox(fh, ls.list_id, roster, diagnostics))
            except (OSError, IngestError) as exc:
                raise InputError(f"cannot read archive {archive}: {exc}") from exc
        per_list[ls.list_id] = msgs
    messages = _disambiguate(per_list, diagnostics)

    revisions: list[RevisionRecord] = []
    for spec in cfg.revision_logs:
        try:
            with spec.path.open("rb") as fh:
                revisions.extend(parse_revision_log(fh, spec.space, cfg.credit_patterns, roster, diagnostics))
        except (OSError, IngestError) as exc:
            raise InputError(f"cannot read revision log {spec.path}: {exc}") from exc
    revisions.sort(key=lambda r: (r.space.value, r.date, r.revision_id))

    selections = {}
    discussion_records = []
    for corpus in cfg.corpora:
        sel = select_corpus(
            messages, corpus.keywords, corpus.date_from, corpus.date_to,
            name=corpus.name, whole_word=corpus.whole_word,
        )
        selections[corpus.name] = {
            "keywords": sorted(sel.keywords),
            "date_from": sel.date_from,
            "date_to": sel.date_to,
            "messages": sorted(sel.messages),
            "mother_thread": sorted(sel.mother_thread),
        }
        for d in build_discussions(sel, messages, fallback_days=cfg.thresholds.fallback_days, diagnostics=diagnostics):
            rec = discussion_index_record(d)
            rec["corpus"] = corpus.name
            rec["messages"] = list(d.message_ids)
            rec["reply_edges"] = [list(e) for e in d.reply_edges]
            discussion_records.append(rec)

    store = cfg.output / STORE_DIR
    write_atomic(store / "messages.jsonl", _jsonl(_message_record(m) for m in messages))
    write_atomic(store / "revisions.jsonl", _jsonl(_revision_record(r) for r in revisions))
    write_atomic(store / "discussions.jsonl", _jsonl(discussion_records))
    write_atomic(store / "selections.json", _dump(selections))
    write_atomic(store / "roster.json", _dump([_roster_record(p) for p in roster]))
    write_atomic(store / "diagnostics.jsonl", _jsonl(d.as_dict() for d in diagnostics))
    manifest = {
        "schema_version": STORE_SCHEMA_VERSION,
        "corpora": [c.name for c in cfg.corpora],
        "lists": {ls.list_id: ls.orientation for ls in cfg.lists},
        "counts": {
            "messages": len(messages),
            "revisions": len(revisions),
            "discussions": len(discussion_records),
            "diagnostics": len(diagnostics),
        },
    }
    write_atomic(store / "manifest.json", _dump(manifest))
    if diagnostics:
        logger.warning("ingest finished with %d diagnostics (see diagnostics.jsonl)", len(diagnostics))
    return store


def _read_jsonl(path: Path) -> list[dict]:
    with path.open(encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def load_store(store: Path) -> dict:
    """Rebuild messages, discussions and revisions from a store directory."""
    manifest_path = store / "manifest.json"
    if not manifest_path.is_file():
        raise StoreError(f"no store at {store} (run ingest first)")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        if manifest.get("schema_version") != STORE_SCHEMA_VERSION:
            raise StoreError(
                f"store schema {manifest.get('schema_version')!r} != expected {STORE_SCHEMA_VERSION}"
            )
        roster = load_roster(str(store / "roster.json"))
        known = {p.canonical_name: p for p in roster}

        def person(name: str, role: str) -> ParticipantId:
            p = known.get(name)
            if p is not None and p.role.value == role:
                return p
            return ParticipantId(name, role=Role(role))

        messages = {}
        for rec in _read_jsonl(store / "messages.jsonl"):
            messages[rec["message_id"]] = Message(
                rec["message_id"], rec["list_id"], rec["sender_raw"],
                person(rec["sender"], rec["role"]), rec["date"], rec["subject_raw"],
                rec["in_reply_to"], tuple(rec["references"]), rec["body"],
            )
        discussions: dict[str, list[Discussion]] = {c: [] for c in manifest["corpora"]}
        for rec in _read_jsonl(store / "discussions.jsonl"):
            discussions[rec["corpus"]].append(
                Discussion(
                    rec["discussion_id"], rec["list_id"], rec["subject_key"],
                    tuple(messages[i] for i in rec["messages"]),
                    tuple(tuple(e) for e in rec["reply_edges"]),
                )
            )
        revisions = [
            RevisionRecord(
                rec["revision_id"], Space(rec["space"]), rec["path"],
                person(rec["committer"], rec["committer_role"]), rec["date"], rec["log_message"],
                frozenset(known.get(n) or ParticipantId(n) for n in rec["credited"]),
            )
            for rec in _read_jsonl(store / "revisions.jsonl")
        ]
    except StoreError:
        raise
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise StoreError(f"unreadable store at {store}: {type(exc).__name__}: {exc}") from exc
    return {
        "manifest": manifest,
        "roster": roster,
        "messages": messages,
        "discussions": discussions,
        "revisions": revisions,
    }


def _corpus_job(args: tuple) -> dict:
    name, by_list, revisions, kwargs = args
    return analyze_corpus(name, by_list, revisions, **kwargs)


def run_analyze(cfg: AnalysisConfig) -> Path:
    """Compute the metrics bundle for every configured corpus."""
    store = load_store(cfg.output / STORE_DIR)
    manifest = store["manifest"]
    missing = [c.name for c in cfg.corpora if c.name not in store["discussions"]]
    if missing:
        raise StoreError(f"store has no corpus {missing[0]!r}; re-run ingest")
    if set(manifest.get("lists", {})) != {ls.list_id for ls in cfg.lists}:
        raise StoreError("store lists differ from the config; re-run ingest")

    stage_doc = _load_stage_file(cfg.stage_lexicon)
    lexicon = stage_doc.get("lexicon") or {}
    overrides = stage_doc.get("overrides") or {}
    stages = stage_doc.get("stages")
    all_ids = {d.discussion_id for ds in store["discussions"].values() for d in ds}
    stray = sorted(set(overrides) - all_ids)
    if stray:
        raise InputError(f"stage override for unknown discussion {stray[0]!r}")

    jobs = []
    for corpus in cfg.corpora:
        ds = store["discussions"][corpus.name]
        by_list = {ls.list_id: [d for d in ds if d.list_id == ls.list_id] for ls in cfg.lists}
        ids = {d.discussion_id for d in ds}
        revisions = [r for r in store["revisions"] if corpus.date_from <= r.date <= corpus.date_to]
        kwargs = dict(
            orientation={ls.list_id: ls.orientation for ls in cfg.lists},
            thresholds=cfg.thresholds,
            stage_lexicon=lexicon,
            stage_overrides={k: v for k, v in overrides.items() if k in ids},
            stages=stages,
        )
        jobs.append((corpus.name, by_list, revisions, kwargs))

    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(jobs))) as pool:
            sections = list(pool.map(_corpus_job, jobs))
    else:
        sections = [_corpus_job(j) for j in jobs]

    bundle = {
        "schema_version": BUNDLE_SCHEMA_VERSION,
        "store_schema_version": manifest["schema_version"],
        "lists": {ls.list_id: ls.orientation for ls in cfg.lists},
        "thresholds": {k: getattr(cfg.thresholds, k) for k in sorted(vars(cfg.thresholds))},
        "corpora": {s["name"]: s for s in sections},
        "corpus_order": [c.name for c in cfg.corpora],
    }
    path = cfg.output / BUNDLE_FILE
    write_atomic(path, _dump(bundle))
    return path


def load_bundle(path: Path) -> dict:
    if not path.is_file():
        raise StoreError(f"no metrics bundle at {path} (run analyze first)")
    try:
        bundle = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise StoreError(f"unreadable metrics bundle {path}: {exc}") from exc
    if bundle.get("schema_version") != BUNDLE_SCHEMA_VERSION:
        raise StoreError(f"bundle schema {bundle.get('schema_version')!r} != {BUNDLE_SCHEMA_VERSION}")
    return bundle
