"""Archive ingestion: mbox parsing, identity resolution, corpus selection
and revision-log parsing.

Everything here is a pure function of its input bytes plus an optional
roster, so archives can be parsed independently and in any order.
"""

from __future__ import annotations

import email
import email.header
import email.policy
import email.utils
import json
import logging
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import IO, Iterable, Sequence

logger = logging.getLogger(__name__)

__all__ = [
    "Role",
    "Space",
    "ParticipantId",
    "Message",
    "RevisionRecord",
    "CorpusSelection",
    "Diagnostic",
    "IngestError",
    "Roster",
    "load_roster",
    "parse_mbox",
    "resolve_identity",
    "select_corpus",
    "normalize_subject",
    "parse_revision_log",
    "DEFAULT_CREDIT_PATTERNS",
]


class IngestError(Exception):
    """Raised when an input stream cannot be read at all."""


class Role(str, Enum):
    PROJECT_LEADER = "ProjectLeader"
    ADMINISTRATOR = "Administrator"
    DEVELOPER = "Developer"
    USER = "User"
    UNKNOWN = "Unknown"


class Space(str, Enum):
    DOCUMENTATION = "Documentation"
    IMPLEMENTATION = "Implementation"


@dataclass(frozen=True)
class ParticipantId:
    """A canonical community member.

    Equality and hashing use ``canonical_name`` and ``role`` only, so the
    same sender resolved twice compares equal even when the alias sets
    were collected from different headers.
    """

    canonical_name: str
    aliases: frozenset[tuple[str, str]] = field(default=frozenset(), compare=False)
    role: Role = Role.UNKNOWN
    # set when the From header could not be parsed at all
    unparsed: bool = field(default=False, compare=False)
    # roster-level override of the attraction category, e.g. "U-C"
    category: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.canonical_name:
            raise ValueError("canonical_name must be non-empty")

    def __str__(self) -> str:
        return self.canonical_name


@dataclass(frozen=True)
class Message:
    message_id: str
    list_id: str
    sender_raw: str
    sender: ParticipantId
    date: int
    subject_raw: str
    in_reply_to: str | None
    references: tuple[str, ...]
    body: str


@dataclass(frozen=True)
class RevisionRecord:
    revision_id: str
    space: Space
    path: str
    committer: ParticipantId
    date: int
    log_message: str
    credited: frozenset[ParticipantId] = frozenset()


@dataclass(frozen=True)
class CorpusSelection:
    name: str
    keywords: frozenset[str]
    date_from: int
    date_to: int
    lists: frozenset[str]
    messages: frozenset[str]
    # subset of ``messages`` pulled in as reply ancestors
    mother_thread: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Diagnostic:
    source: str
    reason: str
    offset: int | None = None
    message_id: str | None = None

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "offset": self.offset,
            "message_id": self.message_id,
            "reason": self.reason,
        }


def _fold(text: str) -> str:
    return " ".join(text.split()).casefold()


class Roster(Sequence[ParticipantId]):
    """Known participants, indexed by alias email and alias name."""

    def __init__(self, entries: Iterable[ParticipantId] = ()):
        self._entries: list[ParticipantId] = list(entries)
        self._by_email: dict[str, ParticipantId] = {}
        self._by_name: dict[str, ParticipantId] = {}
        seen: dict[tuple[str, str], ParticipantId] = {}
        names: set[str] = set()
        for entry in self._entries:
            if entry.canonical_name in names:
                raise ValueError(f"duplicate roster entry {entry.canonical_name!r}")
            names.add(entry.canonical_name)
            for alias in entry.aliases:
                key = (_fold(alias[0]), alias[1].strip().lower())
                other = seen.setdefault(key, entry)
                if other is not entry:
                    raise ValueError(
                        f"alias {alias!r} shared by {other.canonical_name!r} "
                        f"and {entry.canonical_name!r}"
                    )
            for name, addr in entry.aliases:
                if addr.strip():
                    self._by_email.setdefault(addr.strip().lower(), entry)
                if name.strip():
                    self._by_name.setdefault(_fold(name), entry)
            self._by_name.setdefault(_fold(entry.canonical_name), entry)

    def __getitem__(self, index):  # type: ignore[override]
        return self._entries[index]

    def __len__(self) -> int:
        return len(self._entries)

    def by_email(self, address: str) -> ParticipantId | None:
        return self._by_email.get(address.strip().lower())

    def by_name(self, name: str) -> ParticipantId | None:
        return self._by_name.get(_fold(name))

    def names(self, entry: ParticipantId) -> list[str]:
        """All display names under which *entry* may be referred to."""
        out = {entry.canonical_name}
        out.update(name for name, _ in entry.aliases if name.strip())
        return sorted(out, key=lambda s: (-len(s), s))


def load_roster(source: str | IO[str] | list) -> Roster:
    """Build a :class:`Roster` from a path, open file or already-decoded list.

    Each entry is ``{canonical_name, role, aliases: [{name, email}]}``
    with an optional ``category`` override.
    """
    if isinstance(source, list):
        data = source
    elif isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    else:
        data = json.load(source)
    entries = []
    for item in data:
        aliases = frozenset(
            (a.get("name") or "", a.get("email") or "") for a in item.get("aliases", [])
        )
        entries.append(
            ParticipantId(
                canonical_name=item["canonical_name"],
                aliases=aliases,
                role=Role(item.get("role", "Unknown")),
                category=item.get("category"),
            )
        )
    return Roster(entries)


def resolve_identity(sender_raw: str, roster: Roster | Iterable[ParticipantId] = ()) -> ParticipantId:
    """Map a raw From header onto a roster entry.

    An email match beats a (case-insensitive) name match; with neither, a
    fresh ``Unknown`` participant named after the parsed display name is
    returned.
    """
    if not isinstance(roster, Roster):
        roster = Roster(roster)
    name, addr = email.utils.parseaddr(sender_raw or "")
    name = " ".join(name.split())
    addr = addr.strip()
    if not name and not addr:
        raw = " ".join((sender_raw or "").split()) or "<empty sender>"
        return ParticipantId(raw, frozenset({(raw, "")}), Role.UNKNOWN, unparsed=True)

    if addr:
        hit = roster.by_email(addr)
        if hit is not None:
            return hit
    if name:
        hit = roster.by_name(name)
        if hit is not None:
            return hit
    elif addr and "@" not in addr:
        # bare user names such as revision-log committers
        hit = roster.by_name(addr)
        if hit is not None:
            return hit
    canonical = name or addr.lower()
    return ParticipantId(canonical, frozenset({(name, addr.lower())}), Role.UNKNOWN)


# -- mbox --------------------------------------------------------------------

_FROM_LINE = re.compile(rb"^From \S*")
_MSGID = re.compile(r"<([^<>\s]+)>")


def _split_mbox(data: bytes) -> list[tuple[int, bytes]]:
    """Split raw mbox bytes into ``(offset, message bytes)`` entries.

    A separator is a line starting with ``"From "`` at the start of the
    file or after an empty line (RFC 4155).  mboxrd ``>From`` escapes are
    undone.
    """
    entries: list[tuple[int, bytes]] = []
    start: int | None = None
    pos = 0
    prev_blank = True
    for line in data.splitlines(keepends=True):
        if prev_blank and _FROM_LINE.match(line):
            if start is not None:
                entries.append((start, data[start:pos]))
            start = pos
        prev_blank = line in (b"\n", b"\r\n")
        pos += len(line)
    if start is not None:
        entries.append((start, data[start:pos]))
    elif data.strip():
        # no separator at all: treat the whole stream as one message
        entries.append((0, data))
    out = []
    for offset, chunk in entries:
        lines = chunk.splitlines(keepends=True)
        if lines and _FROM_LINE.match(lines[0]):
            lines = lines[1:]
        lines = [re.sub(rb"^>(>*From )", rb"\1", ln) for ln in lines]
        out.append((offset, b"".join(lines)))
    return out


def _decode_part(part: email.message.Message) -> str:
    payload = part.get_payload(decode=True)
    if payload is None:
        payload = part.get_payload()
        return payload if isinstance(payload, str) else ""
    charset = part.get_content_charset() or "utf-8"
    try:
        return payload.decode(charset, errors="replace")
    except LookupError:
        return payload.decode("utf-8", errors="replace")


def _body_text(msg: email.message.Message) -> str:
    if not msg.is_multipart():
        if msg.get_content_maintype() != "text":
            return ""
        text = _decode_part(msg)
    else:
        parts = []
        for part in msg.walk():
            if part.is_multipart():
                continue
            if part.get_content_type() != "text/plain":
                continue
            if part.get_content_disposition() == "attachment":
                continue
            parts.append(_decode_part(part))
        text = "\n".join(parts)
    return text.replace("\r\n", "\n").replace("\r", "\n")


def _header(msg: email.message.Message, name: str) -> str:
    value = msg.get(name)
    if value is None:
        return ""
    parts = []
    for chunk, charset in email.header.decode_header(str(value)):
        if isinstance(chunk, bytes):
            try:
                parts.append(chunk.decode(charset or "ascii", errors="replace"))
            except LookupError:
                parts.append(chunk.decode("latin-1"))
        else:
            parts.append(chunk)
    return " ".join("".join(parts).split())


def _parse_date(value: str) -> int:
    dt = email.utils.parsedate_to_datetime(value)
    if dt is None:
        raise ValueError(f"unparseable date {value!r}")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def synthetic_message_id(list_id: str, offset: int) -> str:
    return f"synthetic.{offset}@{list_id}"


def parse_mbox(
    stream: IO[bytes] | bytes,
    list_id: str,
    roster: Roster | Iterable[ParticipantId] = (),
    diagnostics: list[Diagnostic] | None = None,
) -> list[Message]:
    """Parse an mbox archive into :class:`Message` objects.

    Messages without a usable ``Date`` header are skipped; a
    :class:`Diagnostic` is appended to *diagnostics* for each skip.
    Messages without a ``Message-ID`` get a synthetic id built from
    *list_id* and their byte offset in the stream.
    """
    if not list_id:
        raise ValueError("list_id must be non-empty")
    if isinstance(stream, (bytes, bytearray)):
        data = bytes(stream)
    else:
        try:
            data = stream.read()
        except (OSError, ValueError) as exc:
            raise IngestError(f"cannot read archive for {list_id}: {exc}") from exc
        if not isinstance(data, bytes):
            raise IngestError(f"archive for {list_id} is not a byte stream")
    if not isinstance(roster, Roster):
        roster = Roster(roster)

    def skip(offset: int, reason: str, mid: str | None = None) -> None:
        logger.warning("%s@%d: skipped message: %s", list_id, offset, reason)
        if diagnostics is not None:
            diagnostics.append(Diagnostic(list_id, reason, offset, mid))

    messages: list[Message] = []
    for offset, raw in _split_mbox(data):
        try:
            msg = email.message_from_bytes(raw, policy=email.policy.compat32)
            if not msg.keys():
                skip(offset, "no header block")
                continue
            mid_match = _MSGID.search(_header(msg, "Message-ID"))
            mid = mid_match.group(1) if mid_match else synthetic_message_id(list_id, offset)
            date_header = _header(msg, "Date")
            if not date_header:
                skip(offset, "missing Date header", mid)
                continue
            try:
                date = _parse_date(date_header)
            except (TypeError, ValueError, IndexError, OverflowError):
                skip(offset, f"invalid Date header {date_header!r}", mid)
                continue
            reply = _MSGID.search(_header(msg, "In-Reply-To"))
            refs: list[str] = []
            for ref in _MSGID.findall(_header(msg, "References")):
                if ref not in refs:
                    refs.append(ref)
            sender_raw = _header(msg, "From")
            messages.append(
                Message(
                    message_id=mid,
                    list_id=list_id,
                    sender_raw=sender_raw,
                    sender=resolve_identity(sender_raw, roster),
                    date=date,
                    subject_raw=_header(msg, "Subject"),
                    in_reply_to=reply.group(1) if reply else None,
                    references=tuple(refs),
                    body=_body_text(msg),
                )
            )
        except Exception as exc:  # one bad message never aborts the archive
            skip(offset, f"{type(exc).__name__}: {exc}")
    return messages


# -- corpus selection ---------------------------------------------------------

_SUBJECT_MARKER = re.compile(
    r"^\s*(?:(?:re|fwd?|aw|sv|antw|wg|tr)\s*(?:\[\d+\])?\s*:|\[[^\]]*\])\s*",
    re.IGNORECASE,
)


def normalize_subject(subject_raw: str) -> str:
    """Canonical subject key: reply/forward markers and list tags removed,
    whitespace collapsed, lowercased."""
    text = " ".join((subject_raw or "").lower().split())
    while True:
        stripped = _SUBJECT_MARKER.sub("", text, count=1)
        if stripped == text:
            break
        text = stripped
    return " ".join(text.split())


def _keyword_matcher(keywords: Iterable[str], whole_word: bool):
    kws = sorted(keywords)
    if whole_word:
        pattern = re.compile(r"\b(?:" + "|".join(re.escape(k) for k in kws) + r")\b")
        return lambda subject: pattern.search(subject) is not None
    return lambda subject: any(k in subject for k in kws)


def select_corpus(
    messages: Sequence[Message],
    keywords: Iterable[str],
    date_from: int,
    date_to: int,
    *,
    name: str = "",
    whole_word: bool = False,
) -> CorpusSelection:
    """Select messages whose normalized subject mentions a keyword and whose
    date lies in ``[date_from, date_to]``, then pull in every reply
    ancestor (the mother thread) that exists in *messages*."""
    kws = frozenset(k.strip().lower() for k in keywords if k.strip())
    if not kws:
        raise ValueError("at least one keyword is required")
    if date_from > date_to:
        raise ValueError("date_from is after date_to")
    matches = _keyword_matcher(kws, whole_word)

    by_id = {m.message_id: m for m in messages}
    selected = {
        m.message_id
        for m in messages
        if date_from <= m.date <= date_to and matches(normalize_subject(m.subject_raw))
    }
    pulled: set[str] = set()
    stack = list(selected)
    while stack:
        msg = by_id[stack.pop()]
        parents = list(msg.references)
        if msg.in_reply_to:
            parents.append(msg.in_reply_to)
        for pid in parents:
            parent = by_id.get(pid)
            if parent is None or parent.list_id != msg.list_id:
                continue
            if pid not in selected and pid not in pulled:
                pulled.add(pid)
                stack.append(pid)
    chosen = selected | pulled
    return CorpusSelection(
        name=name,
        keywords=kws,
        date_from=date_from,
        date_to=date_to,
        lists=frozenset(by_id[i].list_id for i in chosen),
        messages=frozenset(chosen),
        mother_thread=frozenset(pulled),
    )


# -- revision logs -----------------------------------------------------------

DEFAULT_CREDIT_PATTERNS = (
    "thanks to {name}",
    "{name}'s",
    "on behalf of {name}",
    "patch by {name}",
    "contributed by {name}",
    "from {name}",
)


def _parse_iso(value: str) -> int:
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _credit_regexes(patterns: Sequence[str], roster: Roster) -> list[tuple[re.Pattern, ParticipantId]]:
    compiled = []
    for entry in roster:
        for name in roster.names(entry):
            for template in patterns:
                head, _, tail = template.partition("{name}")
                regex = (
                    r"(?<!\w)"
                    + r"\s+".join(re.escape(w) for w in head.split())
                    + (r"\s+" if head.strip() else "")
                    + r"\s+".join(re.escape(w) for w in name.split())
                    + re.escape(tail)
                    + (r"(?!\w)" if not tail or tail[-1:].isalnum() else "")
                )
                compiled.append((re.compile(regex, re.IGNORECASE), entry))
    return compiled


def parse_revision_log(
    stream: IO[bytes] | IO[str] | bytes | str,
    space: Space | str,
    credit_patterns: Sequence[str] = DEFAULT_CREDIT_PATTERNS,
    roster: Roster | Iterable[ParticipantId] = (),
    diagnostics: list[Diagnostic] | None = None,
) -> list[RevisionRecord]:
    """Parse a newline-delimited JSON revision log.

    Each line is ``{revision, space, path, author, date, message}``; a
    record's own ``space`` wins over the *space* argument.  Roster members
    named in the log message through one of *credit_patterns* are
    credited, never the committer.
    """
    if not isinstance(roster, Roster):
        roster = Roster(roster)
    default_space = Space(space)
    if isinstance(stream, (bytes, str)):
        data = stream
    else:
        try:
            data = stream.read()
        except (OSError, ValueError) as exc:
            raise IngestError(f"cannot read revision log: {exc}") from exc
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    regexes = _credit_regexes(credit_patterns, roster)

    records = []
    for lineno, line in enumerate(data.splitlines(), 1):
        if not line.strip():
            continue
        try:
            item = json.loads(line)
            committer = resolve_identity(str(item["author"]), roster)
            log_message = str(item.get("message", ""))
            credited = {
                entry for regex, entry in regexes if regex.search(log_message)
            }
            credited.discard(committer)
            records.append(
                RevisionRecord(
                    revision_id=str(item["revision"]),
                    space=Space(item["space"]) if item.get("space") else default_space,
                    path=str(item.get("path", "")),
                    committer=committer,
                    date=_parse_iso(str(item["date"])),
                    log_message=log_message,
                    credited=frozenset(credited),
                )
            )
        except (ValueError, KeyError, TypeError) as exc:
            reason = f"line {lineno}: {type(exc).__name__}: {exc}"
            logger.warning("revision log: skipped entry: %s", reason)
            if diagnostics is not None:
                diagnostics.append(Diagnostic("revision-log", reason, lineno))
    return records
