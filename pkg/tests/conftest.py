from __future__ import annotations

import json
from datetime import datetime, timezone
from email.utils import format_datetime
from pathlib import Path

import pytest

from crossbound.ingest import Message, ParticipantId, Role
from crossbound.threads import DAY, Discussion

T0 = int(datetime(2003, 10, 2, tzinfo=timezone.utc).timestamp())


def person(name: str, role: Role = Role.USER, category: str | None = None) -> ParticipantId:
    return ParticipantId(name, role=role, category=category)


def msg(
    mid: str,
    sender: ParticipantId | str,
    day: float = 0,
    *,
    list_id: str = "py-list",
    subject: str = "decimal",
    parent: str | None = None,
    refs: tuple[str, ...] | None = None,
    body: str = "",
) -> Message:
    if isinstance(sender, str):
        sender = person(sender)
    if refs is None:
        refs = (parent,) if parent else ()
    return Message(
        mid, list_id, str(sender), sender, T0 + int(day * DAY), subject, parent, tuple(refs), body
    )


def discussion(did: str, messages: list[Message], subject_key: str = "decimal") -> Discussion:
    ordered = tuple(sorted(messages, key=lambda m: (m.date, m.message_id)))
    return Discussion(f"{ordered[0].list_id}/{did}", ordered[0].list_id, subject_key, ordered)


def disc_with(did: str, senders: list[str], *, list_id: str = "py-list", start_day: float = 0,
              subject_key: str = "decimal", roles: dict | None = None) -> Discussion:
    """A discussion whose i-th message is sent by ``senders[i]`` one hour apart."""
    roles = roles or {}
    ms = [
        msg(f"{did}.{i}", person(s, roles.get(s, Role.USER)), start_day + i / 24, list_id=list_id)
        for i, s in enumerate(senders)
    ]
    return discussion(did, ms, subject_key)


def mbox_entry(
    *,
    sender: str = "Alice Example <alice@example.org>",
    date: datetime | str | None = datetime(2003, 10, 2, 12, 0, tzinfo=timezone.utc),
    subject: str = "Decimal data type",
    message_id: str | None = "m1@example.org",
    in_reply_to: str | None = None,
    references: str | None = None,
    body: str = "hello world\n",
    extra_headers: tuple[str, ...] = (),
) -> bytes:
    lines = ["From alice@example.org Thu Oct  2 12:00:00 2003", f"From: {sender}"]
    if date is not None:
        lines.append("Date: " + (format_datetime(date) if isinstance(date, datetime) else date))
    lines.append(f"Subject: {subject}")
    if message_id is not None:
        lines.append(f"Message-ID: <{message_id}>")
    if in_reply_to:
        lines.append(f"In-Reply-To: <{in_reply_to}>")
    if references:
        lines.append(f"References: {references}")
    lines.extend(extra_headers)
    return ("\n".join(lines) + "\n\n" + body + "\n").encode("utf-8")


@pytest.fixture
def roster_records() -> list[dict]:
    return [
        {"canonical_name": "Guido Leader", "role": "ProjectLeader",
         "aliases": [{"name": "Guido", "email": "g@x.org"}, {"name": "guido leader", "email": ""}]},
        {"canonical_name": "Raymond Admin", "role": "Administrator",
         "aliases": [{"name": "Raymond Admin", "email": "ra@x.org"}, {"name": "radmin", "email": ""}]},
        {"canonical_name": "Facundo Champion", "role": "User", "category": "U-C",
         "aliases": [{"name": "Facundo", "email": "fc@y.org"}, {"name": "Facundo Champion", "email": ""}]},
    ]


@pytest.fixture
def roster_file(tmp_path: Path, roster_records) -> Path:
    path = tmp_path / "roster.json"
    path.write_text(json.dumps(roster_records))
    return path


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
