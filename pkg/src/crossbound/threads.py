"""Discussion (thread) reconstruction.

Reply headers are authoritative.  Messages whose parent cannot be found
fall back to joining an earlier discussion in the same list that shares
their normalized subject and lies within ``fallback_days`` of them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .ingest import CorpusSelection, Diagnostic, Message, ParticipantId, normalize_subject

logger = logging.getLogger(__name__)

__all__ = [
    "Discussion",
    "normalize_subject",
    "build_discussions",
    "discussion_interval",
    "discussion_index_record",
    "DAY",
]

DAY = 86400


@dataclass(frozen=True)
class Discussion:
    discussion_id: str
    list_id: str
    subject_key: str
    messages: tuple[Message, ...]
    reply_edges: tuple[tuple[str, str], ...] = ()

    @property
    def message_ids(self) -> tuple[str, ...]:
        return tuple(m.message_id for m in self.messages)

    @property
    def participants(self) -> frozenset[ParticipantId]:
        return frozenset(m.sender for m in self.messages)

    @property
    def start(self) -> int:
        return self.messages[0].date

    @property
    def end(self) -> int:
        return self.messages[-1].date

    def __len__(self) -> int:
        return len(self.messages)


def discussion_interval(d: Discussion) -> tuple[int, int]:
    dates = [m.date for m in d.messages]
    return min(dates), max(dates)


def _order(m: Message) -> tuple[int, str]:
    return (m.date, m.message_id)


def _find_parent(msg: Message, by_id: dict[str, Message]) -> Message | None:
    # In-Reply-To first, then the nearest (last) resolvable reference
    candidates = [msg.in_reply_to] if msg.in_reply_to else []
    candidates += reversed(msg.references)
    for pid in candidates:
        parent = by_id.get(pid)
        if parent is not None and parent.message_id != msg.message_id and parent.list_id == msg.list_id:
            return parent
    return None


def _break_cycles(
    parent: dict[str, str], by_id: dict[str, Message], diagnostics: list[Diagnostic] | None
) -> None:
    state: dict[str, int] = {}
    for start in sorted(parent, key=lambda i: _order(by_id[i])):
        path: list[str] = []
        node: str | None = start
        while node is not None and node not in state:
            state[node] = 1
            path.append(node)
            node = parent.get(node)
        if node is not None and state.get(node) == 1:
            cycle = path[path.index(node):]
            oldest = min(cycle, key=lambda i: _order(by_id[i]))
            reason = f"reply cycle through {len(cycle)} messages broken at {oldest}"
            logger.warning(reason)
            if diagnostics is not None:
                diagnostics.append(Diagnostic(by_id[oldest].list_id, reason, message_id=oldest))
            del parent[oldest]
        for n in path:
            state[n] = 2


def _gap(a: tuple[int, int], b: tuple[int, int]) -> int:
    return max(0, b[0] - a[1], a[0] - b[1])


def build_discussions(
    selection: CorpusSelection | Iterable[str],
    all_messages: Sequence[Message],
    *,
    fallback_days: float = 14,
    diagnostics: list[Diagnostic] | None = None,
) -> list[Discussion]:
    """Group the selected messages into discussions.

    Returns discussions sorted by ``(list_id, start, discussion_id)``.
    The discussion id is ``"<list_id>/<root message id>"``.
    """
    ids = selection.messages if isinstance(selection, CorpusSelection) else frozenset(selection)
    by_id = {m.message_id: m for m in all_messages if m.message_id in ids}
    missing = set(ids) - by_id.keys()
    if missing:
        raise ValueError(f"{len(missing)} selected message ids not found, e.g. {min(missing)!r}")

    parent: dict[str, str] = {}
    for msg in by_id.values():
        p = _find_parent(msg, by_id)
        if p is None:
            continue
        if p.date > msg.date:
            reason = f"reply {msg.message_id} predates its parent {p.message_id}; link ignored"
            logger.info(reason)
            if diagnostics is not None:
                diagnostics.append(Diagnostic(msg.list_id, reason, message_id=msg.message_id))
            continue
        parent[msg.message_id] = p.message_id
    _break_cycles(parent, by_id, diagnostics)

    def root_of(mid: str) -> str:
        while mid in parent:
            mid = parent[mid]
        return mid

    trees: dict[str, list[Message]] = {}
    for mid in by_id:
        trees.setdefault(root_of(mid), []).append(by_id[mid])

    window = fallback_days * DAY
    # groups per list: [root id, subject key, members, (start, end)]
    groups: dict[str, list[list]] = {}
    for root in sorted(trees, key=lambda r: _order(by_id[r])):
        members = trees[root]
        root_msg = by_id[root]
        key = normalize_subject(root_msg.subject_raw)
        span = (min(m.date for m in members), max(m.date for m in members))
        lane = groups.setdefault(root_msg.list_id, [])
        target = None
        if key:
            best = None
            for g in lane:
                if g[1] != key:
                    continue
                gap = _gap(g[3], span)
                if gap <= window and (best is None or (gap, g[3][0]) < best[0]):
                    best = ((gap, g[3][0]), g)
            target = best[1] if best else None
        if target is None:
            lane.append([root, key, list(members), span])
        else:
            target[2].extend(members)
            target[3] = (min(target[3][0], span[0]), max(target[3][1], span[1]))

    out = []
    for list_id in sorted(groups):
        for root, key, members, _ in groups[list_id]:
            members.sort(key=_order)
            member_ids = {m.message_id for m in members}
            edges = tuple(
                (m.message_id, parent[m.message_id])
                for m in members
                if m.message_id in parent and parent[m.message_id] in member_ids
            )
            out.append(
                Discussion(
                    discussion_id=f"{list_id}/{root}",
                    list_id=list_id,
                    subject_key=key,
                    messages=tuple(members),
                    reply_edges=edges,
                )
            )
    out.sort(key=lambda d: (d.list_id, d.start, d.discussion_id))
    return out


def discussion_index_record(d: Discussion) -> dict:
    return {
        "discussion_id": d.discussion_id,
        "list_id": d.list_id,
        "subject_key": d.subject_key,
        "start": d.start,
        "end": d.end,
        "n_messages": len(d.messages),
        "participants": sorted(p.canonical_name for p in d.participants),
    }
