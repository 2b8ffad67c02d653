"""Quotation blocks and the who-quotes-whom edge list."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .ingest import CorpusSelection, Message, ParticipantId, Role
from .threads import Discussion

__all__ = [
    "QuoteBlock",
    "QuoteEdge",
    "QuoteIndex",
    "UNRESOLVED_PARTICIPANT",
    "extract_quote_blocks",
    "attribute_quote_block",
    "build_quote_graph",
    "normalize_quote_text",
]

UNRESOLVED_PARTICIPANT = ParticipantId("<unresolved>", role=Role.UNKNOWN)

MIN_QUOTE_CHARS = 20
MIN_QUOTE_TOKENS = 3
FUZZY_RATIO = 0.9

_QUOTE_LINE = re.compile(r"^[ \t]*((?:>[ \t]?)+)(.*)$")
_INTRODUCER = re.compile(
    r"^\s*(?:on\b[^\n]*?,\s*)?(?P<who>\S.*?)\s+(?:wrote|writes|said|a écrit)\s*:\s*$",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class QuoteBlock:
    owner: str
    depth: int
    text: str
    line_span: tuple[int, int]
    # name from a preceding "X wrote:" line, if any
    hint: str | None = None
    index: int = 0


@dataclass(frozen=True)
class QuoteEdge:
    quoter: ParticipantId
    quoted: ParticipantId
    quoter_message: str
    quoted_message: str | None
    list_id: str
    depth: int
    block_index: int = 0

    @property
    def resolved(self) -> bool:
        return self.quoted_message is not None

    @property
    def self_quote(self) -> bool:
        return self.resolved and self.quoter == self.quoted

    def as_record(self) -> dict:
        return {
            "quoter": self.quoter.canonical_name,
            "quoted": self.quoted.canonical_name,
            "quoter_message": self.quoter_message,
            "quoted_message": self.quoted_message or "",
            "list": self.list_id,
            "depth": self.depth,
            "resolved": self.resolved,
        }


def normalize_quote_text(text: str) -> str:
    return " ".join(text.split()).lower()


@dataclass
class _Run:
    depth: int
    first: int
    last: int
    texts: list
    hint: str | None

    @property
    def text(self) -> str:
        return normalize_quote_text(" ".join(self.texts))


def _scan(body: str) -> tuple[list[_Run], str]:
    """Split *body* into quoted runs and the normalized unquoted text."""
    runs: list[_Run] = []
    own: list[str] = []
    hints: dict[int, str] = {}
    current: _Run | None = None
    for lineno, line in enumerate(body.split("\n")):
        m = _QUOTE_LINE.match(line)
        depth, text = (m.group(1).count(">"), m.group(2)) if m else (0, line)
        intro = _INTRODUCER.match(text)
        if intro:
            current = None
            hints[depth + 1] = intro.group("who").strip()
            continue
        if text.strip():
            for d in [d for d in hints if d > depth]:
                del hints[d]
        if depth == 0:
            current = None
            if text.strip():
                own.append(text)
            continue
        if current is not None and current.depth == depth:
            current.texts.append(text)
            current.last = lineno
            continue
        current = _Run(depth, lineno, lineno, [text], hints.pop(depth, None))
        runs.append(current)
    return runs, normalize_quote_text(" ".join(own))


def extract_quote_blocks(
    body: str,
    owner: str = "",
    *,
    min_chars: int = MIN_QUOTE_CHARS,
    min_tokens: int = MIN_QUOTE_TOKENS,
) -> list[QuoteBlock]:
    """Return the ``>``-quoted blocks of *body*.

    Consecutive quoted lines of equal depth form one block.  A block is
    dropped only when its normalized text is short on both counts: fewer
    than *min_chars* characters and fewer than *min_tokens* tokens.
    """
    blocks = []
    for run in _scan(body)[0]:
        text = run.text
        if not text or (len(text) < min_chars and len(text.split()) < min_tokens):
            continue
        blocks.append(
            QuoteBlock(owner, run.depth, text, (run.first, run.last), run.hint, len(blocks))
        )
    return blocks


def _fuzzy_contains(needle: list[str], hay: list[str], hay_counts: Counter, ratio: float) -> bool:
    """True if some window of *hay* holds at least *ratio* of *needle*'s tokens."""
    n = len(needle)
    if n == 0 or not hay:
        return False
    need = Counter(needle)
    target = math.ceil(ratio * n)
    if sum(min(c, hay_counts[t]) for t, c in need.items()) < target:
        return False
    width = min(len(hay), math.ceil(n / ratio))
    window: Counter = Counter()
    matched = 0
    for i, tok in enumerate(hay):
        if window[tok] < need.get(tok, 0):
            matched += 1
        window[tok] += 1
        if i >= width:
            old = hay[i - width]
            window[old] -= 1
            if window[old] < need.get(old, 0):
                matched -= 1
        if matched >= target:
            return True
    return False


class _Parsed:
    __slots__ = ("runs", "own", "own_tokens", "own_counts")

    def __init__(self, body: str):
        self.runs, self.own = _scan(body)
        self.own_tokens = self.own.split()
        self.own_counts = Counter(self.own_tokens)


class QuoteIndex:
    """Read-only view of a corpus used for quote attribution."""

    def __init__(
        self,
        messages: Iterable[Message],
        discussions: Iterable[Discussion] = (),
        *,
        fuzzy: bool = True,
        fuzzy_ratio: float = FUZZY_RATIO,
    ):
        self.by_id = {m.message_id: m for m in messages}
        self.ordered = sorted(self.by_id.values(), key=lambda m: (m.date, m.message_id))
        self.discussion_of: dict[str, Discussion] = {}
        for d in discussions:
            for m in d.messages:
                self.discussion_of[m.message_id] = d
        self.fuzzy = fuzzy
        self.fuzzy_ratio = fuzzy_ratio
        self._parsed: dict[str, _Parsed] = {}
        self._memo: dict[tuple[str, int, str], str | None] = {}

    def parsed(self, mid: str) -> _Parsed:
        p = self._parsed.get(mid)
        if p is None:
            p = self._parsed[mid] = _Parsed(self.by_id[mid].body)
        return p

    def candidates(self, owner: Message, discussion: Discussion | None) -> list[Message]:
        """Earlier messages in search order: reply ancestors (nearest
        first), then the rest of the discussion, then the corpus, each
        newest first."""
        seen = {owner.message_id}
        out: list[Message] = []

        def add(m: Message | None) -> None:
            if m is not None and m.message_id not in seen and m.date < owner.date:
                seen.add(m.message_id)
                out.append(m)

        if discussion is not None:
            parent = dict(discussion.reply_edges)
            node = parent.get(owner.message_id)
            while node is not None and node not in seen:
                add(self.by_id.get(node))
                seen.add(node)
                node = parent.get(node)
            for m in reversed(discussion.messages):
                add(m)
        for m in reversed(self.ordered):
            if m.date < owner.date:
                add(m)
        return out

    def attribute(self, owner_id: str, depth: int, text: str, hint: str | None,
                  discussion: Discussion | None) -> str | None:
        key = (owner_id, depth, text)
        if key in self._memo:
            return self._memo[key]
        self._memo[key] = None  # guards against pathological recursion
        owner = self.by_id[owner_id]
        cands = self.candidates(owner, discussion)
        found = None
        if hint:
            hinted = [c for c in cands if _names_match(hint, c.sender)]
            found = self._search(depth, text, hinted) if hinted else None
        if found is None:
            found = self._search(depth, text, cands)
        self._memo[key] = found
        return found

    def _search(self, depth: int, text: str, cands: Sequence[Message]) -> str | None:
        for c in cands:
            if text in self.parsed(c.message_id).own:
                return c.message_id
        tokens = text.split()
        if self.fuzzy:
            for c in cands:
                p = self.parsed(c.message_id)
                if _fuzzy_contains(tokens, p.own_tokens, p.own_counts, self.fuzzy_ratio):
                    return c.message_id
        if depth > 1:
            # the text may survive only as an intermediate quote: follow it
            for c in cands:
                for run in self.parsed(c.message_id).runs:
                    if run.depth == depth - 1 and text in run.text:
                        src = self.attribute(
                            c.message_id, run.depth, run.text, run.hint,
                            self.discussion_of.get(c.message_id),
                        )
                        if src is not None:
                            return src
        return None


def _names_match(hint: str, who: ParticipantId) -> bool:
    h = " ".join(hint.split()).casefold()
    names = {who.canonical_name} | {n for n, _ in who.aliases} | {e for _, e in who.aliases}
    for name in names:
        name = " ".join(name.split()).casefold()
        if len(name) < 2:
            continue
        if name in h or (len(h) >= 3 and h in name):
            return True
    return False


def attribute_quote_block(
    block: QuoteBlock,
    discussion: Discussion | None,
    corpus: QuoteIndex | Iterable[Message],
) -> str | None:
    """Find the message *block* was copied from; ``None`` when unresolved.

    *corpus* is a :class:`QuoteIndex` or the corpus messages themselves.
    """
    index = corpus if isinstance(corpus, QuoteIndex) else QuoteIndex(corpus, [discussion] if discussion else [])
    return index.attribute(block.owner, block.depth, block.text, block.hint, discussion)


def build_quote_graph(
    corpus: CorpusSelection | None,
    discussions: Sequence[Discussion],
    *,
    min_chars: int = MIN_QUOTE_CHARS,
    min_tokens: int = MIN_QUOTE_TOKENS,
    fuzzy: bool = True,
    fuzzy_ratio: float = FUZZY_RATIO,
) -> list[QuoteEdge]:
    """One edge per retained quote block across *discussions*.

    Unresolved blocks produce edges whose ``quoted`` is
    :data:`UNRESOLVED_PARTICIPANT` and ``quoted_message`` is ``None``.
    """
    messages = [m for d in discussions for m in d.messages]
    if corpus is not None:
        messages = [m for m in messages if m.message_id in corpus.messages]
    index = QuoteIndex(messages, discussions, fuzzy=fuzzy, fuzzy_ratio=fuzzy_ratio)
    edges = []
    for d in discussions:
        for msg in d.messages:
            if msg.message_id not in index.by_id:
                continue
            for block in extract_quote_blocks(
                msg.body, msg.message_id, min_chars=min_chars, min_tokens=min_tokens
            ):
                src = index.attribute(msg.message_id, block.depth, block.text, block.hint, d)
                quoted = index.by_id[src].sender if src else UNRESOLVED_PARTICIPANT
                edges.append(
                    QuoteEdge(msg.sender, quoted, msg.message_id, src, msg.list_id,
                              block.depth, block.index)
                )
    return edges
