"""Synthetic two-list archives with planted ground truth.

Randomness comes from :class:`random.Random` seeded with the integer
seed, and only its ``random()`` method is used (every draw below is
derived from it), so a seed reproduces byte-identical archives on any
platform and Python version.

Quote noise model: with probability ``quote_noise`` a two-line excerpt
has its first line cut inside its last or second-to-last word, the way
mail clients mangle re-wrapped quotes.
"""

from __future__ import annotations

import base64
import json
import math
import random
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from email.utils import format_datetime
from pathlib import Path
from typing import Any, Sequence

import yaml

__all__ = ["SynthParams", "GroundTruth", "SynthCorpus", "generate_corpus", "write_corpus"]

HOUR = 3600
DAY = 86400

_CONSONANTS = "bdgklmnprstvz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class SynthParams:
    seed: int = 0
    n_participants_per_role: dict = field(
        default_factory=lambda: {
            "ProjectLeader": 1,
            "Administrator": 3,
            "Developer": 8,
            "User": 30,
            "Unknown": 6,
        }
    )
    n_discussions_per_list: int = 20
    parallel_pair_count: int = 3
    planted_cross_count: int = 3
    # common participants beyond the planted cross-participants
    extra_common_count: int = 4
    quote_rate: float = 0.6
    quote_noise: float = 0.0
    nested_quote_rate: float = 0.3
    second_quote_rate: float = 0.25
    foreign_quote_rate: float = 0.05
    hint_rate: float = 0.3
    message_rate: float = 5.0
    headerless_rate: float = 0.05
    mother_thread_rate: float = 0.1
    malformed_rate: float = 0.0
    revisions_per_space: dict = field(
        default_factory=lambda: {"Documentation": 9, "Implementation": 44}
    )
    credit_rate: float = 0.2
    user_list: str = "py-list"
    dev_list: str = "py-dev"
    keyword: str = "decimal"
    start: str = "2003-10-02"
    span_days: int = 900

    def validate(self) -> None:
        for name in (
            "quote_rate", "quote_noise", "nested_quote_rate", "second_quote_rate",
            "foreign_quote_rate", "hint_rate", "headerless_rate", "mother_thread_rate",
            "malformed_rate", "credit_rate",
        ):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} is not a probability")
        roles = self.n_participants_per_role
        if any(n < 0 for n in roles.values()):
            raise ValueError("participant counts must be non-negative")
        if roles.get("ProjectLeader", 0) > 1:
            raise ValueError("at most one project leader")
        eligible = sum(roles.get(r, 0) for r in ("Administrator", "Developer", "User"))
        if self.planted_cross_count + self.extra_common_count > eligible:
            raise ValueError(
                f"cross ({self.planted_cross_count}) + extra common ({self.extra_common_count}) "
                f"exceed the {eligible} roster participants who may post on both lists"
            )
        if self.n_discussions_per_list < 1:
            raise ValueError("need at least one discussion per list")
        if self.parallel_pair_count > self.n_discussions_per_list:
            raise ValueError("more parallel pairs than discussions per list")
        if self.planted_cross_count and not self.parallel_pair_count:
            raise ValueError("cross-participants need at least one parallel pair")
        if self.extra_common_count and self.n_discussions_per_list - self.parallel_pair_count < 1:
            raise ValueError("extra common participants need an unpaired discussion per list")
        if self.message_rate < 1:
            raise ValueError("message_rate must be >= 1")
        if self.user_list == self.dev_list:
            raise ValueError("list ids must differ")

    @classmethod
    def load(cls, path: str | Path, **overrides: Any) -> "SynthParams":
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh) or {}
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown synthesis parameters: {sorted(unknown)}")
        doc.update(overrides)
        return cls(**doc)


@dataclass
class GroundTruth:
    params: dict
    lists: dict
    roster: list
    posters: dict
    discussions: list
    pairs: list
    cross: list
    quotes: list
    revisions: list
    malformed: int = 0
    mother_thread: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "GroundTruth":
        return cls(**{f.name: doc[f.name] for f in fields(cls) if f.name in doc})


@dataclass
class SynthCorpus:
    mboxes: dict  # list_id -> bytes
    revision_logs: dict  # space -> bytes
    ground_truth: GroundTruth


class _Rng:
    """Draws derived solely from ``random.Random.random()``."""

    def __init__(self, seed: int):
        self._r = random.Random(seed)

    def random(self) -> float:
        return self._r.random()

    def below(self, n: int) -> int:
        return min(int(self._r.random() * n), n - 1)

    def between(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def chance(self, p: float) -> bool:
        return self._r.random() < p

    def choice(self, seq: Sequence):
        return seq[self.below(len(seq))]

    def weighted(self, seq: Sequence, weights: Sequence[float]):
        x = self._r.random() * sum(weights)
        acc = 0.0
        for item, w in zip(seq, weights):
            acc += w
            if x < acc:
                return item
        return seq[-1]

    def sample(self, seq: Sequence, k: int) -> list:
        pool = list(seq)
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def poisson(self, lam: float) -> int:
        limit, k, p = math.exp(-lam), 0, 1.0
        while True:
            p *= self._r.random()
            if p <= limit:
                return k
            k += 1


def _word(rng: _Rng, syllables: int) -> str:
    return "".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(syllables))


@dataclass
class _Person:
    name: str
    role: str
    username: str
    emails: list
    home: str  # "user" | "dev" | "both"
    weight: float
    in_roster: bool = True
    category: str | None = None


@dataclass
class _Msg:
    message_id: str
    list_id: str
    sender: _Person
    date: int = 0
    parent: "_Msg | None" = None
    subject: str = ""
    own_lines: list = field(default_factory=list)
    body_lines: list = field(default_factory=list)
    # (depth, lines, source message) in body order
    blocks: list = field(default_factory=list)
    headerless: bool = False


class _Builder:
    def __init__(self, params: SynthParams):
        params.validate()
        self.p = params
        self.rng = _Rng(params.seed)
        self.start = int(datetime.fromisoformat(params.start).replace(tzinfo=timezone.utc).timestamp())
        self.nonce = 0
        self.msg_counter = 0
        self.vocab = self._vocabulary(1200)
        self.people: list[_Person] = []
        self.cross: list[_Person] = []
        self.extra_common: list[_Person] = []

    def _vocabulary(self, n: int) -> list[str]:
        words: set[str] = set()
        while len(words) < n:
            words.add(_word(self.rng, self.rng.between(2, 3)))
        return sorted(words)

    # -- people --------------------------------------------------------------

    def make_people(self) -> None:
        rng = self.rng
        taken: set[str] = set()
        users: set[str] = set()
        order = ["ProjectLeader", "Administrator", "Developer", "User", "Unknown"]
        for role in order:
            for _ in range(self.p.n_participants_per_role.get(role, 0)):
                while True:
                    first = _word(rng, 2).capitalize()
                    last = _word(rng, 3).capitalize()
                    name = f"{first} {last}"
                    user = (first[0] + last).lower()
                    if name not in taken and user not in users:
                        break
                taken.add(name)
                users.add(user)
                emails = [f"{user}@{_word(rng, 2)}.org"]
                if rng.chance(0.2):
                    emails.append(f"{first.lower()}.{last.lower()}@{_word(rng, 2)}.net")
                home = "dev" if role in ("ProjectLeader", "Administrator", "Developer") else "user"
                weight = 0.15 + rng.random() ** 3 * 4
                self.people.append(
                    _Person(name, role, user, emails, home, weight, in_roster=role != "Unknown")
                )

        eligible = [x for x in self.people if x.role in ("Administrator", "Developer", "User")]
        picked = rng.sample(eligible, self.p.planted_cross_count + self.p.extra_common_count)
        self.cross = picked[: self.p.planted_cross_count]
        self.extra_common = picked[self.p.planted_cross_count:]
        for x in picked:
            x.home = "both"
            x.weight = max(x.weight, 1.0)
        champion = next((x for x in self.cross if x.role == "User"), None)
        if champion is not None:
            champion.category = "U-C"

    def roster(self) -> list[dict]:
        out = []
        for x in self.people:
            if not x.in_roster:
                continue
            aliases = [{"name": x.name, "email": e} for e in x.emails]
            aliases.append({"name": x.username, "email": ""})
            rec = {"canonical_name": x.name, "role": x.role, "aliases": aliases}
            if x.category:
                rec["category"] = x.category
            out.append(rec)
        return out

    # -- text ----------------------------------------------------------------

    def own_text(self, n_lines: int) -> list[str]:
        lines = []
        for _ in range(n_lines):
            self.nonce += 1
            words = [f"q{self.nonce:06d}x"] + [
                self.rng.choice(self.vocab) for _ in range(self.rng.between(7, 10))
            ]
            lines.append(" ".join(words))
        return lines

    def excerpt(self, source: _Msg) -> list[str]:
        k = self.rng.below(len(source.own_lines) - 1)
        lines = source.own_lines[k:k + 2]
        if self.rng.chance(self.p.quote_noise):
            first = lines[0].split(" ")
            keep = len(first) - self.rng.between(1, 2)
            cut = first[keep]
            partial = cut[: max(1, len(cut) // 2)]
            lines = [" ".join(first[:keep] + [partial]), lines[1]]
        return lines

    # -- discussions -----------------------------------------------------------

    def new_id(self, list_id: str) -> str:
        self.msg_counter += 1
        return f"s{self.p.seed}.{self.msg_counter:05d}.{list_id}@synth.example"

    def pool(self, list_side: str, paired: bool) -> list[_Person]:
        out = []
        for x in self.people:
            if x.home == list_side or x.home == "both":
                if paired and x in self.extra_common:
                    continue
                out.append(x)
        return out

    def senders(self, list_side: str, paired: bool, forced: Sequence[_Person]) -> list[_Person]:
        pool = self.pool(list_side, paired)
        n = max(1, self.rng.poisson(self.p.message_rate - 1) + 1)
        if paired:
            n = max(n, 3)
        chosen = [self.rng.weighted(pool, [x.weight for x in pool]) for _ in range(n)]
        for x in forced:
            chosen.insert(1 + self.rng.below(len(chosen)), x)
        return chosen

    def discussion(self, list_id: str, side: str, subject: str, root_subject: str,
                   start: int, senders: list[_Person], allow_headerless: bool) -> list[_Msg]:
        tag = "[Python-Dev] " if side == "dev" else ""
        msgs: list[_Msg] = []
        date = start
        for i, who in enumerate(senders):
            m = _Msg(self.new_id(list_id), list_id, who)
            if i == 0:
                m.subject = tag + root_subject
            else:
                date += self.rng.between(2 * HOUR, 48 * HOUR)
                recent = msgs[-3:]
                m.parent = self.rng.choice(recent) if self.rng.chance(0.5) else msgs[-1]
                marker = self.rng.choice(["Re: ", "RE: ", "Re: Re: ", "re: "])
                m.subject = marker + tag + subject
                m.headerless = allow_headerless and self.rng.chance(self.p.headerless_rate)
            m.date = date
            m.own_lines = self.own_text(self.rng.between(2, 4))
            msgs.append(m)
        return msgs

    def add_quotes(self, msgs: list[_Msg], corpus_earlier: list[_Msg]) -> None:
        for m in msgs:
            blocks: list = []
            if m.parent is not None and self.rng.chance(self.p.quote_rate):
                earlier = [x for x in msgs if x.date < m.date]
                foreign = [x for x in corpus_earlier if x.date < m.date]
                if foreign and self.rng.chance(self.p.foreign_quote_rate):
                    source = self.rng.choice(foreign)
                elif self.rng.chance(0.7):
                    source = m.parent
                else:
                    source = self.rng.choice(earlier)
                nested = [b for b in m.parent.blocks if b[0] == 1]
                if source is m.parent and nested and self.rng.chance(self.p.nested_quote_rate):
                    _, lines, src = self.rng.choice(nested)
                    blocks.append((2, list(lines), src))
                blocks.append((1, self.excerpt(source), source))
                others = [x for x in earlier if x is not source]
                if others and self.rng.chance(self.p.second_quote_rate):
                    second = self.rng.choice(others)
                    blocks.append((1, self.excerpt(second), second))
            m.blocks = blocks
            m.body_lines = self.render_body(m)

    def render_body(self, m: _Msg) -> list[str]:
        own = list(m.own_lines)
        out: list[str] = []
        prev_depth = 0
        for depth, lines, src in m.blocks:
            if depth == 1 and prev_depth == 1:
                # keep consecutive depth-1 blocks apart
                out.append(own.pop(0))
            if self.rng.chance(self.p.hint_rate):
                prefix = "> " if depth == 2 else ""
                out.append(f"{prefix}{src.sender.name} wrote:")
            out.extend(("> " * depth) + ln for ln in lines)
            prev_depth = depth
        out.extend(own)
        return out

    # -- whole corpus ----------------------------------------------------------

    def build(self) -> tuple[dict[str, list[_Msg]], list, list, list]:
        p, rng = self.p, self.rng
        self.make_people()
        n = p.n_discussions_per_list
        span = p.span_days * DAY
        sides = {"user": p.user_list, "dev": p.dev_list}

        paired_idx = sorted(rng.sample(range(n), p.parallel_pair_count))
        cross_for_pair: dict[int, list[_Person]] = {k: [] for k in range(p.parallel_pair_count)}
        for i, x in enumerate(self.cross):
            cross_for_pair[i % p.parallel_pair_count].append(x)
        unpaired = [i for i in range(n) if i not in paired_idx]
        forced_common: dict[tuple[str, int], list[_Person]] = {}
        for x in self.extra_common:
            for side in ("user", "dev"):
                forced_common.setdefault((side, rng.choice(unpaired)), []).append(x)

        starts = {side: sorted(self.start + rng.below(span) for _ in range(n)) for side in sides}
        by_list: dict[str, list[list[_Msg]]] = {p.user_list: [], p.dev_list: []}
        pairs = []
        mother = []
        k_pair = 0
        for i in range(n):
            pair_k = paired_idx.index(i) if i in paired_idx else None
            for side in ("user", "dev"):
                list_id = sides[side]
                topic = " ".join(rng.choice(self.vocab) for _ in range(2))
                if pair_k is not None:
                    subject = f"{p.keyword.capitalize()} {topic} pair{pair_k}"
                    if side == "dev":
                        subject = by_list[p.user_list][-1][0].subject
                        start = by_list[p.user_list][-1][0].date + HOUR
                    else:
                        start = starts[side][i]
                    forced = cross_for_pair[pair_k]
                    root_subject = subject
                    headerless_ok = False
                else:
                    subject = f"{p.keyword.capitalize()} {topic} {side}{i}"
                    root_subject = subject
                    start = starts[side][i]
                    forced = forced_common.get((side, i), [])
                    headerless_ok = True
                    if rng.chance(p.mother_thread_rate):
                        root_subject = f"Numeric {topic} {side}{i}"
                        subject = f"{root_subject} ({p.keyword})"
                        headerless_ok = False
                who = self.senders(side, pair_k is not None, forced)
                if root_subject != subject and len(who) < 2:
                    who.append(who[0])
                msgs = self.discussion(list_id, side, subject, root_subject, start, who, headerless_ok)
                if root_subject != subject:
                    mother.append(msgs[0].message_id)
                by_list[list_id].append(msgs)
            if pair_k is not None:
                pairs.append([
                    f"{p.user_list}/{by_list[p.user_list][-1][0].message_id}",
                    f"{p.dev_list}/{by_list[p.dev_list][-1][0].message_id}",
                ])
                k_pair += 1

        # quotes, in global date order so foreign sources are already rendered
        all_disc = [d for ds in by_list.values() for d in ds]
        all_disc.sort(key=lambda d: (d[0].date, d[0].message_id))
        rendered: list[_Msg] = []
        for d in all_disc:
            self.add_quotes(d, rendered)
            rendered.extend(d)
        return by_list, pairs, mother, self.revisions()

    def revisions(self) -> list[dict]:
        p, rng = self.p, self.rng
        committers = [x for x in self.people if x.role in ("ProjectLeader", "Administrator", "Developer")]
        committers += [x for x in self.cross if x not in committers]
        if not committers:
            return []
        weights = [4.0 if i == 0 else 0.5 + rng.random() for i in range(len(committers))]
        creditable = [x for x in self.people if x.in_roster]
        out = []
        for space, count in sorted(p.revisions_per_space.items()):
            for i in range(count):
                who = rng.weighted(committers, weights)
                words = [rng.choice(self.vocab) for _ in range(rng.between(4, 9))]
                credited = []
                if rng.chance(p.credit_rate):
                    other = rng.choice([x for x in creditable if x is not who] or [who])
                    if other is not who:
                        credited.append(other.name)
                        template = rng.choice(["thanks to {n}", "apply {n}'s patch", "on behalf of {n}"])
                        words.append(template.format(n=other.name))
                date = self.start + rng.below(p.span_days * DAY)
                out.append({
                    "revision": f"{space[:3].lower()}{i + 1:04d}",
                    "space": space,
                    "path": "Doc/pep-0327.txt" if space == "Documentation" else "Lib/decimal.py",
                    "author": who.username,
                    "committer": who.name,
                    "date": datetime.fromtimestamp(date, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
                    "timestamp": date,
                    "message": " ".join(words),
                    "credited": credited,
                })
        return out


def _from_header(rng: _Rng, x: _Person) -> str:
    email = rng.choice(x.emails)
    if not x.in_roster:
        return f"{x.name} <{email}>"
    r = rng.random()
    if r < 0.6:
        return f"{x.name} <{email}>"
    if r < 0.8:
        return f"{email} ({x.name})"
    return f"<{email}>"


def _render_message(rng: _Rng, m: _Msg) -> bytes:
    headers = [
        f"From: {_from_header(rng, m.sender)}",
        f"Date: {format_datetime(datetime.fromtimestamp(m.date, tz=timezone.utc))}",
        f"Subject: {m.subject}",
        f"Message-ID: <{m.message_id}>",
    ]
    if m.parent is not None and not m.headerless:
        chain = []
        node = m.parent
        while node is not None:
            chain.append(node.message_id)
            node = node.parent
        headers.append(f"In-Reply-To: <{m.parent.message_id}>")
        headers.append("References: " + " ".join(f"<{i}>" for i in reversed(chain)))
    headers.append("MIME-Version: 1.0")
    body = "\n".join(m.body_lines) + "\n"
    style = rng.random()
    if style < 0.1:
        headers += ["Content-Type: text/plain; charset=utf-8", "Content-Transfer-Encoding: base64"]
        encoded = base64.encodebytes(body.encode("utf-8")).decode("ascii")
        payload = encoded
    elif style < 0.15:
        boundary = f"=_b{m.message_id.split('@')[0]}"
        headers.append(f'Content-Type: multipart/mixed; boundary="{boundary}"')
        attachment = base64.encodebytes(b"\x00\x01binary attachment\xff").decode("ascii")
        payload = (
            f"--{boundary}\nContent-Type: text/plain; charset=utf-8\n\n{body}\n"
            f"--{boundary}\nContent-Type: application/octet-stream\n"
            f'Content-Disposition: attachment; filename="data.bin"\n'
            f"Content-Transfer-Encoding: base64\n\n{attachment}\n--{boundary}--\n"
        )
    else:
        headers.append("Content-Type: text/plain; charset=utf-8")
        payload = body
    return ("\n".join(headers) + "\n\n" + payload).encode("utf-8")


_MALFORMED = (
    "From: Broken Sender <broken@example.org>\nSubject: {kw} noise\nMessage-ID: <bad{n}@synth.example>\n\nno date here\n",
    "From: Broken Sender <broken@example.org>\nDate: sometime soon\nSubject: {kw} noise\nMessage-ID: <bad{n}@synth.example>\n\nbad date\n",
    "this archive entry lost its headers\nand has only garbage in it {n}\n",
    "From: Broken Sender <broken@example.org>\nDate: Tue, 45 Foo 20x3 99:99:99 +0000\nSubject: {kw}\n\nworse date\n",
)


def _mbox(rng: _Rng, msgs: list[_Msg], malformed_rate: float, keyword: str, counter: list) -> bytes:
    chunks = []
    for m in sorted(msgs, key=lambda x: (x.date, x.message_id)):
        if rng.chance(malformed_rate):
            counter[0] += 1
            text = _MALFORMED[rng.below(len(_MALFORMED))].format(n=counter[0], kw=keyword)
            chunks.append(b"From MAILER-DAEMON Thu Jan  1 00:00:00 2004\n" + text.encode() + b"\n")
        stamp = datetime.fromtimestamp(m.date, tz=timezone.utc).strftime("%a %b %d %H:%M:%S %Y")
        chunks.append(
            f"From {m.sender.emails[0]} {stamp}\n".encode() + _render_message(rng, m) + b"\n"
        )
    return b"".join(chunks)


def generate_corpus(params: SynthParams) -> SynthCorpus:
    """Generate both list archives, both revision logs and the ground truth."""
    b = _Builder(params)
    by_list, pairs, mother, revisions = b.build()
    malformed = [0]
    rng = b.rng
    mboxes = {
        lid: _mbox(rng, [m for d in ds for m in d], params.malformed_rate, params.keyword, malformed)
        for lid, ds in sorted(by_list.items())
    }

    logs: dict[str, bytes] = {}
    for space in sorted(params.revisions_per_space):
        lines = [
            json.dumps({k: r[k] for k in ("revision", "space", "path", "author", "date", "message")},
                       sort_keys=True)
            for r in revisions if r["space"] == space
        ]
        logs[space] = ("\n".join(lines) + "\n").encode() if lines else b""

    discussions = []
    quotes = []
    posters = {}
    for lid, ds in sorted(by_list.items()):
        for d in ds:
            root = d[0]
            key = " ".join(root.subject.replace("[Python-Dev] ", "").lower().split())
            discussions.append({
                "discussion_id": f"{lid}/{root.message_id}",
                "list_id": lid,
                "subject_key": key,
                "messages": [
                    {
                        "message_id": m.message_id,
                        "sender": m.sender.name,
                        "date": m.date,
                        "parent": m.parent.message_id if m.parent else None,
                    }
                    for m in d
                ],
            })
            for m in d:
                posters[m.sender.name] = m.sender.role
                for idx, (depth, _, src) in enumerate(m.blocks):
                    quotes.append({
                        "message_id": m.message_id,
                        "list_id": lid,
                        "block": idx,
                        "depth": depth,
                        "quoter": m.sender.name,
                        "source": src.message_id,
                        "source_sender": src.sender.name,
                    })

    truth = GroundTruth(
        params=asdict(params),
        lists={"user": params.user_list, "developer": params.dev_list},
        roster=b.roster(),
        posters=dict(sorted(posters.items())),
        discussions=discussions,
        pairs=pairs,
        cross=sorted(x.name for x in b.cross),
        quotes=quotes,
        revisions=[
            {k: r[k] for k in ("revision", "space", "committer", "credited", "timestamp")}
            for r in revisions
        ],
        malformed=malformed[0],
        mother_thread=sorted(mother),
    )
    return SynthCorpus(mboxes, logs, truth)


def write_corpus(params: SynthParams, out_dir: str | Path) -> dict[str, Path]:
    """Write archives, logs, roster, ground truth and a ready-to-run config."""
    from .oracle import oracle_metrics

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = generate_corpus(params)
    paths: dict[str, Path] = {}
    for lid, data in corpus.mboxes.items():
        paths[lid] = out / f"{lid}.mbox"
        paths[lid].write_bytes(data)
    for space, data in corpus.revision_logs.items():
        paths[space] = out / f"{space.lower()}.jsonl"
        paths[space].write_bytes(data)
    paths["roster"] = out / "roster.json"
    paths["roster"].write_text(json.dumps(corpus.ground_truth.roster, indent=1, sort_keys=True) + "\n")
    truth = corpus.ground_truth.to_dict()
    truth["expected"] = oracle_metrics(corpus.ground_truth)
    paths["ground_truth"] = out / "ground_truth.json"
    paths["ground_truth"].write_text(json.dumps(truth, indent=1, sort_keys=True) + "\n")
    paths["config"] = out / "config.yaml"
    paths["config"].write_text(yaml.safe_dump(synth_config(params), sort_keys=False))
    return paths


def synth_config(params: SynthParams, output: str = "analysis") -> dict:
    start = datetime.fromisoformat(params.start).date()
    end = datetime.fromtimestamp(
        datetime.fromisoformat(params.start).replace(tzinfo=timezone.utc).timestamp()
        + (params.span_days + 120) * DAY,
        tz=timezone.utc,
    ).date()
    return {
        "corpora": [{
            "name": "synthetic",
            "keywords": [params.keyword],
            "date_from": start.isoformat(),
            "date_to": end.isoformat(),
        }],
        "lists": [
            {"list_id": params.user_list, "archives": [f"{params.user_list}.mbox"], "orientation": "user"},
            {"list_id": params.dev_list, "archives": [f"{params.dev_list}.mbox"], "orientation": "developer"},
        ],
        "roster": "roster.json",
        "revision_logs": [
            {"path": f"{space.lower()}.jsonl", "space": space}
            for space in sorted(params.revisions_per_space)
        ],
        "output": output,
    }
